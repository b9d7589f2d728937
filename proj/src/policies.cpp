#include "pucl/policies.hpp"

#include <memory>
#include <stdexcept>

namespace pucl {

Vec project_to_learned(const ConstraintNet& net, const Vec& a, double accept, int iters) {
    const auto feasible = [&](const Vec& x) { return net.predict(x) > accept; };
    if (feasible(a)) return a;
    if (!feasible(Vec::Zero(a.size()))) return Vec::Zero(a.size());
    double lo = 0.0;  // feasible end
    double hi = 1.0;  // rejected end
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid * a) ? lo : hi) = mid;
    }
    return lo * a;
}

namespace {

Vec noise_stds(const ExperimentConfig& cfg) {
    const int dim = cfg.env.dim;
    Vec stds(dim);
    for (int d = 0; d < dim; ++d) {
        const double cap = cfg.env.cap_mode == CapMode::Box ? cfg.env.box_caps[d] : cfg.env.cap;
        stds[d] = cfg.exploration_noise * cap;
    }
    return stds;
}

}  // namespace

PolicyFn make_learned_policy(const ExperimentConfig& cfg, const ModulationField& field,
                             const ConstraintNet& net, Rng* noise_rng) {
    const NominalDS ds = NominalDS::to_goal(cfg.env.goal);
    const EnvSpec env = cfg.env;
    const Vec stds = noise_stds(cfg);

    if (cfg.features.mode == FeatureMode::StateOnly) {
        const ModulationField* f = &field;
        return [ds, env, stds, noise_rng, f](const Vec& s) {
            Vec v = nominal_velocity(ds, s, env);
            if (noise_rng)
                for (Eigen::Index d = 0; d < v.size(); ++d)
                    v[d] += noise_rng->normal(0.0, stds[d]);
            v = cap_action(env, v);
            return cap_action(env, f->modulated_velocity(s, v));
        };
    }
    if (cfg.features.mode == FeatureMode::ActionOnly) {
        std::shared_ptr<AnalyticField> known;
        if (cfg.known) known = std::make_shared<AnalyticField>(*cfg.known, cfg.known_margin);
        const ConstraintNet* n = &net;
        return [ds, env, stds, noise_rng, known, n](const Vec& s) {
            Vec a = nominal_velocity(ds, s, env);
            if (known) a = known->modulated_velocity(s, a);
            if (noise_rng)
                for (Eigen::Index d = 0; d < a.size(); ++d)
                    a[d] += noise_rng->normal(0.0, stds[d]);
            a = cap_action(env, a);
            return project_to_learned(*n, a);
        };
    }
    throw std::invalid_argument("no policy backend for custom feature maps");
}

}  // namespace pucl
