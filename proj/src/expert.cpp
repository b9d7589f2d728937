#include "pucl/expert.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "pucl/modulation.hpp"
#include "pucl/true_constraint.hpp"

namespace pucl {

Vec sample_start(const ExperimentConfig& cfg, Rng& rng) {
    const int dim = cfg.env.dim;
    const Vec zero = Vec::Zero(dim);
    for (int tries = 0; tries < 100000; ++tries) {
        Vec s(dim);
        for (int d = 0; d < dim; ++d) s[d] = rng.uniform(cfg.starts.lower[d], cfg.starts.upper[d]);
        StateAction sa{s, zero};
        if (is_truly_infeasible(cfg.target, sa)) continue;
        if (cfg.known && is_truly_infeasible(*cfg.known, sa)) continue;
        if (in_goal(cfg.env, s)) continue;
        if (cfg.starts.min_goal_distance > 0.0 &&
            (s - cfg.env.goal).norm() < cfg.starts.min_goal_distance)
            continue;
        return s;
    }
    throw std::runtime_error("sample_start: rejection budget exhausted");
}

ViolationFn demo_violation_fn(const ExperimentConfig& cfg) {
    const TrueConstraint target = cfg.target;
    const std::optional<TrueConstraint> known = cfg.known;
    return [target, known](const StateAction& sa) {
        if (is_truly_infeasible(target, sa)) return true;
        return known && is_truly_infeasible(*known, sa);
    };
}

namespace {

PolicyFn position_expert(const ExperimentConfig& cfg, Rng* rng) {
    auto field = std::make_shared<AnalyticField>(cfg.target, cfg.expert.margin);
    const NominalDS ds = NominalDS::to_goal(cfg.env.goal);
    const EnvSpec env = cfg.env;
    const double noise = cfg.expert.noise_std;
    return [field, ds, env, rng, noise](const Vec& s) {
        Vec a = field->modulated_velocity(s, nominal_velocity(ds, s, env));
        for (Eigen::Index d = 0; d < a.size(); ++d) a[d] += rng->normal(0.0, noise);
        return a;
    };
}

PolicyFn velocity_expert(const ExperimentConfig& cfg, Rng* rng) {
    if (!cfg.known) throw std::invalid_argument("velocity expert needs known geometry");
    auto field = std::make_shared<AnalyticField>(*cfg.known, cfg.expert.margin);
    const NominalDS ds = NominalDS::to_goal(cfg.env.goal);
    const EnvSpec env = cfg.env;
    const double noise = cfg.expert.noise_std;
    const Vec limits = std::get<VelocityBox>(cfg.target).limits;
    const double shrink = cfg.expert.velocity_margin;
    return [field, ds, env, rng, noise, limits, shrink](const Vec& s) {
        Vec a = field->modulated_velocity(s, nominal_velocity(ds, s, env));
        for (Eigen::Index d = 0; d < a.size(); ++d) {
            a[d] += rng->normal(0.0, noise);
            const double lim = limits[d] - shrink;
            a[d] = std::clamp(a[d], -lim, lim);
        }
        return a;
    };
}

PolicyFn halfspace_expert(const ExperimentConfig& cfg, Rng* rng) {
    const auto& hs = std::get<SyntheticHalfspace>(cfg.target);
    int axis = -1;
    for (Eigen::Index d = 0; d < hs.coeff.size(); ++d) {
        if (hs.coeff[d] == 0.0) continue;
        if (axis >= 0)
            throw std::invalid_argument("scripted expert expects an axis-aligned halfspace");
        axis = static_cast<int>(d);
    }
    if (axis < 0) throw std::invalid_argument("halfspace has no active dimension");
    const double coeff = hs.coeff[axis];
    // Keep coeff * s_next above offset + margin (in constraint units).
    const double bound = (hs.offset + cfg.expert.margin) / coeff;
    const NominalDS ds = NominalDS::to_goal(cfg.env.goal);
    const EnvSpec env = cfg.env;
    const double noise = cfg.expert.noise_std;
    const bool positive = coeff > 0.0;
    return [ds, env, rng, noise, axis, bound, positive](const Vec& s) {
        Vec a = cap_action(env, ds.velocity(s));
        for (Eigen::Index d = 0; d < a.size(); ++d) a[d] += rng->normal(0.0, noise);
        a = cap_action(env, a);
        const double need = (bound - s[axis]) / env.h;
        a[axis] = positive ? std::max(a[axis], need) : std::min(a[axis], need);
        return a;
    };
}

}  // namespace

PolicyFn make_expert_policy(const ExperimentConfig& cfg, Rng* rng) {
    if (std::holds_alternative<VelocityBox>(cfg.target)) return velocity_expert(cfg, rng);
    if (std::holds_alternative<SyntheticHalfspace>(cfg.target)) return halfspace_expert(cfg, rng);
    return position_expert(cfg, rng);
}

DemoSet generate_demonstrations(const ExperimentConfig& cfg) {
    DemoSet out;
    out.env_fingerprint = env_hash(cfg);
    const ViolationFn violates = demo_violation_fn(cfg);
    const Vec zero = Vec::Zero(cfg.env.dim);

    for (int i = 0; i < cfg.demo_count; ++i) {
        bool accepted = false;
        for (int attempt = 0; attempt < cfg.expert.max_attempts && !accepted; ++attempt) {
            const std::uint64_t tag = static_cast<std::uint64_t>(i) * 1000 + attempt;
            Rng start_rng = Rng::substream(cfg.demo_seed, "demo-start", tag);
            const Vec start = sample_start(cfg, start_rng);

            Rng noise_rng = Rng::substream(cfg.demo_seed, "demo-noise", tag);
            const PolicyFn expert = make_expert_policy(cfg, &noise_rng);
            Trajectory traj = rollout(cfg.env, expert, start, cfg.env.horizon, i, cfg.discount);

            bool violated = false;
            for (const auto& sa : traj.steps) {
                if (is_truly_infeasible(cfg.target, sa)) {
                    violated = true;
                    break;
                }
            }
            if (!violated && !traj.empty()) {
                const Vec terminal = step(cfg.env, traj.steps.back().state,
                                          traj.steps.back().action).next;
                violated = is_truly_infeasible(cfg.target, {terminal, zero});
            }
            if (violated) continue;

            Rng ref_rng = Rng::substream(cfg.demo_seed, "demo-ref", tag);
            const PlanResult ref = plan_trajectory(cfg.env, start, violates, cfg.planner, ref_rng,
                                                   cfg.discount);
            const double rstar = ref.trajectory.cached_return;
            if (traj.cached_return < rstar - cfg.expert.delta_budget * std::abs(rstar)) continue;

            out.trajectories.push_back(std::move(traj));
            out.reference_returns.push_back(rstar);
            accepted = true;
        }
        if (!accepted)
            throw std::runtime_error("generate_demonstrations: attempt budget exhausted for demo " +
                                     std::to_string(i));
    }
    return out;
}

}  // namespace pucl
