#include "pucl/eval_grid.hpp"

#include <algorithm>
#include <stdexcept>

#include "pucl/rng.hpp"
#include "pucl/true_constraint.hpp"

namespace pucl {

namespace {

StateAction as_state_action(const ExperimentConfig& cfg, const Vec& p) {
    const Vec zero = Vec::Zero(cfg.env.dim);
    if (cfg.features.mode == FeatureMode::ActionOnly) return {zero, p};
    return {p, zero};
}

void default_lattice_bounds(const ExperimentConfig& cfg, Vec& lower, Vec& upper) {
    const int dim = cfg.env.dim;
    lower.resize(dim);
    upper.resize(dim);
    if (cfg.features.mode == FeatureMode::ActionOnly) {
        for (int d = 0; d < dim; ++d) {
            const double cap =
                cfg.env.cap_mode == CapMode::Box ? cfg.env.box_caps[d] : cfg.env.cap;
            lower[d] = -cap;
            upper[d] = cap;
        }
    } else {
        lower = cfg.env.lower;
        upper = cfg.env.upper;
    }
}

void sampled_bounds(const ExperimentConfig& cfg, const Dataset& demos, Vec& lower, Vec& upper) {
    if (demos.empty()) throw std::invalid_argument("sampled grid needs demonstration data");
    const int dim = demos.dim();
    lower.resize(dim);
    upper.resize(dim);
    for (int d = 0; d < dim; ++d) {
        double lo = demos.row(0)[d];
        double hi = lo;
        for (std::size_t i = 1; i < demos.size(); ++i) {
            lo = std::min(lo, demos.row(i)[d]);
            hi = std::max(hi, demos.row(i)[d]);
        }
        lower[d] = lo;
        upper[d] = hi;
    }
    if (const auto* hs = std::get_if<SyntheticHalfspace>(&cfg.target)) {
        for (int d = 0; d < dim && d < hs->coeff.size(); ++d) {
            if (hs->coeff[d] > 0.0) lower[d] = std::min(lower[d], cfg.env.lower[d]);
            if (hs->coeff[d] < 0.0) upper[d] = std::max(upper[d], cfg.env.upper[d]);
        }
    }
}

}  // namespace

EvalGrid build_eval_grid(const ExperimentConfig& cfg, const Dataset& demo_features) {
    const int dim = cfg.env.dim;
    EvalGrid grid;
    grid.points = Dataset(dim, Provenance::Policy);

    if (cfg.grid.mode == EvalGridSpec::Mode::Lattice) {
        Vec lower = cfg.grid.lower;
        Vec upper = cfg.grid.upper;
        if (lower.size() == 0 || upper.size() == 0) default_lattice_bounds(cfg, lower, upper);
        if (static_cast<int>(cfg.grid.resolution.size()) != dim)
            throw std::invalid_argument("grid resolution must match the feature dimension");
        long total = 1;
        for (int r : cfg.grid.resolution) total *= r;
        if (total > cfg.grid.budget) throw std::invalid_argument("grid exceeds its point budget");

        Vec p(dim);
        std::vector<int> idx(dim, 0);
        for (long flat = 0; flat < total; ++flat) {
            long rem = flat;
            for (int d = dim - 1; d >= 0; --d) {
                idx[d] = static_cast<int>(rem % cfg.grid.resolution[d]);
                rem /= cfg.grid.resolution[d];
            }
            for (int d = 0; d < dim; ++d) {
                const int res = cfg.grid.resolution[d];
                p[d] = res == 1 ? lower[d]
                                : lower[d] + (upper[d] - lower[d]) * idx[d] / (res - 1);
            }
            grid.points.push_back(p);
        }
    } else {
        Vec lower = cfg.grid.lower;
        Vec upper = cfg.grid.upper;
        if (lower.size() == 0 || upper.size() == 0) sampled_bounds(cfg, demo_features, lower, upper);
        if (cfg.grid.sample_count > cfg.grid.budget)
            throw std::invalid_argument("grid exceeds its point budget");
        Rng rng = Rng::substream(cfg.grid.sample_seed, "eval-grid");
        Vec p(dim);
        for (int i = 0; i < cfg.grid.sample_count; ++i) {
            for (int d = 0; d < dim; ++d) p[d] = rng.uniform(lower[d], upper[d]);
            grid.points.push_back(p);
        }
    }

    grid.truly_infeasible.resize(grid.points.size());
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        const StateAction sa = as_state_action(cfg, grid.points.point(i));
        grid.truly_infeasible[i] = is_truly_infeasible(cfg.target, sa) ? 1 : 0;
    }
    return grid;
}

}  // namespace pucl
