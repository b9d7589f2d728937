#include "pucl/metrics.hpp"

#include <vector>

#include "pucl/expert.hpp"
#include "pucl/true_constraint.hpp"

namespace pucl {

Confusion classify_grid(const ConstraintNet& net, const EvalGrid& grid) {
    const std::size_t n = grid.points.size();
    std::vector<double> zeta(n);
    if (n) net.predict_batch(grid.points.row(0), n, zeta.data());
    Confusion c;
    for (std::size_t i = 0; i < n; ++i) {
        const bool pred_bad = zeta[i] <= 0.5;
        const bool truly_bad = grid.truly_infeasible[i] != 0;
        if (pred_bad && truly_bad)
            ++c.tp;
        else if (pred_bad)
            ++c.fp;
        else if (truly_bad)
            ++c.fn;
        else
            ++c.tn;
    }
    return c;
}

std::optional<double> iou(const Confusion& c) {
    const long denom = c.tp + c.fp + c.fn;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(c.tp) / denom;
}

std::optional<double> recall(const Confusion& c) {
    const long denom = c.tp + c.fn;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(c.tp) / denom;
}

std::optional<double> precision(const Confusion& c) {
    const long denom = c.tp + c.fp;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(c.tp) / denom;
}

double accuracy(const Confusion& c) {
    const long n = c.total();
    return n ? static_cast<double>(c.tp + c.tn) / n : 0.0;
}

SafetyStats safety_stats(const ExperimentConfig& cfg, const PolicyFn& policy, Rng& start_rng) {
    SafetyStats out;
    const Vec zero = Vec::Zero(cfg.env.dim);
    for (int ep = 0; ep < cfg.unsafe_episodes; ++ep) {
        const Vec start = sample_start(cfg, start_rng);
        const Trajectory traj = rollout(cfg.env, policy, start, cfg.env.horizon, ep);
        bool unsafe = false;
        for (const auto& sa : traj.steps) {
            ++out.steps;
            if (is_truly_infeasible(cfg.target, sa)) {
                unsafe = true;
                out.violation_step_fraction += 1.0;
            }
        }
        if (!traj.empty()) {
            const Vec terminal =
                step(cfg.env, traj.steps.back().state, traj.steps.back().action).next;
            if (is_truly_infeasible(cfg.target, {terminal, zero})) unsafe = true;
        }
        if (unsafe) out.unsafe_episode_rate += 1.0;
        ++out.episodes;
    }
    if (out.episodes) out.unsafe_episode_rate /= out.episodes;
    if (out.steps) out.violation_step_fraction /= out.steps;
    return out;
}

}  // namespace pucl
