#pragma once

#include <optional>

#include "pucl/env.hpp"
#include "pucl/eval_grid.hpp"
#include "pucl/net.hpp"
#include "pucl/rng.hpp"

namespace pucl {

/// Infeasible is the positive class; a point is predicted infeasible when
/// the classifier output is <= 0.5.
struct Confusion {
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;
    long total() const { return tp + fp + tn + fn; }
};

Confusion classify_grid(const ConstraintNet& net, const EvalGrid& grid);

/// Set metrics over the infeasible class; empty optional when the
/// denominator is zero (the metric is undefined, not 0 or 1).
std::optional<double> iou(const Confusion& c);
std::optional<double> recall(const Confusion& c);
std::optional<double> precision(const Confusion& c);
double accuracy(const Confusion& c);

struct SafetyStats {
    double unsafe_episode_rate = 0.0;  // episodes with >= 1 true violation
    double violation_step_fraction = 0.0;
    long episodes = 0;
    long steps = 0;
};

/// Rolls `cfg.unsafe_episodes` episodes from freshly sampled starts and
/// checks every executed (state, action) pair and each terminal state
/// against the ground-truth constraint.
SafetyStats safety_stats(const ExperimentConfig& cfg, const PolicyFn& policy, Rng& start_rng);

}  // namespace pucl
