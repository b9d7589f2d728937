#pragma once

#include <functional>
#include <vector>

#include "pucl/env.hpp"
#include "pucl/feature_map.hpp"
#include "pucl/net.hpp"
#include "pucl/pid.hpp"
#include "pucl/rng.hpp"
#include "pucl/types.hpp"

namespace pucl {

struct PlannerSpec {
    int horizon = 60;
    int samples = 64;
    double elite_fraction = 0.125;
    int rounds = 20;
    double noise_std_scale = 0.2;  // × env cap, per action dimension
    double penalty_weight = 10.0;  // w_p
    PidGains gains;
    double violation_target = 0.0;
    // Terminal goal-distance cost. With a pure negative-path-length reward
    // the empty plan is optimal; this term makes reaching the goal pay off.
    double goal_weight = 3.0;
};

/// Σ_t γ^t [r_t − w_p·c(s̄_t)] with c = 1 iff the classifier output at the
/// feature-mapped step is ≤ 0.5.
double penalized_return(const EnvSpec& env, const Trajectory& traj, const ConstraintNet& net,
                        const FeatureSpec& features, double w_p, double discount = 1.0);

/// Step-level violation indicator used by the planner; the net-based form of
/// `penalized_return` is the c(s̄) = [ζ ≤ 0.5] instance of this.
using ViolationFn = std::function<bool(const StateAction&)>;

struct RoundDiag {
    int round = 0;
    double best_return = 0.0;   // best penalized objective this round
    int violations = 0;         // violating steps in the round's best sample
    double penalty_weight = 0.0;
};

struct PlanResult {
    Trajectory trajectory;       // best rollout found
    double best_objective = 0.0;
    bool budget_exhausted = false;
    long env_steps = 0;
    std::vector<RoundDiag> rounds;
};

/// Cross-entropy search over open-loop action sequences maximizing the
/// penalized return plus the terminal goal term. The mean sequence is seeded
/// from a nominal-attractor rollout and re-evaluated as sample 0 each round,
/// so the best objective is monotone across rounds. Deterministic given the
/// Rng state. `max_env_steps` ≤ 0 means unlimited; once exceeded the search
/// stops and the best-so-far plan is returned with `budget_exhausted` set.
PlanResult plan_trajectory(const EnvSpec& env, const Vec& start, const ViolationFn& violates,
                           const PlannerSpec& spec, Rng& rng, double discount = 1.0,
                           long max_env_steps = 0);

/// Convenience overload penalizing against the learned classifier.
PlanResult plan_trajectory(const EnvSpec& env, const Vec& start, const ConstraintNet& net,
                           const FeatureSpec& features, const PlannerSpec& spec, Rng& rng,
                           double discount = 1.0, long max_env_steps = 0);

}  // namespace pucl
