#pragma once

#include <vector>

#include "pucl/cem.hpp"
#include "pucl/config.hpp"
#include "pucl/env.hpp"
#include "pucl/rng.hpp"

namespace pucl {

/// Uniform draw inside the start band. Rejects truly infeasible states,
/// states blocked by the known geometry, states inside the goal ball, and
/// states closer to the goal than the configured minimum.
Vec sample_start(const ExperimentConfig& cfg, Rng& rng);

/// Ground-truth violation test used to vet demonstrations: the target
/// constraint plus, when present, the known geometry.
ViolationFn demo_violation_fn(const ExperimentConfig& cfg);

/// Scripted demonstrator for the configured task: analytic obstacle
/// avoidance inflated by the expert margin, plus per-step Gaussian action
/// noise drawn from `*rng` (kept alive by the caller for the rollout).
PolicyFn make_expert_policy(const ExperimentConfig& cfg, Rng* rng);

struct DemoSet {
    std::vector<Trajectory> trajectories;   // start_index = demo index
    std::vector<double> reference_returns;  // planner reference per demo
    std::uint64_t env_fingerprint = 0;
};

/// Demonstrations satisfying the optimality assumption: zero ground-truth
/// violations (including the terminal state) and a return no worse than the
/// sampling-planner reference from the same start minus the configured
/// budget (scaled by |reference|, so the bound is meaningful for negative
/// returns). Rejected rollouts trigger a fresh start; exhausting
/// expert.max_attempts for any demonstration is an error.
DemoSet generate_demonstrations(const ExperimentConfig& cfg);

}  // namespace pucl
