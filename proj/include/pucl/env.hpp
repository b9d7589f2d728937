#pragma once

#include <functional>

#include "pucl/types.hpp"

namespace pucl {

/// Norm caps rescale to the speed limit preserving direction; Box caps clamp
/// each axis independently (heterogeneous action scales).
enum class CapMode { Norm, Box };

struct EnvSpec {
    int dim = 2;
    Vec lower;
    Vec upper;
    double cap = 0.58;
    CapMode cap_mode = CapMode::Norm;
    Vec box_caps;  // per-axis caps, Box mode only
    double h = 0.05;
    int horizon = 200;
    Vec goal;
    double goal_radius = 0.05;
};

Vec cap_action(const EnvSpec& env, const Vec& a);
Vec clip_workspace(const EnvSpec& env, const Vec& s);
bool in_goal(const EnvSpec& env, const Vec& s);

struct StepResult {
    Vec next;
    double reward;  // negative displacement actually travelled
};

/// s' = clip(s + h·cap(a)); reward = −‖s' − s‖.
StepResult step(const EnvSpec& env, const Vec& s, const Vec& a);

using PolicyFn = std::function<Vec(const Vec&)>;

/// Runs at most `horizon` steps, stopping early once the state enters the
/// goal region (a start already inside it yields an empty trajectory).
/// Records the capped action actually applied; fills cached_return with the
/// discounted return (t starting at 1).
Trajectory rollout(const EnvSpec& env, const PolicyFn& policy, const Vec& start, int horizon,
                   int start_index, double discount = 1.0);

/// Σ_{t=1}^{T} γ^t r_t recomputed by replaying the stored actions through
/// the dynamics.
double trajectory_return(const EnvSpec& env, const Trajectory& traj, double discount = 1.0);

/// Polyline length of the realized state sequence (equals the negated
/// undiscounted return).
double path_length(const EnvSpec& env, const Trajectory& traj);

}  // namespace pucl
