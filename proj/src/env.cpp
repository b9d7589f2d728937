#include "pucl/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pucl {

Vec cap_action(const EnvSpec& env, const Vec& a) {
    if (env.cap_mode == CapMode::Norm) {
        const double n = a.norm();
        if (n <= env.cap || n == 0.0) return a;
        return a * (env.cap / n);
    }
    Vec out = a;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        const double c = env.box_caps.size() > 0 ? env.box_caps[i] : env.cap;
        out[i] = std::clamp(out[i], -c, c);
    }
    return out;
}

Vec clip_workspace(const EnvSpec& env, const Vec& s) {
    Vec out = s;
    for (Eigen::Index i = 0; i < out.size(); ++i)
        out[i] = std::clamp(out[i], env.lower[i], env.upper[i]);
    return out;
}

bool in_goal(const EnvSpec& env, const Vec& s) { return (s - env.goal).norm() <= env.goal_radius; }

StepResult step(const EnvSpec& env, const Vec& s, const Vec& a) {
    if (s.size() != env.dim || a.size() != env.dim)
        throw std::invalid_argument("step: dimension mismatch");
    const Vec capped = cap_action(env, a);
    StepResult res;
    res.next = clip_workspace(env, s + env.h * capped);
    res.reward = -(res.next - s).norm();
    return res;
}

Trajectory rollout(const EnvSpec& env, const PolicyFn& policy, const Vec& start, int horizon,
                   int start_index, double discount) {
    Trajectory traj;
    traj.start_index = start_index;
    Vec s = clip_workspace(env, start);
    double ret = 0.0;
    double disc = 1.0;
    for (int t = 0; t < horizon; ++t) {
        if (in_goal(env, s)) break;
        const Vec a = cap_action(env, policy(s));
        StepResult res = step(env, s, a);
        traj.steps.push_back({s, a});
        disc *= discount;
        ret += disc * res.reward;
        s = res.next;
    }
    traj.cached_return = ret;
    return traj;
}

double trajectory_return(const EnvSpec& env, const Trajectory& traj, double discount) {
    double ret = 0.0;
    double disc = 1.0;
    for (const auto& sa : traj.steps) {
        disc *= discount;
        ret += disc * step(env, sa.state, sa.action).reward;
    }
    return ret;
}

double path_length(const EnvSpec& env, const Trajectory& traj) {
    double len = 0.0;
    for (const auto& sa : traj.steps) len += -step(env, sa.state, sa.action).reward;
    return len;
}

}  // namespace pucl
