#include "pucl/cem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pucl/modulation.hpp"

namespace pucl {

double penalized_return(const EnvSpec& env, const Trajectory& traj, const ConstraintNet& net,
                        const FeatureSpec& features, double w_p, double discount) {
    double ret = 0.0;
    double disc = 1.0;
    for (const auto& sa : traj.steps) {
        const double r = step(env, sa.state, sa.action).reward;
        const double c = net.predict(feature_map(sa, features)) <= 0.5 ? 1.0 : 0.0;
        disc *= discount;
        ret += disc * (r - w_p * c);
    }
    return ret;
}

namespace {

struct SampleEval {
    Trajectory traj;
    double objective = 0.0;
    double plain_return = 0.0;
    int violations = 0;
};

SampleEval evaluate_sequence(const EnvSpec& env, const Vec& start, const Mat& actions,
                             const ViolationFn& violates, const PlannerSpec& spec,
                             double discount) {
    SampleEval ev;
    Vec s = start;
    double disc = 1.0;
    for (int t = 0; t < actions.cols(); ++t) {
        if (in_goal(env, s)) break;
        const Vec a = cap_action(env, actions.col(t));
        const StepResult res = step(env, s, a);
        const bool bad = violates({s, a});
        ev.violations += bad ? 1 : 0;
        disc *= discount;
        ev.plain_return += disc * res.reward;
        ev.objective += disc * (res.reward - (bad ? spec.penalty_weight : 0.0));
        ev.traj.steps.push_back({s, a});
        s = res.next;
    }
    ev.objective -= spec.goal_weight * (s - env.goal).norm();
    ev.traj.cached_return = ev.plain_return;
    return ev;
}

Mat nominal_mean_sequence(const EnvSpec& env, const Vec& start, int horizon) {
    const NominalDS ds = NominalDS::to_goal(env.goal);
    Mat mean = Mat::Zero(env.dim, horizon);
    Vec s = start;
    for (int t = 0; t < horizon; ++t) {
        const Vec a = nominal_velocity(ds, s, env);
        mean.col(t) = a;
        s = step(env, s, a).next;
    }
    return mean;
}

}  // namespace

PlanResult plan_trajectory(const EnvSpec& env, const Vec& start, const ViolationFn& violates,
                           const PlannerSpec& spec, Rng& rng, double discount,
                           long max_env_steps) {
    const int S = spec.samples;
    const int T = spec.horizon;
    Vec noise_std(env.dim);
    for (int i = 0; i < env.dim; ++i) {
        const double cap = env.cap_mode == CapMode::Box && env.box_caps.size() > 0
                               ? env.box_caps[i]
                               : env.cap;
        noise_std[i] = spec.noise_std_scale * cap;
    }

    Mat mean = nominal_mean_sequence(env, start, T);

    PlanResult result;
    result.best_objective = -std::numeric_limits<double>::infinity();
    const int n_elite = std::max(1, static_cast<int>(std::lround(S * spec.elite_fraction)));

    std::vector<Mat> samples(S);
    std::vector<SampleEval> evals(S);

    for (int round = 0; round < spec.rounds; ++round) {
        samples[0] = mean;  // anchor: the mean itself is always evaluated
        for (int i = 1; i < S; ++i) {
            samples[i] = mean;
            for (int t = 0; t < T; ++t)
                for (int d = 0; d < env.dim; ++d) samples[i](d, t) += noise_std[d] * rng.normal();
        }

#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < S; ++i)
            evals[i] = evaluate_sequence(env, start, samples[i], violates, spec, discount);

        for (const auto& ev : evals) result.env_steps += static_cast<long>(ev.traj.length());

        std::vector<int> order(S);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return evals[a].objective > evals[b].objective; });

        const int best = order[0];
        if (evals[best].objective > result.best_objective) {
            result.best_objective = evals[best].objective;
            result.trajectory = evals[best].traj;
        }
        result.rounds.push_back(
            {round, evals[best].objective, evals[best].violations, spec.penalty_weight});

        Mat next = Mat::Zero(env.dim, T);
        for (int e = 0; e < n_elite; ++e) next += samples[order[e]];
        mean = next / static_cast<double>(n_elite);

        if (max_env_steps > 0 && result.env_steps >= max_env_steps) {
            result.budget_exhausted = round + 1 < spec.rounds;
            break;
        }
    }
    result.trajectory.start_index = -1;
    return result;
}

PlanResult plan_trajectory(const EnvSpec& env, const Vec& start, const ConstraintNet& net,
                           const FeatureSpec& features, const PlannerSpec& spec, Rng& rng,
                           double discount, long max_env_steps) {
    ViolationFn violates = [&](const StateAction& sa) {
        return net.predict(feature_map(sa, features)) <= 0.5;
    };
    return plan_trajectory(env, start, violates, spec, rng, discount, max_env_steps);
}

}  // namespace pucl
