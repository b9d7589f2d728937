#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "pucl/cem.hpp"
#include "pucl/env.hpp"
#include "pucl/modulation.hpp"
#include "pucl/net.hpp"
#include "pucl/pid.hpp"
#include "pucl/policies.hpp"
#include "pucl/rng.hpp"

using namespace pucl;

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Vec vec3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

ConstraintNet constant_net(int dim, double bias) {
    Rng rng(1);
    ConstraintNet net(dim, {}, 0.01, rng);
    net.weight(0).setZero();
    net.bias(0)(0) = bias;
    return net;
}

EnvSpec open_env2() {
    EnvSpec env;
    env.dim = 2;
    env.lower = vec2(-5, -5);
    env.upper = vec2(5, 5);
    env.goal = vec2(1.0, 0.0);
    env.goal_radius = 0.05;
    env.h = 0.1;
    env.cap = 1.0;
    env.horizon = 100;
    return env;
}

}  // namespace

TEST_CASE("barrier value follows the frozen fifth-root law") {
    const ConstraintNet net = constant_net(2, 0.0);
    ModulationField field(net);
    CHECK(field.gamma_of_zeta(1.0) == doctest::Approx(9.705505632961241).epsilon(1e-15));
    CHECK(field.gamma_of_zeta(0.5) == doctest::Approx(1.0));
    CHECK(field.gamma_of_zeta(0.3) == doctest::Approx(1.001));

    ModulationField capped(net, 1e-3, 5.0);
    CHECK(capped.gamma_of_zeta(1.0) == doctest::Approx(5.0));
}

TEST_CASE("modulation matrix acts as its eigensystem prescribes") {
    const double gamma = 9.705505632961241;
    const Vec n = vec2(1.0, 0.0);
    const Vec r = vec2(std::sqrt(0.5), std::sqrt(0.5));
    const Mat M = modulation_from(gamma, n, r);

    const double lr = 1.0 - 1.0 / gamma;
    const double lt = 1.0 + 1.0 / gamma;
    CHECK(lr == doctest::Approx(0.8969655837039873).epsilon(1e-15));
    CHECK(lt == doctest::Approx(1.1030344162960127).epsilon(1e-15));

    CHECK((M * r - lr * r).norm() < 1e-12);
    const Vec t = vec2(0.0, 1.0);  // tangent of n
    CHECK((M * t - lt * t).norm() < 1e-12);
    CHECK(M.determinant() == doctest::Approx(lr * lt).epsilon(1e-12));
}

TEST_CASE("rebuilding from the eigensystem reproduces the matrix") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        Vec n = vec3(rng.normal(), rng.normal(), rng.normal());
        n.normalize();
        Vec r = vec3(rng.normal(), rng.normal(), rng.normal());
        r.normalize();
        if (std::abs(r.dot(n)) < 1e-3) continue;  // keep E well conditioned
        const double gamma = 1.0 + 5.0 * rng.uniform01();
        const Mat M = modulation_from(gamma, n, r);

        Mat E(3, 3);
        E.col(0) = r;
        E.rightCols(2) = tangent_basis(n);
        Vec lambda = vec3(1.0 - 1.0 / gamma, 1.0 + 1.0 / gamma, 1.0 + 1.0 / gamma);
        const Mat rebuilt = E * lambda.asDiagonal() * E.inverse();
        CHECK((M - rebuilt).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("normal motion scales by the radial eigenvalue only") {
    // n·(M v) = lambda_r · c_r · (n·r) for v = c_r·r + tangent part, so at
    // gamma = 1 the boundary is impenetrable along the normal.
    Rng rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        Vec n = vec3(rng.normal(), rng.normal(), rng.normal());
        n.normalize();
        Vec r = vec3(rng.normal(), rng.normal(), rng.normal());
        r.normalize();
        if (std::abs(r.dot(n)) < 1e-3) continue;
        const double gamma = 1.0 + 4.0 * rng.uniform01();
        const Mat M = modulation_from(gamma, n, r);
        const Vec v = vec3(rng.normal(), rng.normal(), rng.normal());
        const double c_r = (n.dot(v)) / (n.dot(r));  // radial coefficient of v
        const double expected = (1.0 - 1.0 / gamma) * c_r * n.dot(r);
        CHECK(n.dot(M * v) == doctest::Approx(expected).epsilon(1e-9));
    }

    const Mat wall = modulation_from(1.0, vec2(1, 0), vec2(1, 0));
    const Vec inward = vec2(-1.0, 0.3);
    CHECK(std::abs(vec2(1, 0).dot(wall * inward)) < 1e-12);
}

TEST_CASE("tangential motion is preserved up to the tangent eigenvalue") {
    const Vec n = vec3(0.0, 0.0, 1.0);
    const Vec r = vec3(0.6, 0.0, 0.8);
    const double gamma = 2.0;
    const Mat M = modulation_from(gamma, n, r);
    const Vec t = vec3(0.3, -0.4, 0.0);  // arbitrary vector orthogonal to n
    CHECK((M * t - (1.0 + 1.0 / gamma) * t).norm() < 1e-12);
}

TEST_CASE("degenerate classifier gradient falls back to the identity") {
    const ConstraintNet net = constant_net(2, 0.0);  // zero gradient everywhere
    ModulationField field(net);
    const Mat M = field.modulation_matrix(vec2(0.3, 0.4));
    CHECK((M - Mat::Identity(2, 2)).norm() == 0.0);
    CHECK(field.degenerate_count() == 1);
}

TEST_CASE("buffer clustering splits by the joining radius and anchors references") {
    Rng rng(2);
    ConstraintNet net(2, {}, 0.01, rng);
    net.weight(0)(0, 0) = 1.0;  // zeta increases with x
    net.weight(0)(0, 1) = 0.0;
    net.bias(0).setZero();

    ModulationField field(net);
    const std::vector<Vec> pts = {vec2(0.05, 0), vec2(0, 0), vec2(1, 1), vec2(1.04, 1)};
    field.build_references(pts, 0.1);
    REQUIRE(field.components().size() == 2);
    CHECK(field.components()[0].members.size() == 2);
    // lowest-zeta member anchors each cluster: smaller x wins here
    CHECK(field.components()[0].reference == vec2(0, 0));
    CHECK(field.components()[1].reference == vec2(1, 1));

    field.build_references(pts, 3.0);
    CHECK(field.components().size() == 1);
}

TEST_CASE("penalized return is linear in the penalty weight") {
    EnvSpec env = open_env2();
    env.goal = vec2(100, 100);
    Trajectory traj;
    traj.steps.push_back({vec2(0, 0), vec2(1, 0)});
    traj.steps.push_back({vec2(0.1, 0), vec2(1, 0)});
    traj.steps.push_back({vec2(0.2, 0), vec2(1, 0)});

    FeatureSpec fs;
    const ConstraintNet always_ok = constant_net(2, 4.0);
    const ConstraintNet always_bad = constant_net(2, -4.0);
    const double gamma = 0.9;
    const double base = trajectory_return(env, traj, gamma);

    CHECK(penalized_return(env, traj, always_ok, fs, 10.0, gamma) == doctest::Approx(base));
    // every step violates: subtract w_p * (0.9 + 0.81 + 0.729)
    const double mass = 0.9 + 0.81 + 0.729;
    CHECK(penalized_return(env, traj, always_bad, fs, 10.0, gamma) ==
          doctest::Approx(base - 10.0 * mass).epsilon(1e-12));
    const double at2 = penalized_return(env, traj, always_bad, fs, 2.0, gamma);
    const double at7 = penalized_return(env, traj, always_bad, fs, 7.0, gamma);
    CHECK(at2 - at7 == doctest::Approx(5.0 * mass).epsilon(1e-12));
}

TEST_CASE("pid update reproduces hand-computed weights and clamps at zero") {
    const PidGains g;  // kp 2, ki 0.5, kd 0.1
    CHECK(pid_update(0.0, {0.5}, g) == doctest::Approx(1.3));
    // integral folds with a clamp: 0.5 then 0.7; derivative -0.3
    CHECK(pid_update(0.0, {0.5, 0.2}, g) == doctest::Approx(0.72));
    CHECK(pid_update(5.0, {0.0}, g) == doctest::Approx(0.0));
    CHECK(pid_update(0.0, {0.4}, g, 0.9) == doctest::Approx(0.0));  // below target
    CHECK_THROWS(pid_update(0.0, {}, g));
}

TEST_CASE("planner reaches an unobstructed goal and improves monotonically") {
    const EnvSpec env = open_env2();
    const ViolationFn never = [](const StateAction&) { return false; };
    PlannerSpec spec;
    spec.horizon = 40;
    spec.samples = 32;
    spec.rounds = 10;
    Rng rng(77);
    const PlanResult res = plan_trajectory(env, vec2(0, 0), never, spec, rng);

    REQUIRE(!res.trajectory.empty());
    const auto& last = res.trajectory.steps.back();
    const Vec terminal = step(env, last.state, last.action).next;
    CHECK((terminal - env.goal).norm() <= env.goal_radius);

    for (std::size_t i = 1; i < res.rounds.size(); ++i)
        CHECK(res.rounds[i].best_return >= res.rounds[i - 1].best_return - 1e-12);

    // the best path cannot beat the straight line by construction
    CHECK(path_length(env, res.trajectory) >= (env.goal - vec2(0, 0)).norm() - env.goal_radius);
}

TEST_CASE("planning is deterministic for a fixed seed") {
    const EnvSpec env = open_env2();
    const ViolationFn never = [](const StateAction&) { return false; };
    PlannerSpec spec;
    spec.horizon = 30;
    spec.samples = 16;
    spec.rounds = 6;
    Rng a(123), b(123);
    const PlanResult ra = plan_trajectory(env, vec2(-1, 1), never, spec, a);
    const PlanResult rb = plan_trajectory(env, vec2(-1, 1), never, spec, b);
    REQUIRE(ra.trajectory.length() == rb.trajectory.length());
    for (std::size_t i = 0; i < ra.trajectory.length(); ++i) {
        CHECK(ra.trajectory.steps[i].state == rb.trajectory.steps[i].state);
        CHECK(ra.trajectory.steps[i].action == rb.trajectory.steps[i].action);
    }
    CHECK(ra.best_objective == rb.best_objective);
}

TEST_CASE("planner respects the environment-step budget") {
    const EnvSpec env = open_env2();
    const ViolationFn never = [](const StateAction&) { return false; };
    PlannerSpec spec;
    spec.horizon = 30;
    spec.samples = 16;
    spec.rounds = 50;
    Rng rng(3);
    const PlanResult res = plan_trajectory(env, vec2(0, 0), never, spec, rng, 1.0, 500);
    CHECK(res.budget_exhausted);
    CHECK(res.env_steps <= 500 + spec.horizon * spec.samples);  // stops at round granularity
}

TEST_CASE("action projection shrinks toward zero until accepted") {
    Rng rng(4);
    ConstraintNet net(1, {}, 0.01, rng);
    // zeta = sigmoid(-8x + 8): accepts x < 1, rejects larger
    net.weight(0)(0, 0) = -8.0;
    net.bias(0)(0) = 8.0;

    Vec a(1);
    a << 0.5;
    CHECK(project_to_learned(net, a) == a);  // already accepted

    a << 2.0;
    const Vec proj = project_to_learned(net, a);
    CHECK(proj(0) <= 1.0 + 1e-6);
    CHECK(proj(0) > 0.95);
    CHECK(net.predict(proj) > 0.5);

    ConstraintNet reject_all = net;
    reject_all.weight(0).setZero();
    reject_all.bias(0)(0) = -5.0;
    CHECK(project_to_learned(reject_all, a) == Vec::Zero(1));
}
