#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "pucl/env.hpp"
#include "pucl/feature_map.hpp"
#include "pucl/rng.hpp"
#include "pucl/types.hpp"

using namespace pucl;

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

StateAction sa4(double s0, double s1, double a0, double a1) {
    return {vec2(s0, s1), vec2(a0, a1)};
}

}  // namespace

TEST_CASE("feature map selects state, action, or custom concatenation slots") {
    const StateAction sa = sa4(1.0, 2.0, 3.0, 4.0);

    FeatureSpec state_only;
    state_only.mode = FeatureMode::StateOnly;
    CHECK(feature_map(sa, state_only) == sa.state);
    CHECK(state_only.output_dim(2, 2) == 2);

    FeatureSpec action_only;
    action_only.mode = FeatureMode::ActionOnly;
    CHECK(feature_map(sa, action_only) == sa.action);

    FeatureSpec custom;
    custom.mode = FeatureMode::Custom;
    custom.indices = {3, 0};  // a1, s0 from (s0,s1,a0,a1)
    const Vec got = feature_map(sa, custom);
    REQUIRE(got.size() == 2);
    CHECK(got(0) == 4.0);
    CHECK(got(1) == 1.0);
    CHECK(custom.output_dim(2, 2) == 2);
}

TEST_CASE("flatten keeps trajectory-major order with back references") {
    Trajectory t0;
    t0.start_index = 0;
    t0.steps = {sa4(0, 0, 1, 0), sa4(1, 0, 1, 0)};
    Trajectory t1;
    t1.start_index = 1;
    t1.steps = {sa4(5, 5, 0, 1)};

    FeatureSpec spec;
    const Dataset ds = flatten_trajectories({t0, t1}, spec, Provenance::Policy);
    REQUIRE(ds.size() == 3);
    CHECK(ds.point(0) == vec2(0, 0));
    CHECK(ds.point(2) == vec2(5, 5));
    CHECK(ds.traj_of(0) == 0);
    CHECK(ds.step_of(1) == 1);
    CHECK(ds.traj_of(2) == 1);

    const auto groups = group_by_trajectory(ds);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0] == std::vector<std::size_t>{0, 1});
    CHECK(groups[1] == std::vector<std::size_t>{2});
}

TEST_CASE("dataset rejects wrong dimension and non-finite entries") {
    Dataset ds(2, Provenance::Demonstration);
    CHECK_THROWS(ds.push_back(Vec::Ones(3)));
    Vec bad = vec2(1.0, std::nan(""));
    CHECK_THROWS(ds.push_back(bad));
    CHECK(ds.empty());
}

TEST_CASE("discounted return matches the geometric sum of step rewards") {
    // Unit-speed steps of length 1: reward -1 each, so the discounted return
    // at gamma = 0.9 over two steps is -(0.9 + 0.81) = -1.71.
    EnvSpec env;
    env.dim = 2;
    env.lower = vec2(-10, -10);
    env.upper = vec2(10, 10);
    env.h = 1.0;
    env.cap = 1.0;
    env.goal = vec2(100, 100);  // unreachable, no early stop
    Trajectory traj;
    traj.steps = {sa4(0, 0, 1, 0), sa4(1, 0, 1, 0)};
    CHECK(trajectory_return(env, traj, 0.9) == doctest::Approx(-1.71).epsilon(1e-12));
    CHECK(trajectory_return(env, traj, 1.0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(path_length(env, traj) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("rng streams are deterministic and label separated") {
    Rng a = Rng::substream(42, "rollout", 3);
    Rng b = Rng::substream(42, "rollout", 3);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng c = Rng::substream(42, "rollout", 4);
    Rng d = Rng::substream(42, "eval", 3);
    Rng e = Rng::substream(42, "rollout", 3);
    bool tag_differs = false, label_differs = false;
    for (int i = 0; i < 8; ++i) {
        const std::uint64_t base = e.next_u64();
        tag_differs = tag_differs || c.next_u64() != base;
        label_differs = label_differs || d.next_u64() != base;
    }
    CHECK(tag_differs);
    CHECK(label_differs);
}

TEST_CASE("uniform draws stay in range and normals have sane spread") {
    Rng r(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.05);
    CHECK(hi > 0.95);

    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
}
