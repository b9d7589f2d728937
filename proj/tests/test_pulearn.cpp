#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "pucl/feature_map.hpp"
#include "pucl/knn.hpp"
#include "pucl/pu_steps.hpp"
#include "pucl/rng.hpp"

using namespace pucl;

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Dataset points2(std::initializer_list<std::pair<double, double>> pts, Provenance prov) {
    Dataset ds(2, prov);
    for (const auto& [x, y] : pts) ds.push_back(vec2(x, y));
    return ds;
}

Dataset random_cloud(std::uint64_t seed, int n, int dim) {
    Rng rng(seed);
    Dataset ds(dim, Provenance::Policy);
    for (int i = 0; i < n; ++i) {
        Vec p(dim);
        for (int d = 0; d < dim; ++d) p(d) = rng.normal();
        ds.push_back(p);
    }
    return ds;
}

// Independent reference: sort the full distance list per query.
double brute_knn(const Vec& q, const Dataset& refs, int k, Metric metric) {
    std::vector<double> dist;
    for (std::size_t j = 0; j < refs.size(); ++j)
        dist.push_back(point_distance(q.data(), refs.row(j), refs.dim(), metric));
    std::sort(dist.begin(), dist.end());
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += dist[i];
    return s / k;
}

Trajectory traj_of(std::initializer_list<std::pair<double, double>> states, int start_index,
                   double ret) {
    Trajectory t;
    t.start_index = start_index;
    t.cached_return = ret;
    for (const auto& [x, y] : states) t.steps.push_back({vec2(x, y), vec2(0, 0)});
    return t;
}

}  // namespace

TEST_CASE("point distance matches the three metric definitions") {
    const Vec a = vec2(1.0, 2.0);
    const Vec b = vec2(4.0, -2.0);
    CHECK(point_distance(a.data(), b.data(), 2, Metric::Euclidean) == doctest::Approx(5.0));
    CHECK(point_distance(a.data(), b.data(), 2, Metric::Manhattan) == doctest::Approx(7.0));
    CHECK(point_distance(a.data(), b.data(), 2, Metric::Chebyshev) == doctest::Approx(4.0));
}

TEST_CASE("knn score equals the frozen two-neighbor example") {
    // Nearest two distances from the origin: 0.5 and sqrt(0.45); their mean
    // is 0.5854101966249684.
    const Dataset refs = points2({{0.5, 0.0}, {0.3, 0.6}, {2.0, 2.0}}, Provenance::Demonstration);
    CHECK(knn_score(vec2(0, 0), refs, 2, Metric::Euclidean) ==
          doctest::Approx(0.5854101966249684).epsilon(1e-15));
}

TEST_CASE("knn score agrees with a full-sort reference on random data") {
    const Dataset refs = random_cloud(101, 300, 3);
    const Dataset queries = random_cloud(102, 50, 3);
    for (Metric m : {Metric::Euclidean, Metric::Manhattan, Metric::Chebyshev}) {
        for (int k : {1, 3, 7}) {
            for (std::size_t i = 0; i < queries.size(); ++i) {
                const Vec q = queries.point(i);
                CHECK(knn_score(q, refs, k, m) == doctest::Approx(brute_knn(q, refs, k, m)));
            }
        }
    }
}

TEST_CASE("knn guards its preconditions") {
    const Dataset refs = points2({{0, 0}, {1, 1}}, Provenance::Demonstration);
    CHECK_THROWS(knn_score(vec2(0, 0), refs, 3, Metric::Euclidean));
    CHECK_THROWS(knn_score(vec2(0, 0), refs, 0, Metric::Euclidean));
    CHECK_THROWS(knn_score(Vec::Zero(3), refs, 1, Metric::Euclidean));
}

TEST_CASE("absolute threshold keeps exactly the far points") {
    const Dataset demos = points2({{0, 0}, {1, 0}}, Provenance::Demonstration);
    const Dataset unlabeled =
        points2({{0.1, 0.0}, {0.5, 0.4}, {3.0, 0.0}, {0.9, 0.1}}, Provenance::Policy);
    ScoreSpec spec;
    spec.k = 1;
    spec.distance_threshold = 0.5;
    const ReliableSelection sel = identify_reliable(unlabeled, demos, spec);
    CHECK(sel.indices == std::vector<std::size_t>{1, 2});
    CHECK(sel.effective_cutoff == doctest::Approx(0.5));
    REQUIRE(sel.scores.size() == 4);
    CHECK(sel.scores[0] == doctest::Approx(0.1));
    CHECK(sel.scores[2] == doctest::Approx(2.0));
}

TEST_CASE("percentile mode keeps the top share including cutoff ties") {
    const Dataset demos = points2({{0, 0}}, Provenance::Demonstration);
    // Scores are the distances from the origin: 1, 2, 2, 2, 5.
    const Dataset unlabeled =
        points2({{1, 0}, {2, 0}, {0, 2}, {-2, 0}, {5, 0}}, Provenance::Policy);
    ScoreSpec spec;
    spec.k = 1;
    spec.mode = ThresholdMode::Percentile;
    spec.percentile = 30.0;  // top 30% of 5 points = 1 point, cutoff score 5
    ReliableSelection sel = identify_reliable(unlabeled, demos, spec);
    CHECK(sel.indices == std::vector<std::size_t>{4});
    CHECK(sel.effective_cutoff == doctest::Approx(5.0));

    spec.percentile = 60.0;  // top 60% = 3 points, but the cutoff lands on
                             // the tied score 2, so every tie stays
    sel = identify_reliable(unlabeled, demos, spec);
    CHECK(sel.indices == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(sel.effective_cutoff == doctest::Approx(2.0));

    spec.percentile = 101.0;
    CHECK_THROWS(identify_reliable(unlabeled, demos, spec));
}

TEST_CASE("standardization flags constant dimensions and centers the rest") {
    Dataset demos(2, Provenance::Demonstration);
    demos.push_back(vec2(1.0, 7.0));
    demos.push_back(vec2(3.0, 7.0));
    Dataset unlabeled(2, Provenance::Policy);
    unlabeled.push_back(vec2(5.0, 7.0));
    unlabeled.push_back(vec2(7.0, 7.0));

    Dataset d_std, p_std;
    const StandardizeRecord rec = standardize_combined(demos, unlabeled, d_std, p_std);
    CHECK(rec.mean(0) == doctest::Approx(4.0));
    CHECK(rec.constant[1]);
    CHECK_FALSE(rec.constant[0]);
    // Population std over {1,3,5,7} is sqrt(5).
    CHECK(rec.std(0) == doctest::Approx(std::sqrt(5.0)));
    CHECK(d_std.point(0)(0) == doctest::Approx(-3.0 / std::sqrt(5.0)));
    CHECK(d_std.point(0)(1) == 0.0);
    CHECK(p_std.point(1)(0) == doctest::Approx(3.0 / std::sqrt(5.0)));
    CHECK(rec.apply(vec2(4.0, 7.0)) == vec2(0.0, 0.0));
}

TEST_CASE("standardized percentile selection is invariant to per-axis affine maps") {
    Rng rng(7);
    Dataset demos(2, Provenance::Demonstration), demos_t(2, Provenance::Demonstration);
    Dataset unl(2, Provenance::Policy), unl_t(2, Provenance::Policy);
    const double sx = 40.0, ox = -3.0, sy = 0.02, oy = 11.0;
    for (int i = 0; i < 60; ++i) {
        const Vec p = vec2(rng.normal(), rng.normal());
        (i % 2 ? demos : unl).push_back(p);
        (i % 2 ? demos_t : unl_t).push_back(vec2(sx * p(0) + ox, sy * p(1) + oy));
    }
    ScoreSpec spec;
    spec.k = 2;
    spec.mode = ThresholdMode::Percentile;
    spec.percentile = 70.0;
    spec.standardize = true;
    const ReliableSelection a = identify_reliable(unl, demos, spec);
    const ReliableSelection b = identify_reliable(unl_t, demos_t, spec);
    CHECK(a.indices == b.indices);
    REQUIRE(a.scores.size() == b.scores.size());
    for (std::size_t i = 0; i < a.scores.size(); ++i)
        CHECK(a.scores[i] == doctest::Approx(b.scores[i]).epsilon(1e-9));
}

TEST_CASE("identified set shrinks monotonically as the threshold grows") {
    const Dataset demos = random_cloud(201, 40, 2);
    const Dataset unl = random_cloud(202, 120, 2);
    ScoreSpec spec;
    spec.k = 1;
    std::size_t prev = unl.size() + 1;
    std::vector<std::size_t> prev_idx;
    bool first = true;
    for (double dr : {0.0, 0.2, 0.5, 1.0, 2.0}) {
        spec.distance_threshold = dr;
        const ReliableSelection sel = identify_reliable(unl, demos, spec);
        CHECK(sel.indices.size() <= prev);
        if (!first) {
            // Larger thresholds select a subset of smaller-threshold picks.
            CHECK(std::includes(prev_idx.begin(), prev_idx.end(), sel.indices.begin(),
                                sel.indices.end()));
        }
        prev = sel.indices.size();
        prev_idx = sel.indices;
        first = false;
    }
    spec.distance_threshold = 0.0;
    CHECK(identify_reliable(unl, demos, spec).indices.size() == unl.size());
}

TEST_CASE("expansion adds the nearest step of trajectories not yet represented") {
    FeatureSpec fs;
    const Trajectory t0 = traj_of({{0, 0}, {5, 0}, {9, 0}}, 0, 0.0);
    const Trajectory t1 = traj_of({{0, 3}, {6, 3}}, 1, 0.0);
    const Dataset unl = flatten_trajectories({t0, t1}, fs, Provenance::Policy);

    // Row 2 = (9,0) is reliable. t0's closest step to the reliable set is
    // row 2 itself, so t0 contributes nothing new; t1's closest is (6,3).
    ScoreSpec spec;
    const std::vector<std::size_t> expanded = expand_reliable({2}, unl, spec, nullptr);
    CHECK(expanded == std::vector<std::size_t>{2, 4});

    CHECK(expand_reliable({}, unl, spec, nullptr).empty());
}

TEST_CASE("expansion never duplicates an already reliable step") {
    FeatureSpec fs;
    const Trajectory t0 = traj_of({{0, 0}, {1, 0}}, 0, 0.0);
    const Dataset unl = flatten_trajectories({t0}, fs, Provenance::Policy);
    const std::vector<std::size_t> expanded = expand_reliable({0, 1}, unl, ScoreSpec{}, nullptr);
    CHECK(expanded == std::vector<std::size_t>{0, 1});
}

TEST_CASE("policy filter keeps rollouts at least as rewarding as their demo") {
    // Path-length rewards are negative: a demo return of -1.0 with delta 0.1.
    const Trajectory demo = traj_of({{0, 0}}, 0, -1.0);
    Trajectory better = traj_of({{0, 0}}, 0, -0.8);
    Trajectory equal = traj_of({{0, 0}}, 0, -1.0);
    Trajectory worse = traj_of({{0, 0}}, 0, -1.3);

    // HighRewardLiteral: keep iff (1-delta)*r(tau) >= r(demo).
    auto kept = policy_filter({better, equal, worse}, {demo}, 0.1, FilterForm::HighRewardLiteral);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].cached_return == doctest::Approx(-0.8));
    // worse: 0.9*(-1.3) = -1.17 < -1.0 -> dropped; equal: -0.9 >= -1.0 -> kept.

    // SuboptimalityBound: keep iff (1-delta)*r(demo) <= r(tau): -0.9 <= r.
    kept = policy_filter({better, equal, worse}, {demo}, 0.1, FilterForm::SuboptimalityBound);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].cached_return == doctest::Approx(-0.8));

    const Trajectory unmatched = traj_of({{0, 0}}, 9, -0.5);
    CHECK_THROWS(policy_filter({unmatched}, {demo}, 0.0));
}

TEST_CASE("memory buffer deduplicates bit-identical points and keeps tags") {
    MemoryBuffer buf;
    buf.merge_point(vec2(1, 2), 0);
    buf.merge_point(vec2(1, 2), 3);
    buf.merge_point(vec2(1, 2 + 1e-16), 3);  // different bits, kept
    buf.merge_point(vec2(4, 4), 5);
    CHECK(buf.size() == 3);
    CHECK(buf.iteration_tags() == std::vector<int>{0, 3, 5});

    const Dataset ds = buf.as_dataset(2);
    REQUIRE(ds.size() == 3);
    CHECK(ds.point(0) == vec2(1, 2));
    CHECK(ds.point(2) == vec2(4, 4));
    CHECK(ds.provenance() == Provenance::Buffer);
}
