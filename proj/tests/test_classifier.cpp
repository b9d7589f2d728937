#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "pucl/net.hpp"
#include "pucl/rng.hpp"

using namespace pucl;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

ConstraintNet small_net(std::uint64_t seed, int dim = 2, std::vector<int> hidden = {4}) {
    Rng rng(seed);
    return ConstraintNet(dim, hidden, 0.01, rng);
}

Dataset cloud(std::uint64_t seed, int n, double cx, double cy) {
    Rng rng(seed);
    Dataset ds(2, Provenance::Demonstration);
    for (int i = 0; i < n; ++i) {
        Vec p(2);
        p << cx + 0.3 * rng.normal(), cy + 0.3 * rng.normal();
        ds.push_back(p);
    }
    return ds;
}

}  // namespace

TEST_CASE("forward pass matches hand-computed sigmoid of a linear layer") {
    Rng rng(1);
    ConstraintNet net(2, {}, 0.01, rng);  // single linear layer, sigmoid output
    net.weight(0)(0, 0) = 0.5;
    net.weight(0)(0, 1) = -1.0;
    net.bias(0)(0) = 0.25;
    Vec x(2);
    x << 2.0, 1.0;
    const double z = 0.5 * 2.0 - 1.0 * 1.0 + 0.25;
    CHECK(net.predict(x) == doctest::Approx(sigmoid(z)).epsilon(1e-15));
}

TEST_CASE("hidden layer applies the leaky slope on the negative side") {
    Rng rng(1);
    ConstraintNet net(1, {1}, 0.25, rng);
    net.weight(0)(0, 0) = 1.0;
    net.bias(0)(0) = 0.0;
    net.weight(1)(0, 0) = 1.0;
    net.bias(1)(0) = 0.0;
    Vec x(1);
    x << -2.0;  // pre-activation -2 -> leaky output -0.5
    CHECK(net.predict(x) == doctest::Approx(sigmoid(-0.5)).epsilon(1e-15));
    x << 3.0;
    CHECK(net.predict(x) == doctest::Approx(sigmoid(3.0)).epsilon(1e-15));
}

TEST_CASE("bce loss oracle values") {
    Rng rng(1);
    ConstraintNet half(2, {}, 0.01, rng);
    half.weight(0).setZero();
    half.bias(0).setZero();  // predicts exactly 0.5 everywhere
    const Dataset d = cloud(3, 5, 0.0, 0.0);
    const Dataset r = cloud(4, 7, 1.0, 1.0);
    CHECK(bce_loss(half, d, r, 1e-7) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    // One feasible point predicted at 0.8: loss = -ln 0.8.
    ConstraintNet fixed(1, {}, 0.01, rng);
    fixed.weight(0).setZero();
    fixed.bias(0)(0) = std::log(0.8 / 0.2);
    Dataset one(1, Provenance::Demonstration);
    one.push_back(Vec::Zero(1));
    Dataset none(1, Provenance::Buffer);
    CHECK(bce_loss(fixed, one, none, 1e-7) ==
          doctest::Approx(0.22314355131420976).epsilon(1e-12));

    Dataset empty_f(1, Provenance::Demonstration);
    CHECK_THROWS(bce_loss(fixed, empty_f, none, 1e-7));
}

TEST_CASE("probability clip keeps saturated losses finite and bounded") {
    Rng rng(1);
    ConstraintNet net(1, {}, 0.01, rng);
    net.weight(0).setZero();
    net.bias(0)(0) = 80.0;  // sigmoid saturates to 1 in double precision
    Dataset feas(1, Provenance::Demonstration);
    Dataset infe(1, Provenance::Buffer);
    infe.push_back(Vec::Zero(1));  // infeasible point predicted feasible
    const double clip = 1e-7;
    const double loss = bce_loss(net, feas, infe, clip);
    CHECK(std::isfinite(loss));
    CHECK(loss == doctest::Approx(-std::log(clip)).epsilon(1e-9));
}

TEST_CASE("parameter gradients match central finite differences") {
    ConstraintNet net = small_net(11, 2, {4, 3});
    const Dataset d = cloud(5, 6, -0.5, 0.0);
    const Dataset r = cloud(6, 5, 0.7, 0.4);
    const double clip = 1e-7;
    const NetGradient g = bce_gradient(net, d, r, clip);
    const double h = 1e-5;

    for (int l = 0; l < net.layer_count(); ++l) {
        for (int i = 0; i < g.dW[l].rows(); ++i) {
            for (int j = 0; j < g.dW[l].cols(); ++j) {
                ConstraintNet plus = net, minus = net;
                plus.weight(l)(i, j) += h;
                minus.weight(l)(i, j) -= h;
                const double fd =
                    (bce_loss(plus, d, r, clip) - bce_loss(minus, d, r, clip)) / (2 * h);
                const double denom = std::max(1e-8, std::abs(fd));
                CHECK(std::abs(g.dW[l](i, j) - fd) / denom < 1e-4);
            }
        }
        for (int i = 0; i < g.db[l].size(); ++i) {
            ConstraintNet plus = net, minus = net;
            plus.bias(l)(i) += h;
            minus.bias(l)(i) -= h;
            const double fd = (bce_loss(plus, d, r, clip) - bce_loss(minus, d, r, clip)) / (2 * h);
            const double denom = std::max(1e-8, std::abs(fd));
            CHECK(std::abs(g.db[l](i) - fd) / denom < 1e-4);
        }
    }
}

TEST_CASE("input gradient matches central finite differences") {
    ConstraintNet net = small_net(13, 3, {5, 4});
    Rng rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        Vec x(3);
        x << rng.normal(), rng.normal(), rng.normal();
        const Vec g = net.input_gradient(x);
        for (int d = 0; d < 3; ++d) {
            Vec plus = x, minus = x;
            const double h = 1e-6;
            plus(d) += h;
            minus(d) -= h;
            const double fd = (net.predict(plus) - net.predict(minus)) / (2 * h);
            CHECK(std::abs(g(d) - fd) < 1e-6 + 1e-4 * std::abs(fd));
        }
    }
}

TEST_CASE("training loss trace is non-increasing and reduces the loss") {
    ConstraintNet net = small_net(17);
    const Dataset d = cloud(7, 30, -1.0, 0.0);
    const Dataset r = cloud(8, 30, 1.0, 0.0);
    TrainSpec spec;
    spec.epochs = 300;
    spec.learning_rate = 0.1;
    const double before = bce_loss(net, d, r, spec.prob_clip);
    const TrainTrace trace = train_round(net, d, r, spec);
    REQUIRE(!trace.losses.empty());
    for (std::size_t i = 1; i < trace.losses.size(); ++i)
        CHECK(trace.losses[i] <= trace.losses[i - 1] + 1e-15);
    CHECK(trace.final_loss < before);
}

TEST_CASE("zero learning rate leaves parameters untouched") {
    ConstraintNet net = small_net(19);
    const auto w_before = net.weights();
    const auto b_before = net.biases();
    const Dataset d = cloud(9, 10, 0.0, 0.0);
    const Dataset r = cloud(10, 10, 1.0, 1.0);
    TrainSpec spec;
    spec.epochs = 5;
    spec.learning_rate = 0.0;
    const double before = bce_loss(net, d, r, spec.prob_clip);
    const TrainTrace trace = train_round(net, d, r, spec);
    CHECK(trace.final_loss == before);
    for (int l = 0; l < net.layer_count(); ++l) {
        CHECK(net.weight(l) == w_before[l]);
        CHECK(net.bias(l) == b_before[l]);
    }
}

TEST_CASE("mini-batch epochs still respect the monotone full-loss trace") {
    ConstraintNet net = small_net(23);
    const Dataset d = cloud(11, 40, -1.0, 0.2);
    const Dataset r = cloud(12, 35, 1.0, -0.2);
    TrainSpec spec;
    spec.epochs = 120;
    spec.learning_rate = 0.05;
    spec.batch_size = 16;
    const TrainTrace trace = train_round(net, d, r, spec);
    for (std::size_t i = 1; i < trace.losses.size(); ++i)
        CHECK(trace.losses[i] <= trace.losses[i - 1] + 1e-15);
}

TEST_CASE("binary and text serialization round-trip bit-exactly") {
    ConstraintNet net = small_net(29, 3, {6, 4});
    const auto dir = std::filesystem::temp_directory_path();
    const std::string bin = (dir / "pucl_test_net.bin").string();
    const std::string txt = (dir / "pucl_test_net.txt").string();
    net.save_binary(bin);
    net.save_text(txt);
    const ConstraintNet from_bin = ConstraintNet::load_binary(bin);
    const ConstraintNet from_txt = ConstraintNet::load_text(txt);

    Rng rng(31);
    for (int i = 0; i < 20; ++i) {
        Vec x(3);
        x << rng.normal(), rng.normal(), rng.normal();
        const double base = net.predict(x);
        CHECK(from_bin.predict(x) == base);
        CHECK(from_txt.predict(x) == base);
    }
    std::filesystem::remove(bin);
    std::filesystem::remove(txt);
}
