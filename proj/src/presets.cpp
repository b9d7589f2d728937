#include "pucl/presets.hpp"

#include <cmath>
#include <stdexcept>

namespace pucl {

Ellipse make_ellipse2d(double cx, double cy, double a, double b, double angle) {
    Ellipse e;
    e.center = Vec(2);
    e.center << cx, cy;
    e.semi_axes = Vec(2);
    e.semi_axes << a, b;
    // Body-from-world: undoes the world-frame rotation by `angle`.
    e.rotation = Mat(2, 2);
    e.rotation << std::cos(angle), std::sin(angle), -std::sin(angle), std::cos(angle);
    return e;
}

namespace {

Vec fill(int dim, double v) { return Vec::Constant(dim, v); }

ExperimentConfig preset_2d() {
    ExperimentConfig c;
    c.task = "2d";
    c.env.dim = 2;
    c.env.lower = fill(2, 0.0);
    c.env.upper = fill(2, 1.0);
    c.env.cap = 0.58;
    c.env.cap_mode = CapMode::Norm;
    c.env.h = 0.05;
    c.env.horizon = 200;
    c.env.goal = Vec(2);
    c.env.goal << 0.9, 0.5;
    c.env.goal_radius = 0.05;

    EllipseUnion eu;
    eu.components.push_back(make_ellipse2d(0.45, 0.55, 0.20, 0.10, 0.55));
    eu.components.push_back(make_ellipse2d(0.60, 0.42, 0.15, 0.10, -0.35));
    c.target = eu;

    c.starts.lower = Vec(2);
    c.starts.lower << 0.05, 0.2;
    c.starts.upper = Vec(2);
    c.starts.upper << 0.12, 0.8;

    c.features.mode = FeatureMode::StateOnly;
    c.score.k = 1;
    c.score.metric = Metric::Euclidean;
    c.score.mode = ThresholdMode::Absolute;
    c.score.distance_threshold = 0.05;
    c.delta = 0.0;

    c.hidden = {32, 32};
    c.train.epochs = 2000;
    c.train.learning_rate = 0.05;
    c.backend = PolicyBackend::Dsm;
    c.exploration_noise = 0.12;
    c.iterations = 30;
    c.demo_count = 20;
    c.expert.margin = 0.06;
    c.expert.noise_std = 0.02;
    c.expert.delta_budget = 0.3;

    c.grid.mode = EvalGridSpec::Mode::Lattice;
    c.grid.resolution = {200, 200};
    return c;
}

ExperimentConfig preset_3d() {
    ExperimentConfig c;
    c.task = "3d";
    c.env.dim = 3;
    c.env.lower = Vec(3);
    c.env.lower << 0.0, 0.0, 0.1;
    c.env.upper = Vec(3);
    c.env.upper << 1.0, 1.0, 0.9;
    c.env.cap = 0.58;
    c.env.cap_mode = CapMode::Norm;
    c.env.h = 0.05;
    c.env.horizon = 300;
    c.env.goal = Vec(3);
    c.env.goal << 0.9, 0.5, 0.5;
    c.env.goal_radius = 0.06;

    CylinderSet cs;
    cs.components.push_back({0.40, 0.30, 0.10, 0.30, 0.70});
    cs.components.push_back({0.60, 0.70, 0.10, 0.30, 0.70});
    c.target = cs;

    c.starts.lower = Vec(3);
    c.starts.lower << 0.05, 0.15, 0.25;
    c.starts.upper = Vec(3);
    c.starts.upper << 0.12, 0.85, 0.75;

    c.features.mode = FeatureMode::StateOnly;
    c.score.k = 1;
    c.score.metric = Metric::Euclidean;
    c.score.mode = ThresholdMode::Absolute;
    c.score.distance_threshold = 0.03;
    c.delta = 0.03;

    c.hidden = {32, 32};
    c.train.epochs = 2000;
    c.train.learning_rate = 0.05;
    c.backend = PolicyBackend::Dsm;
    c.exploration_noise = 0.03;
    c.iterations = 30;
    c.demo_count = 20;
    c.expert.margin = 0.08;
    c.expert.noise_std = 0.015;
    c.expert.delta_budget = 0.15;

    c.grid.mode = EvalGridSpec::Mode::Lattice;
    c.grid.resolution = {60, 60, 60};
    return c;
}

ExperimentConfig preset_velocity() {
    ExperimentConfig c;
    c.task = "velocity";
    c.env.dim = 3;
    c.env.lower = fill(3, 0.0);
    c.env.upper = fill(3, 1.0);
    c.env.cap = 0.58;
    c.env.cap_mode = CapMode::Norm;
    c.env.h = 0.05;
    c.env.horizon = 200;
    c.env.goal = fill(3, 0.5);
    c.env.goal_radius = 0.05;

    VelocityBox vb;
    vb.limits = Vec(3);
    vb.limits << 0.48, 0.58, 0.19;
    c.target = vb;

    CylinderSet known;
    known.components.push_back({0.35, 0.35, 0.10});
    known.components.push_back({0.65, 0.65, 0.10});
    c.known = known;
    c.known_margin = 0.02;

    c.starts.lower = Vec(3);
    c.starts.lower << 0.1, 0.1, 0.35;
    c.starts.upper = Vec(3);
    c.starts.upper << 0.9, 0.9, 0.65;
    c.starts.min_goal_distance = 0.25;

    c.features.mode = FeatureMode::ActionOnly;
    c.score.k = 1;
    c.score.metric = Metric::Euclidean;
    c.score.mode = ThresholdMode::Absolute;
    c.score.distance_threshold = 0.01;
    c.delta = 0.05;

    c.hidden = {32, 32};
    c.train.epochs = 800;
    c.train.learning_rate = 0.05;
    c.backend = PolicyBackend::Dsm;
    c.planner.horizon = 80;
    c.exploration_noise = 0.15;
    c.iterations = 20;
    c.demo_count = 30;
    c.expert.margin = 0.04;
    c.expert.velocity_margin = 0.03;
    c.expert.noise_std = 0.02;
    c.expert.delta_budget = 0.05;

    c.grid.mode = EvalGridSpec::Mode::Lattice;
    c.grid.resolution = {41, 41, 41};
    c.grid.lower = fill(3, -0.58);
    c.grid.upper = fill(3, 0.58);
    return c;
}

ExperimentConfig preset_hetero() {
    ExperimentConfig c;
    c.task = "hetero";
    const int dim = 18;
    c.env.dim = dim;
    c.env.lower = Vec(dim);
    c.env.upper = Vec(dim);
    c.env.box_caps = Vec(dim);
    for (int d = 0; d < dim; ++d) {
        const bool coarse = d < 9;
        c.env.lower[d] = coarse ? -6.0 : -1.5;
        c.env.upper[d] = coarse ? 6.0 : 1.5;
        c.env.box_caps[d] = coarse ? 2.0 : 0.2;
    }
    c.env.cap = 2.0;
    c.env.cap_mode = CapMode::Box;
    c.env.h = 0.1;
    c.env.horizon = 100;
    c.env.goal = fill(dim, 0.0);
    c.env.goal[0] = -5.0;
    c.env.goal_radius = 2.0;

    SyntheticHalfspace hs;
    hs.coeff = fill(dim, 0.0);
    hs.coeff[0] = 1.0;
    hs.offset = -3.0;
    c.target = hs;

    c.starts.lower = Vec(dim);
    c.starts.upper = Vec(dim);
    for (int d = 0; d < dim; ++d) {
        const double w = d == 0 ? 0.5 : (d < 9 ? 0.3 : 0.05);
        c.starts.lower[d] = -w;
        c.starts.upper[d] = w;
    }

    c.features.mode = FeatureMode::StateOnly;
    c.score.k = 5;
    c.score.metric = Metric::Euclidean;
    c.score.mode = ThresholdMode::Percentile;
    c.score.percentile = 80.0;
    c.score.standardize = true;
    c.delta = 0.7;

    c.hidden = {64, 64};
    c.train.epochs = 800;
    c.train.learning_rate = 0.05;
    c.backend = PolicyBackend::Dsm;
    c.exploration_noise = 0.4;
    c.iterations = 10;
    c.demo_count = 30;
    c.expert.margin = 0.2;
    c.expert.noise_std = 0.02;
    c.expert.delta_budget = 0.5;

    c.grid.mode = EvalGridSpec::Mode::Sampled;
    c.grid.sample_count = 4000;
    return c;
}

}  // namespace

ExperimentConfig preset(const std::string& task) {
    if (task == "2d") return preset_2d();
    if (task == "3d") return preset_3d();
    if (task == "velocity") return preset_velocity();
    if (task == "hetero") return preset_hetero();
    throw std::invalid_argument("unknown task preset: " + task);
}

}  // namespace pucl
