#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pucl/cem.hpp"
#include "pucl/env.hpp"
#include "pucl/feature_map.hpp"
#include "pucl/knn.hpp"
#include "pucl/net.hpp"
#include "pucl/pu_steps.hpp"
#include "pucl/true_constraint.hpp"

namespace pucl {

enum class PolicyBackend { Dsm, Planner };

/// Scripted demonstrator settings. Demonstrations are accepted only when
/// truly feasible at every step and within the sub-optimality budget of a
/// planner-computed reference return for the same start.
struct ExpertSpec {
    double margin = 0.05;          // obstacle inflation the expert keeps clear of
    double velocity_margin = 0.0;  // per-axis shrink of a velocity-box constraint
    double noise_std = 0.02;       // action noise scale, × cap
    double delta_budget = 0.05;    // acceptance: r ≥ r_ref − budget·|r_ref|
    int max_attempts = 40;
};

/// Uniform start-state box; samples too close to the goal or inside known
/// geometry are rejected and redrawn.
struct StartBand {
    Vec lower;
    Vec upper;
    double min_goal_distance = 0.0;
};

struct EvalGridSpec {
    enum class Mode { Lattice, Sampled };
    Mode mode = Mode::Lattice;
    std::vector<int> resolution;  // per dimension, lattice mode
    Vec lower;                    // empty: derived from demonstration ranges
    Vec upper;
    int sample_count = 4000;  // sampled mode
    std::uint64_t sample_seed = 9001;
    long budget = 400000;  // hard cap on total grid points
};

/// Full declarative description of one experiment.
struct ExperimentConfig {
    std::string task = "2d";
    std::uint64_t seed = 1;
    std::uint64_t demo_seed = 100;  // demos shared across seed ensembles

    EnvSpec env;
    TrueConstraint target;                // the constraint to learn; metric ground truth
    std::optional<TrueConstraint> known;  // geometry every policy masks against
    double known_margin = 0.0;
    StartBand starts;

    FeatureSpec features;
    ScoreSpec score;
    double delta = 0.0;  // policy-filter budget
    FilterForm filter_form = FilterForm::HighRewardLiteral;
    double discount = 1.0;

    std::vector<int> hidden = {32, 32};
    double leaky_slope = 0.01;
    TrainSpec train;

    PolicyBackend backend = PolicyBackend::Dsm;
    PlannerSpec planner;
    double exploration_noise = 0.3;  // training rollout noise, × cap

    int iterations = 30;
    int demo_count = 4;
    ExpertSpec expert;

    EvalGridSpec grid;
    int unsafe_episodes = 50;
    double early_stop_delta = 0.005;
    int early_stop_window = 5;

    double gamma_floor = 1e-3;
    double gamma_ceiling = 1e6;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);
void save_config(const ExperimentConfig& cfg, const std::string& path);
ExperimentConfig load_config(const std::string& path);

/// Range checks for every invariant the config declares; throws
/// std::invalid_argument naming the offending field.
void validate(const ExperimentConfig& cfg);

/// Hash over the environment, constraints, expert and demo settings;
/// stamped into demonstration manifests so a demo set can be matched to the
/// exact setup that produced it.
std::uint64_t env_hash(const ExperimentConfig& cfg);

}  // namespace pucl
