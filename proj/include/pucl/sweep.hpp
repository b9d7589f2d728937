#pragma once

#include <string>
#include <vector>

#include "pucl/loop.hpp"

namespace pucl {

struct SweepCell {
    double distance_threshold = 0.0;
    std::uint64_t seed = 0;
    std::size_t first_identified = 0;  // pre-expansion |R| at iteration 0
    std::optional<double> final_iou;
    double final_unsafe = 0.0;
};

struct SweepSummary {
    double distance_threshold = 0.0;
    double mean_first_identified = 0.0;
    double std_first_identified = 0.0;
    double mean_iou = 0.0;
    double std_iou = 0.0;
    double mean_unsafe = 0.0;
    double std_unsafe = 0.0;
};

struct SweepResult {
    std::vector<SweepCell> cells;          // threshold-major, seed-minor order
    std::vector<SweepSummary> summaries;   // one per threshold (mean +/- std)
};

/// Grid of absolute-threshold runs. Demonstrations are generated once per
/// seed and shared across thresholds, so first-iteration rollouts coincide
/// cell-to-cell and the identified-set size is exactly comparable.
SweepResult sweep_dr(const ExperimentConfig& base, const std::vector<double>& thresholds,
                     const std::vector<std::uint64_t>& seeds);

void write_sweep_csv(const std::string& path, const SweepResult& result);

/// Frozen-net evaluation under a shifted goal and start band: rebuilds the
/// modulation field from the run's buffer and measures ground-truth safety.
/// Dimension mismatches are an error.
SafetyStats transfer_eval(const ExperimentConfig& cfg, const RunResult& run, const Vec& goal,
                          const StartBand& starts, Rng& start_rng);

}  // namespace pucl
