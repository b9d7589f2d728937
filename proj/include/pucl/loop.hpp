#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pucl/config.hpp"
#include "pucl/eval_grid.hpp"
#include "pucl/expert.hpp"
#include "pucl/metrics.hpp"
#include "pucl/net.hpp"

namespace pucl {

struct IterationRecord {
    int iteration = 0;
    long env_steps = 0;      // cumulative training rollout steps
    std::size_t p_size = 0;  // policy points surviving the filter
    std::size_t r_size = 0;  // reliable infeasible selected this iteration
    std::size_t r_identified = 0;  // pre-expansion count (threshold rule only)
    std::size_t m_size = 0;  // memory buffer size after merging
    double loss = 0.0;
    std::optional<double> iou;
    double unsafe = 0.0;  // fraction of executed steps violating the true constraint
    double wall_ms = 0.0;  // timings file only, never part of the trace
};

struct RunResult {
    ConstraintNet net;
    std::vector<IterationRecord> trace;
    DemoSet demos;
    std::vector<Vec> buffer_points;
    std::vector<int> buffer_tags;
    std::optional<double> final_iou;
    std::optional<double> final_recall;
    std::optional<double> final_precision;
    double final_unsafe = 0.0;
    long env_steps = 0;
    bool early_stopped = false;
    // Scoring-space state at the last iteration, for rebuilding the
    // modulation field around the frozen net (transfer evaluation).
    double scoring_cutoff = 0.0;
    std::optional<StandardizeRecord> scoring_record;
};

/// Full constraint-learning loop: paired-start rollouts, reward filter,
/// reliable-infeasible identification + per-trajectory expansion, memory
/// merge, classifier refit, grid/safety metrics, IoU-plateau early stop.
RunResult run_pucl(const ExperimentConfig& cfg);
RunResult run_pucl(const ExperimentConfig& cfg, const DemoSet& demos);

/// Ablation treating every filtered policy point as infeasible. Implemented
/// as the same loop with a zero absolute distance threshold, so it is
/// bit-identical to that sweep cell by construction.
RunResult run_bc_baseline(const ExperimentConfig& cfg);
RunResult run_bc_baseline(const ExperimentConfig& cfg, const DemoSet& demos);

/// iteration,env_steps,p_size,r_size,m_size,loss,iou,unsafe -- no wall time,
/// so repeated runs are byte-identical. Missing IoU prints as empty.
void write_trace_csv(const std::string& path, const std::vector<IterationRecord>& trace);
void write_timings_csv(const std::string& path, const std::vector<IterationRecord>& trace);

}  // namespace pucl
