#include "pucl/sweep.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "pucl/modulation.hpp"
#include "pucl/policies.hpp"
#include "pucl/text_io.hpp"

namespace pucl {

namespace {

void accumulate(std::vector<double>& vals, double& mean, double& std) {
    mean = 0.0;
    std = 0.0;
    if (vals.empty()) return;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    for (double v : vals) std += (v - mean) * (v - mean);
    std = std::sqrt(std / static_cast<double>(vals.size()));
}

}  // namespace

SweepResult sweep_dr(const ExperimentConfig& base, const std::vector<double>& thresholds,
                     const std::vector<std::uint64_t>& seeds) {
    if (thresholds.empty() || seeds.empty())
        throw std::invalid_argument("sweep_dr: need at least one threshold and one seed");

    std::vector<DemoSet> demo_sets;
    demo_sets.reserve(seeds.size());
    for (std::uint64_t s : seeds) {
        ExperimentConfig cfg = base;
        cfg.seed = s;
        demo_sets.push_back(generate_demonstrations(cfg));
    }

    SweepResult out;
    for (double dr : thresholds) {
        std::vector<double> firsts, ious, unsafes;
        for (std::size_t si = 0; si < seeds.size(); ++si) {
            ExperimentConfig cfg = base;
            cfg.seed = seeds[si];
            cfg.score.mode = ThresholdMode::Absolute;
            cfg.score.distance_threshold = dr;
            const RunResult run = run_pucl(cfg, demo_sets[si]);

            SweepCell cell;
            cell.distance_threshold = dr;
            cell.seed = seeds[si];
            cell.first_identified = run.trace.empty() ? 0 : run.trace.front().r_identified;
            cell.final_iou = run.final_iou;
            cell.final_unsafe = run.final_unsafe;
            out.cells.push_back(cell);

            firsts.push_back(static_cast<double>(cell.first_identified));
            if (cell.final_iou) ious.push_back(*cell.final_iou);
            unsafes.push_back(cell.final_unsafe);
        }
        SweepSummary s;
        s.distance_threshold = dr;
        accumulate(firsts, s.mean_first_identified, s.std_first_identified);
        accumulate(ious, s.mean_iou, s.std_iou);
        accumulate(unsafes, s.mean_unsafe, s.std_unsafe);
        out.summaries.push_back(s);
    }
    return out;
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write sweep: " + path);
    out << "distance_threshold,seed,first_identified,final_iou,final_unsafe\n";
    for (const auto& c : result.cells) {
        out << format_double(c.distance_threshold) << ',' << c.seed << ',' << c.first_identified
            << ',' << (c.final_iou ? format_double(*c.final_iou) : std::string()) << ','
            << format_double(c.final_unsafe) << '\n';
    }
}

SafetyStats transfer_eval(const ExperimentConfig& cfg, const RunResult& run, const Vec& goal,
                          const StartBand& starts, Rng& start_rng) {
    if (goal.size() != cfg.env.dim || starts.lower.size() != cfg.env.dim ||
        starts.upper.size() != cfg.env.dim)
        throw std::invalid_argument("transfer_eval: dimension mismatch with the environment");

    ExperimentConfig shifted = cfg;
    shifted.env.goal = goal;
    shifted.starts = starts;
    validate(shifted);

    ModulationField field(run.net, cfg.gamma_floor, cfg.gamma_ceiling);
    if (cfg.backend == PolicyBackend::Dsm && cfg.features.mode == FeatureMode::StateOnly)
        field.build_references(run.buffer_points, 2.0 * run.scoring_cutoff,
                               run.scoring_record ? &*run.scoring_record : nullptr);
    const PolicyFn policy = make_learned_policy(shifted, field, run.net, nullptr);
    return safety_stats(shifted, policy, start_rng);
}

}  // namespace pucl
