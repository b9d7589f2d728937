#include "pucl/loop.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "pucl/cem.hpp"
#include "pucl/modulation.hpp"
#include "pucl/policies.hpp"
#include "pucl/pu_steps.hpp"
#include "pucl/text_io.hpp"

namespace pucl {

namespace {

double learned_violation_rate(const ConstraintNet& net, const FeatureSpec& features,
                              const std::vector<Trajectory>& rollouts) {
    long bad = 0;
    long total = 0;
    for (const auto& traj : rollouts) {
        for (const auto& sa : traj.steps) {
            ++total;
            if (net.predict(feature_map(sa, features)) <= 0.5) ++bad;
        }
    }
    return total ? static_cast<double>(bad) / total : 0.0;
}

RunResult run_loop(const ExperimentConfig& cfg, const DemoSet& demos) {
    validate(cfg);
    if (static_cast<int>(demos.trajectories.size()) != cfg.demo_count)
        throw std::invalid_argument("run: demo count does not match the config");

    RunResult out;
    out.demos = demos;

    const int dim = cfg.features.output_dim(cfg.env.dim, cfg.env.dim);
    const Dataset d_set =
        flatten_trajectories(demos.trajectories, cfg.features, Provenance::Demonstration);

    Rng init_rng = Rng::substream(cfg.seed, "net-init");
    ConstraintNet net(dim, cfg.hidden, cfg.leaky_slope, init_rng);
    // Start from "everything feasible": a zero-bias net predicts ~0.5, which
    // the modulation reads as boundary everywhere, so first-iteration rollouts
    // orbit instead of progressing and flood the buffer with spurious points.
    net.bias(static_cast<int>(net.biases().size()) - 1)(0) = 4.0;

    MemoryBuffer buffer;
    const EvalGrid grid = build_eval_grid(cfg, d_set);

    const bool needs_field =
        cfg.backend == PolicyBackend::Dsm && cfg.features.mode == FeatureMode::StateOnly;
    double w_p = cfg.planner.penalty_weight;
    std::vector<double> violation_history;
    std::optional<StandardizeRecord> scoring_record;
    double scoring_cutoff =
        cfg.score.mode == ThresholdMode::Absolute ? cfg.score.distance_threshold : 0.0;
    long env_steps = 0;
    std::size_t last_trained_size = std::numeric_limits<std::size_t>::max();
    double last_loss = 0.0;

    for (int it = 0; it < cfg.iterations; ++it) {
        const auto t0 = std::chrono::steady_clock::now();
        IterationRecord rec;
        rec.iteration = it;

        if (cfg.backend == PolicyBackend::Planner && !violation_history.empty())
            w_p = pid_update(w_p, violation_history, cfg.planner.gains,
                             cfg.planner.violation_target);

        ModulationField field(net, cfg.gamma_floor, cfg.gamma_ceiling);
        if (needs_field)
            field.build_references(buffer.points(), 2.0 * scoring_cutoff,
                                   scoring_record ? &*scoring_record : nullptr);

        std::vector<Trajectory> rollouts;
        rollouts.reserve(demos.trajectories.size());
        PlannerSpec pspec = cfg.planner;
        pspec.penalty_weight = w_p;
        for (int j = 0; j < cfg.demo_count; ++j) {
            const Vec start = demos.trajectories[j].steps.front().state;
            Rng noise = Rng::substream(cfg.seed, "rollout",
                                       static_cast<std::uint64_t>(it) * cfg.demo_count + j);
            Trajectory traj;
            if (cfg.backend == PolicyBackend::Dsm) {
                const PolicyFn pol = make_learned_policy(cfg, field, net, &noise);
                traj = rollout(cfg.env, pol, start, cfg.env.horizon, j, cfg.discount);
            } else {
                PlanResult plan = plan_trajectory(cfg.env, start, net, cfg.features, pspec, noise,
                                                  cfg.discount);
                traj = std::move(plan.trajectory);
                traj.start_index = j;
            }
            env_steps += static_cast<long>(traj.length());
            rollouts.push_back(std::move(traj));
        }
        violation_history.push_back(learned_violation_rate(net, cfg.features, rollouts));

        // Under the path-length reward an episode that stalls short of the
        // goal outscores any demonstration, so returns are only comparable
        // between completed reaches.
        std::vector<Trajectory> finished;
        finished.reserve(rollouts.size());
        for (auto& traj : rollouts) {
            if (traj.empty()) continue;
            const Vec terminal =
                step(cfg.env, traj.steps.back().state, traj.steps.back().action).next;
            if (in_goal(cfg.env, terminal)) finished.push_back(std::move(traj));
        }
        const std::vector<Trajectory> kept =
            policy_filter(finished, demos.trajectories, cfg.delta, cfg.filter_form);
        const Dataset p_set = kept.empty()
                                  ? Dataset(dim, Provenance::Policy)
                                  : flatten_trajectories(kept, cfg.features, Provenance::Policy);
        rec.p_size = p_set.size();

        if (!p_set.empty()) {
            const ReliableSelection sel = identify_reliable(p_set, d_set, cfg.score);
            rec.r_identified = sel.indices.size();
            scoring_cutoff = sel.effective_cutoff;
            if (cfg.score.standardize) {
                Dataset d_std, p_std;
                scoring_record = standardize_combined(d_set, p_set, d_std, p_std);
            }
            const std::vector<std::size_t> expanded =
                expand_reliable(sel.indices, p_set, cfg.score,
                                scoring_record ? &*scoring_record : nullptr);
            rec.r_size = expanded.size();
            buffer.merge(p_set, expanded, it);
        }
        rec.m_size = buffer.size();

        // Retrain only when the buffer gained points. The per-iteration epoch
        // budget stands in for training to convergence, so rerunning it on
        // unchanged data would keep shifting the boundary and re-trigger
        // exploration instead of letting the loop settle.
        if (buffer.size() != last_trained_size) {
            const Dataset infeasible = buffer.as_dataset(dim);
            const TrainTrace tt = train_round(net, d_set, infeasible, cfg.train);
            last_loss = tt.final_loss;
            last_trained_size = buffer.size();
        }
        rec.loss = last_loss;

        rec.iou = iou(classify_grid(net, grid));

        ModulationField eval_field(net, cfg.gamma_floor, cfg.gamma_ceiling);
        if (needs_field)
            eval_field.build_references(buffer.points(), 2.0 * scoring_cutoff,
                                        scoring_record ? &*scoring_record : nullptr);
        const PolicyFn eval_policy = make_learned_policy(cfg, eval_field, net, nullptr);
        Rng unsafe_rng = Rng::substream(cfg.seed, "unsafe-starts", static_cast<std::uint64_t>(it));
        rec.unsafe = safety_stats(cfg, eval_policy, unsafe_rng).violation_step_fraction;

        rec.env_steps = env_steps;
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                t0)
                          .count();
        out.trace.push_back(rec);

        if (static_cast<int>(out.trace.size()) > cfg.early_stop_window) {
            double lo = rec.iou.value_or(0.0);
            double hi = lo;
            bool usable = rec.iou.has_value();
            bool stream_idle = true;
            for (int back = 1; back <= cfg.early_stop_window; ++back) {
                const auto& prev = out.trace[out.trace.size() - 1 - back];
                if (!prev.iou) {
                    usable = false;
                    break;
                }
                lo = std::min(lo, *prev.iou);
                hi = std::max(hi, *prev.iou);
                stream_idle = stream_idle && prev.m_size == rec.m_size;
            }
            // A flat zero is an unconverged classifier, not a plateau, and a
            // plateau in overlap alone is not convergence while rollouts are
            // still turning up new infeasible points.
            if (usable && stream_idle && lo > 0.0 && hi - lo < cfg.early_stop_delta) {
                out.early_stopped = true;
                break;
            }
        }
    }

    const Confusion final_conf = classify_grid(net, grid);
    out.final_iou = iou(final_conf);
    out.final_recall = recall(final_conf);
    out.final_precision = precision(final_conf);
    out.final_unsafe = out.trace.empty() ? 0.0 : out.trace.back().unsafe;
    out.env_steps = env_steps;
    out.buffer_points = buffer.points();
    out.buffer_tags = buffer.iteration_tags();
    out.scoring_cutoff = scoring_cutoff;
    out.scoring_record = scoring_record;
    out.net = std::move(net);
    return out;
}

}  // namespace

RunResult run_pucl(const ExperimentConfig& cfg, const DemoSet& demos) {
    return run_loop(cfg, demos);
}

RunResult run_pucl(const ExperimentConfig& cfg) {
    return run_loop(cfg, generate_demonstrations(cfg));
}

RunResult run_bc_baseline(const ExperimentConfig& cfg, const DemoSet& demos) {
    ExperimentConfig bc = cfg;
    bc.score.mode = ThresholdMode::Absolute;
    bc.score.distance_threshold = 0.0;
    return run_loop(bc, demos);
}

RunResult run_bc_baseline(const ExperimentConfig& cfg) {
    return run_bc_baseline(cfg, generate_demonstrations(cfg));
}

void write_trace_csv(const std::string& path, const std::vector<IterationRecord>& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace: " + path);
    out << "iteration,env_steps,p_size,r_size,m_size,loss,iou,unsafe\n";
    for (const auto& r : trace) {
        out << r.iteration << ',' << r.env_steps << ',' << r.p_size << ',' << r.r_size << ','
            << r.m_size << ',' << format_double(r.loss) << ','
            << (r.iou ? format_double(*r.iou) : std::string()) << ',' << format_double(r.unsafe)
            << '\n';
    }
}

void write_timings_csv(const std::string& path, const std::vector<IterationRecord>& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write timings: " + path);
    out << "iteration,wall_ms\n";
    for (const auto& r : trace) out << r.iteration << ',' << format_double(r.wall_ms) << '\n';
}

}  // namespace pucl
