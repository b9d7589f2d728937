#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "pucl/csv_io.hpp"
#include "pucl/loop.hpp"
#include "pucl/modulation.hpp"
#include "pucl/policies.hpp"
#include "pucl/presets.hpp"
#include "pucl/sweep.hpp"
#include "pucl/text_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using Vec = pucl::Vec;

namespace {

struct CommonOpts {
    std::string task;
    std::string config_path;
    std::string out_dir;
    std::int64_t seed = -1;
    std::int64_t demo_seed = -1;
    std::int64_t iterations = -1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_out = true) {
    cmd->add_option("--task", o.task, "preset name: 2d, 3d, velocity, hetero");
    cmd->add_option("--config", o.config_path, "config JSON (overrides --task)");
    auto* out = cmd->add_option("--out", o.out_dir, "output directory");
    if (needs_out) out->required();
    cmd->add_option("--seed", o.seed, "master seed override");
    cmd->add_option("--demo-seed", o.demo_seed, "demonstration seed override");
    cmd->add_option("--iterations", o.iterations, "iteration budget override");
}

pucl::ExperimentConfig resolve_config(const CommonOpts& o) {
    pucl::ExperimentConfig cfg;
    if (!o.config_path.empty())
        cfg = pucl::load_config(o.config_path);
    else if (!o.task.empty())
        cfg = pucl::preset(o.task);
    else
        throw CLI::ValidationError("--task or --config is required");
    if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
    if (o.demo_seed >= 0) cfg.demo_seed = static_cast<std::uint64_t>(o.demo_seed);
    if (o.iterations >= 0) cfg.iterations = static_cast<int>(o.iterations);
    pucl::validate(cfg);
    return cfg;
}

std::string hash_hex(std::uint64_t h) {
    std::ostringstream ss;
    ss << "0x" << std::hex << h;
    return ss.str();
}

void write_demo_set(const pucl::ExperimentConfig& cfg, const pucl::DemoSet& demos,
                    const fs::path& dir) {
    pucl::write_trajectories_csv((dir / "demos.csv").string(), demos.trajectories, cfg.env.dim,
                                 cfg.env.dim);
    json manifest;
    manifest["env_hash"] = hash_hex(demos.env_fingerprint);
    manifest["demo_count"] = demos.trajectories.size();
    manifest["demo_seed"] = cfg.demo_seed;
    json returns = json::array();
    for (const auto& t : demos.trajectories) returns.push_back(t.cached_return);
    manifest["returns"] = returns;
    manifest["reference_returns"] = demos.reference_returns;
    std::ofstream mf(dir / "demo_manifest.json");
    mf << manifest.dump(2) << "\n";
}

pucl::DemoSet load_demo_set(const pucl::ExperimentConfig& cfg, const fs::path& dir) {
    std::ifstream mf(dir / "demo_manifest.json");
    if (!mf) throw std::runtime_error("missing demo_manifest.json in " + dir.string());
    json manifest;
    mf >> manifest;
    const std::string recorded = manifest.at("env_hash").get<std::string>();
    const std::string expected = hash_hex(pucl::env_hash(cfg));
    if (recorded != expected)
        throw std::runtime_error("demo manifest env_hash " + recorded +
                                 " does not match the config (" + expected + ")");

    pucl::DemoSet demos;
    demos.env_fingerprint = pucl::env_hash(cfg);
    demos.trajectories =
        pucl::read_trajectories_csv((dir / "demos.csv").string(), cfg.env.dim, cfg.env.dim);
    for (std::size_t i = 0; i < demos.trajectories.size(); ++i) {
        demos.trajectories[i].start_index = static_cast<int>(i);
        demos.trajectories[i].cached_return =
            pucl::trajectory_return(cfg.env, demos.trajectories[i], cfg.discount);
    }
    demos.reference_returns = manifest.at("reference_returns").get<std::vector<double>>();
    return demos;
}

void write_grid_predictions(const pucl::ExperimentConfig& cfg, const pucl::ConstraintNet& net,
                            const fs::path& path) {
    pucl::Dataset demo_features(cfg.env.dim, pucl::Provenance::Demonstration);
    if (cfg.grid.mode == pucl::EvalGridSpec::Mode::Sampled) {
        // Sampled bounds derive from the demonstrations; rebuild them.
        const pucl::DemoSet demos = pucl::generate_demonstrations(cfg);
        demo_features =
            pucl::flatten_trajectories(demos.trajectories, cfg.features,
                                       pucl::Provenance::Demonstration);
    }
    const pucl::EvalGrid grid = pucl::build_eval_grid(cfg, demo_features);
    std::vector<double> zeta(grid.points.size());
    if (!grid.points.empty()) net.predict_batch(grid.points.row(0), grid.points.size(), zeta.data());

    std::ofstream out(path);
    for (int d = 0; d < cfg.env.dim; ++d) out << 'x' << d << ',';
    out << "truly_infeasible,zeta\n";
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
        for (int d = 0; d < cfg.env.dim; ++d) out << pucl::format_double(grid.points.row(i)[d]) << ',';
        out << int(grid.truly_infeasible[i]) << ',' << pucl::format_double(zeta[i]) << '\n';
    }
}

json metrics_json(const pucl::RunResult& run) {
    json m;
    m["final_iou"] = run.final_iou ? json(*run.final_iou) : json(nullptr);
    m["final_recall"] = run.final_recall ? json(*run.final_recall) : json(nullptr);
    m["final_precision"] = run.final_precision ? json(*run.final_precision) : json(nullptr);
    m["final_unsafe"] = run.final_unsafe;
    m["env_steps"] = run.env_steps;
    m["iterations_run"] = run.trace.size();
    m["early_stopped"] = run.early_stopped;
    m["buffer_size"] = run.buffer_points.size();
    return m;
}

Vec parse_vec(const std::string& csv) {
    Vec v;
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    v.resize(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
    return v;
}

int cmd_gen_demos(const CommonOpts& o) {
    const auto cfg = resolve_config(o);
    fs::create_directories(o.out_dir);
    const pucl::DemoSet demos = pucl::generate_demonstrations(cfg);
    write_demo_set(cfg, demos, o.out_dir);
    pucl::save_config(cfg, (fs::path(o.out_dir) / "config.json").string());
    std::cout << "wrote " << demos.trajectories.size() << " demonstrations to " << o.out_dir
              << "\n";
    return 0;
}

int cmd_train(const CommonOpts& o, const std::string& algo, const std::string& demo_dir) {
    const auto cfg = resolve_config(o);
    fs::create_directories(o.out_dir);
    const fs::path dir(o.out_dir);

    pucl::DemoSet demos = demo_dir.empty() ? pucl::generate_demonstrations(cfg)
                                           : load_demo_set(cfg, demo_dir);
    const pucl::RunResult run = algo == "bc" ? pucl::run_bc_baseline(cfg, demos)
                                             : pucl::run_pucl(cfg, demos);

    pucl::save_config(cfg, (dir / "config.json").string());
    write_demo_set(cfg, run.demos, dir);
    pucl::write_trace_csv((dir / "trace.csv").string(), run.trace);
    pucl::write_timings_csv((dir / "timings.csv").string(), run.trace);
    run.net.save_binary((dir / "net.bin").string());
    run.net.save_text((dir / "net.txt").string());
    pucl::write_points_csv((dir / "reliable_points.csv").string(), run.buffer_points,
                           run.buffer_tags);
    write_grid_predictions(cfg, run.net, dir / "grid_predictions.csv");

    const json m = metrics_json(run);
    std::ofstream mf(dir / "metrics.json");
    mf << m.dump(2) << "\n";
    std::cout << m.dump(2) << "\n";

    if (!run.final_iou || !run.final_recall || !run.final_precision) {
        std::cerr << "grid metrics undefined (empty denominator)\n";
        return 3;
    }
    return 0;
}

int cmd_eval(const CommonOpts& o, const std::string& net_path, const std::string& buffer_path) {
    const auto cfg = resolve_config(o);
    fs::create_directories(o.out_dir);
    const fs::path dir(o.out_dir);
    const pucl::ConstraintNet net = pucl::ConstraintNet::load_binary(net_path);

    pucl::Dataset demo_features(cfg.env.dim, pucl::Provenance::Demonstration);
    if (cfg.grid.mode == pucl::EvalGridSpec::Mode::Sampled) {
        const pucl::DemoSet demos = pucl::generate_demonstrations(cfg);
        demo_features = pucl::flatten_trajectories(demos.trajectories, cfg.features,
                                                   pucl::Provenance::Demonstration);
    }
    const pucl::EvalGrid grid = pucl::build_eval_grid(cfg, demo_features);
    const pucl::Confusion conf = pucl::classify_grid(net, grid);

    pucl::ModulationField field(net, cfg.gamma_floor, cfg.gamma_ceiling);
    double cutoff = cfg.score.mode == pucl::ThresholdMode::Absolute
                        ? cfg.score.distance_threshold
                        : 0.0;
    if (!buffer_path.empty() && cfg.features.mode == pucl::FeatureMode::StateOnly) {
        // reliable_points.csv: tag,x0..x{d-1}
        std::ifstream in(buffer_path);
        if (!in) throw std::runtime_error("cannot read buffer: " + buffer_path);
        std::string line;
        std::getline(in, line);  // header
        std::vector<Vec> pts;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const Vec row = parse_vec(line);
            pts.push_back(row.tail(row.size() - 1));
        }
        field.build_references(pts, 2.0 * cutoff);
    }
    const pucl::PolicyFn policy = pucl::make_learned_policy(cfg, field, net, nullptr);
    pucl::Rng start_rng = pucl::Rng::substream(cfg.seed, "eval-starts");
    const pucl::SafetyStats stats = pucl::safety_stats(cfg, policy, start_rng);

    json m;
    const auto i = pucl::iou(conf);
    const auto r = pucl::recall(conf);
    const auto p = pucl::precision(conf);
    m["iou"] = i ? json(*i) : json(nullptr);
    m["recall"] = r ? json(*r) : json(nullptr);
    m["precision"] = p ? json(*p) : json(nullptr);
    m["accuracy"] = pucl::accuracy(conf);
    m["unsafe_episode_rate"] = stats.unsafe_episode_rate;
    m["violation_step_fraction"] = stats.violation_step_fraction;
    std::ofstream mf(dir / "metrics.json");
    mf << m.dump(2) << "\n";
    std::cout << m.dump(2) << "\n";
    write_grid_predictions(cfg, net, dir / "grid_predictions.csv");
    return (i && r && p) ? 0 : 3;
}

int cmd_sweep(const CommonOpts& o, const std::string& thresholds_csv,
              const std::string& seeds_csv) {
    const auto cfg = resolve_config(o);
    fs::create_directories(o.out_dir);
    const Vec tv = parse_vec(thresholds_csv);
    std::vector<double> thresholds(tv.data(), tv.data() + tv.size());
    std::vector<std::uint64_t> seeds;
    {
        std::stringstream ss(seeds_csv);
        std::string cell;
        while (std::getline(ss, cell, ',')) seeds.push_back(std::stoull(cell));
    }
    const pucl::SweepResult result = pucl::sweep_dr(cfg, thresholds, seeds);
    pucl::write_sweep_csv((fs::path(o.out_dir) / "sweep.csv").string(), result);
    for (const auto& s : result.summaries)
        std::cout << "d_r=" << s.distance_threshold << "  first |R| " << s.mean_first_identified
                  << " +- " << s.std_first_identified << "  IoU " << s.mean_iou << " +- "
                  << s.std_iou << "  unsafe " << s.mean_unsafe << " +- " << s.std_unsafe << "\n";
    return 0;
}

int cmd_plan(const CommonOpts& o, const std::string& net_path, const std::string& start_csv) {
    const auto cfg = resolve_config(o);
    fs::create_directories(o.out_dir);
    const fs::path dir(o.out_dir);
    const pucl::ConstraintNet net = pucl::ConstraintNet::load_binary(net_path);

    Vec start;
    if (!start_csv.empty()) {
        start = parse_vec(start_csv);
    } else {
        pucl::Rng rng = pucl::Rng::substream(cfg.seed, "plan-start");
        start = pucl::sample_start(cfg, rng);
    }
    if (start.size() != cfg.env.dim) throw std::runtime_error("start dimension mismatch");

    pucl::Rng rng = pucl::Rng::substream(cfg.seed, "plan");
    const pucl::PlanResult plan =
        pucl::plan_trajectory(cfg.env, start, net, cfg.features, cfg.planner, rng, cfg.discount);

    pucl::write_trajectories_csv((dir / "plan.csv").string(), {plan.trajectory}, cfg.env.dim,
                                 cfg.env.dim);
    std::ofstream rf(dir / "planner_rounds.csv");
    rf << "round,best_return,violations,penalty_weight\n";
    for (const auto& r : plan.rounds)
        rf << r.round << ',' << pucl::format_double(r.best_return) << ',' << r.violations << ','
           << pucl::format_double(r.penalty_weight) << '\n';
    std::cout << "best objective " << plan.best_objective << " over " << plan.rounds.size()
              << " rounds, " << plan.env_steps << " planner steps\n";
    return 0;
}

int cmd_transfer(const CommonOpts& o, const std::string& train_dir, const std::string& goal_csv,
                 const std::string& lower_csv, const std::string& upper_csv, double min_goal_dist) {
    const auto cfg = resolve_config(o);
    const fs::path tdir(train_dir);

    pucl::RunResult run;
    run.net = pucl::ConstraintNet::load_binary((tdir / "net.bin").string());
    {
        std::ifstream in(tdir / "reliable_points.csv");
        if (in) {
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                const Vec row = parse_vec(line);
                run.buffer_points.push_back(row.tail(row.size() - 1));
            }
        }
    }
    run.scoring_cutoff = cfg.score.mode == pucl::ThresholdMode::Absolute
                             ? cfg.score.distance_threshold
                             : 0.0;

    pucl::StartBand band;
    band.lower = parse_vec(lower_csv);
    band.upper = parse_vec(upper_csv);
    band.min_goal_distance = min_goal_dist;
    pucl::Rng rng = pucl::Rng::substream(cfg.seed, "transfer-starts");
    const pucl::SafetyStats stats = pucl::transfer_eval(cfg, run, parse_vec(goal_csv), band, rng);

    json m;
    m["unsafe_episode_rate"] = stats.unsafe_episode_rate;
    m["violation_step_fraction"] = stats.violation_step_fraction;
    m["episodes"] = stats.episodes;
    if (!o.out_dir.empty()) {
        fs::create_directories(o.out_dir);
        std::ofstream mf(fs::path(o.out_dir) / "transfer.json");
        mf << m.dump(2) << "\n";
    }
    std::cout << m.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constraint learning from positive-unlabeled demonstration data"};
    app.require_subcommand(1);

    CommonOpts gen_o, train_o, eval_o, sweep_o, plan_o, transfer_o;
    std::string algo = "pucl", demo_dir, net_path, buffer_path, thresholds_csv, seeds_csv = "1";
    std::string start_csv, train_dir, goal_csv, lower_csv, upper_csv;
    double min_goal_dist = 0.0;

    auto* gen = app.add_subcommand("gen-demos", "generate and vet demonstrations");
    add_common(gen, gen_o);

    auto* train = app.add_subcommand("train", "run the learning loop");
    add_common(train, train_o);
    train->add_option("--algo", algo, "pucl | bc")->check(CLI::IsMember({"pucl", "bc"}));
    train->add_option("--demos", demo_dir, "directory from gen-demos (default: generate)");

    auto* eval = app.add_subcommand("eval", "evaluate a saved classifier");
    add_common(eval, eval_o);
    eval->add_option("--net", net_path, "net.bin path")->required();
    eval->add_option("--buffer", buffer_path, "reliable_points.csv for field references");

    auto* sweep = app.add_subcommand("sweep", "distance-threshold sensitivity sweep");
    add_common(sweep, sweep_o);
    sweep->add_option("--thresholds", thresholds_csv, "comma-separated d_r values")->required();
    sweep->add_option("--seeds", seeds_csv, "comma-separated seeds");

    auto* plan = app.add_subcommand("plan", "plan one trajectory with a saved classifier");
    add_common(plan, plan_o);
    plan->add_option("--net", net_path, "net.bin path")->required();
    plan->add_option("--start", start_csv, "comma-separated start state (default: sampled)");

    auto* transfer = app.add_subcommand("transfer", "frozen-net safety under a shifted task");
    add_common(transfer, transfer_o, false);
    transfer->add_option("--train-dir", train_dir, "directory from train")->required();
    transfer->add_option("--goal", goal_csv, "comma-separated new goal")->required();
    transfer->add_option("--band-lower", lower_csv, "new start band lower corner")->required();
    transfer->add_option("--band-upper", upper_csv, "new start band upper corner")->required();
    transfer->add_option("--min-goal-distance", min_goal_dist, "start rejection radius");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_demos(gen_o);
        if (train->parsed()) return cmd_train(train_o, algo, demo_dir);
        if (eval->parsed()) return cmd_eval(eval_o, net_path, buffer_path);
        if (sweep->parsed()) return cmd_sweep(sweep_o, thresholds_csv, seeds_csv);
        if (plan->parsed()) return cmd_plan(plan_o, net_path, start_csv);
        if (transfer->parsed())
            return cmd_transfer(transfer_o, train_dir, goal_csv, lower_csv, upper_csv,
                                min_goal_dist);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
