#include "pucl/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace pucl {

namespace {

using nlohmann::json;

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vec vec_from_json(const json& a) {
    Vec v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
    return v;
}

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Mat mat_from_json(const json& rows) {
    const auto nr = rows.size();
    const auto nc = nr ? rows[0].size() : 0;
    Mat m(nr, nc);
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t c = 0; c < nc; ++c) m(r, c) = rows[r][c].get<double>();
    return m;
}

json constraint_to_json(const TrueConstraint& tc) {
    json j;
    if (const auto* eu = std::get_if<EllipseUnion>(&tc)) {
        j["kind"] = "ellipse_union";
        json comps = json::array();
        for (const auto& e : eu->components)
            comps.push_back({{"center", vec_to_json(e.center)},
                             {"semi_axes", vec_to_json(e.semi_axes)},
                             {"rotation", mat_to_json(e.rotation)}});
        j["components"] = comps;
    } else if (const auto* cs = std::get_if<CylinderSet>(&tc)) {
        j["kind"] = "cylinder_set";
        json comps = json::array();
        for (const auto& c : cs->components) {
            json one = {{"cx", c.cx}, {"cy", c.cy}, {"radius", c.radius}};
            // JSON has no infinity; an absent span means an uncapped cylinder.
            if (std::isfinite(c.z_lo) && std::isfinite(c.z_hi)) {
                one["z_lo"] = c.z_lo;
                one["z_hi"] = c.z_hi;
            }
            comps.push_back(one);
        }
        j["components"] = comps;
    } else if (const auto* vb = std::get_if<VelocityBox>(&tc)) {
        j["kind"] = "velocity_box";
        j["limits"] = vec_to_json(vb->limits);
    } else {
        const auto& hs = std::get<SyntheticHalfspace>(tc);
        j["kind"] = "synthetic_halfspace";
        j["coeff"] = vec_to_json(hs.coeff);
        j["offset"] = hs.offset;
    }
    return j;
}

TrueConstraint constraint_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "ellipse_union") {
        EllipseUnion eu;
        for (const auto& c : j.at("components"))
            eu.components.push_back({vec_from_json(c.at("center")),
                                     vec_from_json(c.at("semi_axes")),
                                     mat_from_json(c.at("rotation"))});
        return eu;
    }
    if (kind == "cylinder_set") {
        CylinderSet cs;
        for (const auto& c : j.at("components")) {
            Cylinder cyl{c.at("cx").get<double>(), c.at("cy").get<double>(),
                         c.at("radius").get<double>()};
            if (c.contains("z_lo")) cyl.z_lo = c.at("z_lo").get<double>();
            if (c.contains("z_hi")) cyl.z_hi = c.at("z_hi").get<double>();
            cs.components.push_back(cyl);
        }
        return cs;
    }
    if (kind == "velocity_box") return VelocityBox{vec_from_json(j.at("limits"))};
    if (kind == "synthetic_halfspace")
        return SyntheticHalfspace{vec_from_json(j.at("coeff")), j.at("offset").get<double>()};
    throw std::invalid_argument("unknown constraint kind: " + kind);
}

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::Euclidean: return "euclidean";
        case Metric::Manhattan: return "manhattan";
        default: return "chebyshev";
    }
}

Metric metric_from(const std::string& s) {
    if (s == "euclidean") return Metric::Euclidean;
    if (s == "manhattan") return Metric::Manhattan;
    if (s == "chebyshev") return Metric::Chebyshev;
    throw std::invalid_argument("unknown metric: " + s);
}

std::string feature_name(FeatureMode m) {
    switch (m) {
        case FeatureMode::StateOnly: return "state";
        case FeatureMode::ActionOnly: return "action";
        default: return "custom";
    }
}

FeatureMode feature_from(const std::string& s) {
    if (s == "state") return FeatureMode::StateOnly;
    if (s == "action") return FeatureMode::ActionOnly;
    if (s == "custom") return FeatureMode::Custom;
    throw std::invalid_argument("unknown feature mode: " + s);
}

}  // namespace

json to_json(const ExperimentConfig& cfg) {
    json j;
    j["task"] = cfg.task;
    j["seed"] = cfg.seed;
    j["demo_seed"] = cfg.demo_seed;

    j["env"] = {{"dim", cfg.env.dim},
                {"lower", vec_to_json(cfg.env.lower)},
                {"upper", vec_to_json(cfg.env.upper)},
                {"cap", cfg.env.cap},
                {"cap_mode", cfg.env.cap_mode == CapMode::Norm ? "norm" : "box"},
                {"box_caps", vec_to_json(cfg.env.box_caps)},
                {"h", cfg.env.h},
                {"horizon", cfg.env.horizon},
                {"goal", vec_to_json(cfg.env.goal)},
                {"goal_radius", cfg.env.goal_radius}};

    j["target"] = constraint_to_json(cfg.target);
    j["known"] = cfg.known ? constraint_to_json(*cfg.known) : json(nullptr);
    j["known_margin"] = cfg.known_margin;

    j["starts"] = {{"lower", vec_to_json(cfg.starts.lower)},
                   {"upper", vec_to_json(cfg.starts.upper)},
                   {"min_goal_distance", cfg.starts.min_goal_distance}};

    j["features"] = {{"mode", feature_name(cfg.features.mode)},
                     {"indices", cfg.features.indices}};

    j["score"] = {{"k", cfg.score.k},
                  {"metric", metric_name(cfg.score.metric)},
                  {"mode", cfg.score.mode == ThresholdMode::Absolute ? "absolute" : "percentile"},
                  {"distance_threshold", cfg.score.distance_threshold},
                  {"percentile", cfg.score.percentile},
                  {"standardize", cfg.score.standardize}};

    j["filter"] = {{"delta", cfg.delta},
                   {"form", cfg.filter_form == FilterForm::HighRewardLiteral
                                ? "high_reward_literal"
                                : "suboptimality_bound"}};
    j["discount"] = cfg.discount;

    j["classifier"] = {{"hidden", cfg.hidden},
                       {"leaky_slope", cfg.leaky_slope},
                       {"learning_rate", cfg.train.learning_rate},
                       {"epochs", cfg.train.epochs},
                       {"batch_size", cfg.train.batch_size},
                       {"prob_clip", cfg.train.prob_clip}};

    j["backend"] = cfg.backend == PolicyBackend::Dsm ? "dsm" : "planner";
    j["planner"] = {{"horizon", cfg.planner.horizon},
                    {"samples", cfg.planner.samples},
                    {"elite_fraction", cfg.planner.elite_fraction},
                    {"rounds", cfg.planner.rounds},
                    {"noise_std_scale", cfg.planner.noise_std_scale},
                    {"penalty_weight", cfg.planner.penalty_weight},
                    {"gains",
                     {{"kp", cfg.planner.gains.kp},
                      {"ki", cfg.planner.gains.ki},
                      {"kd", cfg.planner.gains.kd}}},
                    {"violation_target", cfg.planner.violation_target},
                    {"goal_weight", cfg.planner.goal_weight}};
    j["exploration_noise"] = cfg.exploration_noise;

    j["iterations"] = cfg.iterations;
    j["demo_count"] = cfg.demo_count;
    j["expert"] = {{"margin", cfg.expert.margin},
                   {"velocity_margin", cfg.expert.velocity_margin},
                   {"noise_std", cfg.expert.noise_std},
                   {"delta_budget", cfg.expert.delta_budget},
                   {"max_attempts", cfg.expert.max_attempts}};

    j["grid"] = {{"mode", cfg.grid.mode == EvalGridSpec::Mode::Lattice ? "lattice" : "sampled"},
                 {"resolution", cfg.grid.resolution},
                 {"lower", vec_to_json(cfg.grid.lower)},
                 {"upper", vec_to_json(cfg.grid.upper)},
                 {"sample_count", cfg.grid.sample_count},
                 {"sample_seed", cfg.grid.sample_seed},
                 {"budget", cfg.grid.budget}};
    j["unsafe_episodes"] = cfg.unsafe_episodes;
    j["early_stop"] = {{"delta", cfg.early_stop_delta}, {"window", cfg.early_stop_window}};
    j["modulation"] = {{"gamma_floor", cfg.gamma_floor}, {"gamma_ceiling", cfg.gamma_ceiling}};
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.task = j.at("task").get<std::string>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.demo_seed = j.at("demo_seed").get<std::uint64_t>();

    const json& e = j.at("env");
    cfg.env.dim = e.at("dim").get<int>();
    cfg.env.lower = vec_from_json(e.at("lower"));
    cfg.env.upper = vec_from_json(e.at("upper"));
    cfg.env.cap = e.at("cap").get<double>();
    cfg.env.cap_mode = e.at("cap_mode").get<std::string>() == "norm" ? CapMode::Norm : CapMode::Box;
    cfg.env.box_caps = vec_from_json(e.at("box_caps"));
    cfg.env.h = e.at("h").get<double>();
    cfg.env.horizon = e.at("horizon").get<int>();
    cfg.env.goal = vec_from_json(e.at("goal"));
    cfg.env.goal_radius = e.at("goal_radius").get<double>();

    cfg.target = constraint_from_json(j.at("target"));
    if (!j.at("known").is_null()) cfg.known = constraint_from_json(j.at("known"));
    cfg.known_margin = j.at("known_margin").get<double>();

    const json& st = j.at("starts");
    cfg.starts.lower = vec_from_json(st.at("lower"));
    cfg.starts.upper = vec_from_json(st.at("upper"));
    cfg.starts.min_goal_distance = st.at("min_goal_distance").get<double>();

    const json& f = j.at("features");
    cfg.features.mode = feature_from(f.at("mode").get<std::string>());
    cfg.features.indices = f.at("indices").get<std::vector<int>>();

    const json& sc = j.at("score");
    cfg.score.k = sc.at("k").get<int>();
    cfg.score.metric = metric_from(sc.at("metric").get<std::string>());
    cfg.score.mode = sc.at("mode").get<std::string>() == "absolute" ? ThresholdMode::Absolute
                                                                    : ThresholdMode::Percentile;
    cfg.score.distance_threshold = sc.at("distance_threshold").get<double>();
    cfg.score.percentile = sc.at("percentile").get<double>();
    cfg.score.standardize = sc.at("standardize").get<bool>();

    const json& fl = j.at("filter");
    cfg.delta = fl.at("delta").get<double>();
    cfg.filter_form = fl.at("form").get<std::string>() == "high_reward_literal"
                          ? FilterForm::HighRewardLiteral
                          : FilterForm::SuboptimalityBound;
    cfg.discount = j.at("discount").get<double>();

    const json& cl = j.at("classifier");
    cfg.hidden = cl.at("hidden").get<std::vector<int>>();
    cfg.leaky_slope = cl.at("leaky_slope").get<double>();
    cfg.train.learning_rate = cl.at("learning_rate").get<double>();
    cfg.train.epochs = cl.at("epochs").get<int>();
    cfg.train.batch_size = cl.at("batch_size").get<int>();
    cfg.train.prob_clip = cl.at("prob_clip").get<double>();

    cfg.backend = j.at("backend").get<std::string>() == "dsm" ? PolicyBackend::Dsm
                                                              : PolicyBackend::Planner;
    const json& p = j.at("planner");
    cfg.planner.horizon = p.at("horizon").get<int>();
    cfg.planner.samples = p.at("samples").get<int>();
    cfg.planner.elite_fraction = p.at("elite_fraction").get<double>();
    cfg.planner.rounds = p.at("rounds").get<int>();
    cfg.planner.noise_std_scale = p.at("noise_std_scale").get<double>();
    cfg.planner.penalty_weight = p.at("penalty_weight").get<double>();
    cfg.planner.gains.kp = p.at("gains").at("kp").get<double>();
    cfg.planner.gains.ki = p.at("gains").at("ki").get<double>();
    cfg.planner.gains.kd = p.at("gains").at("kd").get<double>();
    cfg.planner.violation_target = p.at("violation_target").get<double>();
    cfg.planner.goal_weight = p.at("goal_weight").get<double>();
    cfg.exploration_noise = j.at("exploration_noise").get<double>();

    cfg.iterations = j.at("iterations").get<int>();
    cfg.demo_count = j.at("demo_count").get<int>();
    const json& ex = j.at("expert");
    cfg.expert.margin = ex.at("margin").get<double>();
    cfg.expert.velocity_margin = ex.at("velocity_margin").get<double>();
    cfg.expert.noise_std = ex.at("noise_std").get<double>();
    cfg.expert.delta_budget = ex.at("delta_budget").get<double>();
    cfg.expert.max_attempts = ex.at("max_attempts").get<int>();

    const json& g = j.at("grid");
    cfg.grid.mode = g.at("mode").get<std::string>() == "lattice" ? EvalGridSpec::Mode::Lattice
                                                                 : EvalGridSpec::Mode::Sampled;
    cfg.grid.resolution = g.at("resolution").get<std::vector<int>>();
    cfg.grid.lower = vec_from_json(g.at("lower"));
    cfg.grid.upper = vec_from_json(g.at("upper"));
    cfg.grid.sample_count = g.at("sample_count").get<int>();
    cfg.grid.sample_seed = g.at("sample_seed").get<std::uint64_t>();
    cfg.grid.budget = g.at("budget").get<long>();

    cfg.unsafe_episodes = j.at("unsafe_episodes").get<int>();
    cfg.early_stop_delta = j.at("early_stop").at("delta").get<double>();
    cfg.early_stop_window = j.at("early_stop").at("window").get<int>();
    cfg.gamma_floor = j.at("modulation").at("gamma_floor").get<double>();
    cfg.gamma_ceiling = j.at("modulation").at("gamma_ceiling").get<double>();
    return cfg;
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config: " + path);
    out << to_json(cfg).dump(2) << "\n";
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config: " + path);
    json j;
    in >> j;
    return config_from_json(j);
}

void validate(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
    if (cfg.env.dim < 1) fail("env.dim must be >= 1");
    if (cfg.env.h <= 0.0) fail("env.h must be > 0");
    if (cfg.env.cap <= 0.0) fail("env.cap must be > 0");
    if (cfg.env.lower.size() != cfg.env.dim || cfg.env.upper.size() != cfg.env.dim)
        fail("workspace bounds must match env.dim");
    for (int d = 0; d < cfg.env.dim; ++d) {
        if (cfg.env.lower[d] >= cfg.env.upper[d]) fail("workspace lower must be below upper");
        if (cfg.env.goal[d] < cfg.env.lower[d] || cfg.env.goal[d] > cfg.env.upper[d])
            fail("goal must lie inside the workspace");
    }
    if (cfg.env.cap_mode == CapMode::Box && cfg.env.box_caps.size() != cfg.env.dim)
        fail("box_caps must match env.dim in box cap mode");
    if (cfg.score.k < 1) fail("score.k must be >= 1");
    if (cfg.score.distance_threshold < 0.0) fail("score.distance_threshold must be >= 0");
    if (cfg.score.mode == ThresholdMode::Percentile &&
        (cfg.score.percentile <= 0.0 || cfg.score.percentile >= 100.0))
        fail("score.percentile must be in (0,100)");
    if (cfg.delta < 0.0 || cfg.delta >= 1.0) fail("filter.delta must be in [0,1)");
    if (cfg.discount <= 0.0 || cfg.discount > 1.0) fail("discount must be in (0,1]");
    if (cfg.train.learning_rate <= 0.0) fail("learning_rate must be > 0");
    if (cfg.train.prob_clip <= 0.0 || cfg.train.prob_clip > 1e-3)
        fail("prob_clip must be in (0, 1e-3]");
    if (cfg.hidden.empty()) fail("classifier needs at least one hidden layer");
    if (cfg.planner.elite_fraction <= 0.0 || cfg.planner.elite_fraction >= 1.0)
        fail("planner.elite_fraction must be in (0,1)");
    if (cfg.planner.penalty_weight < 0.0) fail("planner.penalty_weight must be >= 0");
    if (cfg.iterations < 0) fail("iterations must be >= 0");
    if (cfg.demo_count < 1) fail("demo_count must be >= 1");
    if (cfg.grid.mode == EvalGridSpec::Mode::Lattice) {
        long total = 1;
        for (int r : cfg.grid.resolution) {
            if (r < 2) fail("grid resolution entries must be >= 2");
            total *= r;
        }
        if (total > cfg.grid.budget) fail("grid exceeds its point budget");
    } else if (cfg.grid.sample_count > cfg.grid.budget) {
        fail("grid exceeds its point budget");
    }
    if (cfg.unsafe_episodes < 1) fail("unsafe_episodes must be >= 1");
}

std::uint64_t env_hash(const ExperimentConfig& cfg) {
    json j;
    j["env"] = to_json(cfg)["env"];
    j["target"] = constraint_to_json(cfg.target);
    j["known"] = cfg.known ? constraint_to_json(*cfg.known) : json(nullptr);
    j["known_margin"] = cfg.known_margin;
    j["starts"] = to_json(cfg)["starts"];
    j["expert"] = to_json(cfg)["expert"];
    j["demo_count"] = cfg.demo_count;
    j["demo_seed"] = cfg.demo_seed;
    j["discount"] = cfg.discount;
    const std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace pucl
