#include "pucl/csv_io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "pucl/text_io.hpp"

namespace pucl {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream f(path, mode);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode = std::ios::in) {
    std::ifstream f(path, mode);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return f;
}

}  // namespace

void write_trajectories_csv(const std::string& path, const std::vector<Trajectory>& trajs,
                            int state_dim, int action_dim) {
    auto f = open_out(path);
    f << "traj,step";
    for (int d = 0; d < state_dim; ++d) f << ",s" << d;
    for (int d = 0; d < action_dim; ++d) f << ",a" << d;
    f << "\n";
    for (std::size_t t = 0; t < trajs.size(); ++t) {
        for (std::size_t s = 0; s < trajs[t].steps.size(); ++s) {
            const StateAction& sa = trajs[t].steps[s];
            f << t << "," << s;
            for (int d = 0; d < state_dim; ++d) f << "," << format_double(sa.state[d]);
            for (int d = 0; d < action_dim; ++d) f << "," << format_double(sa.action[d]);
            f << "\n";
        }
    }
}

std::vector<Trajectory> read_trajectories_csv(const std::string& path, int state_dim,
                                              int action_dim) {
    auto f = open_in(path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty trajectory CSV: " + path);
    std::vector<Trajectory> trajs;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        auto next = [&]() -> std::string {
            if (!std::getline(ss, cell, ','))
                throw std::runtime_error("short row in trajectory CSV: " + path);
            return cell;
        };
        const std::size_t t = std::stoul(next());
        next();  // step index, implied by order
        StateAction sa{Vec(state_dim), Vec(action_dim)};
        for (int d = 0; d < state_dim; ++d) sa.state[d] = std::stod(next());
        for (int d = 0; d < action_dim; ++d) sa.action[d] = std::stod(next());
        if (t >= trajs.size()) trajs.resize(t + 1);
        trajs[t].steps.push_back(std::move(sa));
    }
    return trajs;
}

namespace {
constexpr std::uint64_t kTrajMagic = 0x5055434c54524a31ull;  // "PUCLTRJ1"
}

void write_trajectories_binary(const std::string& path, const std::vector<Trajectory>& trajs,
                               int state_dim, int action_dim) {
    auto f = open_out(path, std::ios::binary);
    auto put = [&f](const void* p, std::size_t n) { f.write(static_cast<const char*>(p), n); };
    put(&kTrajMagic, 8);
    const std::uint32_t sd = state_dim, ad = action_dim;
    const std::uint64_t count = trajs.size();
    put(&sd, 4);
    put(&ad, 4);
    put(&count, 8);
    for (const auto& tr : trajs) {
        const std::uint64_t len = tr.steps.size();
        const std::int64_t start = tr.start_index;
        put(&len, 8);
        put(&start, 8);
        put(&tr.cached_return, 8);
        for (const auto& sa : tr.steps) {
            put(sa.state.data(), 8 * state_dim);
            put(sa.action.data(), 8 * action_dim);
        }
    }
}

std::vector<Trajectory> read_trajectories_binary(const std::string& path) {
    auto f = open_in(path, std::ios::binary);
    auto get = [&f, &path](void* p, std::size_t n) {
        if (!f.read(static_cast<char*>(p), n))
            throw std::runtime_error("truncated trajectory cache: " + path);
    };
    std::uint64_t magic = 0;
    get(&magic, 8);
    if (magic != kTrajMagic) throw std::runtime_error("bad trajectory cache magic: " + path);
    std::uint32_t sd = 0, ad = 0;
    std::uint64_t count = 0;
    get(&sd, 4);
    get(&ad, 4);
    get(&count, 8);
    std::vector<Trajectory> trajs(count);
    for (auto& tr : trajs) {
        std::uint64_t len = 0;
        std::int64_t start = 0;
        get(&len, 8);
        get(&start, 8);
        get(&tr.cached_return, 8);
        tr.start_index = static_cast<int>(start);
        tr.steps.resize(len);
        for (auto& sa : tr.steps) {
            sa.state.resize(sd);
            sa.action.resize(ad);
            get(sa.state.data(), 8 * sd);
            get(sa.action.data(), 8 * ad);
        }
    }
    return trajs;
}

void write_points_csv(const std::string& path, const std::vector<Vec>& points,
                      const std::vector<int>& tags) {
    if (points.size() != tags.size())
        throw std::invalid_argument("write_points_csv: points/tags size mismatch");
    auto f = open_out(path);
    const int dim = points.empty() ? 0 : static_cast<int>(points[0].size());
    f << "iteration";
    for (int d = 0; d < dim; ++d) f << ",x" << d;
    f << "\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        f << tags[i];
        for (int d = 0; d < dim; ++d) f << "," << format_double(points[i][d]);
        f << "\n";
    }
}

void write_dataset_csv(const std::string& path, const Dataset& ds) {
    auto f = open_out(path);
    f << "traj,step";
    for (int d = 0; d < ds.dim(); ++d) f << ",x" << d;
    f << "\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        f << ds.traj_of(i) << "," << ds.step_of(i);
        for (int d = 0; d < ds.dim(); ++d) f << "," << format_double(ds.row(i)[d]);
        f << "\n";
    }
}

}  // namespace pucl
