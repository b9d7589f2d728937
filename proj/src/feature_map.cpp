#include "pucl/feature_map.hpp"

namespace pucl {

int FeatureSpec::output_dim(int state_dim, int action_dim) const {
    switch (mode) {
        case FeatureMode::StateOnly: return state_dim;
        case FeatureMode::ActionOnly: return action_dim;
        case FeatureMode::Custom: return static_cast<int>(indices.size());
    }
    return 0;
}

Vec feature_map(const StateAction& sa, const FeatureSpec& spec) {
    switch (spec.mode) {
        case FeatureMode::StateOnly: return sa.state;
        case FeatureMode::ActionOnly: return sa.action;
        case FeatureMode::Custom: break;
    }
    const int ns = static_cast<int>(sa.state.size());
    const int na = static_cast<int>(sa.action.size());
    Vec out(spec.indices.size());
    for (std::size_t i = 0; i < spec.indices.size(); ++i) {
        const int idx = spec.indices[i];
        if (idx < 0 || idx >= ns + na)
            throw std::invalid_argument("feature_map: custom index " + std::to_string(idx) +
                                        " out of range for state+action of size " +
                                        std::to_string(ns + na));
        out[i] = idx < ns ? sa.state[idx] : sa.action[idx - ns];
    }
    return out;
}

Dataset flatten_trajectories(const std::vector<Trajectory>& trajs, const FeatureSpec& spec,
                             Provenance prov) {
    if (trajs.empty()) throw std::invalid_argument("flatten_trajectories: empty trajectory set");
    int dim = -1;
    Dataset ds;
    for (std::size_t t = 0; t < trajs.size(); ++t) {
        for (std::size_t s = 0; s < trajs[t].steps.size(); ++s) {
            Vec f = feature_map(trajs[t].steps[s], spec);
            if (dim < 0) {
                dim = static_cast<int>(f.size());
                ds = Dataset(dim, prov);
            }
            ds.push_back(f, static_cast<int>(t), static_cast<int>(s));
        }
    }
    if (dim < 0) throw std::invalid_argument("flatten_trajectories: all trajectories empty");
    return ds;
}

std::vector<std::vector<std::size_t>> group_by_trajectory(const Dataset& ds) {
    std::vector<std::vector<std::size_t>> groups;
    std::vector<int> seen;  // traj id -> group index, small and dense in practice
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const int t = ds.traj_of(i);
        if (t < 0) throw std::invalid_argument("group_by_trajectory: dataset has no back-references");
        if (t >= static_cast<int>(seen.size())) seen.resize(t + 1, -1);
        if (seen[t] < 0) {
            seen[t] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[seen[t]].push_back(i);
    }
    return groups;
}

}  // namespace pucl
