#pragma once

#include "pucl/types.hpp"

namespace pucl {

enum class FeatureMode { StateOnly, ActionOnly, Custom };

/// Selects which entries of (state ++ action) form the generalized state fed
/// to the constraint network. Custom indices address the concatenation.
struct FeatureSpec {
    FeatureMode mode = FeatureMode::StateOnly;
    std::vector<int> indices;  // used by Custom only

    int output_dim(int state_dim, int action_dim) const;
};

Vec feature_map(const StateAction& sa, const FeatureSpec& spec);

/// Flattens trajectories into one dataset, trajectory order then step order,
/// keeping (trajectory, step) back-references.
Dataset flatten_trajectories(const std::vector<Trajectory>& trajs, const FeatureSpec& spec,
                             Provenance prov);

/// Regroups a flattened dataset by its trajectory back-references.
/// Returns per-trajectory lists of row indices, in first-appearance order.
std::vector<std::vector<std::size_t>> group_by_trajectory(const Dataset& ds);

}  // namespace pucl
