#pragma once

#include <string>
#include <vector>

#include "pucl/types.hpp"

namespace pucl {

/// Trajectory CSV: header then one row per step
///   traj_id,step,s0..s{n-1},a0..a{m-1}
/// Doubles are written in shortest round-trip form.
void write_trajectories_csv(const std::string& path, const std::vector<Trajectory>& trajs,
                            int state_dim, int action_dim);
std::vector<Trajectory> read_trajectories_csv(const std::string& path, int state_dim,
                                              int action_dim);

/// Compact binary cache for a trajectory set (magic + dims + raw doubles).
void write_trajectories_binary(const std::string& path, const std::vector<Trajectory>& trajs,
                               int state_dim, int action_dim);
std::vector<Trajectory> read_trajectories_binary(const std::string& path);

/// Point-set CSV with an integer tag column (e.g. the identification
/// iteration): tag,x0..x{d-1}.
void write_points_csv(const std::string& path, const std::vector<Vec>& points,
                      const std::vector<int>& tags);

/// Dataset CSV: traj,step,x0..x{d-1}.
void write_dataset_csv(const std::string& path, const Dataset& ds);

}  // namespace pucl
