#pragma once

#include <vector>

#include "pucl/config.hpp"

namespace pucl {

/// Ground-truth-labeled probe set in feature space.
struct EvalGrid {
    Dataset points{0, Provenance::Policy};
    std::vector<char> truly_infeasible;
};

/// Lattice mode spans [lower, upper] inclusively (defaults: the workspace
/// for state features, +/- the action caps for action features). Sampled
/// mode draws uniform points inside per-dimension bounds derived from the
/// demonstration range, extended to the workspace edge along a halfspace
/// constraint's active dimension so the infeasible side is covered.
EvalGrid build_eval_grid(const ExperimentConfig& cfg, const Dataset& demo_features);

}  // namespace pucl
