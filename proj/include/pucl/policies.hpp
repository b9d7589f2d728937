#pragma once

#include "pucl/config.hpp"
#include "pucl/env.hpp"
#include "pucl/modulation.hpp"
#include "pucl/rng.hpp"

namespace pucl {

/// Shrinks `a` toward zero until the classifier accepts it: bisection on the
/// scale factor, keeping the accepted endpoint. Returns the zero action when
/// even that is rejected.
Vec project_to_learned(const ConstraintNet& net, const Vec& a, double accept = 0.5,
                       int iters = 25);

/// Goal-directed policy under the learned constraint. State features:
/// modulate the (noised) nominal velocity by the learned field. Action
/// features: modulate around the known geometry, then project the action
/// into the learned-feasible set. `noise_rng`, when non-null, adds
/// exploration noise with per-dimension std exploration_noise x action cap;
/// for state features the noise enters before modulation so the field keeps
/// its guarantee. The caller keeps `field`/`net` alive while the policy is
/// in use.
PolicyFn make_learned_policy(const ExperimentConfig& cfg, const ModulationField& field,
                             const ConstraintNet& net, Rng* noise_rng);

}  // namespace pucl
