#pragma once

#include <limits>
#include <variant>
#include <vector>

#include "pucl/types.hpp"

namespace pucl {

/// Rotated ellipsoid. Body coordinates are y = rotation·(x − center); the
/// strict interior Σ (y_i/a_i)² < 1 is infeasible.
struct Ellipse {
    Vec center;
    Vec semi_axes;
    Mat rotation;  // body-from-world; orthonormal
};

/// Vertical cylinder given by its footprint in the first two axes. A finite
/// [z_lo, z_hi] span on the third axis caps it; the defaults keep it
/// infinite, and states without a third axis ignore the span.
struct Cylinder {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 1.0;
    double z_lo = -std::numeric_limits<double>::infinity();
    double z_hi = std::numeric_limits<double>::infinity();
};

struct EllipseUnion {
    std::vector<Ellipse> components;
};

struct CylinderSet {
    std::vector<Cylinder> components;
};

/// Per-axis speed limits on the action; |v_i| > limits[i] is infeasible.
struct VelocityBox {
    Vec limits;
};

/// coeff·state ≤ offset is infeasible.
struct SyntheticHalfspace {
    Vec coeff;
    double offset = 0.0;
};

using TrueConstraint = std::variant<EllipseUnion, CylinderSet, VelocityBox, SyntheticHalfspace>;

/// Exact geometric membership. Obstacle boundaries are feasible (strict
/// interior infeasible); the halfspace includes its boundary.
bool is_truly_infeasible(const TrueConstraint& tc, const StateAction& sa);

/// Closest-component distance field of a position obstacle, for policies
/// that mask against the true geometry. gamma is 1 on the (margin-inflated)
/// boundary, < 1 inside, growing outward; normal is the unit outward
/// gradient (zero when degenerate); reference anchors the component
/// (ellipse center, nearest cylinder-axis point).
struct AnalyticEval {
    double gamma = std::numeric_limits<double>::infinity();
    Vec normal;
    Vec reference;
};

bool has_position_geometry(const TrueConstraint& tc);

/// Evaluates the smallest-gamma component with semi-axes/radius inflated by
/// `margin`. Requires position geometry (ellipses or cylinders); throws
/// otherwise. An empty component list yields gamma = +inf and a zero normal.
AnalyticEval analytic_eval(const TrueConstraint& tc, const Vec& s, double margin = 0.0);

}  // namespace pucl
