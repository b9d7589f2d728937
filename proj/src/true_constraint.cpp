#include "pucl/true_constraint.hpp"

#include <cmath>
#include <stdexcept>

namespace pucl {

namespace {

double ellipse_gamma(const Ellipse& e, const Vec& x, double margin) {
    const Vec y = e.rotation * (x - e.center);
    double g = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double a = e.semi_axes[i] + margin;
        g += (y[i] / a) * (y[i] / a);
    }
    return g;
}

double cylinder_radial(const Cylinder& c, const Vec& x, double margin) {
    const double r = c.radius + margin;
    const double dx = x[0] - c.cx;
    const double dy = x[1] - c.cy;
    return (dx * dx + dy * dy) / (r * r);
}

bool cylinder_capped(const Cylinder& c, const Vec& x) {
    return x.size() >= 3 && std::isfinite(c.z_lo) && std::isfinite(c.z_hi);
}

/// max of the radial and cap level terms: 1 on the (inflated) surface,
/// < 1 strictly inside.
double cylinder_gamma(const Cylinder& c, const Vec& x, double margin) {
    const double radial = cylinder_radial(c, x, margin);
    if (!cylinder_capped(c, x)) return radial;
    const double zc = 0.5 * (c.z_lo + c.z_hi);
    const double half = 0.5 * (c.z_hi - c.z_lo) + margin;
    const double dz = (x[2] - zc) / half;
    return std::max(radial, dz * dz);
}

}  // namespace

bool is_truly_infeasible(const TrueConstraint& tc, const StateAction& sa) {
    return std::visit(
        [&](const auto& v) -> bool {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, EllipseUnion>) {
                for (const auto& e : v.components)
                    if (ellipse_gamma(e, sa.state, 0.0) < 1.0) return true;
                return false;
            } else if constexpr (std::is_same_v<T, CylinderSet>) {
                for (const auto& c : v.components)
                    if (cylinder_gamma(c, sa.state, 0.0) < 1.0) return true;
                return false;
            } else if constexpr (std::is_same_v<T, VelocityBox>) {
                for (Eigen::Index i = 0; i < v.limits.size(); ++i)
                    if (std::abs(sa.action[i]) > v.limits[i]) return true;
                return false;
            } else {
                return v.coeff.dot(sa.state) <= v.offset;
            }
        },
        tc);
}

bool has_position_geometry(const TrueConstraint& tc) {
    return std::holds_alternative<EllipseUnion>(tc) || std::holds_alternative<CylinderSet>(tc);
}

AnalyticEval analytic_eval(const TrueConstraint& tc, const Vec& s, double margin) {
    AnalyticEval best;
    best.normal = Vec::Zero(s.size());
    best.reference = s;

    if (const auto* eu = std::get_if<EllipseUnion>(&tc)) {
        for (const auto& e : eu->components) {
            const double g = ellipse_gamma(e, s, margin);
            if (g >= best.gamma) continue;
            best.gamma = g;
            const Vec y = e.rotation * (s - e.center);
            Vec gy(y.size());
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                const double a = e.semi_axes[i] + margin;
                gy[i] = 2.0 * y[i] / (a * a);
            }
            Vec grad = e.rotation.transpose() * gy;
            const double norm = grad.norm();
            best.normal = norm > 0.0 ? Vec(grad / norm) : Vec(Vec::Zero(s.size()));
            best.reference = e.center;
        }
        return best;
    }
    if (const auto* cs = std::get_if<CylinderSet>(&tc)) {
        for (const auto& c : cs->components) {
            const double g = cylinder_gamma(c, s, margin);
            if (g >= best.gamma) continue;
            best.gamma = g;
            Vec grad = Vec::Zero(s.size());
            if (cylinder_capped(c, s) && g > cylinder_radial(c, s, margin)) {
                grad[2] = s[2] >= 0.5 * (c.z_lo + c.z_hi) ? 1.0 : -1.0;
            } else {
                grad[0] = s[0] - c.cx;
                grad[1] = s[1] - c.cy;
            }
            const double norm = grad.norm();
            best.normal = norm > 0.0 ? Vec(grad / norm) : Vec(Vec::Zero(s.size()));
            best.reference = s;
            best.reference[0] = c.cx;
            best.reference[1] = c.cy;
            if (cylinder_capped(c, s)) best.reference[2] = std::clamp(s[2], c.z_lo, c.z_hi);
        }
        return best;
    }
    throw std::invalid_argument("analytic_eval: constraint has no position geometry");
}

}  // namespace pucl
