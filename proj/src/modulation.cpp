#include "pucl/modulation.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <numeric>

namespace pucl {

NominalDS NominalDS::to_goal(const Vec& goal) {
    NominalDS ds;
    ds.goal = goal;
    ds.A = -Mat::Identity(goal.size(), goal.size());
    return ds;
}

Vec nominal_velocity(const NominalDS& ds, const Vec& s, const EnvSpec& env) {
    return cap_action(env, ds.velocity(s));
}

Mat tangent_basis(const Vec& n_unit) {
    const Eigen::Index d = n_unit.size();
    Mat basis(d, d - 1);
    Eigen::Index skip = 0;
    n_unit.cwiseAbs().maxCoeff(&skip);

    Eigen::Index col = 0;
    for (Eigen::Index axis = 0; axis < d; ++axis) {
        if (axis == skip) continue;
        Vec e = Vec::Unit(d, axis);
        e -= n_unit.dot(e) * n_unit;
        for (Eigen::Index j = 0; j < col; ++j) e -= basis.col(j).dot(e) * basis.col(j);
        basis.col(col++) = e / e.norm();
    }
    return basis;
}

Mat modulation_from(double gamma, const Vec& n_unit, const Vec& r_dir) {
    const Eigen::Index d = n_unit.size();
    Mat E(d, d);
    E.col(0) = r_dir;
    E.rightCols(d - 1) = tangent_basis(n_unit);

    Vec lambda(d);
    lambda[0] = 1.0 - 1.0 / gamma;
    for (Eigen::Index i = 1; i < d; ++i) lambda[i] = 1.0 + 1.0 / gamma;

    return E * lambda.asDiagonal() * E.partialPivLu().inverse();
}

ModulationField::ModulationField(const ConstraintNet& net, double gamma_floor,
                                 double gamma_ceiling, double gradient_tol)
    : net_(&net), floor_(gamma_floor), ceiling_(gamma_ceiling), tol_(gradient_tol) {}

void ModulationField::build_references(const std::vector<Vec>& buffer_points, double radius,
                                       const StandardizeRecord* record) {
    components_.clear();
    if (buffer_points.empty()) return;

    std::vector<Vec> scored(buffer_points.size());
    for (std::size_t i = 0; i < buffer_points.size(); ++i)
        scored[i] = record ? record->apply(buffer_points[i]) : buffer_points[i];

    // single linkage via union-find
    std::vector<std::size_t> parent(buffer_points.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < scored.size(); ++i)
        for (std::size_t j = i + 1; j < scored.size(); ++j)
            if ((scored[i] - scored[j]).squaredNorm() <= r2) {
                const std::size_t a = find(i), b = find(j);
                if (a != b) parent[b] = a;
            }

    std::vector<std::size_t> root_to_comp(buffer_points.size(), SIZE_MAX);
    std::vector<double> best_zeta;
    for (std::size_t i = 0; i < buffer_points.size(); ++i) {
        const std::size_t root = find(i);
        std::size_t c = root_to_comp[root];
        if (c == SIZE_MAX) {
            c = components_.size();
            root_to_comp[root] = c;
            components_.push_back({{}, buffer_points[i]});
            best_zeta.push_back(std::numeric_limits<double>::infinity());
        }
        components_[c].members.push_back(buffer_points[i]);
        const double z = net_->predict(buffer_points[i]);
        if (z < best_zeta[c]) {
            best_zeta[c] = z;
            components_[c].reference = buffer_points[i];
        }
    }
}

double ModulationField::gamma_of_zeta(double z) const {
    if (z < 0.5) return 1.0 + floor_;
    const double g = 1.0 + 10.0 * std::pow(z - 0.5, 0.2);
    return std::min(g, ceiling_);
}

FieldEval ModulationField::evaluate(const Vec& s) const {
    FieldEval ev;
    ev.gamma = gamma(s);
    Vec n = net_->input_gradient(s);
    const double nn = n.norm();
    if (nn <= tol_) {
        ev.degenerate = true;
        ev.normal = Vec::Zero(s.size());
        ev.r_dir = ev.normal;
        degenerate_.fetch_add(1, std::memory_order_relaxed);
        if (!warned_.exchange(true))
            std::cerr << "[modulation] degenerate classifier gradient; using identity\n";
        return ev;
    }
    ev.normal = n / nn;

    ev.r_dir = ev.normal;
    if (!components_.empty()) {
        double best = std::numeric_limits<double>::infinity();
        const ObstacleComponent* nearest = nullptr;
        for (const auto& comp : components_)
            for (const auto& m : comp.members) {
                const double d2 = (s - m).squaredNorm();
                if (d2 < best) {
                    best = d2;
                    nearest = &comp;
                }
            }
        Vec r = s - nearest->reference;
        const double rn = r.norm();
        if (rn > tol_) {
            r /= rn;
            // keep E invertible: fall back to the normal when r is tangent
            if (std::abs(r.dot(ev.normal)) > 1e-6) ev.r_dir = r;
        }
    }
    return ev;
}

Mat ModulationField::modulation_matrix(const Vec& s) const {
    const FieldEval ev = evaluate(s);
    if (ev.degenerate) return Mat::Identity(s.size(), s.size());
    return modulation_from(ev.gamma, ev.normal, ev.r_dir);
}

Vec ModulationField::modulated_velocity(const Vec& s, const Vec& velocity) const {
    return modulation_matrix(s) * velocity;
}

AnalyticField::AnalyticField(TrueConstraint tc, double margin, double gradient_tol)
    : tc_(std::move(tc)), margin_(margin), tol_(gradient_tol) {}

FieldEval AnalyticField::evaluate(const Vec& s) const {
    const AnalyticEval ae = analytic_eval(tc_, s, margin_);
    FieldEval ev;
    if (!std::isfinite(ae.gamma) || ae.normal.norm() <= tol_) {
        ev.degenerate = true;
        ev.gamma = std::numeric_limits<double>::infinity();
        ev.normal = Vec::Zero(s.size());
        ev.r_dir = ev.normal;
        return ev;
    }
    ev.gamma = std::max(ae.gamma, 0.1);  // keep eigenvalues bounded inside
    ev.normal = ae.normal;
    Vec r = s - ae.reference;
    const double rn = r.norm();
    ev.r_dir = (rn > tol_ && std::abs(r.dot(ev.normal) / rn) > 1e-6) ? Vec(r / rn) : ev.normal;
    return ev;
}

Mat AnalyticField::modulation_matrix(const Vec& s) const {
    const FieldEval ev = evaluate(s);
    if (ev.degenerate) return Mat::Identity(s.size(), s.size());
    return modulation_from(ev.gamma, ev.normal, ev.r_dir);
}

Vec AnalyticField::modulated_velocity(const Vec& s, const Vec& velocity) const {
    return modulation_matrix(s) * velocity;
}

}  // namespace pucl
