#pragma once

#include <atomic>
#include <vector>

#include "pucl/env.hpp"
#include "pucl/net.hpp"
#include "pucl/pu_steps.hpp"
#include "pucl/true_constraint.hpp"
#include "pucl/types.hpp"

namespace pucl {

/// Linear attractor ṡ = A·(s − goal); A defaults to −I so the flow
/// converges to the goal.
struct NominalDS {
    Vec goal;
    Mat A;

    static NominalDS to_goal(const Vec& goal);
    Vec velocity(const Vec& s) const { return A * (s - goal); }
};

/// A·(s − goal) capped to the environment speed limit.
Vec nominal_velocity(const NominalDS& ds, const Vec& s, const EnvSpec& env);

/// Orthonormal completion of a unit normal: columns span its orthogonal
/// complement. Gram-Schmidt over the standard basis, skipping the axis most
/// parallel to the normal (lowest index on ties).
Mat tangent_basis(const Vec& n_unit);

/// M = E·D·E⁻¹ with E = [r_dir | tangent basis of n_unit] and
/// D = diag(1−1/gamma, 1+1/gamma, ..., 1+1/gamma).
Mat modulation_from(double gamma, const Vec& n_unit, const Vec& r_dir);

struct FieldEval {
    double gamma = 1.0;
    Vec normal;  // unit outward; zero when degenerate
    Vec r_dir;   // unit reference direction; zero when degenerate
    bool degenerate = false;
};

/// One learned obstacle component: the buffer points it clusters and the
/// lowest-confidence (lowest ζ) member used as the reference point.
struct ObstacleComponent {
    std::vector<Vec> members;
    Vec reference;
};

/// Learned constraint field. Γ comes from the classifier output, the normal
/// from its input gradient, reference directions from clustered buffer
/// points. Evaluation is read-only and safe to call concurrently.
class ModulationField {
  public:
    explicit ModulationField(const ConstraintNet& net, double gamma_floor = 1e-3,
                             double gamma_ceiling = 1e6, double gradient_tol = 1e-8);

    /// Single-linkage clusters of the buffer points with the given joining
    /// radius. Distances use `record`'s standardized space when provided
    /// (matching the identification scoring space); members and references
    /// stay in raw coordinates. Each cluster's reference is its lowest-ζ
    /// member.
    void build_references(const std::vector<Vec>& buffer_points, double radius,
                          const StandardizeRecord* record = nullptr);
    const std::vector<ObstacleComponent>& components() const { return components_; }

    double zeta(const Vec& s) const { return net_->predict(s); }
    double gamma_of_zeta(double z) const;
    double gamma(const Vec& s) const { return gamma_of_zeta(zeta(s)); }

    FieldEval evaluate(const Vec& s) const;

    /// E·D·E⁻¹ at s; identity (with a logged warning) when the classifier
    /// gradient is degenerate.
    Mat modulation_matrix(const Vec& s) const;
    Vec modulated_velocity(const Vec& s, const Vec& velocity) const;

    long degenerate_count() const { return degenerate_.load(); }

  private:
    const ConstraintNet* net_;
    double floor_;
    double ceiling_;
    double tol_;
    std::vector<ObstacleComponent> components_;
    mutable std::atomic<long> degenerate_{0};
    mutable std::atomic<bool> warned_{false};
};

/// True-geometry counterpart used by scripted experts and known-obstacle
/// masking. gamma is the analytic level value (1 on the inflated boundary),
/// floored away from zero so interior evaluations stay bounded.
class AnalyticField {
  public:
    explicit AnalyticField(TrueConstraint tc, double margin = 0.0, double gradient_tol = 1e-8);

    FieldEval evaluate(const Vec& s) const;
    Mat modulation_matrix(const Vec& s) const;
    Vec modulated_velocity(const Vec& s, const Vec& velocity) const;

  private:
    TrueConstraint tc_;
    double margin_;
    double tol_;
};

}  // namespace pucl
