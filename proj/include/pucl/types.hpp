#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pucl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One (state, action) pair as produced by an environment step.
struct StateAction {
    Vec state;
    Vec action;
};

/// Ordered state-action sequence rolled out from one demonstration start.
/// `cached_return` is the discounted return computed at rollout time; the
/// environment can recompute it from the steps (see tests).
struct Trajectory {
    std::vector<StateAction> steps;
    int start_index = -1;
    double cached_return = 0.0;

    std::size_t length() const { return steps.size(); }
    bool empty() const { return steps.empty(); }
};

enum class Provenance { Demonstration, Policy, Buffer };

/// Flat, fixed-dimension pool of generalized states (feature vectors).
/// Row-major storage keeps neighbor scans cache friendly. `traj_of` /
/// `step_of` are back-references into the trajectory set the points were
/// flattened from, so a dataset can be regrouped losslessly.
class Dataset {
  public:
    Dataset() = default;
    Dataset(int dim, Provenance prov) : dim_(dim), provenance_(prov) {}

    int dim() const { return dim_; }
    std::size_t size() const { return dim_ > 0 ? values_.size() / dim_ : 0; }
    bool empty() const { return values_.empty(); }
    Provenance provenance() const { return provenance_; }

    const double* row(std::size_t i) const { return values_.data() + i * dim_; }
    double* row(std::size_t i) { return values_.data() + i * dim_; }

    Eigen::Map<const Vec> point(std::size_t i) const {
        return Eigen::Map<const Vec>(row(i), dim_);
    }

    void push_back(const Vec& p, int traj = -1, int step = -1) {
        if (p.size() != dim_) throw std::invalid_argument("Dataset: point dimension mismatch");
        for (int d = 0; d < dim_; ++d) {
            if (!std::isfinite(p[d])) throw std::invalid_argument("Dataset: non-finite entry");
            values_.push_back(p[d]);
        }
        traj_of_.push_back(traj);
        step_of_.push_back(step);
    }

    int traj_of(std::size_t i) const { return traj_of_[i]; }
    int step_of(std::size_t i) const { return step_of_[i]; }

    const std::vector<double>& raw() const { return values_; }

  private:
    int dim_ = 0;
    Provenance provenance_ = Provenance::Policy;
    std::vector<double> values_;
    std::vector<int> traj_of_;
    std::vector<int> step_of_;
};

}  // namespace pucl
