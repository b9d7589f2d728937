#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pucl/rng.hpp"
#include "pucl/types.hpp"

namespace pucl {

/// Training hyper-parameters for the feasibility classifier.
struct TrainSpec {
    double learning_rate = 5e-3;
    int epochs = 200;
    int batch_size = 0;      // 0 = full batch
    double prob_clip = 1e-7; // probabilities clipped to [eps, 1-eps] before logs
};

/// Accumulated loss gradient, one block per linear layer.
struct NetGradient {
    double loss = 0.0;
    std::vector<Mat> dW;
    std::vector<Vec> db;
};

struct TrainTrace {
    std::vector<double> losses;  // loss after each accepted/reverted epoch
    double final_loss = 0.0;
    double final_learning_rate = 0.0;
};

/// Small feed-forward binary feasibility classifier: leaky-ReLU hidden
/// layers, sigmoid output. Output <= 0.5 marks a generalized state
/// infeasible. Forward, input gradients and parameter gradients are exact.
class ConstraintNet {
  public:
    ConstraintNet() = default;

    /// Glorot-uniform weights, zero biases, drawn in layer order from `rng`.
    ConstraintNet(int input_dim, const std::vector<int>& hidden_widths, double leaky_slope,
                  Rng& rng);

    int input_dim() const { return input_dim_; }
    int layer_count() const { return static_cast<int>(weights_.size()); }
    double leaky_slope() const { return leaky_slope_; }
    const std::vector<Mat>& weights() const { return weights_; }
    const std::vector<Vec>& biases() const { return biases_; }
    Mat& weight(int l) { return weights_[l]; }
    Vec& bias(int l) { return biases_[l]; }

    /// Forward pass; strictly inside (0,1) for finite inputs.
    double predict(const Vec& x) const;

    /// Exact gradient of the scalar output w.r.t. the input vector. At a
    /// leaky-ReLU kink the positive-side slope is used.
    Vec input_gradient(const Vec& x) const;

    /// Batched forward over `n` row-major points. The parallel kernel
    /// partitions rows into fixed chunks evaluated with matrix products, so
    /// results do not depend on the thread count.
    void predict_batch(const double* pts, std::size_t n, double* out) const;
    void predict_batch_serial(const double* pts, std::size_t n, double* out) const;

    bool parameters_finite() const;

    // -- serialization ----------------------------------------------------
    void save_binary(const std::string& path) const;
    static ConstraintNet load_binary(const std::string& path);
    void save_text(const std::string& path) const;
    static ConstraintNet load_text(const std::string& path);

  private:
    friend NetGradient bce_gradient(const ConstraintNet&, const Dataset&, const Dataset&, double);
    friend NetGradient bce_gradient_serial(const ConstraintNet&, const Dataset&, const Dataset&,
                                           double);

    int input_dim_ = 0;
    double leaky_slope_ = 0.01;
    std::vector<Mat> weights_;  // layer l: (out x in)
    std::vector<Vec> biases_;
};

/// Binary cross entropy over feasible points D and infeasible points R∪M,
/// normalized by the combined count. Throws if both sets are empty.
double bce_loss(const ConstraintNet& net, const Dataset& feasible, const Dataset& infeasible,
                double prob_clip);

/// Exact gradient of bce_loss w.r.t. every parameter. The parallel version
/// accumulates per-chunk partials (fixed chunk grid) and sums them in chunk
/// order, so the result is independent of the thread count.
NetGradient bce_gradient(const ConstraintNet& net, const Dataset& feasible,
                         const Dataset& infeasible, double prob_clip);
NetGradient bce_gradient_serial(const ConstraintNet& net, const Dataset& feasible,
                                const Dataset& infeasible, double prob_clip);

/// Plain gradient descent with halve-on-increase backoff: a step that raises
/// the full-dataset loss is reverted and the learning rate halved, so the
/// loss trace is non-increasing. Throws on divergence (non-finite loss).
TrainTrace train_round(ConstraintNet& net, const Dataset& feasible, const Dataset& infeasible,
                       const TrainSpec& spec);

}  // namespace pucl
