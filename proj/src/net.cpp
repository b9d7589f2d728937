#include "pucl/net.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pucl/text_io.hpp"

namespace pucl {

namespace {

constexpr std::size_t kGradChunks = 64;     // fixed partition, thread-count independent
constexpr std::size_t kPredictChunk = 2048; // rows per forward chunk

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRows = Eigen::Map<const RowMat>;

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double clip_prob(double p, double eps) { return std::min(std::max(p, eps), 1.0 - eps); }

}  // namespace

ConstraintNet::ConstraintNet(int input_dim, const std::vector<int>& hidden_widths,
                             double leaky_slope, Rng& rng)
    : input_dim_(input_dim), leaky_slope_(leaky_slope) {
    std::vector<int> widths;
    widths.push_back(input_dim);
    for (int h : hidden_widths) widths.push_back(h);
    widths.push_back(1);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const int fan_in = widths[l];
        const int fan_out = widths[l + 1];
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        Mat w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-bound, bound);
        weights_.push_back(std::move(w));
        biases_.push_back(Vec::Zero(fan_out));
    }
}

double ConstraintNet::predict(const Vec& x) const {
    if (x.size() != input_dim_)
        throw std::invalid_argument("ConstraintNet::predict: input dimension " +
                                    std::to_string(x.size()) + " != " + std::to_string(input_dim_));
    Vec a = x;
    const int L = layer_count();
    for (int l = 0; l < L; ++l) {
        Vec z = weights_[l] * a + biases_[l];
        if (l + 1 < L) {
            a = z.unaryExpr([s = leaky_slope_](double v) { return v >= 0.0 ? v : s * v; });
        } else {
            return sigmoid(z[0]);
        }
    }
    return 0.0;  // unreachable
}

Vec ConstraintNet::input_gradient(const Vec& x) const {
    if (x.size() != input_dim_)
        throw std::invalid_argument("ConstraintNet::input_gradient: input dimension mismatch");
    const int L = layer_count();
    std::vector<Vec> pre(L);  // pre-activations
    Vec a = x;
    for (int l = 0; l < L; ++l) {
        pre[l] = weights_[l] * a + biases_[l];
        if (l + 1 < L)
            a = pre[l].unaryExpr([s = leaky_slope_](double v) { return v >= 0.0 ? v : s * v; });
    }
    const double out = sigmoid(pre[L - 1][0]);
    // d out / d z_last; then back through the linear/leaky stack.
    Vec delta = Vec::Constant(1, out * (1.0 - out));
    for (int l = L - 1; l >= 0; --l) {
        Vec g = weights_[l].transpose() * delta;
        if (l == 0) return g;
        delta = g.cwiseProduct(pre[l - 1].unaryExpr(
            [s = leaky_slope_](double v) { return v >= 0.0 ? 1.0 : s; }));
    }
    return Vec();  // unreachable
}

namespace {

/// Forward pass for a block of rows; returns activations per layer
/// (a[0] = input block) and the sigmoid outputs.
struct BlockForward {
    std::vector<RowMat> act;  // act[l]: rows x width_l (post-activation)
    std::vector<RowMat> pre;  // pre[l]: rows x width_{l+1} (pre-activation)
    Eigen::VectorXd out;      // sigmoid outputs
};

BlockForward forward_block(const ConstraintNet& net, const double* pts, std::size_t r0,
                           std::size_t r1) {
    const int d = net.input_dim();
    const int L = net.layer_count();
    const auto n = static_cast<Eigen::Index>(r1 - r0);
    BlockForward f;
    f.act.resize(L);
    f.pre.resize(L);
    f.act[0] = ConstRows(pts + r0 * d, n, d);
    const double slope = net.leaky_slope();
    for (int l = 0; l < L; ++l) {
        f.pre[l].noalias() = f.act[l] * net.weights()[l].transpose();
        f.pre[l].rowwise() += net.biases()[l].transpose();
        if (l + 1 < L) {
            f.act[l + 1] =
                f.pre[l].unaryExpr([slope](double v) { return v >= 0.0 ? v : slope * v; });
        }
    }
    f.out = f.pre[L - 1].col(0).unaryExpr([](double z) { return sigmoid(z); });
    return f;
}

void predict_range(const ConstraintNet& net, const double* pts, std::size_t r0, std::size_t r1,
                   double* out) {
    BlockForward f = forward_block(net, pts, r0, r1);
    for (Eigen::Index i = 0; i < f.out.size(); ++i) out[r0 + i] = f.out[i];
}

}  // namespace

void ConstraintNet::predict_batch_serial(const double* pts, std::size_t n, double* out) const {
    for (std::size_t start = 0; start < n; start += kPredictChunk)
        predict_range(*this, pts, start, std::min(n, start + kPredictChunk), out);
}

void ConstraintNet::predict_batch(const double* pts, std::size_t n, double* out) const {
    const std::size_t chunks = (n + kPredictChunk - 1) / kPredictChunk;
#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < static_cast<long long>(chunks); ++c) {
        const std::size_t r0 = static_cast<std::size_t>(c) * kPredictChunk;
        predict_range(*this, pts, r0, std::min(n, r0 + kPredictChunk), out);
    }
}

bool ConstraintNet::parameters_finite() const {
    for (const auto& w : weights_)
        if (!w.allFinite()) return false;
    for (const auto& b : biases_)
        if (!b.allFinite()) return false;
    return true;
}

namespace {

/// Combined view over the feasible and infeasible pools: rows [0, N) are
/// feasible (label 1), rows [N, N+M) infeasible (label 0).
struct PairView {
    const Dataset& pos;
    const Dataset& neg;
    std::size_t total() const { return pos.size() + neg.size(); }
    const double* row(std::size_t i, int dim) const {
        return i < pos.size() ? pos.row(i) : neg.row(i - pos.size());
    }
    double label(std::size_t i) const { return i < pos.size() ? 1.0 : 0.0; }
};

void check_pair(const ConstraintNet& net, const Dataset& pos, const Dataset& neg) {
    if (pos.empty() && neg.empty())
        throw std::invalid_argument("bce_loss: both datasets are empty");
    if (!pos.empty() && pos.dim() != net.input_dim())
        throw std::invalid_argument("bce_loss: feasible dataset dimension mismatch");
    if (!neg.empty() && neg.dim() != net.input_dim())
        throw std::invalid_argument("bce_loss: infeasible dataset dimension mismatch");
}

/// Loss and parameter gradient over one contiguous index range of the pair
/// view. Gradient blocks must be pre-sized and zeroed. Loss is returned
/// unscaled (caller divides by N+M).
double grad_range(const ConstraintNet& net, const PairView& view, std::size_t r0, std::size_t r1,
                  double eps, std::vector<Mat>& dW, std::vector<Vec>& db) {
    const int d = net.input_dim();
    const int L = net.layer_count();
    const auto n = static_cast<Eigen::Index>(r1 - r0);
    // Gather the range into a dense block (the pair view is two pools).
    RowMat x(n, d);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        std::memcpy(x.row(i).data(), view.row(r0 + i, d), sizeof(double) * d);
        y[i] = view.label(r0 + i);
    }

    const double slope = net.leaky_slope();
    std::vector<RowMat> act(L), pre(L);
    act[0] = x;
    for (int l = 0; l < L; ++l) {
        pre[l].noalias() = act[l] * net.weights()[l].transpose();
        pre[l].rowwise() += net.biases()[l].transpose();
        if (l + 1 < L)
            act[l + 1] = pre[l].unaryExpr([slope](double v) { return v >= 0.0 ? v : slope * v; });
    }

    double loss = 0.0;
    Eigen::VectorXd dz(n);  // dL/d pre-sigmoid, unscaled
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = sigmoid(pre[L - 1](i, 0));
        const double pc = clip_prob(p, eps);
        loss -= y[i] > 0.5 ? std::log(pc) : std::log(1.0 - pc);
        // Gradient of the clipped loss: zero where the clip is active.
        const bool clipped = p <= eps || p >= 1.0 - eps;
        dz[i] = clipped ? 0.0 : (p - y[i]);
    }

    RowMat delta = dz;
    for (int l = L - 1; l >= 0; --l) {
        dW[l].noalias() += delta.transpose() * act[l];
        db[l].noalias() += delta.colwise().sum().transpose();
        if (l > 0) {
            RowMat back = delta * net.weights()[l];
            delta = back.cwiseProduct(pre[l - 1].unaryExpr(
                [slope](double v) { return v >= 0.0 ? 1.0 : slope; }));
        }
    }
    return loss;
}

NetGradient zero_gradient(const ConstraintNet& net) {
    NetGradient g;
    for (int l = 0; l < net.layer_count(); ++l) {
        g.dW.emplace_back(Mat::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
        g.db.emplace_back(Vec::Zero(net.biases()[l].size()));
    }
    return g;
}

}  // namespace

double bce_loss(const ConstraintNet& net, const Dataset& feasible, const Dataset& infeasible,
                double prob_clip) {
    check_pair(net, feasible, infeasible);
    const std::size_t n_pos = feasible.size(), n_neg = infeasible.size();
    std::vector<double> out_pos(n_pos), out_neg(n_neg);
    if (n_pos) net.predict_batch(feasible.raw().data(), n_pos, out_pos.data());
    if (n_neg) net.predict_batch(infeasible.raw().data(), n_neg, out_neg.data());
    double loss = 0.0;
    for (double p : out_pos) loss -= std::log(clip_prob(p, prob_clip));
    for (double p : out_neg) loss -= std::log(1.0 - clip_prob(p, prob_clip));
    return loss / static_cast<double>(n_pos + n_neg);
}

NetGradient bce_gradient_serial(const ConstraintNet& net, const Dataset& feasible,
                                const Dataset& infeasible, double prob_clip) {
    check_pair(net, feasible, infeasible);
    PairView view{feasible, infeasible};
    NetGradient g = zero_gradient(net);
    g.loss = grad_range(net, view, 0, view.total(), prob_clip, g.dW, g.db);
    const double inv = 1.0 / static_cast<double>(view.total());
    g.loss *= inv;
    for (auto& w : g.dW) w *= inv;
    for (auto& b : g.db) b *= inv;
    return g;
}

NetGradient bce_gradient(const ConstraintNet& net, const Dataset& feasible,
                         const Dataset& infeasible, double prob_clip) {
    check_pair(net, feasible, infeasible);
    PairView view{feasible, infeasible};
    const std::size_t total = view.total();
    const std::size_t chunks = std::min<std::size_t>(kGradChunks, total);

    std::vector<NetGradient> partial(chunks);
    std::vector<double> partial_loss(chunks, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < static_cast<long long>(chunks); ++c) {
        const std::size_t r0 = total * c / chunks;
        const std::size_t r1 = total * (c + 1) / chunks;
        partial[c] = zero_gradient(net);
        partial_loss[c] =
            grad_range(net, view, r0, r1, prob_clip, partial[c].dW, partial[c].db);
    }

    // Deterministic reduction: chunk grid is fixed, summed in chunk order.
    NetGradient g = zero_gradient(net);
    for (std::size_t c = 0; c < chunks; ++c) {
        g.loss += partial_loss[c];
        for (int l = 0; l < net.layer_count(); ++l) {
            g.dW[l] += partial[c].dW[l];
            g.db[l] += partial[c].db[l];
        }
    }
    const double inv = 1.0 / static_cast<double>(total);
    g.loss *= inv;
    for (auto& w : g.dW) w *= inv;
    for (auto& b : g.db) b *= inv;
    return g;
}

TrainTrace train_round(ConstraintNet& net, const Dataset& feasible, const Dataset& infeasible,
                       const TrainSpec& spec) {
    check_pair(net, feasible, infeasible);
    if (spec.learning_rate <= 0.0 && spec.learning_rate != 0.0)
        throw std::invalid_argument("train_round: learning rate must be >= 0");

    const std::size_t total = feasible.size() + infeasible.size();
    const std::size_t batch =
        spec.batch_size > 0 ? std::min<std::size_t>(spec.batch_size, total) : total;

    TrainTrace trace;
    double lr = spec.learning_rate;
    double current = bce_loss(net, feasible, infeasible, spec.prob_clip);
    if (!std::isfinite(current))
        throw std::runtime_error("train_round: non-finite loss before training");

    PairView view{feasible, infeasible};
    for (int epoch = 0; epoch < spec.epochs; ++epoch) {
        std::vector<Mat> w_snap = net.weights();
        std::vector<Vec> b_snap = net.biases();

        if (batch == total) {
            NetGradient g = bce_gradient(net, feasible, infeasible, spec.prob_clip);
            for (int l = 0; l < net.layer_count(); ++l) {
                net.weight(l) -= lr * g.dW[l];
                net.bias(l) -= lr * g.db[l];
            }
        } else {
            // Contiguous deterministic mini-batches over the pair view.
            for (std::size_t r0 = 0; r0 < total; r0 += batch) {
                const std::size_t r1 = std::min(total, r0 + batch);
                NetGradient g = zero_gradient(net);
                g.loss = grad_range(net, view, r0, r1, spec.prob_clip, g.dW, g.db);
                const double inv = 1.0 / static_cast<double>(r1 - r0);
                for (int l = 0; l < net.layer_count(); ++l) {
                    net.weight(l) -= lr * inv * g.dW[l];
                    net.bias(l) -= lr * inv * g.db[l];
                }
            }
        }

        const double candidate = bce_loss(net, feasible, infeasible, spec.prob_clip);
        if (!std::isfinite(candidate) || !net.parameters_finite())
            throw std::runtime_error("train_round: training diverged (non-finite loss) at epoch " +
                                     std::to_string(epoch) + ", lr=" + std::to_string(lr));
        if (candidate > current) {
            for (int l = 0; l < net.layer_count(); ++l) {
                net.weight(l) = w_snap[l];
                net.bias(l) = b_snap[l];
            }
            lr *= 0.5;
        } else {
            current = candidate;
        }
        trace.losses.push_back(current);
    }
    trace.final_loss = current;
    trace.final_learning_rate = lr;
    return trace;
}

// -- serialization ---------------------------------------------------------

namespace {
constexpr std::uint64_t kNetMagic = 0x5055434c4e455431ull;  // "PUCLNET1"
}

void ConstraintNet::save_binary(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("save_binary: cannot open " + path);
    auto put = [&f](const void* p, std::size_t n) { f.write(static_cast<const char*>(p), n); };
    put(&kNetMagic, 8);
    const std::uint32_t version = 1;
    put(&version, 4);
    const std::uint32_t layers = static_cast<std::uint32_t>(weights_.size());
    put(&layers, 4);
    const std::uint32_t in = static_cast<std::uint32_t>(input_dim_);
    put(&in, 4);
    for (const auto& w : weights_) {
        const std::uint32_t rows = static_cast<std::uint32_t>(w.rows());
        put(&rows, 4);
    }
    put(&leaky_slope_, 8);
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        const Mat& w = weights_[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                const double v = w(r, c);
                put(&v, 8);
            }
        put(biases_[l].data(), 8 * biases_[l].size());
    }
}

ConstraintNet ConstraintNet::load_binary(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_binary: cannot open " + path);
    auto get = [&f, &path](void* p, std::size_t n) {
        if (!f.read(static_cast<char*>(p), n))
            throw std::runtime_error("load_binary: truncated file " + path);
    };
    std::uint64_t magic = 0;
    get(&magic, 8);
    if (magic != kNetMagic) throw std::runtime_error("load_binary: bad magic in " + path);
    std::uint32_t version = 0, layers = 0, in = 0;
    get(&version, 4);
    if (version != 1) throw std::runtime_error("load_binary: unsupported version");
    get(&layers, 4);
    get(&in, 4);
    std::vector<std::uint32_t> outs(layers);
    for (auto& o : outs) get(&o, 4);

    ConstraintNet net;
    net.input_dim_ = static_cast<int>(in);
    get(&net.leaky_slope_, 8);
    std::uint32_t prev = in;
    for (std::uint32_t l = 0; l < layers; ++l) {
        Mat w(outs[l], prev);
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) get(&w(r, c), 8);
        Vec b(outs[l]);
        get(b.data(), 8 * b.size());
        net.weights_.push_back(std::move(w));
        net.biases_.push_back(std::move(b));
        prev = outs[l];
    }
    return net;
}

void ConstraintNet::save_text(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_text: cannot open " + path);
    f << "pucl-net 1\n";
    f << "input " << input_dim_ << "\n";
    f << "slope " << format_double(leaky_slope_) << "\n";
    f << "layers " << weights_.size() << "\n";
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        const Mat& w = weights_[l];
        f << "layer " << w.rows() << " " << w.cols() << "\n";
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c)
                f << (c ? " " : "") << format_double(w(r, c));
            f << "\n";
        }
        for (Eigen::Index r = 0; r < biases_[l].size(); ++r)
            f << (r ? " " : "") << format_double(biases_[l][r]);
        f << "\n";
    }
}

ConstraintNet ConstraintNet::load_text(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_text: cannot open " + path);
    std::string word;
    int version = 0;
    f >> word >> version;
    if (word != "pucl-net" || version != 1)
        throw std::runtime_error("load_text: bad header in " + path);
    ConstraintNet net;
    std::size_t layers = 0;
    f >> word >> net.input_dim_;
    f >> word >> net.leaky_slope_;
    f >> word >> layers;
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::Index rows = 0, cols = 0;
        f >> word >> rows >> cols;
        Mat w(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) f >> w(r, c);
        Vec b(rows);
        for (Eigen::Index r = 0; r < rows; ++r) f >> b[r];
        if (!f) throw std::runtime_error("load_text: truncated file " + path);
        net.weights_.push_back(std::move(w));
        net.biases_.push_back(std::move(b));
    }
    return net;
}

}  // namespace pucl
