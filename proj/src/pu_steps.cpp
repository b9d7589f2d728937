#include "pucl/pu_steps.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>

namespace pucl {

Vec StandardizeRecord::apply(const Vec& x) const {
    Vec out(x.size());
    for (Eigen::Index d = 0; d < x.size(); ++d)
        out[d] = constant[d] ? 0.0 : (x[d] - mean[d]) / std[d];
    return out;
}

Dataset StandardizeRecord::apply(const Dataset& ds) const {
    Dataset out(ds.dim(), ds.provenance());
    for (std::size_t i = 0; i < ds.size(); ++i)
        out.push_back(apply(ds.point(i)), ds.traj_of(i), ds.step_of(i));
    return out;
}

StandardizeRecord standardize_combined(const Dataset& demos, const Dataset& unlabeled,
                                       Dataset& demos_out, Dataset& unlabeled_out) {
    const std::size_t n = demos.size() + unlabeled.size();
    if (n < 2) throw std::invalid_argument("standardize_combined: need at least 2 points");
    const int dim = demos.empty() ? unlabeled.dim() : demos.dim();
    if (!demos.empty() && !unlabeled.empty() && demos.dim() != unlabeled.dim())
        throw std::invalid_argument("standardize_combined: dimension mismatch");

    StandardizeRecord rec;
    rec.mean = Vec::Zero(dim);
    rec.std = Vec::Zero(dim);
    rec.constant.assign(dim, false);

    for (std::size_t i = 0; i < demos.size(); ++i) rec.mean += demos.point(i);
    for (std::size_t i = 0; i < unlabeled.size(); ++i) rec.mean += unlabeled.point(i);
    rec.mean /= static_cast<double>(n);

    for (std::size_t i = 0; i < demos.size(); ++i)
        rec.std += (demos.point(i) - rec.mean).cwiseAbs2();
    for (std::size_t i = 0; i < unlabeled.size(); ++i)
        rec.std += (unlabeled.point(i) - rec.mean).cwiseAbs2();
    rec.std = (rec.std / static_cast<double>(n)).cwiseSqrt();

    for (int d = 0; d < dim; ++d)
        if (rec.std[d] <= 0.0) rec.constant[d] = true;

    demos_out = rec.apply(demos);
    unlabeled_out = rec.apply(unlabeled);
    return rec;
}

ReliableSelection identify_reliable(const Dataset& unlabeled, const Dataset& demos,
                                    const ScoreSpec& spec) {
    if (unlabeled.empty() || demos.empty())
        throw std::invalid_argument("identify_reliable: both P and D must be non-empty");

    ReliableSelection sel;
    if (spec.standardize) {
        Dataset d_std, p_std;
        standardize_combined(demos, unlabeled, d_std, p_std);
        sel.scores = knn_scores(p_std, d_std, spec.k, spec.metric);
    } else {
        sel.scores = knn_scores(unlabeled, demos, spec.k, spec.metric);
    }

    if (spec.mode == ThresholdMode::Absolute) {
        sel.effective_cutoff = spec.distance_threshold;
    } else {
        if (spec.percentile <= 0.0 || spec.percentile >= 100.0)
            throw std::invalid_argument("identify_reliable: percentile must be in (0,100)");
        const std::size_t n = sel.scores.size();
        const auto keep = static_cast<std::size_t>(
            std::floor(spec.percentile * static_cast<double>(n) / 100.0 + 1e-9));
        if (keep == 0) {
            sel.effective_cutoff = std::numeric_limits<double>::infinity();
        } else {
            std::vector<double> sorted = sel.scores;
            std::nth_element(sorted.begin(), sorted.begin() + (keep - 1), sorted.end(),
                             std::greater<double>());
            sel.effective_cutoff = sorted[keep - 1];  // ties at the cutoff all included
        }
    }

    for (std::size_t i = 0; i < sel.scores.size(); ++i)
        if (sel.scores[i] >= sel.effective_cutoff) sel.indices.push_back(i);
    return sel;
}

std::vector<std::size_t> expand_reliable(const std::vector<std::size_t>& reliable,
                                         const Dataset& unlabeled, const ScoreSpec& spec,
                                         const StandardizeRecord* record) {
    if (reliable.empty()) return reliable;  // expansion undefined for an empty set

    const Dataset scored =
        record ? record->apply(unlabeled) : Dataset();  // scoring space, when standardized
    const Dataset& space = record ? scored : unlabeled;

    Dataset rel_set(space.dim(), Provenance::Policy);
    for (std::size_t idx : reliable) rel_set.push_back(space.point(idx));
    const int k = std::min<int>(spec.k, static_cast<int>(rel_set.size()));

    std::vector<double> scores = knn_scores(space, rel_set, k, spec.metric);

    std::vector<bool> already(unlabeled.size(), false);
    for (std::size_t idx : reliable) already[idx] = true;

    // argmin score per trajectory, first-step tie break
    std::map<int, std::size_t> best;
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
        const int t = unlabeled.traj_of(i);
        auto it = best.find(t);
        if (it == best.end() || scores[i] < scores[it->second]) best[t] = i;
    }

    std::vector<std::size_t> out = reliable;
    for (const auto& [t, i] : best)
        if (!already[i]) out.push_back(i);
    return out;
}

std::vector<Trajectory> policy_filter(const std::vector<Trajectory>& rollouts,
                                      const std::vector<Trajectory>& demos, double delta,
                                      FilterForm form) {
    std::vector<Trajectory> kept;
    for (const auto& tau : rollouts) {
        const Trajectory* paired = nullptr;
        for (const auto& d : demos)
            if (d.start_index == tau.start_index) {
                paired = &d;
                break;
            }
        if (!paired)
            throw std::runtime_error("policy_filter: rollout with start index " +
                                     std::to_string(tau.start_index) +
                                     " has no paired demonstration");
        const bool keep = form == FilterForm::HighRewardLiteral
                              ? (1.0 - delta) * tau.cached_return >= paired->cached_return
                              : (1.0 - delta) * paired->cached_return <= tau.cached_return;
        if (keep) kept.push_back(tau);
    }
    return kept;
}

std::string MemoryBuffer::key_of(const Vec& p) {
    std::string key(p.size() * sizeof(double), '\0');
    std::memcpy(key.data(), p.data(), key.size());
    return key;
}

void MemoryBuffer::merge_point(const Vec& p, int iteration) {
    std::string key = key_of(p);
    if (seen_.insert(std::move(key)).second) {
        points_.push_back(p);
        tags_.push_back(iteration);
    }
}

void MemoryBuffer::merge(const Dataset& unlabeled, const std::vector<std::size_t>& reliable,
                         int iteration) {
    for (std::size_t idx : reliable) merge_point(unlabeled.point(idx), iteration);
}

Dataset MemoryBuffer::as_dataset(int dim) const {
    Dataset ds(dim, Provenance::Buffer);
    for (const auto& p : points_) ds.push_back(p);
    return ds;
}

}  // namespace pucl
