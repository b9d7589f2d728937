#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "pucl/knn.hpp"
#include "pucl/types.hpp"

namespace pucl {

enum class ThresholdMode { Absolute, Percentile };

/// How unlabeled points are scored and selected as reliable infeasible.
struct ScoreSpec {
    int k = 1;
    Metric metric = Metric::Euclidean;
    ThresholdMode mode = ThresholdMode::Absolute;
    double distance_threshold = 0.0;  // absolute mode
    double percentile = 80.0;         // percentile mode, in (0,100)
    bool standardize = false;         // score in per-dimension standardized space
};

/// Per-dimension affine transform fitted on the combined dataset.
struct StandardizeRecord {
    Vec mean;
    Vec std;                      // population std; 0 where the dimension is constant
    std::vector<bool> constant;   // flagged constant dimensions (mapped to 0)

    Vec apply(const Vec& x) const;
    Dataset apply(const Dataset& ds) const;
};

/// Fits mean/std on D ∪ P (population variance) and returns both sets
/// standardized; constant dimensions map to zero and are flagged.
StandardizeRecord standardize_combined(const Dataset& demos, const Dataset& unlabeled,
                                       Dataset& demos_out, Dataset& unlabeled_out);

/// Reliable infeasible selection: row indices into the unlabeled set plus
/// the effective cutoff score actually applied.
struct ReliableSelection {
    std::vector<std::size_t> indices;  // ascending row order
    std::vector<double> scores;        // score per unlabeled row (scoring space)
    double effective_cutoff = 0.0;
};

/// Scores every unlabeled point against the demonstrations and keeps those
/// with score >= threshold (absolute) or the top X% by score, cutoff ties
/// included (percentile). Standardization, when enabled, is fitted on the
/// combined data and used for scoring only.
ReliableSelection identify_reliable(const Dataset& unlabeled, const Dataset& demos,
                                    const ScoreSpec& spec);

/// Adds, for each unlabeled trajectory, the single step closest to the
/// current reliable set (skipped when the set is empty; at most one point
/// per trajectory). Scoring happens in the same space as identification.
/// Returns the augmented index list (original indices first, then one new
/// index per trajectory that contributed).
std::vector<std::size_t> expand_reliable(const std::vector<std::size_t>& reliable,
                                         const Dataset& unlabeled, const ScoreSpec& spec,
                                         const StandardizeRecord* record);

enum class FilterForm { HighRewardLiteral, SuboptimalityBound };

/// Keeps rollouts at least as rewarding as their paired demonstration:
/// HighRewardLiteral keeps τ iff (1-δ)·r(τ) >= r(τ_demo); SuboptimalityBound
/// keeps τ iff (1-δ)·r(τ_demo) <= r(τ). Pairing is by start index; a rollout
/// with no paired demonstration is a hard error.
std::vector<Trajectory> policy_filter(const std::vector<Trajectory>& rollouts,
                                      const std::vector<Trajectory>& demos, double delta,
                                      FilterForm form = FilterForm::HighRewardLiteral);

/// Append-only pool of identified infeasible points with iteration tags.
/// Duplicates (exact bit equality) are dropped; insertion order is kept so
/// exports are deterministic.
class MemoryBuffer {
  public:
    void merge(const Dataset& unlabeled, const std::vector<std::size_t>& reliable, int iteration);
    void merge_point(const Vec& p, int iteration);

    std::size_t size() const { return points_.size(); }
    const std::vector<Vec>& points() const { return points_; }
    const std::vector<int>& iteration_tags() const { return tags_; }

    /// Flat dataset view (provenance Buffer) for training.
    Dataset as_dataset(int dim) const;

  private:
    static std::string key_of(const Vec& p);
    std::vector<Vec> points_;
    std::vector<int> tags_;
    std::unordered_set<std::string> seen_;
};

}  // namespace pucl
