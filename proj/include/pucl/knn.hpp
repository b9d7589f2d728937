#pragma once

#include <vector>

#include "pucl/types.hpp"

namespace pucl {

enum class Metric { Euclidean, Manhattan, Chebyshev };

double point_distance(const double* a, const double* b, int dim, Metric metric);

/// Mean distance to the k nearest points of `refs` (exact linear scan).
/// Throws if refs has fewer than k points.
double knn_score(const Vec& query, const Dataset& refs, int k, Metric metric);

/// Batched scores for every row of `queries` against `refs`. The parallel
/// kernel splits query rows across threads; each score is computed
/// independently, so the output is bit-identical to the serial reference.
std::vector<double> knn_scores(const Dataset& queries, const Dataset& refs, int k, Metric metric);
std::vector<double> knn_scores_serial(const Dataset& queries, const Dataset& refs, int k,
                                      Metric metric);

}  // namespace pucl
