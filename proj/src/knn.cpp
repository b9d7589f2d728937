#include "pucl/knn.hpp"

#include <algorithm>
#include <cmath>

namespace pucl {

double point_distance(const double* a, const double* b, int dim, Metric metric) {
    switch (metric) {
        case Metric::Euclidean: {
            double s = 0.0;
            for (int d = 0; d < dim; ++d) {
                const double diff = a[d] - b[d];
                s += diff * diff;
            }
            return std::sqrt(s);
        }
        case Metric::Manhattan: {
            double s = 0.0;
            for (int d = 0; d < dim; ++d) s += std::abs(a[d] - b[d]);
            return s;
        }
        case Metric::Chebyshev: {
            double m = 0.0;
            for (int d = 0; d < dim; ++d) m = std::max(m, std::abs(a[d] - b[d]));
            return m;
        }
    }
    return 0.0;
}

namespace {

double score_one(const double* q, const Dataset& refs, int k, Metric metric,
                 std::vector<double>& scratch) {
    scratch.clear();
    for (std::size_t j = 0; j < refs.size(); ++j)
        scratch.push_back(point_distance(q, refs.row(j), refs.dim(), metric));
    std::partial_sort(scratch.begin(), scratch.begin() + k, scratch.end());
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += scratch[i];
    return sum / static_cast<double>(k);
}

void check(const Dataset& refs, int k) {
    if (k < 1) throw std::invalid_argument("knn_score: k must be >= 1");
    if (refs.size() < static_cast<std::size_t>(k))
        throw std::invalid_argument("knn_score: reference set has " +
                                    std::to_string(refs.size()) + " points, fewer than k=" +
                                    std::to_string(k));
}

}  // namespace

double knn_score(const Vec& query, const Dataset& refs, int k, Metric metric) {
    check(refs, k);
    if (query.size() != refs.dim()) throw std::invalid_argument("knn_score: dimension mismatch");
    std::vector<double> scratch;
    return score_one(query.data(), refs, k, metric, scratch);
}

std::vector<double> knn_scores_serial(const Dataset& queries, const Dataset& refs, int k,
                                      Metric metric) {
    check(refs, k);
    std::vector<double> out(queries.size());
    std::vector<double> scratch;
    for (std::size_t i = 0; i < queries.size(); ++i)
        out[i] = score_one(queries.row(i), refs, k, metric, scratch);
    return out;
}

std::vector<double> knn_scores(const Dataset& queries, const Dataset& refs, int k, Metric metric) {
    check(refs, k);
    std::vector<double> out(queries.size());
#pragma omp parallel
    {
        std::vector<double> scratch;
#pragma omp for schedule(static)
        for (long long i = 0; i < static_cast<long long>(queries.size()); ++i)
            out[i] = score_one(queries.row(i), refs, k, metric, scratch);
    }
    return out;
}

}  // namespace pucl
