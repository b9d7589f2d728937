#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <vector>

#include "pucl/knn.hpp"
#include "pucl/net.hpp"
#include "pucl/rng.hpp"

using namespace pucl;

namespace {

Dataset random_dataset(int n, int dim, Rng& rng) {
    Dataset ds(dim, Provenance::Policy);
    Vec p(dim);
    for (int i = 0; i < n; ++i) {
        for (int d = 0; d < dim; ++d) p[d] = rng.uniform(-1.0, 1.0);
        ds.push_back(p);
    }
    return ds;
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = omp_get_wtime();
        f();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best * 1e3;
}

void report(const char* kernel, int n, double serial_ms, double parallel_ms, double max_diff) {
    std::printf("%-18s n=%-8d serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   max|diff| %g\n",
                kernel, n, serial_ms, parallel_ms, serial_ms / parallel_ms, max_diff);
}

}  // namespace

int main(int argc, char** argv) {
    const bool smoke = argc > 1 && std::strcmp(argv[1], "--smoke") == 0;
    const int scale = smoke ? 8 : 1;
    std::printf("threads: %d\n", omp_get_max_threads());

    Rng rng(4242);
    const int dim = 3;

    {
        const int nq = 20000 / scale, nr = 4000 / scale;
        const Dataset queries = random_dataset(nq, dim, rng);
        const Dataset refs = random_dataset(nr, dim, rng);
        std::vector<double> a, b;
        const double ts = time_best_of(3, [&] { a = knn_scores_serial(queries, refs, 5, Metric::Euclidean); });
        const double tp = time_best_of(3, [&] { b = knn_scores(queries, refs, 5, Metric::Euclidean); });
        double diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::fabs(a[i] - b[i]));
        report("knn_scores", nq, ts, tp, diff);
    }

    Rng init = Rng::substream(7, "bench-net");
    ConstraintNet net(dim, {32, 32}, 0.01, init);

    {
        const int n = 400000 / scale;
        const Dataset pts = random_dataset(n, dim, rng);
        std::vector<double> a(n), b(n);
        const double ts = time_best_of(3, [&] { net.predict_batch_serial(pts.row(0), n, a.data()); });
        const double tp = time_best_of(3, [&] { net.predict_batch(pts.row(0), n, b.data()); });
        double diff = 0.0;
        for (int i = 0; i < n; ++i) diff = std::max(diff, std::fabs(a[i] - b[i]));
        report("predict_batch", n, ts, tp, diff);
    }

    {
        const int nf = 30000 / scale, ni = 30000 / scale;
        const Dataset feas = random_dataset(nf, dim, rng);
        const Dataset infeas = random_dataset(ni, dim, rng);
        NetGradient ga, gb;
        const double ts = time_best_of(3, [&] { ga = bce_gradient_serial(net, feas, infeas, 1e-7); });
        const double tp = time_best_of(3, [&] { gb = bce_gradient(net, feas, infeas, 1e-7); });
        double diff = std::fabs(ga.loss - gb.loss);
        for (std::size_t l = 0; l < ga.dW.size(); ++l) {
            diff = std::max(diff, (ga.dW[l] - gb.dW[l]).cwiseAbs().maxCoeff());
            diff = std::max(diff, (ga.db[l] - gb.db[l]).cwiseAbs().maxCoeff());
        }
        report("bce_gradient", nf + ni, ts, tp, diff);
    }

    return 0;
}
