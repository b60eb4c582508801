// Serial reference vs OpenMP kernels: correlation matrix and PC skeleton.
#include "causal/pc.hpp"
#include "causal/scm.hpp"
#include "causal/tabular.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#ifdef CAUSAL_USE_OPENMP
#include <omp.h>
#endif

using namespace causal;
using Clock = std::chrono::steady_clock;

static double best_ms(int repeats, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = Clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    }
    return best;
}

int main(int argc, char** argv) {
    const std::size_t rows = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 20000;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
    int threads = 1;
#ifdef CAUSAL_USE_OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("rows=%zu repeats=%d threads=%d\n", rows, repeats, threads);
    std::printf("%-22s %12s %12s %8s %s\n", "kernel", "serial_ms", "parallel_ms", "speedup", "match");

    const auto wide = sample_table(make_scm(random_dag(40, 120, 1), MechanismFamily::linear, 2), rows, 3);
    CorrelationMatrix cs = correlation_matrix_serial(wide), cp = correlation_matrix(wide);
    const double corr_serial = best_ms(repeats, [&] { cs = correlation_matrix_serial(wide); });
    const double corr_parallel = best_ms(repeats, [&] { cp = correlation_matrix(wide); });
    bool same = true;
    for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t j = 0; j < cs.size(); ++j) same = same && cs(i, j) == cp(i, j);
    std::printf("%-22s %12.3f %12.3f %8.2f %s\n", "correlation 40 cols", corr_serial, corr_parallel,
                corr_serial / corr_parallel, same ? "yes" : "NO");

    const auto scm = make_scm(random_dag(12, 20, 4), MechanismFamily::linear, 5);
    const auto table = sample_table(scm, rows, 6);
    const auto corr = correlation_matrix(table);
    const auto oracle = fisher_z_oracle(corr, table.rows(), 0.05);
    Skeleton ss = pc_skeleton(table.columns(), oracle, Execution::serial);
    Skeleton sp = pc_skeleton(table.columns(), oracle, Execution::parallel);
    const double pc_serial = best_ms(repeats, [&] { ss = pc_skeleton(table.columns(), oracle, Execution::serial); });
    const double pc_parallel = best_ms(repeats, [&] { sp = pc_skeleton(table.columns(), oracle, Execution::parallel); });
    std::printf("%-22s %12.3f %12.3f %8.2f %s\n", "pc skeleton 12 nodes", pc_serial, pc_parallel,
                pc_serial / pc_parallel, ss.graph == sp.graph && ss.sepsets.entries() == sp.sepsets.entries() ? "yes" : "NO");
    return same ? 0 : 1;
}
