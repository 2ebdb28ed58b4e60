// Compares the serial reference trial loop against the OpenMP trial loop on
// the same workload and verifies that both produce the identical report.
//
// usage: bench [n] [alpha] [d] [trials] [seed] [threads]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "ksmatch/montecarlo.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace ksmatch;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

} // namespace

int main(int argc, char** argv) {
    std::int64_t n = argc > 1 ? std::atoll(argv[1]) : 20000;
    double alpha = argc > 2 ? std::atof(argv[2]) : 0.9;
    int d = argc > 3 ? std::atoi(argv[3]) : 3;
    std::int64_t trials = argc > 4 ? std::atoll(argv[4]) : 16;
    std::uint64_t seed = argc > 5 ? std::strtoull(argv[5], nullptr, 10) : 1;
#ifdef _OPENMP
    int threads = argc > 6 ? std::atoi(argv[6]) : omp_get_max_threads();
#else
    int threads = argc > 6 ? std::atoi(argv[6]) : 1;
#endif

    ModelParams params;
    params.n = n;
    params.m = std::llround(static_cast<double>(n) / alpha);
    params.d = d;
    params.seed = seed;

    std::printf("workload: n=%lld m=%lld d=%d trials=%lld seed=%llu\n\n",
                static_cast<long long>(params.n), static_cast<long long>(params.m),
                d, static_cast<long long>(trials),
                static_cast<unsigned long long>(seed));
    std::printf("%-10s %-8s %-12s %-12s %-8s\n", "mode", "threads", "seconds",
                "trials/s", "speedup");

    auto t0 = clock_type::now();
    const ExperimentReport serial = run_experiment(params, trials, 1);
    const double serial_s = seconds_since(t0);
    std::printf("%-10s %-8d %-12.3f %-12.2f %-8s\n", "serial", 1, serial_s,
                trials / serial_s, "1.00");

    t0 = clock_type::now();
    const ExperimentReport parallel = run_experiment(params, trials, threads);
    const double parallel_s = seconds_since(t0);
    std::printf("%-10s %-8d %-12.3f %-12.2f %-8.2f\n", "openmp", threads,
                parallel_s, trials / parallel_s, serial_s / parallel_s);

    if (!(serial == parallel)) {
        std::printf("\nMISMATCH: parallel report differs from serial reference\n");
        return 1;
    }
    std::printf("\nreports identical across modes\n");
    return 0;
}
