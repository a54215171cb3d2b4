// Benchmark: OpenMP transfer-table kernel vs the serial reference, and the
// parallel replica pool vs a serial loop.  Emits CSV on stdout.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sos/coupling.hpp"
#include "sos/equilibrium.hpp"
#include "sos/experiments.hpp"

using namespace sos;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

} // namespace

int main() {
#ifdef _OPENMP
    int threads = omp_get_max_threads();
#else
    int threads = 1;
#endif
    std::printf("# benchmark threads=%d\n", threads);
    std::printf("workload,n,serial_seconds,parallel_seconds,speedup,agree\n");

    for (int n : {128, 256, 512}) {
        ModelParams p = ModelParams::bounded(n, 0.05, 2 * n);
        auto t0 = clock_type::now();
        TransferTables serial = build_tables_serial(p);
        double ts = seconds_since(t0);
        t0 = clock_type::now();
        TransferTables parallel = build_tables(p);
        double tp = seconds_since(t0);
        bool agree = serial.log_z == parallel.log_z;
        std::printf("transfer_tables,%d,%.6f,%.6f,%.2f,%d\n", n, ts, tp,
                    ts / tp, agree ? 1 : 0);
    }

    {
        const int n = 24, replicas = 64;
        ModelParams p = ModelParams::standard(n, 1.0);
        auto t0 = clock_type::now();
        long long sum_serial = 0;
        for (int r = 0; r < replicas; ++r)
            sum_serial += coalescence_time(ChainKind::column, p,
                                           mix_stream(99, static_cast<std::uint64_t>(r)))
                              .steps;
        double ts = seconds_since(t0);
        t0 = clock_type::now();
        long long sum_parallel = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : sum_parallel)
#endif
        for (int r = 0; r < replicas; ++r)
            sum_parallel += coalescence_time(ChainKind::column, p,
                                             mix_stream(99, static_cast<std::uint64_t>(r)))
                                .steps;
        double tp = seconds_since(t0);
        std::printf("replica_pool,%d,%.6f,%.6f,%.2f,%d\n", n, ts, tp, ts / tp,
                    sum_serial == sum_parallel ? 1 : 0);
    }
    return 0;
}
