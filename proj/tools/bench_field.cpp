// Timing harness for the two hot loops: the Z-field scan over partition
// tuples and the null-quantile Monte Carlo.  Each kernel has a serial twin
// used as a correctness oracle in the tests; this compares their throughput.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cpustat/nulldist.hpp"
#include "cpustat/ustat.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

cpustat::core::Series make_series(std::size_t n, std::uint64_t seed) {
    cpustat::rng::NormalStream g(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = g.normal();
    return cpustat::core::Series::validate(std::move(x));
}

void bench_field(std::size_t n, std::size_t k) {
    const auto series = make_series(n, 7);
    const auto kernel = cpustat::core::KernelSpec::difference();
    const std::size_t stride = cpustat::core::PartitionGrid::auto_stride(k, n);
    const cpustat::core::PartitionGrid grid(k, n, stride);

    const double theta = cpustat::ustat::centering_theta(series, kernel);
    auto t0 = Clock::now();
    const auto serial = cpustat::ustat::z_field_serial(series, kernel, grid, theta);
    const double ts = seconds_since(t0);

    t0 = Clock::now();
    const auto parallel = cpustat::ustat::z_field(series, kernel, grid, theta);
    const double tp = seconds_since(t0);

    double max_diff = 0.0;
    for (std::size_t i = 0; i < serial.values.size(); ++i)
        max_diff = std::max(max_diff, std::abs(serial.values[i] - parallel.values[i]));

    std::printf("z_field      n=%6zu k=%zu tuples=%9zu  serial %8.3fs  parallel %8.3fs  x%.2f  maxdiff %.3g\n",
                n, k, grid.size(), ts, tp, ts / tp, max_diff);
}

void bench_nulldist(std::size_t m, std::size_t reps) {
    auto t0 = Clock::now();
    const auto serial =
        cpustat::nulldist::simulate_null_quantiles_serial(2, m, reps, {0.05}, 42, 1);
    const double ts = seconds_since(t0);

    t0 = Clock::now();
    const auto parallel = cpustat::nulldist::simulate_null_quantiles(2, m, reps, {0.05}, 42, 1);
    const double tp = seconds_since(t0);

    const double diff = std::abs(serial.ks_q[0] - parallel.ks_q[0]) +
                        std::abs(serial.cv_q[0] - parallel.cv_q[0]);
    std::printf("null-table   m=%6zu reps=%5zu             serial %8.3fs  parallel %8.3fs  x%.2f  maxdiff %.3g\n",
                m, reps, ts, tp, ts / tp, diff);
}

}  // namespace

int main(int argc, char** argv) {
    int threads = 0;
    if (argc > 1) threads = std::stoi(argv[1]);
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
    std::printf("openmp max threads: %d\n", omp_get_max_threads());
#else
    (void)threads;
    std::printf("built without openmp\n");
#endif

    bench_field(500, 1);
    bench_field(500, 2);
    bench_field(1500, 2);
    bench_nulldist(500, 200);
    bench_nulldist(1000, 200);
    return 0;
}
