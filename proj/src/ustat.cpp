#include "cpustat/ustat.hpp"

#include <cmath>
#include <cstdint>

namespace cpustat::ustat {

double theta_plugin(const core::Series& series, const core::KernelSpec& kernel) {
    if (kernel.antisymmetric) return 0.0;
    const auto& x = series.values();
    const std::size_t n = x.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += kernel.evaluate(x[i], x[j]);
        total += row;
    }
    return total / (static_cast<double>(n) * static_cast<double>(n));
}

double centering_theta(const core::Series& series, const core::KernelSpec& kernel) {
    if (kernel.theta_null) return *kernel.theta_null;
    return theta_plugin(series, kernel);
}

namespace {

double field_scale(std::size_t n) {
    const double d = static_cast<double>(n);
    return 1.0 / (d * std::sqrt(d));
}

// value of the double sum at one tuple for the Difference kernel:
// over segments (a,b] x (b,c], sum (x_i - x_j - theta)
//   = (c-b)(P_b - P_a) - (b-a)(P_c - P_b) - theta (b-a)(c-b)
double difference_tuple_value(const std::vector<double>& prefix, const std::uint32_t* t,
                              std::size_t k, std::size_t n, double theta, double scale) {
    double total = 0.0;
    std::size_t a = 1;
    for (std::size_t l = 0; l < k; ++l) {
        const std::size_t b = t[l];
        const std::size_t c = l + 1 < k ? t[l + 1] : n;
        const double left = prefix[b] - prefix[a];
        const double right = prefix[c] - prefix[b];
        const double nl = static_cast<double>(b - a);
        const double nr = static_cast<double>(c - b);
        total += nr * left - nl * right - theta * nl * nr;
        a = b;
    }
    return total * scale;
}

double brute_tuple_value(const std::vector<double>& x, const core::KernelSpec& kernel,
                         const std::uint32_t* t, std::size_t k, std::size_t n, double theta,
                         double scale) {
    double total = 0.0;
    std::size_t a = 1;
    for (std::size_t l = 0; l < k; ++l) {
        const std::size_t b = t[l];
        const std::size_t c = l + 1 < k ? t[l + 1] : n;
        for (std::size_t i = a + 1; i <= b; ++i)
            for (std::size_t j = b + 1; j <= c; ++j)
                total += kernel.evaluate(x[i - 1], x[j - 1]) - theta;
        a = b;
    }
    return total * scale;
}

ZField run_fast(const core::Series& series, const core::PartitionGrid& grid, double theta,
                bool parallel) {
    const std::size_t n = series.n();
    const std::size_t k = grid.k();
    if (grid.n() != n)
        throw core::GridMismatch("grid built for n=" + std::to_string(grid.n()) +
                                 ", series has n=" + std::to_string(n));
    const auto& x = series.values();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];

    const double scale = field_scale(n);
    const std::int64_t count = static_cast<std::int64_t>(grid.size());
    std::vector<double> values(static_cast<std::size_t>(count));
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < count; ++i)
            values[static_cast<std::size_t>(i)] = difference_tuple_value(
                prefix, grid.tuple(static_cast<std::uint64_t>(i)), k, n, theta, scale);
    } else {
        for (std::int64_t i = 0; i < count; ++i)
            values[static_cast<std::size_t>(i)] = difference_tuple_value(
                prefix, grid.tuple(static_cast<std::uint64_t>(i)), k, n, theta, scale);
    }
    return ZField{grid, std::move(values), theta};
}

}  // namespace

ZField fast_bilinear(const core::Series& series, const core::PartitionGrid& grid, double theta) {
    return run_fast(series, grid, theta, true);
}

ZField fast_bilinear_serial(const core::Series& series, const core::PartitionGrid& grid,
                            double theta) {
    return run_fast(series, grid, theta, false);
}

ZField fast_bilinear(const core::Series& series, const core::KernelSpec& kernel,
                     const core::PartitionGrid& grid, double theta) {
    if (kernel.kind != core::KernelKind::Difference)
        throw core::WrongKernel("prefix-sum reduction only applies to the difference kernel");
    return run_fast(series, grid, theta, true);
}

namespace {

ZField run_generic(const core::Series& series, const core::KernelSpec& kernel,
                   const core::PartitionGrid& grid, double theta, bool parallel) {
    const std::size_t n = series.n();
    const std::size_t k = grid.k();
    if (grid.n() != n)
        throw core::GridMismatch("grid built for n=" + std::to_string(grid.n()) +
                                 ", series has n=" + std::to_string(n));
    const double scale = field_scale(n);
    const std::int64_t count = static_cast<std::int64_t>(grid.size());
    std::vector<double> values(static_cast<std::size_t>(count));
    const auto& x = series.values();
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < count; ++i)
            values[static_cast<std::size_t>(i)] = brute_tuple_value(
                x, kernel, grid.tuple(static_cast<std::uint64_t>(i)), k, n, theta, scale);
    } else {
        for (std::int64_t i = 0; i < count; ++i)
            values[static_cast<std::size_t>(i)] = brute_tuple_value(
                x, kernel, grid.tuple(static_cast<std::uint64_t>(i)), k, n, theta, scale);
    }
    return ZField{grid, std::move(values), theta};
}

}  // namespace

ZField brute_force(const core::Series& series, const core::KernelSpec& kernel,
                   const core::PartitionGrid& grid, double theta) {
    return run_generic(series, kernel, grid, theta, false);
}

ZField z_field(const core::Series& series, const core::KernelSpec& kernel,
               const core::PartitionGrid& grid, double theta) {
    if (kernel.kind == core::KernelKind::Difference) return fast_bilinear(series, grid, theta);
    return run_generic(series, kernel, grid, theta, true);
}

ZField z_field_serial(const core::Series& series, const core::KernelSpec& kernel,
                      const core::PartitionGrid& grid, double theta) {
    if (kernel.kind == core::KernelKind::Difference)
        return fast_bilinear_serial(series, grid, theta);
    return run_generic(series, kernel, grid, theta, false);
}

double ks_statistic(const ZField& field) {
    if (field.values.empty()) throw core::EmptyGrid("empty field");
    double mx = 0.0;
    for (double v : field.values) mx = std::max(mx, std::abs(v));
    return mx;
}

double cv_statistic(const ZField& field) {
    if (field.values.empty()) throw core::EmptyGrid("empty field");
    double sum = 0.0;
    for (double v : field.values) sum += v * v;
    const std::size_t k = field.grid.k();
    double factor = 1.0;
    for (std::size_t l = 0; l < k; ++l)
        factor *= static_cast<double>(field.grid.stride()) / static_cast<double>(field.grid.n());
    return sum * factor;
}

std::pair<double, double> normalize(double t1, double t2, double sigma2) {
    if (!(sigma2 > 0.0)) throw core::NonPositiveVariance("sigma2 = " + std::to_string(sigma2));
    return {t1 / std::sqrt(sigma2), t2 / sigma2};
}

std::vector<std::size_t> locate_changes(const ZField& field) {
    if (field.values.empty()) throw core::EmptyGrid("empty field");
    std::uint64_t best = 0;
    double mx = std::abs(field.values[0]);
    for (std::uint64_t i = 1; i < field.values.size(); ++i) {
        const double v = std::abs(field.values[i]);
        if (v > mx) {  // strict: first (lexicographically smallest) tuple wins ties
            mx = v;
            best = i;
        }
    }
    const std::uint32_t* t = field.grid.tuple(best);
    return std::vector<std::size_t>(t, t + field.grid.k());
}

}  // namespace cpustat::ustat
