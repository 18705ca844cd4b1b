#include "cpustat/detect.hpp"

#include <algorithm>
#include <cmath>

#include "cpustat/ustat.hpp"

namespace cpustat::detect {

namespace {

double mc_pvalue(const std::vector<double>& sorted_null, double observed) {
    // (1 + #{samples >= observed}) / (N + 1), conservative Monte Carlo p-value
    const auto it = std::lower_bound(sorted_null.begin(), sorted_null.end(), observed);
    const std::size_t ge = static_cast<std::size_t>(sorted_null.end() - it);
    return static_cast<double>(1 + ge) / static_cast<double>(sorted_null.size() + 1);
}

}  // namespace

core::DetectionReport detect(const core::Series& series, const nulldist::QuantileTable& table,
                             const DetectOptions& options) {
    if (options.k == 0) throw core::BadSpec("k must be >= 1");
    if (table.k != options.k)
        throw core::GridMismatch("quantile table was simulated for k=" + std::to_string(table.k) +
                                 ", detection requested k=" + std::to_string(options.k));
    const std::size_t n = series.n();
    const std::size_t stride =
        options.stride.value_or(core::PartitionGrid::auto_stride(options.k, n));
    core::PartitionGrid grid(options.k, n, stride);

    core::DetectionReport report;
    report.n = n;
    report.k = options.k;
    report.stride = stride;
    report.grid_tuples = grid.size();
    report.lrv_method = lrv::method_name(options.lrv_method);

    const auto& x = series.values();
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*lo == *hi) {
        // constant input: the field is identically zero and no variance scale
        // exists; report the lexicographically smallest tuple and reject nothing
        report.degenerate = true;
        report.argmax_tuple.assign(grid.tuple(0), grid.tuple(0) + options.k);
        for (double level : options.levels)
            report.decisions[level] = core::TestDecision{table.ks_quantile(level),
                                                         table.cv_quantile(level), false, false};
        if (!table.ks_samples.empty()) report.ks_pvalue = mc_pvalue(table.ks_samples, 0.0);
        if (!table.cv_samples.empty()) report.cv_pvalue = mc_pvalue(table.cv_samples, 0.0);
        return report;
    }

    const double theta = ustat::centering_theta(series, options.kernel);
    const ustat::ZField field = ustat::z_field(series, options.kernel, grid, theta);
    report.t1 = ustat::ks_statistic(field);
    report.t2 = ustat::cv_statistic(field);
    report.argmax_tuple = ustat::locate_changes(field);

    const lrv::LrvEstimate est = lrv::estimate(series, options.kernel, options.lrv_method,
                                               options.bandwidth, options.block_len);
    report.sigma2_hat = est.sigma2;
    const auto [t1n, t2n] = ustat::normalize(report.t1, report.t2, est.sigma2);
    report.t1_normalized = t1n;
    report.t2_normalized = t2n;

    for (double level : options.levels) {
        core::TestDecision d;
        d.ks_quantile = table.ks_quantile(level);
        d.cv_quantile = table.cv_quantile(level);
        d.ks_reject = t1n > d.ks_quantile;
        d.cv_reject = t2n > d.cv_quantile;
        report.decisions[level] = d;
    }
    if (!table.ks_samples.empty()) report.ks_pvalue = mc_pvalue(table.ks_samples, t1n);
    if (!table.cv_samples.empty()) report.cv_pvalue = mc_pvalue(table.cv_samples, t2n);
    return report;
}

}  // namespace cpustat::detect
