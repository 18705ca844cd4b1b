#include "cpustat/lrv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cpustat::lrv {

std::string method_name(LrvMethod m) {
    switch (m) {
        case LrvMethod::Ar1Plugin: return "ar1";
        case LrvMethod::Ar1PluginDiff: return "ar1-diff";
        case LrvMethod::NeweyWest: return "newey-west";
        case LrvMethod::Subsampling: return "subsampling";
        case LrvMethod::SpectralZero: return "spectral";
    }
    return "?";
}

std::optional<LrvMethod> method_from_name(const std::string& name) {
    if (name == "ar1") return LrvMethod::Ar1Plugin;
    if (name == "ar1-diff") return LrvMethod::Ar1PluginDiff;
    if (name == "newey-west") return LrvMethod::NeweyWest;
    if (name == "subsampling") return LrvMethod::Subsampling;
    if (name == "spectral") return LrvMethod::SpectralZero;
    return std::nullopt;
}

namespace {

double mean_of(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double clamp_rho(double rho, bool& clamped) {
    if (std::abs(rho) > kRhoMax) {
        clamped = true;
        return std::copysign(kRhoMax, rho);
    }
    return rho;
}

// autocovariance at lag j with divisor n
double autocov(const std::vector<double>& x, double xbar, std::size_t j) {
    const std::size_t n = x.size();
    double s = 0.0;
    for (std::size_t t = 0; t + j < n; ++t) s += (x[t] - xbar) * (x[t + j] - xbar);
    return s / static_cast<double>(n);
}

}  // namespace

Ar1Fit yule_walker_ar1(const core::Series& series) {
    const auto& x = series.values();
    const std::size_t n = x.size();
    const double xbar = mean_of(x);
    double denom = 0.0;
    for (double v : x) denom += (v - xbar) * (v - xbar);
    if (denom == 0.0) throw core::DegenerateSeries("constant series: zero variance denominator");
    double num = 0.0;
    for (std::size_t t = 1; t < n; ++t) num += (x[t - 1] - xbar) * (x[t] - xbar);
    Ar1Fit fit;
    fit.rho_hat = num / denom;
    fit.mu_hat = xbar * (1.0 - fit.rho_hat);
    double rss = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        const double r = x[t] - fit.mu_hat - fit.rho_hat * x[t - 1];
        rss += r * r;
    }
    fit.omega2_hat = rss / static_cast<double>(n);
    return fit;
}

LrvEstimate sigma2_ar1_plugin(const core::Series& series) {
    const Ar1Fit fit = yule_walker_ar1(series);
    LrvEstimate est;
    est.method = LrvMethod::Ar1Plugin;
    est.rho_hat = fit.rho_hat;
    est.mu_hat = fit.mu_hat;
    est.omega2_hat = fit.omega2_hat;
    const double rho = clamp_rho(fit.rho_hat, est.clamped);
    est.sigma2 = fit.omega2_hat / ((1.0 - rho) * (1.0 - rho));
    if (est.sigma2 < kPositivityFloor) {
        est.sigma2 = kPositivityFloor;
        est.floored = true;
    }
    return est;
}

Ar1Fit ar1_diff_moments(const core::Series& series) {
    const auto& x = series.values();
    const std::size_t n = x.size();
    double m2 = 0.0, m1 = 0.0;
    for (std::size_t t = 0; t + 1 < n; ++t) {
        const double d = x[t + 1] - x[t];
        m2 += d * d;
    }
    m2 /= static_cast<double>(n - 1);
    if (m2 == 0.0) throw core::DegenerateSeries("constant series: zero difference variance");
    for (std::size_t t = 0; t + 2 < n; ++t)
        m1 += (x[t + 1] - x[t]) * (x[t + 2] - x[t + 1]);
    m1 /= static_cast<double>(n - 2);
    Ar1Fit fit;
    bool clamped = false;
    fit.rho_hat = clamp_rho(1.0 + 2.0 * m1 / m2, clamped);
    fit.mu_hat = mean_of(x) * (1.0 - fit.rho_hat);
    fit.omega2_hat = m2 * (1.0 + fit.rho_hat) / 2.0;  // g0 (1-rho^2) with g0 = m2/(2(1-rho))
    return fit;
}

LrvEstimate sigma2_ar1_diff(const core::Series& series) {
    const Ar1Fit fit = ar1_diff_moments(series);
    LrvEstimate est;
    est.method = LrvMethod::Ar1PluginDiff;
    est.rho_hat = fit.rho_hat;
    est.mu_hat = fit.mu_hat;
    est.omega2_hat = fit.omega2_hat;
    est.clamped = std::abs(fit.rho_hat) >= kRhoMax;
    est.sigma2 = fit.omega2_hat / ((1.0 - fit.rho_hat) * (1.0 - fit.rho_hat));
    if (!(est.sigma2 >= kPositivityFloor)) {
        est.sigma2 = kPositivityFloor;
        est.floored = true;
    }
    return est;
}

LrvEstimate newey_west(const core::Series& proj, std::size_t bandwidth) {
    return newey_west(proj, bandwidth,
                      [](double u) { return std::max(0.0, 1.0 - std::abs(u)); });
}

LrvEstimate newey_west(const core::Series& proj, std::size_t bandwidth,
                       const std::function<double(double)>& weight_kernel) {
    if (bandwidth < 1) throw core::BadBandwidth("bandwidth must be >= 1");
    const auto& x = proj.values();
    const double xbar = mean_of(x);
    double s = autocov(x, xbar, 0);
    const std::size_t top = std::min(bandwidth, x.size() - 1);
    for (std::size_t j = 1; j <= top; ++j)
        s += 2.0 * weight_kernel(static_cast<double>(j) / static_cast<double>(bandwidth)) *
             autocov(x, xbar, j);
    LrvEstimate est;
    est.method = LrvMethod::NeweyWest;
    est.bandwidth = bandwidth;
    est.sigma2 = s;
    if (est.sigma2 < kPositivityFloor) {
        est.sigma2 = kPositivityFloor;
        est.floored = true;
    }
    return est;
}

LrvEstimate subsampling_variance(const core::Series& proj, std::size_t block_len) {
    const std::size_t n = proj.n();
    if (block_len < 2 || block_len > n / 2)
        throw core::BadBlockLength("block length " + std::to_string(block_len) +
                                   " outside [2, n/2]");
    const auto& x = proj.values();
    const std::size_t nb = n / block_len;
    const std::size_t used = nb * block_len;
    double grand = 0.0;
    for (std::size_t i = 0; i < used; ++i) grand += x[i];
    grand /= static_cast<double>(used);

    const double root = std::sqrt(static_cast<double>(block_len));
    std::vector<double> copies(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        double m = 0.0;
        for (std::size_t i = 0; i < block_len; ++i) m += x[b * block_len + i];
        m /= static_cast<double>(block_len);
        copies[b] = root * (m - grand);
    }
    const double cbar = mean_of(copies);
    double var = 0.0;
    for (double c : copies) var += (c - cbar) * (c - cbar);
    var /= static_cast<double>(nb - 1);

    LrvEstimate est;
    est.method = LrvMethod::Subsampling;
    est.block_len = block_len;
    est.sigma2 = var;
    if (est.sigma2 < kPositivityFloor) {
        est.sigma2 = kPositivityFloor;
        est.floored = true;
    }
    return est;
}

LrvEstimate spectral_zero(const core::Series& proj, std::size_t bandwidth) {
    LrvEstimate est = newey_west(proj, bandwidth);
    est.method = LrvMethod::SpectralZero;
    return est;
}

LrvEstimate spectral_zero(const core::Series& proj,
                          const std::function<double(std::size_t)>& weights) {
    if (weights(0) != 1.0) throw core::BadWeights("weights must satisfy w(0) = 1");
    const auto& x = proj.values();
    const double xbar = mean_of(x);
    double s = autocov(x, xbar, 0);
    for (std::size_t j = 1; j < x.size(); ++j) s += 2.0 * weights(j) * autocov(x, xbar, j);
    LrvEstimate est;
    est.method = LrvMethod::SpectralZero;
    est.sigma2 = s;
    if (est.sigma2 < kPositivityFloor) {
        est.sigma2 = kPositivityFloor;
        est.floored = true;
    }
    return est;
}

std::size_t default_bandwidth(std::size_t n) {
    return static_cast<std::size_t>(std::ceil(1.3 * std::cbrt(static_cast<double>(n))));
}

core::Series projection_series(const core::Series& series, const core::KernelSpec& kernel) {
    if (kernel.kind != core::KernelKind::IndicatorLess) return series;
    const auto& x = series.values();
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n);
    for (std::size_t r = 0; r < n; ++r) ranks[order[r]] = static_cast<double>(r + 1) / n;
    return core::Series::validate(std::move(ranks));
}

LrvEstimate estimate(const core::Series& series, const core::KernelSpec& kernel, LrvMethod method,
                     std::optional<std::size_t> bandwidth, std::optional<std::size_t> block_len) {
    const core::Series proj = projection_series(series, kernel);
    switch (method) {
        case LrvMethod::Ar1Plugin: return sigma2_ar1_plugin(proj);
        case LrvMethod::Ar1PluginDiff: return sigma2_ar1_diff(proj);
        case LrvMethod::NeweyWest:
            return newey_west(proj, bandwidth.value_or(default_bandwidth(proj.n())));
        case LrvMethod::Subsampling:
            return subsampling_variance(proj, block_len.value_or(default_bandwidth(proj.n())));
        case LrvMethod::SpectralZero:
            return spectral_zero(proj, bandwidth.value_or(default_bandwidth(proj.n())));
    }
    throw core::Error("unreachable");
}

}  // namespace cpustat::lrv
