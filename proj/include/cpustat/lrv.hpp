#pragma once

#include <functional>
#include <optional>
#include <string>

#include "cpustat/core.hpp"

namespace cpustat::lrv {

enum class LrvMethod { Ar1Plugin, Ar1PluginDiff, NeweyWest, Subsampling, SpectralZero };

std::string method_name(LrvMethod m);
std::optional<LrvMethod> method_from_name(const std::string& name);

struct LrvEstimate {
    double sigma2 = 0.0;
    LrvMethod method = LrvMethod::Ar1Plugin;
    std::size_t bandwidth = 0;   // NeweyWest / SpectralZero
    std::size_t block_len = 0;   // Subsampling
    std::optional<double> rho_hat, mu_hat, omega2_hat;  // AR(1) routes
    bool clamped = false;  // |rho_hat| hit the 0.99 cap
    bool floored = false;  // estimate raised to the positivity floor
};

struct Ar1Fit {
    double rho_hat = 0.0;
    double mu_hat = 0.0;     // intercept of the AR recursion
    double omega2_hat = 0.0; // innovation variance
};

inline constexpr double kRhoMax = 0.99;
inline constexpr double kPositivityFloor = 1e-12;

// Yule-Walker regression estimates on the series as given:
// rho = sum(X_{t-1}-Xbar)(X_t-Xbar) / sum(X_t-Xbar)^2, mu = Xbar(1-rho),
// omega2 = (1/n) sum_{t=2..n} (X_t - mu - rho X_{t-1})^2.
Ar1Fit yule_walker_ar1(const core::Series& series);

// sigma2 = omega2 / (1 - rho)^2 with |rho| clamped at kRhoMax.
LrvEstimate sigma2_ar1_plugin(const core::Series& series);

// AR(1) moments from first differences d_t = X_{t+1} - X_t:
// E d^2 = 2 g0 (1-rho), E d_t d_{t+1} = -g0 (1-rho)^2, so rho = 1 + 2 m1/m2
// and sigma2 = m2 (1+rho) / (2 (1-rho)^2).  A change point touches O(1)
// differences, so the estimate ignores mean shifts entirely — which is what
// keeps the normalized statistics powered under strong alternatives.
Ar1Fit ar1_diff_moments(const core::Series& series);
LrvEstimate sigma2_ar1_diff(const core::Series& series);

// gamma(0) + 2 sum_{j=1..bandwidth} K(j/bandwidth) gamma(j), autocovariances
// with divisor n; default kernel Bartlett.
LrvEstimate newey_west(const core::Series& proj, std::size_t bandwidth);
LrvEstimate newey_west(const core::Series& proj, std::size_t bandwidth,
                       const std::function<double(double)>& weight_kernel);

// sample variance of sqrt(l) * (non-overlapping block means - grand mean)
LrvEstimate subsampling_variance(const core::Series& proj, std::size_t block_len);

// sum_{|j|<=n-1} w(j) gamma(j); Bartlett weights at `bandwidth` make this
// identical to newey_west by construction.
LrvEstimate spectral_zero(const core::Series& proj, std::size_t bandwidth);
LrvEstimate spectral_zero(const core::Series& proj,
                          const std::function<double(std::size_t)>& weights);

std::size_t default_bandwidth(std::size_t n);  // ceil(1.3 n^{1/3})

// Series the estimator should see: the raw values for the Difference kernel
// (its first-order projection is affine in x), the empirical-CDF transform
// ranks/n for IndicatorLess.
core::Series projection_series(const core::Series& series, const core::KernelSpec& kernel);

// One-stop dispatch used by detection and the experiment harness.
LrvEstimate estimate(const core::Series& series, const core::KernelSpec& kernel, LrvMethod method,
                     std::optional<std::size_t> bandwidth = std::nullopt,
                     std::optional<std::size_t> block_len = std::nullopt);

}  // namespace cpustat::lrv
