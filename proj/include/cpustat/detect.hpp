#pragma once

#include <optional>
#include <vector>

#include "cpustat/core.hpp"
#include "cpustat/lrv.hpp"
#include "cpustat/nulldist.hpp"

namespace cpustat::detect {

struct DetectOptions {
    std::size_t k = 2;
    core::KernelSpec kernel = core::KernelSpec::difference();
    lrv::LrvMethod lrv_method = lrv::LrvMethod::Ar1PluginDiff;
    std::optional<std::size_t> bandwidth;   // Newey-West / spectral only
    std::optional<std::size_t> block_len;   // subsampling only
    std::optional<std::size_t> stride;      // default: widest stride keeping the grid tractable
    std::vector<double> levels{0.01, 0.05, 0.10};
};

/// Runs both tests against the tabulated null quantiles and reports the
/// argmax tuple of |Z| as the located change points.  A constant input is
/// reported as degenerate: zero statistics, no rejections at any level.
core::DetectionReport detect(const core::Series& series, const nulldist::QuantileTable& table,
                             const DetectOptions& options = {});

}  // namespace cpustat::detect
