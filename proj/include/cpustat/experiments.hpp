#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpustat/datagen.hpp"
#include "cpustat/lrv.hpp"
#include "cpustat/nulldist.hpp"

namespace cpustat::experiments {

struct ExperimentResult {
    std::string label;
    std::size_t n = 0;
    std::size_t replications = 0;
    std::uint64_t seed = 0;
    std::string lrv_method;
    std::vector<double> levels;
    std::vector<double> ks_rate;  // rejection rate per level
    std::vector<double> cv_rate;
    double mean_t1 = 0.0;  // normalized statistics averaged over replications
    double mean_t2 = 0.0;
    double runtime_seconds = 0.0;  // wall clock, not serialized
};

enum class TableFormat { Csv, Markdown };

/// Rejection rate under a homogeneous AR(1) series (no change): size check.
ExperimentResult empirical_level(double mu, double rho, double omega, std::size_t n,
                                 std::size_t replications, const nulldist::QuantileTable& table,
                                 std::uint64_t seed,
                                 lrv::LrvMethod method = lrv::LrvMethod::Ar1PluginDiff,
                                 std::vector<double> levels = {0.05});

/// Rejection rate under a three-segment alternative.
ExperimentResult empirical_power(const datagen::ScenarioSpec& scenario, std::size_t replications,
                                 const nulldist::QuantileTable& table, std::uint64_t seed,
                                 lrv::LrvMethod method = lrv::LrvMethod::Ar1PluginDiff,
                                 std::vector<double> levels = {0.05});

std::string emit_table(const std::vector<ExperimentResult>& results, TableFormat format);

/// Inverse of emit_table(…, Csv); consecutive rows sharing metadata fold into
/// one multi-level result.
std::vector<ExperimentResult> parse_table_csv(const std::string& text);

}  // namespace cpustat::experiments
