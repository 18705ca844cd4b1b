#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cpustat/core.hpp"
#include "cpustat/rng.hpp"

namespace cpustat::datagen {

// One stationary stretch of the piecewise AR(1) recursion
// X_j = mu + rho X_{j-1} + omega eps_j.
struct SegmentSpec {
    double mu = 0.0;
    double rho = 0.0;
    double omega = 1.0;
    std::size_t length = 0;
    std::size_t burn_in = 0;
};

enum class ScenarioTag { MeanMean, MeanMeanAR, MeanAutocorr, MeanVariance };

// The four simulation scenarios: n = 200, changes after observations 75 and
// 150 (fractions 0.375 and 0.75).
struct ScenarioSpec {
    ScenarioTag tag = ScenarioTag::MeanMean;
    double mu2 = 0.0;
    double mu3 = 0.0;    // MeanMean / MeanMeanAR (otherwise mu3 = mu2)
    double rho3 = 0.0;   // MeanAutocorr
    double omega3 = 1.0; // MeanVariance
    std::size_t n = 200;

    std::string label() const;  // e.g. "(1.00,-0.80)" — the two varying parameters
};

std::string tag_name(ScenarioTag tag);

// Runs the segments in order; segment 1 warms up from 0 over its burn_in,
// later segments continue the recursion from the last emitted value (their
// burn_in, normally 0, is consumed inside the recursion without emitting).
// Returns the series plus cumulative change indices (one per boundary).
std::pair<core::Series, std::vector<std::size_t>> simulate_piecewise(
    const std::vector<SegmentSpec>& segments, rng::NormalStream& g);

// Three segments of lengths 75/75/50 with (mu, rho, omega) filled per tag.
std::vector<SegmentSpec> build_scenario(const ScenarioSpec& spec);

}  // namespace cpustat::datagen
