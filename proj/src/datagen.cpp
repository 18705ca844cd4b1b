#include "cpustat/datagen.hpp"

#include <cmath>
#include <cstdio>

namespace cpustat::datagen {

std::string tag_name(ScenarioTag tag) {
    switch (tag) {
        case ScenarioTag::MeanMean: return "mean-mean";
        case ScenarioTag::MeanMeanAR: return "mean-mean-ar";
        case ScenarioTag::MeanAutocorr: return "mean-autocorr";
        case ScenarioTag::MeanVariance: return "mean-variance";
    }
    return "?";
}

std::string ScenarioSpec::label() const {
    char buf[64];
    double a = mu2, b = mu3;
    if (tag == ScenarioTag::MeanAutocorr) b = rho3;
    if (tag == ScenarioTag::MeanVariance) b = omega3;
    std::snprintf(buf, sizeof(buf), "(%.2f,%.2f)", a, b);
    return buf;
}

std::pair<core::Series, std::vector<std::size_t>> simulate_piecewise(
    const std::vector<SegmentSpec>& segments, rng::NormalStream& g) {
    if (segments.empty()) throw core::BadSpec("need at least one segment");
    std::size_t total = 0;
    for (const auto& s : segments) {
        if (!(std::abs(s.rho) < 1.0)) throw core::BadSpec("|rho| must be < 1");
        if (s.omega < 0.0) throw core::BadSpec("omega must be >= 0");
        if (s.length < 1) throw core::BadSpec("segment length must be >= 1");
        total += s.length;
    }

    std::vector<double> out;
    out.reserve(total);
    std::vector<std::size_t> changes;
    double x = 0.0;
    for (std::size_t si = 0; si < segments.size(); ++si) {
        const auto& s = segments[si];
        for (std::size_t i = 0; i < s.burn_in; ++i) x = s.mu + s.rho * x + s.omega * g.normal();
        for (std::size_t i = 0; i < s.length; ++i) {
            x = s.mu + s.rho * x + s.omega * g.normal();
            out.push_back(x);
        }
        if (si + 1 < segments.size()) changes.push_back(out.size());
    }
    return {core::Series::validate(std::move(out)), std::move(changes)};
}

std::vector<SegmentSpec> build_scenario(const ScenarioSpec& spec) {
    if (spec.n != 200) throw core::BadSpec("scenario layout is defined for n = 200");
    const std::size_t burn = 25;
    double mu3 = spec.mu3, rho = 0.0, rho3 = 0.0, omega3 = 1.0;
    switch (spec.tag) {
        case ScenarioTag::MeanMean:
            break;
        case ScenarioTag::MeanMeanAR:
            rho = 0.2;
            rho3 = 0.2;
            break;
        case ScenarioTag::MeanAutocorr:
            mu3 = spec.mu2;
            rho3 = spec.rho3;
            break;
        case ScenarioTag::MeanVariance:
            mu3 = spec.mu2;
            omega3 = spec.omega3;
            break;
        default:
            throw core::UnknownTag("unknown scenario tag");
    }
    return {
        SegmentSpec{0.0, rho, 1.0, 75, burn},
        SegmentSpec{spec.mu2, rho, 1.0, 75, 0},
        SegmentSpec{mu3, rho3, omega3, 50, 0},
    };
}

}  // namespace cpustat::datagen
