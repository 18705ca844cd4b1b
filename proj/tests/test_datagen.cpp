#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cpustat/datagen.hpp"

using namespace cpustat;

TEST_CASE("noiseless single segment emits the fixed point of the recursion") {
    rng::NormalStream g(1);
    const std::vector<datagen::SegmentSpec> segs{{5.0, 0.0, 0.0, 10, 25}};
    const auto [series, changes] = datagen::simulate_piecewise(segs, g);
    CHECK(changes.empty());
    REQUIRE(series.n() == 10);
    for (std::size_t i = 0; i < series.n(); ++i) CHECK(series[i] == 5.0);
}

TEST_CASE("later segments continue the recursion from the last emitted value") {
    rng::NormalStream g(1);
    const std::vector<datagen::SegmentSpec> segs{
        {0.0, 0.0, 0.0, 4, 0},
        {1.0, 0.5, 0.0, 4, 0},  // x_t = 1 + 0.5 x_{t-1}, from 0
    };
    const auto [series, changes] = datagen::simulate_piecewise(segs, g);
    REQUIRE(series.n() == 8);
    CHECK(changes == std::vector<std::size_t>{4});
    CHECK(series[3] == 0.0);
    CHECK(series[4] == 1.0);
    CHECK(series[5] == 1.5);
    CHECK(series[6] == 1.75);
    CHECK(series[7] == 1.875);
}

TEST_CASE("same seed reproduces the path; different seeds do not") {
    const std::vector<datagen::SegmentSpec> segs{{0.0, 0.3, 1.0, 50, 25}};
    rng::NormalStream a(7), b(7), c(8);
    const auto [s1, c1] = datagen::simulate_piecewise(segs, a);
    const auto [s2, c2] = datagen::simulate_piecewise(segs, b);
    const auto [s3, c3] = datagen::simulate_piecewise(segs, c);
    CHECK(s1.values() == s2.values());
    CHECK(s1.values() != s3.values());
}

TEST_CASE("burn-in consumes draws without emitting") {
    const std::vector<datagen::SegmentSpec> with{{0.0, 0.0, 1.0, 10, 5}};
    const std::vector<datagen::SegmentSpec> without{{0.0, 0.0, 1.0, 10, 0}};
    rng::NormalStream a(9), b(9);
    const auto [s1, c1] = datagen::simulate_piecewise(with, a);
    const auto [s2, c2] = datagen::simulate_piecewise(without, b);
    REQUIRE(s1.n() == 10);
    REQUIRE(s2.n() == 10);
    // with rho = 0 the warm-up just advances the stream by five draws
    CHECK(s1[0] != s2[0]);
    CHECK(s1.values() != s2.values());
}

TEST_CASE("segment validation") {
    rng::NormalStream g(1);
    using V = std::vector<datagen::SegmentSpec>;
    CHECK_THROWS_AS(datagen::simulate_piecewise(V{}, g), core::BadSpec);
    CHECK_THROWS_AS(datagen::simulate_piecewise(V{{0.0, 1.0, 1.0, 10, 0}}, g), core::BadSpec);
    CHECK_THROWS_AS(datagen::simulate_piecewise(V{{0.0, -1.0, 1.0, 10, 0}}, g), core::BadSpec);
    CHECK_THROWS_AS(datagen::simulate_piecewise(V{{0.0, 0.0, -0.5, 10, 0}}, g), core::BadSpec);
    CHECK_THROWS_AS(datagen::simulate_piecewise(V{{0.0, 0.0, 1.0, 0, 0}}, g), core::BadSpec);
}

TEST_CASE("stationary AR(1) segment matches its moments") {
    rng::NormalStream g(2024);
    const double rho = 0.5;
    const std::vector<datagen::SegmentSpec> segs{{0.0, rho, 1.0, 20000, 500}};
    const auto [series, changes] = datagen::simulate_piecewise(segs, g);
    double mean = 0.0;
    for (std::size_t i = 0; i < series.n(); ++i) mean += series[i];
    mean /= static_cast<double>(series.n());
    double var = 0.0, lag1 = 0.0;
    for (std::size_t i = 0; i < series.n(); ++i) {
        var += (series[i] - mean) * (series[i] - mean);
        if (i) lag1 += (series[i] - mean) * (series[i - 1] - mean);
    }
    var /= static_cast<double>(series.n());
    lag1 /= static_cast<double>(series.n() - 1);
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0 / (1.0 - rho * rho)) < 0.08);
    CHECK(std::abs(lag1 / var - rho) < 0.05);
}

TEST_CASE("scenario layouts share the 75/75/50 pattern with changes at 75 and 150") {
    for (const auto tag : {datagen::ScenarioTag::MeanMean, datagen::ScenarioTag::MeanMeanAR,
                           datagen::ScenarioTag::MeanAutocorr, datagen::ScenarioTag::MeanVariance}) {
        datagen::ScenarioSpec spec;
        spec.tag = tag;
        spec.mu2 = 1.0;
        spec.mu3 = -0.8;
        spec.rho3 = 0.4;
        spec.omega3 = 2.0;
        const auto segs = datagen::build_scenario(spec);
        REQUIRE(segs.size() == 3);
        CHECK(segs[0].length == 75);
        CHECK(segs[1].length == 75);
        CHECK(segs[2].length == 50);
        CHECK(segs[0].burn_in == 25);
        CHECK(segs[1].burn_in == 0);
        CHECK(segs[2].burn_in == 0);
        CHECK(segs[0].mu == 0.0);

        rng::NormalStream g(5);
        const auto [series, changes] = datagen::simulate_piecewise(segs, g);
        CHECK(series.n() == 200);
        CHECK(changes == std::vector<std::size_t>{75, 150});
    }
}

TEST_CASE("scenario parameter wiring per tag") {
    datagen::ScenarioSpec spec;
    spec.mu2 = 1.0;
    spec.mu3 = -0.8;
    spec.rho3 = 0.4;
    spec.omega3 = 2.0;

    spec.tag = datagen::ScenarioTag::MeanMean;
    auto segs = datagen::build_scenario(spec);
    CHECK(segs[1].mu == 1.0);
    CHECK(segs[2].mu == -0.8);
    CHECK(segs[0].rho == 0.0);
    CHECK(segs[2].rho == 0.0);
    CHECK(segs[2].omega == 1.0);

    spec.tag = datagen::ScenarioTag::MeanMeanAR;
    segs = datagen::build_scenario(spec);
    CHECK(segs[0].rho == 0.2);
    CHECK(segs[1].rho == 0.2);
    CHECK(segs[2].rho == 0.2);
    CHECK(segs[2].mu == -0.8);

    spec.tag = datagen::ScenarioTag::MeanAutocorr;
    segs = datagen::build_scenario(spec);
    CHECK(segs[0].rho == 0.0);
    CHECK(segs[1].rho == 0.0);
    CHECK(segs[2].rho == 0.4);
    CHECK(segs[2].mu == 1.0);  // third-segment mean rides along with mu2

    spec.tag = datagen::ScenarioTag::MeanVariance;
    segs = datagen::build_scenario(spec);
    CHECK(segs[2].omega == 2.0);
    CHECK(segs[2].rho == 0.0);
    CHECK(segs[2].mu == 1.0);
}

TEST_CASE("scenario labels show the two varying parameters") {
    datagen::ScenarioSpec spec;
    spec.tag = datagen::ScenarioTag::MeanMean;
    spec.mu2 = 1.0;
    spec.mu3 = -0.8;
    CHECK(spec.label() == "(1.00,-0.80)");

    spec.tag = datagen::ScenarioTag::MeanAutocorr;
    spec.mu2 = 0.5;
    spec.rho3 = 0.4;
    CHECK(spec.label() == "(0.50,0.40)");

    spec.tag = datagen::ScenarioTag::MeanVariance;
    spec.omega3 = 2.0;
    CHECK(spec.label() == "(0.50,2.00)");
}

TEST_CASE("scenario layout is pinned to n = 200") {
    datagen::ScenarioSpec spec;
    spec.n = 300;
    CHECK_THROWS_AS(datagen::build_scenario(spec), core::BadSpec);
}

TEST_CASE("tag names are stable") {
    CHECK(datagen::tag_name(datagen::ScenarioTag::MeanMean) == "mean-mean");
    CHECK(datagen::tag_name(datagen::ScenarioTag::MeanMeanAR) == "mean-mean-ar");
    CHECK(datagen::tag_name(datagen::ScenarioTag::MeanAutocorr) == "mean-autocorr");
    CHECK(datagen::tag_name(datagen::ScenarioTag::MeanVariance) == "mean-variance");
}
