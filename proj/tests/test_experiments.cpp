#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "cpustat/core.hpp"
#include "cpustat/experiments.hpp"

using namespace cpustat;
namespace ex = cpustat::experiments;

namespace {

const nulldist::QuantileTable& reference_table() {
    static const nulldist::QuantileTable table =
        nulldist::simulate_null_quantiles(2, 500, 1000, {0.01, 0.05, 0.10}, 42);
    return table;
}

}  // namespace

TEST_CASE("size under the null is close to nominal") {
    const auto res = ex::empirical_level(0.0, 0.0, 1.0, 200, 200, reference_table(), 7);
    REQUIRE(res.levels == std::vector<double>{0.05});
    CHECK(res.label == "null(0.00,0.00,1.00)");
    CHECK(res.n == 200);
    CHECK(res.replications == 200);
    CHECK(res.seed == 7);
    CHECK(res.lrv_method == "ar1-diff");
    CHECK(res.ks_rate[0] >= 0.01);
    CHECK(res.ks_rate[0] <= 0.12);
    CHECK(res.cv_rate[0] >= 0.01);
    CHECK(res.cv_rate[0] <= 0.12);
    CHECK(res.mean_t1 > 0.0);
    CHECK(res.mean_t2 > 0.0);
}

TEST_CASE("experiments are deterministic in their arguments") {
    const auto a = ex::empirical_level(0.0, 0.3, 1.0, 200, 150, reference_table(), 21);
    const auto b = ex::empirical_level(0.0, 0.3, 1.0, 200, 150, reference_table(), 21);
    CHECK(a.ks_rate == b.ks_rate);
    CHECK(a.cv_rate == b.cv_rate);
    CHECK(a.mean_t1 == b.mean_t1);
    CHECK(a.mean_t2 == b.mean_t2);
}

TEST_CASE("normalized tests are exactly invariant to the innovation scale") {
    // omega = 2 rescales every intermediate quantity by a power of two, so the
    // normalized statistics and hence the decisions match bit for bit
    const auto unit = ex::empirical_level(0.0, 0.0, 1.0, 200, 200, reference_table(), 7);
    const auto wide = ex::empirical_level(0.0, 0.0, 2.0, 200, 200, reference_table(), 7);
    CHECK(unit.ks_rate == wide.ks_rate);
    CHECK(unit.cv_rate == wide.cv_rate);
    CHECK(unit.mean_t1 == wide.mean_t1);
    CHECK(unit.mean_t2 == wide.mean_t2);
}

TEST_CASE("strong mean shifts are detected essentially always") {
    datagen::ScenarioSpec spec;
    spec.tag = datagen::ScenarioTag::MeanMean;
    spec.mu2 = -1.5;
    spec.mu3 = 1.0;
    const auto res = ex::empirical_power(spec, 100, reference_table(), 11);
    CHECK(res.label == "(-1.50,1.00)");
    CHECK(res.ks_rate[0] >= 0.95);
    CHECK(res.cv_rate[0] >= 0.95);
}

TEST_CASE("near-null alternatives reject at roughly the nominal rate") {
    datagen::ScenarioSpec spec;
    spec.tag = datagen::ScenarioTag::MeanMean;
    spec.mu2 = 0.01;
    spec.mu3 = -0.05;
    const auto res = ex::empirical_power(spec, 200, reference_table(), 13);
    CHECK(res.ks_rate[0] <= 0.12);
    CHECK(res.cv_rate[0] <= 0.12);
}

TEST_CASE("power increases along the shift diagonal") {
    auto run = [&](double d) {
        datagen::ScenarioSpec spec;
        spec.tag = datagen::ScenarioTag::MeanMean;
        spec.mu2 = d;
        spec.mu3 = -d;
        return ex::empirical_power(spec, 150, reference_table(), 17);
    };
    const auto weak = run(0.0);
    const auto mid = run(0.5);
    const auto strong = run(1.5);
    CHECK(mid.ks_rate[0] >= weak.ks_rate[0] - 0.05);
    CHECK(strong.ks_rate[0] >= mid.ks_rate[0]);
    CHECK(strong.cv_rate[0] >= mid.cv_rate[0]);
    CHECK(strong.ks_rate[0] >= 0.95);
}

TEST_CASE("rejection rates are monotone in the level") {
    const auto res = ex::empirical_level(0.0, 0.0, 1.0, 200, 200, reference_table(), 19,
                                         lrv::LrvMethod::Ar1PluginDiff, {0.01, 0.05, 0.10});
    REQUIRE(res.levels.size() == 3);
    CHECK(res.ks_rate[0] <= res.ks_rate[1]);
    CHECK(res.ks_rate[1] <= res.ks_rate[2]);
    CHECK(res.cv_rate[0] <= res.cv_rate[1]);
    CHECK(res.cv_rate[1] <= res.cv_rate[2]);
}

TEST_CASE("table emission round-trips through CSV") {
    datagen::ScenarioSpec spec;
    spec.tag = datagen::ScenarioTag::MeanMean;
    spec.mu2 = 0.5;
    spec.mu3 = -0.5;
    std::vector<ex::ExperimentResult> results;
    results.push_back(ex::empirical_level(0.0, 0.0, 1.0, 200, 150, reference_table(), 23,
                                          lrv::LrvMethod::Ar1PluginDiff, {0.01, 0.05, 0.10}));
    results.push_back(ex::empirical_power(spec, 120, reference_table(), 29));

    const std::string csv = ex::emit_table(results, ex::TableFormat::Csv);
    const auto parsed = ex::parse_table_csv(csv);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].label == results[0].label);
    CHECK(parsed[0].levels == results[0].levels);
    CHECK(parsed[0].ks_rate == results[0].ks_rate);
    CHECK(parsed[0].cv_rate == results[0].cv_rate);
    CHECK(parsed[0].mean_t1 == results[0].mean_t1);
    CHECK(parsed[0].mean_t2 == results[0].mean_t2);
    CHECK(parsed[1].seed == 29);
    CHECK(parsed[1].n == 200);
    CHECK(ex::emit_table(parsed, ex::TableFormat::Csv) == csv);

    const std::string md = ex::emit_table(results, ex::TableFormat::Markdown);
    CHECK(md.find('|') != std::string::npos);
    // header, separator, and one row per (result, level) pair
    CHECK(std::count(md.begin(), md.end(), '\n') == 2 + 3 + 1);
}

TEST_CASE("experiment argument validation") {
    const auto& table = reference_table();
    CHECK_THROWS_AS(ex::empirical_level(0.0, 0.0, 1.0, 200, 0, table, 1), core::BadSpec);
    CHECK_THROWS_AS(ex::empirical_level(0.0, 0.0, 1.0, 200, 100, table, 1,
                                        lrv::LrvMethod::Ar1PluginDiff, {1.5}),
                    core::BadSpec);
    CHECK_THROWS_AS(ex::empirical_level(0.0, 0.0, 1.0, 200, 100, table, 1,
                                        lrv::LrvMethod::Ar1PluginDiff, {}),
                    core::BadSpec);
    CHECK_THROWS_AS(ex::empirical_level(0.0, 0.0, 0.0, 200, 100, table, 1), core::BadSpec);
    CHECK_THROWS_AS(ex::empirical_level(0.0, 1.0, 1.0, 200, 100, table, 1), core::BadSpec);
    CHECK_THROWS_AS(ex::emit_table({}, ex::TableFormat::Csv), core::BadSpec);

    datagen::ScenarioSpec bad;
    bad.n = 100;
    CHECK_THROWS_AS(ex::empirical_power(bad, 100, table, 1), core::BadSpec);
}
