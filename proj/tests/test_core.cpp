#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "cpustat/core.hpp"
#include "cpustat/rng.hpp"

using namespace cpustat;

TEST_CASE("series validation accepts the minimal input") {
    const auto s = core::Series::validate({1.0, 2.0, 3.0, 4.0});
    CHECK(s.n() == 4);
    CHECK(s[0] == 1.0);
    CHECK(s[3] == 4.0);
}

TEST_CASE("series validation rejects non-finite values with their index") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    try {
        core::Series::validate({1.0, nan, 3.0, 4.0});
        FAIL("expected NonFinite");
    } catch (const core::NonFinite& e) {
        CHECK(e.index == 1);
    }
    CHECK_THROWS_AS(core::Series::validate({1.0, 2.0, inf, 4.0}), core::NonFinite);
    CHECK_THROWS_AS(core::Series::validate({1.0, 2.0, -inf, 4.0}), core::NonFinite);
}

TEST_CASE("series validation rejects short inputs") {
    try {
        core::Series::validate({1.0, 2.0, 3.0});
        FAIL("expected TooShort");
    } catch (const core::TooShort& e) {
        CHECK(e.n == 3);
    }
    CHECK_THROWS_AS(core::Series::validate({}), core::TooShort);
}

TEST_CASE("canonical kernels match their closed forms on random probes") {
    const auto diff = core::KernelSpec::difference();
    const auto ind = core::KernelSpec::indicator_less();
    CHECK(diff.kind == core::KernelKind::Difference);
    CHECK(ind.kind == core::KernelKind::IndicatorLess);
    CHECK(diff.antisymmetric);
    REQUIRE(diff.theta_null.has_value());
    REQUIRE(ind.theta_null.has_value());
    CHECK(*diff.theta_null == 0.0);
    CHECK(*ind.theta_null == 0.5);

    rng::NormalStream g(123);
    for (int i = 0; i < 1000; ++i) {
        const double x = g.normal() * 3.0, y = g.normal() * 3.0;
        CHECK(diff.evaluate(x, y) == x - y);
        CHECK(ind.evaluate(x, y) == (x < y ? 1.0 : 0.0));
        // antisymmetry within declared tolerance
        CHECK(std::abs(diff.evaluate(x, y) + diff.evaluate(y, x)) <= 1e-12);
    }
    CHECK(ind.evaluate(2.0, 2.0) == 0.0);  // strict inequality on ties
}

TEST_CASE("user-supplied kernels carry the antisymmetry flag and no theta") {
    const auto k = core::KernelSpec::user_supplied(
        [](double x, double y) { return std::sin(x - y); }, true);
    CHECK(k.kind == core::KernelKind::UserSupplied);
    CHECK(k.antisymmetric);
    CHECK_FALSE(k.theta_null.has_value());
    CHECK(k.evaluate(1.0, 0.25) == doctest::Approx(std::sin(0.75)));
}

TEST_CASE("partition grid enumerates all admissible tuples in lex order") {
    const core::PartitionGrid g1(1, 6, 1);
    REQUIRE(g1.size() == 4);  // m in {2,3,4,5}
    for (std::size_t i = 0; i < 4; ++i) CHECK(g1.tuple(i)[0] == i + 2);

    const core::PartitionGrid g2(2, 6, 1);
    REQUIRE(g2.size() == 6);  // C(4,2) pairs from {2,3,4,5}
    const std::vector<std::vector<std::uint32_t>> want{{2, 3}, {2, 4}, {2, 5},
                                                       {3, 4}, {3, 5}, {4, 5}};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(g2.tuple(i)[0] == want[i][0]);
        CHECK(g2.tuple(i)[1] == want[i][1]);
    }
}

TEST_CASE("every grid tuple is strictly inside (1, n) and increasing") {
    for (const std::size_t k : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
        for (const std::size_t stride : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
            const std::size_t n = 17;
            const core::PartitionGrid g(k, n, stride);
            CHECK(g.size() == core::PartitionGrid::count_tuples(k, n, stride));
            std::set<std::vector<std::uint32_t>> seen;
            for (std::uint64_t t = 0; t < g.size(); ++t) {
                const auto* p = g.tuple(t);
                std::uint32_t prev = 1;
                for (std::size_t l = 0; l < k; ++l) {
                    CHECK(p[l] > prev);
                    CHECK(p[l] < n);
                    CHECK((p[l] - 1) % stride == 0);  // lattice {1+s, 1+2s, ...}
                    prev = p[l];
                }
                seen.insert(std::vector<std::uint32_t>(p, p + k));
            }
            CHECK(seen.size() == g.size());  // no duplicates
        }
    }
}

TEST_CASE("stride decimates the lattice") {
    const core::PartitionGrid g(1, 10, 2);
    REQUIRE(g.size() == 4);  // {3,5,7,9}
    CHECK(g.tuple(0)[0] == 3);
    CHECK(g.tuple(3)[0] == 9);
    CHECK(core::PartitionGrid::count_tuples(2, 200, 1) == 19503);  // C(198,2)
}

TEST_CASE("auto stride keeps the tuple count under the cap") {
    CHECK(core::PartitionGrid::auto_stride(2, 200) == 1);
    const std::size_t s = core::PartitionGrid::auto_stride(3, 1000);
    CHECK(s > 1);
    CHECK(core::PartitionGrid::count_tuples(3, 1000, s) <= 2'000'000);
    CHECK(core::PartitionGrid::count_tuples(3, 1000, s - 1) > 2'000'000);
}

TEST_CASE("grid construction rejects bad shapes") {
    CHECK_THROWS_AS(core::PartitionGrid(0, 10, 1), core::BadSpec);
    CHECK_THROWS_AS(core::PartitionGrid(1, 10, 0), core::BadSpec);
    CHECK_THROWS_AS(core::PartitionGrid(2, 4, 1), core::TooShort);  // needs n >= k+3
    CHECK_THROWS_AS(core::PartitionGrid(1, 4, 5), core::EmptyGrid);  // lattice misses (1,4)
}

TEST_CASE("grid copies share storage") {
    const core::PartitionGrid a(2, 50, 1);
    const core::PartitionGrid b = a;  // NOLINT(performance-unnecessary-copy-initialization)
    CHECK(a.tuple(0) == b.tuple(0));  // same underlying pointer
}

TEST_CASE("seeded rng streams are reproducible and decorrelated") {
    rng::NormalStream a(99), b(99), c(100);
    bool all_equal = true, any_equal_c = false;
    for (int i = 0; i < 64; ++i) {
        const double va = a.normal(), vb = b.normal(), vc = c.normal();
        all_equal = all_equal && va == vb;
        any_equal_c = any_equal_c || va == vc;
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal_c);
    CHECK(rng::stream_seed(1, 2) != rng::stream_seed(1, 3));
    CHECK(rng::stream_seed(1, 2) != rng::stream_seed(2, 2));
    CHECK(rng::stream_seed(1, 2) == rng::stream_seed(1, 2));
}

TEST_CASE("normal stream has sane first moments") {
    rng::NormalStream g(4242);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = g.normal();
        s += v;
        s2 += v * v;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
}
