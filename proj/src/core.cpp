#include "cpustat/core.hpp"

#include <cmath>
#include <limits>

namespace cpustat::core {

Series Series::validate(std::vector<double> raw) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(raw[i])) throw NonFinite(i);
    }
    if (raw.size() < 4) throw TooShort(raw.size(), 4);
    return Series(std::move(raw));
}

KernelSpec KernelSpec::difference() {
    KernelSpec k;
    k.kind = KernelKind::Difference;
    k.evaluate = [](double x, double y) { return x - y; };
    k.antisymmetric = true;
    k.theta_null = 0.0;
    return k;
}

KernelSpec KernelSpec::indicator_less() {
    KernelSpec k;
    k.kind = KernelKind::IndicatorLess;
    k.evaluate = [](double x, double y) { return x < y ? 1.0 : 0.0; };  // ties: h(x,x)=0
    k.antisymmetric = false;
    k.theta_null = 0.5;
    return k;
}

KernelSpec KernelSpec::user_supplied(std::function<double(double, double)> h, bool antisym) {
    KernelSpec k;
    k.kind = KernelKind::UserSupplied;
    k.evaluate = std::move(h);
    k.antisymmetric = antisym;
    k.theta_null = std::nullopt;
    return k;
}

namespace {

// lattice values {1+s, 1+2s, ...} capped at n-1
std::vector<std::uint32_t> lattice(std::size_t n, std::size_t stride) {
    std::vector<std::uint32_t> vals;
    for (std::size_t v = 1 + stride; v <= n - 1; v += stride)
        vals.push_back(static_cast<std::uint32_t>(v));
    return vals;
}

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        const auto t = static_cast<unsigned __int128>(r) * (n - k + i);
        r = static_cast<std::uint64_t>(t / i);  // exact: r holds C(n-k+i, i) at each step
        if (r > cap) return cap + 1;
    }
    return r;
}

}  // namespace

std::uint64_t PartitionGrid::count_tuples(std::size_t k, std::size_t n, std::size_t stride) {
    if (k == 0 || stride == 0 || n < 4) return 0;
    const std::uint64_t lat = n >= 2 + stride ? (n - 2) / stride : 0;
    return binomial_capped(lat, k, std::numeric_limits<std::uint64_t>::max() / 4);
}

std::size_t PartitionGrid::auto_stride(std::size_t k, std::size_t n, std::uint64_t max_tuples) {
    std::size_t s = 1;
    while (count_tuples(k, n, s) > max_tuples) ++s;
    return s;
}

PartitionGrid::PartitionGrid(std::size_t k, std::size_t n, std::size_t stride)
    : k_(k), n_(n), stride_(stride) {
    if (k == 0) throw BadSpec("k must be >= 1");
    if (stride == 0) throw BadSpec("stride must be >= 1");
    if (n < k + 3) throw TooShort(n, k + 3);
    const std::uint64_t count = count_tuples(k, n, stride);
    if (count == 0) throw EmptyGrid("no admissible tuples for k=" + std::to_string(k) +
                                    ", n=" + std::to_string(n) + ", stride=" + std::to_string(stride));
    if (count > 50'000'000)
        throw BadSpec("grid too large (" + std::to_string(count) + " tuples); raise the stride");

    const auto vals = lattice(n, stride);
    auto flat = std::make_shared<std::vector<std::uint32_t>>();
    flat->reserve(static_cast<std::size_t>(count) * k);

    // odometer over k strictly increasing positions into `vals`, lexicographic
    std::vector<std::size_t> pos(k);
    for (std::size_t l = 0; l < k; ++l) pos[l] = l;
    const std::size_t v = vals.size();
    for (bool more = v >= k; more;) {
        for (std::size_t l = 0; l < k; ++l) flat->push_back(vals[pos[l]]);
        more = false;
        for (std::size_t l = k; l-- > 0;) {
            if (pos[l] < v - k + l) {  // room for the k-1-l positions to its right
                ++pos[l];
                for (std::size_t r = l + 1; r < k; ++r) pos[r] = pos[r - 1] + 1;
                more = true;
                break;
            }
        }
    }
    flat_ = std::move(flat);
}

}  // namespace cpustat::core
