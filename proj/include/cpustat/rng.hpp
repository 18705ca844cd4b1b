#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cpustat::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for an independent substream (replication, draw batch, ...) of a
// master seed.  Used by every parallel loop so results do not depend on
// scheduling order or worker count.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// Gaussian stream with a fixed, implementation-independent algorithm.
// std::normal_distribution is implementation-defined, so two standard
// libraries can disagree; mt19937_64 plus an explicit Box-Muller keeps
// output reproducible everywhere.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : eng_(seed) {}

    // uniform on (0, 1]; never 0, so log() below is safe
    double uniform() { return ((eng_() >> 11) + 1.0) * 0x1.0p-53; }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi_ * u2);
    }

private:
    static constexpr double two_pi_ = 6.28318530717958647692528676655900577;
    std::mt19937_64 eng_;
};

}  // namespace cpustat::rng
