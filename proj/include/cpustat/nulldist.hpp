#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpustat/core.hpp"
#include "cpustat/rng.hpp"

namespace cpustat::nulldist {

// Brownian bridge on the lattice i/m via the normalized partial sum process:
// W0(i/m) = S(i/m) - (i/m) S(1); values[0] = values[m] = 0 exactly.
struct BridgePath {
    std::size_t m = 0;
    std::vector<double> values;  // size m + 1
};

BridgePath simulate_bridge(std::size_t m, rng::NormalStream& g);

// B(t_1..t_k) = sum_l (t_{l+1}-t_l)[W0(t_l)-W0(t_{l-1})]
//             - (t_l-t_{l-1})[W0(t_{l+1})-W0(t_l)], t_0 = 0, t_{k+1} = 1,
// arguments snapped to the lattice by floor(t*m).
double bridge_functional_b(const BridgePath& path, const std::vector<double>& tuple);

// (max |B|, stride^k/m^k * sum B^2) over the simulation tuple lattice
// index_l in [l, m-k+l-2], strictly increasing; for k=2 that is the set
// {(i/m, j/m) : 2 <= j <= m-2, 1 <= i <= j-1}.
std::pair<double, double> path_statistics(const BridgePath& path, std::size_t k,
                                          std::size_t stride);
// same with the deterministic local-alternative drift
// sum_l (t_{l+1}-t_l)(t_l-t_{l-1}) A_l added to B before |.| and ^2
std::pair<double, double> path_statistics_drifted(const BridgePath& path, std::size_t k,
                                                  std::size_t stride,
                                                  const std::vector<double>& shift);

struct QuantileTable {
    std::size_t k = 0, m = 0, replications = 0, stride = 1;
    std::uint64_t seed = 0;
    std::vector<double> levels;  // ascending
    std::vector<double> ks_q, cv_q;
    std::vector<double> ks_samples, cv_samples;  // sorted ascending; empty if not retained

    bool has_level(double level) const;
    double ks_quantile(double level) const;  // tabulated row, or from samples
    double cv_quantile(double level) const;
};

// Upper quantile with linear order-statistic interpolation (R type 7) at
// probability 1 - level; `sorted` ascending.
double empirical_quantile(const std::vector<double>& sorted, double p);

QuantileTable simulate_null_quantiles(std::size_t k, std::size_t m, std::size_t replications,
                                      std::vector<double> levels, std::uint64_t seed,
                                      std::size_t stride = 1);
QuantileTable simulate_null_quantiles_serial(std::size_t k, std::size_t m,
                                             std::size_t replications, std::vector<double> levels,
                                             std::uint64_t seed, std::size_t stride = 1);

// Sorted (ks, cv) samples of the drifted limit; for local power checks.
std::pair<std::vector<double>, std::vector<double>> simulate_alternative_samples(
    std::size_t k, std::size_t m, std::size_t replications, const std::vector<double>& shift,
    std::uint64_t seed, std::size_t stride = 1);

// Covariance kernel of the limiting field, two independent routes.
// Route (a): block transcription over Brownian increment covariances
// min(a,b)*sigma_pr, summed over all (l, j) segment pairs.
double gamma_covariance(const std::vector<double>& s, const std::vector<double>& t, std::size_t k,
                        double s11, double s12, double s22);
// Route (b): bilinear expansion of Cov(B(s), B(t)) from the bridge
// representation, Cov(W0(a), W0(b)) = min(a,b) - ab; unit variance.
double gamma_covariance_bridge(const std::vector<double>& s, const std::vector<double>& t,
                               std::size_t k);

// Nystrom discretization of the covariance operator on midpoint cells of
// the ordered simplex; eigenvalues descending, eigenvectors normalized in
// the cell-weighted discrete L2 inner product.
struct OperatorSpectrum {
    std::size_t k = 0, grid_resolution = 0, n_cells = 0;
    double cell_volume = 0.0;
    double trace = 0.0;                // sum Gamma(c,c) * cell_volume
    std::vector<double> eigenvalues;   // size n_cells, descending
    std::vector<double> eigenvectors;  // column-major n_cells x n_cells; g_j = column j
    std::vector<double> cells;         // n_cells * k coordinates, flat

    double g(std::size_t cell, std::size_t j) const { return eigenvectors[j * n_cells + cell]; }
};

OperatorSpectrum operator_spectrum(std::size_t k, std::size_t grid_resolution,
                                   double sigma2 = 1.0);

// Karhunen-Loeve terms under the drift: pairs (zeta_j, rho_j^2 / zeta_j)
// with rho_j the quadrature of the drift against g_j; terms with
// zeta_j < 1e-10 * zeta_1 dropped.
struct NoncentralTerm {
    double zeta = 0.0;
    double ncp = 0.0;
};
std::vector<NoncentralTerm> local_alternative_shift(std::size_t k, const std::vector<double>& shift,
                                                    const OperatorSpectrum& spectrum);

// Upper quantile of sum zeta_j * chi^2_1(ncp_j) by direct simulation.
double weighted_chisq_quantile(const std::vector<NoncentralTerm>& terms, double level,
                               std::size_t draws, std::uint64_t seed);

// --- serialization & cache ---

std::string to_csv(const QuantileTable& table);               // level,ks,cv rows
std::string to_json_string(const QuantileTable& table);       // meta + quantiles + samples
QuantileTable table_from_json_string(const std::string& text);

std::string cache_key(std::size_t k, std::size_t m, std::size_t replications, std::uint64_t seed,
                      std::size_t stride);
std::optional<QuantileTable> load_cached(const std::filesystem::path& dir, std::size_t k,
                                         std::size_t m, std::size_t replications,
                                         std::uint64_t seed, std::size_t stride);
void store_cached(const std::filesystem::path& dir, const QuantileTable& table);

}  // namespace cpustat::nulldist
