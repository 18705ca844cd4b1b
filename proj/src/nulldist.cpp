#include "cpustat/nulldist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

namespace cpustat::nulldist {

BridgePath simulate_bridge(std::size_t m, rng::NormalStream& g) {
    if (m < 2) throw core::BadSpec("bridge resolution m must be >= 2");
    BridgePath path;
    path.m = m;
    path.values.resize(m + 1);
    const double root = std::sqrt(static_cast<double>(m));
    double s = 0.0;
    path.values[0] = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
        s += g.normal();
        path.values[i] = s / root;
    }
    const double s1 = path.values[m];
    for (std::size_t i = 1; i < m; ++i)
        path.values[i] -= (static_cast<double>(i) / static_cast<double>(m)) * s1;
    path.values[m] = 0.0;
    return path;
}

double bridge_functional_b(const BridgePath& path, const std::vector<double>& tuple) {
    const std::size_t k = tuple.size();
    if (k == 0) throw core::BadTuple("empty tuple");
    double prev = 0.0;
    for (double t : tuple) {
        if (!(t > prev) || !(t < 1.0)) throw core::BadTuple("tuple must be strictly increasing in (0,1)");
        prev = t;
    }
    const std::size_t m = path.m;
    // snapped arguments: t -> floor(t*m)/m
    std::vector<std::size_t> idx(k + 2);
    idx[0] = 0;
    for (std::size_t l = 0; l < k; ++l)
        idx[l + 1] = static_cast<std::size_t>(std::floor(tuple[l] * static_cast<double>(m)));
    idx[k + 1] = m;

    double total = 0.0;
    for (std::size_t l = 1; l <= k; ++l) {
        const double t_lo = static_cast<double>(idx[l - 1]) / m;
        const double t_md = static_cast<double>(idx[l]) / m;
        const double t_hi = static_cast<double>(idx[l + 1]) / m;
        const double w_lo = path.values[idx[l - 1]];
        const double w_md = path.values[idx[l]];
        const double w_hi = path.values[idx[l + 1]];
        total += (t_hi - t_md) * (w_md - w_lo) - (t_md - t_lo) * (w_hi - w_md);
    }
    return total;
}

namespace {

struct PathAccum {
    double ks = 0.0;
    double cv = 0.0;
    void add(double v) {
        ks = std::max(ks, std::abs(v));
        cv += v * v;
    }
};

// general-k enumeration over the lattice index_l in {l, l+stride, ...}
// capped at m-k+l-2, strictly increasing across l
void enumerate_tuples(const BridgePath& path, std::size_t k, std::size_t stride,
                      const std::vector<double>* shift, PathAccum& acc) {
    const std::size_t m = path.m;
    std::vector<std::size_t> idx(k);
    std::vector<double> tup(k);
    const double inv_m = 1.0 / static_cast<double>(m);

    // recursive descent without recursion: odometer over lattice positions
    std::vector<std::size_t> step(k, 0);
    std::size_t l = 0;
    while (true) {
        const std::size_t base = l + 1;  // 1-based level l+1 starts at l+1
        std::size_t lo = base + step[l] * stride;
        if (l > 0 && lo <= idx[l - 1]) {
            // advance past the previous coordinate on this lattice
            const std::size_t need = idx[l - 1] + 1 - base;
            step[l] = (need + stride - 1) / stride;
            lo = base + step[l] * stride;
        }
        const std::size_t hi = m - k + (l + 1) - 2;
        if (lo > hi) {
            if (l == 0) break;
            --l;
            ++step[l];
            continue;
        }
        idx[l] = lo;
        tup[l] = static_cast<double>(lo) * inv_m;
        if (l + 1 < k) {
            ++l;
            step[l] = 0;
            continue;
        }
        // full tuple: evaluate B (+drift) directly
        double total = 0.0;
        for (std::size_t q = 0; q < k; ++q) {
            const double t_lo = q == 0 ? 0.0 : tup[q - 1];
            const double t_md = tup[q];
            const double t_hi = q + 1 < k ? tup[q + 1] : 1.0;
            const double w_lo = q == 0 ? 0.0 : path.values[idx[q - 1]];
            const double w_md = path.values[idx[q]];
            const double w_hi = q + 1 < k ? path.values[idx[q + 1]] : 0.0;
            total += (t_hi - t_md) * (w_md - w_lo) - (t_md - t_lo) * (w_hi - w_md);
            if (shift) total += (t_hi - t_md) * (t_md - t_lo) * (*shift)[q];
        }
        acc.add(total);
        ++step[l];
    }
}

std::pair<double, double> path_stats_impl(const BridgePath& path, std::size_t k,
                                          std::size_t stride, const std::vector<double>* shift) {
    const std::size_t m = path.m;
    if (k == 0) throw core::BadSpec("k must be >= 1");
    if (stride == 0) throw core::BadSpec("stride must be >= 1");
    if (m < 2 * k + 2) throw core::BadSpec("bridge resolution too small for k");
    const double inv_m = 1.0 / static_cast<double>(m);
    PathAccum acc;

    if (k == 1) {
        const double a1 = shift ? (*shift)[0] : 0.0;
        for (std::size_t i = 1; i <= m - 2; i += stride) {
            const double t = static_cast<double>(i) * inv_m;
            double v = path.values[i];
            if (shift) v += (1.0 - t) * t * a1;
            acc.add(v);
        }
    } else if (k == 2) {
        const auto& w = path.values;
        const double a1 = shift ? (*shift)[0] : 0.0;
        const double a2 = shift ? (*shift)[1] : 0.0;
        for (std::size_t j = 2; j <= m - 2; j += stride) {
            const double tj = static_cast<double>(j) * inv_m;
            const double wj = w[j];
            const double cj = 2.0 * tj - 1.0;
            for (std::size_t i = 1; i < j; i += stride) {
                const double ti = static_cast<double>(i) * inv_m;
                double v = cj * w[i] + (1.0 - 2.0 * ti) * wj;
                if (shift) v += (tj - ti) * (ti * a1 + (1.0 - tj) * a2);
                acc.add(v);
            }
        }
    } else {
        enumerate_tuples(path, k, stride, shift, acc);
    }

    double factor = 1.0;
    for (std::size_t l = 0; l < k; ++l) factor *= static_cast<double>(stride) * inv_m;
    return {acc.ks, acc.cv * factor};
}

}  // namespace

std::pair<double, double> path_statistics(const BridgePath& path, std::size_t k,
                                          std::size_t stride) {
    return path_stats_impl(path, k, stride, nullptr);
}

std::pair<double, double> path_statistics_drifted(const BridgePath& path, std::size_t k,
                                                  std::size_t stride,
                                                  const std::vector<double>& shift) {
    if (shift.size() != k) throw core::BadSpec("shift must have k components");
    return path_stats_impl(path, k, stride, &shift);
}

double empirical_quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw core::Error("no samples");
    if (!(p > 0.0) || !(p < 1.0)) throw core::BadSpec("quantile probability must be in (0,1)");
    const std::size_t n = sorted.size();
    const double h = p * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

bool QuantileTable::has_level(double level) const {
    for (double l : levels)
        if (std::abs(l - level) < 1e-12) return true;
    return false;
}

namespace {

double tabulated_or_sampled(const std::vector<double>& levels, const std::vector<double>& q,
                            const std::vector<double>& samples, double level) {
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (std::abs(levels[i] - level) < 1e-12) return q[i];
    if (!samples.empty()) return empirical_quantile(samples, 1.0 - level);
    throw core::Error("level " + std::to_string(level) + " not tabulated and no samples retained");
}

}  // namespace

double QuantileTable::ks_quantile(double level) const {
    return tabulated_or_sampled(levels, ks_q, ks_samples, level);
}

double QuantileTable::cv_quantile(double level) const {
    return tabulated_or_sampled(levels, cv_q, cv_samples, level);
}

namespace {

std::vector<double> clean_levels(std::vector<double> levels) {
    for (double l : levels)
        if (!(l > 0.0) || !(l < 1.0)) throw core::BadSpec("levels must lie in (0,1)");
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    if (levels.empty()) throw core::BadSpec("need at least one level");
    return levels;
}

// shared by the simulators: these throw before any parallel region is entered,
// since exceptions cannot cross an OpenMP loop boundary
void validate_lattice_spec(std::size_t k, std::size_t m, std::size_t stride) {
    if (k == 0) throw core::BadSpec("k must be >= 1");
    if (stride == 0) throw core::BadSpec("stride must be >= 1");
    if (m < 2 * k + 2) throw core::BadSpec("bridge resolution too small for k");
}

QuantileTable run_null_simulation(std::size_t k, std::size_t m, std::size_t replications,
                                  std::vector<double> levels, std::uint64_t seed,
                                  std::size_t stride, bool parallel) {
    if (replications < 100) throw core::BadSpec("need at least 100 replications");
    validate_lattice_spec(k, m, stride);
    levels = clean_levels(std::move(levels));

    std::vector<double> ks(replications), cv(replications);
    const std::int64_t reps = static_cast<std::int64_t>(replications);
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t r = 0; r < reps; ++r) {
            rng::NormalStream g(rng::stream_seed(seed, static_cast<std::uint64_t>(r)));
            const BridgePath path = simulate_bridge(m, g);
            const auto [a, b] = path_statistics(path, k, stride);
            ks[static_cast<std::size_t>(r)] = a;
            cv[static_cast<std::size_t>(r)] = b;
        }
    } else {
        for (std::int64_t r = 0; r < reps; ++r) {
            rng::NormalStream g(rng::stream_seed(seed, static_cast<std::uint64_t>(r)));
            const BridgePath path = simulate_bridge(m, g);
            const auto [a, b] = path_statistics(path, k, stride);
            ks[static_cast<std::size_t>(r)] = a;
            cv[static_cast<std::size_t>(r)] = b;
        }
    }
    std::sort(ks.begin(), ks.end());
    std::sort(cv.begin(), cv.end());

    QuantileTable table;
    table.k = k;
    table.m = m;
    table.replications = replications;
    table.stride = stride;
    table.seed = seed;
    table.levels = levels;
    for (double level : levels) {
        table.ks_q.push_back(empirical_quantile(ks, 1.0 - level));
        table.cv_q.push_back(empirical_quantile(cv, 1.0 - level));
    }
    table.ks_samples = std::move(ks);
    table.cv_samples = std::move(cv);
    return table;
}

}  // namespace

QuantileTable simulate_null_quantiles(std::size_t k, std::size_t m, std::size_t replications,
                                      std::vector<double> levels, std::uint64_t seed,
                                      std::size_t stride) {
    return run_null_simulation(k, m, replications, std::move(levels), seed, stride, true);
}

QuantileTable simulate_null_quantiles_serial(std::size_t k, std::size_t m,
                                             std::size_t replications, std::vector<double> levels,
                                             std::uint64_t seed, std::size_t stride) {
    return run_null_simulation(k, m, replications, std::move(levels), seed, stride, false);
}

std::pair<std::vector<double>, std::vector<double>> simulate_alternative_samples(
    std::size_t k, std::size_t m, std::size_t replications, const std::vector<double>& shift,
    std::uint64_t seed, std::size_t stride) {
    validate_lattice_spec(k, m, stride);
    if (shift.size() != k) throw core::BadSpec("shift must have k components");
    std::vector<double> ks(replications), cv(replications);
    const std::int64_t reps = static_cast<std::int64_t>(replications);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t r = 0; r < reps; ++r) {
        rng::NormalStream g(rng::stream_seed(seed, static_cast<std::uint64_t>(r)));
        const BridgePath path = simulate_bridge(m, g);
        const auto [a, b] = path_statistics_drifted(path, k, stride, shift);
        ks[static_cast<std::size_t>(r)] = a;
        cv[static_cast<std::size_t>(r)] = b;
    }
    std::sort(ks.begin(), ks.end());
    std::sort(cv.begin(), cv.end());
    return {std::move(ks), std::move(cv)};
}

// ---------------------------------------------------------------------------
// covariance kernel, spectrum, weighted chi-square
// ---------------------------------------------------------------------------

namespace {

bool in_theta_k(const std::vector<double>& t) {
    double prev = 0.0;
    for (double v : t) {
        if (!(v > prev)) return false;
        prev = v;
    }
    return prev < 1.0;
}

}  // namespace

double gamma_covariance(const std::vector<double>& s, const std::vector<double>& t, std::size_t k,
                        double s11, double s12, double s22) {
    if (s.size() != k || t.size() != k) throw core::BadTuple("tuples must have k coordinates");
    if (!in_theta_k(s) || !in_theta_k(t)) return 0.0;

    std::vector<double> ss(k + 2), tt(k + 2);
    ss[0] = tt[0] = 0.0;
    ss[k + 1] = tt[k + 1] = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        ss[i + 1] = s[i];
        tt[i + 1] = t[i];
    }
    const auto mn = [](double a, double b) { return std::min(a, b); };

    double total = 0.0;
    for (std::size_t l = 1; l <= k; ++l) {
        const double t_hi = tt[l + 1] - tt[l];
        const double t_lo = tt[l] - tt[l - 1];
        for (std::size_t j = 1; j <= k; ++j) {
            const double s_hi = ss[j + 1] - ss[j];
            const double s_lo = ss[j] - ss[j - 1];
            // covariances of Brownian increments over the four corner pairs
            const double a = mn(tt[l], ss[j]) - mn(tt[l], ss[j - 1]) - mn(tt[l - 1], ss[j]) +
                             mn(tt[l - 1], ss[j - 1]);
            const double b = mn(tt[l], ss[j + 1]) - mn(tt[l], ss[j]) - mn(tt[l - 1], ss[j + 1]) +
                             mn(tt[l - 1], ss[j]);
            const double c = mn(tt[l + 1], ss[j]) - mn(tt[l + 1], ss[j - 1]) - mn(tt[l], ss[j]) +
                             mn(tt[l], ss[j - 1]);
            const double d = mn(tt[l + 1], ss[j + 1]) - mn(tt[l + 1], ss[j]) -
                             mn(tt[l], ss[j + 1]) + mn(tt[l], ss[j]);
            total += s11 * t_hi * s_hi * a + s12 * t_hi * s_lo * b + s12 * t_lo * s_hi * c +
                     s22 * t_lo * s_lo * d;
        }
    }
    return total;
}

namespace {

// B as a linear combination of bridge evaluations: 4 terms per segment
void b_terms(const std::vector<double>& t, std::size_t k, std::vector<std::pair<double, double>>& out) {
    out.clear();
    for (std::size_t l = 1; l <= k; ++l) {
        const double lo = l >= 2 ? t[l - 2] : 0.0;
        const double md = t[l - 1];
        const double hi = l < k ? t[l] : 1.0;
        const double d_hi = hi - md;
        const double d_lo = md - lo;
        out.emplace_back(d_hi + d_lo, md);
        out.emplace_back(-d_hi, lo);
        out.emplace_back(-d_lo, hi);
    }
}

}  // namespace

double gamma_covariance_bridge(const std::vector<double>& s, const std::vector<double>& t,
                               std::size_t k) {
    if (s.size() != k || t.size() != k) throw core::BadTuple("tuples must have k coordinates");
    if (!in_theta_k(s) || !in_theta_k(t)) return 0.0;
    std::vector<std::pair<double, double>> st, tt;
    b_terms(s, k, st);
    b_terms(t, k, tt);
    double total = 0.0;
    for (const auto& [c1, a1] : st)
        for (const auto& [c2, a2] : tt)
            total += c1 * c2 * (std::min(a1, a2) - a1 * a2);
    return total;
}

OperatorSpectrum operator_spectrum(std::size_t k, std::size_t grid_resolution, double sigma2) {
    if (grid_resolution < 10) throw core::ResolutionTooLow("need >= 10 grid points per axis");
    if (k == 0) throw core::BadSpec("k must be >= 1");

    // midpoint cells of the ordered simplex
    std::vector<double> mid(grid_resolution);
    for (std::size_t i = 0; i < grid_resolution; ++i)
        mid[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(grid_resolution);

    std::vector<double> cells;
    std::vector<std::size_t> pos(k);
    for (std::size_t l = 0; l < k; ++l) pos[l] = l;
    for (bool more = grid_resolution >= k; more;) {
        for (std::size_t l = 0; l < k; ++l) cells.push_back(mid[pos[l]]);
        more = false;
        for (std::size_t l = k; l-- > 0;) {
            if (pos[l] < grid_resolution - k + l) {
                ++pos[l];
                for (std::size_t r = l + 1; r < k; ++r) pos[r] = pos[r - 1] + 1;
                more = true;
                break;
            }
        }
    }
    const std::size_t n_cells = cells.size() / k;
    if (n_cells == 0) throw core::ResolutionTooLow("no interior cells");
    if (n_cells > 25'000)
        throw core::ResolutionTooLow("cell count " + std::to_string(n_cells) +
                                     " too large for a dense eigensolve; lower the resolution");

    double vol = 1.0;
    for (std::size_t l = 0; l < k; ++l) vol /= static_cast<double>(grid_resolution);

    Eigen::MatrixXd gram(n_cells, n_cells);
    const std::int64_t nc = static_cast<std::int64_t>(n_cells);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t p = 0; p < nc; ++p) {
        std::vector<double> a(k), b(k);
        for (std::size_t l = 0; l < k; ++l) a[l] = cells[static_cast<std::size_t>(p) * k + l];
        for (std::int64_t q = p; q < nc; ++q) {
            for (std::size_t l = 0; l < k; ++l) b[l] = cells[static_cast<std::size_t>(q) * k + l];
            const double v = sigma2 * gamma_covariance_bridge(a, b, k) * vol;
            gram(p, q) = v;
            gram(q, p) = v;
        }
    }

    OperatorSpectrum spec;
    spec.k = k;
    spec.grid_resolution = grid_resolution;
    spec.n_cells = n_cells;
    spec.cell_volume = vol;
    spec.cells = std::move(cells);
    spec.trace = gram.trace();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw core::Error("eigendecomposition failed");

    // Eigen returns ascending; flip to descending and rescale eigenvectors
    // from unit Euclidean norm to unit discrete L2 norm.
    spec.eigenvalues.resize(n_cells);
    spec.eigenvectors.resize(n_cells * n_cells);
    const double scale = 1.0 / std::sqrt(vol);
    for (std::size_t j = 0; j < n_cells; ++j) {
        const std::size_t src = n_cells - 1 - j;
        spec.eigenvalues[j] = solver.eigenvalues()(static_cast<Eigen::Index>(src));
        for (std::size_t c = 0; c < n_cells; ++c)
            spec.eigenvectors[j * n_cells + c] =
                solver.eigenvectors()(static_cast<Eigen::Index>(c),
                                      static_cast<Eigen::Index>(src)) *
                scale;
    }
    return spec;
}

std::vector<NoncentralTerm> local_alternative_shift(std::size_t k, const std::vector<double>& shift,
                                                    const OperatorSpectrum& spectrum) {
    if (spectrum.n_cells == 0) throw core::SpectrumMissing("spectrum not computed");
    if (spectrum.k != k) throw core::SpectrumMissing("spectrum computed for different k");
    if (shift.size() != k) throw core::BadSpec("shift must have k components");

    // drift at each cell: sum_l (t_{l+1}-t_l)(t_l-t_{l-1}) A_l
    std::vector<double> drift(spectrum.n_cells);
    for (std::size_t c = 0; c < spectrum.n_cells; ++c) {
        const double* t = spectrum.cells.data() + c * k;
        double d = 0.0;
        for (std::size_t l = 0; l < k; ++l) {
            const double lo = l >= 1 ? t[l - 1] : 0.0;
            const double hi = l + 1 < k ? t[l + 1] : 1.0;
            d += (hi - t[l]) * (t[l] - lo) * shift[l];
        }
        drift[c] = d;
    }

    const double zeta1 = spectrum.eigenvalues.empty() ? 0.0 : spectrum.eigenvalues.front();
    std::vector<NoncentralTerm> terms;
    for (std::size_t j = 0; j < spectrum.n_cells; ++j) {
        const double zeta = spectrum.eigenvalues[j];
        if (!(zeta >= 1e-10 * zeta1) || zeta <= 0.0) continue;
        double rho = 0.0;
        for (std::size_t c = 0; c < spectrum.n_cells; ++c)
            rho += drift[c] * spectrum.g(c, j) * spectrum.cell_volume;
        terms.push_back(NoncentralTerm{zeta, rho * rho / zeta});
    }
    return terms;
}

double weighted_chisq_quantile(const std::vector<NoncentralTerm>& terms, double level,
                               std::size_t draws, std::uint64_t seed) {
    if (terms.empty()) throw core::SpectrumMissing("no spectral terms");
    if (draws < 100) throw core::BadSpec("need at least 100 draws");
    std::vector<double> offsets(terms.size());
    for (std::size_t j = 0; j < terms.size(); ++j) offsets[j] = std::sqrt(terms[j].ncp);

    std::vector<double> vals(draws);
    const std::int64_t nd = static_cast<std::int64_t>(draws);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < nd; ++r) {
        rng::NormalStream g(rng::stream_seed(seed, static_cast<std::uint64_t>(r)));
        double sum = 0.0;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            const double z = g.normal() + offsets[j];
            sum += terms[j].zeta * z * z;
        }
        vals[static_cast<std::size_t>(r)] = sum;
    }
    std::sort(vals.begin(), vals.end());
    return empirical_quantile(vals, 1.0 - level);
}

// ---------------------------------------------------------------------------
// serialization & cache
// ---------------------------------------------------------------------------

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string to_csv(const QuantileTable& table) {
    std::ostringstream out;
    out << "level,ks,cv\n";
    for (std::size_t i = 0; i < table.levels.size(); ++i)
        out << fmt17(table.levels[i]) << ',' << fmt17(table.ks_q[i]) << ',' << fmt17(table.cv_q[i])
            << '\n';
    return out.str();
}

std::string to_json_string(const QuantileTable& table) {
    nlohmann::json j;
    j["kind"] = "quantile-table";
    j["k"] = table.k;
    j["m"] = table.m;
    j["replications"] = table.replications;
    j["stride"] = table.stride;
    j["seed"] = table.seed;
    j["levels"] = table.levels;
    j["ks"] = table.ks_q;
    j["cv"] = table.cv_q;
    j["ks_samples"] = table.ks_samples;
    j["cv_samples"] = table.cv_samples;
    return j.dump(2) + "\n";
}

QuantileTable table_from_json_string(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    QuantileTable t;
    t.k = j.at("k").get<std::size_t>();
    t.m = j.at("m").get<std::size_t>();
    t.replications = j.at("replications").get<std::size_t>();
    t.stride = j.at("stride").get<std::size_t>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.levels = j.at("levels").get<std::vector<double>>();
    t.ks_q = j.at("ks").get<std::vector<double>>();
    t.cv_q = j.at("cv").get<std::vector<double>>();
    if (j.contains("ks_samples")) t.ks_samples = j.at("ks_samples").get<std::vector<double>>();
    if (j.contains("cv_samples")) t.cv_samples = j.at("cv_samples").get<std::vector<double>>();
    if (t.ks_q.size() != t.levels.size() || t.cv_q.size() != t.levels.size())
        throw core::Error("malformed quantile table");
    return t;
}

std::string cache_key(std::size_t k, std::size_t m, std::size_t replications, std::uint64_t seed,
                      std::size_t stride) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "k=%zu;m=%zu;reps=%zu;seed=%llu;stride=%zu", k, m,
                  replications, static_cast<unsigned long long>(seed), stride);
    // FNV-1a 64
    std::uint64_t h = 1469598103934665603ULL;
    for (const char* p = buf; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 1099511628211ULL;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

namespace {

std::filesystem::path cache_path(const std::filesystem::path& dir, const std::string& key) {
    return dir / ("qtable-" + key + ".json");
}

}  // namespace

std::optional<QuantileTable> load_cached(const std::filesystem::path& dir, std::size_t k,
                                         std::size_t m, std::size_t replications,
                                         std::uint64_t seed, std::size_t stride) {
    const auto path = cache_path(dir, cache_key(k, m, replications, seed, stride));
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        QuantileTable t = table_from_json_string(buf.str());
        if (t.k != k || t.m != m || t.replications != replications || t.seed != seed ||
            t.stride != stride)
            return std::nullopt;
        return t;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void store_cached(const std::filesystem::path& dir, const QuantileTable& table) {
    std::filesystem::create_directories(dir);
    const auto path =
        cache_path(dir, cache_key(table.k, table.m, table.replications, table.seed, table.stride));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw core::Error("cannot write cache file " + path.string());
    out << to_json_string(table);
}

}  // namespace cpustat::nulldist
