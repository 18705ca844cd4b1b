#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpustat::core {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NonFinite : Error {
    std::size_t index;
    explicit NonFinite(std::size_t i)
        : Error("non-finite value at index " + std::to_string(i)), index(i) {}
};

struct TooShort : Error {
    std::size_t n;
    TooShort(std::size_t got, std::size_t need)
        : Error("series too short: n=" + std::to_string(got) + ", need >= " + std::to_string(need)),
          n(got) {}
};

struct GridMismatch : Error { using Error::Error; };
struct EmptyGrid : Error { using Error::Error; };
struct WrongKernel : Error { using Error::Error; };
struct NonPositiveVariance : Error { using Error::Error; };
struct DegenerateSeries : Error { using Error::Error; };
struct BadTuple : Error { using Error::Error; };
struct BadBandwidth : Error { using Error::Error; };
struct BadBlockLength : Error { using Error::Error; };
struct BadWeights : Error { using Error::Error; };
struct BadSpec : Error { using Error::Error; };
struct UnknownTag : Error { using Error::Error; };
struct ResolutionTooLow : Error { using Error::Error; };
struct SpectrumMissing : Error { using Error::Error; };

// Univariate observation sequence.  Construction goes through validate(),
// so a Series always holds >= 4 finite values.  Storage is 0-based; indices
// in reports and in partition tuples follow the 1-based convention of the
// underlying formulas.
class Series {
public:
    static Series validate(std::vector<double> raw);

    std::size_t n() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }  // 0-based

private:
    explicit Series(std::vector<double>&& v) : values_(std::move(v)) {}
    std::vector<double> values_;
};

enum class KernelKind { Difference, IndicatorLess, UserSupplied };

struct KernelSpec {
    KernelKind kind = KernelKind::Difference;
    std::function<double(double, double)> evaluate;
    bool antisymmetric = false;
    std::optional<double> theta_null;

    static KernelSpec difference();
    static KernelSpec indicator_less();
    static KernelSpec user_supplied(std::function<double(double, double)> h, bool antisym);
};

// All admissible change-point tuples 1 < m_1 < ... < m_k < n (values on the
// stride lattice {1+s, 1+2s, ...}), enumerated in lexicographic order and
// stored flat.  Copies share the tuple storage.
class PartitionGrid {
public:
    PartitionGrid(std::size_t k, std::size_t n, std::size_t stride);
    static PartitionGrid full(std::size_t k, std::size_t n) { return PartitionGrid(k, n, 1); }

    // number of admissible tuples without materializing them
    static std::uint64_t count_tuples(std::size_t k, std::size_t n, std::size_t stride);
    // smallest stride whose tuple count fits the cap (used for cost control)
    static std::size_t auto_stride(std::size_t k, std::size_t n,
                                   std::uint64_t max_tuples = 2'000'000);

    std::size_t k() const { return k_; }
    std::size_t n() const { return n_; }
    std::size_t stride() const { return stride_; }
    std::uint64_t size() const { return flat_->size() / k_; }

    // pointer to the k indices (1-based series positions) of tuple `idx`
    const std::uint32_t* tuple(std::uint64_t idx) const { return flat_->data() + idx * k_; }

private:
    std::size_t k_, n_, stride_;
    std::shared_ptr<const std::vector<std::uint32_t>> flat_;
};

struct TestDecision {
    double ks_quantile = 0.0;
    double cv_quantile = 0.0;
    bool ks_reject = false;
    bool cv_reject = false;
};

struct DetectionReport {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t stride = 1;
    std::uint64_t grid_tuples = 0;
    double t1 = 0.0;             // max_t |Z(t)|
    double t2 = 0.0;             // grid sum of Z^2, stride^k/n^k scaled
    double t1_normalized = 0.0;  // t1 / sigma_hat
    double t2_normalized = 0.0;  // t2 / sigma2_hat
    double sigma2_hat = 0.0;
    std::string lrv_method;
    std::vector<std::size_t> argmax_tuple;
    std::map<double, TestDecision> decisions;  // level -> decision
    std::optional<double> ks_pvalue;           // Monte Carlo, when null samples are available
    std::optional<double> cv_pvalue;
    bool degenerate = false;  // constant input: zero field, no variance to normalize by
};

}  // namespace cpustat::core
