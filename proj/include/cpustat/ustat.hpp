#pragma once

#include <utility>
#include <vector>

#include "cpustat/core.hpp"

namespace cpustat::ustat {

// Z_n evaluated at every grid tuple: values[i] corresponds to grid.tuple(i),
// each value the centered, n^{-3/2}-scaled double sum over the k segment
// pairs cut by the tuple.
struct ZField {
    core::PartitionGrid grid;
    std::vector<double> values;
    double theta_used = 0.0;
};

// V-statistic plug-in (1/n^2) sum_{i,j} h(X_i, X_j); exactly 0 for
// antisymmetric kernels without summing.
double theta_plugin(const core::Series& series, const core::KernelSpec& kernel);

// Centering used by the statistics: the kernel's known theta when present,
// otherwise the plug-in.
double centering_theta(const core::Series& series, const core::KernelSpec& kernel);

// Evaluate the field; dispatches to the exact prefix-sum reduction for the
// Difference kernel and to the generic double sum otherwise.
ZField z_field(const core::Series& series, const core::KernelSpec& kernel,
               const core::PartitionGrid& grid, double theta);
ZField z_field_serial(const core::Series& series, const core::KernelSpec& kernel,
                      const core::PartitionGrid& grid, double theta);

// O(#tuples * k) path for h(x,y) = x - y via prefix sums.
ZField fast_bilinear(const core::Series& series, const core::PartitionGrid& grid, double theta);
ZField fast_bilinear_serial(const core::Series& series, const core::PartitionGrid& grid,
                            double theta);
// kernel-checked entry: anything but Difference is a WrongKernel error
ZField fast_bilinear(const core::Series& series, const core::KernelSpec& kernel,
                     const core::PartitionGrid& grid, double theta);

// Reference triple-loop evaluation for any kernel; the testing oracle.
ZField brute_force(const core::Series& series, const core::KernelSpec& kernel,
                   const core::PartitionGrid& grid, double theta);

double ks_statistic(const ZField& field);             // max |value|
double cv_statistic(const ZField& field);             // stride^k/n^k * sum value^2
std::pair<double, double> normalize(double t1, double t2, double sigma2);

// Tuple attaining max |value|; ties resolved to the lexicographically
// smallest tuple.  Indices are 1-based series positions.
std::vector<std::size_t> locate_changes(const ZField& field);

}  // namespace cpustat::ustat
