#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stheat {

/// Gauss-Legendre rule mapped to (0, 1).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule gauss_legendre(std::size_t points);

/// Neumaier-compensated running sum. Reordering the terms changes the result
/// by at most a few ulps of the magnitude of the sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs) noexcept;

/// log2(a / b); the empirical convergence order between two errors measured
/// at step sizes h and h/2.
double observed_order(double coarse_error, double fine_error);

}  // namespace stheat
