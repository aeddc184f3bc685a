#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stheat/noise.hpp"
#include "stheat/rng.hpp"
#include "stheat/spectral.hpp"

namespace stheat {

/// Law of the scalar multiplier kappa(omega, t) in A(omega, t) = kappa A0.
struct KappaLaw {
  enum class Kind {
    Constant,     // kappa = value
    UniformIid,   // one U[a_min, a_max] draw per grid interval and path
    TimeFunction  // deterministic kappa(t), not piecewise constant
  };
  Kind kind = Kind::Constant;
  double value = 1.0;
  std::function<double(double)> fn;
};

/// Realised kappa on one path, reduced to the two moments per interval the
/// space-time assembly needs for affine-in-time test functions:
///   mean[n]  = (1/h) int_{I_n} kappa(s) ds
///   first[n] = (1/h) int_{I_n} kappa(s) (s - t_n)/h ds
/// For piecewise-constant kappa, first[n] = mean[n] / 2.
struct KappaPath {
  std::vector<double> mean;
  std::vector<double> first;
  bool piecewise_constant = true;
};

/// Bounds A_min <= kappa <= A_max with A_min > 0 plus the law of kappa.
class OperatorSpec {
 public:
  OperatorSpec(double a_min, double a_max, KappaLaw law);

  static OperatorSpec constant(double kappa);
  static OperatorSpec uniform(double a_min, double a_max);
  static OperatorSpec time_function(double a_min, double a_max, std::function<double(double)> fn);

  double a_min() const noexcept { return a_min_; }
  double a_max() const noexcept { return a_max_; }
  const KappaLaw& law() const noexcept { return law_; }

  /// True when kappa is deterministic and time independent.
  bool is_constant() const noexcept { return law_.kind == KappaLaw::Kind::Constant; }

  /// Draws the path's kappa; throws std::logic_error if a realisation leaves
  /// [a_min, a_max].
  KappaPath realize(const TimeGrid& grid, PathId id) const;

 private:
  double a_min_;
  double a_max_;
  KappaLaw law_;
};

/// Data of the additive problem: initial value, source and noise diagonal.
struct LoadSpec {
  SpectralVec u0;
  /// Empty: f = 0. One entry: constant in time. N entries: one per interval.
  std::vector<SpectralVec> f;
  /// Psi diagonal in the eigenbasis; empty means Psi = 0.
  std::vector<double> psi_diag;

  /// Source on interval n, or nullptr when f = 0.
  const SpectralVec* source(std::size_t n) const;
  void validate(std::size_t J, std::size_t N) const;
};

/// int_0^T ||f||_{Hdot^{s}}^2 dt for the piecewise-constant source (s = -1
/// gives the V* norm).
double source_energy(const LoadSpec& load, const TimeGrid& grid, const EigenBasis& basis,
                     double s = -1.0);

}  // namespace stheat
