#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stheat/noise.hpp"
#include "stheat/problem.hpp"
#include "stheat/spectral.hpp"

namespace stheat {

/// One exact step of du = (-lambda u + f) dt + sigma dB on [0, h] with f and
/// sigma constant and B a standard Brownian motion:
///   e^{-lambda h} u + f (1 - e^{-lambda h}) / lambda
///     + sigma sqrt((1 - e^{-2 lambda h}) / (2 lambda)) z.
/// Throws std::invalid_argument for lambda <= 0 or h <= 0.
double ou_step(double u, double lambda_eff, double f, double sigma, double h, double z);

/// E|int_0^t e^{-lambda (t-s)} dW(s)|^2 for a scalar Brownian motion of
/// variance gamma per unit time: gamma (1 - e^{-2 lambda t}) / (2 lambda).
double convolution_moment(double lambda, double gamma, double t);

/// Law of the OU stochastic integral over one interval of length h, written
/// in the orthonormal coordinates of the interval's Brownian functionals.
///
/// With tau = (s - t_n)/h and x = lambda h, the integrals of the kernels
///   g(tau) = e^{-x (1 - tau)}          (endpoint value),
///   k(tau) = (1 - g(tau)) / x          (cell average)
/// against dW decompose on e0 = 1, e1 = sqrt(3)(2 tau - 1) and a residual
/// direction independent of (dW, iW). All coefficients are per unit
/// sqrt(gamma h).
struct OuIntervalLaw {
  double x = 0.0;
  double decay = 1.0;        // e^{-x}
  double end_e0 = 0.0;       // <g, e0> = (1 - e^{-x}) / x
  double end_e1 = 0.0;       // <g, e1>
  double end_residual = 0.0; // ||g - proj g||
  double mean_e0 = 0.0;      // <k, e0>
  double mean_e1 = 0.0;      // <k, e1>; the residual of k is -end_residual / x
};

OuIntervalLaw ou_interval_law(double x);

/// Mild solution sampled on a grid: node values U(t_n) and exact cell means
/// (1/h) int_{I_n} U(s) ds, both stored node-major.
struct MildPath {
  std::size_t J = 0;
  std::size_t N = 0;
  PathId id;
  std::vector<double> values;      // (N + 1) x J
  std::vector<double> cell_means;  // N x J

  std::span<const double> node(std::size_t n) const { return {values.data() + n * J, J}; }
  std::span<const double> mean(std::size_t n) const { return {cell_means.data() + n * J, J}; }
};

/// Exact mild solution driven by the same (dW, iW) as the space-time solver.
/// The OU integral on each interval is sampled from its conditional law given
/// (dW, iW); the orthogonal component comes from the path's
/// Stream::OracleResidual draws. Requires piecewise-constant kappa, otherwise
/// throws std::invalid_argument.
MildPath mild_solve(const OperatorSpec& op, const LoadSpec& load, const QSpec& q,
                    const NoiseSample& noise, const TimeGrid& grid, const EigenBasis& basis);

/// Overload for an already realised kappa path.
MildPath mild_solve(const KappaPath& kappa, const LoadSpec& load, const QSpec& q,
                    const NoiseSample& noise, const TimeGrid& grid, const EigenBasis& basis);

/// Both inequalities behind the bound on the stochastic load functional:
///   lhs1 = E int_0^T ||int_0^r S0(r-s) Psi dW||_V^2 dr   <=  rhs1 = T ||Psi Q^{1/2}||^2 / 2
///   lhs2 = E sup_t ||int_0^t S0(t-s) Psi dW||_H^2        <=  rhs2 = 16 T ||Psi Q^{1/2}||^2
/// lhs1 is analytic; lhs2 is a Monte Carlo estimate over grid nodes.
struct ChowReport {
  double lhs1 = 0.0;
  double rhs1 = 0.0;
  double lhs2 = 0.0;
  double lhs2_std_error = 0.0;
  double rhs2 = 0.0;
  std::size_t paths = 0;
  std::uint64_t seed = 0;

  bool first_holds() const noexcept { return lhs1 <= rhs1; }
  bool second_holds() const noexcept { return lhs2 + 3.0 * lhs2_std_error <= rhs2; }
};

/// lhs1 for one mode with eigenvalue lambda and variance gamma:
///   gamma/2 (T - (1 - e^{-2 lambda T}) / (2 lambda)).
double chow_lhs1_single(double lambda, double gamma, double T);

/// Analytic lhs1 for a diagonal Psi.
double chow_lhs1(std::span<const double> psi_diag, const QSpec& q, const EigenBasis& basis,
                 double T);

/// Throws std::invalid_argument for paths < 100.
ChowReport chow_bounds_check(const QSpec& q, std::span<const double> psi_diag,
                             const TimeGrid& grid, const EigenBasis& basis, std::size_t paths,
                             std::uint64_t seed);

}  // namespace stheat
