#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stheat/noise.hpp"
#include "stheat/problem.hpp"
#include "stheat/spectral.hpp"

namespace stheat {

/// Stochastic load tested against the two affine shape functions of each
/// interval, per mode j:
///   P[n][j] = int_{I_n} (Psi dW)_j,   Q[n][j] = int_{I_n} (Psi dW)_j (s - t_n)/h.
/// With Psi frozen on I_n these are exact linear combinations of (dW, iW).
struct NoiseLoad {
  std::size_t J = 0;
  std::size_t N = 0;
  std::vector<double> P;  // N x J
  std::vector<double> Q;  // N x J

  NoiseLoad() = default;
  NoiseLoad(std::size_t modes, std::size_t intervals)
      : J(modes), N(intervals), P(modes * intervals, 0.0), Q(modes * intervals, 0.0) {}

  double p(std::size_t n, std::size_t j) const noexcept { return P[n * J + j]; }
  double q(std::size_t n, std::size_t j) const noexcept { return Q[n * J + j]; }
};

/// Diagonal Psi: P = psi_j dW_j, Q = psi_j iW_j / h. Psi = 0 gives zeros.
NoiseLoad additive_noise_load(const LoadSpec& load, const NoiseSample& noise);

/// Discrete solution: U1 is constant in time on each interval, U2 is the
/// H-valued version at every node. Both node-major.
struct SpaceTimeSolution {
  std::size_t J = 0;
  std::size_t N = 0;
  std::vector<double> u1;  // N x J
  std::vector<double> u2;  // (N + 1) x J

  SpaceTimeSolution() = default;
  SpaceTimeSolution(std::size_t modes, std::size_t intervals)
      : J(modes), N(intervals), u1(modes * intervals, 0.0), u2(modes * (intervals + 1), 0.0) {}

  double U1(std::size_t n, std::size_t j) const noexcept { return u1[n * J + j]; }
  double U2(std::size_t n, std::size_t j) const noexcept { return u2[n * J + j]; }
  std::span<const double> U1(std::size_t n) const noexcept { return {u1.data() + n * J, J}; }
  std::span<const double> U2(std::size_t n) const noexcept { return {u2.data() + n * J, J}; }
  SpectralVec terminal() const;

  bool operator==(const SpaceTimeSolution&) const = default;
};

/// Forward sweep over intervals [n_begin, n_end). Reads U2 at n_begin as the
/// initial value and writes U1 on the range and U2 at n_begin+1 .. n_end.
/// Per mode and interval the row of the hat test function centred at t_n
/// gives
///   u_n (1 + lambda h (k0 - k1)) = U2_n + f h/2 + P - Q,
///   U2_{n+1} = u_n (1 - lambda h k1) + f h/2 + Q,
/// with k0, k1 the mean and first moment of kappa on I_n.
void sweep(const KappaPath& kappa, const LoadSpec& load, const NoiseLoad& noise,
           const TimeGrid& grid, const EigenBasis& basis, std::size_t n_begin, std::size_t n_end,
           SpaceTimeSolution& sol);

/// Full solve with a given kappa realisation and stochastic load.
SpaceTimeSolution solve(const KappaPath& kappa, const LoadSpec& load, const NoiseLoad& noise,
                        const TimeGrid& grid, const EigenBasis& basis);

/// Realises kappa on the noise path and solves the additive problem.
SpaceTimeSolution assemble_and_solve(const OperatorSpec& op, const LoadSpec& load,
                                     const NoiseSample& noise, const TimeGrid& grid,
                                     const EigenBasis& basis);

/// Weak-form residuals, one per discrete test function, each divided by the
/// test function's X norm. Row order per mode j: hats centred at t_0 .. t_{N-1}
/// (tested up to T), then the left half-hats at t_1 .. t_N carrying the
/// terminal term <U2(t_k), x(t_k)>. Entry [row * J + j].
struct WeakResidual {
  std::vector<double> rows;
  double max_abs = 0.0;
  double scale = 0.0;  // largest normalised load or diagonal term seen
  double relative() const noexcept { return scale > 0.0 ? max_abs / scale : max_abs; }
};

WeakResidual weak_residual(const SpaceTimeSolution& sol, const KappaPath& kappa,
                           const LoadSpec& load, const NoiseLoad& noise, const TimeGrid& grid,
                           const EigenBasis& basis);

/// Relative residual of an additive-noise solve.
double residual(const SpaceTimeSolution& sol, const OperatorSpec& op, const LoadSpec& load,
                const NoiseSample& noise, const TimeGrid& grid, const EigenBasis& basis);

/// X norm of the test function row (see WeakResidual) for mode lambda.
double test_function_norm(std::size_t row, std::size_t N, double h, double lambda);

/// (sum_n h ||U1_n||^2_{Hdot^{1+beta}}, max_n ||U2_n||^2_{Hdot^beta}).
struct EnergyNorms {
  double v_energy = 0.0;
  double sup_h = 0.0;
  double total() const noexcept { return v_energy + sup_h; }
};

EnergyNorms energy_norms(const SpaceTimeSolution& sol, const TimeGrid& grid,
                         const EigenBasis& basis, double beta = 0.0);

/// Integral identity U2(t_n) = U0 + sum_{m<n} (-kappa_m A0 U1_m + f_m) h + (Psi dW)_m
/// and the gap between the two versions, max_n ||U1_n - (U2_n + U2_{n+1})/2||_H.
struct VersionsReport {
  double identity_error = 0.0;  // max |lhs - rhs| / max(1, max |U2|)
  double version_gap = 0.0;
};

VersionsReport check_versions(const SpaceTimeSolution& sol, const KappaPath& kappa,
                              const LoadSpec& load, const NoiseLoad& noise, const TimeGrid& grid,
                              const EigenBasis& basis);

/// CSV with header `node,mode,U1,U2`; U1 is left empty on the last node.
void write_solution_csv(std::ostream& os, const SpaceTimeSolution& sol);

/// One-line JSON object with the energy norms and grid sizes.
std::string energy_summary_json(const SpaceTimeSolution& sol, const TimeGrid& grid,
                                const EigenBasis& basis, double beta = 0.0);

}  // namespace stheat
