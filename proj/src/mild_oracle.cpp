#include "stheat/mild_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stheat/montecarlo.hpp"
#include "stheat/numerics.hpp"

namespace stheat {

double ou_step(double u, double lambda_eff, double f, double sigma, double h, double z) {
  if (!(lambda_eff > 0.0)) throw std::invalid_argument("ou_step: lambda must be positive");
  if (!(h > 0.0)) throw std::invalid_argument("ou_step: h must be positive");
  const double x = lambda_eff * h;
  const double one_minus_decay = -std::expm1(-x);
  const double var = -std::expm1(-2.0 * x) / (2.0 * lambda_eff);
  return std::exp(-x) * u + f * one_minus_decay / lambda_eff + sigma * std::sqrt(var) * z;
}

double convolution_moment(double lambda, double gamma, double t) {
  if (!(lambda > 0.0)) throw std::invalid_argument("convolution_moment: lambda must be positive");
  if (t <= 0.0) return 0.0;
  return gamma * -std::expm1(-2.0 * lambda * t) / (2.0 * lambda);
}

namespace {

// Shifted, normalised Legendre polynomials on (0, 1): values of
// sqrt(2k+1) P_k(2 tau - 1) for k = 0..K.
void orthonormal_legendre(double tau, std::size_t K, std::vector<double>& out) {
  out.assign(K + 1, 0.0);
  const double y = 2.0 * tau - 1.0;
  double p0 = 1.0;
  double p1 = y;
  out[0] = 1.0;
  if (K >= 1) out[1] = std::sqrt(3.0) * p1;
  for (std::size_t k = 2; k <= K; ++k) {
    const auto kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk - 1.0) * y * p1 - (kk - 1.0) * p0) / kk;
    p0 = p1;
    p1 = p2;
    out[k] = std::sqrt(2.0 * kk + 1.0) * p2;
  }
}

}  // namespace

OuIntervalLaw ou_interval_law(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("ou_interval_law: x must be positive");
  OuIntervalLaw law;
  law.x = x;
  law.decay = std::exp(-x);
  if (x < 1.0) {
    // Closed forms cancel badly here; the kernels are entire, so a modest
    // Gauss rule plus the Legendre tail for the residual is exact to rounding.
    static const QuadratureRule rule = gauss_legendre(24);
    constexpr std::size_t kTail = 16;
    std::vector<double> c(kTail + 1, 0.0);
    std::vector<double> basis;
    double k0 = 0.0;
    double k1 = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double tau = rule.nodes[q];
      const double w = rule.weights[q];
      const double g = std::exp(-x * (1.0 - tau));
      const double k = -std::expm1(-x * (1.0 - tau)) / x;
      orthonormal_legendre(tau, kTail, basis);
      for (std::size_t i = 0; i <= kTail; ++i) c[i] += w * g * basis[i];
      k0 += w * k;
      k1 += w * k * basis[1];
    }
    double resid = 0.0;
    for (std::size_t i = kTail; i >= 2; --i) resid += c[i] * c[i];
    law.end_e0 = c[0];
    law.end_e1 = c[1];
    law.end_residual = std::sqrt(resid);
    law.mean_e0 = k0;
    law.mean_e1 = k1;
    return law;
  }
  const double m0 = -std::expm1(-x) / x;
  const double tail = (1.0 - std::exp(-x) * (1.0 + x)) / (x * x);
  const double m1 = std::sqrt(3.0) * (m0 - 2.0 * tail);
  const double var = -std::expm1(-2.0 * x) / (2.0 * x);
  law.end_e0 = m0;
  law.end_e1 = m1;
  law.end_residual = std::sqrt(std::max(0.0, var - m0 * m0 - m1 * m1));
  law.mean_e0 = (1.0 - m0) / x;
  law.mean_e1 = -m1 / x;
  return law;
}

MildPath mild_solve(const OperatorSpec& op, const LoadSpec& load, const QSpec& q,
                    const NoiseSample& noise, const TimeGrid& grid, const EigenBasis& basis) {
  return mild_solve(op.realize(grid, noise.id()), load, q, noise, grid, basis);
}

MildPath mild_solve(const KappaPath& kappa, const LoadSpec& load, const QSpec& q,
                    const NoiseSample& noise, const TimeGrid& grid, const EigenBasis& basis) {
  if (!kappa.piecewise_constant) {
    throw std::invalid_argument(
        "mild_solve: kappa must be piecewise constant on the grid for the exact mild formula");
  }
  const std::size_t J = basis.size();
  const std::size_t N = grid.N();
  load.validate(J, N);
  if (kappa.mean.size() != N) throw std::invalid_argument("mild_solve: kappa path length");
  const bool noisy = !load.psi_diag.empty();
  if (noisy && (q.size() != J || noise.modes() != J || noise.intervals() != N)) {
    throw std::invalid_argument("mild_solve: noise sample does not match basis and grid");
  }

  const double h = grid.h();
  MildPath path;
  path.J = J;
  path.N = N;
  path.id = noise.id();
  path.values.assign((N + 1) * J, 0.0);
  path.cell_means.assign(N * J, 0.0);
  std::copy(load.u0.coeffs().begin(), load.u0.coeffs().end(), path.values.begin());

  const CounterRng rng(noise.id().seed);
  const double sqrt3 = std::sqrt(3.0);
  for (std::size_t j = 0; j < J; ++j) {
    const double lambda = basis.lambda(j);
    const double psi = noisy ? load.psi_diag[j] : 0.0;
    const double gamma = noisy ? q.gamma(j) : 0.0;
    const double sigma = psi * std::sqrt(gamma);
    OuIntervalLaw law;
    double law_kappa = -1.0;
    for (std::size_t n = 0; n < N; ++n) {
      const double k = kappa.mean[n];
      if (k != law_kappa) {
        law = ou_interval_law(k * lambda * h);
        law_kappa = k;
      }
      const double lambda_eff = k * lambda;
      const SpectralVec* f = load.source(n);
      const double fj = f ? (*f)[j] : 0.0;
      const double u = path.values[n * J + j];

      double z = 0.0;
      double mean_noise = 0.0;
      if (sigma != 0.0) {
        const double sgh = std::sqrt(gamma * h);
        const double zeta0 = noise.dW(j, n) / sgh;
        const double zeta1 = sqrt3 * (2.0 * noise.iW(j, n) / h - noise.dW(j, n)) / sgh;
        const double z3 = rng.normals(noise.id().path, static_cast<std::uint32_t>(j),
                                      static_cast<std::uint32_t>(n), Stream::OracleResidual)
                              .first;
        const double end = law.end_e0 * zeta0 + law.end_e1 * zeta1 + law.end_residual * z3;
        const double end_sd = std::sqrt(-std::expm1(-2.0 * law.x) / (2.0 * law.x));
        z = end / end_sd;
        mean_noise = psi * sgh *
                     (law.mean_e0 * zeta0 + law.mean_e1 * zeta1 - law.end_residual / law.x * z3);
      }
      path.values[(n + 1) * J + j] = ou_step(u, lambda_eff, fj, sigma, h, z);
      path.cell_means[n * J + j] = law.end_e0 * u + fj * h * law.mean_e0 + mean_noise;
    }
  }
  return path;
}

double chow_lhs1_single(double lambda, double gamma, double T) {
  if (!(lambda > 0.0)) throw std::invalid_argument("chow_lhs1_single: lambda must be positive");
  // int_0^T lambda * convolution_moment(lambda, gamma, r) dr
  return 0.5 * gamma * (T + std::expm1(-2.0 * lambda * T) / (2.0 * lambda));
}

double chow_lhs1(std::span<const double> psi_diag, const QSpec& q, const EigenBasis& basis,
                 double T) {
  const std::vector<double> terms = hs_terms(psi_diag, q, basis, 0.0);
  double acc = 0.0;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    acc += chow_lhs1_single(basis.lambda(j), terms[j], T);
  }
  return acc;
}

ChowReport chow_bounds_check(const QSpec& q, std::span<const double> psi_diag,
                             const TimeGrid& grid, const EigenBasis& basis, std::size_t paths,
                             std::uint64_t seed) {
  if (paths < 100) throw std::invalid_argument("chow_bounds_check: need at least 100 paths");
  ChowReport r;
  r.paths = paths;
  r.seed = seed;
  const double hs2 = std::pow(hs_norm_psiQ(psi_diag, q, basis, 0.0), 2);
  r.lhs1 = chow_lhs1(psi_diag, q, basis, grid.T());
  r.rhs1 = 0.5 * grid.T() * hs2;
  r.rhs2 = 16.0 * grid.T() * hs2;

  const std::size_t J = basis.size();
  LoadSpec load;
  load.u0 = SpectralVec(J);
  load.psi_diag.assign(psi_diag.begin(), psi_diag.end());
  const OperatorSpec op = OperatorSpec::constant(1.0);
  const MCSummary s = mc_expectation(
      [&](PathId id) {
        const NoiseSample noise = sample_noise(grid, q, id);
        const MildPath path = mild_solve(op, load, q, noise, grid, basis);
        double sup = 0.0;
        for (std::size_t n = 0; n <= grid.N(); ++n) {
          sup = std::max(sup, frac_norm_sq(path.node(n), 0.0, basis));
        }
        return sup;
      },
      paths, seed);
  r.lhs2 = s.estimate;
  r.lhs2_std_error = s.std_error;
  return r;
}

}  // namespace stheat
