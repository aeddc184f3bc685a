#include "stheat/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace stheat {

namespace {

void check_dims(const KappaPath& kappa, const LoadSpec& load, const NoiseLoad& noise,
                const TimeGrid& grid, const EigenBasis& basis) {
  const std::size_t J = basis.size();
  const std::size_t N = grid.N();
  load.validate(J, N);
  if (kappa.mean.size() != N || kappa.first.size() != N) {
    throw std::invalid_argument("spacetime: kappa path does not match the grid");
  }
  if (noise.J != J || noise.N != N) {
    throw std::invalid_argument("spacetime: noise load does not match basis and grid");
  }
}

double source_at(const LoadSpec& load, std::size_t n, std::size_t j) {
  const SpectralVec* f = load.source(n);
  return f ? (*f)[j] : 0.0;
}

}  // namespace

NoiseLoad additive_noise_load(const LoadSpec& load, const NoiseSample& noise) {
  NoiseLoad out(noise.modes(), noise.intervals());
  if (load.psi_diag.empty()) return out;
  if (load.psi_diag.size() != noise.modes()) {
    throw std::invalid_argument("additive_noise_load: psi_diag does not match noise modes");
  }
  const double h = noise.h();
  for (std::size_t n = 0; n < out.N; ++n) {
    for (std::size_t j = 0; j < out.J; ++j) {
      out.P[n * out.J + j] = load.psi_diag[j] * noise.dW(j, n);
      out.Q[n * out.J + j] = load.psi_diag[j] * noise.iW(j, n) / h;
    }
  }
  return out;
}

SpectralVec SpaceTimeSolution::terminal() const {
  const auto last = U2(N);
  return SpectralVec(std::vector<double>(last.begin(), last.end()));
}

void sweep(const KappaPath& kappa, const LoadSpec& load, const NoiseLoad& noise,
           const TimeGrid& grid, const EigenBasis& basis, std::size_t n_begin, std::size_t n_end,
           SpaceTimeSolution& sol) {
  const std::size_t J = basis.size();
  if (n_end > grid.N() || n_begin > n_end) throw std::invalid_argument("sweep: bad interval range");
  if (sol.J != J || sol.N != grid.N()) throw std::invalid_argument("sweep: solution shape");
  const double h = grid.h();
  for (std::size_t n = n_begin; n < n_end; ++n) {
    const double k0 = kappa.mean[n];
    const double k1 = kappa.first[n];
    for (std::size_t j = 0; j < J; ++j) {
      const double lh = basis.lambda(j) * h;
      const double diag = 1.0 + lh * (k0 - k1);
      if (!(diag > 0.0)) throw std::logic_error("sweep: singular time step");
      const double half_f = 0.5 * h * source_at(load, n, j);
      const double p = noise.p(n, j);
      const double q = noise.q(n, j);
      const double u = (sol.u2[n * J + j] + half_f + p - q) / diag;
      sol.u1[n * J + j] = u;
      sol.u2[(n + 1) * J + j] = u * (1.0 - lh * k1) + half_f + q;
    }
  }
}

SpaceTimeSolution solve(const KappaPath& kappa, const LoadSpec& load, const NoiseLoad& noise,
                        const TimeGrid& grid, const EigenBasis& basis) {
  check_dims(kappa, load, noise, grid, basis);
  SpaceTimeSolution sol(basis.size(), grid.N());
  std::copy(load.u0.coeffs().begin(), load.u0.coeffs().end(), sol.u2.begin());
  sweep(kappa, load, noise, grid, basis, 0, grid.N(), sol);
  return sol;
}

SpaceTimeSolution assemble_and_solve(const OperatorSpec& op, const LoadSpec& load,
                                     const NoiseSample& noise, const TimeGrid& grid,
                                     const EigenBasis& basis) {
  if (!load.psi_diag.empty() &&
      (noise.modes() != basis.size() || noise.intervals() != grid.N())) {
    throw std::invalid_argument("assemble_and_solve: noise sample does not match basis and grid");
  }
  const KappaPath kappa = op.realize(grid, noise.id());
  NoiseLoad nl = load.psi_diag.empty() ? NoiseLoad(basis.size(), grid.N())
                                       : additive_noise_load(load, noise);
  return solve(kappa, load, nl, grid, basis);
}

double test_function_norm(std::size_t row, std::size_t N, double h, double lambda) {
  // int ||x||_V^2 + int ||x'||_{V*}^2 + boundary values, for x = shape * phi_j.
  const bool interior_hat = row >= 1 && row < N;
  if (interior_hat) return std::sqrt(lambda * 2.0 * h / 3.0 + 2.0 / (lambda * h));
  return std::sqrt(lambda * h / 3.0 + 1.0 / (lambda * h) + 1.0);
}

WeakResidual weak_residual(const SpaceTimeSolution& sol, const KappaPath& kappa,
                           const LoadSpec& load, const NoiseLoad& noise, const TimeGrid& grid,
                           const EigenBasis& basis) {
  check_dims(kappa, load, noise, grid, basis);
  const std::size_t J = basis.size();
  const std::size_t N = grid.N();
  if (sol.J != J || sol.N != N) throw std::invalid_argument("weak_residual: solution shape");
  const double h = grid.h();

  WeakResidual out;
  out.rows.assign(2 * N * J, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    const double lambda = basis.lambda(j);
    // Contribution of interval n to B*(U, x) - F(x) - W(x) when the test
    // function is affine on I_n with values a at t_n and b at t_{n+1}.
    auto piece = [&](std::size_t n, double a, double b, double& scale) {
      const double k0 = kappa.mean[n];
      const double k1 = kappa.first[n];
      const double u = sol.U1(n, j);
      const double time_deriv = -(b - a) * u;
      const double stiffness = lambda * h * (a * (k0 - k1) + b * k1) * u;
      const double source = source_at(load, n, j) * h * 0.5 * (a + b);
      const double stoch = a * noise.p(n, j) + (b - a) * noise.q(n, j);
      scale = std::max({scale, std::abs(time_deriv), std::abs(stiffness), std::abs(source),
                        std::abs(stoch)});
      return time_deriv + stiffness - source - stoch;
    };
    for (std::size_t row = 0; row < 2 * N; ++row) {
      double scale = 0.0;
      double r = 0.0;
      if (row < N) {
        const std::size_t m = row;
        if (m >= 1) r += piece(m - 1, 0.0, 1.0, scale);
        r += piece(m, 1.0, 0.0, scale);
        if (m == 0) {
          r -= load.u0[j];
          scale = std::max(scale, std::abs(load.u0[j]));
        }
      } else {
        const std::size_t k = row - N + 1;
        r += piece(k - 1, 0.0, 1.0, scale);
        r += sol.U2(k, j);
        scale = std::max(scale, std::abs(sol.U2(k, j)));
      }
      const double norm = test_function_norm(row < N ? row : N, N, h, lambda);
      const double rn = r / norm;
      out.rows[row * J + j] = rn;
      out.max_abs = std::max(out.max_abs, std::abs(rn));
      out.scale = std::max(out.scale, scale / norm);
    }
  }
  return out;
}

double residual(const SpaceTimeSolution& sol, const OperatorSpec& op, const LoadSpec& load,
                const NoiseSample& noise, const TimeGrid& grid, const EigenBasis& basis) {
  const KappaPath kappa = op.realize(grid, noise.id());
  NoiseLoad nl = load.psi_diag.empty() ? NoiseLoad(basis.size(), grid.N())
                                       : additive_noise_load(load, noise);
  return weak_residual(sol, kappa, load, nl, grid, basis).relative();
}

EnergyNorms energy_norms(const SpaceTimeSolution& sol, const TimeGrid& grid,
                         const EigenBasis& basis, double beta) {
  if (sol.J != basis.size()) throw std::invalid_argument("energy_norms: basis size");
  EnergyNorms e;
  for (std::size_t n = 0; n < sol.N; ++n) {
    e.v_energy += grid.h() * frac_norm_sq(sol.U1(n), 1.0 + beta, basis);
  }
  for (std::size_t n = 0; n <= sol.N; ++n) {
    e.sup_h = std::max(e.sup_h, frac_norm_sq(sol.U2(n), beta, basis));
  }
  return e;
}

VersionsReport check_versions(const SpaceTimeSolution& sol, const KappaPath& kappa,
                              const LoadSpec& load, const NoiseLoad& noise, const TimeGrid& grid,
                              const EigenBasis& basis) {
  check_dims(kappa, load, noise, grid, basis);
  const std::size_t J = basis.size();
  const std::size_t N = grid.N();
  const double h = grid.h();
  VersionsReport r;
  double umax = 1.0;
  for (double v : sol.u2) umax = std::max(umax, std::abs(v));
  for (std::size_t j = 0; j < J; ++j) {
    double integral = load.u0[j];
    r.identity_error = std::max(r.identity_error, std::abs(sol.U2(0, j) - integral));
    for (std::size_t n = 0; n < N; ++n) {
      integral += (-kappa.mean[n] * basis.lambda(j) * sol.U1(n, j) + source_at(load, n, j)) * h +
                  noise.p(n, j);
      r.identity_error = std::max(r.identity_error, std::abs(sol.U2(n + 1, j) - integral));
    }
  }
  r.identity_error /= umax;
  for (std::size_t n = 0; n < N; ++n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      const double d = sol.U1(n, j) - 0.5 * (sol.U2(n, j) + sol.U2(n + 1, j));
      acc += d * d;
    }
    r.version_gap = std::max(r.version_gap, std::sqrt(acc));
  }
  return r;
}

void write_solution_csv(std::ostream& os, const SpaceTimeSolution& sol) {
  os << "node,mode,U1,U2\n";
  os.precision(17);
  for (std::size_t n = 0; n <= sol.N; ++n) {
    for (std::size_t j = 0; j < sol.J; ++j) {
      os << n << ',' << j + 1 << ',';
      if (n < sol.N) os << sol.U1(n, j);
      os << ',' << sol.U2(n, j) << '\n';
    }
  }
}

std::string energy_summary_json(const SpaceTimeSolution& sol, const TimeGrid& grid,
                                const EigenBasis& basis, double beta) {
  const EnergyNorms e = energy_norms(sol, grid, basis, beta);
  nlohmann::json j = {{"J", sol.J},
                      {"N", sol.N},
                      {"T", grid.T()},
                      {"beta", beta},
                      {"v_energy", e.v_energy},
                      {"sup_h", e.sup_h},
                      {"total", e.total()}};
  return j.dump();
}

}  // namespace stheat
