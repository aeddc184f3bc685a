#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "json.hpp"
#include "stheat/infsup.hpp"
#include "stheat/spacetime.hpp"

using namespace stheat;

namespace {

LoadSpec make_load(std::size_t J, double psi, SpectralVec u0 = {}) {
  LoadSpec l;
  l.u0 = u0.size() ? u0 : SpectralVec(J);
  if (psi != 0.0) l.psi_diag.assign(J, psi);
  return l;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("spacetime") {
  TEST_CASE("sweep agrees with a dense solve of the space-time system") {
    // Independent route: B from the inf-sup module, load vector assembled from
    // the hat functions, B^T y = F solved by LU.
    const std::size_t J = 3;
    const std::size_t N = 12;
    const double kappa = 1.7;
    const EigenBasis basis = EigenBasis::build(J);
    const TimeGrid grid(0.8, N);
    const double h = grid.h();
    LoadSpec load = make_load(J, 0.9, SpectralVec{1.0, -0.5, 0.25});
    load.f = {SpectralVec{0.3, 2.0, -1.0}};
    const QSpec q = QSpec::power_law(J, 2.0);
    const NoiseSample noise = sample_noise(grid, q, PathId{4, 2});
    const SpaceTimeSolution sol =
        assemble_and_solve(OperatorSpec::constant(kappa), load, noise, grid, basis);
    const DiscreteForm form = assemble_form(kappa, grid, basis, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      Eigen::VectorXd F = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N + 1));
      const double f = load.f.front()[j];
      for (std::size_t k = 0; k <= N; ++k) {
        double v = k == 0 ? load.u0[j] : 0.0;
        if (k > 0) {
          v += f * h / 2.0 + 0.9 * noise.iW(j, k - 1) / h;
        }
        if (k < N) {
          v += f * h / 2.0 + 0.9 * (noise.dW(j, k) - noise.iW(j, k) / h);
        }
        F(static_cast<Eigen::Index>(k)) = v;
      }
      const Eigen::VectorXd y = form.B[j].transpose().fullPivLu().solve(F);
      for (std::size_t n = 0; n < N; ++n) {
        CHECK(sol.U1(n, j) == doctest::Approx(y(static_cast<Eigen::Index>(n))).epsilon(1e-12));
      }
      CHECK(sol.U2(N, j) == doctest::Approx(y(static_cast<Eigen::Index>(N))).epsilon(1e-12));
    }
    CHECK(residual(sol, OperatorSpec::constant(kappa), load, noise, grid, basis) < 1e-13);
  }

  TEST_CASE("single deterministic mode follows the Crank-Nicolson amplification") {
    const EigenBasis basis = EigenBasis::build(1);
    const TimeGrid grid(1.0, 20);
    const double x = basis.lambda(0) * grid.h();
    const double r = (1.0 - x / 2.0) / (1.0 + x / 2.0);
    const LoadSpec load = make_load(1, 0.0, SpectralVec{2.0});
    const NoiseSample silent(1, 20, grid.h(), PathId{1, 0});
    const SpaceTimeSolution sol =
        assemble_and_solve(OperatorSpec::constant(1.0), load, silent, grid, basis);
    for (std::size_t n = 0; n < 20; ++n) {
      CHECK(sol.U2(n, 0) == doctest::Approx(2.0 * std::pow(r, n)).epsilon(1e-12));
      CHECK(sol.U1(n, 0) == doctest::Approx(2.0 * std::pow(r, n) / (1.0 + x / 2.0)).epsilon(1e-12));
    }
    // The steady state f / lambda is a fixed point.
    LoadSpec steady = make_load(1, 0.0, SpectralVec{3.0 / basis.lambda(0)});
    steady.f = {SpectralVec{3.0}};
    const SpaceTimeSolution s2 =
        assemble_and_solve(OperatorSpec::constant(1.0), steady, silent, grid, basis);
    CHECK(s2.U2(20, 0) == doctest::Approx(3.0 / basis.lambda(0)).epsilon(1e-13));
  }

  TEST_CASE("solution is linear in the data") {
    const std::size_t J = 4;
    const EigenBasis basis = EigenBasis::build(J);
    const TimeGrid grid(1.0, 16);
    const QSpec q = QSpec::power_law(J, 2.0);
    const NoiseSample noise = sample_noise(grid, q, PathId{8, 1});
    const OperatorSpec op = OperatorSpec::uniform(0.5, 2.0);
    const LoadSpec a = make_load(J, 0.0, SpectralVec{1.0, 0.0, 2.0, 0.0});
    const LoadSpec b = make_load(J, 1.3);
    LoadSpec ab = make_load(J, 1.3, SpectralVec{1.0, 0.0, 2.0, 0.0});
    const auto sa = assemble_and_solve(op, a, noise, grid, basis);
    const auto sb = assemble_and_solve(op, b, noise, grid, basis);
    const auto sab = assemble_and_solve(op, ab, noise, grid, basis);
    std::vector<double> sum(sa.u2.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = sa.u2[i] + sb.u2[i];
    CHECK(max_abs_diff(sum, sab.u2) < 1e-14);
    const auto zero = assemble_and_solve(op, make_load(J, 0.0), noise, grid, basis);
    CHECK(max_abs_diff(zero.u1, std::vector<double>(zero.u1.size(), 0.0)) == 0.0);
  }

  TEST_CASE("integral identity, residual and versions with random and time-dependent kappa") {
    const std::size_t J = 6;
    const EigenBasis basis = EigenBasis::build(J);
    const TimeGrid grid(1.0, 32);
    const QSpec q = QSpec::power_law(J, 2.0);
    const NoiseSample noise = sample_noise(grid, q, PathId{2, 9});
    LoadSpec load = make_load(J, 1.0, SpectralVec::unit(J, 0));
    load.f = {SpectralVec{0.0, 1.0, 0.0, 0.0, 0.0, 0.0}};
    const NoiseLoad nl = additive_noise_load(load, noise);
    for (const OperatorSpec& op :
         {OperatorSpec::uniform(0.5, 2.0),
          OperatorSpec::time_function(0.5, 2.0, [](double t) { return 1.0 + 0.5 * std::sin(7.0 * t); })}) {
      const KappaPath k = op.realize(grid, noise.id());
      const SpaceTimeSolution sol = solve(k, load, nl, grid, basis);
      const WeakResidual r = weak_residual(sol, k, load, nl, grid, basis);
      CHECK(r.rows.size() == 2 * 32 * J);
      CHECK(r.relative() < 1e-13);
      CHECK(check_versions(sol, k, load, nl, grid, basis).identity_error < 1e-13);
    }
  }

  TEST_CASE("version gap shrinks like sqrt(h)") {
    // ||U1_n - (U2_n + U2_{n+1})/2|| is driven by Q - P/2, of size sqrt(h).
    const std::size_t J = 4;
    const EigenBasis basis = EigenBasis::build(J);
    const QSpec q = QSpec::power_law(J, 2.0);
    const LoadSpec load = make_load(J, 1.0);
    double prev = 0.0;
    for (std::size_t N : {64, 128, 256}) {
      const TimeGrid grid(1.0, N);
      double acc = 0.0;
      for (std::size_t p = 0; p < 200; ++p) {
        const NoiseSample noise = sample_noise(grid, q, PathId{12, p});
        const NoiseLoad nl = additive_noise_load(load, noise);
        const KappaPath k = OperatorSpec::constant(1.0).realize(grid, noise.id());
        const SpaceTimeSolution sol = solve(k, load, nl, grid, basis);
        const double g = check_versions(sol, k, load, nl, grid, basis).version_gap;
        acc += g * g;
      }
      const double rms = std::sqrt(acc / 200.0);
      if (prev > 0.0) {
        CHECK(prev / rms > 1.2);
        CHECK(prev / rms < 1.7);
      }
      prev = rms;
    }
  }

  TEST_CASE("energy functional matches the exact discrete second moments") {
    // Per mode with a = (1 - x/2)/(1 + x/2):
    //   U2_{n+1} = a U2_n + a P + (1 - a) Q,   u_n = (U2_n + P - Q)/(1 + x/2),
    // with (P, Q) of covariance gamma [[h, h/2], [h/2, h/3]].
    const std::size_t J = 4;
    const std::size_t N = 32;
    const EigenBasis basis = EigenBasis::build(J);
    const TimeGrid grid(1.0, N);
    const double h = grid.h();
    const QSpec q = QSpec::power_law(J, 2.0);
    const LoadSpec load = make_load(J, 1.0, SpectralVec::unit(J, 0));
    double expected = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      const double lambda = basis.lambda(j);
      const double x = lambda * h;
      const double a = (1.0 - x / 2.0) / (1.0 + x / 2.0);
      const double g = q.gamma(j);
      const double inc = g * (a * a * h + a * (1.0 - a) * h + (1.0 - a) * (1.0 - a) * h / 3.0);
      double m = load.u0[j] * load.u0[j];
      for (std::size_t n = 0; n < N; ++n) {
        expected += lambda * h * (m + g * h / 3.0) / ((1.0 + x / 2.0) * (1.0 + x / 2.0));
        m = a * a * m + inc;
      }
    }
    const std::size_t M = 4000;
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t p = 0; p < M; ++p) {
      const NoiseSample noise = sample_noise(grid, q, PathId{21, p});
      const auto sol = assemble_and_solve(OperatorSpec::constant(1.0), load, noise, grid, basis);
      const double e = energy_norms(sol, grid, basis).v_energy;
      s1 += e;
      s2 += e * e;
    }
    const double mean = s1 / static_cast<double>(M);
    const double se = std::sqrt((s2 / static_cast<double>(M) - mean * mean) / static_cast<double>(M));
    CHECK(std::abs(mean - expected) < 3.5 * se);
  }

  TEST_CASE("energy norms, test function norms and output") {
    const std::size_t J = 2;
    const EigenBasis basis = EigenBasis::build(J);
    const TimeGrid grid(1.0, 4);
    SpaceTimeSolution sol(J, 4);
    sol.u1 = {1, 0, 0, 1, 0, 0, 2, 0};
    sol.u2 = {0, 0, 0, 3, 0, 0, 0, 0, 1, 1};
    const double l1 = basis.lambda(0);
    const double l2 = basis.lambda(1);
    const EnergyNorms e = energy_norms(sol, grid, basis, 1.0);
    CHECK(e.v_energy == doctest::Approx(0.25 * (l1 * l1 + l2 * l2 + 4.0 * l1 * l1)));
    CHECK(e.sup_h == doctest::Approx(9.0 * l2));
    CHECK(sol.terminal() == SpectralVec{1.0, 1.0});

    // Row norms equal the diagonal of the test Gram matrix.
    const DiscreteForm form = assemble_form(1.0, grid, basis, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
      const auto& gx = form.GX[j];
      CHECK(test_function_norm(0, 4, grid.h(), basis.lambda(j)) ==
            doctest::Approx(std::sqrt(gx(0, 0))));
      CHECK(test_function_norm(2, 4, grid.h(), basis.lambda(j)) ==
            doctest::Approx(std::sqrt(gx(2, 2))));
      CHECK(test_function_norm(7, 4, grid.h(), basis.lambda(j)) ==
            doctest::Approx(std::sqrt(gx(4, 4))));
    }

    std::ostringstream csv;
    write_solution_csv(csv, sol);
    CHECK(csv.str().rfind("node,mode,U1,U2\n", 0) == 0);
    const auto doc = nlohmann::json::parse(energy_summary_json(sol, grid, basis));
    CHECK(doc.at("v_energy").get<double>() == doctest::Approx(energy_norms(sol, grid, basis).v_energy));
  }

  TEST_CASE("shape errors") {
    const EigenBasis basis = EigenBasis::build(2);
    const TimeGrid grid(1.0, 4);
    const QSpec q = QSpec::power_law(3, 2.0);
    const NoiseSample noise = sample_noise(grid, q, PathId{1, 0});
    CHECK_THROWS_AS(assemble_and_solve(OperatorSpec::constant(1.0), make_load(2, 1.0), noise, grid, basis),
                    std::invalid_argument);
    SpaceTimeSolution sol(2, 4);
    const KappaPath k = OperatorSpec::constant(1.0).realize(grid, PathId{1, 0});
    CHECK_THROWS_AS(sweep(k, make_load(2, 0.0), NoiseLoad(2, 4), grid, basis, 3, 2, sol),
                    std::invalid_argument);
  }
}
