#include "stheat/multiplicative.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "stheat/numerics.hpp"

namespace stheat {

double noise_basis_function(NoiseBasis basis, std::size_t k, double xi) {
  const double kk = static_cast<double>(k);
  if (basis == NoiseBasis::Sine) return std::numbers::sqrt2 * std::sin((kk + 1.0) * std::numbers::pi * xi);
  if (k == 0) return 1.0;
  return std::numbers::sqrt2 * std::cos(kk * std::numbers::pi * xi);
}

double noise_basis_sup(NoiseBasis basis, std::size_t k) {
  return (basis == NoiseBasis::Cosine && k == 0) ? 1.0 : std::numbers::sqrt2;
}

double GSpec::operator()(double t, double xi) const {
  return g0 * time_factor(t) * space_factor(xi);
}

Collocation::Collocation(const GSpec& gspec, const EigenBasis& basis, std::size_t noise_modes)
    : g_(gspec) {
  const std::size_t J = basis.size();
  std::size_t m = gspec.m_colloc;
  if (m == 0) {
    m = 4 * (J + noise_modes) + 16;
  } else if (m < 2 * J + 1) {
    throw std::invalid_argument("Collocation: m_colloc must be at least 2J+1 = " +
                                std::to_string(2 * J + 1));
  }
  const QuadratureRule rule = gauss_legendre(m);
  const auto M = static_cast<Eigen::Index>(m);
  xi_ = Eigen::Map<const Eigen::VectorXd>(rule.nodes.data(), M);
  w_ = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), M);
  phi_.resize(M, static_cast<Eigen::Index>(J));
  e_.resize(M, static_cast<Eigen::Index>(noise_modes));
  for (Eigen::Index i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < J; ++j) {
      phi_(i, static_cast<Eigen::Index>(j)) = basis.eigenfunction(j, xi_[i]);
    }
    for (std::size_t k = 0; k < noise_modes; ++k) {
      e_(i, static_cast<Eigen::Index>(k)) = noise_basis_function(gspec.noise_basis, k, xi_[i]);
    }
  }
}

Eigen::MatrixXd Collocation::coupling(std::span<const double> v, double t) const {
  if (static_cast<Eigen::Index>(v.size()) != phi_.cols()) {
    throw std::invalid_argument("Collocation: vector does not match the basis");
  }
  const Eigen::Map<const Eigen::VectorXd> coeffs(v.data(), phi_.cols());
  Eigen::VectorXd weighted = phi_ * coeffs;  // v(xi_i)
  for (Eigen::Index i = 0; i < weighted.size(); ++i) weighted[i] *= w_[i] * g_(t, xi_[i]);
  return phi_.transpose() * weighted.asDiagonal() * e_;
}

double Collocation::l20_norm_sq(std::span<const double> v, const QSpec& q, double t) const {
  if (static_cast<Eigen::Index>(q.size()) != e_.cols()) {
    throw std::invalid_argument("Collocation: QSpec does not match the noise modes");
  }
  const Eigen::Map<const Eigen::VectorXd> coeffs(v.data(), phi_.cols());
  const Eigen::VectorXd vals = phi_ * coeffs;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    double wsum = 0.0;
    for (Eigen::Index k = 0; k < e_.cols(); ++k) {
      wsum += q.gamma(static_cast<std::size_t>(k)) * e_(i, k) * e_(i, k);
    }
    const double g = g_(t, xi_[i]);
    acc += w_[i] * g * g * vals[i] * vals[i] * wsum;
  }
  return acc;
}

Eigen::MatrixXd apply_G(const SpectralVec& v, const GSpec& gspec, double t,
                        const EigenBasis& basis, std::size_t noise_modes) {
  return Collocation(gspec, basis, noise_modes).coupling(v.coeffs(), t);
}

double l20_norm_sq(const SpectralVec& v, const GSpec& gspec, const QSpec& q, double t,
                   const EigenBasis& basis) {
  return Collocation(gspec, basis, q.size()).l20_norm_sq(v.coeffs(), q, t);
}

double multiplier_bound_constant(const QSpec& q, NoiseBasis basis) {
  double acc = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double s = noise_basis_sup(basis, k);
    acc += q.gamma(k) * s * s;
  }
  return std::sqrt(acc);
}

double multiplier_operator_norm(const GSpec& gspec, const QSpec& q, double t,
                                std::size_t xi_points) {
  if (xi_points < 2) throw std::invalid_argument("multiplier_operator_norm: need 2 points");
  double best = 0.0;
  for (std::size_t i = 0; i < xi_points; ++i) {
    const double xi = static_cast<double>(i) / static_cast<double>(xi_points - 1);
    double w = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double e = noise_basis_function(gspec.noise_basis, k, xi);
      w += q.gamma(k) * e * e;
    }
    best = std::max(best, std::abs(gspec(t, xi)) * std::sqrt(w));
  }
  return best;
}

namespace {

// int_0^T fn(t) dt with an 8-point rule on each of `panels` panels.
template <typename Fn>
double integrate_time(Fn&& fn, double T, std::size_t panels) {
  static const QuadratureRule rule = gauss_legendre(8);
  const double width = T / static_cast<double>(panels);
  CompensatedSum acc;
  for (std::size_t p = 0; p < panels; ++p) {
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = width * (static_cast<double>(p) + rule.nodes[i]);
      acc.add(width * rule.weights[i] * fn(t));
    }
  }
  return acc.value();
}

void check_p(double p) {
  if (!(p > 2.0)) throw std::invalid_argument("holder_bound: p must exceed 2");
}

}  // namespace

double lp_bound(const GSpec& gspec, const QSpec& q, double T, std::size_t panels) {
  check_p(gspec.p);
  // ||G(t)|| = |a(t)| ||G_b|| for separable g, so the xi-sup is evaluated once.
  GSpec frozen = gspec;
  frozen.time_profile = nullptr;
  const double space_norm = multiplier_operator_norm(frozen, q, 0.0);
  const double integral = integrate_time(
      [&](double t) { return std::pow(std::abs(gspec.time_factor(t)) * space_norm, gspec.p); }, T,
      panels);
  return std::pow(integral, 1.0 / gspec.p);
}

double holder_bound(double v_energy, double kappa, double p, double T) {
  check_p(p);
  return std::pow(T, (p - 2.0) / p) * kappa * kappa * v_energy;
}

double holder_bound_printed_exponent(double v_energy, double kappa, double p, double T) {
  check_p(p);
  return std::pow(T, p / (p - 2.0)) * kappa * kappa * v_energy;
}

HolderCheck holder_check(const GSpec& gspec, const QSpec& q, const EigenBasis& basis,
                         const SpectralVec& v, double T, std::size_t panels) {
  HolderCheck h;
  h.kappa = lp_bound(gspec, q, T, panels);
  const Collocation colloc(gspec, basis, q.size());
  h.lhs = integrate_time([&](double t) { return colloc.l20_norm_sq(v.coeffs(), q, t); }, T, panels);
  const double v2 = frac_norm_sq(v.coeffs(), 0.0, basis);
  h.rhs = holder_bound(v2, h.kappa, gspec.p, T);
  h.rhs_printed = holder_bound_printed_exponent(v2, h.kappa, gspec.p, T);
  return h;
}

double PicardSegment::max_ratio() const {
  double m = 0.0;
  for (double r : ratios) {
    if (std::isfinite(r)) m = std::max(m, r);
  }
  return m;
}

std::size_t PicardResult::total_iterations() const {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.increments.size();
  return n;
}

namespace {

struct PicardContext {
  const KappaPath& kappa;
  const LoadSpec& load;
  const NoiseSample& noise;
  const Collocation& colloc;
  const TimeGrid& grid;
  const EigenBasis& basis;
  const PicardOptions& options;
};

// sqrt(sum h ||du1||_V^2 + max ||dU2||_H^2) over the segment.
double segment_norm(const SpaceTimeSolution& a, const SpaceTimeSolution* b, std::size_t n_begin,
                    std::size_t n_end, const TimeGrid& grid, const EigenBasis& basis) {
  const std::size_t J = a.J;
  double v_part = 0.0;
  double h_part = 0.0;
  for (std::size_t n = n_begin; n < n_end; ++n) {
    double node = 0.0;
    double cell = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      const double du = a.U1(n, j) - (b ? b->U1(n, j) : 0.0);
      const double dy = a.U2(n + 1, j) - (b ? b->U2(n + 1, j) : 0.0);
      cell += basis.lambda(j) * du * du;
      node += dy * dy;
    }
    v_part += grid.h() * cell;
    h_part = std::max(h_part, node);
  }
  return std::sqrt(v_part + h_part);
}

PicardSegment run_segment(const PicardContext& ctx, std::size_t n_begin, std::size_t n_end,
                          SpaceTimeSolution& sol) {
  const std::size_t J = ctx.basis.size();
  const std::size_t K = ctx.noise.modes();
  const double h = ctx.grid.h();
  PicardSegment seg;
  seg.n_begin = n_begin;
  seg.n_end = n_end;

  NoiseLoad load_noise(J, ctx.grid.N());
  sweep(ctx.kappa, ctx.load, load_noise, ctx.grid, ctx.basis, n_begin, n_end, sol);

  Eigen::VectorXd dw(static_cast<Eigen::Index>(K));
  Eigen::VectorXd iw(static_cast<Eigen::Index>(K));
  std::size_t growing = 0;
  for (std::size_t it = 0; it < ctx.options.max_iter; ++it) {
    for (std::size_t n = n_begin; n < n_end; ++n) {
      const Eigen::MatrixXd C = ctx.colloc.coupling(sol.U2(n), ctx.grid.node(n));
      for (std::size_t k = 0; k < K; ++k) {
        dw[static_cast<Eigen::Index>(k)] = ctx.noise.dW(k, n);
        iw[static_cast<Eigen::Index>(k)] = ctx.noise.iW(k, n) / h;
      }
      const Eigen::VectorXd p = C * dw;
      const Eigen::VectorXd q = C * iw;
      for (std::size_t j = 0; j < J; ++j) {
        load_noise.P[n * J + j] = p[static_cast<Eigen::Index>(j)];
        load_noise.Q[n * J + j] = q[static_cast<Eigen::Index>(j)];
      }
    }
    SpaceTimeSolution next = sol;
    sweep(ctx.kappa, ctx.load, load_noise, ctx.grid, ctx.basis, n_begin, n_end, next);
    const double diff = segment_norm(next, &sol, n_begin, n_end, ctx.grid, ctx.basis);
    const double size = segment_norm(next, nullptr, n_begin, n_end, ctx.grid, ctx.basis);
    double rel = 0.0;
    if (diff > 0.0) rel = size > 0.0 ? diff / size : std::numeric_limits<double>::infinity();
    sol = std::move(next);
    if (!seg.increments.empty()) {
      const double prev = seg.increments.back();
      const double ratio = prev > 0.0 ? rel / prev : 0.0;
      seg.ratios.push_back(ratio);
      growing = ratio > 1.0 ? growing + 1 : 0;
    }
    seg.increments.push_back(rel);
    if (!std::isfinite(rel)) break;
    if (rel < ctx.options.tol) {
      seg.converged = true;
      break;
    }
    if (growing >= 3) break;
  }
  return seg;
}

}  // namespace

PicardResult picard_solve(const OperatorSpec& op, const LoadSpec& load, const GSpec& gspec,
                          const QSpec& q, const TimeGrid& grid, const EigenBasis& basis,
                          PathId id, const PicardOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("picard_solve: tol must be positive");
  if (options.max_iter == 0) throw std::invalid_argument("picard_solve: max_iter must be >= 1");
  if (options.initial_segments == 0 || options.initial_segments > grid.N()) {
    throw std::invalid_argument("picard_solve: initial_segments must lie in [1, N]");
  }
  const std::size_t J = basis.size();
  const std::size_t N = grid.N();
  LoadSpec additive = load;
  additive.psi_diag.clear();
  additive.validate(J, N);

  const KappaPath kappa = op.realize(grid, id);
  const NoiseSample noise = sample_noise(grid, q, id);
  const Collocation colloc(gspec, basis, q.size());
  const PicardContext ctx{kappa, additive, noise, colloc, grid, basis, options};

  PicardResult result;
  result.solution = SpaceTimeSolution(J, N);
  std::copy(additive.u0.coeffs().begin(), additive.u0.coeffs().end(),
            result.solution.u2.begin());

  std::deque<std::pair<std::size_t, std::size_t>> todo;
  for (std::size_t s = 0; s < options.initial_segments; ++s) {
    todo.emplace_back(s * N / options.initial_segments, (s + 1) * N / options.initial_segments);
  }
  result.converged = true;
  while (!todo.empty()) {
    const auto [a, b] = todo.front();
    todo.pop_front();
    PicardSegment seg = run_segment(ctx, a, b, result.solution);
    const bool ok = seg.converged;
    result.segments.push_back(std::move(seg));
    if (ok) continue;
    if (b - a <= 1) {
      result.converged = false;
      break;
    }
    const std::size_t mid = a + (b - a) / 2;
    todo.emplace_front(mid, b);
    todo.emplace_front(a, mid);
  }
  return result;
}

void write_picard_trace(std::ostream& os, const PicardResult& result, std::uint64_t path,
                        bool header) {
  if (header) os << "path,segment,iterate,increment,ratio\n";
  os.precision(17);
  for (std::size_t s = 0; s < result.segments.size(); ++s) {
    const auto& seg = result.segments[s];
    for (std::size_t k = 0; k < seg.increments.size(); ++k) {
      os << path << ',' << s << ',' << k + 1 << ',' << seg.increments[k] << ',';
      if (k >= 1) os << seg.ratios[k - 1];
      os << '\n';
    }
  }
}

}  // namespace stheat
