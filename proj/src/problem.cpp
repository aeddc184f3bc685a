#include "stheat/problem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "stheat/numerics.hpp"

namespace stheat {

OperatorSpec::OperatorSpec(double a_min, double a_max, KappaLaw law)
    : a_min_(a_min), a_max_(a_max), law_(std::move(law)) {
  if (!(a_min > 0.0)) throw std::invalid_argument("OperatorSpec: A_min must be positive");
  if (!(a_max >= a_min)) throw std::invalid_argument("OperatorSpec: A_max must be >= A_min");
  if (law_.kind == KappaLaw::Kind::Constant && (law_.value < a_min || law_.value > a_max)) {
    throw std::invalid_argument("OperatorSpec: constant kappa outside [A_min, A_max]");
  }
  if (law_.kind == KappaLaw::Kind::TimeFunction && !law_.fn) {
    throw std::invalid_argument("OperatorSpec: time-function law without a function");
  }
}

OperatorSpec OperatorSpec::constant(double kappa) {
  return OperatorSpec(kappa, kappa, KappaLaw{KappaLaw::Kind::Constant, kappa, {}});
}

OperatorSpec OperatorSpec::uniform(double a_min, double a_max) {
  return OperatorSpec(a_min, a_max, KappaLaw{KappaLaw::Kind::UniformIid, 0.5 * (a_min + a_max), {}});
}

OperatorSpec OperatorSpec::time_function(double a_min, double a_max,
                                         std::function<double(double)> fn) {
  return OperatorSpec(a_min, a_max, KappaLaw{KappaLaw::Kind::TimeFunction, 0.0, std::move(fn)});
}

KappaPath OperatorSpec::realize(const TimeGrid& grid, PathId id) const {
  const std::size_t N = grid.N();
  KappaPath k;
  k.mean.resize(N);
  k.first.resize(N);
  switch (law_.kind) {
    case KappaLaw::Kind::Constant:
      for (std::size_t n = 0; n < N; ++n) {
        k.mean[n] = law_.value;
        k.first[n] = 0.5 * law_.value;
      }
      break;
    case KappaLaw::Kind::UniformIid: {
      const CounterRng rng(id.seed);
      for (std::size_t n = 0; n < N; ++n) {
        const double u = rng.uniforms(id.path, static_cast<std::uint32_t>(n), 0, Stream::Kappa).first;
        const double kappa = a_min_ + (a_max_ - a_min_) * u;
        k.mean[n] = kappa;
        k.first[n] = 0.5 * kappa;
      }
      break;
    }
    case KappaLaw::Kind::TimeFunction: {
      k.piecewise_constant = false;
      static const QuadratureRule rule = gauss_legendre(8);
      const double h = grid.h();
      for (std::size_t n = 0; n < N; ++n) {
        double m0 = 0.0;
        double m1 = 0.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
          const double tau = rule.nodes[q];
          const double kappa = law_.fn(grid.node(n) + tau * h);
          if (kappa < a_min_ || kappa > a_max_) {
            throw std::logic_error("OperatorSpec: kappa(t) = " + std::to_string(kappa) +
                                   " outside [A_min, A_max]");
          }
          m0 += rule.weights[q] * kappa;
          m1 += rule.weights[q] * kappa * tau;
        }
        k.mean[n] = m0;
        k.first[n] = m1;
      }
      break;
    }
  }
  for (std::size_t n = 0; n < N; ++n) {
    if (k.mean[n] < a_min_ * (1.0 - 1e-14) || k.mean[n] > a_max_ * (1.0 + 1e-14)) {
      throw std::logic_error("OperatorSpec: realised kappa outside [A_min, A_max]");
    }
  }
  return k;
}

const SpectralVec* LoadSpec::source(std::size_t n) const {
  if (f.empty()) return nullptr;
  if (f.size() == 1) return &f.front();
  return &f.at(n);
}

void LoadSpec::validate(std::size_t J, std::size_t N) const {
  if (u0.size() != J) {
    throw std::invalid_argument("LoadSpec: U0 has " + std::to_string(u0.size()) +
                                " modes, expected " + std::to_string(J));
  }
  if (!f.empty() && f.size() != 1 && f.size() != N) {
    throw std::invalid_argument("LoadSpec: f must be empty, constant or one entry per interval");
  }
  for (const auto& fn : f) {
    if (fn.size() != J) throw std::invalid_argument("LoadSpec: source has wrong mode count");
  }
  if (!psi_diag.empty() && psi_diag.size() != J) {
    throw std::invalid_argument("LoadSpec: psi_diag must have one entry per mode");
  }
  for (double p : psi_diag) {
    if (!std::isfinite(p)) throw std::invalid_argument("LoadSpec: non-finite psi entry");
  }
}

double source_energy(const LoadSpec& load, const TimeGrid& grid, const EigenBasis& basis,
                     double s) {
  if (load.f.empty()) return 0.0;
  if (load.f.size() == 1) return grid.T() * frac_norm_sq(load.f.front().coeffs(), s, basis);
  double acc = 0.0;
  for (const auto& fn : load.f) acc += grid.h() * frac_norm_sq(fn.coeffs(), s, basis);
  return acc;
}

}  // namespace stheat
