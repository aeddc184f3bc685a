#include "stheat/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stheat {

EigenBasis EigenBasis::build(std::size_t J) {
  if (J == 0) throw std::invalid_argument("EigenBasis: truncation level J must be >= 1");
  std::vector<double> lambdas(J);
  for (std::size_t i = 0; i < J; ++i) {
    const double root = static_cast<double>(i + 1) * std::numbers::pi;
    lambdas[i] = root * root;
  }
  return EigenBasis(std::move(lambdas));
}

double EigenBasis::eigenfunction(std::size_t index, double x) const {
  if (index >= size()) throw std::out_of_range("EigenBasis::eigenfunction: mode index");
  return std::numbers::sqrt2 * std::sin(static_cast<double>(index + 1) * std::numbers::pi * x);
}

SpectralVec::SpectralVec(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw std::invalid_argument("SpectralVec: non-finite coefficient");
  }
}

SpectralVec SpectralVec::unit(std::size_t J, std::size_t index) {
  SpectralVec v(J);
  v.coeffs_.at(index) = 1.0;
  return v;
}

SpectralVec& SpectralVec::operator+=(const SpectralVec& other) {
  if (other.size() != size()) throw std::invalid_argument("SpectralVec: size mismatch in +=");
  for (std::size_t i = 0; i < size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralVec& SpectralVec::operator*=(double s) noexcept {
  for (double& c : coeffs_) c *= s;
  return *this;
}

double frac_norm_sq(std::span<const double> v, double s, const EigenBasis& basis) {
  if (v.size() > basis.size()) {
    throw std::invalid_argument("frac_norm: vector has " + std::to_string(v.size()) +
                                " modes, basis only " + std::to_string(basis.size()));
  }
  double acc = 0.0;
  if (s == 0.0) {
    for (double c : v) acc += c * c;
    return acc;
  }
  const auto lambdas = basis.lambdas();
  for (std::size_t j = 0; j < v.size(); ++j) acc += std::pow(lambdas[j], s) * v[j] * v[j];
  return acc;
}

double frac_norm(std::span<const double> v, double s, const EigenBasis& basis) {
  return std::sqrt(frac_norm_sq(v, s, basis));
}

SpectralVec apply_A0_power(const SpectralVec& v, double s, const EigenBasis& basis) {
  if (v.size() > basis.size()) throw std::invalid_argument("apply_A0_power: basis too small");
  SpectralVec out = v;
  if (s == 0.0) return out;
  for (std::size_t j = 0; j < v.size(); ++j) out[j] *= std::pow(basis.lambda(j), s);
  return out;
}

double dual_pairing(const SpectralVec& u, const SpectralVec& v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("dual_pairing: truncations differ (" + std::to_string(u.size()) +
                                " vs " + std::to_string(v.size()) + ")");
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) acc += u[j] * v[j];
  return acc;
}

}  // namespace stheat
