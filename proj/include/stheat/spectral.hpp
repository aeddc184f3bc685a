#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace stheat {

/// Truncated eigenbasis of the Dirichlet Laplacian A0 = -d^2/dx^2 on (0, 1):
/// phi_j(x) = sqrt(2) sin(j pi x), lambda_j = (j pi)^2, j = 1..J.
///
/// Mode j is stored at index j - 1 everywhere in this library.
class EigenBasis {
 public:
  /// Throws std::invalid_argument for J == 0.
  static EigenBasis build(std::size_t J);

  std::size_t size() const noexcept { return lambdas_.size(); }
  double lambda(std::size_t index) const { return lambdas_.at(index); }
  std::span<const double> lambdas() const noexcept { return lambdas_; }

  /// phi_{index+1}(x).
  double eigenfunction(std::size_t index, double x) const;

 private:
  explicit EigenBasis(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {}
  std::vector<double> lambdas_;
};

/// Coefficients v_j = <v, phi_j> of an element of the fractional scale Hdot^s.
class SpectralVec {
 public:
  SpectralVec() = default;
  explicit SpectralVec(std::size_t J) : coeffs_(J, 0.0) {}
  explicit SpectralVec(std::vector<double> coeffs);
  SpectralVec(std::initializer_list<double> coeffs) : SpectralVec(std::vector<double>(coeffs)) {}

  /// Unit vector phi_{index+1} in a basis of size J.
  static SpectralVec unit(std::size_t J, std::size_t index);

  std::size_t size() const noexcept { return coeffs_.size(); }
  double operator[](std::size_t i) const noexcept { return coeffs_[i]; }
  double& operator[](std::size_t i) noexcept { return coeffs_[i]; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<double> coeffs() noexcept { return coeffs_; }

  SpectralVec& operator+=(const SpectralVec& other);
  SpectralVec& operator*=(double s) noexcept;
  friend SpectralVec operator+(SpectralVec a, const SpectralVec& b) { return a += b; }
  friend SpectralVec operator*(double s, SpectralVec a) { return a *= s; }

  bool operator==(const SpectralVec&) const = default;

 private:
  std::vector<double> coeffs_;
};

/// ||v||_{Hdot^s} = (sum_j lambda_j^s v_j^2)^{1/2}. s = 0, 1, -1 give the
/// H, V and V* norms.
double frac_norm(std::span<const double> v, double s, const EigenBasis& basis);
inline double frac_norm(const SpectralVec& v, double s, const EigenBasis& basis) {
  return frac_norm(v.coeffs(), s, basis);
}

/// Squared version of frac_norm without the square root.
double frac_norm_sq(std::span<const double> v, double s, const EigenBasis& basis);

/// A0^s v.
SpectralVec apply_A0_power(const SpectralVec& v, double s, const EigenBasis& basis);

/// V-V* duality pairing; coincides with the H inner product on H.
/// Throws std::invalid_argument on mismatched truncations.
double dual_pairing(const SpectralVec& u, const SpectralVec& v);

}  // namespace stheat
