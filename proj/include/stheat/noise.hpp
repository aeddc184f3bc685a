#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "stheat/rng.hpp"
#include "stheat/spectral.hpp"

namespace stheat {

/// Uniform time grid t_n = n T / N on [0, T].
class TimeGrid {
 public:
  TimeGrid(double T, std::size_t N);

  double T() const noexcept { return T_; }
  std::size_t N() const noexcept { return N_; }
  double h() const noexcept { return T_ / static_cast<double>(N_); }
  double node(std::size_t n) const noexcept { return static_cast<double>(n) * h(); }

 private:
  double T_;
  std::size_t N_;
};

/// Covariance of the Q-Wiener process, diagonal in the noise basis:
/// Q e_j = gamma_j e_j.
class QSpec {
 public:
  explicit QSpec(std::vector<double> gammas);

  /// gamma_j = j^{-rho}, j = 1..J.
  static QSpec power_law(std::size_t J, double rho);
  /// Single active mode `index` with variance `gamma`; K modes in total.
  static QSpec rank_one(std::size_t K, std::size_t index, double gamma);

  std::size_t size() const noexcept { return gammas_.size(); }
  double gamma(std::size_t index) const { return gammas_.at(index); }
  std::span<const double> gammas() const noexcept { return gammas_; }
  std::optional<double> decay_exponent() const noexcept { return decay_; }
  double trace() const noexcept;

  /// Same law on more (or fewer) modes; requires a power-law generator.
  QSpec resized(std::size_t J) const;

 private:
  std::vector<double> gammas_;
  std::optional<double> decay_;
};

/// One realisation of the noise functionals on a time grid. For mode j and
/// interval [t_n, t_{n+1}]:
///   dW = W_j(t_{n+1}) - W_j(t_n),   iW = int (s - t_n) dW_j(s),
/// jointly Gaussian with covariance gamma_j [[h, h^2/2], [h^2/2, h^3/3]].
class NoiseSample {
 public:
  NoiseSample(std::size_t modes, std::size_t N, double h, PathId id);

  std::size_t modes() const noexcept { return modes_; }
  std::size_t intervals() const noexcept { return N_; }
  double h() const noexcept { return h_; }
  PathId id() const noexcept { return id_; }

  double dW(std::size_t j, std::size_t n) const noexcept { return dW_[n * modes_ + j]; }
  double iW(std::size_t j, std::size_t n) const noexcept { return iW_[n * modes_ + j]; }
  void set(std::size_t j, std::size_t n, double dw, double iw) noexcept {
    dW_[n * modes_ + j] = dw;
    iW_[n * modes_ + j] = iw;
  }

  bool operator==(const NoiseSample& other) const;

 private:
  std::size_t modes_;
  std::size_t N_;
  double h_;
  PathId id_;
  std::vector<double> dW_;
  std::vector<double> iW_;
};

/// Exact joint sample of (dW, iW) for every mode of q and every interval of
/// the grid. The draw at (mode j, interval n) depends only on
/// (id.seed, id.path, j, n).
NoiseSample sample_noise(const TimeGrid& grid, const QSpec& q, PathId id);

/// ||Psi Q^{1/2}||_{L2(H, Hdot^s)} for Psi diagonal in the eigenbasis:
/// (sum_j lambda_j^s psi_j^2 gamma_j)^{1/2}.
double hs_norm_psiQ(std::span<const double> psi_diag, const QSpec& q, const EigenBasis& basis,
                    double s);

/// ||A^{(beta-1)/2} Q^{1/2}||_{L2(H)} = (sum_j lambda_j^{beta-1} gamma_j)^{1/2}.
double coupling_norm_beta(const QSpec& q, const EigenBasis& basis, double beta);

/// Per-mode terms lambda_j^s psi_j^2 gamma_j whose sum is hs_norm_psiQ^2.
std::vector<double> hs_terms(std::span<const double> psi_diag, const QSpec& q,
                             const EigenBasis& basis, double s);

/// Divergence heuristic for a series truncated at J: compares the block sums
/// over (J/4, J/2] and (J/2, J]. For terms ~ j^a the ratio tends to 2^{a+1},
/// so ratio >= 1 flags a divergent (a >= -1) series.
struct SeriesGrowth {
  double partial_half = 0.0;  // sum over j <= J/2
  double partial_full = 0.0;  // sum over j <= J
  double block_ratio = 0.0;
  bool divergent = false;
};

SeriesGrowth series_growth(std::span<const double> terms);

/// CSV dump with header `path,j,n,dW,iW` (j and n are 1- and 0-based).
void write_noise_csv(std::ostream& os, const NoiseSample& noise, bool header = true);

/// Little-endian binary dump for replay; read_noise_binary inverts it.
void write_noise_binary(std::ostream& os, const NoiseSample& noise);
NoiseSample read_noise_binary(std::istream& is);

}  // namespace stheat
