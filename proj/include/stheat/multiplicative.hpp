#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "stheat/noise.hpp"
#include "stheat/problem.hpp"
#include "stheat/spacetime.hpp"
#include "stheat/spectral.hpp"

namespace stheat {

/// Orthonormal basis {e_k} of L^2(0,1) in which Q is diagonal.
///   Sine:   e_k = phi_{k+1} = sqrt(2) sin((k+1) pi xi), sup |e_k| = sqrt(2)
///   Cosine: e_0 = 1, e_k = sqrt(2) cos(k pi xi),        sup |e_0| = 1
enum class NoiseBasis { Sine, Cosine };

double noise_basis_function(NoiseBasis basis, std::size_t k, double xi);
double noise_basis_sup(NoiseBasis basis, std::size_t k);

/// Pointwise multiplier ((G(t) v) w)(xi) = g(t, xi) v(xi) w(xi) with
/// g(t, xi) = g0 a(t) b(xi).
struct GSpec {
  double g0 = 0.0;
  std::function<double(double)> time_profile;   // a(t); empty means 1
  std::function<double(double)> space_profile;  // b(xi); empty means 1
  double p = 4.0;                               // temporal integrability, > 2
  std::size_t m_colloc = 0;                     // 0 picks a size from J and K
  NoiseBasis noise_basis = NoiseBasis::Sine;

  double operator()(double t, double xi) const;
  double time_factor(double t) const { return time_profile ? time_profile(t) : 1.0; }
  double space_factor(double xi) const { return space_profile ? space_profile(xi) : 1.0; }
};

/// Gauss-Legendre collocation of products on (0, 1), tabulated once per
/// (basis, noise modes, g).
class Collocation {
 public:
  /// Throws std::invalid_argument when gspec.m_colloc is set below 2J+1.
  Collocation(const GSpec& gspec, const EigenBasis& basis, std::size_t noise_modes);

  std::size_t points() const noexcept { return static_cast<std::size_t>(xi_.size()); }

  /// C[j][k] = int g(t, xi) v(xi) e_k(xi) phi_j(xi) d xi.
  Eigen::MatrixXd coupling(std::span<const double> v, double t) const;

  /// sum_k gamma_k int g^2 v^2 e_k^2 d xi.
  double l20_norm_sq(std::span<const double> v, const QSpec& q, double t) const;

 private:
  GSpec g_;
  Eigen::VectorXd xi_;
  Eigen::VectorXd w_;
  Eigen::MatrixXd phi_;  // points x J
  Eigen::MatrixXd e_;    // points x K
};

/// Column k holds the spectral coefficients of g(t,.) v e_k.
Eigen::MatrixXd apply_G(const SpectralVec& v, const GSpec& gspec, double t,
                        const EigenBasis& basis, std::size_t noise_modes);

/// ||G(t) v||^2 in the Hilbert-Schmidt norm of L_2^0.
double l20_norm_sq(const SpectralVec& v, const GSpec& gspec, const QSpec& q, double t,
                   const EigenBasis& basis);

/// (sum_k gamma_k sup |e_k|^2)^{1/2}; ||G(t)||_{L(H, L_2^0)} <= this * sup |g(t,.)|.
double multiplier_bound_constant(const QSpec& q, NoiseBasis basis);

/// ||G(t)||_{L(H, L_2^0)} = sup_xi |g(t, xi)| (sum_k gamma_k e_k(xi)^2)^{1/2},
/// evaluated on `xi_points` equispaced points.
double multiplier_operator_norm(const GSpec& gspec, const QSpec& q, double t,
                                std::size_t xi_points = 2001);

/// (int_0^T ||G(t)||^p dt)^{1/p} by Gauss-Legendre on `panels` panels.
double lp_bound(const GSpec& gspec, const QSpec& q, double T, std::size_t panels = 256);

/// T^{(p-2)/p} kappa^2 v_energy. Throws std::invalid_argument for p <= 2.
double holder_bound(double v_energy, double kappa, double p, double T);
/// The same bound with the exponent p/(p-2).
double holder_bound_printed_exponent(double v_energy, double kappa, double p, double T);

/// Both sides of the Hoelder estimate for a time-constant v:
///   lhs = int_0^T ||G(t) v||^2_{L_2^0} dt,  rhs = T^{(p-2)/p} kappa^2 ||v||_H^2.
struct HolderCheck {
  double lhs = 0.0;
  double kappa = 0.0;
  double rhs = 0.0;
  double rhs_printed = 0.0;
  double ratio() const noexcept { return rhs > 0.0 ? lhs / rhs : 0.0; }
};

HolderCheck holder_check(const GSpec& gspec, const QSpec& q, const EigenBasis& basis,
                         const SpectralVec& v, double T, std::size_t panels = 256);

struct PicardOptions {
  double tol = 1e-8;
  std::size_t max_iter = 100;
  /// Split [0, T] into this many equal segments before iterating.
  std::size_t initial_segments = 1;
};

/// Iteration history on one continuation segment [t_begin, t_end).
struct PicardSegment {
  std::size_t n_begin = 0;
  std::size_t n_end = 0;
  std::vector<double> increments;  // relative increment per iterate
  std::vector<double> ratios;      // increments[k] / increments[k-1]
  bool converged = false;

  double max_ratio() const;
};

struct PicardResult {
  SpaceTimeSolution solution;
  std::vector<PicardSegment> segments;  // in solve order, abandoned attempts included
  bool converged = false;
  std::size_t total_iterations() const;
};

/// Fixed-point iteration for the linear multiplicative problem with noise
/// sampled once on `id` and frozen across iterates. Psi on I_n is
/// G(t_n) U2(t_n) of the previous iterate. A segment whose increments grow
/// for three consecutive iterates, or that exhausts max_iter, is bisected
/// and solved piecewise; a failing single interval ends the solve with
/// converged = false. load.psi_diag is ignored.
PicardResult picard_solve(const OperatorSpec& op, const LoadSpec& load, const GSpec& gspec,
                          const QSpec& q, const TimeGrid& grid, const EigenBasis& basis,
                          PathId id, const PicardOptions& options = {});

/// CSV `path,segment,iterate,increment,ratio`.
void write_picard_trace(std::ostream& os, const PicardResult& result, std::uint64_t path,
                        bool header = true);

}  // namespace stheat
