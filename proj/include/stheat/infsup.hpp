#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "stheat/noise.hpp"
#include "stheat/spectral.hpp"

namespace stheat {

/// Matrices of the space-time form B*(y, x) on the discrete spaces of the
/// solver, one (N+1) x (N+1) block per mode.
///
/// Rows index the trial space Y x H: u_0 .. u_{N-1} (constant on each
/// interval) followed by the terminal value y2. Columns index X: the hat
/// functions at t_0 .. t_N, or at the nodes of a refined test grid. The Gram
/// matrices carry the beta-weighted norms
///   ||y||^2 = int ||y1||^2_{1+beta} + ||y2||^2_{beta},
///   ||x||^2 = int ||x||^2_{1-beta} + int ||x'||^2_{-1-beta}
///             + ||x(0)||^2_{-beta} + ||x(T)||^2_{-beta}.
struct DiscreteForm {
  std::vector<Eigen::MatrixXd> B;
  std::vector<Eigen::MatrixXd> GX;
  std::vector<Eigen::MatrixXd> GY;
  double beta = 0.0;
  double kappa = 1.0;
  std::size_t N = 0;
  std::size_t test_refinement = 1;  // 0 for forms built from_matrices

  std::size_t blocks() const noexcept { return B.size(); }

  /// Single-block form from arbitrary matrices; the Gram matrices must be
  /// symmetric positive definite.
  static DiscreteForm from_matrices(Eigen::MatrixXd b, Eigen::MatrixXd gx, Eigen::MatrixXd gy);

  /// Block-diagonal assembly of all modes (for small verification cases).
  Eigen::MatrixXd dense_B() const;
  Eigen::MatrixXd dense_GX() const;
  Eigen::MatrixXd dense_GY() const;
};

/// Constant kappa; the sweep varies kappa between assemblies. With
/// test_refinement = r > 1 the test hats live on the grid with every interval
/// split into r cells, so B is (N+1) x (rN+1) and the sup over x approaches
/// the sup over all of X as r grows. r = 1 gives the solver's square pairing.
/// Throws std::invalid_argument for beta < 0, kappa <= 0 or r = 0.
DiscreteForm assemble_form(double kappa, const TimeGrid& grid, const EigenBasis& basis,
                           double beta = 0.0, std::size_t test_refinement = 1);

struct DiscreteConstants {
  double c_B = 0.0;  // inf-sup constant, 0 when B is numerically singular
  double C_B = 0.0;  // boundedness constant
};

/// Extreme singular values of L_Y^{-1} B L_X^{-T} over all blocks. Throws
/// std::domain_error when a Gram matrix is not positive definite.
DiscreteConstants discrete_constants(const DiscreteForm& form);

/// Inf-sup constant with the trial space of the solver and the test hats on
/// the grid refined r times, without forming dense test Gram factors: per mode
/// c_B^2 is the smallest eigenvalue of G_Y^{-1/2} B G_X^{-1} B^T G_Y^{-1/2}
/// with G_X tridiagonal. Increases towards inf over discrete y of the sup over
/// all of X, which bounds the continuous inf-sup constant from above.
double enriched_infsup(double kappa, const TimeGrid& grid, const EigenBasis& basis, double beta,
                       std::size_t test_refinement);

/// Refinement that keeps kappa lambda_J h / r <= 1 for the stiffest mode.
std::size_t default_test_refinement(double kappa, const TimeGrid& grid, const EigenBasis& basis);

/// |c_B(B) - c_B(B^T with the Gram roles exchanged)|. Throws
/// std::invalid_argument for rectangular blocks.
double swap_check(const DiscreteForm& form);

/// inf_y sup_x B*(y, x) / (||x||_X ||y||_Y) together with the threshold
/// min{1, A_min} it is compared against. Reported, not asserted: the
/// discrete sup runs over a subspace.
struct Bnb2Report {
  double value = 0.0;
  double threshold = 0.0;
  bool meets_threshold() const noexcept { return value >= threshold; }
};

Bnb2Report bnb2_check(const DiscreteForm& form, double a_min);

/// Brute-force inf over unit y of sup over unit x on a 2 x 2 block, using
/// `samples` equally spaced angles on each circle.
double bnb2_brute_force_2x2(const DiscreteForm& form, std::size_t samples);

/// max_n ||x(t_n)||^2_{-beta} / ||x||_X^2 for nodal values x of mode `block`.
double node_embedding_ratio(const DiscreteForm& form, std::size_t block,
                            const Eigen::VectorXd& x, const EigenBasis& basis);

/// min{A_min, 1/A_max, A_min/A_max} / 2.
double infsup_lower_bound(double a_min, double a_max);
/// sqrt(2 max{1, A_max^2}).
double boundedness_upper_bound(double a_max);

}  // namespace stheat
