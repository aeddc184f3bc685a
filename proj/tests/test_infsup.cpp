#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "doctest.h"
#include "stheat/infsup.hpp"

using namespace stheat;

TEST_SUITE("infsup") {
  TEST_CASE("form dimensions and the solver pairing") {
    const EigenBasis basis = EigenBasis::build(3);
    const TimeGrid grid(1.0, 8);
    const DiscreteForm f = assemble_form(2.0, grid, basis);
    REQUIRE(f.blocks() == 3);
    const double x = 2.0 * basis.lambda(1) * grid.h();
    const Eigen::MatrixXd& b = f.B[1];
    CHECK(b.rows() == 9);
    CHECK(b.cols() == 9);
    CHECK(b(3, 3) == doctest::Approx(1.0 + x / 2.0));
    CHECK(b(3, 4) == doctest::Approx(-1.0 + x / 2.0));
    CHECK(b(3, 5) == 0.0);
    CHECK(b(8, 8) == 1.0);
    const DiscreteForm r = assemble_form(2.0, grid, basis, 0.0, 4);
    CHECK(r.B[0].cols() == 33);
    CHECK(r.test_refinement == 4);
    CHECK_THROWS_AS(assemble_form(0.0, grid, basis), std::invalid_argument);
    CHECK_THROWS_AS(assemble_form(1.0, grid, basis, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(assemble_form(1.0, grid, basis, 0.0, 0), std::invalid_argument);
  }

  TEST_CASE("singular values do not depend on beta") {
    // Every mode is scaled by lambda^beta on both sides.
    const EigenBasis basis = EigenBasis::build(4);
    const TimeGrid grid(1.0, 16);
    const DiscreteConstants a = discrete_constants(assemble_form(1.0, grid, basis, 0.0));
    const DiscreteConstants b = discrete_constants(assemble_form(1.0, grid, basis, 1.0));
    CHECK(a.c_B == doctest::Approx(b.c_B).epsilon(1e-10));
    CHECK(a.C_B == doctest::Approx(b.C_B).epsilon(1e-10));
  }

  TEST_CASE("constants respect the analytic bounds") {
    const EigenBasis basis = EigenBasis::build(4);
    const TimeGrid grid(1.0, 256);
    const DiscreteConstants c = discrete_constants(assemble_form(1.0, grid, basis));
    CHECK(c.C_B <= std::sqrt(2.0) + 1e-12);
    CHECK(c.c_B <= c.C_B);
    // Resolved modes: kappa lambda_J h is about 0.6 here.
    CHECK(c.c_B >= 0.5);
    CHECK(infsup_lower_bound(0.5, 2.0) == doctest::Approx(0.125));
    CHECK(infsup_lower_bound(1.0, 1.0) == doctest::Approx(0.5));
    CHECK(boundedness_upper_bound(0.5) == doctest::Approx(std::sqrt(2.0)));
    CHECK(boundedness_upper_bound(2.0) == doctest::Approx(std::sqrt(8.0)));
  }

  TEST_CASE("swapping roles leaves the smallest singular value unchanged") {
    const EigenBasis basis = EigenBasis::build(6);
    const TimeGrid grid(1.0, 32);
    for (double kappa : {0.5, 1.0, 2.0}) {
      CHECK(swap_check(assemble_form(kappa, grid, basis, 0.5)) <= 1e-10);
    }
    CHECK_THROWS_AS(swap_check(assemble_form(1.0, grid, basis, 0.0, 2)), std::invalid_argument);
  }

  TEST_CASE("bnb2 value against a brute-force scan") {
    Eigen::MatrixXd b(2, 2);
    b << 1.0, -0.4, 0.3, 0.8;
    Eigen::MatrixXd gx(2, 2);
    gx << 2.0, 0.3, 0.3, 1.0;
    Eigen::MatrixXd gy(2, 2);
    gy << 1.0, -0.2, -0.2, 0.5;
    const DiscreteForm f = DiscreteForm::from_matrices(b, gx, gy);
    const Bnb2Report r = bnb2_check(f, 0.7);
    CHECK(r.threshold == 0.7);
    CHECK(bnb2_brute_force_2x2(f, 720) == doctest::Approx(r.value).epsilon(1e-6));
    CHECK(r.value == doctest::Approx(discrete_constants(f).c_B).epsilon(1e-12));
    CHECK_THROWS_AS(bnb2_brute_force_2x2(f, 4), std::invalid_argument);
  }

  TEST_CASE("invalid Gram matrices") {
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd gx(2, 2);
    gx << 1.0, 2.0, 2.0, 1.0;
    const Eigen::MatrixXd gy = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(discrete_constants(DiscreteForm::from_matrices(b, gx, gy)), std::domain_error);
    CHECK_THROWS_AS(DiscreteForm::from_matrices(b, Eigen::MatrixXd::Identity(3, 3), gy),
                    std::invalid_argument);
  }

  TEST_CASE("node values are controlled by the test norm") {
    const EigenBasis basis = EigenBasis::build(3);
    const TimeGrid grid(1.0, 16);
    for (double beta : {0.0, 1.0}) {
      const DiscreteForm f = assemble_form(1.0, grid, basis, beta);
      for (std::size_t j = 0; j < 3; ++j) {
        Eigen::VectorXd x(17);
        for (Eigen::Index n = 0; n < 17; ++n) x(n) = std::sin(0.7 * static_cast<double>(n)) + 0.2;
        CHECK(node_embedding_ratio(f, j, x, basis) <= 1.0 + 1e-12);
      }
    }
  }

  TEST_CASE("enriched constant matches the dense refined computation") {
    const EigenBasis basis = EigenBasis::build(4);
    const TimeGrid grid(1.0, 16);
    for (std::size_t r : {1, 3}) {
      for (double beta : {0.0, 1.0}) {
        const double dense = discrete_constants(assemble_form(1.5, grid, basis, beta, r)).c_B;
        CHECK(enriched_infsup(1.5, grid, basis, beta, r) == doctest::Approx(dense).epsilon(1e-8));
      }
    }
    // More test functions can only raise the inf-sup value.
    CHECK(enriched_infsup(1.0, grid, basis, 0.0, 8) >= enriched_infsup(1.0, grid, basis, 0.0, 2));
    const std::size_t r = default_test_refinement(1.0, grid, basis);
    CHECK(1.0 * basis.lambda(3) * grid.h() / static_cast<double>(r) <= 1.0);
  }
}
