#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "stheat/problem.hpp"

using namespace stheat;

TEST_SUITE("problem") {
  TEST_CASE("operator laws and bounds") {
    CHECK_THROWS_AS(OperatorSpec::uniform(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(OperatorSpec::uniform(2.0, 1.0), std::invalid_argument);
    CHECK(OperatorSpec::constant(2.0).is_constant());
    CHECK_FALSE(OperatorSpec::uniform(0.5, 2.0).is_constant());

    const TimeGrid g(1.0, 64);
    const KappaPath c = OperatorSpec::constant(1.5).realize(g, PathId{1, 0});
    CHECK(c.piecewise_constant);
    CHECK(c.mean[10] == 1.5);
    CHECK(c.first[10] == 0.75);

    const OperatorSpec u = OperatorSpec::uniform(0.5, 2.0);
    const KappaPath a = u.realize(g, PathId{1, 0});
    const KappaPath b = u.realize(g, PathId{1, 1});
    bool differs = false;
    for (std::size_t n = 0; n < 64; ++n) {
      CHECK(a.mean[n] >= 0.5);
      CHECK(a.mean[n] <= 2.0);
      CHECK(a.first[n] == doctest::Approx(0.5 * a.mean[n]));
      differs = differs || a.mean[n] != b.mean[n];
    }
    CHECK(differs);
    CHECK(u.realize(g, PathId{1, 0}).mean == a.mean);
  }

  TEST_CASE("time-dependent kappa moments") {
    // kappa(t) = 1 + t: mean over I_n is 1 + t_n + h/2, first moment
    // (1/h) int (1 + s) (s - t_n)/h ds = (1 + t_n)/2 + h/3.
    const TimeGrid g(1.0, 4);
    const OperatorSpec op = OperatorSpec::time_function(1.0, 2.0, [](double t) { return 1.0 + t; });
    const KappaPath k = op.realize(g, PathId{1, 0});
    CHECK_FALSE(k.piecewise_constant);
    for (std::size_t n = 0; n < 4; ++n) {
      const double t = g.node(n);
      CHECK(k.mean[n] == doctest::Approx(1.0 + t + g.h() / 2.0).epsilon(1e-14));
      CHECK(k.first[n] == doctest::Approx((1.0 + t) / 2.0 + g.h() / 3.0).epsilon(1e-14));
    }
    const OperatorSpec bad =
        OperatorSpec::time_function(1.0, 1.5, [](double t) { return 1.0 + t; });
    CHECK_THROWS_AS(bad.realize(g, PathId{1, 0}), std::logic_error);
  }

  TEST_CASE("load validation and source energy") {
    LoadSpec l;
    l.u0 = SpectralVec{1.0, 0.0};
    l.f = {SpectralVec{2.0, 0.0}};
    l.psi_diag = {1.0, 1.0};
    CHECK_NOTHROW(l.validate(2, 8));
    CHECK_THROWS_AS(l.validate(3, 8), std::invalid_argument);
    LoadSpec wrong = l;
    wrong.f = {SpectralVec{1.0, 0.0}, SpectralVec{1.0, 0.0}};
    CHECK_THROWS_AS(wrong.validate(2, 8), std::invalid_argument);
    wrong = l;
    wrong.psi_diag = {1.0};
    CHECK_THROWS_AS(wrong.validate(2, 8), std::invalid_argument);

    // int_0^T ||f||_{V*}^2 = T * 4 / pi^2.
    const EigenBasis b = EigenBasis::build(2);
    const TimeGrid g(2.0, 8);
    CHECK(source_energy(l, g, b) == doctest::Approx(2.0 * 4.0 / (std::numbers::pi * std::numbers::pi)));
    CHECK(l.source(5) == &l.f.front());
    CHECK(LoadSpec{}.source(0) == nullptr);
  }
}
