#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "jostlab/eikonal.hpp"

using namespace jostlab;

namespace {

// Independent quadrature for oracles.
template <class F>
cplx boost_integral(F f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  auto re = [&](double x) { return f(x).real(); };
  auto im = [&](double x) { return f(x).imag(); };
  return {gauss_kronrod<double, 61>::integrate(re, a, b, 25, 1e-14),
          gauss_kronrod<double, 61>::integrate(im, a, b, 25, 1e-14)};
}

}  // namespace

TEST_CASE("spectral point invariants") {
  CHECK_THROWS_AS(SpectralPoint::interior(cplx(0.0, 0.0)), Error);
  CHECK_THROWS_AS(SpectralPoint(cplx(1.0, 0.0), CutSide::Interior), Error);
  CHECK_THROWS_AS(SpectralPoint(cplx(1.0, 1.0), CutSide::AbovePlus), Error);
  CHECK_THROWS_AS(SpectralPoint::above(0.0), Error);
  CHECK(SpectralPoint::above(2.0).conjugate().side() == CutSide::BelowMinus);
}

TEST_CASE("omega branch") {
  CHECK(omega_pointwise(0.0, 1.0, SpectralPoint::above(-1.0)) == cplx(1.0, 0.0));
  CHECK(omega_pointwise(0.0, 1.0, SpectralPoint::above(1.0)) == cplx(0.0, -1.0));
  CHECK(omega_pointwise(0.0, 1.0, SpectralPoint::below(1.0)) == cplx(0.0, 1.0));
  // q > lambda: real and positive on both rims; oracle is the principal root of (q - lambda)/p.
  CHECK(std::abs(omega_pointwise(3.0, 4.0, SpectralPoint::below(2.0)) - std::sqrt(cplx(1.0 / 4.0))) < 1e-15);
  CHECK(std::abs(omega_pointwise(3.0, 4.0, SpectralPoint::above(2.0)) - 0.5) < 1e-15);
  // Continuity from the interior.
  for (double lam : {-3.0, 0.5, 7.0}) {
    const cplx up = omega_pointwise(1.0, 2.0, SpectralPoint::interior(cplx(lam, 1e-12)));
    const cplx dn = omega_pointwise(1.0, 2.0, SpectralPoint::interior(cplx(lam, -1e-12)));
    CHECK(std::abs(up - omega_pointwise(1.0, 2.0, SpectralPoint::above(lam))) < 1e-10);
    CHECK(std::abs(dn - omega_pointwise(1.0, 2.0, SpectralPoint::below(lam))) < 1e-10);
  }
  for (double th = 0.05; th < 2 * kPi; th += 0.3)
    CHECK(omega_pointwise(0.2, 1.5, SpectralPoint::interior(std::polar(2.0, th))).real() > 0.0);
}

TEST_CASE("Omega and weight") {
  auto fr = free_model();
  CHECK(std::abs(big_omega(fr, SpectralPoint::above(-1.0), 3.0) - 3.0) < 1e-13);
  CHECK(std::abs(big_omega(fr, SpectralPoint::above(4.0), 2.0) - cplx(0.0, -4.0)) < 1e-13);
  CHECK(std::abs(weight_a(fr, SpectralPoint::above(-1.0), 2.0).to_complex() - std::exp(-2.0)) < 1e-15);
  CHECK(std::abs(weight_a(fr, SpectralPoint::above(1.0), kPi).to_complex() + 1.0) < 1e-13);
  auto big = weight_a(fr, SpectralPoint::interior(cplx(0.0, 1.0)), 100.0);
  CHECK(big.log_mag == doctest::Approx(-100.0 * std::cos(kPi / 4)).epsilon(1e-13));

  auto pl = make_model(family::PowerLaw{1.0, 0.5});
  const auto z = SpectralPoint::above(1.0);
  const cplx oracle = boost_integral([](double y) { return cplx(0.0, -std::sqrt(1.0 - 1.0 / std::sqrt(1.0 + y))); }, 0.0, 10.0);
  CHECK(std::abs(big_omega(pl, z, 10.0) - oracle) < 1e-12);

  // Turning point inside the range: q = lambda at x = 3 for lambda = 1/2.
  const auto zt = SpectralPoint::above(0.5);
  auto tp = turning_points(pl, 0.5, 0.0, 10.0);
  REQUIRE(tp.size() == 1);
  CHECK(tp[0] == doctest::Approx(3.0).epsilon(1e-12));
  const cplx o2 = boost_integral([](double y) { return cplx(std::sqrt(1.0 / std::sqrt(1.0 + y) - 0.5)); }, 0.0, 3.0) +
                  boost_integral([](double y) { return cplx(0.0, -std::sqrt(0.5 - 1.0 / std::sqrt(1.0 + y))); }, 3.0, 10.0);
  CHECK(std::abs(big_omega(pl, zt, 10.0) - o2) < 1e-10);

  // |a| nonincreasing and Omega additive.
  auto field = eikonal_field(pl, SpectralPoint::interior(cplx(0.3, 0.4)), linspace(0.0, 20.0, 41));
  for (std::size_t i = 1; i < field.grid.size(); ++i) {
    CHECK(field.a[i].log_mag <= field.a[i - 1].log_mag);
    CHECK(field.omega[i].real() > 0.0);
  }
  CHECK(std::abs(field.Omega.back() - big_omega(pl, SpectralPoint::interior(cplx(0.3, 0.4)), 20.0)) < 1e-12);
}

TEST_CASE("remainder") {
  CHECK(remainder_r(free_model(), SpectralPoint::above(2.0), 3.0) == cplx(0.0));
  CHECK(remainder_r(make_model(family::StepWell{4.0, 1.0}), SpectralPoint::above(2.0), 3.0) == cplx(0.0));
  auto m = make_model(family::PowerLaw{1.0, 0.5}, family::PowerApproachP{2.0, 0.7, 1.3});
  for (auto z : {SpectralPoint::above(-1.0), SpectralPoint::above(3.0), SpectralPoint::interior(cplx(1.0, 2.0))}) {
    for (double x : {0.0, 1.5, 12.0}) {
      // Oracle: finite difference of p omega.
      const double h = 1e-5;
      auto pw = [&](double y) { return m.p(y) * omega(m, z, y); };
      const double xc = std::max(x, h);
      const cplx fd = (pw(xc + h) - pw(xc - h)) / (2 * h);
      CHECK(std::abs(remainder_r(m, z, xc) - fd) < 1e-8);
    }
  }
  auto pl = make_model(family::PowerLaw{1.0, 0.5});
  CHECK(std::abs(remainder_r(pl, SpectralPoint::above(-1.0), 0.0) + 0.25 / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("regularized phases") {
  auto fr = free_model();
  for (int k = 0; k <= 2; ++k) CHECK(std::abs(regularized_phase(fr, SpectralPoint::above(-1.0), 1.0, k) - 1.0) < 1e-14);
  CHECK(std::abs(regularized_phase(fr, SpectralPoint::above(4.0), 2.0, 0) - cplx(0.0, -4.0)) < 1e-14);

  // Omega - Omega_k is Cauchy when q is in L^(k+1).
  auto check_cauchy = [](const CoefficientModel& m, const SpectralPoint& z, int order) {
    double prev_gap = 1e300;
    cplx prev = big_omega(m, z, 100.0) - regularized_phase(m, z, 100.0, order);
    for (double x : {400.0, 1600.0, 6400.0}) {
      const cplx d = big_omega(m, z, x) - regularized_phase(m, z, x, order);
      const double gap = std::abs(d - prev);
      CHECK(gap < 0.6 * prev_gap);
      prev_gap = gap;
      prev = d;
    }
  };
  check_cauchy(make_model(family::PowerLaw{1.0, 0.75}), SpectralPoint::above(2.0), 1);
  check_cauchy(make_model(family::PowerLaw{1.0, 0.5}), SpectralPoint::above(2.0), 2);
  check_cauchy(make_model(family::PowerLaw{1.0, 0.5}, family::PowerApproachP{1.0, 0.5, 0.5}),
               SpectralPoint::interior(cplx(-1.0, 0.5)), 2);
}

TEST_CASE("beta limit") {
  CHECK(std::abs(beta_limit(free_model(), SpectralPoint::above(-1.0))) < 1e-15);
  auto ex = make_model(family::ExpDecay{1.0, 1.0});
  const auto z = SpectralPoint::above(-1.0);
  boost::math::quadrature::exp_sinh<double> es;
  const double oracle = es.integrate([](double x) { return std::sqrt(std::exp(-x) + 1.0) - 1.0; }, 1e-13);
  CHECK(std::abs(beta_limit(ex, z) - oracle) < 1e-10);
  // Cut point with p varying: compare with Omega - Omega_0 at large x.
  auto m = make_model(family::PowerLaw{1.0, 3.0}, family::PowerApproachP{1.0, 0.5, 3.0});
  const auto zc = SpectralPoint::above(2.0);
  const double X = 2000.0;
  CHECK(std::abs(beta_limit(m, zc) - (big_omega(m, zc, X) - regularized_phase(m, zc, X, 0))) < 1e-6);
  CHECK_THROWS_AS(beta_limit(make_model(family::PowerLaw{1.0, 0.5}), z), Error);
}
