#include <cmath>

#include "doctest.h"
#include "jostlab/chebyshev.hpp"
#include "jostlab/numerics.hpp"

using namespace jostlab;

TEST_CASE("ivp follows decaying exponential") {
  PairRhs rhs = [](double, const Pair& y, Pair& d) {
    d[0] = y[1];
    d[1] = y[0];
  };
  std::vector<double> out = {1.0, 2.5, 5.0};
  auto r = integrate_ivp(rhs, 0.0, {cplx(1.0), cplx(-1.0)}, out, {}, Tolerances{});
  for (std::size_t i = 0; i < out.size(); ++i) {
    const cplx v = r.values[i][0] * std::exp(r.log_scale[i]);
    CHECK(std::abs(v - std::exp(-out[i])) < 1e-10);
  }
}

TEST_CASE("ivp harmonic oscillator returns to zero at pi") {
  PairRhs rhs = [](double, const Pair& y, Pair& d) {
    d[0] = y[1];
    d[1] = -y[0];
  };
  std::vector<double> out = {kPi};
  auto r = integrate_ivp(rhs, 0.0, {cplx(0.0), cplx(1.0)}, out, {}, Tolerances{});
  CHECK(std::abs(r.values[0][0]) < 1e-10);
  CHECK(std::abs(r.values[0][1] + 1.0) < 1e-10);
  // Dense evaluation between checkpoints.
  CHECK(std::abs(r.dense.at_unscaled(1.0)[0] - std::sin(1.0)) < 1e-10);
}

TEST_CASE("backward integration and renormalisation") {
  PairRhs rhs = [](double, const Pair& y, Pair& d) {
    d[0] = y[1];
    d[1] = y[0];
  };
  std::vector<double> out = {-400.0};
  auto r = integrate_ivp(rhs, 0.0, {cplx(1.0), cplx(-1.0)}, out, {}, Tolerances{});
  const double logv = std::log(std::abs(r.values[0][0])) + r.log_scale[0];
  CHECK(logv == doctest::Approx(400.0).epsilon(1e-10));
}

TEST_CASE("quadrature") {
  auto e = quad_semi_infinite([](double y) { return cplx(std::exp(-y)); }, 0.0, 1e-12, 1e-15);
  CHECK(std::abs(e.value - 1.0) < 1e-11);
  std::vector<double> kinks = {0.3};
  auto k = quad_adaptive([](double y) { return cplx(std::abs(y - 0.3)); }, 0.0, 1.0, 1e-12, 1e-15, kinks);
  CHECK(std::abs(k.value - (0.045 + 0.245)) < 1e-13);
  auto gl = gauss_legendre(0.0, 2.0, 4);
  double s = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * std::pow(gl.nodes[i], 7);
  CHECK(s == doctest::Approx(32.0).epsilon(1e-13));
}

TEST_CASE("roots") {
  CHECK(find_root_scalar([](double x) { return std::cos(x); }, 1.0, 2.0) == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(find_root_scalar([](double x) { return 2 * x + 1; }, -3.0, 3.0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK_THROWS_AS(find_root_scalar([](double x) { return x * x + 1; }, -1.0, 1.0), Error);
  auto roots = sign_changes([](double x) { return std::sin(x); }, linspace(0.5, 10.0, 200));
  REQUIRE(roots.size() == 3);
  CHECK(roots[2] == doctest::Approx(3 * kPi).epsilon(1e-12));
}

TEST_CASE("chebyshev right integration and interpolation") {
  const auto& rule = ChebyshevRule::standard();
  std::vector<cplx> g;
  for (double t : rule.nodes()) g.push_back(std::exp(t));
  for (std::size_t k = 0; k < rule.size(); ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < rule.size(); ++j) acc += rule.right_integration(k, j) * g[j];
    CHECK(std::abs(acc - (std::exp(1.0) - std::exp(rule.nodes()[k]))) < 1e-13);
  }
  CHECK(std::abs(rule.interpolate(g, 0.123) - std::exp(0.123)) < 1e-14);
}

TEST_CASE("log-polar complex") {
  auto a = LogPolarComplex::exp_of(cplx(800.0, 1.0));
  auto b = LogPolarComplex::exp_of(cplx(799.0, 0.5));
  CHECK_FALSE(a.representable());
  auto c = a / b;
  CHECK(std::abs(c.to_complex() - std::exp(cplx(1.0, 0.5))) < 1e-13);
  Tolerances bad;
  bad.ode_rtol = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}
