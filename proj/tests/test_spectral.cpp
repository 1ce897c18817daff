#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "doctest.h"
#include "jostlab/spectral.hpp"
#include "oracles.hpp"

using namespace jostlab;

namespace {

// Smooth bump supported in [a, b].
CompactFunction bump(double a, double b, double height = 1.0) {
  CompactFunction f;
  f.length = b;
  f.kinks = {a};
  f.f = [=](double x) {
    const double t = (2.0 * x - a - b) / (b - a);
    return std::abs(t) < 1.0 ? cplx(height * std::exp(1.0 - 1.0 / (1.0 - t * t))) : cplx(0.0);
  };
  return f;
}

// Free Dirichlet kernel sinh(s x<) e^{-s x>} / s with Re s > 0, s = sqrt(-z).
cplx free_kernel(cplx z, double x, double y) {
  cplx s = std::sqrt(-z);
  if (s.real() < 0.0) s = -s;
  return std::sinh(s * std::min(x, y)) * std::exp(-s * std::max(x, y)) / s;
}

// Relative grid residual of -(p u')' + (q - z) u - g from fourth-order differences of the flux.
double resolvent_residual(const CoefficientModel& m, cplx z, const CompactFunction& g, const SampledFunction& u) {
  const double h = u.x[1] - u.x[0];
  double num = 0.0, den = 0.0;
  for (std::size_t i = 2; i + 2 < u.x.size(); ++i) {
    const cplx d = (-u.pf_prime[i + 2] + 8.0 * u.pf_prime[i + 1] - 8.0 * u.pf_prime[i - 1] + u.pf_prime[i - 2]) /
                   (12.0 * h);
    const cplx r = -d + (m.q_total(u.x[i]) - z) * u.f[i] - g(u.x[i]);
    num += std::norm(r);
    den += std::norm(g(u.x[i]));
  }
  return std::sqrt(num / den);
}

double step_well_root(double V0, double lo, double hi) {
  auto f = [V0](double E) {
    const double k = std::sqrt(V0 + E), kap = std::sqrt(-E);
    return k * std::cos(k) + kap * std::sin(k);
  };
  boost::uintmax_t it = 200;
  auto br = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), it);
  return 0.5 * (br.first + br.second);
}

}  // namespace

TEST_CASE("free resolvent kernel") {
  auto fr = free_model();
  for (cplx z : {cplx(-1.0, 0.0), cplx(0.0, 1.0), cplx(2.0, 0.5)}) {
    ResolventKernel R(fr, BoundaryCondition::dirichlet(), SpectralPoint::from_value(z));
    for (auto [x, y] : {std::pair{0.3, 1.7}, std::pair{2.5, 0.4}, std::pair{1.0, 1.0}}) {
      CHECK(std::abs(R(x, y) - free_kernel(z, x, y)) < 1e-11);
      CHECK(R(x, y) == R(y, x));
    }
  }
  auto m = make_model(family::PowerLaw{1.0, 0.5});
  ResolventKernel a(m, BoundaryCondition::robin(0.3), SpectralPoint::interior(cplx(1.0, 0.7)));
  ResolventKernel b(m, BoundaryCondition::robin(0.3), SpectralPoint::interior(cplx(1.0, -0.7)));
  CHECK(std::abs(a(0.5, 2.0) - std::conj(b(0.5, 2.0))) < 1e-12);
}

TEST_CASE("resolvent applied to compact functions") {
  auto fr = free_model();
  const auto grid = linspace(0.2, 8.0, 781);
  const auto g = bump(0.5, 4.0);
  const cplx z(0.0, 1.0);
  auto u = resolvent_apply(fr, BoundaryCondition::dirichlet(), SpectralPoint::interior(z), g, grid);
  CHECK(resolvent_residual(fr, z, g, u) < 1e-6);
  // Independent quadrature against the closed-form kernel.
  for (std::size_t i : {0ul, 200ul, 400ul, 780ul}) {
    auto integrand = [&](double y) { return free_kernel(z, grid[i], y) * g(y); };
    const cplx ref = oracle::gk(integrand, 0.5, grid[i] < 4.0 && grid[i] > 0.5 ? grid[i] : 0.5) +
                     oracle::gk(integrand, grid[i] < 4.0 && grid[i] > 0.5 ? grid[i] : 0.5, 4.0);
    CHECK(std::abs(u.f[i] - ref) < 1e-10);
  }
  // Narrow bump against the kernel at its centre.
  const auto narrow = bump(1.99, 2.01);
  auto un = resolvent_apply(fr, BoundaryCondition::dirichlet(), SpectralPoint::above(-1.0), narrow, {0.7, 5.0});
  const double mass = oracle::gk([&](double y) { return narrow(y); }, 1.99, 2.01).real();
  CHECK(std::abs(un.f[0] / mass - std::sinh(0.7) * std::exp(-2.0)) < 1e-5);
  CHECK(std::abs(un.f[1] / mass - std::sinh(2.0) * std::exp(-5.0)) < 1e-5);

  auto pl = make_model(family::PowerLaw{1.0, 0.5}, family::PowerApproachP{1.5, 0.3, 1.0});
  for (cplx zz : {cplx(0.0, 1.0), cplx(2.0, 0.5), cplx(-1.0, 0.0)}) {
    auto uu = resolvent_apply(pl, BoundaryCondition::robin(0.4), SpectralPoint::from_value(zz), g, grid);
    auto rm = make_model(family::PowerLaw{1.0, 0.5}, family::PowerApproachP{1.5, 0.3, 1.0});
    // p is not constant: the residual needs the variable weight inside the flux only.
    CHECK(resolvent_residual(rm, zz, g, uu) < 1e-6);
  }
}

TEST_CASE("limiting absorption") {
  auto m = make_model(family::PowerLaw{1.0, 0.5});
  const auto f = bump(0.5, 3.0), g = bump(1.0, 4.0);
  const double lam = 2.0;
  const cplx cut = resolvent_form(m, BoundaryCondition::dirichlet(), SpectralPoint::above(lam), f, g);
  std::vector<double> gaps;
  for (double d : {1e-1, 1e-2, 1e-3})
    gaps.push_back(std::abs(resolvent_form(m, BoundaryCondition::dirichlet(), SpectralPoint::interior(cplx(lam, d)),
                                           f, g) - cut));
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < gaps[1]);
  CHECK(gaps[2] < 1e-2 * std::abs(cut));
}

TEST_CASE("negative-axis identity") {
  const auto grid = linspace(0.0, 10.0, 21);
  CHECK(negative_cut_identity_check(free_model(), BoundaryCondition::dirichlet(), -1.0, grid).max_discrepancy < 1e-14);
  CHECK(negative_cut_identity_check(make_model(family::StepWell{4.0, 1.0}), BoundaryCondition::dirichlet(), -0.5, grid)
            .max_discrepancy < 1e-8);
  CHECK(negative_cut_identity_check(make_model(family::PowerLaw{1.0, 0.5}), BoundaryCondition::robin(1.0), -1.0, grid)
            .max_discrepancy < 1e-8);
  CHECK_THROWS_AS(negative_cut_identity_check(free_model(), BoundaryCondition::dirichlet(), 1.0, grid), Error);
}

TEST_CASE("eigenvalues") {
  auto fr = free_model();
  auto [lo, hi] = default_eigen_bracket(fr);
  CHECK(lo == -1.0);
  CHECK(find_eigenvalues(fr, BoundaryCondition::dirichlet(), lo, hi).empty());
  CHECK(scan_jost_function(fr, BoundaryCondition::dirichlet(), lo, hi, 40).min_abs_w >= 0.5);

  auto sw = make_model(family::StepWell{4.0, 1.0});
  auto br = default_eigen_bracket(sw);
  CHECK(br.first == doctest::Approx(-5.0));
  auto ev = find_eigenvalues(sw, BoundaryCondition::dirichlet(), br.first, br.second);
  REQUIRE(ev.size() == 1);
  CHECK(std::abs(ev[0].z_star - step_well_root(4.0, -3.9, -1e-6)) < 1e-10);
  CHECK(ev[0].w_residual < 1e-9);

  // Deep well: k cot k = -kappa has several roots.
  auto deep = make_model(family::StepWell{30.0, 1.0});
  auto evd = find_eigenvalues(deep, BoundaryCondition::dirichlet(), -31.0, -1e-6);
  REQUIRE(evd.size() == 2);
  auto g = [](double E) { const double k = std::sqrt(30.0 + E), kap = std::sqrt(-E); return k * std::cos(k) + kap * std::sin(k); };
  for (const auto& r : evd) {
    const double root = step_well_root(30.0, r.z_star - 0.5, std::min(r.z_star + 0.5, -1e-9));
    CHECK(std::abs(r.z_star - root) < 1e-9);
    CHECK(std::abs(g(r.z_star)) < 1e-8);
  }

  auto weak = make_model(family::ExpDecay{-0.1, 1.0});
  auto bw = default_eigen_bracket(weak);
  CHECK(find_eigenvalues(weak, BoundaryCondition::dirichlet(), bw.first, bw.second).empty());
  CHECK(scan_jost_function(weak, BoundaryCondition::dirichlet(), bw.first, bw.second).min_abs_w > 0.1);
}

TEST_CASE("spectral density") {
  auto fr = free_model();
  for (double lam : {0.3, 2.0}) {
    for (double x : {0.4, 3.0}) {
      const double k = std::sqrt(lam);
      CHECK(spectral_density(fr, BoundaryCondition::dirichlet(), lam, x, x) ==
            doctest::Approx(std::sin(k * x) * std::sin(k * x) / (kPi * k)).epsilon(1e-11));
    }
  }
  auto models = {make_model(family::StepWell{4.0, 1.0}), make_model(family::PowerLaw{1.0, 0.5}),
                 make_model(family::PowerLaw{2.0, 0.5}, family::PowerApproachP{1.5, 0.5, 2.0})};
  for (const auto& m : models) {
    for (double lam : {0.5, 1.0, 4.0}) {
      for (auto [x, y] : {std::pair{0.5, 2.0}, std::pair{3.0, 1.2}, std::pair{1.5, 1.5}}) {
        const double a = spectral_density(m, BoundaryCondition::dirichlet(), lam, x, y);
        const double b = spectral_density_from_resolvent(m, BoundaryCondition::dirichlet(), lam, x, y);
        CHECK(std::abs(a - b) <= 1e-8 * std::max(std::abs(a), 1e-3));
        CHECK(a == spectral_density(m, BoundaryCondition::dirichlet(), lam, y, x));
      }
      CHECK(spectral_density(m, BoundaryCondition::robin(0.5), lam, 2.2, 2.2) >= 0.0);
    }
  }
}

TEST_CASE("eigenfunctions and S") {
  auto fr = free_model();
  const double lam = 1.7;
  const std::vector<double> grid{0.0, 0.9, 4.0};
  auto psi = eigenfunction_psi(fr, BoundaryCondition::dirichlet(), CutSide::AbovePlus, lam, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(psi.value(i) - std::sin(std::sqrt(lam) * grid[i]) / std::sqrt(kPi) / std::pow(lam, 0.25)) < 1e-12);

  auto sw = make_model(family::StepWell{4.0, 1.0});
  auto pp = eigenfunction_psi(sw, BoundaryCondition::dirichlet(), CutSide::AbovePlus, 1.0, grid);
  auto pm = eigenfunction_psi(sw, BoundaryCondition::dirichlet(), CutSide::BelowMinus, 1.0, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(pm.value(i) - std::conj(pp.value(i))) < 1e-14);
    CHECK(std::norm(pp.value(i)) ==
          doctest::Approx(spectral_density(sw, BoundaryCondition::dirichlet(), 1.0, grid[i], grid[i])).epsilon(1e-12));
  }

  CHECK(std::abs(scattering_matrix(fr, BoundaryCondition::dirichlet(), 3.0) - 1.0) < 1e-14);
  const double h = 0.6, k = std::sqrt(3.0);
  CHECK(std::abs(scattering_matrix(fr, BoundaryCondition::robin(h), 3.0) - cplx(h, k) / cplx(h, -k)) < 1e-13);
  oracle::StepWellTheta ref{4.0, 1.0, cplx(1.0, 0.0)};
  const cplx S = scattering_matrix(sw, BoundaryCondition::dirichlet(), 1.0);
  CHECK(std::abs(S - std::conj(ref(0.0).first) / ref(0.0).first) < 1e-11);
  CHECK(std::abs(std::abs(S) - 1.0) < 1e-14);
  CHECK_THROWS_AS(scattering_matrix(fr, BoundaryCondition::dirichlet(), -1.0), Error);
}

TEST_CASE("transforms") {
  auto fr = free_model();
  const auto f = bump(0.0, 5.0);
  // Sine transform by independent quadrature.
  for (double lam : {0.2, 3.0, 30.0}) {
    const double k = std::sqrt(lam);
    const cplx ref = oracle::gk([&](double x) { return std::sin(k * x) * f(x); }, 0.0, 5.0) / std::sqrt(kPi) /
                     std::pow(lam, 0.25);
    CHECK(std::abs(transform_Psi(fr, BoundaryCondition::dirichlet(), CutSide::AbovePlus, f, {lam})[0] - ref) < 1e-9);
  }
  // Plancherel for the sine transform.
  const auto rule = lambda_rule(1e-3, 400.0, 40);
  const double n2 = norm_squared(f);
  CHECK(transform_norm_squared(fr, BoundaryCondition::dirichlet(), CutSide::AbovePlus, f, rule) ==
        doctest::Approx(n2).epsilon(1e-3));

  // A windowed sine concentrates its transform at its frequency.
  const double lam0 = 9.0;
  CompactFunction wave{[&](double x) { return std::sin(3.0 * x) * bump(0.0, 20.0)(x); }, 20.0, {}};
  const auto lams = linspace(1.0, 20.0, 77);
  auto t = transform_Psi(fr, BoundaryCondition::dirichlet(), CutSide::AbovePlus, wave, lams);
  std::size_t best = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (std::abs(t[i]) > std::abs(t[best])) best = i;
  CHECK(std::abs(lams[best] - lam0) <= 0.25);

  // Repulsive exponential potential: completeness, S relation and intertwining.
  auto rep = make_model(family::ExpDecay{1.0, 1.0});
  CHECK(transform_norm_squared(rep, BoundaryCondition::dirichlet(), CutSide::AbovePlus, f, rule) ==
        doctest::Approx(n2).epsilon(1e-2));
  const std::vector<double> ls{0.5, 2.0, 7.0};
  auto tp = transform_Psi(rep, BoundaryCondition::dirichlet(), CutSide::AbovePlus, f, ls);
  auto tm = transform_Psi(rep, BoundaryCondition::dirichlet(), CutSide::BelowMinus, f, ls);
  const auto g = bump(0.5, 4.5);
  CompactFunction Hg{[&](double x) {
                       const double e = 1e-3;
                       const cplx d2 = (-g(x + 2 * e) + 16.0 * g(x + e) - 30.0 * g(x) + 16.0 * g(x - e) - g(x - 2 * e)) /
                                       (12.0 * e * e);
                       return -d2 + rep.q(x) * g(x);
                     },
                     4.5, {0.5}};
  auto tg = transform_Psi(rep, BoundaryCondition::dirichlet(), CutSide::AbovePlus, g, ls);
  auto thg = transform_Psi(rep, BoundaryCondition::dirichlet(), CutSide::AbovePlus, Hg, ls);
  for (std::size_t i = 0; i < ls.size(); ++i) {
    CHECK(std::abs(tp[i] - scattering_matrix(rep, BoundaryCondition::dirichlet(), ls[i]) * tm[i]) < 1e-12);
    CHECK(std::abs(thg[i] - ls[i] * tg[i]) < 1e-3 * std::abs(ls[i] * tg[i]));
  }
}

TEST_CASE("wave operators") {
  const auto f = bump(0.0, 4.0);
  const auto rule = lambda_rule(1e-4, 300.0, 30);
  const auto grid = linspace(0.0, 4.0, 9);
  auto U = wave_operator_apply(free_model(), BoundaryCondition::dirichlet(), CutSide::AbovePlus, f, grid, rule);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(U.f[i] - f(grid[i])) < 2e-3);

  auto sw = make_model(family::StepWell{-2.0, 1.0});  // barrier: no bound states
  const auto out = linspace(0.0, 40.0, 801);
  auto Us = wave_operator_apply(sw, BoundaryCondition::dirichlet(), CutSide::AbovePlus, f, out, rule);
  double n = 0.0;
  for (std::size_t i = 0; i + 1 < out.size(); ++i)
    n += 0.5 * (std::norm(Us.f[i]) + std::norm(Us.f[i + 1])) * (out[i + 1] - out[i]);
  const double ratio = std::sqrt(n / norm_squared(f));
  CHECK(ratio >= 0.99);
  CHECK(ratio <= 1.01);
}
