#pragma once
// Independent reference solutions used only by the tests.  Nothing here calls
// into the library's solvers.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

using cplx = std::complex<double>;

inline cplx root_re_pos(cplx w) {
  cplx s = std::sqrt(w);
  return s.real() < 0 ? -s : s;
}

/// sqrt(v - z) on the branch continued from Im z > 0 (or Im z < 0 when below).
inline cplx branch(double v, cplx z, bool below = false) {
  if (z.imag() != 0.0) return root_re_pos(v - z);
  const double d = v - z.real();
  if (d >= 0) return std::sqrt(d);
  return below ? cplx(0, std::sqrt(-d)) : cplx(0, -std::sqrt(-d));
}

template <class F>
cplx gk(F f, double a, double b, double tol = 1e-14) {
  using boost::math::quadrature::gauss_kronrod;
  auto re = [&](double x) { return f(x).real(); };
  auto im = [&](double x) { return f(x).imag(); };
  return {gauss_kronrod<double, 61>::integrate(re, a, b, 12, tol),
          gauss_kronrod<double, 61>::integrate(im, a, b, 12, tol)};
}

template <class F>
cplx gauss20(F f, double a, double b) {
  using boost::math::quadrature::gauss;
  auto re = [&](double x) { return f(x).real(); };
  auto im = [&](double x) { return f(x).imag(); };
  return {gauss<double, 20>::integrate(re, a, b), gauss<double, 20>::integrate(im, a, b)};
}

template <class F>
cplx tail(F f, double a, double tol = 1e-13) {
  boost::math::quadrature::exp_sinh<double> es;
  auto re = [&](double x) { return f(x).real(); };
  auto im = [&](double x) { return f(x).imag(); };
  return {es.integrate(re, a, std::numeric_limits<double>::infinity(), tol),
          es.integrate(im, a, std::numeric_limits<double>::infinity(), tol)};
}

/// Half-line step well q = -V0 on [0, a), p = 1.  Beyond the well the Jost
/// solution is exp(-Omega) exactly; inside it is the matching combination of
/// exponentials.  Returns (theta, theta').
struct StepWellTheta {
  double V0, a;
  cplx z;
  bool below = false;

  std::pair<cplx, cplx> operator()(double x) const {
    const cplx wi = branch(-V0, z, below), wo = branch(0.0, z, below);
    const cplx Om_a = wi * a;
    if (x >= a) {
      const cplx t = std::exp(-(Om_a + wo * (x - a)));
      return {t, -wo * t};
    }
    // theta = A e^{wi (a - x)} + B e^{-wi (a - x)} matched at a.
    const cplx ta = std::exp(-Om_a), dta = -wo * ta;
    const cplx A = 0.5 * (ta - dta / wi), B = 0.5 * (ta + dta / wi);
    const cplx e = std::exp(wi * (a - x));
    return {A * e + B / e, -wi * (A * e - B / e)};
  }
};

/// Nystrom solution of u(x) = u(X) - G(x, X) v(X) + int_x^X G(x, y) r(y) u(y) dy
/// for p = 1, with the far-field data (u(X), v(X)) from a two-term Riccati
/// expansion evaluated by finite differences.  Trapezoid weights on N panels,
/// so the error expands in h^2 and two meshes give a Richardson value.
struct NystromVolterra {
  std::function<double(double)> q;
  cplx z;
  double x1, X;

  cplx omega(double y) const { return branch(q(y), z); }
  cplx r(double y) const {
    const double h = 1e-4 * std::max(1.0, y);
    return (-omega(y + 2 * h) + 8.0 * omega(y + h) - 8.0 * omega(y - h) + omega(y - 2 * h)) / (12.0 * h);
  }
  cplx s0(double y) const { return -r(y) / (2.0 * omega(y)); }
  cplx s1(double y) const {
    const double h = 1e-3 * y;
    return ((s0(y + h) - s0(y - h)) / (2.0 * h) + s0(y) * s0(y)) / (2.0 * omega(y));
  }

  cplx solve(int N) const {
    const double h = (X - x1) / N;
    // D_j = exp(-2 Omega_j) int_x1^y_j exp(2 Omega), so G(x_i, y_j) = D_j - exp(-2 (Omega_j - Omega_i)) D_i.
    std::vector<cplx> dOm(N + 1), D(N + 1), rr(N + 1), u(N + 1);
    D[0] = 0.0;
    for (int j = 1; j <= N; ++j) {
      dOm[j] = gauss20([&](double y) { return omega(y); }, x1 + (j - 1) * h, x1 + j * h);
      const cplx e = std::exp(-2.0 * dOm[j]);
      D[j] = e * D[j - 1] + 0.5 * h * (e + 1.0);
    }
    for (int j = 0; j <= N; ++j) rr[j] = r(x1 + j * h);
    const cplx ls = tail([&](double y) { return s0(y) + s1(y); }, X, 1e-12);
    const cplx uX = std::exp(-ls);
    const cplx vX = (s0(X) + s1(X)) * uX;
    u[N] = uX;
    cplx A = 0.0, B = 0.0, EN = 1.0;  // EN = exp(-2 (Omega_N - Omega_i))
    for (int i = N - 1; i >= 0; --i) {
      const int j = i + 1;
      const double w = (j == N) ? 0.5 * h : h;
      const cplx e = std::exp(-2.0 * dOm[j]);
      A += w * D[j] * rr[j] * u[j];
      B = e * (B + w * rr[j] * u[j]);
      EN *= e;
      u[i] = uX - (D[N] - EN * D[i]) * vX + (A - D[i] * B);
    }
    return u[0];
  }

  /// Richardson extrapolation of two meshes.
  cplx u_at_x1(int N) const { return (4.0 * solve(2 * N) - solve(N)) / 3.0; }
};

}  // namespace oracle
