#include "jostlab/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jostlab/errors.hpp"

namespace jostlab {

SpectralPoint::SpectralPoint(cplx value, CutSide side) : value_(value), side_(side) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw Error(ErrorKind::InvalidSpectralPoint, "spectral parameter must be finite");
  if (value == cplx(0.0, 0.0)) throw Error(ErrorKind::InvalidSpectralPoint, "z = 0 is excluded");
  if ((side == CutSide::Interior) != (value.imag() != 0.0))
    throw Error(ErrorKind::InvalidSpectralPoint,
                "cut side must be Interior exactly when Im z != 0");
}

SpectralPoint SpectralPoint::conjugate() const {
  switch (side_) {
    case CutSide::Interior: return interior(std::conj(value_));
    case CutSide::AbovePlus: return below(lambda());
    case CutSide::BelowMinus: break;
  }
  return above(lambda());
}

cplx omega_pointwise(double q, double p, const SpectralPoint& z) {
  if (z.side() == CutSide::Interior) {
    cplx w = std::sqrt((q - z.value()) / p);
    if (w.real() < 0.0) w = -w;
    return w;
  }
  const double d = (q - z.lambda()) / p;
  if (d >= 0.0) return {std::sqrt(d), 0.0};
  const double s = std::sqrt(-d);
  return z.side() == CutSide::AbovePlus ? cplx(0.0, -s) : cplx(0.0, s);
}

cplx omega(const CoefficientModel& model, const SpectralPoint& z, double x) {
  return omega_pointwise(model.q(x), model.p(x), z);
}

cplx omega_infinity(const CoefficientModel& model, const SpectralPoint& z) {
  return omega_pointwise(0.0, model.p0(), z);
}

std::vector<double> turning_points(const CoefficientModel& model, double lambda, double a, double b) {
  if (!(b > a)) return {};
  const double mid = std::min(b, a + 100.0);
  std::vector<double> samples = linspace(a, mid, 4001);
  if (b > mid) {
    for (double x : logspace(std::log10(mid), std::log10(b), 2000)) samples.push_back(x);
  }
  for (double k : model.breakpoints()) {
    if (k > a && k < b) {
      samples.push_back(k);
      samples.push_back(std::nextafter(k, a));
    }
  }
  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
  std::vector<double> out;
  for (double t : sign_changes([&](double x) { return model.q(x) - lambda; }, samples))
    if (t > a && t < b) out.push_back(t);
  return out;
}

cplx omega_integral(const CoefficientModel& model, const SpectralPoint& z, double a, double b, double rtol) {
  if (a == b) return 0.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  std::vector<double> kinks = turning_points(model, z.lambda(), lo, hi);
  for (double k : model.breakpoints())
    if (k > lo && k < hi) kinks.push_back(k);
  auto f = [&](double x) { return omega(model, z, x); };
  return quad_adaptive(f, a, b, rtol, 1e-15, kinks, 20000).value;
}

cplx big_omega(const CoefficientModel& model, const SpectralPoint& z, double x, double rtol) {
  if (model.domain() == DomainKind::HalfLine && x < 0.0)
    throw Error(ErrorKind::DomainError, "Omega needs x >= 0 on the half-line");
  return omega_integral(model, z, 0.0, x, rtol);
}

LogPolarComplex weight_a(const CoefficientModel& model, const SpectralPoint& z, double x) {
  return LogPolarComplex::exp_of(-big_omega(model, z, x));
}

cplx remainder_r(const CoefficientModel& model, const SpectralPoint& z, double x) {
  const cplx w = omega(model, z, x);
  if (w == cplx(0.0, 0.0)) throw Error(ErrorKind::DomainError, "remainder is singular at a turning point");
  return (model.q_prime(x) + w * w * model.p_prime(x)) / (2.0 * w) + model.q_sr(x);
}

cplx regularized_phase(const CoefficientModel& model, const SpectralPoint& z, double x, int order) {
  if (order < 0 || order > 2) throw Error(ErrorKind::InvalidArgument, "regularized phase order must be 0, 1 or 2");
  const cplx winf = omega_infinity(model, z);
  if (order == 0) return winf * x;
  const double p0 = model.p0();
  const cplx zz = z.value();
  std::vector<double> kinks(model.breakpoints().begin(), model.breakpoints().end());
  auto integral = [&](auto g) {
    return quad_adaptive([&](double y) { return cplx(g(y)); }, 0.0, x, 1e-13, 1e-15, kinks, 20000).value.real();
  };
  const double iq = integral([&](double y) { return model.q(y); });
  const double ip = integral([&](double y) { return model.p1(y); });
  cplx bracket = x - iq / (2.0 * zz) - ip / (2.0 * p0);
  if (order == 2) {
    const double iqq = integral([&](double y) { return model.q(y) * model.q(y); });
    const double ipp = integral([&](double y) {
      const double p1 = model.p1(y);
      return p1 * p1;
    });
    const double iqp = integral([&](double y) { return model.q(y) * (model.p1(y)); });
    bracket += -iqq / (8.0 * zz * zz) + 3.0 * ipp / (8.0 * p0 * p0) + iqp / (4.0 * zz * p0);
  }
  return winf * bracket;
}

cplx beta_limit(const CoefficientModel& model, const SpectralPoint& z, double rtol) {
  if (model.short_range() == false)
    throw Error(ErrorKind::NotShortRange, "beta needs q and p - p0 integrable at infinity");
  const double p0 = model.p0();
  const cplx winf = omega_infinity(model, z);
  const cplx zz = z.value();
  auto f = [&](double x) {
    const double p = model.p(x);
    const cplx w = omega(model, z, x);
    return (p0 * model.q(x) + zz * model.p1(x)) / (p * p0 * (w + winf));
  };
  std::vector<double> kinks = turning_points(model, z.lambda(), 0.0, 1e4);
  for (double k : model.breakpoints())
    if (k > 0.0) kinks.push_back(k);
  try {
    return quad_semi_infinite(f, 0.0, rtol, 1e-15, kinks, std::max(1.0, model.length_scale()), 1e16).value;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::QuadratureFailure) throw;
    throw Error(ErrorKind::NotShortRange, "beta tail integral does not converge");
  }
}

EikonalField eikonal_field(const CoefficientModel& model, const SpectralPoint& z, const std::vector<double>& grid) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw Error(ErrorKind::InvalidArgument, "grid must be sorted");
  EikonalField out;
  out.grid = grid;
  cplx acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    acc = i == 0 ? big_omega(model, z, x) : acc + omega_integral(model, z, grid[i - 1], x);
    const cplx w = omega(model, z, x);
    out.omega.push_back(w);
    out.Omega.push_back(acc);
    out.a.push_back(LogPolarComplex::exp_of(-acc));
    out.r.push_back(w == cplx(0.0, 0.0) ? cplx(std::numeric_limits<double>::quiet_NaN())
                                        : remainder_r(model, z, x));
  }
  return out;
}

}  // namespace jostlab
