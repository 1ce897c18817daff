#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "jostlab/errors.hpp"

namespace jostlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Numerical tolerances shared by every module.  All entries must be positive.
struct Tolerances {
  double ode_rtol = 1e-12;
  double ode_atol = 1e-14;
  double quad_rtol = 1e-10;
  double quad_atol = 1e-14;
  double picard_atol = 1e-12;
  double root_atol = 1e-12;
  double eigen_w_tol = 1e-8;
  /// Target size of the neglected asymptotic tail when closing the Volterra
  /// equation at a finite right end.
  double tail_tol = 1e-11;

  void validate() const;
};

/// Complex number stored as (log|z|, arg z).  Products and quotients never
/// overflow; conversion back is exact while log_mag stays inside the double
/// exponent range.
struct LogPolarComplex {
  double log_mag = 0.0;
  double phase = 0.0;

  static LogPolarComplex from_complex(cplx z);
  /// exp(w) without forming it.
  static LogPolarComplex exp_of(cplx w) { return {w.real(), w.imag()}; }

  cplx to_complex() const { return std::polar(std::exp(log_mag), phase); }
  bool representable() const { return log_mag < 700.0 && log_mag > -700.0; }

  friend LogPolarComplex operator*(LogPolarComplex a, LogPolarComplex b) {
    return {a.log_mag + b.log_mag, a.phase + b.phase};
  }
  friend LogPolarComplex operator/(LogPolarComplex a, LogPolarComplex b) {
    return {a.log_mag - b.log_mag, a.phase - b.phase};
  }
};

// ---------------------------------------------------------------------------
// Initial value problems for the first-order system y = (f, p f').

using Pair = std::array<cplx, 2>;
using PairRhs = std::function<void(double x, const Pair& y, Pair& dydx)>;

/// Dense solution of a linear IVP.  Checkpoints are the accepted steps of the
/// original integration; evaluation at an arbitrary point re-integrates the
/// short span from the nearest checkpoint lying between the start and x.
class OdeSolution {
 public:
  OdeSolution() = default;
  OdeSolution(PairRhs rhs, std::vector<double> breakpoints, Tolerances tol, int direction)
      : rhs_(std::move(rhs)), breakpoints_(std::move(breakpoints)), tol_(tol), direction_(direction) {}

  void add_checkpoint(double x, const Pair& y, double log_scale);

  /// Value at x scaled by exp(-log_scale); returns log_scale through the pointer.
  Pair at(double x, double* log_scale = nullptr) const;
  Pair at_unscaled(double x) const;

  double start() const { return xs_.front(); }
  double end() const { return xs_.back(); }
  int direction() const { return direction_; }
  std::size_t checkpoint_count() const { return xs_.size(); }

 private:
  PairRhs rhs_;
  std::vector<double> breakpoints_;
  Tolerances tol_{};
  int direction_ = 1;
  std::vector<double> xs_;
  std::vector<Pair> ys_;
  std::vector<double> scales_;
};

struct IvpResult {
  std::vector<Pair> values;       // at the requested output points, scaled
  std::vector<double> log_scale;  // true value = values[i] * exp(log_scale[i])
  OdeSolution dense;
  std::size_t steps = 0;
};

/// Adaptive Runge-Kutta-Fehlberg 7(8) integration of a linear system from x0
/// through the monotone list `outputs` (increasing or decreasing).  Steps never
/// cross a breakpoint.  The state is renormalised whenever it exceeds 1e150 so
/// exponentially growing solutions can be followed far out; the accumulated
/// factor is reported in log_scale.
IvpResult integrate_ivp(const PairRhs& rhs, double x0, Pair y0, std::span<const double> outputs,
                        std::span<const double> breakpoints, const Tolerances& tol,
                        double initial_log_scale = 0.0);

// ---------------------------------------------------------------------------
// Quadrature.

struct QuadResult {
  cplx value{};
  double error = 0.0;
  int evaluations = 0;
};

using ComplexFn = std::function<cplx(double)>;

/// Adaptive Gauss-Kronrod (7/15) quadrature on [a, b]; the interval is split at
/// every kink first.  Throws QuadratureFailure when the subdivision budget runs
/// out before the error target is met.
QuadResult quad_adaptive(const ComplexFn& f, double a, double b, double rtol, double atol,
                         std::span<const double> kinks = {}, int max_subdivisions = 4000);

/// Integral over [a, infinity) by doubling windows.  Stops when two successive
/// windows change the result by less than the tolerance.  Throws
/// QuadratureFailure (caller may translate) when the doubling does not settle.
QuadResult quad_semi_infinite(const ComplexFn& f, double a, double rtol, double atol,
                              std::span<const double> kinks = {}, double first_window = 1.0,
                              double max_right = 1e16);

/// Fixed 15-point Kronrod rule on one panel; exposed for callers that already
/// resolved their subdivision.
cplx gauss_kronrod15(const ComplexFn& f, double a, double b);

/// Composite Gauss-Legendre nodes and weights on [a, b] with `panels` equal
/// panels of `order` points each.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(double a, double b, int panels, int order = 8);

// ---------------------------------------------------------------------------
// Scalar roots.

/// Root of a real function on a sign-changing bracket (TOMS 748).  Throws
/// NoSignChange when g(lo) and g(hi) have the same sign.
double find_root_scalar(const std::function<double(double)>& g, double lo, double hi,
                        double tol = 1e-12);

/// Locations where g changes sign on the sampled grid, each refined to tol.
std::vector<double> sign_changes(const std::function<double(double)>& g,
                                 std::span<const double> samples, double tol = 1e-13);

/// Helpers for building grids.
std::vector<double> linspace(double a, double b, std::size_t n);
std::vector<double> logspace(double a, double b, std::size_t n);

}  // namespace jostlab
