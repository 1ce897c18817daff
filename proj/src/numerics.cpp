#include "jostlab/numerics.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <queue>

namespace jostlab {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidSpectralPoint: return "InvalidSpectralPoint";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::TailDivergent: return "TailDivergent";
    case ErrorKind::NoThreshold: return "NoThreshold";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::ThetaVanishes: return "ThetaVanishes";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NotShortRange: return "NotShortRange";
    case ErrorKind::AtEigenvalue: return "AtEigenvalue";
    case ErrorKind::PhaseUnwrapAmbiguity: return "PhaseUnwrapAmbiguity";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

void Tolerances::validate() const {
  for (double v : {ode_rtol, ode_atol, quad_rtol, quad_atol, picard_atol, root_atol, eigen_w_tol,
                   tail_tol}) {
    if (!(v > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerances must be positive");
  }
}

LogPolarComplex LogPolarComplex::from_complex(cplx z) {
  if (z == cplx(0.0, 0.0)) return {-std::numeric_limits<double>::infinity(), 0.0};
  return {std::log(std::abs(z)), std::arg(z)};
}

// ---------------------------------------------------------------------------

namespace {

namespace odeint = boost::numeric::odeint;

double pair_norm(const Pair& y) { return std::max(std::abs(y[0]), std::abs(y[1])); }

// Next breakpoint strictly beyond x in the integration direction, or `target`.
double next_stop(double x, double target, int dir, std::span<const double> breakpoints) {
  double stop = target;
  for (double b : breakpoints) {
    if (dir > 0 && b > x && b < stop) stop = b;
    if (dir < 0 && b < x && b > stop) stop = b;
  }
  return stop;
}

struct Advance {
  Pair y;
  double log_scale;
  std::size_t steps;
};

// Integrates from x0 to x1; on_step (may be empty) sees every accepted step.
template <class OnStep>
Advance advance(const PairRhs& rhs, double x0, Pair y, double log_scale, double x1,
                std::span<const double> breakpoints, const Tolerances& tol, double& dt_hint,
                OnStep&& on_step) {
  if (x0 == x1) return {y, log_scale, 0};
  const int dir = x1 > x0 ? 1 : -1;
  auto stepper =
      odeint::make_controlled(tol.ode_atol, tol.ode_rtol, odeint::runge_kutta_fehlberg78<Pair>());
  // Coefficients may jump at breakpoints, and a step never crosses one.  The
  // right-hand side is sampled strictly inside the current step so a step
  // that starts on a jump sees the one-sided limit.
  double step_lo = x0, step_hi = x0;
  auto system = [&](const Pair& s, Pair& d, double t) {
    const double pad = 1e-12 * (step_hi - step_lo);
    rhs(std::clamp(t, step_lo + pad, step_hi - pad), s, d);
  };
  double x = x0;
  std::size_t steps = 0;
  double dt = dir * std::min(std::abs(dt_hint), std::abs(x1 - x0));
  if (dt == 0.0) dt = dir * std::min(0.01, std::abs(x1 - x0));
  int failures = 0;
  while (x != x1) {
    const double stop = next_stop(x, x1, dir, breakpoints);
    bool clipped = false;
    if ((x + dt - stop) * dir >= 0.0) {
      dt = stop - x;
      clipped = true;
    }
    const double dt_try = dt;
    double t = x;
    step_lo = std::min(x, x + dt);
    step_hi = std::max(x, x + dt);
    if (stepper.try_step(system, y, t, dt) == odeint::success) {
      x = clipped ? stop : t;
      ++steps;
      failures = 0;
      if (clipped && std::abs(dt) < std::abs(dt_try)) dt = dt_try;
      const double n = pair_norm(y);
      if (n > 1e150 || (n < 1e-150 && n > 0.0)) {
        const double s = std::log(n);
        for (auto& c : y) c /= n;
        log_scale += s;
      }
      on_step(x, y, log_scale);
    } else {
      if (++failures > 200 || std::abs(dt) < 1e-15 * (1.0 + std::abs(x))) {
        throw Error(ErrorKind::StepUnderflow, "step size underflow at x=" + std::to_string(x));
      }
    }
  }
  dt_hint = dt;
  return {y, log_scale, steps};
}

}  // namespace

void OdeSolution::add_checkpoint(double x, const Pair& y, double log_scale) {
  xs_.push_back(x);
  ys_.push_back(y);
  scales_.push_back(log_scale);
}

Pair OdeSolution::at(double x, double* log_scale) const {
  if (xs_.empty()) throw Error(ErrorKind::DomainError, "empty ODE solution");
  // Nearest checkpoint between the start and x; clamp to the stored range.
  std::size_t idx = 0;
  if (direction_ > 0) {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    idx = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
  } else {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x, std::greater<double>());
    idx = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
  }
  double dt = 0.05;
  auto r = advance(rhs_, xs_[idx], ys_[idx], scales_[idx], x, breakpoints_, tol_, dt,
                   [](double, const Pair&, double) {});
  if (log_scale) {
    *log_scale = r.log_scale;
    return r.y;
  }
  Pair y = r.y;
  const double f = std::exp(r.log_scale);
  for (auto& c : y) c *= f;
  return y;
}

Pair OdeSolution::at_unscaled(double x) const { return at(x, nullptr); }

IvpResult integrate_ivp(const PairRhs& rhs, double x0, Pair y0, std::span<const double> outputs,
                        std::span<const double> breakpoints, const Tolerances& tol,
                        double initial_log_scale) {
  int dir = 1;
  for (double o : outputs) {
    if (o != x0) {
      dir = o > x0 ? 1 : -1;
      break;
    }
  }
  IvpResult result;
  result.dense = OdeSolution(rhs, std::vector<double>(breakpoints.begin(), breakpoints.end()), tol,
                             dir);
  result.dense.add_checkpoint(x0, y0, initial_log_scale);
  double x = x0;
  Pair y = y0;
  double scale = initial_log_scale;
  double dt = 0.01;
  for (double target : outputs) {
    if ((target - x) * dir < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "integrate_ivp outputs must be monotone");
    }
    auto r = advance(rhs, x, y, scale, target, breakpoints, tol, dt,
                     [&](double xs, const Pair& ys, double ls) {
                       result.dense.add_checkpoint(xs, ys, ls);
                     });
    result.steps += r.steps;
    x = target;
    y = r.y;
    scale = r.log_scale;
    result.values.push_back(y);
    result.log_scale.push_back(scale);
  }
  return result;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  cplx value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk_panel(const ComplexFn& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const cplx fc = f(c);
  cplx kron = fc * kWgk[7];
  cplx gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const cplx f1 = f(c - h * kXgk[j]);
    const cplx f2 = f(c + h * kXgk[j]);
    kron += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace

cplx gauss_kronrod15(const ComplexFn& f, double a, double b) { return gk_panel(f, a, b).value; }

QuadResult quad_adaptive(const ComplexFn& f, double a, double b, double rtol, double atol,
                         std::span<const double> kinks, int max_subdivisions) {
  if (a == b) return {};
  const double sign = b > a ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  std::vector<double> cuts{lo};
  for (double k : kinks) {
    if (k > lo && k < hi) cuts.push_back(k);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> heap;
  cplx total{};
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = gk_panel(f, cuts[i], cuts[i + 1]);
    total += p.value;
    err += p.error;
    heap.push(p);
  }
  int evals = 15 * static_cast<int>(heap.size());
  int subdivisions = 0;
  while (err > std::max(atol, rtol * std::abs(total))) {
    if (++subdivisions > max_subdivisions) {
      throw Error(ErrorKind::QuadratureFailure,
                  "adaptive quadrature did not converge on [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;  // interval exhausted at machine precision
    Panel left = gk_panel(f, worst.a, mid);
    Panel right = gk_panel(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Recompute the error sum to shed accumulated cancellation.
  double final_err = 0.0;
  cplx final_total{};
  while (!heap.empty()) {
    final_err += heap.top().error;
    final_total += heap.top().value;
    heap.pop();
  }
  return {sign * final_total, final_err, evals};
}

QuadResult quad_semi_infinite(const ComplexFn& f, double a, double rtol, double atol,
                              std::span<const double> kinks, double first_window,
                              double max_right) {
  QuadResult out;
  double left = a;
  double width = first_window > 0.0 ? first_window : 1.0;
  int settled = 0;
  cplx prev_inc = 0.0, prev_ratio = 0.0, prev_extrapolated = 0.0;
  bool have_extrapolation = false;
  for (int window = 0;; ++window) {
    const double right = left + width;
    QuadResult w = quad_adaptive(f, left, right, rtol, atol, kinks);
    out.value += w.value;
    out.error += w.error;
    out.evaluations += w.evaluations;
    if (std::abs(w.value) <= std::max(atol, rtol * std::abs(out.value))) {
      if (++settled >= 2) return out;
    } else {
      settled = 0;
    }
    // Windows of a regularly decaying tail shrink geometrically; sum the rest
    // of the series and accept once two extrapolated totals agree.
    if (window >= 3 && std::abs(prev_inc) > 0.0) {
      const cplx ratio = w.value / prev_inc;
      const bool steady = std::abs(ratio) < 0.9 && std::abs(ratio - prev_ratio) < 0.05 * std::abs(ratio);
      if (steady) {
        const cplx extrapolated = out.value + w.value * ratio / (1.0 - ratio);
        if (have_extrapolation &&
            std::abs(extrapolated - prev_extrapolated) <= std::max(atol, rtol * std::abs(extrapolated))) {
          out.error += std::abs(extrapolated - prev_extrapolated);
          out.value = extrapolated;
          return out;
        }
        prev_extrapolated = extrapolated;
        have_extrapolation = true;
      } else {
        have_extrapolation = false;
      }
      prev_ratio = ratio;
    } else if (window >= 2 && std::abs(prev_inc) > 0.0) {
      prev_ratio = w.value / prev_inc;
    }
    prev_inc = w.value;
    if (right > max_right) {
      throw Error(ErrorKind::QuadratureFailure, "semi-infinite integral did not settle");
    }
    left = right;
    width *= 2.0;
  }
}

QuadratureRule gauss_legendre(double a, double b, int panels, int order) {
  // Legendre nodes on [-1, 1] by Newton iteration on P_n.
  std::vector<double> t(order), w(order);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    t[i] = x;
    w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  QuadratureRule rule;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (int i = order - 1; i >= 0; --i) {
      rule.nodes.push_back(lo + 0.5 * h * (t[i] + 1.0));
      rule.weights.push_back(0.5 * h * w[i]);
    }
  }
  return rule;
}

double find_root_scalar(const std::function<double(double)>& g, double lo, double hi, double tol) {
  const double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0.0) == (ghi > 0.0)) {
    throw Error(ErrorKind::NoSignChange, "no sign change on the bracket");
  }
  boost::uintmax_t max_iter = 300;
  auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  auto r = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, stop, max_iter);
  return 0.5 * (r.first + r.second);
}

std::vector<double> sign_changes(const std::function<double(double)>& g,
                                 std::span<const double> samples, double tol) {
  std::vector<double> roots;
  if (samples.empty()) return roots;
  double prev = g(samples[0]);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double cur = g(samples[i]);
    if ((prev < 0.0 && cur > 0.0) || (prev > 0.0 && cur < 0.0)) {
      roots.push_back(find_root_scalar(g, samples[i - 1], samples[i], tol));
    } else if (cur == 0.0 && prev != 0.0) {
      roots.push_back(samples[i]);
    }
    prev = cur;
  }
  return roots;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
  v.back() = b;
  return v;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
  std::vector<double> v = linspace(std::log(a), std::log(b), n);
  for (auto& x : v) x = std::exp(x);
  if (n > 0) {
    v.front() = a;
    v.back() = b;
  }
  return v;
}

}  // namespace jostlab
