#include "jostlab/jost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jostlab/chebyshev.hpp"
#include "jostlab/errors.hpp"

namespace jostlab {

PairRhs wave_rhs(const CoefficientModel& model, cplx z) {
  return [m = model, z](double x, const Pair& y, Pair& d) {
    d[0] = y[1] / m.p(x);
    d[1] = (m.q_total(x) - z) * y[0];
  };
}

JostSolution::JostSolution(const CoefficientModel& model, const SpectralPoint& z, const JostOptions& options)
    : model_(model), z_(z), options_(options) {
  options_.tol.validate();
  if (model_.domain() == DomainKind::HalfLine && options_.left_limit < 0.0)
    throw Error(ErrorKind::DomainError, "half-line solutions start at x = 0");
  x1_ = threshold_x1(model_, z_.value());
  X_ = choose_X();
  tail_estimate_ = closure_estimate(X_);
  build_panels();
  const cplx uX = closure_u(X_);
  const cplx vX = (s0(X_) + s1(X_)) * uX;
  solve_panels(uX, vX);
  if (x1_ > options_.left_limit) {
    const ThetaPoint t = at(x1_);
    std::vector<double> out{options_.left_limit};
    std::vector<double> bps;
    for (double b : model_.breakpoints())
      if (b > options_.left_limit && b < x1_) bps.push_back(b);
    IvpResult res = integrate_ivp(wave_rhs(model_, z_.value()), x1_, {t.f, t.pf}, out, bps, options_.tol, t.log_scale);
    backward_ = std::move(res.dense);
    has_backward_ = true;
  }
}

// ---------------------------------------------------------------------------
// Asymptotic closure.  With s = p u'/u the Riccati equation
// s' = 2 omega s + r - s^2/p has the non-oscillating expansion s0 + s1 + ...

cplx JostSolution::s0(double x) const {
  const cplx w = omega(model_, z_, x);
  return -remainder_r(model_, z_, x) / (2.0 * w);
}

cplx JostSolution::s1(double x) const {
  const double h = 1e-3 * std::max(1.0, std::abs(x));
  const cplx ds0 = (s0(x + h) - s0(x - h)) / (2.0 * h);
  const cplx s = s0(x);
  return (ds0 + s * s / model_.p(x)) / (2.0 * omega(model_, z_, x));
}

cplx JostSolution::closure_u(double x) const {
  const cplx w = omega(model_, z_, x);
  const cplx winf = omega_infinity(model_, z_);
  cplx integral = -0.5 * std::log(model_.p0() * winf / (model_.p(x) * w));
  if (model_.has_short_range_term()) {
    auto f = [&](double y) { return model_.q_sr(y) / (2.0 * model_.p(y) * omega(model_, z_, y)); };
    integral -= quad_semi_infinite(f, x, 1e-12, 1e-17, model_.breakpoints(), std::max(1.0, 0.25 * x)).value;
  }
  if (s0(x) != cplx(0.0)) {
    auto f = [&](double y) { return s1(y) / model_.p(y); };
    integral += quad_semi_infinite(f, x, 1e-8, 1e-18, {}, std::max(1.0, 0.25 * x)).value;
  }
  return std::exp(-integral);
}

double JostSolution::closure_estimate(double x) const {
  const cplx a = s0(x);
  if (a == cplx(0.0)) return 0.0;
  const cplx b = s1(x);
  auto f = [&](double y) { return s1(y) / model_.p(y); };
  const cplx i1 = quad_semi_infinite(f, x, 1e-4, 1e-20, {}, std::max(1.0, 0.25 * x)).value;
  return std::abs(i1) * std::abs(b / a) + std::abs(i1) * 1e-8;
}

double JostSolution::choose_X() const {
  double start = std::max(x1_, 8.0 * model_.length_scale());
  start = std::max(start, 20.0 / std::sqrt(std::abs(z_.value())));
  for (double b : model_.breakpoints()) start = std::max(start, 1.01 * b + 1.0);
  if (options_.X_max) {
    const double X = *options_.X_max;
    if (!(X >= x1_)) throw Error(ErrorKind::TruncationTooSmall, "X_max lies left of the threshold x1");
    for (double b : model_.breakpoints())
      if (std::abs(b - X) < 1e-3 * std::max(1.0, X))
        throw Error(ErrorKind::InvalidArgument, "X_max must not sit on a coefficient breakpoint");
    if (closure_estimate(X) > 1e-6)
      throw Error(ErrorKind::TruncationTooSmall, "asymptotic tail at X_max is too large");
    return X;
  }
  double X = start;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 40; ++k) {
    const double est = closure_estimate(X);
    best = std::min(best, est);
    if (est <= options_.tol.tail_tol) return X;
    if (2.0 * X > 4e6) break;
    X *= 2.0;
  }
  if (best <= 1e3 * options_.tol.tail_tol) return X;
  throw Error(ErrorKind::TruncationTooSmall, "asymptotic tail does not reach tolerance before X = 4e6");
}

// ---------------------------------------------------------------------------
// Chebyshev panels on [x1, X].

void JostSolution::build_panels() {
  const ChebyshevRule& rule = ChebyshevRule::standard();
  const std::size_t n = rule.size();
  std::vector<double> bps;
  for (double b : model_.breakpoints())
    if (b > x1_ && b < X_) bps.push_back(b);
  bps.push_back(X_);

  double a = x1_;
  std::size_t next = 0;
  while (a < X_) {
    while (bps[next] <= a) ++next;
    const double stop = bps[next];
    double h = 2.5 / std::max(std::abs(omega(model_, z_, a)), 1e-300);
    h = std::min(h, 4.0 * model_.length_scale() + 0.25 * a);
    h = std::max(h, 1e-6);
    Panel P;
    for (int attempt = 0;; ++attempt) {
      double b = a + h;
      if (b >= stop || stop - b < 0.25 * h) b = stop;
      P = Panel{};
      P.a = a;
      P.b = b;
      double rmax = 0.0, pinv = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double x = a + 0.5 * (rule.nodes()[k] + 1.0) * (b - a);
        // One-sided limits at the panel ends, which may sit on a kink of q or p.
        const double pad = 1e-13 * (b - a);
        const double xe = std::clamp(x, a + pad, b - pad);
        P.x.push_back(x);
        P.omega.push_back(omega(model_, z_, xe));
        P.r.push_back(remainder_r(model_, z_, xe));
        P.p.push_back(model_.p(xe));
        rmax = std::max(rmax, std::abs(P.r.back()));
        pinv = std::max(pinv, 1.0 / P.p.back());
      }
      const double contraction = (b - a) * (b - a) * rmax * pinv;
      if (contraction <= 0.25 || attempt > 40) break;
      h = 0.5 * (b - a);
    }
    panels_.push_back(std::move(P));
    a = panels_.back().b;
  }

  cplx Omega_a = big_omega(model_, z_, x1_);
  for (Panel& P : panels_) {
    const double hh = 0.5 * (P.b - P.a);
    P.dOmega.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += rule.right_integration(k, j) * P.omega[j];
      P.dOmega[k] = -hh * acc;
    }
    P.Omega_b = Omega_a - P.dOmega[n - 1];
    Omega_a = P.Omega_b;
  }
}

void JostSolution::solve_panels(cplx u_right, cplx v_right) {
  const ChebyshevRule& rule = ChebyshevRule::standard();
  const std::size_t n = rule.size();
  const int max_iter = 500;
  std::vector<cplx> E(n), g(n), w(n), un(n), vn(n);
  for (auto it = panels_.rbegin(); it != panels_.rend(); ++it) {
    Panel& P = *it;
    const double hh = 0.5 * (P.b - P.a);
    for (std::size_t j = 0; j < n; ++j) E[j] = std::exp(-2.0 * P.dOmega[j]);
    P.u.assign(n, u_right);
    P.v.assign(n, v_right);
    double delta = 0.0;
    int iter = 0;
    for (iter = 1; iter <= max_iter; ++iter) {
      for (std::size_t j = 0; j < n; ++j) g[j] = E[j] * P.r[j] * P.u[j];
      for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += rule.right_integration(k, j) * g[j];
        vn[k] = (v_right - hh * acc) / E[k];
      }
      for (std::size_t j = 0; j < n; ++j) w[j] = vn[j] / P.p[j];
      delta = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += rule.right_integration(k, j) * w[j];
        un[k] = u_right - hh * acc;
        delta = std::max({delta, std::abs(un[k] - P.u[k]), hh * std::abs(vn[k] - P.v[k]) / P.p[k]});
      }
      P.u = un;
      P.v = vn;
      if (delta <= options_.tol.picard_atol * std::max(1.0, std::abs(u_right))) break;
    }
    if (iter > max_iter)
      throw Error(ErrorKind::NoConvergence, "Picard iteration stalled on a Volterra panel");
    iterations_ = std::max(iterations_, iter);
    residual_ = std::max(residual_, delta);
    u_right = P.u[n - 1];
    v_right = P.v[n - 1];
  }
  if (panels_.empty()) iterations_ = 1;
}

std::size_t JostSolution::locate(double x) const {
  auto it = std::upper_bound(panels_.begin(), panels_.end(), x, [](double v, const Panel& P) { return v < P.a; });
  const std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - panels_.begin()) - 1));
  return std::min(i, panels_.size() - 1);
}

cplx JostSolution::u(double x) const {
  if (x < x1_) throw Error(ErrorKind::DomainError, "u is defined for x >= x1");
  if (x > X_ || panels_.empty()) return closure_u(x);
  const Panel& P = panels_[locate(x)];
  return ChebyshevRule::standard().interpolate(P.u, 2.0 * (x - P.a) / (P.b - P.a) - 1.0);
}

cplx JostSolution::v(double x) const {
  if (x < x1_) throw Error(ErrorKind::DomainError, "u is defined for x >= x1");
  if (x > X_ || panels_.empty()) return (s0(x) + s1(x)) * closure_u(x);
  const Panel& P = panels_[locate(x)];
  return ChebyshevRule::standard().interpolate(P.v, 2.0 * (x - P.a) / (P.b - P.a) - 1.0);
}

cplx JostSolution::Omega(double x) const {
  if (x < x1_ || panels_.empty()) return big_omega(model_, z_, x);
  if (x > X_) return panels_.back().Omega_b + omega_integral(model_, z_, X_, x);
  const Panel& P = panels_[locate(x)];
  return P.Omega_b + ChebyshevRule::standard().interpolate(P.dOmega, 2.0 * (x - P.a) / (P.b - P.a) - 1.0);
}

ThetaPoint JostSolution::at(double x) const {
  if (x < options_.left_limit) throw Error(ErrorKind::DomainError, "point lies left of the continuation range");
  if (x < x1_ && has_backward_) {
    double ls = 0.0;
    const Pair y = backward_.at(x, &ls);
    return {y[0], y[1], ls};
  }
  const cplx uu = u(x), vv = v(x);
  const cplx Om = Omega(x);
  const cplx phase = std::polar(1.0, -Om.imag());
  cplx pw;
  if (x <= X_ && !panels_.empty()) {
    // Panel data hold one-sided limits, which matters when x1 sits on a jump of q.
    const Panel& P = panels_[locate(x)];
    std::vector<cplx> pwn(P.x.size());
    for (std::size_t k = 0; k < pwn.size(); ++k) pwn[k] = P.p[k] * P.omega[k];
    pw = ChebyshevRule::standard().interpolate(pwn, 2.0 * (x - P.a) / (P.b - P.a) - 1.0);
  } else {
    pw = model_.p(x) * omega(model_, z_, x);
  }
  return {uu * phase, (vv - pw * uu) * phase, -Om.real()};
}

VolterraSolution JostSolution::volterra() const {
  VolterraSolution out;
  const std::size_t n = ChebyshevRule::standard().size();
  for (const Panel& P : panels_) {
    for (std::size_t k = n; k-- > 0;) {
      if (!out.grid.empty() && P.x[k] <= out.grid.back()) continue;
      out.grid.push_back(P.x[k]);
      out.u.push_back(P.u[k]);
      out.u_prime.push_back(P.v[k] / P.p[k]);
    }
  }
  out.iteration_count = iterations_;
  out.residual_norm = residual_;
  out.x1 = x1_;
  out.X = X_;
  out.tail_estimate = tail_estimate_;
  return out;
}

// ---------------------------------------------------------------------------

cplx volterra_kernel_G(const CoefficientModel& model, const SpectralPoint& z, double x, double y) {
  if (x > y) throw Error(ErrorKind::DomainError, "G(x, y) needs x <= y");
  if (x < threshold_x1(model, z.value())) throw Error(ErrorKind::DomainError, "G(x, y) needs x >= x1(z)");
  if (x == y) return 0.0;
  // Integrate from y down to x so Omega(y) - Omega(s) accumulates alongside.
  auto f = [&](double s) { return std::exp(-2.0 * omega_integral(model, z, s, y, 1e-14)) / model.p(s); };
  std::vector<double> kinks(model.breakpoints().begin(), model.breakpoints().end());
  return quad_adaptive(f, x, y, 1e-12, 1e-15, kinks, 20000).value;
}

VolterraSolution solve_u(const CoefficientModel& model, const SpectralPoint& z, const JostOptions& options) {
  return JostSolution(model, z, options).volterra();
}

WaveSolution sample_theta(const JostSolution& theta, const std::vector<double>& grid) {
  WaveSolution out;
  out.z = theta.z();
  out.kind = WaveKind::Jost;
  out.grid = grid;
  for (double x : grid) {
    const ThetaPoint t = theta.at(x);
    out.f.push_back(t.f);
    out.pf_prime.push_back(t.pf);
    out.log_scale.push_back(t.log_scale);
  }
  return out;
}

WaveSolution jost_theta(const CoefficientModel& model, const SpectralPoint& z, const std::vector<double>& grid,
                        const JostOptions& options) {
  JostOptions opt = options;
  if (!grid.empty()) {
    const double lo = *std::min_element(grid.begin(), grid.end());
    if (model.domain() == DomainKind::HalfLine && lo < 0.0)
      throw Error(ErrorKind::DomainError, "half-line grid must stay in [0, inf)");
    opt.left_limit = std::min(opt.left_limit, lo);
  }
  return sample_theta(JostSolution(model, z, opt), grid);
}

std::optional<double> last_zero(const JostSolution& theta, double left, double right) {
  const SpectralPoint& z = theta.z();
  if (!z.on_cut() || z.lambda() >= 0.0 || !(right > left)) return std::nullopt;
  // theta / a(x1) is real on the negative axis; rotate the phase away.
  const cplx rot = std::polar(1.0, theta.Omega(theta.x1()).imag());
  auto g = [&](double x) {
    const ThetaPoint t = theta.at(x);
    return (t.f * rot).real() * std::exp(std::clamp(t.log_scale, -300.0, 300.0));
  };
  const std::size_t n = 2000 + static_cast<std::size_t>(
      std::min(2e4, (right - left) * std::sqrt(std::abs(z.lambda()) + 1.0) * 8.0));
  std::vector<double> samples = linspace(left, right, n);
  for (double b : theta.model().breakpoints())
    if (b > left && b < right) samples.push_back(b);
  std::sort(samples.begin(), samples.end());
  const auto roots = sign_changes(g, samples);
  if (roots.empty()) return std::nullopt;
  return roots.back();
}

namespace {

// 1/(p theta^2) relative to exp(-2 ref): exp(-2 (ls - ref)) / (p f^2).
cplx scaled_inverse_square(const JostSolution& theta, double y, double ref) {
  const ThetaPoint t = theta.at(y);
  if (t.f == cplx(0.0)) throw Error(ErrorKind::ThetaVanishes, "theta vanishes inside the xi integral");
  return std::exp(-2.0 * (t.log_scale - ref)) / (theta.model().p(y) * t.f * t.f);
}

}  // namespace

WaveSolution growing_xi(const JostSolution& theta, const std::vector<double>& grid, std::optional<double> rho) {
  const SpectralPoint& z = theta.z();
  if (z.on_cut() && z.lambda() > 0.0)
    throw Error(ErrorKind::InvalidSpectralPoint, "the growing solution needs z off [0, inf)");
  if (!std::is_sorted(grid.begin(), grid.end())) throw Error(ErrorKind::InvalidArgument, "grid must be sorted");
  if (grid.empty()) return {};
  const double left = theta.left_limit();
  const double right = std::max(grid.back(), theta.x1() + 1.0);
  if (!rho) {
    rho = left;
    if (auto zero = last_zero(theta, left, right)) rho = *zero + 0.5;
  }
  if (auto zero = last_zero(theta, std::max(left, *rho), right))
    throw Error(ErrorKind::ThetaVanishes, "theta has a zero beyond rho");

  std::vector<double> kinks(theta.model().breakpoints().begin(), theta.model().breakpoints().end());
  kinks.push_back(theta.x1());

  WaveSolution out;
  out.z = z;
  out.kind = WaveKind::Growing;
  out.grid = grid;
  out.f.resize(grid.size());
  out.pf_prime.resize(grid.size());
  out.log_scale.resize(grid.size());

  auto emit = [&](std::size_t i, cplx I_scaled, const ThetaPoint& t) {
    // xi = theta I with I = I_scaled exp(-2 ls).
    out.f[i] = t.f * I_scaled;
    out.pf_prime[i] = t.pf * I_scaled + 1.0 / t.f;
    out.log_scale[i] = -t.log_scale;
  };
  auto sweep = [&](auto begin, auto end) {
    double prev_x = *rho;
    double prev_ls = theta.at(*rho).log_scale;
    cplx I = 0.0;
    for (auto it = begin; it != end; ++it) {
      const std::size_t i = static_cast<std::size_t>(*it);
      const double x = grid[i];
      const ThetaPoint t = theta.at(x);
      const double ref = t.log_scale;
      if (x != prev_x) {
        auto f = [&](double y) { return scaled_inverse_square(theta, y, ref); };
        const cplx J = quad_adaptive(f, prev_x, x, 1e-12, 1e-300, kinks, 20000).value;
        I = I * std::exp(-2.0 * (prev_ls - ref)) + J;
      } else {
        I = I * std::exp(-2.0 * (prev_ls - ref));
      }
      emit(i, I, t);
      prev_x = x;
      prev_ls = ref;
    }
  };
  std::vector<std::size_t> up, down;
  for (std::size_t i = 0; i < grid.size(); ++i) (grid[i] >= *rho ? up : down).push_back(i);
  std::reverse(down.begin(), down.end());
  if (!down.empty() && last_zero(theta, grid[down.back()], *rho))
    throw Error(ErrorKind::ThetaVanishes, "theta has a zero between a grid point and rho");
  sweep(up.begin(), up.end());
  sweep(down.begin(), down.end());
  return out;
}

WaveSolution growing_xi(const CoefficientModel& model, const SpectralPoint& z, const std::vector<double>& grid,
                        std::optional<double> rho, const JostOptions& options) {
  JostOptions opt = options;
  if (!grid.empty()) opt.left_limit = std::min(opt.left_limit, grid.front());
  if (rho) opt.left_limit = std::min(opt.left_limit, *rho);
  return growing_xi(JostSolution(model, z, opt), grid, rho);
}

}  // namespace jostlab
