#include "jostlab/regular.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jostlab/errors.hpp"

namespace jostlab {

BoundaryCondition BoundaryCondition::robin(double h) {
  if (!std::isfinite(h)) throw Error(ErrorKind::InvalidArgument, "Robin parameter must be finite");
  return {Kind::Robin, h};
}

Pair BoundaryCondition::initial_data(const CoefficientModel& model) const {
  const double p = model.p(0.0);
  if (kind == Kind::Dirichlet) return {cplx(0.0), cplx(p)};
  return {cplx(1.0), cplx(p * h)};
}

WaveSolution regular_phi(const CoefficientModel& model, const BoundaryCondition& bc, const SpectralPoint& z,
                         const std::vector<double>& grid, const Tolerances& tol) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw Error(ErrorKind::InvalidArgument, "grid must be sorted");
  if (!grid.empty() && grid.front() < 0.0) throw Error(ErrorKind::DomainError, "the regular solution starts at 0");
  tol.validate();
  std::vector<double> bps;
  for (double b : model.breakpoints())
    if (b > 0.0) bps.push_back(b);
  IvpResult res = integrate_ivp(wave_rhs(model, z.value()), 0.0, bc.initial_data(model), grid, bps, tol);
  WaveSolution out;
  out.grid = grid;
  out.z = z;
  out.kind = WaveKind::Regular;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.f.push_back(res.values[i][0]);
    out.pf_prime.push_back(res.values[i][1]);
    out.log_scale.push_back(res.log_scale[i]);
  }
  return out;
}

WronskianResult wronskian(const WaveSolution& f, const WaveSolution& g) {
  if (f.grid.size() != g.grid.size() || f.grid.empty())
    throw Error(ErrorKind::GridMismatch, "Wronskian needs solutions on the same grid");
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    if (std::abs(f.grid[i] - g.grid[i]) > 1e-12 * std::max(1.0, std::abs(f.grid[i])))
      throw Error(ErrorKind::GridMismatch, "Wronskian needs solutions on the same grid");
  if (f.z.value() != g.z.value()) throw Error(ErrorKind::InvalidArgument, "Wronskian needs solutions for the same z");
  std::vector<cplx> W;
  for (std::size_t i = 0; i < f.grid.size(); ++i)
    W.push_back(wronskian(f.f[i], f.pf_prime[i], g.f[i], g.pf_prime[i]) * std::exp(f.log_scale[i] + g.log_scale[i]));
  WronskianResult out;
  out.value = std::accumulate(W.begin(), W.end(), cplx(0.0)) / static_cast<double>(W.size());
  for (const cplx& v : W) out.max_deviation = std::max(out.max_deviation, std::abs(v - out.value));
  return out;
}

cplx jost_function_w(const JostSolution& theta, const BoundaryCondition& bc) {
  const ThetaPoint t = theta.at(0.0);
  const double p = theta.model().p(0.0);
  if (bc.kind == BoundaryCondition::Kind::Dirichlet) return p * t.value();
  return bc.h * p * t.value() - t.flux();
}

cplx jost_function_w(const CoefficientModel& model, const BoundaryCondition& bc, const SpectralPoint& z,
                     const JostOptions& options) {
  return jost_function_w(JostSolution(model, z, options), bc);
}

namespace {

double positive_part_integral(const CoefficientModel& model, double sign, double lambda, double a, double b) {
  if (!(b > a)) return 0.0;
  std::vector<double> kinks = turning_points(model, lambda, a, b);
  for (double k : model.breakpoints())
    if (k > a && k < b) kinks.push_back(k);
  auto f = [&](double y) { return cplx(std::sqrt(std::max(0.0, sign * (model.q(y) - lambda) / model.p(y)))); };
  return quad_adaptive(f, a, b, 1e-14, 1e-15, kinks, 20000).value.real();
}

}  // namespace

double amplitude_K(const CoefficientModel& model, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidSpectralPoint, "K needs lambda > 0");
  // Beyond x1 the potential stays below lambda/2, so the positive part vanishes.
  const double x1 = threshold_x1(model, cplx(lambda, 0.0));
  return std::exp(-positive_part_integral(model, 1.0, lambda, 0.0, x1));
}

double phase_Phi(const CoefficientModel& model, double lambda, double x) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidSpectralPoint, "Phi needs lambda > 0");
  if (x < 0.0) throw Error(ErrorKind::DomainError, "Phi needs x >= 0");
  const double x1 = std::min(x, threshold_x1(model, cplx(lambda, 0.0)));
  double total = positive_part_integral(model, -1.0, lambda, 0.0, x1);
  if (x > x1) {
    std::vector<double> kinks(model.breakpoints().begin(), model.breakpoints().end());
    auto f = [&](double y) { return cplx(std::sqrt((lambda - model.q(y)) / model.p(y))); };
    total += quad_adaptive(f, x1, x, 1e-15, 1e-15, kinks, 20000).value.real();
  }
  return total;
}

namespace {

double wrap(double d) {
  while (d > kPi) d -= 2 * kPi;
  while (d <= -kPi) d += 2 * kPi;
  return d;
}

}  // namespace

std::vector<ScatteringDatum> amplitude_phase(const CoefficientModel& model, const BoundaryCondition& bc,
                                             const std::vector<double>& lambda_grid, const JostOptions& options) {
  for (double l : lambda_grid)
    if (!(l > 0.0)) throw Error(ErrorKind::InvalidSpectralPoint, "amplitude and phase need lambda > 0");
  auto w_at = [&](double l) { return jost_function_w(model, bc, SpectralPoint::above(l), options); };

  std::vector<std::size_t> order(lambda_grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lambda_grid[a] > lambda_grid[b]; });

  // Phase increment from (l_hi, w_hi) down to (l_lo, w_lo), refining large jumps.
  auto step = [&](auto&& self, double l_hi, cplx w_hi, double l_lo, cplx w_lo, int depth) -> double {
    const double d = wrap(std::arg(w_lo) - std::arg(w_hi));
    if (std::abs(d) <= kPi / 2 || l_hi == l_lo) return d;
    if (depth >= 12)
      throw Error(ErrorKind::PhaseUnwrapAmbiguity, "phase of w jumps by more than pi/2 after refinement");
    const double lm = 0.5 * (l_hi + l_lo);
    const cplx wm = w_at(lm);
    return self(self, l_hi, w_hi, lm, wm, depth + 1) + self(self, lm, wm, l_lo, w_lo, depth + 1);
  };

  std::vector<ScatteringDatum> out(lambda_grid.size());
  double eta = 0.0, prev_l = 0.0;
  cplx prev_w;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double l = lambda_grid[order[k]];
    const cplx w = w_at(l);
    if (w == cplx(0.0)) throw Error(ErrorKind::AtEigenvalue, "w vanishes on the positive axis");
    eta = k == 0 ? std::arg(w) : eta + step(step, prev_l, prev_w, l, w, 0);
    ScatteringDatum& d = out[order[k]];
    d.lambda = l;
    d.w_plus = w;
    d.kappa = std::abs(w);
    d.eta = eta;
    d.K = amplitude_K(model, l);
    d.S = std::conj(w) / w;
    prev_l = l;
    prev_w = w;
  }
  return out;
}

AsymptoticsReport verify_phi_asymptotics(const CoefficientModel& model, const BoundaryCondition& bc, double lambda,
                                         const std::vector<double>& X_list, const JostOptions& options) {
  AsymptoticsReport rep;
  rep.lambda = lambda;
  const ScatteringDatum d = amplitude_phase(model, bc, {lambda}, options).front();
  rep.amplitude = d.kappa / (std::sqrt(model.p0() * lambda) * d.K);
  rep.eta = d.eta;
  std::vector<double> X = X_list;
  std::sort(X.begin(), X.end());
  const WaveSolution phi = regular_phi(model, bc, SpectralPoint::above(lambda), X, options.tol);
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double value = phi.value(i).real();
    const double pred = rep.amplitude * std::sin(phase_Phi(model, lambda, X[i]) - d.eta);
    const double eps = epsilon_tail(model, X[i]);
    rep.X.push_back(X[i]);
    rep.phi.push_back(value);
    rep.predicted.push_back(pred);
    rep.residual.push_back(std::abs(value - pred));
    rep.epsilon.push_back(eps);
    if (eps > 0.0) rep.fitted_constant = std::max(rep.fitted_constant, rep.residual.back() / (rep.amplitude * eps));
  }
  return rep;
}

GrowthReport verify_phi_growth(const CoefficientModel& model, const BoundaryCondition& bc, const SpectralPoint& z,
                               const std::vector<double>& X_list, const JostOptions& options) {
  if (z.on_cut() && z.lambda() > 0.0)
    throw Error(ErrorKind::InvalidSpectralPoint, "growth asymptotics hold only off [0, inf)");
  GrowthReport rep;
  std::vector<double> X = X_list;
  std::sort(X.begin(), X.end());
  const JostSolution theta(model, z, options);
  rep.w = jost_function_w(theta, bc);
  const ThetaPoint t0 = theta.at(0.0);
  const double scale = std::max(std::abs(model.p(0.0) * t0.value()), std::abs(t0.flux()));
  rep.eigenvalue_branch = std::abs(rep.w) < options.tol.eigen_w_tol * scale;
  const WaveSolution phi = regular_phi(model, bc, z, X, options.tol);
  if (rep.eigenvalue_branch) {
    const WaveSolution xi = growing_xi(theta, {X.front()}, X.front());
    const WaveSolution ph = regular_phi(model, bc, z, {X.front()}, options.tol);
    rep.target = -wronskian(ph, xi).value;
  } else {
    rep.target = rep.w / (2.0 * model.p0() * omega_infinity(model, z));
  }
  for (std::size_t i = 0; i < X.size(); ++i) {
    const cplx Om = theta.Omega(X[i]);
    const double sign = rep.eigenvalue_branch ? 1.0 : -1.0;  // multiply by a^{+1} or a^{-1}
    const cplx r = phi.f[i] * std::exp(cplx(phi.log_scale[i], 0.0) + sign * Om);
    rep.X.push_back(X[i]);
    rep.ratio.push_back(r);
    rep.relative_deviation.push_back(std::abs(r - rep.target) / std::abs(rep.target));
  }
  return rep;
}

}  // namespace jostlab
