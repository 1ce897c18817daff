#include "jostlab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/interpolators/barycentric_rational.hpp>

#include "jostlab/errors.hpp"

namespace jostlab {

namespace {

void require_positive_lambda(double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidSpectralPoint, "lambda must be positive");
}

std::vector<double> model_breaks(const CoefficientModel& model) {
  return {model.breakpoints().begin(), model.breakpoints().end()};
}

double w_scale(const JostSolution& theta) {
  const ThetaPoint t0 = theta.at(0.0);
  return std::max(std::abs(theta.model().p(0.0) * t0.value()), std::abs(t0.flux()));
}

// Largest local wavenumber sqrt((lambda - q)/p) over [0, L].
double local_wavenumber(const CoefficientModel& model, double lambda, double L) {
  double k = 0.0;
  for (double x : linspace(0.0, std::max(L, 1e-12), 201))
    k = std::max(k, std::sqrt(std::max(0.0, lambda - model.q_total(x)) / model.p(x)));
  return k;
}

struct SortedRule {
  std::vector<double> x;
  std::vector<double> w;
};

SortedRule sorted(const QuadratureRule& rule) {
  std::vector<std::size_t> idx(rule.nodes.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rule.nodes[a] < rule.nodes[b]; });
  SortedRule out;
  for (std::size_t i : idx) {
    out.x.push_back(rule.nodes[i]);
    out.w.push_back(rule.weights[i]);
  }
  return out;
}

}  // namespace

CompactFunction CompactFunction::sampled(const std::vector<double>& x, const std::vector<cplx>& values) {
  if (x.size() != values.size() || x.size() < 4)
    throw Error(ErrorKind::InvalidArgument, "sampled function needs at least 4 matching samples");
  if (!std::is_sorted(x.begin(), x.end())) throw Error(ErrorKind::InvalidArgument, "sample points must be sorted");
  std::vector<double> re, im;
  for (const cplx& v : values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  using Interp = boost::math::barycentric_rational<double>;
  auto ir = std::make_shared<Interp>(x.data(), re.data(), x.size(), 3);
  auto ii = std::make_shared<Interp>(x.data(), im.data(), x.size(), 3);
  CompactFunction out;
  out.length = x.back();
  out.start = x.front();
  out.f = [ir, ii](double t) { return cplx((*ir)(t), (*ii)(t)); };
  return out;
}

QuadratureRule cell_rule(double a, double b, double h_max, std::vector<double> breaks, int order) {
  if (!(b >= a) || !(h_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "bad quadrature interval");
  std::vector<double> cuts{a};
  for (double c : breaks)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  QuadratureRule rule;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (len <= 0.0) continue;
    const int panels = std::max(8, static_cast<int>(std::ceil(len / h_max)));
    QuadratureRule part = gauss_legendre(cuts[i], cuts[i + 1], panels, order);
    rule.nodes.insert(rule.nodes.end(), part.nodes.begin(), part.nodes.end());
    rule.weights.insert(rule.weights.end(), part.weights.begin(), part.weights.end());
  }
  return rule;
}

double norm_squared(const CompactFunction& f) {
  const QuadratureRule r = cell_rule(f.start, f.length, 0.25, f.kinks);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::norm(f(r.nodes[i]));
  return s;
}

ResolventKernel::ResolventKernel(const CoefficientModel& model, const BoundaryCondition& bc, const SpectralPoint& z,
                                 const JostOptions& options)
    : bc_(bc), theta_(std::make_shared<const JostSolution>(model, z, options)) {
  w_ = jost_function_w(*theta_, bc);
  if (std::abs(w_) < options.tol.eigen_w_tol * w_scale(*theta_))
    throw Error(ErrorKind::AtEigenvalue, "the Jost function vanishes at this z");
}

cplx ResolventKernel::operator()(double x, double y) const {
  const double lo = std::min(x, y), hi = std::max(x, y);
  const WaveSolution phi = regular_phi(theta_->model(), bc_, theta_->z(), {lo}, theta_->options().tol);
  return phi.value(0) * theta_->at(hi).value() / w_;
}

SampledFunction resolvent_apply(const CoefficientModel& model, const BoundaryCondition& bc, const SpectralPoint& z,
                                const CompactFunction& g, const std::vector<double>& grid,
                                const JostOptions& options) {
  if (!std::is_sorted(grid.begin(), grid.end()) || (!grid.empty() && grid.front() < 0.0))
    throw Error(ErrorKind::InvalidArgument, "grid must be sorted and non-negative");
  const JostSolution theta(model, z, options);
  const cplx w = jost_function_w(theta, bc);
  if (std::abs(w) < options.tol.eigen_w_tol * w_scale(theta))
    throw Error(ErrorKind::AtEigenvalue, "the Jost function vanishes at this z");

  std::vector<double> breaks = g.kinks;
  breaks.push_back(g.start);
  for (double b : model.breakpoints()) breaks.push_back(b);
  for (double x : grid) breaks.push_back(x);
  const double k = std::sqrt(std::abs(z.value())) + local_wavenumber(model, z.lambda(), g.length);
  const SortedRule rule = sorted(cell_rule(0.0, g.length, std::min(0.5, 1.0 / k), breaks));

  const WaveSolution phi_nodes = regular_phi(model, bc, z, rule.x, options.tol);
  std::vector<cplx> A(rule.x.size() + 1, 0.0), B(rule.x.size() + 1, 0.0);
  for (std::size_t i = 0; i < rule.x.size(); ++i) A[i + 1] = A[i] + rule.w[i] * phi_nodes.value(i) * g(rule.x[i]);
  for (std::size_t i = rule.x.size(); i-- > 0;)
    B[i] = B[i + 1] + rule.w[i] * theta.at(rule.x[i]).value() * g(rule.x[i]);

  const WaveSolution phi = regular_phi(model, bc, z, grid, options.tol);
  SampledFunction out;
  out.x = grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t j = static_cast<std::size_t>(std::lower_bound(rule.x.begin(), rule.x.end(), grid[i]) -
                                                   rule.x.begin());
    const ThetaPoint t = theta.at(grid[i]);
    out.f.push_back((phi.value(i) * B[j] + t.value() * A[j]) / w);
    out.pf_prime.push_back((phi.flux(i) * B[j] + t.flux() * A[j]) / w);
  }
  return out;
}

cplx resolvent_form(const CoefficientModel& model, const BoundaryCondition& bc, const SpectralPoint& z,
                    const CompactFunction& f, const CompactFunction& g, const JostOptions& options) {
  std::vector<double> breaks = g.kinks;
  breaks.push_back(g.start);
  for (double b : model.breakpoints()) breaks.push_back(b);
  const SortedRule rule = sorted(cell_rule(0.0, g.length, 0.5, breaks));
  const SampledFunction Rf = resolvent_apply(model, bc, z, f, rule.x, options);
  cplx s = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * Rf.f[i] * std::conj(g(rule.x[i]));
  return s;
}

NegativeCutReport negative_cut_identity_check(const CoefficientModel& model, const BoundaryCondition& bc,
                                              double lambda, const std::vector<double>& grid,
                                              const JostOptions& options) {
  if (!(lambda < 0.0)) throw Error(ErrorKind::InvalidSpectralPoint, "the check needs lambda < 0");
  const JostSolution up(model, SpectralPoint::above(lambda), options);
  const JostSolution dn(model, SpectralPoint::below(lambda), options);
  const cplx wu = jost_function_w(up, bc), wd = jost_function_w(dn, bc);
  NegativeCutReport rep;
  rep.lambda = lambda;
  double size = 0.0;
  for (double x : grid) {
    const cplx a = up.at(x).value() / wu, b = dn.at(x).value() / wd;
    size = std::max(size, std::abs(a));
    rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(a - b));
  }
  if (size > 0.0) rep.max_discrepancy /= size;
  return rep;
}

std::pair<double, double> default_eigen_bracket(const CoefficientModel& model) {
  const double right = model.x0() + 100.0 * model.length_scale();
  std::vector<double> xs = linspace(model.x_min() > -1e300 ? std::max(model.x_min(), -right) : -right, right, 4001);
  for (double b : model.breakpoints()) {
    xs.push_back(b * (1.0 - 1e-12) - 1e-12);
    xs.push_back(b);
  }
  double sup = 0.0;
  for (double x : xs)
    if (x >= model.x_min()) sup = std::max(sup, std::abs(model.q_total(x)));
  double hi = -1e-6;
  while (hi > -0.1 && threshold_x1(model, cplx(hi, 0.0)) > 1e5) hi *= 2.0;
  return {-sup - 1.0, hi};
}

namespace {

// w(lambda + i0) with the constant phase of theta removed; real for lambda < 0.
std::pair<double, double> rotated_w(const CoefficientModel& model, const BoundaryCondition& bc, double lambda,
                                    const JostOptions& options) {
  const JostSolution theta(model, SpectralPoint::above(lambda), options);
  const cplx w = jost_function_w(theta, bc);
  const cplx rot = std::polar(1.0, theta.Omega(theta.X()).imag());
  return {(w * rot).real(), std::abs(w)};
}

}  // namespace

JostScan scan_jost_function(const CoefficientModel& model, const BoundaryCondition& bc, double lo, double hi,
                            std::size_t n, const JostOptions& options) {
  if (!(lo < hi) || !(hi < 0.0)) throw Error(ErrorKind::InvalidArgument, "bracket must satisfy lo < hi < 0");
  if (n < 4) throw Error(ErrorKind::InvalidArgument, "scan needs at least 4 points");
  std::vector<double> pts = linspace(lo, hi, n - n / 4);
  // Bound states of slowly decaying wells crowd towards 0.
  const double a = -hi, b = std::min(-lo, 1.0);
  if (b > a)
    for (double t : logspace(a, b, n / 4)) pts.push_back(-t);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  JostScan scan;
  scan.min_abs_w = 1e300;
  for (double l : pts) {
    const auto [wr, wa] = rotated_w(model, bc, l, options);
    scan.lambda.push_back(l);
    scan.w_real.push_back(wr);
    scan.min_abs_w = std::min(scan.min_abs_w, wa);
  }
  return scan;
}

std::vector<EigenvalueRecord> find_eigenvalues(const CoefficientModel& model, const BoundaryCondition& bc, double lo,
                                               double hi, std::size_t scan_points, const JostOptions& options) {
  const JostScan scan = scan_jost_function(model, bc, lo, hi, scan_points, options);
  auto g = [&](double l) { return rotated_w(model, bc, l, options).first; };
  std::vector<EigenvalueRecord> out;
  for (std::size_t i = 1; i < scan.lambda.size(); ++i) {
    const double a = scan.w_real[i - 1], b = scan.w_real[i];
    if (a == 0.0 || (a < 0.0) == (b < 0.0)) {
      if (a == 0.0) out.push_back({scan.lambda[i - 1], 0.0, 1});
      continue;
    }
    EigenvalueRecord r;
    r.z_star = find_root_scalar(g, scan.lambda[i - 1], scan.lambda[i], options.tol.root_atol * 1e-3);
    r.w_residual = rotated_w(model, bc, r.z_star, options).second;
    out.push_back(r);
  }
  return out;
}

double spectral_density(const CoefficientModel& model, const BoundaryCondition& bc, double lambda, double x, double y,
                        const JostOptions& options) {
  require_positive_lambda(lambda);
  const cplx w = jost_function_w(model, bc, SpectralPoint::above(lambda), options);
  const double K = amplitude_K(model, lambda);
  const WaveSolution phi =
      regular_phi(model, bc, SpectralPoint::above(lambda), {std::min(x, y), std::max(x, y)}, options.tol);
  return std::sqrt(model.p0() * lambda) * K * K * phi.value(0).real() * phi.value(1).real() /
         (kPi * std::norm(w));
}

double spectral_density_from_resolvent(const CoefficientModel& model, const BoundaryCondition& bc, double lambda,
                                       double x, double y, const JostOptions& options) {
  require_positive_lambda(lambda);
  const ResolventKernel up(model, bc, SpectralPoint::above(lambda), options);
  const ResolventKernel dn(model, bc, SpectralPoint::below(lambda), options);
  return ((up(x, y) - dn(x, y)) / cplx(0.0, 2.0 * kPi)).real();
}

namespace {

cplx psi_normalizer(const CoefficientModel& model, const BoundaryCondition& bc, CutSide side, double lambda,
                    const JostOptions& options) {
  require_positive_lambda(lambda);
  if (side == CutSide::Interior) throw Error(ErrorKind::InvalidArgument, "psi needs a side of the cut");
  const cplx w = jost_function_w(model, bc, SpectralPoint::above(lambda), options);
  const double c = std::pow(model.p0() * lambda, 0.25) * amplitude_K(model, lambda) / std::sqrt(kPi);
  // psi_+ carries w(lambda - i0) = conj(w(lambda + i0)).
  return side == CutSide::AbovePlus ? c / std::conj(w) : c / w;
}

}  // namespace

WaveSolution eigenfunction_psi(const CoefficientModel& model, const BoundaryCondition& bc, CutSide side,
                               double lambda, const std::vector<double>& grid, const JostOptions& options) {
  const cplx c = psi_normalizer(model, bc, side, lambda, options);
  WaveSolution psi = regular_phi(model, bc, SpectralPoint::above(lambda), grid, options.tol);
  for (auto& v : psi.f) v *= c;
  for (auto& v : psi.pf_prime) v *= c;
  return psi;
}

std::vector<cplx> transform_Psi(const CoefficientModel& model, const BoundaryCondition& bc, CutSide side,
                                const CompactFunction& f, const std::vector<double>& lambda_grid,
                                const JostOptions& options) {
  std::vector<double> breaks = f.kinks;
  breaks.push_back(f.start);
  for (double b : model_breaks(model)) breaks.push_back(b);
  std::vector<cplx> out;
  for (double lambda : lambda_grid) {
    const cplx c = psi_normalizer(model, bc, side, lambda, options);
    const double k = local_wavenumber(model, lambda, f.length) + 1e-3;
    const SortedRule rule = sorted(cell_rule(0.0, f.length, std::min(0.25, 1.0 / k), breaks));
    const WaveSolution phi = regular_phi(model, bc, SpectralPoint::above(lambda), rule.x, options.tol);
    cplx s = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * phi.value(i).real() * f(rule.x[i]);
    out.push_back(std::conj(c) * s);
  }
  return out;
}

QuadratureRule lambda_rule(double lambda_lo, double lambda_hi, int panels, int order) {
  if (!(lambda_lo >= 0.0) || !(lambda_hi > lambda_lo)) throw Error(ErrorKind::InvalidArgument, "bad lambda range");
  QuadratureRule k = gauss_legendre(std::sqrt(lambda_lo), std::sqrt(lambda_hi), panels, order);
  QuadratureRule out;
  for (std::size_t i = 0; i < k.nodes.size(); ++i) {
    out.nodes.push_back(k.nodes[i] * k.nodes[i]);
    out.weights.push_back(2.0 * k.nodes[i] * k.weights[i]);
  }
  return out;
}

double transform_norm_squared(const CoefficientModel& model, const BoundaryCondition& bc, CutSide side,
                              const CompactFunction& f, const QuadratureRule& lambda_nodes,
                              const JostOptions& options) {
  const std::vector<cplx> t = transform_Psi(model, bc, side, f, lambda_nodes.nodes, options);
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) s += lambda_nodes.weights[i] * std::norm(t[i]);
  return s;
}

cplx scattering_matrix(const CoefficientModel& model, const BoundaryCondition& bc, double lambda,
                       const JostOptions& options) {
  require_positive_lambda(lambda);
  const cplx w = jost_function_w(model, bc, SpectralPoint::above(lambda), options);
  return std::conj(w) / w;
}

SampledFunction wave_operator_apply(const CoefficientModel& model, const BoundaryCondition& bc, CutSide side,
                                    const CompactFunction& f, const std::vector<double>& grid,
                                    const QuadratureRule& lambda_nodes, const JostOptions& options) {
  const CoefficientModel free = make_model(family::Free{}, family::ConstantP{model.p0()});
  const std::vector<cplx> t0 =
      transform_Psi(free, BoundaryCondition::dirichlet(), CutSide::AbovePlus, f, lambda_nodes.nodes, options);
  SampledFunction out;
  out.x = grid;
  out.f.assign(grid.size(), 0.0);
  out.pf_prime.assign(grid.size(), 0.0);
  for (std::size_t j = 0; j < t0.size(); ++j) {
    const WaveSolution psi = eigenfunction_psi(model, bc, side, lambda_nodes.nodes[j], grid, options);
    const cplx c = lambda_nodes.weights[j] * t0[j];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out.f[i] += c * psi.value(i);
      out.pf_prime[i] += c * psi.flux(i);
    }
  }
  return out;
}

}  // namespace jostlab
