#include "jostlab/fullline.hpp"

#include <algorithm>
#include <cmath>

#include "jostlab/errors.hpp"

namespace jostlab {

namespace {

void require_full_line(const CoefficientModel& model) {
  if (model.domain() != DomainKind::FullLine)
    throw Error(ErrorKind::DomainError, "the whole-line problem needs a full_line model");
}

void require_positive_lambda(double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidSpectralPoint, "lambda must be positive");
}

JostOptions with_left(JostOptions opt, double left) {
  opt.left_limit = std::min({opt.left_limit, left, 0.0});
  return opt;
}

struct CutPair {
  LineJost up, dn;
  cplx w;  // w(lambda + i0)
  double K1, K2;
};

CutPair cut_pair(const CoefficientModel& model, double lambda, double left, double right, const JostOptions& opt) {
  require_full_line(model);
  require_positive_lambda(lambda);
  LineJost up(model, SpectralPoint::above(lambda), left, right, opt);
  LineJost dn(model, SpectralPoint::below(lambda), left, right, opt);
  const ThetaPoint a = up.theta2(0.0), b = up.theta1(0.0);
  const cplx w = wronskian(a.value(), a.flux(), b.value(), b.flux());
  return {std::move(up), std::move(dn), w, amplitude_K(model, lambda), amplitude_K(model.reflected(), lambda)};
}

}  // namespace

LineJost::LineJost(const CoefficientModel& model, const SpectralPoint& z, double left, double right,
                   const JostOptions& options)
    : first_((require_full_line(model), model), z, with_left(options, left)),
      mirrored_(model.reflected(), z, with_left(options, -right)) {}

ThetaPoint LineJost::theta2(double x) const {
  const ThetaPoint t = mirrored_.at(-x);
  return {t.f, -t.pf, t.log_scale};
}

WaveSolution jost_theta2(const CoefficientModel& model, const SpectralPoint& z, const std::vector<double>& grid,
                         const JostOptions& options) {
  WaveSolution out;
  out.z = z;
  out.kind = WaveKind::Jost;
  out.grid = grid;
  if (grid.empty()) return out;
  const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
  const LineJost line(model, z, *lo, *hi, options);
  for (double x : grid) {
    const ThetaPoint t = line.theta2(x);
    out.f.push_back(t.f);
    out.pf_prime.push_back(t.pf);
    out.log_scale.push_back(t.log_scale);
  }
  return out;
}

FullLineScattering fullline_wronskians(const CoefficientModel& model, double lambda, const JostOptions& options) {
  const CutPair c = cut_pair(model, lambda, -1.0, 1.0, options);
  FullLineScattering s;
  s.lambda = lambda;
  s.w_plus = c.w;
  const ThetaPoint t2 = c.up.theta2(0.0), t1m = c.dn.theta1(0.0);
  s.w_bold = wronskian(t2.value(), t2.flux(), t1m.value(), t1m.flux());
  s.K1 = c.K1;
  s.K2 = c.K2;
  const double k = std::sqrt(model.p0() * lambda);
  s.gamma = 2.0 * k * c.K1 * c.K2;
  const cplx ig(0.0, s.gamma);
  s.S << ig, s.w_bold, std::conj(s.w_bold), ig;
  s.S /= s.w_plus;
  s.S_transform = -s.S;
  const double lhs = std::norm(s.w_plus);
  s.identity_residual = std::abs(lhs - s.gamma * s.gamma - std::norm(s.w_bold)) / lhs;
  const Eigen::Matrix2cd D = s.S.adjoint() * s.S - Eigen::Matrix2cd::Identity();
  s.unitarity_defect = Eigen::JacobiSVD<Eigen::Matrix2cd>(D).singularValues()(0);
  for (double x : linspace(-1.0, 1.0, 9)) {
    const ThetaPoint a = c.up.theta2(x), b = c.up.theta1(x);
    s.wronskian_spread =
        std::max(s.wronskian_spread, std::abs(wronskian(a.value(), a.flux(), b.value(), b.flux()) - c.w));
  }
  s.wronskian_spread /= std::abs(c.w);
  return s;
}

cplx fullline_density_representation(const CoefficientModel& model, double lambda, double x, double y,
                                     const JostOptions& options) {
  const CutPair c = cut_pair(model, lambda, std::min(x, y), std::max(x, y), options);
  const double k = std::sqrt(model.p0() * lambda);
  const cplx t1 = c.up.theta1(x).value() * c.dn.theta1(y).value();
  const cplx t2 = c.up.theta2(x).value() * c.dn.theta2(y).value();
  return k / (kPi * std::norm(c.w)) * (c.K2 * c.K2 * t1 + c.K1 * c.K1 * t2);
}

double fullline_spectral_density(const CoefficientModel& model, double lambda, double x, double y,
                                 const JostOptions& options) {
  return fullline_density_representation(model, lambda, x, y, options).real();
}

double fullline_density_from_resolvent(const CoefficientModel& model, double lambda, double x, double y,
                                       const JostOptions& options) {
  const double lo = std::min(x, y), hi = std::max(x, y);
  const CutPair c = cut_pair(model, lambda, lo, hi, options);
  const ThetaPoint a = c.dn.theta2(0.0), b = c.dn.theta1(0.0);
  const cplx w_minus = wronskian(a.value(), a.flux(), b.value(), b.flux());
  const cplx Rp = c.up.theta2(lo).value() * c.up.theta1(hi).value() / c.w;
  const cplx Rm = c.dn.theta2(lo).value() * c.dn.theta1(hi).value() / w_minus;
  return ((Rp - Rm) / cplx(0.0, 2.0 * kPi)).real();
}

std::vector<std::array<cplx, 2>> fullline_transforms(const CoefficientModel& model, CutSide side,
                                                     const CompactFunction& f, const std::vector<double>& lambda_grid,
                                                     const JostOptions& options) {
  if (side == CutSide::Interior) throw Error(ErrorKind::InvalidArgument, "transform needs a side of the cut");
  std::vector<double> breaks = f.kinks;
  for (double b : model.breakpoints()) breaks.push_back(b);
  breaks.push_back(0.0);
  std::vector<std::array<cplx, 2>> out;
  for (double lambda : lambda_grid) {
    require_positive_lambda(lambda);
    const LineJost up(model, SpectralPoint::above(lambda), f.start, f.length, options);
    const ThetaPoint a = up.theta2(0.0), b = up.theta1(0.0);
    const cplx w = wronskian(a.value(), a.flux(), b.value(), b.flux());
    const double K1 = amplitude_K(model, lambda), K2 = amplitude_K(model.reflected(), lambda);
    const cplx c = std::pow(model.p0() * lambda, 0.25) / (cplx(0.0, std::sqrt(kPi)) * w);
    double kmax = 0.0;
    for (double x : linspace(f.start, f.length, 201))
      kmax = std::max(kmax, std::sqrt(std::max(0.0, lambda - model.q_total(x)) / model.p(x)));
    const QuadratureRule rule = cell_rule(f.start, f.length, std::min(0.25, 1.0 / (kmax + 1e-3)), breaks);
    cplx i1 = 0.0, i2 = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double x = rule.nodes[i];
      const cplx fx = f(x) * rule.weights[i];
      const cplx psi1 = c * K2 * up.theta1(x).value();
      const cplx psi2 = c * K1 * up.theta2(x).value();
      if (side == CutSide::AbovePlus) {
        i1 += psi2 * fx;
        i2 += psi1 * fx;
      } else {
        i1 += std::conj(psi1) * fx;
        i2 += std::conj(psi2) * fx;
      }
    }
    out.push_back({i1, i2});
  }
  return out;
}

double fullline_transform_norm_squared(const CoefficientModel& model, CutSide side, const CompactFunction& f,
                                       const QuadratureRule& lambda_nodes, const JostOptions& options) {
  const auto t = fullline_transforms(model, side, f, lambda_nodes.nodes, options);
  double s = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    s += lambda_nodes.weights[i] * (std::norm(t[i][0]) + std::norm(t[i][1]));
  return s;
}

double fullline_reconstruction_check(const CoefficientModel& model, double lambda, const std::vector<double>& grid,
                                     const JostOptions& options) {
  if (grid.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
  const CutPair c = cut_pair(model, lambda, std::min(*lo, -1.0), std::max(*hi, 1.0), options);
  const ThetaPoint t2 = c.up.theta2(0.0), t1m = c.dn.theta1(0.0);
  const cplx wb = wronskian(t2.value(), t2.flux(), t1m.value(), t1m.flux());
  const cplx denom = cplx(0.0, 2.0 * std::sqrt(model.p0() * lambda)) * c.K2 * c.K2;
  double gap = 0.0, size = 0.0;
  for (double x : grid) {
    const cplx direct = c.up.theta1(x).value();
    const cplx rebuilt = (std::conj(wb) * c.up.theta2(x).value() - c.w * c.dn.theta2(x).value()) / denom;
    gap = std::max(gap, std::abs(direct - rebuilt));
    size = std::max(size, std::abs(direct));
  }
  return gap / size;
}

}  // namespace jostlab
