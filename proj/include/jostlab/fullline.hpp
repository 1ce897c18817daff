#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "jostlab/spectral.hpp"

namespace jostlab {

/// theta_1 (decaying or outgoing at +inf) and theta_2 (at -inf) for one z on
/// the whole line.  theta_2(x) = theta~_1(-x) with theta~_1 the Jost solution
/// of the reflected model, so both are anchored at x = 0.
class LineJost {
 public:
  /// Both solutions are available on [left, right].
  LineJost(const CoefficientModel& model, const SpectralPoint& z, double left, double right,
           const JostOptions& options = {});

  ThetaPoint theta1(double x) const { return first_.at(x); }
  ThetaPoint theta2(double x) const;
  const SpectralPoint& z() const { return first_.z(); }

 private:
  JostSolution first_;
  JostSolution mirrored_;
};

WaveSolution jost_theta2(const CoefficientModel& model, const SpectralPoint& z, const std::vector<double>& grid,
                         const JostOptions& options = {});

struct FullLineScattering {
  double lambda = 0.0;
  /// {theta_2, theta_1} at lambda + i0.
  cplx w_plus;
  /// {theta_2(lambda + i0), theta_1(lambda - i0)}.
  cplx w_bold;
  double K1 = 0.0;
  double K2 = 0.0;
  /// 2 sqrt(p0 lambda) K1 K2.
  double gamma = 0.0;
  /// w_plus^-1 [[i gamma, w_bold], [conj w_bold, i gamma]], as written in the literature.
  Eigen::Matrix2cd S;
  /// The matrix with Psi_+ f = S_transform Psi_- f; it equals -S.
  Eigen::Matrix2cd S_transform;
  /// | |w|^2 - 4 p0 lambda K1^2 K2^2 - |w_bold|^2 | / |w|^2.
  double identity_residual = 0.0;
  /// ||S^* S - I|| (spectral norm).
  double unitarity_defect = 0.0;
  /// Relative spread of {theta_2, theta_1} over [-1, 1].
  double wronskian_spread = 0.0;
};

FullLineScattering fullline_wronskians(const CoefficientModel& model, double lambda, const JostOptions& options = {});

/// sqrt(p0 lambda) / (pi |w|^2) [K2^2 theta_1(x, +) theta_1(y, -) + K1^2 theta_2(x, +) theta_2(y, -)]
/// before taking the real part.
cplx fullline_density_representation(const CoefficientModel& model, double lambda, double x, double y,
                                     const JostOptions& options = {});
double fullline_spectral_density(const CoefficientModel& model, double lambda, double x, double y,
                                 const JostOptions& options = {});
/// The density from the jump of R(x, y; z) = theta_2(min) theta_1(max) / w across the cut.
double fullline_density_from_resolvent(const CoefficientModel& model, double lambda, double x, double y,
                                       const JostOptions& options = {});

/// Components of Psi_+ f = (int psi_2 f, int psi_1 f) for AbovePlus, and
/// Psi_- f = (int conj(psi_1) f, int conj(psi_2) f) for BelowMinus, with
/// psi_1 = c K2 theta_1(., lambda + i0), psi_2 = c K1 theta_2(., lambda + i0),
/// c = (p0 lambda)^(1/4) / (i sqrt(pi) w(lambda + i0)).
std::vector<std::array<cplx, 2>> fullline_transforms(const CoefficientModel& model, CutSide side,
                                                     const CompactFunction& f, const std::vector<double>& lambda_grid,
                                                     const JostOptions& options = {});

double fullline_transform_norm_squared(const CoefficientModel& model, CutSide side, const CompactFunction& f,
                                       const QuadratureRule& lambda_nodes, const JostOptions& options = {});

/// Largest relative gap between theta_1(x, lambda + i0) and its expansion
/// (conj(w_bold) theta_2(x, +) - w theta_2(x, -)) / (2 i sqrt(p0 lambda) K2^2).
double fullline_reconstruction_check(const CoefficientModel& model, double lambda, const std::vector<double>& grid,
                                     const JostOptions& options = {});

}  // namespace jostlab
