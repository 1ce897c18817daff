#pragma once

#include <vector>

#include "jostlab/jost.hpp"

namespace jostlab {

struct BoundaryCondition {
  enum class Kind { Dirichlet, Robin };
  Kind kind = Kind::Dirichlet;
  double h = 0.0;

  static BoundaryCondition dirichlet() { return {Kind::Dirichlet, 0.0}; }
  static BoundaryCondition robin(double h);
  /// (phi(0), p(0) phi'(0)).
  Pair initial_data(const CoefficientModel& model) const;
};

/// Regular solution on a grid starting at 0 (forward ODE integration).
WaveSolution regular_phi(const CoefficientModel& model, const BoundaryCondition& bc, const SpectralPoint& z,
                         const std::vector<double>& grid, const Tolerances& tol = {});

struct WronskianResult {
  cplx value;
  double max_deviation = 0.0;
};

/// {f, g} = p (f' g - f g') on the common grid: mean value and spread.
WronskianResult wronskian(const WaveSolution& f, const WaveSolution& g);

/// w(z) from the boundary values of theta: p(0) theta(0) for Dirichlet,
/// h p(0) theta(0) - (p theta')(0) for Robin.
cplx jost_function_w(const JostSolution& theta, const BoundaryCondition& bc);
cplx jost_function_w(const CoefficientModel& model, const BoundaryCondition& bc, const SpectralPoint& z,
                     const JostOptions& options = {});

/// K(lambda) = exp(-int_0^inf sqrt(((q - lambda)/p)_+)).
double amplitude_K(const CoefficientModel& model, double lambda);
/// Phi(x, lambda) = int_0^x sqrt(((lambda - q)/p)_+).
double phase_Phi(const CoefficientModel& model, double lambda, double x);

struct ScatteringDatum {
  double lambda = 0.0;
  cplx w_plus;
  double kappa = 0.0;
  double eta = 0.0;
  double K = 0.0;
  cplx S;
};

/// Limit amplitude and phase along a grid of positive lambda.  eta is
/// continuous along the grid, with arg w at the largest lambda taken in
/// (-pi, pi]; steps larger than pi/2 are refined with midpoints.
std::vector<ScatteringDatum> amplitude_phase(const CoefficientModel& model, const BoundaryCondition& bc,
                                             const std::vector<double>& lambda_grid, const JostOptions& options = {});

struct AsymptoticsReport {
  double lambda = 0.0;
  double amplitude = 0.0;  // kappa / (sqrt(p0 lambda) K)
  double eta = 0.0;
  std::vector<double> X;
  std::vector<double> phi;
  std::vector<double> predicted;
  std::vector<double> residual;
  std::vector<double> epsilon;
  /// max residual / (amplitude epsilon) over the points with epsilon > 0.
  double fitted_constant = 0.0;
};

AsymptoticsReport verify_phi_asymptotics(const CoefficientModel& model, const BoundaryCondition& bc, double lambda,
                                         const std::vector<double>& X_list, const JostOptions& options = {});

struct GrowthReport {
  cplx w;
  bool eigenvalue_branch = false;
  /// w / (2 sqrt(-p0 z)), or -{phi, xi} on the eigenvalue branch.
  cplx target;
  std::vector<double> X;
  /// phi(X) a(X), or phi(X) / a(X) on the eigenvalue branch.
  std::vector<cplx> ratio;
  std::vector<double> relative_deviation;
};

GrowthReport verify_phi_growth(const CoefficientModel& model, const BoundaryCondition& bc, const SpectralPoint& z,
                               const std::vector<double>& X_list, const JostOptions& options = {});

}  // namespace jostlab
