#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "jostlab/regular.hpp"

namespace jostlab {

/// A function on [start, length], taken to vanish outside.
struct CompactFunction {
  std::function<cplx(double)> f;
  double length = 0.0;
  /// Interior points where f is not smooth; quadrature cells break there.
  std::vector<double> kinks;
  double start = 0.0;

  cplx operator()(double x) const { return (x < start || x > length) ? cplx(0.0) : f(x); }
  /// Barycentric rational interpolation of samples on [x.front(), x.back()].
  static CompactFunction sampled(const std::vector<double>& x, const std::vector<cplx>& values);
};

/// Gauss-Legendre nodes covering [a, b] with cells no wider than h_max,
/// split at the given break points.
QuadratureRule cell_rule(double a, double b, double h_max, std::vector<double> breaks, int order = 10);

/// int |f|^2 over the support.
double norm_squared(const CompactFunction& f);

struct SampledFunction {
  std::vector<double> x;
  std::vector<cplx> f;
  std::vector<cplx> pf_prime;
};

/// R(x, y; z) = phi(min) theta(max) / w.
class ResolventKernel {
 public:
  ResolventKernel(const CoefficientModel& model, const BoundaryCondition& bc, const SpectralPoint& z,
                  const JostOptions& options = {});

  cplx operator()(double x, double y) const;
  const SpectralPoint& z() const { return theta_->z(); }
  cplx w() const { return w_; }

 private:
  BoundaryCondition bc_;
  std::shared_ptr<const JostSolution> theta_;
  cplx w_;
};

/// (R(z) g)(x) and its flux at the grid points, by quadrature against phi and theta.
SampledFunction resolvent_apply(const CoefficientModel& model, const BoundaryCondition& bc, const SpectralPoint& z,
                                const CompactFunction& g, const std::vector<double>& grid,
                                const JostOptions& options = {});

/// <R(z) f, g> = int (R f) conj(g).
cplx resolvent_form(const CoefficientModel& model, const BoundaryCondition& bc, const SpectralPoint& z,
                    const CompactFunction& f, const CompactFunction& g, const JostOptions& options = {});

/// Largest relative gap between theta/w on the two rims of the negative axis.
struct NegativeCutReport {
  double lambda = 0.0;
  double max_discrepancy = 0.0;
};
NegativeCutReport negative_cut_identity_check(const CoefficientModel& model, const BoundaryCondition& bc,
                                              double lambda, const std::vector<double>& grid,
                                              const JostOptions& options = {});

struct EigenvalueRecord {
  double z_star = 0.0;
  double w_residual = 0.0;
  int multiplicity = 1;
};

struct JostScan {
  std::vector<double> lambda;
  /// w(lambda + i0) exp(i Im Omega(x1)), real for lambda < 0.
  std::vector<double> w_real;
  double min_abs_w = 0.0;
};

/// (-sup|q| - 1, hi) with hi = -1e-6, moved away from 0 while the threshold
/// x1(hi) of a long-range q lies beyond 1e5.
std::pair<double, double> default_eigen_bracket(const CoefficientModel& model);

JostScan scan_jost_function(const CoefficientModel& model, const BoundaryCondition& bc, double lo, double hi,
                            std::size_t n = 240, const JostOptions& options = {});

/// Zeros of w on [lo, hi] from sign changes of the rotated real Jost function.
std::vector<EigenvalueRecord> find_eigenvalues(const CoefficientModel& model, const BoundaryCondition& bc, double lo,
                                               double hi, std::size_t scan_points = 240,
                                               const JostOptions& options = {});

/// sqrt(p0 lambda) K^2 phi(x) phi(y) / (pi |w|^2).
double spectral_density(const CoefficientModel& model, const BoundaryCondition& bc, double lambda, double x, double y,
                        const JostOptions& options = {});
/// The same density from the jump of the resolvent kernel across the cut.
double spectral_density_from_resolvent(const CoefficientModel& model, const BoundaryCondition& bc, double lambda,
                                       double x, double y, const JostOptions& options = {});

/// psi(x, lambda +- i0) = (p0 lambda)^(1/4) K phi / (sqrt(pi) w(lambda -+ i0)).
/// side is AbovePlus for psi_+ and BelowMinus for psi_-.
WaveSolution eigenfunction_psi(const CoefficientModel& model, const BoundaryCondition& bc, CutSide side,
                               double lambda, const std::vector<double>& grid, const JostOptions& options = {});

/// (Psi f)(lambda) = int conj(psi(x, lambda)) f(x) dx on each lambda.
std::vector<cplx> transform_Psi(const CoefficientModel& model, const BoundaryCondition& bc, CutSide side,
                                const CompactFunction& f, const std::vector<double>& lambda_grid,
                                const JostOptions& options = {});

/// Nodes and weights in lambda from Gauss-Legendre panels in k = sqrt(lambda).
QuadratureRule lambda_rule(double lambda_lo, double lambda_hi, int panels, int order = 10);

/// int |Psi f|^2 dlambda over the rule.
double transform_norm_squared(const CoefficientModel& model, const BoundaryCondition& bc, CutSide side,
                              const CompactFunction& f, const QuadratureRule& lambda_nodes,
                              const JostOptions& options = {});

/// S(lambda) = w(lambda - i0) / w(lambda + i0).
cplx scattering_matrix(const CoefficientModel& model, const BoundaryCondition& bc, double lambda,
                       const JostOptions& options = {});

/// U f = Psi^* Psi_0 f on the output grid, with Psi_0 the transform of the
/// free Dirichlet problem with the same p0.
SampledFunction wave_operator_apply(const CoefficientModel& model, const BoundaryCondition& bc, CutSide side,
                                    const CompactFunction& f, const std::vector<double>& grid,
                                    const QuadratureRule& lambda_nodes, const JostOptions& options = {});

}  // namespace jostlab
