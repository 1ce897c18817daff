#pragma once

#include <vector>

#include "jostlab/coefficients.hpp"
#include "jostlab/numerics.hpp"

namespace jostlab {

enum class CutSide { Interior, AbovePlus, BelowMinus };

/// Spectral parameter z, with the side of the cut for real z.
class SpectralPoint {
 public:
  SpectralPoint(cplx value, CutSide side);

  static SpectralPoint interior(cplx z) { return {z, CutSide::Interior}; }
  static SpectralPoint above(double lambda) { return {cplx(lambda, 0.0), CutSide::AbovePlus}; }
  static SpectralPoint below(double lambda) { return {cplx(lambda, 0.0), CutSide::BelowMinus}; }
  /// Interior when Im z != 0, otherwise the upper rim of the cut.
  static SpectralPoint from_value(cplx z) { return z.imag() != 0.0 ? interior(z) : above(z.real()); }

  cplx value() const { return value_; }
  CutSide side() const { return side_; }
  double lambda() const { return value_.real(); }
  bool on_cut() const { return side_ != CutSide::Interior; }
  /// The same point seen from the other side of the cut (complex conjugate).
  SpectralPoint conjugate() const;

 private:
  cplx value_;
  CutSide side_;
};

/// Branch of sqrt((q - z)/p) with Re >= 0 continued from the side of z.
cplx omega_pointwise(double q, double p, const SpectralPoint& z);

cplx omega(const CoefficientModel& model, const SpectralPoint& z, double x);
/// Limit of omega at infinity, sqrt(-z/p0).
cplx omega_infinity(const CoefficientModel& model, const SpectralPoint& z);

/// Points in (a, b) where q(x) = lambda (omega vanishes there).
std::vector<double> turning_points(const CoefficientModel& model, double lambda, double a, double b);

/// Integral of omega from 0 to x (x may be negative on the full line).
cplx big_omega(const CoefficientModel& model, const SpectralPoint& z, double x, double rtol = 1e-13);
/// Integral of omega over [a, b].
cplx omega_integral(const CoefficientModel& model, const SpectralPoint& z, double a, double b,
                    double rtol = 1e-13);

/// a(x, z) = exp(-Omega(x, z)) in log-polar form so large |Omega| never overflows.
LogPolarComplex weight_a(const CoefficientModel& model, const SpectralPoint& z, double x);

/// r = (p omega)' + q_sr, with (p omega)' = (q' + omega^2 p') / (2 omega).
cplx remainder_r(const CoefficientModel& model, const SpectralPoint& z, double x);

/// Finite-order expansions of Omega for large x.  order 0: x sqrt(-z/p0);
/// orders 1 and 2 add the integrals of q and p1 = p - p0 from the Taylor
/// expansion of omega.
cplx regularized_phase(const CoefficientModel& model, const SpectralPoint& z, double x, int order);

/// beta(z) for short-range q and p1; theta = exp(-beta) times the classical
/// Jost solution.  Throws NotShortRange when the tail integral diverges.
cplx beta_limit(const CoefficientModel& model, const SpectralPoint& z, double rtol = 1e-12);

struct EikonalField {
  std::vector<double> grid;
  std::vector<cplx> omega;
  std::vector<cplx> Omega;
  std::vector<LogPolarComplex> a;
  std::vector<cplx> r;
};

/// Tabulates the eikonal quantities on a sorted grid starting at 0.
EikonalField eikonal_field(const CoefficientModel& model, const SpectralPoint& z, const std::vector<double>& grid);

}  // namespace jostlab
