#pragma once

#include <optional>
#include <vector>

#include "jostlab/coefficients.hpp"
#include "jostlab/eikonal.hpp"
#include "jostlab/numerics.hpp"

namespace jostlab {

enum class WaveKind { Jost, Regular, Growing };

/// A solution sampled on a grid.  The true values are f * exp(log_scale) and
/// pf_prime * exp(log_scale); the split keeps exponentially large or small
/// solutions representable.
struct WaveSolution {
  std::vector<double> grid;
  std::vector<cplx> f;
  std::vector<cplx> pf_prime;
  std::vector<double> log_scale;
  SpectralPoint z = SpectralPoint::above(1.0);
  WaveKind kind = WaveKind::Jost;

  cplx value(std::size_t i) const { return f[i] * std::exp(log_scale[i]); }
  cplx flux(std::size_t i) const { return pf_prime[i] * std::exp(log_scale[i]); }
};

/// Nodes of the Volterra solve on [x1, X].
struct VolterraSolution {
  std::vector<double> grid;
  std::vector<cplx> u;
  std::vector<cplx> u_prime;
  int iteration_count = 0;
  double residual_norm = 0.0;
  double x1 = 0.0;
  double X = 0.0;
  /// Size of the neglected asymptotic correction at X.
  double tail_estimate = 0.0;
};

struct JostOptions {
  Tolerances tol{};
  /// Right end of the Volterra solve; chosen automatically when empty.
  std::optional<double> X_max;
  /// Leftmost point reached by the ODE continuation (0 on the half-line).
  double left_limit = 0.0;
};

/// theta and p theta' at one point, scaled like WaveSolution.
struct ThetaPoint {
  cplx f;
  cplx pf;
  double log_scale = 0.0;

  cplx value() const { return f * std::exp(log_scale); }
  cplx flux() const { return pf * std::exp(log_scale); }
};

/// The modified Jost solution theta(., z) as a dense object: Volterra panels on
/// [x1, X], the asymptotic closure beyond X and an ODE continuation below x1.
class JostSolution {
 public:
  JostSolution(const CoefficientModel& model, const SpectralPoint& z, const JostOptions& options = {});

  ThetaPoint at(double x) const;
  /// u and p u' for x >= x1.
  cplx u(double x) const;
  cplx v(double x) const;
  /// Omega(x, z) for x >= x1 (consistent with the panel integration).
  cplx Omega(double x) const;

  VolterraSolution volterra() const;
  const CoefficientModel& model() const { return model_; }
  const SpectralPoint& z() const { return z_; }
  const JostOptions& options() const { return options_; }
  double x1() const { return x1_; }
  double X() const { return X_; }
  double left_limit() const { return options_.left_limit; }
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }
  double tail_estimate() const { return tail_estimate_; }
  std::size_t panel_count() const { return panels_.size(); }

 private:
  struct Panel {
    double a = 0.0, b = 0.0;
    cplx Omega_b;
    std::vector<double> x;  // Chebyshev nodes, x[0] = b
    std::vector<cplx> omega, r, dOmega, u, v;
    std::vector<double> p;
  };

  void build_panels();
  void solve_panels(cplx u_right, cplx v_right);
  std::size_t locate(double x) const;
  cplx s0(double x) const;
  cplx s1(double x) const;
  cplx closure_u(double x) const;
  double closure_estimate(double x) const;
  double choose_X() const;

  CoefficientModel model_;
  SpectralPoint z_;
  JostOptions options_;
  double x1_ = 0.0;
  double X_ = 0.0;
  double tail_estimate_ = 0.0;
  int iterations_ = 0;
  double residual_ = 0.0;
  std::vector<Panel> panels_;
  OdeSolution backward_;
  bool has_backward_ = false;
};

/// Right-hand side of the first-order system (f, p f') for the equation
/// -(p f')' + (q + q_sr) f = z f.
PairRhs wave_rhs(const CoefficientModel& model, cplx z);

/// G(x, y, z) = a(y)^2 int_x^y p^-1 a^-2 ds, for x1 <= x <= y.
cplx volterra_kernel_G(const CoefficientModel& model, const SpectralPoint& z, double x, double y);

VolterraSolution solve_u(const CoefficientModel& model, const SpectralPoint& z, const JostOptions& options = {});

/// theta sampled on a grid.  Grid points left of 0 are reached by the ODE
/// continuation when the model lives on the full line.
WaveSolution jost_theta(const CoefficientModel& model, const SpectralPoint& z, const std::vector<double>& grid,
                        const JostOptions& options = {});
WaveSolution sample_theta(const JostSolution& theta, const std::vector<double>& grid);

/// Last zero of theta on [left, right] (theta scaled to be real for real
/// z < 0), or nothing when theta has no sign change there.
std::optional<double> last_zero(const JostSolution& theta, double left, double right);

/// Growing solution xi = theta int_rho^x (p theta^2)^-1, with {theta, xi} = -1.
/// rho defaults to 0 off the axis and to just beyond the last zero of theta on
/// the negative axis.
WaveSolution growing_xi(const CoefficientModel& model, const SpectralPoint& z, const std::vector<double>& grid,
                        std::optional<double> rho = std::nullopt, const JostOptions& options = {});
WaveSolution growing_xi(const JostSolution& theta, const std::vector<double>& grid,
                        std::optional<double> rho = std::nullopt);

/// {f, g} = p (f' g - f g') from flux form.
inline cplx wronskian(cplx f, cplx pf, cplx g, cplx pg) { return pf * g - f * pg; }

}  // namespace jostlab
