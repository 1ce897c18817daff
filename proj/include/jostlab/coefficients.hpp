#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "jostlab/numerics.hpp"

namespace jostlab {

enum class DomainKind { HalfLine, FullLine };

using RealFn = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Families used to build coefficient models.  On the full line the radial
// families are evaluated at |x|.

namespace family {

struct Free {};
/// q = c (1 + x)^(-alpha)
struct PowerLaw {
  double c = 1.0;
  double alpha = 0.5;
};
/// q = c exp(-mu x)
struct ExpDecay {
  double c = 1.0;
  double mu = 1.0;
};
/// q = -depth on [center - a, center + a), zero elsewhere.  A negative depth
/// gives a barrier.  On the half-line with center = 0 the well is [0, a).
struct StepWell {
  double depth = 4.0;
  double a = 1.0;
  double center = 0.0;
};
/// Natural cubic spline through (x, q); constant continuation outside the table.
struct Tabulated {
  std::vector<double> x;
  std::vector<double> q;
  std::vector<double> p;  // optional; empty means p comes from the p-family
};
/// Arbitrary user callables (used for negative tests such as oscillating q).
struct Custom {
  RealFn q;
  RealFn q_prime;
  std::string name = "custom";
};

using Potential = std::variant<Free, PowerLaw, ExpDecay, StepWell, Tabulated, Custom>;

struct ConstantP {
  double p0 = 1.0;
};
/// p = p0 + c (1 + x)^(-alpha)
struct PowerApproachP {
  double p0 = 1.0;
  double c = 0.5;
  double alpha = 1.0;
};

using Weight = std::variant<ConstantP, PowerApproachP>;

}  // namespace family

/// The triple (p, q, q_sr) with derivatives and regularity metadata.
/// Immutable after construction; every accessor is safe to call concurrently.
class CoefficientModel {
 public:
  struct Parts {
    RealFn p, p_prime, q, q_prime;
    RealFn q_sr;  // may be empty
    RealFn p1;    // p - p0 without cancellation; may be empty
    double p0 = 1.0;
    double x0 = 0.0;
    DomainKind domain = DomainKind::HalfLine;
    std::vector<double> breakpoints;
    double length_scale = 1.0;
    /// Closed form of the tail integral of |p'| + |q'| when the family has one.
    RealFn epsilon_closed;
    /// Whether q and p - p0 are integrable at infinity, when known.
    std::optional<bool> short_range;
    std::string name;
  };

  explicit CoefficientModel(Parts parts);

  double p(double x) const { return parts_.p(x); }
  double p_prime(double x) const { return parts_.p_prime(x); }
  /// p(x) - p0, evaluated without cancellation when the family allows.
  double p1(double x) const { return parts_.p1 ? parts_.p1(x) : parts_.p(x) - parts_.p0; }
  double q(double x) const { return parts_.q(x); }
  double q_prime(double x) const { return parts_.q_prime(x); }
  bool has_short_range_term() const { return static_cast<bool>(parts_.q_sr); }
  double q_sr(double x) const { return parts_.q_sr ? parts_.q_sr(x) : 0.0; }
  /// Potential seen by the differential equation: q + q_sr.
  double q_total(double x) const { return q(x) + q_sr(x); }

  double p0() const { return parts_.p0; }
  double x0() const { return parts_.x0; }
  DomainKind domain() const { return parts_.domain; }
  const std::vector<double>& breakpoints() const { return parts_.breakpoints; }
  double length_scale() const { return parts_.length_scale; }
  const RealFn& epsilon_closed() const { return parts_.epsilon_closed; }
  std::optional<bool> short_range() const { return parts_.short_range; }
  const std::string& name() const { return parts_.name; }
  /// Left end of the domain used for sampling (0 or a large negative number).
  double x_min() const { return parts_.domain == DomainKind::HalfLine ? 0.0 : -1e300; }

  /// Model in the reflected coordinate x -> -x (full-line problems).
  CoefficientModel reflected() const;

 private:
  Parts parts_;
};

CoefficientModel make_model(const family::Potential& q, const family::Weight& p = family::ConstantP{},
                            std::optional<family::Potential> q_sr = std::nullopt,
                            DomainKind domain = DomainKind::HalfLine);

inline CoefficientModel free_model(DomainKind domain = DomainKind::HalfLine) {
  return make_model(family::Free{}, family::ConstantP{}, std::nullopt, domain);
}

/// Reads `{ "family": "power_law", "c": 1.0, "alpha": 0.5, "p": {...}, "q_sr": null,
/// "domain": "half_line" }`.  Throws ConfigError on malformed input.
CoefficientModel model_from_json_text(const std::string& text);
CoefficientModel model_from_json_file(const std::string& path);

// ---------------------------------------------------------------------------

/// epsilon(x) = integral_x^inf (|p'| + |q'|); closed form when the family
/// provides one, otherwise epsilon_tail_quadrature.
double epsilon_tail(const CoefficientModel& model, double x);

/// Quadrature route for epsilon(x) with doubling windows.  Throws TailDivergent
/// when the windows stop shrinking.
double epsilon_tail_quadrature(const CoefficientModel& model, double x, double rtol = 1e-12);

/// Smallest x1 >= x0 with |q(x)| <= |z|/2 for all sampled x >= x1.
double threshold_x1(const CoefficientModel& model, cplx z);

struct ValidationReport {
  double p_min = 0.0;
  bool p_positive = false;
  double integral_abs_p_prime = 0.0;
  double integral_abs_q_prime = 0.0;
  bool tail_converges = false;
  double p_at_horizon = 0.0;
  double q_at_horizon = 0.0;
  bool p_limit_ok = false;
  bool q_decays = false;
  std::vector<std::string> messages;

  bool passed() const { return p_positive && tail_converges && p_limit_ok && q_decays; }
};

/// Advisory check of positivity, integrability of p' and q', and the limits at
/// infinity.  Never throws for a degenerate model; problems are listed.
ValidationReport validate(const CoefficientModel& model);

}  // namespace jostlab
