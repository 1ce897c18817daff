#include "jostlab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "json.hpp"

#include "jostlab/errors.hpp"

namespace jostlab {

namespace {

// Natural cubic spline with constant continuation outside the knot range.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw Error(ErrorKind::InvalidArgument, "tabulated data needs >= 2 matching points");
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(x_[i]) || !std::isfinite(y_[i]))
        throw Error(ErrorKind::InvalidArgument, "tabulated data must be finite");
      if (i > 0 && !(x_[i] > x_[i - 1]))
        throw Error(ErrorKind::InvalidArgument, "tabulated grid must be strictly increasing");
    }
    m_.assign(n, 0.0);
    if (n == 2) return;
    // Thomas algorithm for second derivatives.
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      const double a = h0, b = 2.0 * (h0 + h1), cc = h1;
      const double rhs = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
      const double denom = b - a * c[i - 1];
      c[i] = cc / denom;
      d[i] = (rhs - a * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m_[i] = d[i] - c[i] * m_[i + 1];
      if (i == 1) break;
    }
  }

  double value(double t) const {
    if (t <= x_.front()) return y_.front();
    if (t >= x_.back()) return y_.back();
    const std::size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double A = (x_[i + 1] - t) / h, B = (t - x_[i]) / h;
    return A * y_[i] + B * y_[i + 1] + ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
  }

  double derivative(double t) const {
    if (t <= x_.front() || t >= x_.back()) return 0.0;
    const std::size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double A = (x_[i + 1] - t) / h, B = (t - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h + ((1.0 - 3.0 * A * A) * m_[i] + (3.0 * B * B - 1.0) * m_[i + 1]) * h / 6.0;
  }

  const std::vector<double>& knots() const { return x_; }

 private:
  std::size_t segment(double t) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    return static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - x_.begin()) - 1));
  }

  std::vector<double> x_, y_, m_;
};

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

struct QParts {
  RealFn q, q_prime;
  std::vector<double> breakpoints;
  double x0 = 0.0;
  double scale = 1.0;
  RealFn eps;  // tail of |q'| for x >= x0, empty if unknown
  std::optional<bool> short_range;
  std::string name;
  std::shared_ptr<CubicSpline> p_table;
};

QParts build_q(const family::Potential& fam, bool full) {
  QParts out;
  auto radial = [full](double x) { return full ? std::abs(x) : x; };
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Free>) {
          out.q = [](double) { return 0.0; };
          out.q_prime = [](double) { return 0.0; };
          out.eps = [](double) { return 0.0; };
          out.short_range = true;
          out.name = "free";
        } else if constexpr (std::is_same_v<T, family::PowerLaw>) {
          if (!(f.alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "power_law needs alpha > 0");
          const double c = f.c, al = f.alpha;
          out.q = [=](double x) { return c * std::pow(1.0 + radial(x), -al); };
          out.q_prime = [=](double x) {
            const double s = full ? sgn(x) : 1.0;
            return -s * c * al * std::pow(1.0 + radial(x), -al - 1.0);
          };
          out.eps = [=](double x) { return std::abs(c) * std::pow(1.0 + x, -al); };
          out.short_range = al > 1.0;
          if (full) out.breakpoints.push_back(0.0);
          out.name = "power_law";
        } else if constexpr (std::is_same_v<T, family::ExpDecay>) {
          if (!(f.mu > 0.0)) throw Error(ErrorKind::InvalidArgument, "exp_decay needs mu > 0");
          const double c = f.c, mu = f.mu;
          out.q = [=](double x) { return c * std::exp(-mu * radial(x)); };
          out.q_prime = [=](double x) {
            const double s = full ? sgn(x) : 1.0;
            return -s * c * mu * std::exp(-mu * radial(x));
          };
          out.eps = [=](double x) { return std::abs(c) * std::exp(-mu * x); };
          out.scale = 1.0 / mu;
          out.short_range = true;
          if (full) out.breakpoints.push_back(0.0);
          out.name = "exp_decay";
        } else if constexpr (std::is_same_v<T, family::StepWell>) {
          if (!(f.a > 0.0)) throw Error(ErrorKind::InvalidArgument, "step_well needs a > 0");
          const double lo = f.center - f.a, hi = f.center + f.a, v = f.depth;
          out.q = [=](double x) { return (x >= lo && x < hi) ? -v : 0.0; };
          out.q_prime = [](double) { return 0.0; };
          out.eps = [](double) { return 0.0; };
          if (!full && lo > 0.0) out.breakpoints.push_back(lo);
          if (full) out.breakpoints.push_back(lo);
          out.breakpoints.push_back(hi);
          out.x0 = std::max(0.0, hi);
          out.scale = std::max(1e-3, std::min(1.0, f.a));
          out.short_range = true;
          out.name = "step_well";
        } else if constexpr (std::is_same_v<T, family::Tabulated>) {
          auto spline = std::make_shared<CubicSpline>(f.x, f.q);
          out.q = [spline](double x) { return spline->value(x); };
          out.q_prime = [spline](double x) { return spline->derivative(x); };
          out.breakpoints = f.x;
          double h = std::numeric_limits<double>::infinity();
          for (std::size_t i = 1; i < f.x.size(); ++i) h = std::min(h, f.x[i] - f.x[i - 1]);
          out.scale = std::max(1e-3, std::min(1.0, 4.0 * h));
          out.short_range = true;
          if (!f.p.empty()) out.p_table = std::make_shared<CubicSpline>(f.x, f.p);
          out.name = "tabulated";
        } else {
          if (!f.q) throw Error(ErrorKind::InvalidArgument, "custom family needs q");
          out.q = f.q;
          out.q_prime = f.q_prime ? f.q_prime : RealFn([q = f.q](double x) {
            const double h = 1e-6 * std::max(1.0, std::abs(x));
            return (q(x + h) - q(x - h)) / (2.0 * h);
          });
          out.name = f.name;
        }
      },
      fam);
  return out;
}

}  // namespace

CoefficientModel::CoefficientModel(Parts parts) : parts_(std::move(parts)) {
  if (!parts_.p || !parts_.p_prime || !parts_.q || !parts_.q_prime)
    throw Error(ErrorKind::InvalidArgument, "coefficient model needs p, p', q and q'");
  if (!(parts_.p0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "p0 must be positive");
  std::sort(parts_.breakpoints.begin(), parts_.breakpoints.end());
  parts_.breakpoints.erase(std::unique(parts_.breakpoints.begin(), parts_.breakpoints.end()),
                           parts_.breakpoints.end());
}

CoefficientModel CoefficientModel::reflected() const {
  Parts r = parts_;
  const Parts& o = parts_;
  r.p = [f = o.p](double x) { return f(-x); };
  r.p_prime = [f = o.p_prime](double x) { return -f(-x); };
  if (o.p1) r.p1 = [f = o.p1](double x) { return f(-x); };
  r.q = [f = o.q](double x) { return f(-x); };
  r.q_prime = [f = o.q_prime](double x) { return -f(-x); };
  if (o.q_sr) r.q_sr = [f = o.q_sr](double x) { return f(-x); };
  r.breakpoints.clear();
  for (double b : o.breakpoints) r.breakpoints.push_back(-b);
  std::sort(r.breakpoints.begin(), r.breakpoints.end());
  if (o.name != "free" && o.name != "power_law" && o.name != "exp_decay" && o.name != "step_well")
    r.epsilon_closed = nullptr;
  r.x0 = 0.0;
  if (o.name == "step_well")
    for (double b : r.breakpoints) r.x0 = std::max(r.x0, b);
  r.name = o.name + "(reflected)";
  return CoefficientModel(std::move(r));
}

CoefficientModel make_model(const family::Potential& qf, const family::Weight& pf,
                            std::optional<family::Potential> q_sr, DomainKind domain) {
  const bool full = domain == DomainKind::FullLine;
  QParts qp = build_q(qf, full);
  CoefficientModel::Parts parts;
  parts.domain = domain;
  parts.q = qp.q;
  parts.q_prime = qp.q_prime;
  parts.breakpoints = qp.breakpoints;
  parts.x0 = qp.x0;
  parts.length_scale = qp.scale;
  parts.name = qp.name;

  RealFn p_eps;
  bool p_short = true;
  if (qp.p_table) {
    auto s = qp.p_table;
    parts.p = [s](double x) { return s->value(x); };
    parts.p_prime = [s](double x) { return s->derivative(x); };
    parts.p0 = s->value(s->knots().back());
  } else {
    std::visit(
        [&](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, family::ConstantP>) {
            if (!(f.p0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "p0 must be positive");
            const double p0 = f.p0;
            parts.p = [p0](double) { return p0; };
            parts.p_prime = [](double) { return 0.0; };
            parts.p1 = [](double) { return 0.0; };
            parts.p0 = p0;
            p_eps = [](double) { return 0.0; };
          } else {
            if (!(f.p0 > 0.0) || !(f.alpha > 0.0))
              throw Error(ErrorKind::InvalidArgument, "power_approach needs p0 > 0 and alpha > 0");
            const double p0 = f.p0, c = f.c, al = f.alpha;
            auto r = [full](double x) { return full ? std::abs(x) : x; };
            parts.p = [=](double x) { return p0 + c * std::pow(1.0 + r(x), -al); };
            parts.p1 = [=](double x) { return c * std::pow(1.0 + r(x), -al); };
            parts.p_prime = [=](double x) {
              const double s = full ? sgn(x) : 1.0;
              return -s * c * al * std::pow(1.0 + r(x), -al - 1.0);
            };
            parts.p0 = p0;
            p_eps = [=](double x) { return std::abs(c) * std::pow(1.0 + x, -al); };
            p_short = al > 1.0;
            if (full) parts.breakpoints.push_back(0.0);
          }
        },
        pf);
  }
  if (qp.eps && p_eps) parts.epsilon_closed = [a = qp.eps, b = p_eps](double x) { return a(x) + b(x); };
  if (qp.short_range) parts.short_range = *qp.short_range && p_short;

  if (q_sr) {
    QParts sr = build_q(*q_sr, full);
    parts.q_sr = sr.q;
    for (double b : sr.breakpoints) parts.breakpoints.push_back(b);
    parts.length_scale = std::min(parts.length_scale, sr.scale);
  }
  return CoefficientModel(std::move(parts));
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

double num(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  if (!j[key].is_number()) throw Error(ErrorKind::ConfigError, std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

std::vector<double> vec(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return {};
  if (!j[key].is_array()) throw Error(ErrorKind::ConfigError, std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw Error(ErrorKind::ConfigError, std::string("array '") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

family::Potential potential_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw Error(ErrorKind::ConfigError, "potential needs a string 'family'");
  const std::string f = j["family"].get<std::string>();
  if (f == "free") return family::Free{};
  if (f == "power_law") return family::PowerLaw{num(j, "c", 1.0), num(j, "alpha", 0.5)};
  if (f == "exp_decay") return family::ExpDecay{num(j, "c", 1.0), num(j, "mu", 1.0)};
  if (f == "step_well") return family::StepWell{num(j, "V0", num(j, "depth", 4.0)), num(j, "a", 1.0), num(j, "center", 0.0)};
  if (f == "tabulated") return family::Tabulated{vec(j, "x"), vec(j, "q"), vec(j, "p")};
  if (f == "wigner_von_neumann") {
    // c sin(2 k x) / (1 + |x|): q' is not integrable, so the model violates the standing assumptions.
    const double c = num(j, "c", 8.0), k = num(j, "k", 1.0);
    return family::Custom{
        [=](double x) { return c * std::sin(2.0 * k * x) / (1.0 + std::abs(x)); },
        [=](double x) {
          const double r = 1.0 + std::abs(x);
          return c * (2.0 * k * std::cos(2.0 * k * x) / r - (x < 0.0 ? -1.0 : 1.0) * std::sin(2.0 * k * x) / (r * r));
        },
        "wigner_von_neumann"};
  }
  throw Error(ErrorKind::ConfigError, "unknown potential family '" + f + "'");
}

family::Weight weight_from_json(const json& j) {
  if (j.is_null() || j.is_array()) return family::ConstantP{};  // arrays belong to tabulated p
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw Error(ErrorKind::ConfigError, "'p' needs a string 'family'");
  const std::string f = j["family"].get<std::string>();
  if (f == "constant") return family::ConstantP{num(j, "p0", 1.0)};
  if (f == "power_approach") return family::PowerApproachP{num(j, "p0", 1.0), num(j, "c", 0.5), num(j, "alpha", 1.0)};
  throw Error(ErrorKind::ConfigError, "unknown p family '" + f + "'");
}

}  // namespace

CoefficientModel model_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("malformed potential config: ") + e.what());
  }
  if (j.contains("potential")) j = j["potential"];
  DomainKind domain = DomainKind::HalfLine;
  if (j.contains("domain")) {
    const std::string d = j["domain"].is_string() ? j["domain"].get<std::string>() : "";
    if (d == "half_line") domain = DomainKind::HalfLine;
    else if (d == "full_line") domain = DomainKind::FullLine;
    else throw Error(ErrorKind::ConfigError, "domain must be 'half_line' or 'full_line'");
  }
  std::optional<family::Potential> sr;
  if (j.contains("q_sr") && !j["q_sr"].is_null()) sr = potential_from_json(j["q_sr"]);
  try {
    return make_model(potential_from_json(j), weight_from_json(j.contains("p") ? j["p"] : json()), sr, domain);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    throw Error(ErrorKind::ConfigError, e.what());
  }
}

CoefficientModel model_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json_text(ss.str());
}

// ---------------------------------------------------------------------------

double epsilon_tail_quadrature(const CoefficientModel& model, double x, double rtol) {
  auto integrand = [&model](double y) { return cplx(std::abs(model.p_prime(y)) + std::abs(model.q_prime(y)), 0.0); };
  double total = 0.0;
  double a = x;
  double width = std::max(1.0, model.length_scale());
  int non_shrinking = 0;
  double previous = std::numeric_limits<double>::infinity();
  int settled = 0;
  for (int window = 0; window < 200; ++window) {
    const double b = a + width;
    std::vector<double> kinks;
    for (double k : model.breakpoints())
      if (k > a && k < b) kinks.push_back(k);
    QuadResult r;
    try {
      r = quad_adaptive(integrand, a, b, 1e-3 * rtol, 1e-300, kinks, 20000);
    } catch (const Error&) {
      throw Error(ErrorKind::TailDivergent, "tail integral of |p'|+|q'| does not settle (quadrature exhausted)");
    }
    const double inc = r.value.real();
    total += inc;
    if (inc <= rtol * total || inc == 0.0) {
      if (++settled >= 2) return total;
    } else {
      settled = 0;
    }
    if (b > 64.0 && inc > 0.97 * previous) {
      if (++non_shrinking >= 4)
        throw Error(ErrorKind::TailDivergent, "tail integral of |p'|+|q'| grows without bound");
    } else {
      non_shrinking = 0;
    }
    // Geometric extrapolation of the remaining windows once they shrink steadily.
    if (b > 64.0 && previous < std::numeric_limits<double>::infinity() && inc < 0.97 * previous && inc > 0.0) {
      const double ratio = inc / previous;
      const double rest = inc * ratio / (1.0 - ratio);
      if (rest <= rtol * total || b > 1e15) return total + rest;
    }
    previous = inc;
    a = b;
    width *= 2.0;
    if (a > 1e15) break;
  }
  throw Error(ErrorKind::TailDivergent, "tail integral of |p'|+|q'| did not converge before the window cap");
}

double epsilon_tail(const CoefficientModel& model, double x) {
  if (model.domain() == DomainKind::HalfLine && x < 0.0)
    throw Error(ErrorKind::DomainError, "epsilon_tail needs x >= 0");
  if (model.epsilon_closed() && x >= model.x0() && x >= 0.0) return model.epsilon_closed()(x);
  return epsilon_tail_quadrature(model, x);
}

double threshold_x1(const CoefficientModel& model, cplx z) {
  const double mag = std::abs(z);
  if (!(mag > 0.0) || !std::isfinite(mag)) throw Error(ErrorKind::InvalidSpectralPoint, "threshold_x1 needs |z| > 0");
  const double level = 0.5 * mag;
  const double start = std::max(0.0, model.x0());
  auto above = [&](double x) { return std::abs(model.q(x)) > level; };

  double horizon = start + 10.0 * std::max(1.0, 1.0 / mag) * model.length_scale();
  for (int k = 0; above(horizon) || above(2.0 * horizon); ++k) {
    if (k > 60) throw Error(ErrorKind::NoThreshold, "|q| does not drop below |z|/2 within the search horizon");
    horizon *= 2.0;
  }

  std::vector<double> samples = linspace(start, horizon, 4001);
  for (double b : model.breakpoints())
    if (b > start && b < horizon) samples.push_back(b);
  std::sort(samples.begin(), samples.end());

  std::ptrdiff_t last = -1;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (above(samples[i])) last = static_cast<std::ptrdiff_t>(i);
  if (last < 0) return start;
  double lo = samples[static_cast<std::size_t>(last)];
  double hi = samples[static_cast<std::size_t>(last) + 1];
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (above(mid) ? lo : hi) = mid;
  }
  return std::max(hi, start);
}

ValidationReport validate(const CoefficientModel& model) {
  ValidationReport rep;
  const bool full = model.domain() == DomainKind::FullLine;
  std::vector<double> grid = linspace(0.0, 10.0, 1001);
  for (double x : logspace(1.0, 6.0, 2000)) grid.push_back(x);
  if (full) {
    const std::size_t n = grid.size();
    for (std::size_t i = 1; i < n; ++i) grid.push_back(-grid[i]);
  }
  rep.p_min = std::numeric_limits<double>::infinity();
  for (double x : grid) rep.p_min = std::min(rep.p_min, model.p(x));
  rep.p_positive = rep.p_min > 0.0 && std::isfinite(rep.p_min);
  if (!rep.p_positive) rep.messages.push_back("p is not bounded below by a positive constant");

  auto tail = [&](const RealFn& f, double from) -> std::optional<double> {
    CoefficientModel::Parts parts;
    parts.p = [](double) { return 1.0; };
    parts.p_prime = [](double) { return 0.0; };
    parts.q = [](double) { return 0.0; };
    parts.q_prime = f;
    parts.breakpoints = model.breakpoints();
    parts.length_scale = model.length_scale();
    try {
      return epsilon_tail_quadrature(CoefficientModel(parts), from, 1e-10);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  RealFn pp = [&model](double x) { return model.p_prime(x); };
  RealFn qp = [&model](double x) { return model.q_prime(x); };
  auto tp = tail(pp, 0.0);
  auto tq = tail(qp, std::max(0.0, model.x0()));
  if (full) {
    const CoefficientModel refl = model.reflected();
    RealFn rpp = [&refl](double x) { return refl.p_prime(x); };
    RealFn rqp = [&refl](double x) { return refl.q_prime(x); };
    auto lp = tail(rpp, 0.0);
    auto lq = tail(rqp, std::max(0.0, refl.x0()));
    tp = (tp && lp) ? std::optional<double>(tp.value() + lp.value()) : std::nullopt;
    tq = (tq && lq) ? std::optional<double>(tq.value() + lq.value()) : std::nullopt;
  }
  rep.tail_converges = tp.has_value() && tq.has_value();
  rep.integral_abs_p_prime = tp.value_or(std::numeric_limits<double>::infinity());
  rep.integral_abs_q_prime = tq.value_or(std::numeric_limits<double>::infinity());
  if (!tp) rep.messages.push_back("integral of |p'| does not converge on growing windows");
  if (!tq) rep.messages.push_back("integral of |q'| does not converge on growing windows");

  const double far = 1e6;
  rep.p_at_horizon = model.p(far);
  rep.q_at_horizon = model.q(far);
  double p_dev = std::abs(rep.p_at_horizon - model.p0());
  double q_dev = std::abs(rep.q_at_horizon);
  if (full) {
    p_dev = std::max(p_dev, std::abs(model.p(-far) - model.p0()));
    q_dev = std::max(q_dev, std::abs(model.q(-far)));
  }
  rep.p_limit_ok = p_dev <= 1e-2 * model.p0();
  rep.q_decays = q_dev <= 1e-2;
  if (!rep.p_limit_ok) rep.messages.push_back("p does not approach p0 at the sample horizon");
  if (!rep.q_decays) rep.messages.push_back("q does not decay at the sample horizon");
  return rep;
}

}  // namespace jostlab
