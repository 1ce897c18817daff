#include "jostlab/cli.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "jostlab/errors.hpp"
#include "jostlab/fullline.hpp"
#include "jostlab/spectral.hpp"

namespace jostlab {

using json = nlohmann::json;

namespace {

double number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw Error(ErrorKind::ConfigError, std::string("'") + key + "' must be a number");
  return j[key].get<double>();
}

std::size_t count(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer() || j[key].get<long long>() < 1)
    throw Error(ErrorKind::ConfigError, std::string("'") + key + "' must be a positive integer");
  return j[key].get<std::size_t>();
}

SpectralPoint point_from_json(const json& j) {
  double re = 0.0, im = 0.0;
  std::string side = "+";
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    re = j[0].get<double>();
    im = j[1].get<double>();
  } else if (j.is_object()) {
    re = number(j, "re", 0.0);
    im = number(j, "im", 0.0);
    if (j.contains("side")) side = j["side"].get<std::string>();
  } else {
    throw Error(ErrorKind::ConfigError, "z entries are [re, im] or {re, im, side}");
  }
  if (re == 0.0 && im == 0.0) throw Error(ErrorKind::ConfigError, "z entries must be nonzero");
  if (im != 0.0) return SpectralPoint::interior(cplx(re, im));
  if (side == "+") return SpectralPoint::above(re);
  if (side == "-") return SpectralPoint::below(re);
  throw Error(ErrorKind::ConfigError, "z side must be '+' or '-'");
}

double side_code(const SpectralPoint& z) {
  switch (z.side()) {
    case CutSide::AbovePlus: return 1.0;
    case CutSide::BelowMinus: return -1.0;
    default: return 0.0;
  }
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::vector<double> sample_of(const std::vector<double>& v) {
  if (v.size() <= 3) return v;
  return {v.front(), v[v.size() / 2], v.back()};
}

// Runs task(i) for i < n on a small worker pool; results land in slot i, so the
// output order never depends on scheduling.
template <class T, class F>
std::vector<T> ordered_map(std::size_t n, F task) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = task(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : failures)
    if (e) std::rethrow_exception(e);
  return out;
}

VerifyCheck check(std::string name, double parameter, double value, double tolerance) {
  return {std::move(name), parameter, value, tolerance, std::isfinite(value) && value <= tolerance};
}

}  // namespace

std::vector<double> LambdaGrid::values() const {
  return log_spacing ? logspace(min, max, n) : linspace(min, max, n);
}

void RunConfig::validate() const {
  if (!(lambda.min > 0.0) || !(lambda.max >= lambda.min) || lambda.n < 1)
    throw Error(ErrorKind::ConfigError, "lambda grid must be positive with min <= max");
  if (lambda.n > 1 && !(lambda.max > lambda.min))
    throw Error(ErrorKind::ConfigError, "lambda grid with several points needs min < max");
  if (!(x.max >= x.min) || x.n < 1) throw Error(ErrorKind::ConfigError, "x grid needs min <= max");
  if (model.domain() == DomainKind::HalfLine && x.min < 0.0)
    throw Error(ErrorKind::ConfigError, "x grid must stay in [0, inf) on the half-line");
  for (const auto& p : z)
    if (p.value() == cplx(0.0)) throw Error(ErrorKind::ConfigError, "z entries must be nonzero");
  if (eigen_bracket && !(eigen_bracket->first < eigen_bracket->second && eigen_bracket->second < 0.0))
    throw Error(ErrorKind::ConfigError, "eigen bracket must satisfy lo < hi < 0");
  try {
    tol.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
}

BoundaryCondition parse_boundary_condition(const std::string& text) {
  if (text == "dirichlet") return BoundaryCondition::dirichlet();
  if (text.rfind("robin:", 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string h = text.substr(6);
      const double v = std::stod(h, &used);
      if (used == h.size()) return BoundaryCondition::robin(v);
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorKind::ConfigError, "boundary condition must be 'dirichlet' or 'robin:<h>'");
}

OutputFormat parse_output_format(const std::string& text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  throw Error(ErrorKind::ConfigError, "format must be 'csv' or 'json'");
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg;
  cfg.model = model_from_json_text(ss.str());
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
  try {
    if (j.contains("lambda")) {
      const json& l = j["lambda"];
      cfg.lambda.min = number(l, "min", cfg.lambda.min);
      cfg.lambda.max = number(l, "max", cfg.lambda.max);
      cfg.lambda.n = count(l, "n", cfg.lambda.n);
      if (l.contains("spacing")) {
        const std::string s = l["spacing"].get<std::string>();
        if (s != "linear" && s != "log") throw Error(ErrorKind::ConfigError, "spacing must be 'linear' or 'log'");
        cfg.lambda.log_spacing = s == "log";
      }
    }
    if (j.contains("x")) {
      const json& x = j["x"];
      cfg.x.min = number(x, "min", cfg.x.min);
      cfg.x.max = number(x, "max", cfg.x.max);
      cfg.x.n = count(x, "n", cfg.x.n);
    }
    if (j.contains("z"))
      for (const json& e : j["z"]) cfg.z.push_back(point_from_json(e));
    if (j.contains("format")) cfg.format = parse_output_format(j["format"].get<std::string>());
    if (j.contains("out")) cfg.out_path = j["out"].get<std::string>();
    if (j.contains("bc")) cfg.bc = parse_boundary_condition(j["bc"].get<std::string>());
    if (j.contains("eigen_bracket")) {
      const json& b = j["eigen_bracket"];
      if (!b.is_array() || b.size() != 2) throw Error(ErrorKind::ConfigError, "eigen_bracket is [lo, hi]");
      cfg.eigen_bracket = std::pair{b[0].get<double>(), b[1].get<double>()};
    }
    if (j.contains("tolerances")) {
      const json& t = j["tolerances"];
      cfg.tol.ode_rtol = number(t, "ode_rtol", cfg.tol.ode_rtol);
      cfg.tol.ode_atol = number(t, "ode_atol", cfg.tol.ode_atol);
      cfg.tol.quad_rtol = number(t, "quad_rtol", cfg.tol.quad_rtol);
      cfg.tol.picard_atol = number(t, "picard_atol", cfg.tol.picard_atol);
      cfg.tol.root_atol = number(t, "root_atol", cfg.tol.root_atol);
      cfg.tol.eigen_w_tol = number(t, "eigen_w_tol", cfg.tol.eigen_w_tol);
      cfg.tol.tail_tol = number(t, "tail_tol", cfg.tol.tail_tol);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("bad run settings: ") + e.what());
  }
  return cfg;
}

void Table::write(std::ostream& os, OutputFormat format) const {
  if (format == OutputFormat::Csv) {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << "\n";
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << format_number(r[c]);
      os << "\n";
    }
    return;
  }
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (std::isfinite(r[c]) && r[c] == std::trunc(r[c]) && std::abs(r[c]) < 9e15)
        o[columns[c]] = static_cast<long long>(r[c]);
      else
        o[columns[c]] = r[c];
    }
    arr.push_back(o);
  }
  os << std::setprecision(17) << arr.dump(2) << "\n";
}

Table cmd_jost(const RunConfig& cfg) {
  cfg.validate();
  Table t;
  t.columns = {"z_re",  "z_im",  "side", "x",    "theta_re", "theta_im", "ptheta_re",
               "ptheta_im", "a_re", "a_im", "u_re", "u_im",     "epsilon"};
  std::vector<SpectralPoint> zs = cfg.z;
  if (zs.empty())
    for (double l : cfg.lambda.values()) zs.push_back(SpectralPoint::above(l));
  const std::vector<double> grid = cfg.x.values();
  std::vector<double> eps;
  for (double x : grid) {
    try {
      eps.push_back(epsilon_tail(cfg.model, x));
    } catch (const Error&) {
      eps.push_back(std::nan(""));
    }
  }
  JostOptions opt;
  opt.tol = cfg.tol;
  opt.left_limit = std::min(0.0, grid.front());
  using Rows = std::vector<std::vector<double>>;
  const auto blocks = ordered_map<Rows>(zs.size(), [&](std::size_t k) {
    const SpectralPoint& z = zs[k];
    const JostSolution theta(cfg.model, z, opt);
    Rows rows;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid[i];
      const ThetaPoint p = theta.at(x);
      const cplx Om = theta.Omega(x);
      const cplx th = p.value(), pth = p.flux(), a = std::exp(-Om), u = p.f * std::exp(p.log_scale + Om);
      rows.push_back({z.value().real(), z.value().imag(), side_code(z), x, th.real(), th.imag(), pth.real(),
                      pth.imag(), a.real(), a.imag(), u.real(), u.imag(), eps[i]});
    }
    return rows;
  });
  for (const auto& b : blocks) t.rows.insert(t.rows.end(), b.begin(), b.end());
  return t;
}

Table cmd_scatter(const RunConfig& cfg) {
  cfg.validate();
  JostOptions opt;
  opt.tol = cfg.tol;
  Table t;
  const std::vector<double> lams = cfg.lambda.values();
  if (cfg.model.domain() == DomainKind::HalfLine) {
    t.columns = {"lambda", "kappa", "eta", "K", "w_re", "w_im", "S_re", "S_im"};
    // eta is unwrapped along the whole grid, so this sweep stays sequential.
    for (const auto& d : amplitude_phase(cfg.model, cfg.bc, lams, opt))
      t.rows.push_back({d.lambda, d.kappa, d.eta, d.K, d.w_plus.real(), d.w_plus.imag(), d.S.real(), d.S.imag()});
    return t;
  }
  t.columns = {"lambda", "S11_re", "S11_im", "S12_re", "S12_im", "S21_re", "S21_im", "S22_re", "S22_im",
               "abs_w_bold", "K1", "K2", "identity_residual", "unitarity_defect"};
  t.rows = ordered_map<std::vector<double>>(lams.size(), [&](std::size_t i) {
    const double l = lams[i];
    const FullLineScattering s = fullline_wronskians(cfg.model, l, opt);
    return std::vector<double>{l, s.S(0, 0).real(), s.S(0, 0).imag(), s.S(0, 1).real(), s.S(0, 1).imag(),
                               s.S(1, 0).real(), s.S(1, 0).imag(), s.S(1, 1).real(), s.S(1, 1).imag(),
                               std::abs(s.w_bold), s.K1, s.K2, s.identity_residual, s.unitarity_defect};
  });
  return t;
}

Table cmd_eigen(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.model.domain() != DomainKind::HalfLine)
    throw Error(ErrorKind::DomainError, "the eigenvalue search covers the half-line problem only");
  JostOptions opt;
  opt.tol = cfg.tol;
  const auto [lo, hi] = cfg.eigen_bracket ? *cfg.eigen_bracket : default_eigen_bracket(cfg.model);
  Table t;
  t.columns = {"z_star", "w_residual", "multiplicity"};
  for (const auto& r : find_eigenvalues(cfg.model, cfg.bc, lo, hi, 240, opt))
    t.rows.push_back({r.z_star, r.w_residual, static_cast<double>(r.multiplicity)});
  return t;
}

bool VerifyReport::passed() const {
  if (!assumptions_ok) return false;
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

VerifyReport cmd_verify(const RunConfig& cfg) {
  cfg.validate();
  VerifyReport rep;
  const ValidationReport v = validate(cfg.model);
  rep.messages = v.messages;
  if (!v.passed()) {
    rep.assumptions_ok = false;
    return rep;
  }
  JostOptions opt;
  opt.tol = cfg.tol;
  const std::vector<double> lams = sample_of(cfg.lambda.values());
  const CoefficientModel& m = cfg.model;

  if (m.domain() == DomainKind::FullLine) {
    for (double l : lams) {
      const FullLineScattering s = fullline_wronskians(m, l, opt);
      rep.checks.push_back(check("wronskian_identity", l, s.identity_residual, 1e-8));
      rep.checks.push_back(check("S_unitarity", l, s.unitarity_defect, 1e-8));
      rep.checks.push_back(check("wronskian_spread", l, s.wronskian_spread, 1e-8));
      rep.checks.push_back(check("theta1_expansion", l, fullline_reconstruction_check(m, l, {-3.0, 0.0, 3.0}, opt), 1e-8));
      const double a = fullline_spectral_density(m, l, -1.0, 2.0, opt);
      const double b = fullline_density_from_resolvent(m, l, -1.0, 2.0, opt);
      rep.checks.push_back(check("density_two_route", l, std::abs(a - b) / std::max(std::abs(b), 1e-3), 1e-6));
    }
    return rep;
  }

  const std::vector<double> grid = linspace(0.0, std::max(10.0, 4.0 * m.length_scale()), 11);
  for (double l : lams) {
    const SpectralPoint zp = SpectralPoint::above(l), zm = SpectralPoint::below(l);
    const JostSolution up(m, zp, opt), dn(m, zm, opt);
    const cplx w = jost_function_w(up, cfg.bc);
    const WronskianResult W = wronskian(regular_phi(m, cfg.bc, zp, grid, cfg.tol), sample_theta(up, grid));
    rep.checks.push_back(check("wronskian_phi_theta_spread", l, W.max_deviation / std::abs(w), 1e-8));
    rep.checks.push_back(check("jost_function_two_routes", l, std::abs(W.value - w) / std::abs(w), 1e-8));
    const double K = amplitude_K(m, l);
    const cplx target = cplx(0.0, 2.0 * std::sqrt(m.p0() * l)) * K * K;
    const cplx Wc = wronskian(sample_theta(up, grid), sample_theta(dn, grid)).value;
    rep.checks.push_back(check("cut_wronskian", l, std::abs(Wc - target) / std::abs(target), 1e-6));
    rep.checks.push_back(check("abs_S_minus_1", l, std::abs(std::abs(scattering_matrix(m, cfg.bc, l, opt)) - 1.0), 1e-12));
    const double a = spectral_density(m, cfg.bc, l, 0.7, 2.3, opt);
    const double b = spectral_density_from_resolvent(m, cfg.bc, l, 0.7, 2.3, opt);
    rep.checks.push_back(check("density_two_route", l, std::abs(a - b) / std::max(std::abs(b), 1e-3), 1e-6));
  }
  for (cplx zv : {cplx(0.0, 1.0), cplx(-1.0, 0.5)}) {
    const SpectralPoint z = SpectralPoint::interior(zv);
    const JostSolution th(m, z, opt);
    const std::vector<double> g{0.5, 2.0, 5.0};
    const WronskianResult W = wronskian(sample_theta(th, g), growing_xi(th, g));
    rep.checks.push_back(check("theta_xi_wronskian", zv.real(), std::abs(W.value + 1.0) + W.max_deviation, 1e-8));
  }
  return rep;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidSpectralPoint:
    case ErrorKind::DomainError:
    case ErrorKind::GridMismatch:
      return kExitConfig;
    default:
      return kExitSolver;
  }
}

namespace {

void write_verify(std::ostream& os, const VerifyReport& r, OutputFormat format) {
  const std::string status = !r.assumptions_ok ? "assumption-violated" : (r.passed() ? "pass" : "fail");
  if (format == OutputFormat::Json) {
    nlohmann::ordered_json j;
    j["status"] = status;
    j["messages"] = r.messages;
    j["checks"] = json::array();
    for (const auto& c : r.checks)
      j["checks"].push_back(
          {{"check", c.name}, {"parameter", c.parameter}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.passed}});
    os << j.dump(2) << "\n";
    return;
  }
  os << "check,parameter,value,tolerance,pass\n";
  for (const auto& c : r.checks)
    os << c.name << "," << format_number(c.parameter) << "," << format_number(c.value) << ","
       << format_number(c.tolerance) << "," << (c.passed ? "true" : "false") << "\n";
  os << "# status: " << status << "\n";
  for (const auto& m : r.messages) os << "# " << m << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Modified Jost solutions for -(p f')' + q f with long-range q", "jostlab"};
  std::string command, config_path, out_path, format, bc;
  std::optional<double> lmin, lmax;
  std::optional<std::size_t> ln;
  app.add_option("command", command, "jost | scatter | eigen | verify")
      ->required()
      ->check(CLI::IsMember({"jost", "scatter", "eigen", "verify"}));
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_path, "output file; '-' is stdout (the default)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--lambda-min", lmin, "smallest lambda of the grid");
  app.add_option("--lambda-max", lmax, "largest lambda of the grid");
  app.add_option("--lambda-n", ln, "number of lambda points");
  app.add_option("--bc", bc, "dirichlet or robin:<h>");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "jostlab: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    RunConfig cfg = load_run_config(config_path);
    if (lmin) cfg.lambda.min = *lmin;
    if (lmax) cfg.lambda.max = *lmax;
    if (ln) cfg.lambda.n = *ln;
    if (!bc.empty()) cfg.bc = parse_boundary_condition(bc);
    if (!format.empty()) cfg.format = parse_output_format(format);
    if (!out_path.empty()) cfg.out_path = out_path == "-" ? "" : out_path;

    std::ofstream file;
    if (!cfg.out_path.empty()) {
      file.open(cfg.out_path);
      if (!file) throw Error(ErrorKind::ConfigError, "cannot write '" + cfg.out_path + "'");
    }
    std::ostream& os = cfg.out_path.empty() ? out : file;

    if (command == "verify") {
      const VerifyReport r = cmd_verify(cfg);
      write_verify(os, r, cfg.format.value_or(OutputFormat::Csv));
      if (!r.assumptions_ok) {
        err << "jostlab: model violates the standing assumptions\n";
        return kExitAssumption;
      }
      return r.passed() ? kExitOk : kExitCheckFailed;
    }
    Table t;
    if (command == "jost") t = cmd_jost(cfg);
    else if (command == "scatter") t = cmd_scatter(cfg);
    else t = cmd_eigen(cfg);
    t.write(os, cfg.format.value_or(command == "eigen" ? OutputFormat::Json : OutputFormat::Csv));
    return kExitOk;
  } catch (const Error& e) {
    err << "jostlab: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "jostlab: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace jostlab
