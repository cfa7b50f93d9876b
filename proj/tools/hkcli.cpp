// hkcli: batch front end. Reads a JSON config, runs one experiment, writes CSV
// (17 significant digits) or JSON. Exit codes: 0 ok, 2 config, 3 domain,
// 4 cost cap, 5 tolerance not met.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hk/borel.hpp"
#include "hk/defmatrix.hpp"
#include "hk/mehler.hpp"
#include "hk/torus.hpp"

using namespace hk;
using json = nlohmann::json;

namespace {

// Set by a command whose output is complete but whose check failed (exit 5).
std::string tolerance_failure;

struct Run {
  json cfg;
  std::uint64_t hash = 0;
  std::uint64_t seed = 1;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// A complex number is a JSON number or a [re, im] pair.
cplx parse_cplx(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("expected a number or a [re, im] pair, got " + j.dump());
}

// A point is a number (nu = 1) or an array of nu complex numbers.
CVec parse_point(const json& j, int nu) {
  CVec p;
  if (j.is_number())
    p.push_back(j.get<double>());
  else if (j.is_array())
    for (const auto& c : j) p.push_back(parse_cplx(c));
  else
    throw ConfigError("point must be a number or an array");
  if (static_cast<int>(p.size()) != nu) throw ConfigError("point " + j.dump() + " has the wrong dimension");
  return p;
}

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j[key];
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("field '") + key + "' has the wrong type");
  }
}

std::vector<cplx> cplx_list(const json& j, const char* key) {
  const auto& a = field(j, key);
  if (!a.is_array() || a.empty()) throw ConfigError(std::string("'") + key + "' must be a non-empty array");
  std::vector<cplx> out;
  for (const auto& v : a) out.push_back(parse_cplx(v));
  return out;
}

// Paired evaluation points: "x" and "y" arrays of equal length.
std::vector<std::pair<CVec, CVec>> point_pairs(const json& j, int nu) {
  const auto& xs = field(j, "x");
  const auto& ys = field(j, "y");
  if (!xs.is_array() || !ys.is_array() || xs.size() != ys.size() || xs.empty())
    throw ConfigError("'x' and 'y' must be non-empty arrays of equal length");
  std::vector<std::pair<CVec, CVec>> out;
  for (std::size_t i = 0; i < xs.size(); ++i) out.emplace_back(parse_point(xs[i], nu), parse_point(ys[i], nu));
  return out;
}

DeformationConfig deformation(const json& j) {
  DeformationConfig c(measure_from_json(field(j, "measure")), j.contains("omega") ? parse_cplx(j["omega"]) : cplx(0.0),
                      get_or(j, "n_max", 4), get_or(j, "quad_order", 12));
  c.quad_orders = get_or(j, "quad_orders", std::vector<int>{});
  if (j.contains("t_domain_radius")) c.t_domain_radius = j["t_domain_radius"].get<double>();
  c.tolerance = get_or(j, "tolerance", c.tolerance);
  c.validate();
  return c;
}

class Csv {
public:
  Csv(const Run& r, std::vector<std::string> cols) {
    os_ << "# config_hash=" << hex(r.hash) << " seed=" << r.seed << '\n';
    for (std::size_t i = 0; i < cols.size(); ++i) os_ << (i ? "," : "") << cols[i];
    os_ << '\n';
  }
  Csv& operator<<(double v) { return put(num(v)); }
  Csv& operator<<(cplx v) { return put(num(v.real())).put(num(v.imag())); }
  Csv& operator<<(const std::string& s) { return put(s); }
  void end() {
    os_ << '\n';
    first_ = true;
  }
  std::string str() const { return os_.str(); }

private:
  Csv& put(const std::string& s) {
    os_ << (first_ ? "" : ",") << s;
    first_ = false;
    return *this;
  }
  std::ostringstream os_;
  bool first_ = true;
};

std::vector<std::string> entry_columns(const std::string& stem, int d) {
  std::vector<std::string> out;
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (const char* part : {"_re", "_im"}) out.push_back(stem + "_" + std::to_string(a) + std::to_string(b) + part);
  return out;
}

void put_matrix(Csv& csv, const Matrix& m) {
  for (int a = 0; a < m.rows(); ++a)
    for (int b = 0; b < m.cols(); ++b) csv << m(a, b);
}

std::string point_str(const CVec& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? " " : "") + num(p[i].real()) + (p[i].imag() < 0 ? "" : "+") + num(p[i].imag()) + "i";
  return "\"" + s + "\"";
}

std::string cmd_kernel(const Run& r) {
  const auto cfg = deformation(r.cfg);
  const int d = cfg.measure.d();
  std::vector<std::string> cols{"t_re", "t_im", "x", "y"};
  for (auto c : entry_columns("u", d)) cols.push_back(c);
  for (auto c : entry_columns("v", d)) cols.push_back(c);
  cols.push_back("tail_bound");
  Csv csv(r, cols);
  for (cplx t : cplx_list(r.cfg, "t"))
    for (const auto& [x, y] : point_pairs(r.cfg, cfg.measure.nu())) {
      const auto v = v_sum(t, x, y, cfg);
      csv << t << point_str(x) << point_str(y);
      put_matrix(csv, mehler_kernel({t, x, y, cfg.omega}) * v.value);
      put_matrix(csv, v.value);
      csv << v.tail_bound;
      csv.end();
    }
  return csv.str();
}

std::string cmd_borel(const Run& r) {
  const auto cfg = deformation(r.cfg);
  if (cfg.omega != 0.0) throw DomainError("borel: requires omega = 0");
  const BorelEvaluator ev(cfg, get_or(r.cfg, "kappa", 1.0), get_or(r.cfg, "R", 0.0));
  const int d = cfg.measure.d();
  std::vector<std::string> cols{"tau_re", "tau_im", "x", "y"};
  for (auto c : entry_columns("vhat", d)) cols.push_back(c);
  for (const char* c : {"norm", "bound", "within_bound"}) cols.push_back(c);
  Csv csv(r, cols);
  const auto taus = cplx_list(r.cfg, "tau");
  for (const auto& [x, y] : point_pairs(r.cfg, cfg.measure.nu())) {
    if (imag_modulus(x) > ev.R() || imag_modulus(y) > ev.R()) throw DomainError("borel: |Im x| or |Im y| exceeds R");
    const auto f = ev.bind(x, y);
    for (cplx tau : taus) {
      const Matrix v = f(tau);
      const double norm = opnorm(v);
      const double bound = std::exp(ev.growth_C() * std::sqrt(std::abs(tau)));
      csv << tau << point_str(x) << point_str(y);
      put_matrix(csv, v);
      csv << norm << bound << std::string(norm <= bound ? "1" : "0");
      csv.end();
    }
  }
  return csv.str();
}

std::string cmd_resum(const Run& r) {
  const auto cfg = deformation(r.cfg);
  if (cfg.omega != 0.0) throw DomainError("resum: requires omega = 0");
  const BorelEvaluator ev(cfg, get_or(r.cfg, "kappa", 1.0), get_or(r.cfg, "R", 0.0));
  const double tol = get_or(r.cfg, "tol", 1e-12);
  const int d = cfg.measure.d();
  std::vector<std::string> cols{"t_re", "t_im", "x", "y"};
  for (auto c : entry_columns("laplace", d)) cols.push_back(c);
  for (auto c : entry_columns("series", d)) cols.push_back(c);
  cols.push_back("abs_err");
  Csv csv(r, cols);
  for (cplx t : cplx_list(r.cfg, "t"))
    for (const auto& [x, y] : point_pairs(r.cfg, cfg.measure.nu())) {
      const Matrix a = laplace_resum(ev, x, y, t, tol);
      const Matrix b = v_sum(t, x, y, cfg).value;
      csv << t << point_str(x) << point_str(y);
      put_matrix(csv, a);
      put_matrix(csv, b);
      csv << (a - b).cwiseAbs().maxCoeff();
      csv.end();
    }
  return csv.str();
}

std::string cmd_torus(const Run& r) {
  const auto pot = torus_from_json(field(r.cfg, "torus"));
  auto cfg = torus_config(pot, get_or(r.cfg, "n_max", 4), get_or(r.cfg, "quad_order", 12));
  cfg.quad_orders = get_or(r.cfg, "quad_orders", std::vector<int>{});
  const double tol = get_or(r.cfg, "tol", 1e-10);
  const auto spec = galerkin_spectrum(pot, get_or(r.cfg, "cutoff", 32));
  Csv csv(r, {"t_re", "t_im", "trace_direct_re", "trace_direct_im", "poisson_re", "poisson_im", "abs_err", "q_max",
              "direct_tail", "poisson_tail"});
  for (cplx t : cplx_list(r.cfg, "t")) {
    const auto p = poisson_trace(t, pot, cfg, get_or(r.cfg, "q_max", 0), tol, get_or(r.cfg, "x_points", 0));
    const auto dr = trace_direct(spec, t, tol);
    csv << t << dr.value << p.value << std::abs(p.value - dr.value) << double(p.q_max) << dr.tail_bound << p.tail_bound;
    csv.end();
  }
  if (r.cfg.contains("spectrum_out")) {
    std::ofstream f(r.cfg["spectrum_out"].get<std::string>());
    if (!f) throw ConfigError("cannot open spectrum_out");
    f << spectrum_to_json(spec).dump(1) << '\n';
  }
  return csv.str();
}

std::string cmd_verify(const Run& r) {
  const auto cfg = deformation(r.cfg);
  const auto pairs = point_pairs(r.cfg, cfg.measure.nu());
  const auto& [x, y] = pairs.front();
  const int r_max = get_or(r.cfg, "r_max", 10);
  const int count = get_or(r.cfg, "samples", 80);
  const int sweep_samples = get_or(r.cfg, "sweep_samples", 2000);
  if (r_max < 1 || count < 1 || sweep_samples < 1) throw ConfigError("verify: r_max, samples and sweep_samples must be >= 1");

  const double Td = cfg.omega == 0.0 ? INFINITY : estimate_Td(cfg.omega, std::max(1, cfg.n_max), sweep_samples, r.seed);
  double T = get_or(r.cfg, "T", 0.0);
  std::string domain = get_or<std::string>(r.cfg, "domain", cfg.omega == 0.0 ? "nevanlinna" : "half_disk");
  if (T <= 0.0) T = cfg.omega == 0.0 ? 0.5 : 0.9 * std::min(Td, cfg.t_domain_radius);
  std::vector<cplx> ts;
  if (domain == "nevanlinna")
    ts = sample_nevanlinna(T, count, r.seed);
  else if (domain == "half_disk")
    ts = sample_half_disk(T, count, r.seed);
  else
    throw ConfigError("verify: domain must be 'nevanlinna' or 'half_disk'");

  std::vector<std::vector<Matrix>> rem;
  for (int q = 1; q <= r_max; ++q) rem.push_back(taylor_and_remainder(q, ts, x, y, cfg).remainders);
  auto rep = verify_watson(ts, rem, get_or(r.cfg, "kappa", 0.0), T);
  rep.domain = domain;
  rep.seed = r.seed;

  const double radius = cfg.omega == 0.0 ? T : 0.999 * Td;
  const auto sw = positivity_sweep(cfg.omega, radius, std::max(1, cfg.n_max), sweep_samples, r.seed);
  json out;
  out["config_hash"] = hex(r.hash);
  out["seed"] = r.seed;
  out["report"] = report_to_json(rep);
  out["positivity_sweep"] = {{"radius", radius},
                             {"samples", sw.samples},
                             {"violations", sw.violations},
                             {"min_real", sw.min_real},
                             {"max_ratio", sw.max_ratio}};
  out["T_d_estimate"] = std::isfinite(Td) ? json(Td) : json("inf");
  if (!rep.growth_ok) tolerance_failure = "verify: remainder ratios grow in r; kappa exceeds the Gevrey constant";
  return out.dump(1) + "\n";
}

std::string cmd_coeffs(const Run& r) {
  const auto cfg = deformation(r.cfg);
  const auto pairs = point_pairs(r.cfg, cfg.measure.nu());
  const auto& [x, y] = pairs.front();
  const int count = get_or(r.cfg, "r", 8);
  if (count < 1) throw ConfigError("coeffs: r must be >= 1");
  const int d = cfg.measure.d();
  const auto primary = taylor_and_remainder(count, std::vector<cplx>{}, x, y, cfg);
  std::vector<Matrix> second;
  std::string route_b;
  if (cfg.omega == 0.0) {
    // tau-plane coefficients of v^ times q!
    second = borel_coefficients(x, y, cfg, count);
    double f = 1.0;
    for (int q = 0; q < count; ++q) {
      if (q) f *= q;
      second[q] *= f;
    }
    route_b = "borel_contour";
  } else {
    second = taylor_by_fit(count, x, y, cfg).coeffs;
    route_b = "fit";
  }
  std::vector<std::string> cols{"r"};
  for (auto c : entry_columns(primary.method, d)) cols.push_back(c);
  for (auto c : entry_columns(route_b, d)) cols.push_back(c);
  cols.push_back("abs_diff");
  Csv csv(r, cols);
  for (int q = 0; q < count; ++q) {
    csv << std::to_string(q);
    put_matrix(csv, primary.coeffs[q]);
    put_matrix(csv, second[q]);
    csv << (primary.coeffs[q] - second[q]).cwiseAbs().maxCoeff();
    csv.end();
  }
  return csv.str();
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const json::exception*>(&e)) return 2;
  if (dynamic_cast<const DomainError*>(&e)) return 3;
  if (dynamic_cast<const CostError*>(&e)) return 4;
  if (dynamic_cast<const ToleranceError*>(&e)) return 5;
  return 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deformation-series heat kernels: evaluation, Borel resummation, torus traces"};
  std::string config_path, out_path;
  int threads = 1;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON config")->required();
  app.add_option("--out", out_path, "output file (stdout if omitted)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "RNG seed (overrides the config's 'seed')");
  app.require_subcommand(1);
  const std::map<std::string, std::string (*)(const Run&)> commands{
      {"kernel", cmd_kernel}, {"borel", cmd_borel}, {"resum", cmd_resum},
      {"torus", cmd_torus},   {"verify", cmd_verify}, {"coeffs", cmd_coeffs}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config " + config_path);
    Run run;
    run.cfg = json::parse(in);
    if (!run.cfg.is_object()) throw ConfigError("config must be a JSON object");
    run.hash = fnv1a(run.cfg.dump());
    run.seed = app.count("--seed") ? seed : get_or<std::uint64_t>(run.cfg, "seed", 1);
    set_thread_count(threads);

    const std::string name = app.get_subcommands().front()->get_name();
    const std::string text = commands.at(name)(run);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw ConfigError("cannot open output " + out_path);
      f << text;
    }
    if (!tolerance_failure.empty()) throw ToleranceError(tolerance_failure);
  } catch (const std::exception& e) {
    std::cerr << "hkcli: " << e.what() << '\n';
    return exit_code(e);
  }
  return 0;
}
