#include "hk/borel.hpp"

#include <algorithm>
#include <cmath>

#include "hk/quadrature.hpp"

namespace hk {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// sum_m (-z)^m / (m! (m + n)!), stopped once two consecutive terms fall below
// 1e-17 of the running sum past the peak term.
cplx scaled_series(int n, cplx z) {
  cplx term = 1.0 / factorial(n);
  cplx sum = term;
  const double peak = std::sqrt(std::abs(z));
  int small = 0;
  for (int m = 0; m < 1000; ++m) {
    term *= -z / (static_cast<double>(m + 1) * static_cast<double>(m + n + 1));
    sum += term;
    if (m + 1 > peak && std::abs(term) <= 1e-17 * std::abs(sum)) {
      if (++small == 2) break;
    } else {
      small = 0;
    }
  }
  return sum;
}

double scaled_series_real(int n, double z) {
  double term = 1.0 / factorial(n);
  double sum = term;
  const double peak = std::sqrt(std::abs(z));
  int small = 0;
  for (int m = 0; m < 1000; ++m) {
    term *= -z / (static_cast<double>(m + 1) * static_cast<double>(m + n + 1));
    sum += term;
    if (m + 1 > peak && std::abs(term) <= 1e-17 * std::abs(sum)) {
      if (++small == 2) break;
    } else {
      small = 0;
    }
  }
  return sum;
}

// J_n(w) = (1/2pi) int_0^{2pi} cos(n phi - w sin phi) dphi, trapezoid (spectral
// for this periodic entire integrand).
cplx bessel_trapezoid(int n, cplx w) {
  const int N = 2 * static_cast<int>(std::ceil(std::abs(w) + n + 30.0));
  cplx s = 0.0;
  for (int k = 0; k < N; ++k) {
    const double phi = 2.0 * pi * k / N;
    s += std::cos(static_cast<double>(n) * phi - w * std::sin(phi));
  }
  return s / static_cast<double>(N);
}

// (B tau)^{-n/2} J_n(2 (B tau)^{1/2}) written as sum_m (-z)^m / (m! (m + n)!).
cplx scaled_bessel(int n, cplx z) {
  const double az = std::abs(z);
  if (az <= 16.0 || 2.0 * std::sqrt(az) < n) {
    if (z.imag() == 0.0) return scaled_series_real(n, z.real());
    return scaled_series(n, z);
  }
  if (z.imag() == 0.0 && z.real() > 0.0) {
    const double h = std::sqrt(z.real());
    return std::cyl_bessel_j(static_cast<double>(n), 2.0 * h) / std::pow(h, n);
  }
  const cplx h = principal_sqrt(z);
  return bessel_trapezoid(n, 2.0 * h) / ipow(h, n);
}

} // namespace

cplx bessel_J(cplx z) { return scaled_bessel(0, z); }

cplx bessel_J_series(cplx z) { return scaled_series(0, z); }

cplx bessel_J_integral(cplx z) { return bessel_trapezoid(0, 2.0 * principal_sqrt(z)); }

cplx kernel_K(int n, cplx B, cplx tau) {
  if (n < 0) throw ConfigError("kernel_K: n must be >= 0");
  return ipow(tau, n) * scaled_bessel(n, B * tau);
}

cplx kernel_K_integral(int n, cplx B, cplx tau, int order) {
  if (n < 1) throw ConfigError("kernel_K_integral: n must be >= 1");
  const GaussRule g = gauss_legendre(order);
  cplx s = 0.0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const double th = g.nodes[i];
    s += g.weights[i] * std::pow(1.0 - th, n - 1) * bessel_J(th * B * tau);
  }
  return ipow(tau, n) * s / factorial(n - 1);
}

// ---------------------------------------------------------------------------

BorelEvaluator::BorelEvaluator(DeformationConfig cfg, double kappa, double R)
    : cfg_(std::move(cfg)), kappa_(kappa), R_(R) {
  cfg_.validate();
  if (cfg_.omega != 0.0) throw DomainError("BorelEvaluator: requires omega = 0");
  if (!(kappa > 0.0)) throw ConfigError("BorelEvaluator: kappa must be positive");
  if (!(R >= 0.0)) throw ConfigError("BorelEvaluator: R must be >= 0");
  C_ray_ = 2.0 * std::sqrt(exp_moment(cfg_.measure, 0.0, R_));
  // log A(eps) = 2 kappa / eps + log sum exp(eps xi^2 / 2 + R |xi|) |M| is convex in
  // log eps; golden-section search on u = log eps.
  const auto logA = [&](double u) {
    const double eps = std::exp(u);
    const double m = exp_moment(cfg_.measure, 0.5 * eps, R_);
    return m > 0.0 ? 2.0 * kappa_ / eps + std::log(m) : -std::numeric_limits<double>::infinity();
  };
  double lo = -20.0, hi = 20.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double u1 = hi - g * (hi - lo), u2 = lo + g * (hi - lo);
  double f1 = logA(u1), f2 = logA(u2);
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    if (f1 < f2) {
      hi = u2;
      u2 = u1;
      f2 = f1;
      u1 = hi - g * (hi - lo);
      f1 = logA(u1);
    } else {
      lo = u1;
      u1 = u2;
      f1 = f2;
      u2 = lo + g * (hi - lo);
      f2 = logA(u2);
    }
  }
  const double u = 0.5 * (lo + hi);
  eps_ = std::exp(u);
  const double la = logA(u);
  C_ = std::isfinite(la) ? 2.0 * std::exp(0.5 * la) : 0.0;
}

std::function<Matrix(cplx)> BorelEvaluator::bind(CVec x, CVec y,
                                                 const std::function<bool(const RVec&)>& keep) const {
  auto table = std::make_shared<const FreeCaseTable>(cfg_, std::move(x), std::move(y), keep);
  return [table](cplx tau) {
    const auto ints = table->integrate([tau](int n, double form) { return kernel_K(n, form, tau); });
    return table->combine(ints, [](int) { return cplx(1.0); });
  };
}

Matrix borel_v(cplx tau, std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg) {
  if (cfg.omega != 0.0) throw DomainError("borel_v: requires omega = 0");
  const FreeCaseTable table(cfg, CVec(x.begin(), x.end()), CVec(y.begin(), y.end()));
  const auto ints = table.integrate([tau](int n, double form) { return kernel_K(n, form, tau); });
  return table.combine(ints, [](int) { return cplx(1.0); });
}

std::vector<Matrix> borel_coefficients(std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg,
                                       int count, double rho, int n_points) {
  if (count < 1 || n_points < count) throw ConfigError("borel_coefficients: need 1 <= count <= n_points");
  if (cfg.omega != 0.0) throw DomainError("borel_coefficients: requires omega = 0");
  const BorelEvaluator ev(cfg);
  const auto f = ev.bind(CVec(x.begin(), x.end()), CVec(y.begin(), y.end()));
  const int d = cfg.measure.d();
  std::vector<Matrix> vals(n_points);
  for (int k = 0; k < n_points; ++k) vals[k] = f(std::polar(rho, 2.0 * pi * k / n_points));
  std::vector<Matrix> b(count, Matrix::Zero(d, d));
  for (int q = 0; q < count; ++q) {
    for (int k = 0; k < n_points; ++k) b[q] += std::polar(1.0, -2.0 * pi * double(k) * q / n_points) * vals[k];
    b[q] /= static_cast<double>(n_points) * std::pow(rho, q);
  }
  return b;
}

// ---------------------------------------------------------------------------

LaplaceResult laplace_integrate(const std::function<Matrix(cplx)>& f_hat, int d, double C, cplx t, double tol,
                                double scale) {
  if (t == 0.0) throw DomainError("laplace: t = 0");
  const double a = (1.0 / t).real();
  if (!(a > 0.0)) throw DomainError("laplace: requires Re(1/t) > 0");
  if (!(tol > 0.0) || !(C >= 0.0) || !(scale > 0.0)) throw ConfigError("laplace: invalid tolerance or growth data");
  const double at = std::abs(t);
  // Past tau* = (C/a)^2 the exponent C sqrt(tau) - a tau decreases at rate >= a/2,
  // so the tail beyond T is at most exp(C sqrt T - a T) 2 / (a |t|).
  const double target = std::log(tol * a * at / (2.0 * scale));
  const auto excess = [&](double T) { return C * std::sqrt(T) - a * T - target; };
  double lo = (C / a) * (C / a);
  double hi = std::max(2.0 * lo, at);
  const double cap = 1e6 * at;
  while (excess(hi) > 0.0) {
    hi *= 2.0;
    if (hi > cap) throw ToleranceError("laplace: tau_max exceeds 1e6 |t|; tolerance not reachable");
  }
  if (excess(lo) <= 0.0) {
    hi = lo;
  } else {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) > 0.0 ? lo : hi) = mid;
    }
  }
  const double tau_max = std::max(hi, 1e-300);
  if (tau_max > cap) throw ToleranceError("laplace: tau_max exceeds 1e6 |t|; tolerance not reachable");

  const GaussRule g = gauss_legendre(20);
  LaplaceResult res;
  res.tau_max = tau_max;
  res.value = Matrix::Zero(d, d);
  double left = 0.0, width = 0.5 * at;
  const cplx inv_t = 1.0 / t;
  while (left < tau_max) {
    const double right = std::min(left + width, tau_max);
    const double h = right - left;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double tau = left + h * g.nodes[i];
      res.value += (h * g.weights[i] * std::exp(-tau * inv_t)) * f_hat(tau);
      ++res.evaluations;
    }
    ++res.panels;
    left = right;
    width = std::min(1.3 * width, 4.0 * at);
  }
  res.value *= inv_t;
  return res;
}

Matrix laplace_resum(const BorelEvaluator& f, std::span<const cplx> x, std::span<const cplx> y, cplx t, double tol) {
  if (imag_modulus(x) > f.R() || imag_modulus(y) > f.R())
    throw DomainError("laplace_resum: |Im x| or |Im y| exceeds the evaluator's R");
  const auto fh = f.bind(CVec(x.begin(), x.end()), CVec(y.begin(), y.end()));
  return laplace_integrate(fh, f.config().measure.d(), f.ray_growth_C(), t, tol).value;
}

// ---------------------------------------------------------------------------

RemainderSplit remainder_split(int r, cplx t, std::span<const cplx> x, std::span<const cplx> y,
                               const DeformationConfig& cfg) {
  if (r < 1) throw ConfigError("remainder_split: r must be >= 1");
  cfg.validate();
  check_time_domain(t, cfg);
  const int d = cfg.measure.d();
  RemainderSplit s;
  s.f = Matrix::Identity(d, d);
  s.g1 = Matrix::Zero(d, d);
  s.g2 = Matrix::Zero(d, d);
  for (int n = 1; n <= cfg.n_max; ++n) {
    const auto tuples = make_tuples(cfg.measure, n);
    const SimplexRule& rule = simplex_rule_for(tuples, cfg);
    const cplx tn = ipow(t, n);
    if (n < r) {
      const int m = r - n;
      const auto head = tuple_integrals(cfg.measure, tuples, rule, cfg.omega, t, x, y,
                                        [m](cplx q, cplx ph) { return exp_partial(-q, m) * ph; });
      const auto tail = tuple_integrals(cfg.measure, tuples, rule, cfg.omega, t, x, y,
                                        [m](cplx q, cplx ph) { return exp_remainder(-q, m) * ph; });
      for (std::size_t i = 0; i < tuples.product.size(); ++i) {
        s.f += (tn * head[i]) * tuples.product[i];
        s.g1 += (tn * tail[i]) * tuples.product[i];
      }
    } else {
      const auto whole = tuple_integrals(cfg.measure, tuples, rule, cfg.omega, t, x, y,
                                         [](cplx q, cplx ph) { return std::exp(-q) * ph; });
      for (std::size_t i = 0; i < tuples.product.size(); ++i) s.g2 += (tn * whole[i]) * tuples.product[i];
    }
  }
  s.g = s.g1 + s.g2;
  return s;
}

// ---------------------------------------------------------------------------

CertificationReport verify_watson(std::span<const cplx> t, const std::vector<std::vector<Matrix>>& remainders,
                                  double kappa, double T) {
  const int r_max = static_cast<int>(remainders.size());
  if (r_max < 1) throw ConfigError("verify_watson: need r_max >= 1");
  for (const auto& row : remainders)
    if (row.size() != t.size()) throw ConfigError("verify_watson: remainder table does not match the samples");
  for (cplx ti : t)
    if (ti == 0.0) throw DomainError("verify_watson: t = 0 sample");
  CertificationReport rep;
  rep.T = T;
  rep.samples.assign(t.begin(), t.end());
  // m_r = max_t |R_r(t)| / (r! |t|^r)
  std::vector<double> m(r_max, 0.0);
  for (int r = 1; r <= r_max; ++r)
    for (std::size_t i = 0; i < t.size(); ++i)
      m[r - 1] = std::max(m[r - 1], opnorm(remainders[r - 1][i]) / (factorial(r) * std::pow(std::abs(t[i]), r)));
  if (kappa <= 0.0) {
    rep.kappa_fitted = true;
    kappa = std::numeric_limits<double>::infinity();
    for (int r = 1; r < std::max(2, r_max / 2 + 1) && r < r_max; ++r)
      if (m[r] > 0.0) kappa = std::min(kappa, m[r - 1] / m[r]);
    if (!std::isfinite(kappa)) kappa = 1.0;  // remainders vanish: any kappa works
  }
  rep.kappa = kappa;
  for (int r = 1; r <= r_max; ++r) rep.ratio_by_r.push_back(m[r - 1] * std::pow(kappa, r));
  rep.max_ratio = *std::max_element(rep.ratio_by_r.begin(), rep.ratio_by_r.end());
  rep.K = rep.max_ratio;
  // Growth of the running maximum K(r) = max_{r' <= r} ratio: an isolated
  // near-zero Taylor coefficient dents one ratio without any divergence.
  double env = rep.ratio_by_r[0];
  for (int r = 1; r < r_max; ++r) {
    const double prev = env;
    env = std::max(env, rep.ratio_by_r[r]);
    const double g = prev > 0.0 ? env / prev : (env > 0.0 ? INFINITY : 0.0);
    rep.growth.push_back(g);
    rep.max_growth = std::max(rep.max_growth, g);
  }
  rep.growth_ok = std::isfinite(rep.K) && rep.max_growth <= 1.1;
  return rep;
}

CertificationReport verify_watson(std::span<const cplx> t, const std::vector<Matrix>& values,
                                  const std::vector<Matrix>& coeffs, double kappa, double T) {
  if (values.size() != t.size()) throw ConfigError("verify_watson: values do not match the samples");
  std::vector<std::vector<Matrix>> rem(coeffs.size(), std::vector<Matrix>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    Matrix r = values[i];
    for (std::size_t q = 0; q < coeffs.size(); ++q) {
      r -= ipow(t[i], static_cast<int>(q)) * coeffs[q];
      rem[q][i] = r;
    }
  }
  return verify_watson(t, rem, kappa, T);
}

nlohmann::json report_to_json(const CertificationReport& r) {
  nlohmann::json j;
  j["K"] = r.K;
  j["kappa"] = r.kappa;
  j["kappa_fitted"] = r.kappa_fitted;
  j["T"] = r.T;
  j["max_ratio"] = r.max_ratio;
  j["ratio_by_r"] = r.ratio_by_r;
  j["growth"] = r.growth;
  j["max_growth"] = r.max_growth;
  j["growth_ok"] = r.growth_ok;
  j["domain"] = r.domain;
  j["seed"] = r.seed;
  auto& s = j["samples"] = nlohmann::json::array();
  for (cplx t : r.samples) s.push_back({t.real(), t.imag()});
  return j;
}

std::vector<cplx> sample_nevanlinna(double T, int count, std::uint64_t seed, double margin) {
  CounterRng rng(seed);
  std::vector<cplx> out;
  const double rad = 0.5 * T * margin;
  while (static_cast<int>(out.size()) < count) {
    const double rho = rad * std::sqrt(rng.uniform());
    const double th = 2.0 * pi * rng.uniform();
    const cplx t = 0.5 * T + std::polar(rho, th);
    if (std::abs(t) > 1e-3 * T) out.push_back(t);
  }
  return out;
}

std::vector<cplx> sample_half_disk(double T, int count, std::uint64_t seed, double margin) {
  CounterRng rng(seed);
  std::vector<cplx> out;
  const double rad = T * margin;
  while (static_cast<int>(out.size()) < count) {
    const double rho = rad * std::sqrt(rng.uniform());
    const double th = pi * (rng.uniform() - 0.5);
    if (rho > 1e-3 * T) out.push_back(std::polar(rho, th));
  }
  return out;
}

} // namespace hk
