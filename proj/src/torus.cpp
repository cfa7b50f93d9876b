#include "hk/torus.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace hk {

namespace {

// Multi-indices of {-c..c}^nu, last axis fastest.
std::vector<Frequency> cube(int nu, int c) {
  std::vector<Frequency> out;
  Frequency k(nu, -c);
  for (;;) {
    out.push_back(k);
    int a = nu - 1;
    while (a >= 0 && ++k[a] > c) k[a--] = -c;
    if (a < 0) break;
  }
  return out;
}

// sum_{|k| > c} e^{-s k^2} over k in Z (both signs), s > 0.
double theta_tail(double s, int c) {
  double sum = 0.0;
  for (int k = c + 1;; ++k) {
    const double v = std::exp(-s * k * k);
    sum += 2.0 * v;
    if (v < 1e-18 * sum || v == 0.0) break;
  }
  return sum;
}

double theta_head(double s, int c) {
  double sum = 1.0;
  for (int k = 1; k <= c; ++k) sum += 2.0 * std::exp(-s * k * k);
  return sum;
}

// sum over |k|_inf > c in Z^nu of e^{-s k^2} = theta^nu - head^nu, factored.
double lattice_tail(double s, int c, int nu) {
  const double head = theta_head(s, c);
  const double tail = theta_tail(s, c);
  const double full = head + tail;
  double acc = 0.0;
  for (int j = 0; j < nu; ++j) acc += std::pow(full, j) * std::pow(head, nu - 1 - j);
  return tail * acc;
}

// (1/N^nu) sum over the uniform grid of e^{i x.S}.
cplx trapezoid_factor(const RVec& S, int N) {
  cplx f = 1.0;
  for (double s : S) {
    cplx a = 0.0;
    for (int j = 0; j < N; ++j) a += std::polar(1.0, s * j / N);
    f *= a / static_cast<double>(N);
  }
  return f;
}

} // namespace

TorusSpectrum galerkin_spectrum(const TorusPotential& p, int cutoff) {
  if (cutoff < p.max_frequency()) throw ConfigError("galerkin_spectrum: cutoff below the potential's frequency support");
  const double scale = [&] {
    double s = 1.0;
    for (const auto& [q, c] : p.coeffs()) s = std::max(s, opnorm(c));
    return s;
  }();
  if (p.hermitian_defect() > 1e-12 * scale) throw ConfigError("galerkin_spectrum: potential is not Hermitian");
  const int nu = p.nu(), d = p.d();
  const auto modes = cube(nu, cutoff);
  const auto n = static_cast<Eigen::Index>(modes.size()) * d;
  Matrix H = Matrix::Zero(n, n);
  for (std::size_t a = 0; a < modes.size(); ++a) {
    double k2 = 0.0;
    for (int k : modes[a]) k2 += double(k) * k;
    for (int i = 0; i < d; ++i) H(a * d + i, a * d + i) += 4.0 * pi * pi * k2;
    for (std::size_t b = 0; b < modes.size(); ++b) {
      Frequency diff(nu);
      for (int c = 0; c < nu; ++c) diff[c] = modes[a][c] - modes[b][c];
      const auto it = p.coeffs().find(diff);
      if (it == p.coeffs().end()) continue;
      H.block(a * d, b * d, d, d) -= it->second;
    }
  }
  // Symmetrise against round-off in the supplied coefficients.
  const Matrix Hs = 0.5 * (H + H.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(Hs, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ToleranceError("galerkin_spectrum: eigensolver failed");
  TorusSpectrum s;
  s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
  s.cutoff = cutoff;
  s.d = d;
  s.nu = nu;
  s.sup_bound = p.sup_bound();
  return s;
}

TraceResult trace_direct(const TorusSpectrum& spec, cplx t, double tol) {
  if (!(t.real() > 0.0)) throw DomainError("trace_direct: requires Re t > 0");
  TraceResult r;
  r.value = 0.0;
  for (double l : spec.eigenvalues) r.value += std::exp(-l * t);
  const double s = t.real();
  r.tail_bound = spec.d * std::exp(spec.sup_bound * s) * lattice_tail(4.0 * pi * pi * s, spec.cutoff, spec.nu);
  r.tail_warning = r.tail_bound > tol;
  return r;
}

DeformationConfig torus_config(const TorusPotential& p, int n_max, int quad_order) {
  return DeformationConfig(measure_from_fourier_coeffs(p), 0.0, n_max, quad_order);
}

// ---------------------------------------------------------------------------

WHat::WHat(const DeformationConfig& cfg, Frequency q, int x_points) : d_(cfg.measure.d()), q_(std::move(q)) {
  const int nu = cfg.measure.nu();
  if (static_cast<int>(q_.size()) != nu) throw ConfigError("w_hat: q has the wrong dimension");
  if (x_points < 1) throw ConfigError("w_hat: x_points must be >= 1");
  CVec x(nu, 0.0), y(nu);
  for (int c = 0; c < nu; ++c) y[c] = static_cast<double>(q_[c]);
  const auto keep = [x_points](const RVec& S) { return std::abs(trapezoid_factor(S, x_points)) > 1e-12; };
  table_ = std::make_shared<const FreeCaseTable>(cfg, x, y, keep);
  for (const auto& b : table_->blocks()) block_scale_.push_back(trapezoid_factor(b.total_xi, x_points) * b.product.trace());
}

cplx WHat::operator()(cplx tau) const {
  const auto ints = table_->integrate([tau](int n, double form) { return kernel_K(n, form, tau); });
  cplx s = static_cast<double>(d_);
  for (std::size_t b = 0; b < ints.size(); ++b) s += ints[b] * block_scale_[b];
  return s;
}

cplx w_hat(const Frequency& q, cplx tau, const DeformationConfig& cfg, int x_points) {
  return WHat(cfg, q, x_points)(tau);
}

PoissonResult poisson_trace(cplx t, const TorusPotential& p, const DeformationConfig& cfg, int q_max, double tol,
                            int x_points) {
  if (!(t.real() > 0.0)) throw DomainError("poisson_trace: requires Re t > 0");
  if (!(tol > 0.0)) throw ConfigError("poisson_trace: tol must be positive");
  if (cfg.omega != 0.0) throw DomainError("poisson_trace: requires omega = 0");
  const int nu = p.nu(), d = p.d();
  const double a = (1.0 / t).real();
  PoissonResult res;
  res.q_max = q_max > 0 ? q_max : static_cast<int>(std::ceil(std::sqrt(4.0 * std::log(10.0 / tol) / a)));
  if (x_points <= 0) x_points = 2 * std::max(1, cfg.n_max * p.max_frequency()) + 1;

  // |w^(q, tau)| <= d exp(C tau^{1/2}) on the real axis (x real, R = 0).
  const double C = 2.0 * std::sqrt(exp_moment(cfg.measure, 0.0, 0.0));
  const cplx pref = ipow(principal_sqrt(4.0 * pi * t), -nu);
  res.value = 0.0;
  for (const auto& q : cube(nu, res.q_max)) {
    const WHat w(cfg, q, x_points);
    PoissonTerm term;
    term.q = q;
    const auto f = [&w](cplx tau) { return Matrix::Constant(1, 1, w(tau)); };
    term.laplace = laplace_integrate(f, 1, C, t, 0.1 * tol, d).value(0, 0);
    double q2 = 0.0;
    for (int c : q) q2 += double(c) * c;
    term.weighted = pref * std::exp(-q2 / (4.0 * t)) * term.laplace;
    for (double tau : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) term.w_hat_samples.emplace_back(tau, w(tau));
    res.value += term.weighted;
    res.terms.push_back(std::move(term));
  }
  // Uniform bound on the Laplace transforms: d int_0^inf e^{C sqrt(tau) - a tau} dtau / |t|.
  const double gauss = 1.0 / a + C * std::sqrt(pi) / (2.0 * std::pow(a, 1.5)) * std::exp(C * C / (4.0 * a)) *
                                      (1.0 + std::erf(C / (2.0 * std::sqrt(a))));
  const double uniform = d * gauss / std::abs(t);
  res.tail_bound = std::abs(pref) * uniform * lattice_tail(0.25 * a, res.q_max, nu);
  res.tail_warning = res.tail_bound > tol;
  return res;
}

nlohmann::json spectrum_to_json(const TorusSpectrum& s) {
  return {{"nu", s.nu}, {"d", s.d}, {"cutoff", s.cutoff}, {"sup_bound", s.sup_bound}, {"eigenvalues", s.eigenvalues}};
}

} // namespace hk
