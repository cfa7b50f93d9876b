#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include <nlohmann/json.hpp>

#include "hk/series.hpp"

namespace hk {

/// J(z) = sum_n (-1)^n z^n / (n!)^2 = J_0(2 z^{1/2}). Power series for
/// moderate |z|, Bessel evaluation beyond (no cancellation for large |z|).
cplx bessel_J(cplx z);

/// Plain power series of J, truncated by a ratio test with a two-term lookahead.
cplx bessel_J_series(cplx z);

/// (1/pi) int_0^pi cos(2 z^{1/2} sin phi) dphi by the periodic trapezoid rule.
cplx bessel_J_integral(cplx z);

/// K_n(B, tau) = tau^n sum_m (-1)^m (B tau)^m / (m! (m + n)!), n >= 0.
/// Equivalently tau^n (B tau)^{-n/2} J_n(2 (B tau)^{1/2}).
cplx kernel_K(int n, cplx B, cplx tau);

/// tau^n int_0^1 (1 - th)^{n-1} / (n-1)! J(th B tau) dth, Gauss-Legendre of the
/// given order (n >= 1).
cplx kernel_K_integral(int n, cplx B, cplx tau, int order = 64);

/// Borel transform of v in the free case, with the growth constants of its
/// exponential bound |v^(tau, x, y)| <= exp(C |tau|^{1/2}).
class BorelEvaluator {
public:
  /// kappa > 0 selects the parabola P_kappa = {|Im tau^{1/2}|^2 < kappa}; R
  /// bounds |Im x|, |Im y|. epsilon is chosen to minimise growth_C.
  BorelEvaluator(DeformationConfig cfg, double kappa = 1.0, double R = 0.0);

  const DeformationConfig& config() const { return cfg_; }
  double kappa() const { return kappa_; }
  double R() const { return R_; }
  double epsilon() const { return eps_; }

  /// C = 2 (sum_j exp(2 kappa / eps + eps xi_j^2 / 2 + R |xi_j|) |M_j|)^{1/2}, valid on P_kappa.
  double growth_C() const { return C_; }
  /// C on the positive real tau axis: 2 exp_moment(mu, 0, R)^{1/2}.
  double ray_growth_C() const { return C_ray_; }

  /// tau -> v^(tau, x, y) with the node table for (x, y) built once. `keep`
  /// filters tuples by total frequency as in FreeCaseTable.
  std::function<Matrix(cplx)> bind(CVec x, CVec y, const std::function<bool(const RVec&)>& keep = {}) const;

private:
  DeformationConfig cfg_;
  double kappa_, R_, eps_, C_, C_ray_;
};

/// 1 + sum_{n <= n_max} int sum_tuples e^{i q_0.xi} K_n(Omega-bar.xi(x)xi, tau) M...M ds.
Matrix borel_v(cplx tau, std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg);

/// tau-Taylor coefficients b_0 .. b_{count-1} of v^, by the trapezoid rule of
/// the Cauchy integral on |tau| = rho.
std::vector<Matrix> borel_coefficients(std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg,
                                       int count, double rho = 1.0, int n_points = 64);

struct LaplaceResult {
  Matrix value;
  double tau_max = 0.0;
  int panels = 0;
  std::size_t evaluations = 0;
};

/// int_0^inf f(tau) e^{-tau/t} dtau / t along the positive real axis, for
/// |f(tau)| <= scale exp(C tau^{1/2}). tau_max solves
///   C tau^{1/2} - a tau = log(tol a |t| / (2 scale)),  a = Re(1/t),
/// and [0, tau_max] is covered by 20-point Gauss-Legendre panels whose width
/// grows geometrically from |t|/2 up to 4|t|. Throws ToleranceError when
/// tau_max exceeds 1e6 |t|.
LaplaceResult laplace_integrate(const std::function<Matrix(cplx)>& f_hat, int d, double C, cplx t, double tol,
                                double scale = 1.0);

/// Laplace transform of v^(., x, y); requires |Im x|, |Im y| <= f.R().
Matrix laplace_resum(const BorelEvaluator& f, std::span<const cplx> x, std::span<const cplx> y, cplx t,
                     double tol = 1e-12);

/// v = f_r + g_r with f_r = 1 + sum_{n+m<r} t^n int F_{n,m}, g_r = g1 + g2:
/// g1 collects the Taylor remainders of e^{-Omega.xi(x)xi} for n < r, g2 the
/// whole terms n >= r. At w = 0, f_r is the Taylor polynomial of degree r - 1.
struct RemainderSplit {
  Matrix f, g, g1, g2;
};
RemainderSplit remainder_split(int r, cplx t, std::span<const cplx> x, std::span<const cplx> y,
                               const DeformationConfig& cfg);

/// Empirical Gevrey-1 bound |R_r(t)| <= K r! kappa^{-r} |t|^r over samples.
struct CertificationReport {
  double K = 0.0;
  double kappa = 0.0;
  bool kappa_fitted = false;
  double T = 0.0;
  double max_ratio = 0.0;
  std::vector<double> ratio_by_r;   // r = 1..r_max: max_t |R_r| kappa^r / (r! |t|^r)
  std::vector<double> growth;       // K(r) / K(r-1), K(r) = max_{r' <= r} ratio_by_r
  double max_growth = 0.0;
  bool growth_ok = false;           // max_growth <= 1.1
  std::vector<cplx> samples;
  std::string domain;
  std::uint64_t seed = 0;
};

/// remainders[r-1][i] = R_r(t_i), r = 1..r_max. kappa <= 0 fits kappa as
/// min_{r < r_max/2} m_r / m_{r+1} with m_r = max_t |R_r| / (r! |t|^r); the
/// growth check then runs over all r.
CertificationReport verify_watson(std::span<const cplx> t, const std::vector<std::vector<Matrix>>& remainders,
                                  double kappa, double T);

/// Same from values v(t_i) and coefficients a_0..a_{r_max-1} (R_r by subtraction).
CertificationReport verify_watson(std::span<const cplx> t, const std::vector<Matrix>& values,
                                  const std::vector<Matrix>& coeffs, double kappa, double T);

nlohmann::json report_to_json(const CertificationReport& r);

/// Samples in D^Nev_T = {Re(1/t) > 1/T} (uniform in the disk of centre T/2,
/// radius shrunk by `margin`) and in D+_T = {|t| < T, Re t >= 0}.
std::vector<cplx> sample_nevanlinna(double T, int count, std::uint64_t seed, double margin = 0.95);
std::vector<cplx> sample_half_disk(double T, int count, std::uint64_t seed, double margin = 0.95);

} // namespace hk
