#include "hk/defmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hk {

SimplexPoint::SimplexPoint(std::vector<double> s) : s_(std::move(s)) {
  for (std::size_t k = 0; k < s_.size(); ++k) {
    if (!(s_[k] > 0.0 && s_[k] < 1.0)) throw DomainError("SimplexPoint: times must lie in (0, 1)");
    if (k > 0 && !(s_[k] > s_[k - 1])) throw DomainError("SimplexPoint: times must be strictly increasing");
  }
}

double FrequencyTuple::sum_squares() const {
  double s = 0.0;
  for (const auto& v : xi) s += dot(std::span<const double>(v), std::span<const double>(v));
  return s;
}

cplx omega_entry(cplx omega, cplx t, double sj, double sk) {
  const double lo = std::min(sj, sk);
  const double hi = std::max(sj, sk);
  const cplx a = omega * t;
  const cplx den = shc_nonzero(a);
  return t * (lo * (1.0 - hi)) * shc(a * lo) * shc(a * (1.0 - hi)) / den;
}

Matrix omega_matrix(cplx omega, cplx t, std::span<const double> s) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Matrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j; k < n; ++k) {
      m(j, k) = omega_entry(omega, t, s[j], s[k]);
      m(k, j) = m(j, k);
    }
  return m;
}

cplx quadratic_form(cplx omega, cplx t, const SimplexPoint& s, const FrequencyTuple& xi) {
  if (xi.size() != s.size()) throw ConfigError("quadratic_form: times and frequencies differ in length");
  const Matrix om = omega_matrix(omega, t, s.values());
  cplx q = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j)
    for (std::size_t k = 0; k < s.size(); ++k)
      q += om(j, k) * dot(std::span<const double>(xi.xi[j]), std::span<const double>(xi.xi[k]));
  return q;
}

cplx spectral_qf_oracle(cplx z, const SimplexPoint& s, const FrequencyTuple& xi, int n_modes) {
  if (std::abs(z) >= pi) throw DomainError("spectral_qf_oracle: requires |z| < pi");
  if (n_modes < 1) throw ConfigError("spectral_qf_oracle: n_modes must be >= 1");
  if (xi.size() != s.size()) throw ConfigError("spectral_qf_oracle: times and frequencies differ in length");
  const std::size_t nu = xi.size() ? xi.xi[0].size() : 0;
  std::vector<double> proj(nu);
  cplx total = 0.0;
  for (int m = 1; m <= n_modes; ++m) {
    std::fill(proj.begin(), proj.end(), 0.0);
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double sn = std::sin(m * pi * s[j]);
      for (std::size_t a = 0; a < nu; ++a) proj[a] += sn * xi.xi[j][a];
    }
    double sq = 0.0;
    for (double p : proj) sq += p * p;
    total += 2.0 * sq / (static_cast<double>(m) * m * pi * pi + z * z);
  }
  return total;
}

double spectral_qf_tail_bound(cplx z, const FrequencyTuple& xi, int n_modes) {
  // |sum_j sin(m pi s_j) xi_j|^2 <= (sum_j |xi_j|)^2 and, for m >= 2 and
  // |z| < pi, |m^2 pi^2 + z^2| >= (3/4) m^2 pi^2.
  double l1 = 0.0;
  for (const auto& v : xi.xi) l1 += modulus(std::span<const double>(v));
  if (std::abs(z) >= pi) throw DomainError("spectral_qf_tail_bound: requires |z| < pi");
  const double n = std::max(n_modes, 1);
  return 2.0 * l1 * l1 * (4.0 / 3.0) / (pi * pi * n);
}

cplx green_function(cplx z, double s, double sprime) {
  const double lo = std::min(s, sprime);
  const double hi = std::max(s, sprime);
  return lo * (1.0 - hi) * shc(z * lo) * shc(z * (1.0 - hi)) / shc_nonzero(z);
}

GreenCheck green_residual(cplx z, double sprime, int grid_n) {
  if (!(sprime > 0.0 && sprime < 1.0)) throw DomainError("green_residual: s' must lie in (0, 1)");
  if (grid_n < 4) throw ConfigError("green_residual: grid_n must be >= 4");
  const double h = 1.0 / grid_n;
  const double pos = sprime * grid_n;
  const long jp = std::lround(pos);
  if (std::abs(pos - jp) > 1e-9 || jp < 2 || jp > grid_n - 2)
    throw ConfigError("green_residual: s' must be an interior grid node");
  std::vector<cplx> k(grid_n + 1);
  for (int i = 0; i <= grid_n; ++i) k[i] = green_function(z, i * h, sprime);

  GreenCheck out;
  out.boundary_max = std::max(std::abs(k[0]), std::abs(k[grid_n]));
  const cplx z2 = z * z;
  for (int i = 1; i < grid_n; ++i) {
    if (i == jp) continue;
    const cplx r = -(k[i + 1] - 2.0 * k[i] + k[i - 1]) / (h * h) + z2 * k[i];
    out.max_residual = std::max(out.max_residual, std::abs(r));
  }
  const cplx left = (3.0 * k[jp] - 4.0 * k[jp - 1] + k[jp - 2]) / (2.0 * h);
  const cplx right = (-3.0 * k[jp] + 4.0 * k[jp + 1] - k[jp + 2]) / (2.0 * h);
  out.derivative_jump = right - left;
  return out;
}

void require_real_or_imaginary(cplx omega) {
  if (omega.real() != 0.0 && omega.imag() != 0.0) throw DomainError("omega must be real or purely imaginary");
}

PositivitySweep positivity_sweep(cplx omega, double radius, int n_max, int samples, std::uint64_t rng_seed) {
  require_real_or_imaginary(omega);
  if (n_max < 1 || samples < 1) throw ConfigError("positivity_sweep: need n_max >= 1 and samples >= 1");
  CounterRng rng(rng_seed);
  PositivitySweep out;
  out.min_real = std::numeric_limits<double>::infinity();
  std::vector<double> s;
  for (int i = 0; i < samples; ++i) {
    const int n = 1 + static_cast<int>(rng.uniform() * n_max);
    // uniform order statistics
    s.resize(n);
    for (auto& v : s) {
      do v = rng.uniform();
      while (v <= 0.0);
    }
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end()) continue;
    FrequencyTuple xi;
    xi.xi.assign(n, RVec(1));
    for (auto& v : xi.xi) v[0] = rng.normal();
    // radius biased towards the rim, argument over the closed right half-plane
    const double rho = radius * std::sqrt(rng.uniform());
    double phi = (rng.uniform() - 0.5) * pi;
    if (i % 16 == 0) phi = (i % 32 == 0) ? pi / 2 : -pi / 2;
    const cplx t = std::polar(rho, phi);
    if (rho == 0.0) continue;
    const cplx q = quadratic_form(omega, t, SimplexPoint(s), xi);
    const double scale = n * std::abs(t) * xi.sum_squares();
    ++out.samples;
    out.min_real = std::min(out.min_real, q.real());
    if (scale > 0.0) out.max_ratio = std::max(out.max_ratio, std::abs(q) / scale);
    if (q.real() < -tol_pos || std::abs(q) > (2.0 + tol_pos) * scale) ++out.violations;
  }
  return out;
}

double estimate_Td(cplx omega, int n_max, int samples, std::uint64_t rng_seed, double t_ceiling) {
  require_real_or_imaginary(omega);
  const double hi_cap = (omega == 0.0) ? t_ceiling : pi / (std::sqrt(2.0) * std::abs(omega));
  auto holds = [&](double radius) {
    return positivity_sweep(omega, radius, n_max, samples, rng_seed).violations == 0;
  };
  // the sweep excludes the rim itself, so the cap is admissible when it passes
  if (holds(hi_cap)) return hi_cap;
  double lo = 0.0, hi = hi_cap;
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid)) lo = mid;
    else hi = mid;
  }
  return lo;
}

} // namespace hk
