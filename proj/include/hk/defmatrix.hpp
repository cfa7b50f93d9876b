#pragma once

#include <cstdint>

#include "hk/common.hpp"

namespace hk {

/// Positivity tolerance for the deformation-matrix quadratic form.
inline constexpr double tol_pos = 1e-12;

/// Ordered interaction times 0 < s_1 < ... < s_n < 1.
class SimplexPoint {
public:
  explicit SimplexPoint(std::vector<double> s);
  std::size_t size() const { return s_.size(); }
  double operator[](std::size_t k) const { return s_[k]; }
  std::span<const double> values() const { return s_; }

private:
  std::vector<double> s_;
};

/// Frequencies xi_1, ..., xi_n, each a real nu-vector.
struct FrequencyTuple {
  std::vector<RVec> xi;
  std::size_t size() const { return xi.size(); }
  double sum_squares() const;
};

/// Entry sh(w t s_min) sh(w t (1 - s_max)) / (w sh(w t)) of the deformation
/// matrix, s_min = min(sj, sk), s_max = max(sj, sk). Evaluated as
///   t s_min (1 - s_max) shc(a s_min) shc(a (1 - s_max)) / shc(a),  a = w t,
/// which reduces to t s_min (1 - s_max) at w = 0. Throws PoleError when
/// sh(a) = 0 with a != 0.
cplx omega_entry(cplx omega, cplx t, double sj, double sk);

/// Full n x n deformation matrix for the given times.
Matrix omega_matrix(cplx omega, cplx t, std::span<const double> s);

/// sum_{j,k} Omega_jk xi_j.xi_k.
cplx quadratic_form(cplx omega, cplx t, const SimplexPoint& s, const FrequencyTuple& xi);

/// Sine-series evaluation of (mu, mu)_z for mu = sum_j xi_j delta_{s_j}:
///   sum_{m=1}^{n_modes} 2 / (m^2 pi^2 + z^2) |sum_j sin(m pi s_j) xi_j|^2.
/// Requires |z| < pi.
cplx spectral_qf_oracle(cplx z, const SimplexPoint& s, const FrequencyTuple& xi, int n_modes);

/// Bound on the modes beyond n_modes dropped by spectral_qf_oracle.
double spectral_qf_tail_bound(cplx z, const FrequencyTuple& xi, int n_modes);

/// Finite-difference check of the Green's function
///   -K'' + z^2 K = delta_{s'},  K(0) = K(1) = 0.
struct GreenCheck {
  double max_residual = 0.0;  // interior second-difference residual, s != s'
  cplx derivative_jump;       // K'(s'+) - K'(s'-) from one-sided 2nd-order stencils
  double boundary_max = 0.0;  // max(|K(0)|, |K(1)|)
};

/// Grid of grid_n intervals on [0, 1]; s' must fall on a node.
GreenCheck green_residual(cplx z, double sprime, int grid_n);

/// Closed-form Green's function sh(z s<) sh(z (1 - s>)) / (z sh z).
cplx green_function(cplx z, double s, double sprime);

/// Empirical radius T below which Re(Omega.xi(x)xi) >= -tol_pos and
/// |Omega.xi(x)xi| <= (2 + tol_pos) n |t| sum xi_j^2 held on every sampled
/// (n, s, xi, t), Re t >= 0, |t| < T. The search is capped at pi/(sqrt 2 |w|)
/// for w != 0 and at t_ceiling for w = 0. Deterministic for a given seed.
double estimate_Td(cplx omega, int n_max, int samples, std::uint64_t rng_seed, double t_ceiling = 10.0);

/// One sweep of the sampling used by estimate_Td at a fixed radius.
struct PositivitySweep {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double min_real = 0.0;   // min Re(Omega.xi(x)xi)
  double max_ratio = 0.0;  // max |Omega.xi(x)xi| / (n |t| sum xi^2)
};
PositivitySweep positivity_sweep(cplx omega, double radius, int n_max, int samples, std::uint64_t rng_seed);

/// Throws DomainError unless omega is real or purely imaginary.
void require_real_or_imaginary(cplx omega);

} // namespace hk
