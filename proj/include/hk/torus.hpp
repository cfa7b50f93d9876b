#pragma once

#include <nlohmann/json.hpp>

#include "hk/borel.hpp"

namespace hk {

/// Galerkin spectrum of H = -d_x^2 - c(x) on (R/Z)^nu in the plane-wave basis
/// k in {-cutoff..cutoff}^nu.
struct TorusSpectrum {
  std::vector<double> eigenvalues;  // ascending, d (2 cutoff + 1)^nu entries
  int cutoff = 0;
  int d = 0;
  int nu = 0;
  double sup_bound = 0.0;           // sum_q |c_q| >= sup_x |c(x)|
};

TorusSpectrum galerkin_spectrum(const TorusPotential& p, int cutoff);

struct TraceResult {
  cplx value;
  double tail_bound = 0.0;  // modes beyond the cutoff
  bool tail_warning = false;
};

/// sum_n e^{-lambda_n t} over the computed eigenvalues, with the tail
/// d sum_{|k|_inf > cutoff} e^{-(4 pi^2 k^2 - |c|) Re t}.
TraceResult trace_direct(const TorusSpectrum& spec, cplx t, double tol = 1e-12);

/// Free-case config for the torus: atoms at 2 pi q with weights c_q.
DeformationConfig torus_config(const TorusPotential& p, int n_max, int quad_order = 12);

/// w^(q, tau) = int_{[0,1]^nu} Tr v^(tau, x, x + q) dx by the uniform trapezoid
/// rule with x_points per axis. The x dependence of every tuple is the factor
/// e^{i x.sum xi}, so the rule is applied to it in closed form and tuples whose
/// factor vanishes are dropped.
class WHat {
public:
  WHat(const DeformationConfig& cfg, Frequency q, int x_points);
  cplx operator()(cplx tau) const;
  const Frequency& q() const { return q_; }

private:
  std::shared_ptr<const FreeCaseTable> table_;
  std::vector<cplx> block_scale_;  // trapezoid x factor times trace of the weight product
  int d_;
  Frequency q_;
};

cplx w_hat(const Frequency& q, cplx tau, const DeformationConfig& cfg, int x_points);

struct PoissonTerm {
  Frequency q;
  cplx laplace;     // int_0^inf e^{-tau/t} w^(q, tau) dtau / t
  cplx weighted;    // (4 pi t)^{-nu/2} e^{-q^2/(4t)} laplace
  std::vector<std::pair<double, cplx>> w_hat_samples;
};

struct PoissonResult {
  cplx value;
  int q_max = 0;
  double tail_bound = 0.0;   // geodesics |q|_inf > q_max
  bool tail_warning = false;
  std::vector<PoissonTerm> terms;
};

/// (4 pi t)^{-nu/2} sum_{|q|_inf <= q_max} e^{-q^2/(4t)} Laplace[w^(q, .)](t).
/// q_max <= 0 selects the smallest Q with e^{-Q^2 Re(1/t)/4} < tol/10.
/// x_points defaults to 2 cutoff + 1 with cutoff = n_max * max frequency.
PoissonResult poisson_trace(cplx t, const TorusPotential& p, const DeformationConfig& cfg, int q_max, double tol,
                            int x_points = 0);

nlohmann::json spectrum_to_json(const TorusSpectrum& s);

} // namespace hk
