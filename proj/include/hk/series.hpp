#pragma once

#include <functional>
#include <limits>
#include <string>

#include "hk/measures.hpp"
#include "hk/quadrature.hpp"

namespace hk {

/// Everything needed to evaluate the deformation series for
///   d_t u = (d_x^2 - (w^2/4) x^2) u + c(x) u.
struct DeformationConfig {
  DiscreteMeasure measure;
  cplx omega = 0.0;
  int n_max = 4;
  /// Per-axis Gauss-Legendre order of the simplex rule.
  int quad_order = 12;
  /// Optional per-order override: quad_orders[n-1] is used for v_n when present.
  std::vector<int> quad_orders;
  /// Working radius T_c; evaluations require |t| < t_domain_radius.
  double t_domain_radius = std::numeric_limits<double>::infinity();
  /// v_sum flags its result when the factorial tail bound exceeds this.
  double tolerance = 1e-12;

  DeformationConfig(DiscreteMeasure m, cplx w = 0.0, int n = 4, int order = 12);

  int quad_order_for(int n) const;
  void validate() const;
};

/// min(T_d, delta_path/|w|) with T_d = pi / (sqrt 2 |w|); +inf at w = 0.
double default_domain_radius(cplx omega);

/// Atom tuples (j_1, ..., j_n) of one order with their time-ordered weight
/// products M_{j_n} ... M_{j_1}. Enumeration order is fixed (j_1 fastest).
struct TupleSet {
  int n = 0;
  std::vector<std::vector<int>> index;
  std::vector<Matrix> product;
  std::vector<RVec> total_xi;        // sum_k xi_{j_k}
  std::vector<char> zero_frequency;  // every xi_{j_k} = 0
};

/// Tuples whose weight product is exactly zero are dropped.
TupleSet make_tuples(const DiscreteMeasure& m, int n);

/// Per-tuple simplex integrals  int_simplex g(Q(s), e^{i q(s).xi}) ds  with
/// Q = Omega.xi(x)xi at (w, t) and q the classical path from y to x. Zero
/// frequency tuples are integrated exactly (integrand constant g(0, 1)).
/// Chunked reduction: bit-identical for any thread count.
using NodeKernel = std::function<cplx(cplx q, cplx phase)>;
std::vector<cplx> tuple_integrals(const DiscreteMeasure& m, const TupleSet& tuples, const SimplexRule& rule, cplx omega, cplx t,
                                  std::span<const cplx> x, std::span<const cplx> y, const NodeKernel& g);

/// Simplex rule for v_n at the configured order; an empty rule when every
/// tuple has zero frequency (no nodes are needed then).
const SimplexRule& simplex_rule_for(const TupleSet& tuples, const DeformationConfig& cfg);

/// e^w - sum_{k<m} w^k / k!  (equivalently w^m/(m-1)! int_0^1 (1-th)^{m-1} e^{th w} dth).
cplx exp_remainder(cplx w, int m);

/// sum_{k<m} w^k / k!.
cplx exp_partial(cplx w, int m);

/// t^n int_simplex sum_tuples e^{-Omega.xi(x)xi} e^{i q.xi} M_{j_n}...M_{j_1} ds.
Matrix v_term(int n, cplx t, std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg);

struct SeriesResult {
  Matrix value;
  std::vector<double> per_term_norms;  // |v_n|, n = 1..n_max
  double tail_bound = 0.0;             // sum_{n > n_max} (|t| A)^n / n!
  bool tail_warning = false;           // tail_bound > cfg.tolerance
};

/// 1 + sum_{n=1}^{n_max} v_n. A = exp_moment(mu, 0, 4 max(|x|, |y|)).
SeriesResult v_sum(cplx t, std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg);

/// Mehler kernel times v.
Matrix heat_kernel(cplx t, std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg);

/// Throws DomainError unless Re t >= 0, t != 0 and |t| < cfg.t_domain_radius.
void check_time_domain(cplx t, const DeformationConfig& cfg);

/// Truncated series at any t with |w t| < pi (no half-disk restriction).
/// Each v_n is analytic there; used for contour Taylor coefficients.
Matrix v_truncated(cplx t, std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg);

// ---------------------------------------------------------------------------
// Free case (w = 0): the node data (Omega-bar form, phase) does not depend on t
// or on the Borel variable, so it is tabulated once per (x, y).
// ---------------------------------------------------------------------------
class FreeCaseTable {
public:
  struct Block {
    int n = 0;
    Matrix product;
    RVec total_xi;
    std::vector<double> form;   // Omega-bar.xi(x)xi at each node
    std::vector<cplx> weight;   // quadrature weight times e^{i q_0.xi}
  };

  /// `keep`, when given, selects tuples by their total frequency.
  FreeCaseTable(const DeformationConfig& cfg, CVec x, CVec y,
                const std::function<bool(const RVec&)>& keep = {});

  const std::vector<Block>& blocks() const { return blocks_; }
  int d() const { return d_; }
  int n_max() const { return n_max_; }
  const CVec& x() const { return x_; }
  const CVec& y() const { return y_; }

  /// sum over nodes of weight * g(n, form), one entry per block.
  std::vector<cplx> integrate(const std::function<cplx(int n, double form)>& g) const;

  /// 1 (when with_identity) + sum_b scale(n_b) I_b M_b.
  Matrix combine(const std::vector<cplx>& integrals, const std::function<cplx(int n)>& scale,
                 bool with_identity = true) const;

  /// v(t) = 1 + sum_n t^n int e^{-t form} ... .
  Matrix value(cplx t) const;

  /// Taylor coefficients a_0 .. a_{r_max} of the (truncated) v at t = 0.
  std::vector<Matrix> taylor_coefficients(int r_max) const;

  /// Split v = f_r + g_r: f_r is the Taylor polynomial of degree r-1 and g_r
  /// the remainder, each evaluated without cancellation.
  std::pair<Matrix, Matrix> split(int r, cplx t) const;

private:
  int d_;
  int n_max_;
  CVec x_, y_;
  std::vector<Block> blocks_;
};

// ---------------------------------------------------------------------------
// Taylor coefficients and remainders.
// ---------------------------------------------------------------------------
struct TaylorResult {
  std::vector<Matrix> coeffs;                    // a_0 .. a_{r-1}
  std::vector<Matrix> remainders;                // R_r(t) at each sample
  std::string method;                            // "borel" or "contour"
};

/// w = 0: a_q from the Borel-plane coefficients of the node table, R_r = g_r.
/// w != 0: a_q by the trapezoid rule of the Cauchy integral on |t| = rho,
/// rho = min(1, pi/(2|w|)); R_r from the coefficient tail for |t| <= rho/2 and
/// by subtraction beyond.
TaylorResult taylor_and_remainder(int r, std::span<const cplx> t_samples, std::span<const cplx> x,
                                  std::span<const cplx> y, const DeformationConfig& cfg);

/// Contour coefficients a_0 .. a_{count-1}; n_points trapezoid nodes on |t| = rho.
std::vector<Matrix> contour_coefficients(std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg,
                                         int count, double rho, int n_points = 64);

/// Least-squares polynomial fit of v on the real ladder t_k = h0 q^k
/// (k < samples), degree `degree`, returning a_0 .. a_{r-1}.
struct FitResult {
  std::vector<Matrix> coeffs;
  double condition = 0.0;     // of the scaled Vandermonde matrix
  bool conditioning_warning = false;  // condition > 1e10
};
FitResult taylor_by_fit(int r, std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg,
                        double h0 = 0.05, int samples = 16, int degree = 0);

} // namespace hk
