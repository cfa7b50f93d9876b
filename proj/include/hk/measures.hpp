#pragma once

#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "hk/common.hpp"

namespace hk {

/// One atom xi of the measure with its d x d matrix weight M.
struct Atom {
  RVec xi;
  Matrix weight;
};

/// Finite matrix-valued atomic measure mu = sum_j M_j delta_{xi_j}, describing
/// the potential c(x) = sum_j exp(i x.xi_j) M_j. An empty atom list is the zero
/// measure. Atoms are kept in insertion order and never merged.
class DiscreteMeasure {
public:
  DiscreteMeasure(int nu, int d, std::vector<Atom> atoms = {});

  static DiscreteMeasure zero(int nu, int d) { return DiscreteMeasure(nu, d); }

  int nu() const { return nu_; }
  int d() const { return d_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  bool is_zero() const { return atoms_.empty(); }

  /// Operator 2-norm |M_j| of each weight, cached at construction.
  const std::vector<double>& weight_norms() const { return norms_; }

  /// sum_j |M_j|.
  double total_variation() const;

private:
  int nu_;
  int d_;
  std::vector<Atom> atoms_;
  std::vector<double> norms_;
};

/// c(x) = sum_j exp(i x.xi_j) M_j, bilinear dot product, x complex.
Matrix eval_potential(const DiscreteMeasure& m, std::span<const cplx> x);

/// sum_j exp(eps xi_j^2 + r |xi_j|) |M_j|.
double exp_moment(const DiscreteMeasure& m, double eps, double r);

/// Integer frequency vector of a torus Fourier coefficient.
using Frequency = std::vector<int>;

/// c(x) = sum_q c_q exp(2 i pi q.x) on (R/Z)^nu with c_{-q} = c_q^*.
class TorusPotential {
public:
  TorusPotential(int nu, int d, std::map<Frequency, Matrix> coeffs);

  int nu() const { return nu_; }
  int d() const { return d_; }
  const std::map<Frequency, Matrix>& coeffs() const { return coeffs_; }

  /// max_k |q_k| over the support; 0 for the zero potential.
  int max_frequency() const;

  /// Largest deviation ||c_{-q} - c_q^*|| over the support.
  double hermitian_defect() const;

  /// sum_q |c_q|, an upper bound of sup_x ||c(x)||.
  double sup_bound() const;

private:
  int nu_;
  int d_;
  std::map<Frequency, Matrix> coeffs_;
};

/// Atoms at 2 pi q with weights c_q. Throws ConfigError unless the coefficients
/// satisfy c_{-q} = c_q^* to 1e-12 (relative to the largest coefficient).
DiscreteMeasure measure_from_fourier_coeffs(const TorusPotential& p);

// JSON forms:
//   {"nu":1,"d":1,"atoms":[{"xi":[1.0],"re":[[0.5]],"im":[[0.0]]}, ...]}
//   {"nu":1,"d":1,"coeffs":[{"q":[1],"re":[[0.1]],"im":[[0.0]]}, ...]}
// "im" may be omitted for real weights.
DiscreteMeasure measure_from_json(const nlohmann::json& j);
nlohmann::json measure_to_json(const DiscreteMeasure& m);
TorusPotential torus_from_json(const nlohmann::json& j);
nlohmann::json torus_to_json(const TorusPotential& p);

Matrix matrix_from_json(const nlohmann::json& re, const nlohmann::json* im, int d);

} // namespace hk
