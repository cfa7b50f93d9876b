#include "hk/measures.hpp"

#include <algorithm>
#include <cmath>

namespace hk {

DiscreteMeasure::DiscreteMeasure(int nu, int d, std::vector<Atom> atoms) : nu_(nu), d_(d), atoms_(std::move(atoms)) {
  if (nu < 1) throw ConfigError("measure: nu must be >= 1");
  if (d < 1) throw ConfigError("measure: d must be >= 1");
  norms_.reserve(atoms_.size());
  for (const auto& a : atoms_) {
    if (static_cast<int>(a.xi.size()) != nu) throw ConfigError("measure: atom frequency has wrong dimension");
    if (a.weight.rows() != d || a.weight.cols() != d) throw ConfigError("measure: atom weight must be d x d");
    for (double v : a.xi)
      if (!std::isfinite(v)) throw ConfigError("measure: non-finite atom frequency");
    if (!a.weight.allFinite()) throw ConfigError("measure: non-finite atom weight");
    norms_.push_back(opnorm(a.weight));
  }
}

double DiscreteMeasure::total_variation() const {
  double s = 0.0;
  for (double n : norms_) s += n;
  return s;
}

Matrix eval_potential(const DiscreteMeasure& m, std::span<const cplx> x) {
  if (static_cast<int>(x.size()) != m.nu()) throw ConfigError("eval_potential: x has wrong dimension");
  Matrix c = Matrix::Zero(m.d(), m.d());
  for (const auto& a : m.atoms()) c += std::exp(cplx(0.0, 1.0) * dot(x, std::span<const double>(a.xi))) * a.weight;
  return c;
}

double exp_moment(const DiscreteMeasure& m, double eps, double r) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.atoms().size(); ++j) {
    const auto& xi = m.atoms()[j].xi;
    const double xi2 = dot(std::span<const double>(xi), std::span<const double>(xi));
    s += std::exp(eps * xi2 + r * std::sqrt(xi2)) * m.weight_norms()[j];
  }
  return s;
}

// ---------------------------------------------------------------------------

TorusPotential::TorusPotential(int nu, int d, std::map<Frequency, Matrix> coeffs)
    : nu_(nu), d_(d), coeffs_(std::move(coeffs)) {
  if (nu < 1 || d < 1) throw ConfigError("torus potential: nu and d must be >= 1");
  for (const auto& [q, c] : coeffs_) {
    if (static_cast<int>(q.size()) != nu) throw ConfigError("torus potential: frequency has wrong dimension");
    if (c.rows() != d || c.cols() != d) throw ConfigError("torus potential: coefficient must be d x d");
  }
}

int TorusPotential::max_frequency() const {
  int m = 0;
  for (const auto& [q, c] : coeffs_)
    for (int v : q) m = std::max(m, std::abs(v));
  return m;
}

double TorusPotential::hermitian_defect() const {
  double defect = 0.0;
  for (const auto& [q, c] : coeffs_) {
    Frequency mq(q.size());
    std::transform(q.begin(), q.end(), mq.begin(), [](int v) { return -v; });
    auto it = coeffs_.find(mq);
    const Matrix partner = (it == coeffs_.end()) ? Matrix::Zero(d_, d_) : it->second;
    defect = std::max(defect, opnorm(partner - c.adjoint()));
  }
  return defect;
}

double TorusPotential::sup_bound() const {
  double s = 0.0;
  for (const auto& [q, c] : coeffs_) s += opnorm(c);
  return s;
}

DiscreteMeasure measure_from_fourier_coeffs(const TorusPotential& p) {
  double scale = 0.0;
  for (const auto& [q, c] : p.coeffs()) scale = std::max(scale, opnorm(c));
  if (p.hermitian_defect() > 1e-12 * std::max(scale, 1.0))
    throw ConfigError("torus potential violates c_{-q} = c_q^*");
  std::vector<Atom> atoms;
  for (const auto& [q, c] : p.coeffs()) {
    RVec xi(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) xi[k] = 2.0 * pi * q[k];
    atoms.push_back({std::move(xi), c});
  }
  return DiscreteMeasure(p.nu(), p.d(), std::move(atoms));
}

// ---------------------------------------------------------------------------

Matrix matrix_from_json(const nlohmann::json& re, const nlohmann::json* im, int d) {
  auto read = [d](const nlohmann::json& j, const char* what) {
    Eigen::MatrixXd m(d, d);
    if (d == 1 && j.is_number()) {
      m(0, 0) = j.get<double>();
      return m;
    }
    if (!j.is_array() || static_cast<int>(j.size()) != d)
      throw ConfigError(std::string("matrix '") + what + "' must be a d x d array");
    for (int r = 0; r < d; ++r) {
      const auto& row = j[r];
      if (!row.is_array() || static_cast<int>(row.size()) != d)
        throw ConfigError(std::string("matrix '") + what + "' must be a d x d array");
      for (int c = 0; c < d; ++c) {
        if (!row[c].is_number()) throw ConfigError(std::string("matrix '") + what + "' has a non-numeric entry");
        m(r, c) = row[c].get<double>();
      }
    }
    return m;
  };
  Matrix out = read(re, "re").cast<cplx>();
  if (im) out += cplx(0.0, 1.0) * read(*im, "im").cast<cplx>();
  return out;
}

namespace {

int require_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) throw ConfigError(std::string("missing integer field '") + key + "'");
  return j[key].get<int>();
}

nlohmann::json matrix_part_to_json(const Matrix& m, bool imag) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(imag ? m(r, c).imag() : m(r, c).real());
    rows.push_back(row);
  }
  return rows;
}

} // namespace

DiscreteMeasure measure_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("measure must be a JSON object");
  const int nu = require_int(j, "nu");
  const int d = require_int(j, "d");
  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    if (!j["atoms"].is_array()) throw ConfigError("'atoms' must be an array");
    for (const auto& a : j["atoms"]) {
      if (!a.contains("xi") || !a["xi"].is_array()) throw ConfigError("atom needs an 'xi' array");
      if (!a.contains("re")) throw ConfigError("atom needs an 're' weight");
      RVec xi;
      for (const auto& v : a["xi"]) {
        if (!v.is_number()) throw ConfigError("atom 'xi' must be numeric");
        xi.push_back(v.get<double>());
      }
      const nlohmann::json* im = a.contains("im") ? &a["im"] : nullptr;
      atoms.push_back({std::move(xi), matrix_from_json(a["re"], im, d)});
    }
  }
  return DiscreteMeasure(nu, d, std::move(atoms));
}

nlohmann::json measure_to_json(const DiscreteMeasure& m) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : m.atoms())
    atoms.push_back({{"xi", a.xi}, {"re", matrix_part_to_json(a.weight, false)}, {"im", matrix_part_to_json(a.weight, true)}});
  return {{"nu", m.nu()}, {"d", m.d()}, {"atoms", atoms}};
}

TorusPotential torus_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("torus potential must be a JSON object");
  const int nu = require_int(j, "nu");
  const int d = require_int(j, "d");
  std::map<Frequency, Matrix> coeffs;
  if (j.contains("coeffs")) {
    if (!j["coeffs"].is_array()) throw ConfigError("'coeffs' must be an array");
    for (const auto& c : j["coeffs"]) {
      if (!c.contains("q") || !c["q"].is_array()) throw ConfigError("coefficient needs an integer 'q' array");
      if (!c.contains("re")) throw ConfigError("coefficient needs an 're' weight");
      Frequency q;
      for (const auto& v : c["q"]) {
        if (!v.is_number_integer()) throw ConfigError("'q' entries must be integers");
        q.push_back(v.get<int>());
      }
      const nlohmann::json* im = c.contains("im") ? &c["im"] : nullptr;
      Matrix w = matrix_from_json(c["re"], im, d);
      auto [it, inserted] = coeffs.emplace(q, w);
      if (!inserted) it->second += w;
    }
  }
  return TorusPotential(nu, d, std::move(coeffs));
}

nlohmann::json torus_to_json(const TorusPotential& p) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& [q, c] : p.coeffs())
    coeffs.push_back({{"q", q}, {"re", matrix_part_to_json(c, false)}, {"im", matrix_part_to_json(c, true)}});
  return {{"nu", p.nu()}, {"d", p.d()}, {"coeffs", coeffs}};
}

} // namespace hk
