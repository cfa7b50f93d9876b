#include "hk/series.hpp"

#include <algorithm>
#include <cmath>

#include "hk/defmatrix.hpp"
#include "hk/mehler.hpp"

namespace hk {

namespace {

constexpr std::size_t kChunk = 1024;

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void check_points(std::span<const cplx> x, std::span<const cplx> y, int nu, const char* what) {
  if (static_cast<int>(x.size()) != nu || static_cast<int>(y.size()) != nu)
    throw ConfigError(std::string(what) + ": x and y must have dimension nu");
}

// Per-node path coefficients: A_k = s_k shc(a s_k), B_k = (1 - s_k) shc(a (1 - s_k)),
// so that Omega_jk = t A_j B_k / shc(a) (j <= k) and q(s_k) = (A_k x + B_k y) / shc(a).
struct PathCoefficients {
  bool free;
  cplx a;
  void operator()(const double* s, int n, cplx* A, cplx* B) const {
    for (int k = 0; k < n; ++k) {
      if (free) {
        A[k] = s[k];
        B[k] = 1.0 - s[k];
      } else {
        A[k] = s[k] * shc(a * s[k]);
        B[k] = (1.0 - s[k]) * shc(a * (1.0 - s[k]));
      }
    }
  }
};

// Gram matrices and projections of the non-trivial tuples.
struct TupleGeometry {
  std::vector<std::size_t> active;   // tuple indices with non-zero frequency
  std::vector<double> gram;          // n*n per active tuple, already doubled off-diagonal
  std::vector<cplx> xproj, yproj;    // n per active tuple: x.xi_{j_k}, y.xi_{j_k}

  TupleGeometry(const TupleSet& tuples, const DiscreteMeasure& m, std::span<const cplx> x,
                std::span<const cplx> y, const std::vector<char>* mask = nullptr) {
    const int n = tuples.n;
    const auto& atoms = m.atoms();
    for (std::size_t i = 0; i < tuples.index.size(); ++i) {
      if (tuples.zero_frequency[i]) continue;
      if (mask && !(*mask)[i]) continue;
      active.push_back(i);
      const auto& idx = tuples.index[i];
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double g = dot(std::span<const double>(atoms[idx[j]].xi), std::span<const double>(atoms[idx[k]].xi));
          gram.push_back(j == k ? g : (j < k ? 2.0 * g : 0.0));
        }
      for (int k = 0; k < n; ++k) {
        xproj.push_back(dot(x, std::span<const double>(atoms[idx[k]].xi)));
        yproj.push_back(dot(y, std::span<const double>(atoms[idx[k]].xi)));
      }
    }
  }

  // Returns (sum_{j<=k} gram_jk A_j B_k, sum_k A_k x.xi_k + B_k y.xi_k) for active tuple a.
  std::pair<cplx, cplx> eval(std::size_t a, int n, const cplx* A, const cplx* B) const {
    const double* g = gram.data() + a * n * n;
    const cplx* xp = xproj.data() + a * n;
    const cplx* yp = yproj.data() + a * n;
    cplx q = 0.0, ph = 0.0;
    for (int j = 0; j < n; ++j) {
      cplx row = 0.0;
      for (int k = j; k < n; ++k) row += g[j * n + k] * B[k];
      q += A[j] * row;
      ph += A[j] * xp[j] + B[j] * yp[j];
    }
    return {q, ph};
  }
};

} // namespace

// ---------------------------------------------------------------------------

DeformationConfig::DeformationConfig(DiscreteMeasure m, cplx w, int n, int order)
    : measure(std::move(m)), omega(w), n_max(n), quad_order(order), t_domain_radius(default_domain_radius(w)) {}

int DeformationConfig::quad_order_for(int n) const {
  if (n >= 1 && static_cast<std::size_t>(n) <= quad_orders.size()) return quad_orders[n - 1];
  return quad_order;
}

void DeformationConfig::validate() const {
  require_real_or_imaginary(omega);
  if (n_max < 0) throw ConfigError("n_max must be >= 0");
  if (quad_order < 1) throw ConfigError("quad_order must be >= 1");
  for (int q : quad_orders)
    if (q < 1) throw ConfigError("quad_orders entries must be >= 1");
  if (!(t_domain_radius > 0.0)) throw ConfigError("t_domain_radius must be positive");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
}

double default_domain_radius(cplx omega) {
  const double w = std::abs(omega);
  if (w == 0.0) return std::numeric_limits<double>::infinity();
  return std::min(pi / (std::sqrt(2.0) * w), delta_path / w);
}

TupleSet make_tuples(const DiscreteMeasure& m, int n) {
  TupleSet ts;
  ts.n = n;
  const int J = static_cast<int>(m.atoms().size());
  if (J == 0 || n < 1) return ts;
  const int nu = m.nu();
  std::vector<int> idx(n, 0);
  for (;;) {
    Matrix prod = m.atoms()[idx[0]].weight;
    for (int k = 1; k < n; ++k) prod = m.atoms()[idx[k]].weight * prod;
    if (!prod.isZero(0.0)) {
      RVec total(nu, 0.0);
      bool zero = true;
      for (int k = 0; k < n; ++k)
        for (int c = 0; c < nu; ++c) {
          const double v = m.atoms()[idx[k]].xi[c];
          total[c] += v;
          if (v != 0.0) zero = false;
        }
      ts.index.push_back(idx);
      ts.product.push_back(std::move(prod));
      ts.total_xi.push_back(std::move(total));
      ts.zero_frequency.push_back(zero ? 1 : 0);
    }
    int k = 0;
    while (k < n && ++idx[k] == J) idx[k++] = 0;
    if (k == n) break;
  }
  return ts;
}

std::vector<cplx> tuple_integrals(const DiscreteMeasure& m, const TupleSet& tuples, const SimplexRule& rule,
                                  cplx omega, cplx t, std::span<const cplx> x, std::span<const cplx> y,
                                  const NodeKernel& g) {
  const int n = tuples.n;
  std::vector<cplx> out(tuples.index.size(), 0.0);
  const cplx exact = g(0.0, 1.0) / factorial(n);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (tuples.zero_frequency[i]) out[i] = exact;

  const TupleGeometry geo(tuples, m, x, y);
  if (geo.active.empty()) return out;
  check_cost(static_cast<double>(rule.size()) * static_cast<double>(geo.active.size()), "tuple_integrals");

  const cplx a = omega * t;
  const bool free = omega == 0.0;
  const cplx den = free ? cplx(1.0) : shc_nonzero(a);
  const cplx qscale = t / den;
  const PathCoefficients path{free, a};
  const std::size_t n_active = geo.active.size();
  const std::size_t n_chunks = (rule.size() + kChunk - 1) / kChunk;
  std::vector<cplx> partial(n_chunks * n_active, 0.0);
  parallel_chunks(n_chunks, [&](std::size_t c) {
    std::vector<cplx> A(n), B(n);
    cplx* acc = partial.data() + c * n_active;
    const std::size_t end = std::min(rule.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      path(rule.node(i), n, A.data(), B.data());
      const double w = rule.weights[i];
      for (std::size_t k = 0; k < n_active; ++k) {
        const auto [q, ph] = geo.eval(k, n, A.data(), B.data());
        acc[k] += w * g(qscale * q, std::exp(cplx(0.0, 1.0) * ph / den));
      }
    }
  });
  for (std::size_t c = 0; c < n_chunks; ++c)
    for (std::size_t k = 0; k < n_active; ++k) out[geo.active[k]] += partial[c * n_active + k];
  return out;
}


const SimplexRule& simplex_rule_for(const TupleSet& tuples, const DeformationConfig& cfg) {
  static const SimplexRule empty{};
  const bool any = std::any_of(tuples.zero_frequency.begin(), tuples.zero_frequency.end(), [](char z) { return !z; });
  if (!any) return empty;
  return *simplex_rule(tuples.n, cfg.quad_order_for(tuples.n));
}

// ---------------------------------------------------------------------------

cplx exp_partial(cplx w, int m) {
  cplx sum = 0.0, term = 1.0;
  for (int k = 0; k < m; ++k) {
    sum += term;
    term *= w / static_cast<double>(k + 1);
  }
  return sum;
}

cplx exp_remainder(cplx w, int m) {
  if (m <= 0) return std::exp(w);
  if (std::abs(w) >= m + 2.0) return std::exp(w) - exp_partial(w, m);
  // w^m / m! * sum_k w^k m! / (m + k)!
  cplx lead = 1.0;
  for (int k = 1; k <= m; ++k) lead *= w / static_cast<double>(k);
  cplx sum = 0.0, term = 1.0;
  for (int k = 0; k < 400; ++k) {
    sum += term;
    term *= w / static_cast<double>(m + k + 1);
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return lead * sum;
}

// ---------------------------------------------------------------------------

void check_time_domain(cplx t, const DeformationConfig& cfg) {
  if (t == 0.0) throw DomainError("t = 0");
  if (t.real() < 0.0) throw DomainError("Re t < 0");
  if (!(std::abs(t) < cfg.t_domain_radius))
    throw DomainError("|t| = " + std::to_string(std::abs(t)) + " outside the working radius " +
                      std::to_string(cfg.t_domain_radius));
}

namespace {

Matrix v_term_raw(int n, cplx t, std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg) {
  const auto tuples = make_tuples(cfg.measure, n);
  const auto ints = tuple_integrals(cfg.measure, tuples, simplex_rule_for(tuples, cfg), cfg.omega, t, x, y,
                                    [](cplx q, cplx ph) { return std::exp(-q) * ph; });
  Matrix acc = Matrix::Zero(cfg.measure.d(), cfg.measure.d());
  for (std::size_t i = 0; i < ints.size(); ++i) acc += ints[i] * tuples.product[i];
  return ipow(t, n) * acc;
}

} // namespace

Matrix v_term(int n, cplx t, std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg) {
  cfg.validate();
  if (n < 1) throw ConfigError("v_term: n must be >= 1");
  check_points(x, y, cfg.measure.nu(), "v_term");
  check_time_domain(t, cfg);
  return v_term_raw(n, t, x, y, cfg);
}

SeriesResult v_sum(cplx t, std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg) {
  cfg.validate();
  check_points(x, y, cfg.measure.nu(), "v_sum");
  check_time_domain(t, cfg);
  SeriesResult r;
  const int d = cfg.measure.d();
  r.value = Matrix::Identity(d, d);
  for (int n = 1; n <= cfg.n_max; ++n) {
    const Matrix vn = v_term_raw(n, t, x, y, cfg);
    r.per_term_norms.push_back(opnorm(vn));
    r.value += vn;
  }
  const double R = 4.0 * std::max(modulus(x), modulus(y));
  const double A = exp_moment(cfg.measure, 0.0, R);
  r.tail_bound = std::abs(exp_remainder(std::abs(t) * A, cfg.n_max + 1));
  r.tail_warning = r.tail_bound > cfg.tolerance;
  return r;
}

Matrix heat_kernel(cplx t, std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg) {
  const auto v = v_sum(t, x, y, cfg);
  const KernelPoint p{t, CVec(x.begin(), x.end()), CVec(y.begin(), y.end()), cfg.omega};
  return mehler_kernel(p) * v.value;
}

Matrix v_truncated(cplx t, std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg) {
  cfg.validate();
  check_points(x, y, cfg.measure.nu(), "v_truncated");
  if (std::abs(cfg.omega * t) >= pi) throw DomainError("v_truncated: requires |w t| < pi");
  const int d = cfg.measure.d();
  Matrix v = Matrix::Identity(d, d);
  if (t == 0.0) return v;
  for (int n = 1; n <= cfg.n_max; ++n) v += v_term_raw(n, t, x, y, cfg);
  return v;
}

// ---------------------------------------------------------------------------

FreeCaseTable::FreeCaseTable(const DeformationConfig& cfg, CVec x, CVec y,
                             const std::function<bool(const RVec&)>& keep)
    : d_(cfg.measure.d()), n_max_(cfg.n_max), x_(std::move(x)), y_(std::move(y)) {
  cfg.validate();
  if (cfg.omega != 0.0) throw ConfigError("FreeCaseTable: requires omega = 0");
  check_points(x_, y_, cfg.measure.nu(), "FreeCaseTable");
  double stored = 0.0;
  for (int n = 1; n <= n_max_; ++n) {
    const auto tuples = make_tuples(cfg.measure, n);
    std::vector<char> mask(tuples.index.size(), 1);
    if (keep)
      for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = keep(tuples.total_xi[i]) ? 1 : 0;
    // Zero-frequency tuples: a single node of weight 1/n! and form 0.
    for (std::size_t i = 0; i < tuples.index.size(); ++i) {
      if (!mask[i] || !tuples.zero_frequency[i]) continue;
      blocks_.push_back({n, tuples.product[i], tuples.total_xi[i], {0.0}, {1.0 / factorial(n)}});
    }
    const TupleGeometry geo(tuples, cfg.measure, x_, y_, &mask);
    if (geo.active.empty()) continue;
    const auto rule = simplex_rule(n, cfg.quad_order_for(n));
    stored += static_cast<double>(rule->size()) * static_cast<double>(geo.active.size());
    check_cost(stored * 1000.0, "FreeCaseTable");
    const std::size_t first = blocks_.size();
    for (std::size_t k : geo.active) {
      Block b{n, tuples.product[k], tuples.total_xi[k], std::vector<double>(rule->size()),
              std::vector<cplx>(rule->size())};
      blocks_.push_back(std::move(b));
    }
    const std::size_t n_chunks = (rule->size() + kChunk - 1) / kChunk;
    const PathCoefficients path{true, 0.0};
    parallel_chunks(n_chunks, [&](std::size_t c) {
      std::vector<cplx> A(n), B(n);
      const std::size_t end = std::min(rule->size(), (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) {
        path(rule->node(i), n, A.data(), B.data());
        for (std::size_t k = 0; k < geo.active.size(); ++k) {
          const auto [q, ph] = geo.eval(k, n, A.data(), B.data());
          blocks_[first + k].form[i] = q.real();
          blocks_[first + k].weight[i] = rule->weights[i] * std::exp(cplx(0.0, 1.0) * ph);
        }
      }
    });
  }
}

std::vector<cplx> FreeCaseTable::integrate(const std::function<cplx(int n, double form)>& g) const {
  // One chunk per (block, node range); reduced per block in chunk order.
  std::vector<std::pair<std::size_t, std::size_t>> chunks;
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    for (std::size_t s = 0; s < blocks_[b].form.size(); s += kChunk) chunks.emplace_back(b, s);
  std::vector<cplx> partial(chunks.size(), 0.0);
  parallel_chunks(chunks.size(), [&](std::size_t c) {
    const auto [b, s] = chunks[c];
    const Block& blk = blocks_[b];
    const std::size_t end = std::min(blk.form.size(), s + kChunk);
    cplx acc = 0.0;
    for (std::size_t i = s; i < end; ++i) acc += blk.weight[i] * g(blk.n, blk.form[i]);
    partial[c] = acc;
  });
  std::vector<cplx> out(blocks_.size(), 0.0);
  for (std::size_t c = 0; c < chunks.size(); ++c) out[chunks[c].first] += partial[c];
  return out;
}

Matrix FreeCaseTable::combine(const std::vector<cplx>& integrals, const std::function<cplx(int n)>& scale,
                              bool with_identity) const {
  Matrix m = Matrix::Zero(d_, d_);
  if (with_identity) m.setIdentity();
  for (std::size_t b = 0; b < blocks_.size(); ++b) m += (scale(blocks_[b].n) * integrals[b]) * blocks_[b].product;
  return m;
}

Matrix FreeCaseTable::value(cplx t) const {
  const auto ints = integrate([t](int, double f) { return std::exp(-t * f); });
  return combine(ints, [t](int n) { return ipow(t, n); });
}

std::vector<Matrix> FreeCaseTable::taylor_coefficients(int r_max) const {
  if (r_max < 0) return {};
  // Moments mu_{b,m} = sum_i w_i (-form_i)^m / m!, m = 0 .. r_max - 1.
  const int m_count = std::max(r_max, 1);
  std::vector<std::vector<cplx>> mom(blocks_.size(), std::vector<cplx>(m_count, 0.0));
  parallel_chunks(blocks_.size(), [&](std::size_t b) {
    const Block& blk = blocks_[b];
    for (std::size_t i = 0; i < blk.form.size(); ++i) {
      cplx p = blk.weight[i];
      for (int m = 0; m < m_count; ++m) {
        mom[b][m] += p;
        p *= -blk.form[i] / static_cast<double>(m + 1);
      }
    }
  });
  std::vector<Matrix> a(r_max + 1, Matrix::Zero(d_, d_));
  a[0] = Matrix::Identity(d_, d_);
  for (std::size_t b = 0; b < blocks_.size(); ++b)
    for (int r = blocks_[b].n; r <= r_max; ++r) a[r] += mom[b][r - blocks_[b].n] * blocks_[b].product;
  return a;
}

std::pair<Matrix, Matrix> FreeCaseTable::split(int r, cplx t) const {
  if (r < 1) throw ConfigError("split: r must be >= 1");
  const auto head = integrate([t, r](int n, double f) { return n < r ? exp_partial(-t * f, r - n) : cplx(0.0); });
  const auto tail = integrate([t, r](int n, double f) {
    return n < r ? exp_remainder(-t * f, r - n) : std::exp(-t * f);
  });
  const auto scale = [t](int n) { return ipow(t, n); };
  return {combine(head, scale, true), combine(tail, scale, false)};
}

// ---------------------------------------------------------------------------

std::vector<Matrix> contour_coefficients(std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg,
                                         int count, double rho, int n_points) {
  if (count < 1 || n_points < count) throw ConfigError("contour_coefficients: need 1 <= count <= n_points");
  if (!(rho > 0.0)) throw ConfigError("contour_coefficients: rho must be positive");
  const int d = cfg.measure.d();
  std::vector<Matrix> values(n_points);
  for (int k = 0; k < n_points; ++k) {
    const cplx t = std::polar(rho, 2.0 * pi * k / n_points);
    values[k] = v_truncated(t, x, y, cfg);
  }
  std::vector<Matrix> a(count, Matrix::Zero(d, d));
  for (int q = 0; q < count; ++q) {
    for (int k = 0; k < n_points; ++k) a[q] += std::polar(1.0, -2.0 * pi * double(k) * q / n_points) * values[k];
    a[q] /= static_cast<double>(n_points) * std::pow(rho, q);
  }
  return a;
}

TaylorResult taylor_and_remainder(int r, std::span<const cplx> t_samples, std::span<const cplx> x,
                                  std::span<const cplx> y, const DeformationConfig& cfg) {
  if (r < 1) throw ConfigError("taylor_and_remainder: r must be >= 1");
  cfg.validate();
  for (cplx t : t_samples) check_time_domain(t, cfg);
  TaylorResult res;
  if (cfg.omega == 0.0) {
    res.method = "borel";
    const FreeCaseTable table(cfg, CVec(x.begin(), x.end()), CVec(y.begin(), y.end()));
    auto a = table.taylor_coefficients(r - 1);
    res.coeffs.assign(a.begin(), a.end());
    for (cplx t : t_samples) res.remainders.push_back(table.split(r, t).second);
    return res;
  }
  res.method = "contour";
  const int n_points = 64;
  if (r > n_points / 2) throw ConfigError("taylor_and_remainder: r too large for the contour rule");
  const double rho = std::min(1.0, pi / (2.0 * std::abs(cfg.omega)));
  const auto a = contour_coefficients(x, y, cfg, n_points / 2, rho, n_points);
  res.coeffs.assign(a.begin(), a.begin() + r);
  for (cplx t : t_samples) {
    Matrix rem;
    if (std::abs(t) <= 0.5 * rho) {
      rem = Matrix::Zero(cfg.measure.d(), cfg.measure.d());
      for (int q = n_points / 2 - 1; q >= r; --q) rem += ipow(t, q) * a[q];
    } else {
      rem = v_truncated(t, x, y, cfg);
      for (int q = 0; q < r; ++q) rem -= ipow(t, q) * a[q];
    }
    res.remainders.push_back(rem);
  }
  return res;
}

FitResult taylor_by_fit(int r, std::span<const cplx> x, std::span<const cplx> y, const DeformationConfig& cfg,
                        double h0, int samples, int degree) {
  if (r < 1) throw ConfigError("taylor_by_fit: r must be >= 1");
  const int p = degree > 0 ? degree : r + 3;
  if (p < r - 1 || samples < p + 1) throw ConfigError("taylor_by_fit: need samples > degree >= r - 1");
  const double ratio = 0.8;
  Eigen::MatrixXd V(samples, p + 1);
  std::vector<Matrix> vals;
  for (int k = 0; k < samples; ++k) {
    const double t = h0 * std::pow(ratio, k);
    vals.push_back(v_sum(t, x, y, cfg).value);
    const double u = t / h0;
    double up = 1.0;
    for (int q = 0; q <= p; ++q, up *= u) V(k, q) = up;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  FitResult res;
  res.condition = sv(0) / sv(sv.size() - 1);
  res.conditioning_warning = res.condition > 1e10;
  const int d = cfg.measure.d();
  res.coeffs.assign(r, Matrix::Zero(d, d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXcd rhs(samples);
      for (int k = 0; k < samples; ++k) rhs(k) = vals[k](i, j);
      const Eigen::VectorXd re = svd.solve(rhs.real().eval());
      const Eigen::VectorXd im = svd.solve(rhs.imag().eval());
      for (int q = 0; q < r; ++q) res.coeffs[q](i, j) = cplx(re(q), im(q)) / std::pow(h0, q);
    }
  return res;
}

} // namespace hk
