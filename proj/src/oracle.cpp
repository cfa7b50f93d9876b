#include "hk/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "hk/defmatrix.hpp"
#include "hk/mehler.hpp"

namespace hk {

Matrix closed_form_constant(const Matrix& m, cplx omega, cplx t, std::span<const cplx> x, std::span<const cplx> y) {
  if (m.rows() != m.cols()) throw ConfigError("closed_form_constant: weight must be square");
  if (std::abs(omega * t) >= pi) throw DomainError("closed_form_constant: requires |w t| < pi");
  const KernelPoint p{t, CVec(x.begin(), x.end()), CVec(y.begin(), y.end()), omega};
  const Matrix tm = t * m;
  return mehler_kernel(p) * tm.exp();
}

McEstimate mc_simplex_estimate(int n, cplx t, std::span<const cplx> x, std::span<const cplx> y,
                               const DeformationConfig& cfg, std::size_t samples, std::uint64_t seed) {
  if (n < 1) throw ConfigError("mc_simplex_estimate: n must be >= 1");
  if (samples < 2) throw ConfigError("mc_simplex_estimate: need at least 2 samples");
  cfg.validate();
  check_time_domain(t, cfg);
  const int d = cfg.measure.d();
  const auto tuples = make_tuples(cfg.measure, n);
  const auto& atoms = cfg.measure.atoms();
  constexpr std::size_t shard = 4096;
  const std::size_t n_shards = (samples + shard - 1) / shard;
  std::vector<Matrix> sum(n_shards, Matrix::Zero(d, d));
  std::vector<Eigen::MatrixXd> sq(n_shards, Eigen::MatrixXd::Zero(d, d));
  double nfact = 1.0;
  for (int k = 2; k <= n; ++k) nfact *= k;

  parallel_chunks(n_shards, [&](std::size_t c) {
    CounterRng rng(seed, static_cast<std::uint64_t>(c) * shard * n);
    const std::size_t end = std::min(samples, (c + 1) * shard);
    std::vector<double> s(n);
    std::vector<CVec> path(n);
    for (std::size_t i = c * shard; i < end; ++i) {
      for (auto& v : s) v = rng.uniform();
      std::sort(s.begin(), s.end());
      const Matrix om = omega_matrix(cfg.omega, t, s);
      for (int k = 0; k < n; ++k) path[k] = classical_path(cfg.omega, t, s[k], x, y);
      Matrix f = Matrix::Zero(d, d);
      for (std::size_t j = 0; j < tuples.index.size(); ++j) {
        const auto& idx = tuples.index[j];
        cplx q = 0.0, ph = 0.0;
        for (int a = 0; a < n; ++a) {
          const auto& xa = atoms[idx[a]].xi;
          ph += dot(std::span<const cplx>(path[a]), std::span<const double>(xa));
          for (int b = 0; b < n; ++b)
            q += om(a, b) * dot(std::span<const double>(xa), std::span<const double>(atoms[idx[b]].xi));
        }
        f += (std::exp(-q) * std::exp(cplx(0.0, 1.0) * ph)) * tuples.product[j];
      }
      sum[c] += f;
      sq[c] += f.cwiseAbs2();
    }
  });

  Matrix total = Matrix::Zero(d, d);
  Eigen::MatrixXd total_sq = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t c = 0; c < n_shards; ++c) {
    total += sum[c];
    total_sq += sq[c];
  }
  const double N = static_cast<double>(samples);
  const Matrix mean = total / N;
  const Eigen::MatrixXd var = ((total_sq / N) - mean.cwiseAbs2()).cwiseMax(0.0) * (N / (N - 1.0));
  const double scale = std::abs(ipow(t, n)) / nfact;
  McEstimate r;
  r.estimate = (ipow(t, n) / nfact) * mean;
  r.std_error = scale * std::sqrt(var.maxCoeff() / N);
  r.samples = samples;
  return r;
}

} // namespace hk
