#pragma once

#include <cstdint>

#include "hk/series.hpp"

namespace hk {

/// u_w(t, x, y) exp(t m): the heat kernel for a measure with a single atom at
/// xi = 0 of weight m. exp by scaling and squaring with a Pade core.
Matrix closed_form_constant(const Matrix& m, cplx omega, cplx t, std::span<const cplx> x, std::span<const cplx> y);

struct McEstimate {
  Matrix estimate;
  double std_error = 0.0;  // largest entrywise standard error
  std::size_t samples = 0;
};

/// Monte Carlo v_n: uniform points of the ordered simplex (sorted cube points,
/// density n!), integrand assembled from omega_matrix and classical_path.
/// Shards of 4096 samples draw from disjoint counter ranges of one stream and
/// are merged in order, so the result depends only on (samples, seed).
McEstimate mc_simplex_estimate(int n, cplx t, std::span<const cplx> x, std::span<const cplx> y,
                               const DeformationConfig& cfg, std::size_t samples, std::uint64_t seed);

} // namespace hk
