#pragma once

#include "hk/common.hpp"

namespace hk {

/// Radius delta with |q_w(s)| <= 4 max(|x|, |y|) whenever |w t| < delta.
inline constexpr double delta_path = 0.5;

/// Evaluation point of the harmonic kernel. omega is real or purely imaginary.
struct KernelPoint {
  cplx t;
  CVec x;
  CVec y;
  cplx omega;
};

/// Mehler kernel of d_t - d_x^2 + (w^2/4) x^2:
///   (4 pi sh(w t)/w)^{-nu/2} exp(-(w / (4 sh(w t))) (ch(w t)(x^2 + y^2) - 2 x.y)).
/// The power nu/2 is the nu-th power of the principal square root. At w = 0
/// this is the free kernel (4 pi t)^{-nu/2} exp(-(x - y)^2 / (4 t)).
cplx mehler_kernel(const KernelPoint& p);

/// q_w(s) = (sh(w t s) x + sh(w t (1 - s)) y) / sh(w t); q(0) = y, q(1) = x.
CVec classical_path(cplx omega, cplx t, double s, std::span<const cplx> x, std::span<const cplx> y);

} // namespace hk
