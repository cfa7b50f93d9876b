#include "hk/mehler.hpp"

#include <cmath>

#include "hk/defmatrix.hpp"

namespace hk {

cplx mehler_kernel(const KernelPoint& p) {
  require_real_or_imaginary(p.omega);
  if (p.x.size() != p.y.size() || p.x.empty()) throw ConfigError("mehler_kernel: x and y must share a dimension >= 1");
  if (p.t == 0.0) throw DomainError("mehler_kernel: t = 0");
  const cplx a = p.omega * p.t;
  const cplx sa = shc_nonzero(a);        // sh(w t) / (w t)
  const cplx half = shc(0.5 * a);        // ch(w t) - 1 = (a^2 / 2) shc(a/2)^2
  cplx diff2 = 0.0, sum2 = 0.0;
  for (std::size_t k = 0; k < p.x.size(); ++k) {
    const cplx d = p.x[k] - p.y[k];
    diff2 += d * d;
    sum2 += p.x[k] * p.x[k] + p.y[k] * p.y[k];
  }
  // (w/(4 sh)) (ch (x^2+y^2) - 2 x.y) = [(x-y)^2 + (ch - 1)(x^2+y^2)] / (4 t shc(a))
  const cplx exponent =
      -diff2 / (4.0 * p.t * sa) - p.omega * p.omega * p.t * half * half * sum2 / (8.0 * sa);
  const cplx root = principal_sqrt(4.0 * pi * p.t * sa);
  const cplx prefactor = ipow(root, -static_cast<int>(p.x.size()));
  return prefactor * std::exp(exponent);
}

CVec classical_path(cplx omega, cplx t, double s, std::span<const cplx> x, std::span<const cplx> y) {
  if (x.size() != y.size()) throw ConfigError("classical_path: x and y differ in dimension");
  const cplx a = omega * t;
  const cplx den = shc_nonzero(a);
  const cplx cx = s * shc(a * s) / den;
  const cplx cy = (1.0 - s) * shc(a * (1.0 - s)) / den;
  CVec q(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) q[k] = cx * x[k] + cy * y[k];
  return q;
}

} // namespace hk
