#include "doctest.h"

#include <cmath>

#include "hk/mehler.hpp"

using namespace hk;

TEST_CASE("free kernel at w = 0") {
  const KernelPoint p{0.3, {0.5}, {-0.2}, 0.0};
  const double ref = std::exp(-0.49 / 1.2) / std::sqrt(4.0 * pi * 0.3);
  CHECK(std::abs(mehler_kernel(p) - ref) < 1e-15);
}

TEST_CASE("harmonic kernel against mpmath") {
  const KernelPoint p{0.3, {0.5}, {-0.2}, cplx(0, 2)};
  CHECK(std::abs(mehler_kernel(p) - 0.35980020204848275534) < 1e-14);
  const KernelPoint q{cplx(0.2, 0.1), {cplx(0.3, 0.1)}, {-0.4}, 1.0};
  CHECK(std::abs(mehler_kernel(q) - cplx(0.33950856275244751036, -0.046626711023176836639)) < 1e-14);
}

TEST_CASE("small w t is continuous with the free kernel") {
  const KernelPoint a{0.3, {0.5, 0.1}, {-0.2, 0.3}, 1e-7};
  const KernelPoint b{0.3, {0.5, 0.1}, {-0.2, 0.3}, 0.0};
  CHECK(std::abs(mehler_kernel(a) - mehler_kernel(b)) < 1e-14);
}

TEST_CASE("kernel errors") {
  CHECK_THROWS_AS(mehler_kernel({0.0, {0.1}, {0.2}, 1.0}), DomainError);
  CHECK_THROWS_AS(mehler_kernel({1.0, {0.1}, {0.2}, cplx(0, pi)}), PoleError);
  CHECK_THROWS_AS(mehler_kernel({0.1, {0.1}, {0.2, 0.3}, 1.0}), ConfigError);
  CHECK_THROWS_AS(mehler_kernel({0.1, {0.1}, {0.2}, cplx(1, 1)}), DomainError);
}

TEST_CASE("classical path end points and free limit") {
  const CVec x{0.7}, y{-0.3};
  CHECK(std::abs(classical_path(1.0, 0.4, 1.0, x, y)[0] - x[0]) < 1e-15);
  CHECK(std::abs(classical_path(1.0, 0.4, 0.0, x, y)[0] - y[0]) < 1e-15);
  CHECK(std::abs(classical_path(0.0, 0.4, 0.3, x, y)[0] - (0.3 * 0.7 - 0.7 * 0.3)) < 1e-15);
  // sh(w t s) x + sh(w t (1 - s)) y over sh(w t)
  const double ref = (std::sinh(0.4 * 0.3) * 0.7 + std::sinh(0.4 * 0.7) * -0.3) / std::sinh(0.4);
  CHECK(std::abs(classical_path(1.0, 0.4, 0.3, x, y)[0] - ref) < 1e-15);
}

TEST_CASE("heat equation for the harmonic kernel") {
  // d_t u = u_xx - (w^2/4) x^2 u
  const double w = 1.3, t = 0.4, x = 0.35, y = -0.1, h = 1e-3;
  auto u = [&](double tt, double xx) { return mehler_kernel({tt, {xx}, {y}, w}); };
  const cplx ut = (u(t + h, x) - u(t - h, x)) / (2 * h);
  const cplx uxx = (u(t, x + h) - 2.0 * u(t, x) + u(t, x - h)) / (h * h);
  CHECK(std::abs(ut - uxx + 0.25 * w * w * x * x * u(t, x)) < 1e-5);
}
