#include "doctest.h"

#include <cmath>

#include "hk/mehler.hpp"
#include "hk/oracle.hpp"

using namespace hk;

namespace {

DiscreteMeasure cosine(double beta) {
  return DiscreteMeasure(1, 1, {Atom{{1.0}, Matrix::Constant(1, 1, beta)}, Atom{{-1.0}, Matrix::Constant(1, 1, beta)}});
}

} // namespace

TEST_CASE("closed form for constant potentials") {
  const CVec x{0.2}, y{-0.3};
  const cplx t(0.3, 0.1);
  const Matrix zero = Matrix::Zero(2, 2);
  const cplx u = mehler_kernel({t, x, y, 1.0});
  CHECK((closed_form_constant(zero, 1.0, t, x, y) - u * Matrix::Identity(2, 2)).norm() < 1e-15);
  CHECK(std::abs(closed_form_constant(Matrix::Constant(1, 1, 0.7), 1.0, t, x, y)(0, 0) - u * std::exp(0.7 * t)) < 1e-15);
  Matrix nil = Matrix::Zero(2, 2);
  nil(0, 1) = 1.5;
  const Matrix e = closed_form_constant(nil, cplx(0, 2), t, x, y);
  const cplx u2 = mehler_kernel({t, x, y, cplx(0, 2)});
  CHECK(std::abs(e(0, 1) - u2 * t * 1.5) < 1e-15);
  CHECK(std::abs(e(0, 0) - u2) < 1e-15);
  DeformationConfig cfg(DiscreteMeasure(1, 2, {Atom{{0.0}, nil}}), cplx(0, 2), 6, 4);
  const cplx ts(0.15, 0.05);
  CHECK((heat_kernel(ts, x, y, cfg) - closed_form_constant(nil, cplx(0, 2), ts, x, y)).norm() < 1e-15);
  CHECK_THROWS_AS(closed_form_constant(nil, 1.0, 4.0, x, y), DomainError);
}

TEST_CASE("Monte Carlo agrees with quadrature") {
  const CVec x{0.3}, y{-0.4};
  SUBCASE("constant potential, n = 2") {
    DeformationConfig cfg(DiscreteMeasure(1, 1, {Atom{{0.0}, Matrix::Constant(1, 1, 0.8)}}), 0.0, 2, 4);
    const auto mc = mc_simplex_estimate(2, 0.5, x, y, cfg, 2000, 1);
    CHECK(std::abs(mc.estimate(0, 0) - 0.5 * 0.25 * 0.64) <= 3 * mc.std_error + 1e-14);
  }
  for (cplx w : {cplx(0.0), cplx(1.0)}) {
    DeformationConfig cfg(cosine(0.25), w, 3, 16);
    for (int n = 1; n <= 3; ++n) {
      const auto mc = mc_simplex_estimate(n, cplx(0.3, 0.1), x, y, cfg, 20000, 42 + n);
      const Matrix q = v_term(n, cplx(0.3, 0.1), x, y, cfg);
      CHECK(std::abs(mc.estimate(0, 0) - q(0, 0)) <= 4 * mc.std_error);
      CHECK(mc.std_error > 0.0);
    }
  }
}

TEST_CASE("Monte Carlo is reproducible and thread independent") {
  DeformationConfig cfg(cosine(0.25), 1.0, 2, 8);
  const CVec x{0.3}, y{-0.4};
  set_thread_count(1);
  const auto a = mc_simplex_estimate(2, 0.2, x, y, cfg, 10000, 9);
  set_thread_count(4);
  const auto b = mc_simplex_estimate(2, 0.2, x, y, cfg, 10000, 9);
  set_thread_count(1);
  CHECK(a.estimate(0, 0) == b.estimate(0, 0));
  CHECK(a.std_error == b.std_error);
  const auto c = mc_simplex_estimate(2, 0.2, x, y, cfg, 10000, 10);
  CHECK(a.estimate(0, 0) != c.estimate(0, 0));
}
