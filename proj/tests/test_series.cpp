#include "doctest.h"

#include <cmath>
#include <cstdlib>

#include "hk/mehler.hpp"
#include "hk/series.hpp"

using namespace hk;

namespace {

DiscreteMeasure cosine(double beta) {
  return DiscreteMeasure(1, 1, {Atom{{1.0}, Matrix::Constant(1, 1, beta)}, Atom{{-1.0}, Matrix::Constant(1, 1, beta)}});
}

DiscreteMeasure constant(const Matrix& m) { return DiscreteMeasure(1, m.rows(), {Atom{{0.0}, m}}); }

double err(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("exp_partial and exp_remainder") {
  // mpmath
  CHECK(std::abs(exp_remainder(-0.3, 3) - -0.004181779318282133479953) < 1e-18);
  CHECK(std::abs(exp_remainder(cplx(2, 1), 4) - cplx(-0.84100928489206190683, 1.3843429790346348709)) < 1e-14);
  CHECK(std::abs(exp_remainder(-20.0, 5) - -5514.3333333312721797) < 1e-9);
  CHECK(exp_remainder(0.0, 3) == 0.0);
  CHECK(std::abs(exp_remainder(0.7, 0) - std::exp(0.7)) < 1e-15);
  CHECK(std::abs(exp_partial(0.5, 3) - 1.625) < 1e-16);
  // tiny argument: no cancellation
  CHECK(std::abs(exp_remainder(1e-5, 3) / (1e-15 / 6.0) - 1.0) < 1e-5);
}

TEST_CASE("tuple enumeration") {
  const auto ts = make_tuples(cosine(0.25), 3);
  CHECK(ts.index.size() == 8);
  CHECK(ts.index[1] == std::vector<int>{1, 0, 0});
  Matrix nil = Matrix::Zero(2, 2);
  nil(0, 1) = 1.0;
  CHECK(make_tuples(constant(nil), 2).index.empty());
  CHECK(make_tuples(constant(nil), 1).index.size() == 1);
}

TEST_CASE("zero potential gives the identity") {
  DeformationConfig cfg(DiscreteMeasure::zero(2, 3), 1.0, 4, 6);
  const CVec x{0.1, 0.2}, y{-0.3, 0.4};
  const auto r = v_sum(0.3, x, y, cfg);
  CHECK(r.value.isIdentity(0.0));
  CHECK(r.tail_bound == 0.0);
}

TEST_CASE("constant potential is exp(t m)") {
  Matrix m(2, 2);
  m << 0.3, cplx(0.1, 0.2), -0.4, 0.5;
  for (cplx w : {cplx(0.0), cplx(1.0), cplx(0, 2)}) {
    DeformationConfig cfg(constant(m), w, 20, 4);
    const CVec x{0.2}, y{-0.1};
    const cplx t(0.2, 0.1);
    const Matrix tm = t * m;
    Matrix e = Matrix::Identity(2, 2), term = Matrix::Identity(2, 2);
    for (int k = 1; k < 40; ++k) {
      term = term * tm / static_cast<double>(k);
      e += term;
    }
    CHECK(err(v_sum(t, x, y, cfg).value, e) < 1e-15);
  }
}

TEST_CASE("first and second order terms against mpmath") {
  DeformationConfig free_cfg(cosine(0.25), 0.0, 4, 24);
  const CVec z{0.0};
  CHECK(std::abs(v_term(1, 0.5, z, z, free_cfg)(0, 0) - 0.2301721413097424333) < 1e-14);
  const CVec x{0.3}, y{-0.4};
  CHECK(std::abs(v_term(2, 0.4, x, y, free_cfg)(0, 0) - 0.016825826255251450603) < 1e-13);
  DeformationConfig harm(cosine(0.25), 1.0, 4, 24);
  CHECK(std::abs(v_term(1, 0.3, x, y, harm)(0, 0) - 0.13964403437299876199) < 1e-14);
}

TEST_CASE("truncation consistency and tail bound") {
  DeformationConfig a(cosine(0.25), 0.0, 3, 10), b(cosine(0.25), 0.0, 5, 10);
  const CVec x{0.3}, y{-0.4};
  const cplx t(0.3, 0.2);
  const auto ra = v_sum(t, x, y, a);
  CHECK(ra.per_term_norms.size() == 3);
  CHECK(err(ra.value, v_sum(t, x, y, b).value) <= ra.tail_bound);
  CHECK(ra.tail_warning);
}

TEST_CASE("scalar symmetry v(x, y) = v(y, x)") {
  DeformationConfig cfg(cosine(0.25), 1.0, 3, 12);
  const CVec x{0.3}, y{-0.7};
  const cplx t(0.3, 0.1);
  CHECK(err(v_sum(t, x, y, cfg).value, v_sum(t, y, x, cfg).value) < 1e-13);
}

TEST_CASE("quadrature convergence") {
  const CVec x{0.3}, y{-0.4};
  DeformationConfig lo(cosine(0.25), 0.0, 3, 8), mid(cosine(0.25), 0.0, 3, 16), hi(cosine(0.25), 0.0, 3, 32);
  const Matrix a = v_term(3, 0.4, x, y, lo), b = v_term(3, 0.4, x, y, mid), c = v_term(3, 0.4, x, y, hi);
  CHECK(err(b, c) < 1e-15 + 0.1 * err(a, b));
}

TEST_CASE("domain checks") {
  DeformationConfig cfg(cosine(0.25), 1.0, 2, 6);
  const CVec x{0.1}, y{0.2};
  CHECK(cfg.t_domain_radius == doctest::Approx(0.5));
  CHECK_THROWS_AS(v_sum(0.6, x, y, cfg), DomainError);
  CHECK_THROWS_AS(v_sum(cplx(-0.1, 0.1), x, y, cfg), DomainError);
  CHECK_THROWS_AS(v_sum(0.0, x, y, cfg), DomainError);
  CHECK_THROWS_AS(v_sum(0.1, CVec{0.1, 0.2}, y, cfg), ConfigError);
  DeformationConfig bad(cosine(0.25), cplx(1, 1), 2, 6);
  CHECK_THROWS_AS(v_sum(0.1, x, y, bad), DomainError);
}

TEST_CASE("cost cap") {
  DeformationConfig cfg(cosine(0.25), 0.0, 4, 20);
  const CVec x{0.1}, y{0.2};
  setenv("HK_COST_CAP", "1000", 1);
  CHECK_THROWS_AS(v_sum(0.1, x, y, cfg), CostError);
  unsetenv("HK_COST_CAP");
  CHECK_NOTHROW(v_sum(0.1, x, y, cfg));
}

TEST_CASE("thread count does not change results") {
  DeformationConfig cfg(cosine(0.25), 1.0, 4, 14);
  const CVec x{0.3}, y{-0.4};
  set_thread_count(1);
  const Matrix a = v_sum(cplx(0.2, 0.1), x, y, cfg).value;
  set_thread_count(3);
  const Matrix b = v_sum(cplx(0.2, 0.1), x, y, cfg).value;
  set_thread_count(1);
  CHECK(a(0, 0) == b(0, 0));
}

TEST_CASE("heat kernel is the Mehler kernel times v") {
  DeformationConfig cfg(cosine(0.25), 1.0, 3, 10);
  const CVec x{0.3}, y{-0.4};
  const cplx t(0.2, 0.05);
  const cplx u = mehler_kernel({t, x, y, 1.0});
  CHECK(err(heat_kernel(t, x, y, cfg), u * v_sum(t, x, y, cfg).value) < 1e-16);
}

TEST_CASE("free-case table reproduces v_sum") {
  DeformationConfig cfg(cosine(0.25), 0.0, 4, 10);
  const CVec x{0.3}, y{-0.4};
  const FreeCaseTable table(cfg, x, y);
  for (cplx t : {cplx(0.1), cplx(0.5, 0.3), cplx(2.0, -1.0)}) {
    CHECK(err(table.value(t), v_sum(t, x, y, cfg).value) < 1e-14);
    const auto [f, g] = table.split(3, t);
    CHECK(err(f + g, table.value(t)) < 1e-14);
  }
}

TEST_CASE("Taylor coefficients") {
  const CVec z{0.0}, x{0.3}, y{-0.4};
  SUBCASE("constant potential, free case") {
    DeformationConfig cfg(constant(Matrix::Constant(1, 1, 0.6)), 0.0, 8, 4);
    const std::vector<cplx> ts{0.1};
    const auto r = taylor_and_remainder(5, ts, x, y, cfg);
    CHECK(r.method == "borel");
    double f = 1.0;
    for (int q = 0; q < 5; ++q) {
      if (q) f *= q;
      CHECK(std::abs(r.coeffs[q](0, 0) - std::pow(0.6, q) / f) < 1e-15);
    }
  }
  SUBCASE("zero potential") {
    DeformationConfig cfg(DiscreteMeasure::zero(1, 1), 0.0, 3, 4);
    const std::vector<cplx> ts{0.1, 0.2};
    const auto r = taylor_and_remainder(4, ts, x, y, cfg);
    CHECK(r.coeffs[0](0, 0) == 1.0);
    for (int q = 1; q < 4; ++q) CHECK(r.coeffs[q](0, 0) == 0.0);
    CHECK(r.remainders[1](0, 0) == 0.0);
  }
  SUBCASE("cosine a_1 at the origin is 2 beta") {
    DeformationConfig cfg(cosine(0.25), 0.0, 4, 12);
    const std::vector<cplx> ts{0.1};
    const auto r = taylor_and_remainder(3, ts, z, z, cfg);
    CHECK(std::abs(r.coeffs[1](0, 0) - 0.5) < 1e-14);
    // centred finite difference of v around 0: (v(h) - v(-h)) / 2h with v entire in t
    const double h = 1e-4;
    const FreeCaseTable table(cfg, z, z);
    const cplx fd = (table.value(h)(0, 0) - table.value(-h)(0, 0)) / (2 * h);
    CHECK(std::abs(fd - r.coeffs[1](0, 0)) < 1e-8);
  }
  SUBCASE("harmonic: contour against the fit") {
    DeformationConfig cfg(cosine(0.25), 1.0, 4, 10);
    const std::vector<cplx> ts{0.05, cplx(0.3, 0.2), 0.45};
    const auto r = taylor_and_remainder(4, ts, x, y, cfg);
    CHECK(r.method == "contour");
    const auto fit = taylor_by_fit(4, x, y, cfg, 0.2, 16, 9);
    for (int q = 0; q < 4; ++q) CHECK(std::abs(r.coeffs[q](0, 0) - fit.coeffs[q](0, 0)) < 1e-6);
    // remainders by both routes are consistent with v
    for (std::size_t i = 0; i < ts.size(); ++i) {
      Matrix poly = Matrix::Zero(1, 1);
      for (int q = 0; q < 4; ++q) poly += std::pow(ts[i], q) * r.coeffs[q];
      CHECK(err(poly + r.remainders[i], v_sum(ts[i], x, y, cfg).value) < 1e-12);
    }
  }
  SUBCASE("fit conditioning warning") {
    DeformationConfig cfg(cosine(0.25), 1.0, 2, 6);
    const auto fit = taylor_by_fit(3, x, y, cfg, 0.2, 30, 25);
    CHECK(fit.conditioning_warning);
  }
}
