#include "doctest.h"

#include "hk/measures.hpp"

using namespace hk;

namespace {

DiscreteMeasure cosine(double beta) {
  return DiscreteMeasure(1, 1, {Atom{{1.0}, Matrix::Constant(1, 1, beta)}, Atom{{-1.0}, Matrix::Constant(1, 1, beta)}});
}

} // namespace

TEST_CASE("potential of the cosine measure") {
  const auto m = cosine(0.25);
  const CVec x{cplx(0.0, 1.0)};
  // beta (e^{-1} + e), mpmath
  CHECK(std::abs(eval_potential(m, x)(0, 0) - 0.77154031740762188924) < 1e-14);
  const CVec x0{0.7};
  CHECK(std::abs(eval_potential(m, x0)(0, 0) - 0.5 * std::cos(0.7)) < 1e-15);
}

TEST_CASE("zero measure") {
  const auto z = DiscreteMeasure::zero(2, 3);
  CHECK(z.is_zero());
  CHECK(z.total_variation() == 0.0);
  CHECK(eval_potential(z, CVec{0.1, 0.2}).isZero(0.0));
  CHECK(exp_moment(z, 1.0, 1.0) == 0.0);
}

TEST_CASE("exp_moment") {
  const auto m = cosine(0.25);
  CHECK(exp_moment(m, 0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(exp_moment(m, 0.5, 2.0) == doctest::Approx(0.5 * std::exp(2.5)).epsilon(1e-14));
}

TEST_CASE("measure validation") {
  CHECK_THROWS_AS(DiscreteMeasure(0, 1), ConfigError);
  CHECK_THROWS_AS(DiscreteMeasure(1, 1, {Atom{{1.0, 2.0}, Matrix::Identity(1, 1)}}), ConfigError);
  CHECK_THROWS_AS(DiscreteMeasure(1, 2, {Atom{{1.0}, Matrix::Identity(1, 1)}}), ConfigError);
}

TEST_CASE("torus potential and Fourier measure") {
  std::map<Frequency, Matrix> c{{{1}, Matrix::Constant(1, 1, 0.1)}, {{-1}, Matrix::Constant(1, 1, 0.1)}};
  const TorusPotential p(1, 1, c);
  CHECK(p.max_frequency() == 1);
  CHECK(p.hermitian_defect() == 0.0);
  CHECK(p.sup_bound() == doctest::Approx(0.2));
  const auto m = measure_from_fourier_coeffs(p);
  REQUIRE(m.atoms().size() == 2);
  CHECK(std::abs(std::abs(m.atoms()[0].xi[0]) - 2.0 * pi) < 1e-15);

  std::map<Frequency, Matrix> bad{{{1}, Matrix::Constant(1, 1, cplx(0.1, 0.1))},
                                  {{-1}, Matrix::Constant(1, 1, cplx(0.1, 0.1))}};
  CHECK_THROWS_AS(measure_from_fourier_coeffs(TorusPotential(1, 1, bad)), ConfigError);
}

TEST_CASE("json round trip") {
  const DiscreteMeasure m(2, 2,
                          {Atom{{1.0, -0.5}, (Matrix(2, 2) << 1.0, cplx(0, 2), 0.0, -1.0).finished()}});
  const auto j = measure_to_json(m);
  const auto back = measure_from_json(j);
  CHECK(back.nu() == 2);
  CHECK(back.d() == 2);
  CHECK(back.atoms()[0].xi == m.atoms()[0].xi);
  CHECK(back.atoms()[0].weight.isApprox(m.atoms()[0].weight, 0.0));

  const auto s = nlohmann::json::parse(R"({"nu":1,"d":1,"atoms":[{"xi":[0.0],"re":0.5}]})");
  CHECK(measure_from_json(s).atoms()[0].weight(0, 0) == cplx(0.5, 0.0));
  CHECK_THROWS_AS(measure_from_json(nlohmann::json::parse(R"({"nu":1})")), ConfigError);

  std::map<Frequency, Matrix> c{{{2}, Matrix::Constant(1, 1, 0.1)}, {{-2}, Matrix::Constant(1, 1, 0.1)}};
  const auto tj = torus_to_json(TorusPotential(1, 1, c));
  CHECK(torus_from_json(tj).max_frequency() == 2);
}
