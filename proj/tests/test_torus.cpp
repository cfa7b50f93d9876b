#include "doctest.h"

#include <cmath>

#include "hk/torus.hpp"

using namespace hk;

namespace {

TorusPotential cosine_torus(double beta) {
  return TorusPotential(1, 1, {{{1}, Matrix::Constant(1, 1, beta)}, {{-1}, Matrix::Constant(1, 1, beta)}});
}

} // namespace

TEST_CASE("free spectrum") {
  const auto s = galerkin_spectrum(TorusPotential(1, 1, {}), 5);
  REQUIRE(s.eigenvalues.size() == 11);
  CHECK(s.eigenvalues[0] == doctest::Approx(0.0));
  CHECK(s.eigenvalues[1] == doctest::Approx(4 * pi * pi));
  CHECK(s.eigenvalues[2] == doctest::Approx(4 * pi * pi));
  // theta(0.1) = sum_k e^{-4 pi^2 k^2 / 10}, mpmath
  const auto tr = trace_direct(galerkin_spectrum(TorusPotential(1, 1, {}), 20), 0.1);
  CHECK(std::abs(tr.value - 1.0385928831070669073) < 1e-14);
  CHECK(!tr.tail_warning);
}

TEST_CASE("constant shift and errors") {
  const auto s0 = galerkin_spectrum(TorusPotential(1, 2, {}), 3);
  const auto s1 = galerkin_spectrum(TorusPotential(1, 2, {{{0}, 0.5 * Matrix::Identity(2, 2)}}), 3);
  for (std::size_t i = 0; i < s0.eigenvalues.size(); ++i) CHECK(s1.eigenvalues[i] == doctest::Approx(s0.eigenvalues[i] - 0.5));
  CHECK_THROWS_AS(galerkin_spectrum(cosine_torus(0.1), 0), ConfigError);
  CHECK_THROWS_AS(trace_direct(s0, cplx(0.0, 1.0)), DomainError);
}

TEST_CASE("cosine spectrum converges") {
  const auto a = galerkin_spectrum(cosine_torus(0.1), 16);
  const auto b = galerkin_spectrum(cosine_torus(0.1), 32);
  // numpy eigvalsh at cutoff 64
  CHECK(std::abs(b.eigenvalues[0] - -0.0005066002977199706) < 1e-10);
  CHECK(std::abs(a.eigenvalues[0] - b.eigenvalues[0]) < 1e-10);
  const auto ta = trace_direct(a, 0.2), tb = trace_direct(b, 0.2);
  CHECK(std::abs(ta.value - tb.value) < 1e-10);
  CHECK(std::abs(tb.value - 1.0008459946553834) < 1e-10);
}

TEST_CASE("w_hat closed forms") {
  DeformationConfig zero(DiscreteMeasure::zero(1, 2), 0.0, 4, 6);
  CHECK(w_hat({0}, cplx(2, 1), zero, 9) == cplx(2.0));
  CHECK(w_hat({3}, cplx(2, 1), zero, 9) == cplx(2.0));
  const TorusPotential c(1, 1, {{{0}, Matrix::Constant(1, 1, 0.4)}});
  const auto cfg = torus_config(c, 8, 4);
  const cplx tau(1.5, -0.5);
  cplx ref = 0.0, f = 1.0;
  for (int n = 0; n <= 8; ++n) {
    if (n) f *= n;
    ref += std::pow(0.4 * tau, n) / (f * f);
  }
  CHECK(std::abs(w_hat({2}, tau, cfg, 9) - ref) < 1e-15);
}

TEST_CASE("w_hat growth bound") {
  auto cfg = torus_config(cosine_torus(0.1), 4, 10);
  const double C = 2.0 * std::sqrt(exp_moment(cfg.measure, 0.0, 0.0));
  const WHat w(cfg, {1}, 9);
  for (double tau : {0.0, 0.5, 2.0, 8.0, 20.0}) CHECK(std::abs(w(tau)) <= std::exp(C * std::sqrt(tau)));
}

TEST_CASE("theta identity") {
  const TorusPotential zero(1, 1, {});
  const auto cfg = torus_config(zero, 2, 4);
  const auto spec = galerkin_spectrum(zero, 20);
  for (cplx t : {cplx(0.05), cplx(0.1), cplx(0.5), std::polar(0.2, pi / 6)}) {
    const auto p = poisson_trace(t, zero, cfg, 0, 1e-13);
    const auto d = trace_direct(spec, t);
    CHECK(std::abs(p.value - d.value) <= 1e-11 * std::abs(d.value));
  }
}

TEST_CASE("constant potential scales both sides by e^{m t}") {
  const TorusPotential c(1, 1, {{{0}, Matrix::Constant(1, 1, 0.3)}});
  const auto cfg = torus_config(c, 12, 4);
  const cplx t(0.2, 0.05);
  const auto p = poisson_trace(t, c, cfg, 0, 1e-12);
  const auto d = trace_direct(galerkin_spectrum(c, 20), t);
  CHECK(std::abs(p.value - d.value) < 1e-10);
}

TEST_CASE("cosine potential Poisson formula, small check") {
  const auto pot = cosine_torus(0.1);
  auto cfg = torus_config(pot, 4, 10);
  cfg.quad_orders = {16, 16, 8, 5};
  const auto spec = galerkin_spectrum(pot, 32);
  const cplx t(0.5);
  const auto p = poisson_trace(t, pot, cfg, 0, 1e-9);
  CHECK(std::abs(p.value - trace_direct(spec, t).value) < 1e-8);
  CHECK(std::abs(p.value.imag()) < 1e-10);
  CHECK(!p.tail_warning);
  CHECK(p.terms.size() == static_cast<std::size_t>(2 * p.q_max + 1));
  const auto j = spectrum_to_json(spec);
  CHECK(j["eigenvalues"].size() == 65);
}
