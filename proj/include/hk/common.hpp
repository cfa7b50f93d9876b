#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hk {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVec = std::vector<cplx>;   // complex nu-vector
using RVec = std::vector<double>; // real nu-vector

inline constexpr double pi = 3.14159265358979323846264338327950288;

// ---------------------------------------------------------------------------
// Errors. The CLI maps each class onto its own exit code.
// ---------------------------------------------------------------------------
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent input (schema violation, malformed measure, ...).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Argument outside the domain where the quantity is defined or certified.
class DomainError : public Error {
public:
  using Error::Error;
};

/// sh(omega t) vanishes with omega t != 0.
class PoleError : public DomainError {
public:
  using DomainError::DomainError;
};

/// Work estimate above the configured cap.
class CostError : public Error {
public:
  using Error::Error;
};

/// A requested accuracy could not be reached within the allowed effort.
class ToleranceError : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Bilinear algebra on C^nu (no conjugation, x.y = x1 y1 + ... ).
// ---------------------------------------------------------------------------
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
cplx dot(std::span<const cplx> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);

/// |x| = (x . conj x)^{1/2}.
double modulus(std::span<const cplx> x);
double modulus(std::span<const double> x);

/// Largest |Im x_k|-vector norm, |Im x|.
double imag_modulus(std::span<const cplx> x);

CVec to_complex(std::span<const double> x);

/// Principal square root, argument in (-pi, pi].
cplx principal_sqrt(cplx z);

/// sh(z)/z, entire, with the removable point handled by a degree-6 Taylor
/// polynomial below |z| < 1e-4.
cplx shc(cplx z);

/// shc(z), throwing PoleError where sh(z) = 0 with z != 0.
cplx shc_nonzero(cplx z);

/// z^n by repeated squaring; n < 0 gives 1 / z^{-n}.
cplx ipow(cplx z, int n);

/// Operator 2-norm (largest singular value).
double opnorm(const Matrix& m);

// ---------------------------------------------------------------------------
// Threading. Work is split into fixed-size chunks whose layout depends only on
// the problem size, so reductions are bit-identical for any thread count.
// ---------------------------------------------------------------------------
void set_thread_count(int n);
int thread_count();

/// Calls fn(chunk_index) for every chunk in [0, n_chunks) using the configured
/// number of worker threads. Exceptions are rethrown on the calling thread.
void parallel_chunks(std::size_t n_chunks, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Cost guard.
// ---------------------------------------------------------------------------

/// Maximum number of (node, atom tuple) integrand evaluations per call.
/// Overridden by the HK_COST_CAP environment variable.
double cost_cap();

void check_cost(double estimate, const std::string& what);

// ---------------------------------------------------------------------------
// Counter-based random numbers: value i of stream `seed` is a pure function of
// (seed, i), so shards can draw independently and reproducibly.
// ---------------------------------------------------------------------------
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t start = 0) : seed_(seed), counter_(start) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal (Box-Muller, both draws from consecutive counters).
  double normal();

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace hk
