#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "cyclolab/real.hpp"

namespace cyclolab {

struct PrimePower {
  mpz_class prime;
  unsigned exponent = 0;

  bool operator==(const PrimePower&) const = default;
};

/// n together with its prime factorization, primes strictly increasing.
struct Factorization {
  mpz_class n;
  std::vector<PrimePower> factors;

  /// Checks the structural invariants (product, ordering, exponents).
  bool valid() const;
};

/// Bulk tables for 1..limit. Index 0 holds zeros and is never read.
struct SieveTables {
  std::uint64_t limit = 0;
  std::vector<std::int8_t> mu;
  std::vector<std::uint32_t> phi;
  std::vector<std::uint64_t> sigma;
  std::vector<std::uint32_t> smallest_prime_factor;

  bool contains(std::uint64_t n) const { return n >= 1 && n <= limit; }
  bool operator==(const SieveTables&) const = default;
};

struct SieveOptions {
  std::size_t memory_ceiling_bytes = std::size_t{3} << 30;
};

struct DivisorClasses {
  std::uint64_t d1 = 0;
  std::uint64_t d3 = 0;

  bool operator==(const DivisorClasses&) const = default;
};

struct ZetaValue {
  Real value;
  /// Rigorous bound on |value - zeta(s)|.
  Real error_bound;
};

// Trial division by small primes, then Brent-Pollard rho on what remains.
// With a sieve covering n, walks the smallest-prime-factor table instead.
Factorization factorize(const mpz_class& n, const SieveTables* sieve = nullptr);
Factorization factorize(std::uint64_t n, const SieveTables* sieve = nullptr);

int mobius(const Factorization& f);
mpz_class totient(const Factorization& f);
mpz_class sigma(const Factorization& f);

int mobius(std::uint64_t n);
std::uint64_t totient(std::uint64_t n);
/// Throws std::overflow_error when sigma(n) does not fit in 64 bits.
std::uint64_t sigma(std::uint64_t n);

/// All positive divisors, ascending.
std::vector<std::uint64_t> divisors(std::uint64_t n);

DivisorClasses divisor_classes_mod4(std::uint64_t n);

/// #{(a, b) in Z^2 : a^2 + b^2 = n} by scanning a = 0..isqrt(n).
std::uint64_t r2_enumerate(std::uint64_t n);

std::uint64_t isqrt(std::uint64_t n);

SieveTables build_sieve(std::uint64_t limit, const SieveOptions& options = {});

/// Bytes build_sieve would hold at peak for this limit.
std::size_t sieve_memory_estimate(std::uint64_t limit);

/// Exact Bernoulli numbers B_0..B_{count-1} (B_1 = -1/2).
std::vector<mpq_class> bernoulli_numbers(std::size_t count);

/// zeta(s) for real s > 1 by Euler-Maclaurin summation. The returned error
/// bound covers truncation and accumulated rounding and is at most 2^-precision
/// (the value carries extra guard bits so the bound is attainable).
ZetaValue zeta(const Real& s, Bits precision = kDefaultPrecision);

}  // namespace cyclolab
