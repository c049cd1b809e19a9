#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "cyclolab/complex.hpp"
#include "cyclolab/real.hpp"

namespace cyclolab {

/// Dense polynomial over Z, coefficient index = degree. Trailing zeros are
/// trimmed, so the zero polynomial has no coefficients and degree -1.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<mpz_class> coefficients);
  IntPoly(std::initializer_list<long> coefficients);

  /// z^n - 1
  static IntPoly power_minus_one(std::uint64_t n);

  long degree() const { return static_cast<long>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<mpz_class>& coefficients() const { return coeffs_; }
  /// Zero beyond the degree.
  mpz_class coefficient(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : mpz_class(0); }
  mpz_class content() const;
  bool is_palindromic() const;

  /// Drops every term of degree > max_degree.
  IntPoly truncated(std::size_t max_degree) const;
  /// Exact quotient; throws DomainError if divisor does not divide *this over Z.
  IntPoly divide_exact(const IntPoly& divisor) const;

  HPComplex evaluate(const HPComplex& z) const;

  /// Human-readable form, highest degree first: "z^2 - z + 1".
  std::string to_string(char variable = 'z') const;

  friend IntPoly operator+(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator-(const IntPoly& a, const IntPoly& b);
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b);
  bool operator==(const IntPoly&) const = default;

 private:
  void trim();
  std::vector<mpz_class> coeffs_;
};

/// Phi_n by exact division of z^n - 1 by Phi_d over the proper divisors d.
IntPoly cyclotomic(std::uint64_t n);
/// Phi_n as prod_{d | n} (z^d - 1)^{mu(n/d)}, numerator divided by denominator exactly.
IntPoly cyclotomic_mobius(std::uint64_t n);
/// prod over primitive k of (1 - z e^{2 pi i k/n}): 1 - z for n = 1, Phi_n otherwise.
IntPoly cyclotomic_hat(std::uint64_t n);

/// Sum over primitive k of Log(1 - z zeta_n^k), principal branch per factor.
/// Every factor lies within |z| of 1 so each Log is analytic; requires |z| < 1.
HPComplex log_phi_hat(std::uint64_t n, const HPComplex& z);
/// The same function through sum_{d | n} mu(n/d) Log(1 - z^d).
HPComplex log_phi_hat_divisor(std::uint64_t n, const HPComplex& z);

struct ProductValue {
  /// -sum_{n <= N} log_phi_hat(n, z) / n
  HPComplex log_value;
  HPComplex value;
  std::uint64_t n = 0;
  HPComplex z;
  /// Precision actually used after any escalation.
  Bits precision = kDefaultPrecision;
  /// Estimated bound on the absolute error of log_value.
  Real error_estimate;
};

struct ProductOptions {
  Bits precision = kDefaultPrecision;
  /// Escalation stops here with PrecisionError.
  Bits max_precision = 4096;
};

/// P_N(z) = exp(-sum_{n <= N} log_phi_hat(n, z) / n). Summed by divisor
/// regrouping: -sum_{d <= N} Log(1 - z^d) / d * m(N / d) with
/// m(x) = sum_{k <= x} mu(k) / k, so each z costs N logarithms.
/// Precision doubles while the error estimate exceeds 2^-(precision/2).
ProductValue truncated_product(std::uint64_t n, const HPComplex& z, const ProductOptions& options = {});

struct GridPoint {
  std::uint64_t n = 0;
  Real radius;
  std::uint64_t angle_index = 0;
  Real theta;
  Real abs_value;
};

/// Per (N, r) row: extremes of |P_N| around the circle of radius r.
struct GridRowSummary {
  std::uint64_t n = 0;
  Real radius;
  Real min_abs;
  Real max_abs;
  /// max over theta of | |P_N| - 1 |
  Real max_deviation;
  std::uint64_t angle_index_at_max = 0;
  /// Order of the root of unity e^{i theta} at that grid angle.
  std::uint64_t root_order_at_max = 0;
  /// Grid angles with | |P_N| - 1 | > 1/2.
  std::uint64_t spike_count = 0;
};

struct GridStudy {
  std::vector<std::uint64_t> n_list;
  std::vector<Real> radii;
  std::uint64_t angle_count = 0;
  Bits precision = kDefaultPrecision;
  /// Ordered by N, then radius, then angle index.
  std::vector<GridPoint> points;

  std::vector<GridRowSummary> summarize() const;
};

/// |P_N(r e^{2 pi i j / angle_count})| for every N, r and j. Radii must lie in (0, 1).
GridStudy boundary_grid_study(const std::vector<std::uint64_t>& n_list, const std::vector<Real>& radii,
                              std::uint64_t angle_count, Bits precision = kDefaultPrecision);

}  // namespace cyclolab
