#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "cyclolab/arith.hpp"

namespace cyclolab {

/// Formal power series over Q truncated after z^order. The constant term is
/// kept apart from the z^1..z^order coefficients so that log-series, which
/// must have zero constant term, can be checked for it.
class RationalSeries {
 public:
  explicit RationalSeries(std::size_t order);
  RationalSeries(mpq_class constant, std::vector<mpq_class> coefficients);

  std::size_t order() const { return coeffs_.size(); }
  const mpq_class& constant_term() const { return constant_; }
  /// k = 0 is the constant term; k in 1..order otherwise.
  const mpq_class& coefficient(std::size_t k) const;
  void set_coefficient(std::size_t k, mpq_class value);

  /// Throws DomainError naming `who` when the constant term is nonzero.
  void require_zero_constant(const char* who) const;

  RationalSeries& operator+=(const RationalSeries& rhs);
  RationalSeries& operator-=(const RationalSeries& rhs);
  RationalSeries& operator*=(const mpq_class& factor);

  bool operator==(const RationalSeries&) const = default;

 private:
  void require_same_order(const RationalSeries& rhs) const;

  mpq_class constant_;
  std::vector<mpq_class> coeffs_;
};

RationalSeries operator+(RationalSeries a, const RationalSeries& b);
RationalSeries operator-(RationalSeries a, const RationalSeries& b);
RationalSeries operator*(RationalSeries a, const mpq_class& factor);

/// log(1 - z^i) = -sum_k z^{ik} / k through order M.
RationalSeries log_one_minus_power(std::uint64_t i, std::size_t order);

/// log Phi^_n(z) = -sum_m c_n(m) z^m / m through order M.
RationalSeries log_phi_hat_series(std::uint64_t n, std::size_t order, const SieveTables* sieve = nullptr);

inline constexpr std::uint64_t kMaxSeriesWork = 100'000'000;

/// -sum_{n <= N} log_phi_hat_series(n, M) / n; coefficient of z^m is S_N(m) / m.
RationalSeries log_truncated_P(std::uint64_t n_max, std::size_t order);

struct SeriesMismatch {
  std::size_t exponent = 0;
  mpq_class lhs;
  mpq_class rhs;
};

struct SeriesComparison {
  bool equal = true;
  std::optional<SeriesMismatch> first_mismatch;
};

/// Exact coefficientwise comparison including the constant term. Orders must match.
SeriesComparison series_equal(const RationalSeries& a, const RationalSeries& b);

}  // namespace cyclolab
