#include "cyclolab/series.hpp"

#include <string>

#include "cyclolab/errors.hpp"
#include "cyclolab/ramanujan.hpp"

namespace cyclolab {

RationalSeries::RationalSeries(std::size_t order) : constant_(0), coeffs_(order) {}

RationalSeries::RationalSeries(mpq_class constant, std::vector<mpq_class> coefficients)
    : constant_(std::move(constant)), coeffs_(std::move(coefficients)) {
  constant_.canonicalize();
  for (auto& c : coeffs_) c.canonicalize();
}

const mpq_class& RationalSeries::coefficient(std::size_t k) const {
  if (k == 0) return constant_;
  if (k > coeffs_.size()) {
    throw DomainError("RationalSeries: exponent " + std::to_string(k) + " beyond order " +
                      std::to_string(coeffs_.size()));
  }
  return coeffs_[k - 1];
}

void RationalSeries::set_coefficient(std::size_t k, mpq_class value) {
  value.canonicalize();
  if (k == 0) {
    constant_ = std::move(value);
    return;
  }
  if (k > coeffs_.size()) {
    throw DomainError("RationalSeries: exponent " + std::to_string(k) + " beyond order " +
                      std::to_string(coeffs_.size()));
  }
  coeffs_[k - 1] = std::move(value);
}

void RationalSeries::require_zero_constant(const char* who) const {
  if (constant_ != 0) {
    throw DomainError(std::string(who) + ": log-series has nonzero constant term " + constant_.get_str());
  }
}

void RationalSeries::require_same_order(const RationalSeries& rhs) const {
  if (rhs.order() != order()) {
    throw DomainError("RationalSeries: order mismatch " + std::to_string(order()) + " vs " +
                      std::to_string(rhs.order()));
  }
}

RationalSeries& RationalSeries::operator+=(const RationalSeries& rhs) {
  require_same_order(rhs);
  constant_ += rhs.constant_;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
  return *this;
}

RationalSeries& RationalSeries::operator-=(const RationalSeries& rhs) {
  require_same_order(rhs);
  constant_ -= rhs.constant_;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
  return *this;
}

RationalSeries& RationalSeries::operator*=(const mpq_class& factor) {
  constant_ *= factor;
  for (auto& c : coeffs_) c *= factor;
  return *this;
}

RationalSeries operator+(RationalSeries a, const RationalSeries& b) { return a += b; }
RationalSeries operator-(RationalSeries a, const RationalSeries& b) { return a -= b; }
RationalSeries operator*(RationalSeries a, const mpq_class& factor) { return a *= factor; }

RationalSeries log_one_minus_power(std::uint64_t i, std::size_t order) {
  if (i == 0) throw DomainError("log_one_minus_power: i must be >= 1");
  RationalSeries out(order);
  for (std::uint64_t k = 1; i * k <= order; ++k) {
    out.set_coefficient(i * k, mpq_class(-1L, static_cast<unsigned long>(k)));
  }
  return out;
}

RationalSeries log_phi_hat_series(std::uint64_t n, std::size_t order, const SieveTables* sieve) {
  if (n == 0) throw DomainError("log_phi_hat_series: n must be >= 1");
  RationalSeries out(order);
  for (std::uint64_t m = 1; m <= order; ++m) {
    const std::int64_t c = (sieve != nullptr && sieve->contains(n)) ? cn_fast(n, m, *sieve) : cn_fast(n, m);
    if (c != 0) out.set_coefficient(m, mpq_class(-static_cast<long>(c), static_cast<unsigned long>(m)));
  }
  out.require_zero_constant("log_phi_hat_series");
  return out;
}

RationalSeries log_truncated_P(std::uint64_t n_max, std::size_t order) {
  if (n_max == 0) throw DomainError("log_truncated_P: N must be >= 1");
  if (order != 0 && n_max > kMaxSeriesWork / order) {
    throw ResourceError("log_truncated_P: N * M = " + std::to_string(n_max) + " * " + std::to_string(order) +
                        " exceeds the work ceiling");
  }
  const SieveTables sieve = build_sieve(n_max);
  RationalSeries out(order);
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    RationalSeries term = log_phi_hat_series(n, order, &sieve);
    term *= mpq_class(-1L, static_cast<unsigned long>(n));
    out += term;
  }
  out.require_zero_constant("log_truncated_P");
  return out;
}

SeriesComparison series_equal(const RationalSeries& a, const RationalSeries& b) {
  if (a.order() != b.order()) {
    throw DomainError("series_equal: order mismatch " + std::to_string(a.order()) + " vs " +
                      std::to_string(b.order()));
  }
  for (std::size_t k = 0; k <= a.order(); ++k) {
    if (a.coefficient(k) != b.coefficient(k)) {
      return {false, SeriesMismatch{k, a.coefficient(k), b.coefficient(k)}};
    }
  }
  return {true, std::nullopt};
}

}  // namespace cyclolab
