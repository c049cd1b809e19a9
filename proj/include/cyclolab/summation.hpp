#pragma once

#include "cyclolab/real.hpp"

namespace cyclolab {

// Neumaier-compensated accumulator at a fixed precision. Also tracks sum |t|,
// which scales the error bound:
//   |result - exact| <= (2u + 2 n u^2) * sum|t|.
class CompensatedSum {
 public:
  explicit CompensatedSum(Bits bits);

  void add(const Real& term);
  /// Adds numerator / denominator, rounding the quotient once.
  void add_ratio(long numerator, unsigned long denominator);

  Real result() const;
  const Real& abs_total() const { return abs_total_; }
  unsigned long long count() const { return count_; }
  /// Summation error bound, excluding errors already present in the terms.
  Real error_bound() const;

 private:
  void accumulate(mpfr_srcptr term);

  Real sum_;
  Real compensation_;
  Real abs_total_;
  Real scratch_;
  Real low_;
  Real term_;
  unsigned long long count_ = 0;
};

}  // namespace cyclolab
