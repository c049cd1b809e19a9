#include "cyclolab/summation.hpp"

namespace cyclolab {

CompensatedSum::CompensatedSum(Bits bits)
    : sum_(bits), compensation_(bits), abs_total_(bits), scratch_(bits), low_(bits), term_(bits) {}

void CompensatedSum::accumulate(mpfr_srcptr t) {
  mpfr_ptr s = sum_.raw();
  mpfr_ptr next = scratch_.raw();
  mpfr_ptr low = low_.raw();
  mpfr_add(next, s, t, MPFR_RNDN);
  // Recover the low-order part lost in s + t.
  if (mpfr_cmpabs(s, t) >= 0) {
    mpfr_sub(low, s, next, MPFR_RNDN);
    mpfr_add(low, low, t, MPFR_RNDN);
  } else {
    mpfr_sub(low, t, next, MPFR_RNDN);
    mpfr_add(low, low, s, MPFR_RNDN);
  }
  mpfr_add(compensation_.raw(), compensation_.raw(), low, MPFR_RNDN);
  mpfr_swap(s, next);
  if (mpfr_sgn(t) >= 0) {
    mpfr_add(abs_total_.raw(), abs_total_.raw(), t, MPFR_RNDN);
  } else {
    mpfr_sub(abs_total_.raw(), abs_total_.raw(), t, MPFR_RNDN);
  }
  ++count_;
}

void CompensatedSum::add(const Real& term) { accumulate(term.raw()); }

void CompensatedSum::add_ratio(long numerator, unsigned long denominator) {
  mpfr_set_si(term_.raw(), numerator, MPFR_RNDN);
  mpfr_div_ui(term_.raw(), term_.raw(), denominator, MPFR_RNDN);
  accumulate(term_.raw());
}

Real CompensatedSum::result() const { return sum_ + compensation_; }

Real CompensatedSum::error_bound() const {
  const Bits bits = sum_.precision();
  const Real u = unit_roundoff(bits);
  Real factor = u * 2L + u * u * static_cast<long>(2 * count_ + 2);
  return factor * abs_total_ * Real(1.01, bits);
}

}  // namespace cyclolab
