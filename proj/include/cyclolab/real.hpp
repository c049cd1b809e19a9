#pragma once

#include <compare>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>
#include <mpfr.h>

namespace cyclolab {

/// Working precision in bits.
using Bits = mpfr_prec_t;

inline constexpr Bits kDefaultPrecision = 128;

// Owning MPFR value with an explicit bit precision. All rounding is to nearest.
// Binary operations produce a result at the larger of the operand precisions.
class Real {
 public:
  explicit Real(Bits bits = kDefaultPrecision);
  template <std::integral I>
  Real(I value, Bits bits) : Real(bits) {
    if constexpr (std::is_signed_v<I>) {
      mpfr_set_si(v_, static_cast<long>(value), MPFR_RNDN);
    } else {
      mpfr_set_ui(v_, static_cast<unsigned long>(value), MPFR_RNDN);
    }
  }
  template <std::floating_point F>
  Real(F value, Bits bits) : Real(bits) {
    mpfr_set_d(v_, static_cast<double>(value), MPFR_RNDN);
  }
  Real(const mpz_class& value, Bits bits);
  Real(const mpq_class& value, Bits bits);
  /// Parses a decimal literal ("0.3", "1e-3"); throws DomainError on junk.
  static Real parse(std::string_view text, Bits bits);
  static Real pi(Bits bits);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  Bits precision() const { return mpfr_get_prec(v_); }
  /// Copy rounded to a different precision.
  Real rounded(Bits bits) const;

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  Real& operator+=(const Real& rhs);
  Real& operator-=(const Real& rhs);
  Real& operator*=(const Real& rhs);
  Real& operator/=(const Real& rhs);
  Real& operator+=(long rhs);
  Real& operator-=(long rhs);
  Real& operator*=(long rhs);
  Real& operator/=(long rhs);
  // Mixed arithmetic with doubles would silently truncate through `long`.
  template <std::floating_point F>
  Real& operator+=(F) = delete;
  template <std::floating_point F>
  Real& operator-=(F) = delete;
  template <std::floating_point F>
  Real& operator*=(F) = delete;
  template <std::floating_point F>
  Real& operator/=(F) = delete;
  Real operator-() const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  /// Nearest integer (ties away from zero).
  mpz_class round_to_integer() const;
  /// Scientific notation with `significant` digits, e.g. "1.6449340668482264365e+00".
  std::string to_string(int significant = 20) const;

  friend std::partial_ordering operator<=>(const Real& a, const Real& b);
  friend bool operator==(const Real& a, const Real& b);
  friend std::partial_ordering operator<=>(const Real& a, long b);
  friend bool operator==(const Real& a, long b);
  template <std::floating_point F>
  friend std::partial_ordering operator<=>(const Real& a, F b) {
    return compare_double(a, static_cast<double>(b));
  }

 private:
  static std::partial_ordering compare_double(const Real& a, double b);

  mpfr_t v_;
};

Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator+(const Real& a, long b);
Real operator-(const Real& a, long b);
Real operator*(const Real& a, long b);
Real operator/(const Real& a, long b);
Real operator*(long a, const Real& b);
Real operator/(long a, const Real& b);
template <std::floating_point F>
Real operator+(const Real&, F) = delete;
template <std::floating_point F>
Real operator-(const Real&, F) = delete;
template <std::floating_point F>
Real operator*(const Real&, F) = delete;
template <std::floating_point F>
Real operator/(const Real&, F) = delete;
template <std::floating_point F>
Real operator*(F, const Real&) = delete;

Real abs(const Real& x);
Real sqrt(const Real& x);
Real log(const Real& x);
Real log1p(const Real& x);
Real log2(const Real& x);
Real exp(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real atan2(const Real& y, const Real& x);
Real pow(const Real& base, const Real& exponent);
Real pow(const Real& base, long exponent);
Real hypot(const Real& a, const Real& b);
/// x * 2^e, exact.
Real ldexp(const Real& x, long e);
Real max(const Real& a, const Real& b);

/// Unit roundoff 2^(-bits) for round-to-nearest at `bits` precision.
Real unit_roundoff(Bits bits);

}  // namespace cyclolab
