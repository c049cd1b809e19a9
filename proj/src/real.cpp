#include "cyclolab/real.hpp"

#include <algorithm>
#include <string>

#include "cyclolab/errors.hpp"

namespace cyclolab {

Real::Real(Bits bits) {
  mpfr_init2(v_, bits);
  mpfr_set_zero(v_, 1);
}

Real::Real(const mpz_class& value, Bits bits) : Real(bits) {
  mpfr_set_z(v_, value.get_mpz_t(), MPFR_RNDN);
}

Real::Real(const mpq_class& value, Bits bits) : Real(bits) {
  mpfr_set_q(v_, value.get_mpq_t(), MPFR_RNDN);
}

Real Real::parse(std::string_view text, Bits bits) {
  Real out(bits);
  std::string s(text);
  if (s.empty()) throw DomainError("not a real number: ''");
  char* end = nullptr;
  mpfr_strtofr(out.v_, s.c_str(), &end, 10, MPFR_RNDN);
  if (end != s.c_str() + s.size() || !out.is_finite()) {
    throw DomainError("not a real number: '" + s + "'");
  }
  return out;
}

Real Real::pi(Bits bits) {
  Real out(bits);
  mpfr_const_pi(out.v_, MPFR_RNDN);
  return out;
}

Real::Real(const Real& other) {
  mpfr_init2(v_, other.precision());
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  // Leave `other` as a valid minimal-precision zero so its destructor is safe.
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, other.v_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(v_, other.precision());
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  if (this != &other) mpfr_swap(v_, other.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real Real::rounded(Bits bits) const {
  Real out(bits);
  mpfr_set(out.v_, v_, MPFR_RNDN);
  return out;
}

namespace {

void widen_to(mpfr_ptr target, Bits bits) {
  if (mpfr_get_prec(target) < bits) mpfr_prec_round(target, bits, MPFR_RNDN);
}

}  // namespace

Real& Real::operator+=(const Real& rhs) {
  widen_to(v_, rhs.precision());
  mpfr_add(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator-=(const Real& rhs) {
  widen_to(v_, rhs.precision());
  mpfr_sub(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator*=(const Real& rhs) {
  widen_to(v_, rhs.precision());
  mpfr_mul(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator/=(const Real& rhs) {
  widen_to(v_, rhs.precision());
  mpfr_div(v_, v_, rhs.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator+=(long rhs) {
  mpfr_add_si(v_, v_, rhs, MPFR_RNDN);
  return *this;
}

Real& Real::operator-=(long rhs) {
  mpfr_sub_si(v_, v_, rhs, MPFR_RNDN);
  return *this;
}

Real& Real::operator*=(long rhs) {
  mpfr_mul_si(v_, v_, rhs, MPFR_RNDN);
  return *this;
}

Real& Real::operator/=(long rhs) {
  mpfr_div_si(v_, v_, rhs, MPFR_RNDN);
  return *this;
}

Real Real::operator-() const {
  Real out(precision());
  mpfr_neg(out.v_, v_, MPFR_RNDN);
  return out;
}

mpz_class Real::round_to_integer() const {
  if (!is_finite()) throw PrecisionError("cannot round a non-finite value");
  mpz_class out;
  Real tmp(precision());
  mpfr_round(tmp.v_, v_);
  mpfr_get_z(out.get_mpz_t(), tmp.v_, MPFR_RNDN);
  return out;
}

std::string Real::to_string(int significant) const {
  char* buffer = nullptr;
  mpfr_asprintf(&buffer, "%.*Re", std::max(significant - 1, 0), v_);
  std::string out(buffer);
  mpfr_free_str(buffer);
  return out;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.v_, b.v_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.v_, b.v_);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }

std::partial_ordering operator<=>(const Real& a, long b) {
  if (mpfr_nan_p(a.v_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp_si(a.v_, b);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

std::partial_ordering Real::compare_double(const Real& a, double b) {
  if (mpfr_nan_p(a.v_) || b != b) return std::partial_ordering::unordered;
  const int c = mpfr_cmp_d(a.v_, b);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

bool operator==(const Real& a, long b) { return !mpfr_nan_p(a.raw()) && mpfr_cmp_si(a.raw(), b) == 0; }

Real operator+(const Real& a, const Real& b) {
  Real out(std::max(a.precision(), b.precision()));
  mpfr_add(out.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return out;
}

Real operator-(const Real& a, const Real& b) {
  Real out(std::max(a.precision(), b.precision()));
  mpfr_sub(out.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return out;
}

Real operator*(const Real& a, const Real& b) {
  Real out(std::max(a.precision(), b.precision()));
  mpfr_mul(out.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return out;
}

Real operator/(const Real& a, const Real& b) {
  Real out(std::max(a.precision(), b.precision()));
  mpfr_div(out.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return out;
}

Real operator+(const Real& a, long b) {
  Real out(a.precision());
  mpfr_add_si(out.raw(), a.raw(), b, MPFR_RNDN);
  return out;
}

Real operator-(const Real& a, long b) {
  Real out(a.precision());
  mpfr_sub_si(out.raw(), a.raw(), b, MPFR_RNDN);
  return out;
}

Real operator*(const Real& a, long b) {
  Real out(a.precision());
  mpfr_mul_si(out.raw(), a.raw(), b, MPFR_RNDN);
  return out;
}

Real operator/(const Real& a, long b) {
  Real out(a.precision());
  mpfr_div_si(out.raw(), a.raw(), b, MPFR_RNDN);
  return out;
}

Real operator*(long a, const Real& b) { return b * a; }

Real operator/(long a, const Real& b) {
  Real out(b.precision());
  mpfr_si_div(out.raw(), a, b.raw(), MPFR_RNDN);
  return out;
}

namespace {

template <typename Fn>
Real unary(const Real& x, Fn fn) {
  Real out(x.precision());
  fn(out.raw(), x.raw(), MPFR_RNDN);
  return out;
}

}  // namespace

Real abs(const Real& x) { return unary(x, mpfr_abs); }
Real sqrt(const Real& x) { return unary(x, mpfr_sqrt); }
Real log(const Real& x) { return unary(x, mpfr_log); }
Real log1p(const Real& x) { return unary(x, mpfr_log1p); }
Real log2(const Real& x) { return unary(x, mpfr_log2); }
Real exp(const Real& x) { return unary(x, mpfr_exp); }
Real sin(const Real& x) { return unary(x, mpfr_sin); }
Real cos(const Real& x) { return unary(x, mpfr_cos); }

Real atan2(const Real& y, const Real& x) {
  Real out(std::max(x.precision(), y.precision()));
  mpfr_atan2(out.raw(), y.raw(), x.raw(), MPFR_RNDN);
  return out;
}

Real pow(const Real& base, const Real& exponent) {
  Real out(std::max(base.precision(), exponent.precision()));
  mpfr_pow(out.raw(), base.raw(), exponent.raw(), MPFR_RNDN);
  return out;
}

Real pow(const Real& base, long exponent) {
  Real out(base.precision());
  mpfr_pow_si(out.raw(), base.raw(), exponent, MPFR_RNDN);
  return out;
}

Real hypot(const Real& a, const Real& b) {
  Real out(std::max(a.precision(), b.precision()));
  mpfr_hypot(out.raw(), a.raw(), b.raw(), MPFR_RNDN);
  return out;
}

Real ldexp(const Real& x, long e) {
  Real out(x.precision());
  mpfr_mul_2si(out.raw(), x.raw(), e, MPFR_RNDN);
  return out;
}

Real max(const Real& a, const Real& b) { return (a < b) ? b : a; }

Real unit_roundoff(Bits bits) { return ldexp(Real(1, bits), -static_cast<long>(bits)); }

}  // namespace cyclolab
