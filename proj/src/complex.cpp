#include "cyclolab/complex.hpp"

#include "cyclolab/errors.hpp"

namespace cyclolab {

HPComplex HPComplex::polar(const Real& r, const Real& theta) {
  const Bits bits = std::max(r.precision(), theta.precision());
  HPComplex out(bits);
  mpfr_sin_cos(out.im.raw(), out.re.raw(), theta.raw(), MPFR_RNDN);
  out.re *= r;
  out.im *= r;
  return out;
}

HPComplex& HPComplex::operator+=(const HPComplex& rhs) {
  re += rhs.re;
  im += rhs.im;
  return *this;
}

HPComplex& HPComplex::operator-=(const HPComplex& rhs) {
  re -= rhs.re;
  im -= rhs.im;
  return *this;
}

HPComplex& HPComplex::operator*=(const HPComplex& rhs) {
  Real new_re = re * rhs.re - im * rhs.im;
  im = re * rhs.im + im * rhs.re;
  re = std::move(new_re);
  return *this;
}

HPComplex& HPComplex::operator*=(const Real& rhs) {
  re *= rhs;
  im *= rhs;
  return *this;
}

HPComplex& HPComplex::operator/=(long rhs) {
  re /= rhs;
  im /= rhs;
  return *this;
}

HPComplex operator+(const HPComplex& a, const HPComplex& b) {
  HPComplex out = a;
  out += b;
  return out;
}

HPComplex operator-(const HPComplex& a, const HPComplex& b) {
  HPComplex out = a;
  out -= b;
  return out;
}

HPComplex operator*(const HPComplex& a, const HPComplex& b) {
  HPComplex out = a;
  out *= b;
  return out;
}

HPComplex operator*(const HPComplex& a, const Real& b) {
  HPComplex out = a;
  out *= b;
  return out;
}

HPComplex operator-(const HPComplex& a) { return HPComplex(-a.re, -a.im); }

Real norm(const HPComplex& z) { return z.re * z.re + z.im * z.im; }

Real abs(const HPComplex& z) { return hypot(z.re, z.im); }

Real arg(const HPComplex& z) { return atan2(z.im, z.re); }

HPComplex exp(const HPComplex& z) { return HPComplex::polar(exp(z.re), z.im); }

HPComplex log(const HPComplex& z) {
  if (z.is_zero()) throw DomainError("log of complex zero");
  return HPComplex(log(abs(z)), arg(z));
}

HPComplex log1p(const HPComplex& w) {
  // log|1+w| = log1p(2 Re w + |w|^2) / 2 keeps relative accuracy when |w| is tiny.
  Real t = w.re * 2L + norm(w);
  Real real_part = ldexp(log1p(t), -1);
  Real imag_part = atan2(w.im, w.re + 1L);
  return HPComplex(std::move(real_part), std::move(imag_part));
}

HPComplex root_of_unity(std::int64_t k, std::uint64_t n, Bits bits) {
  if (n == 0) throw DomainError("root_of_unity: n must be positive");
  const auto sn = static_cast<std::int64_t>(n);
  std::int64_t j = k % sn;
  if (j < 0) j += sn;
  if (j == 0) return HPComplex(Real(1, bits));
  // Exact special points avoid spurious residues in imaginary parts.
  if (2 * j == sn) return HPComplex(Real(-1, bits));
  if (4 * j == sn) return HPComplex(Real(0, bits), Real(1, bits));
  if (4 * j == 3 * sn) return HPComplex(Real(0, bits), Real(-1, bits));
  Real theta = Real::pi(bits + 16) * (2 * j);
  theta /= sn;
  HPComplex out = HPComplex::polar(Real(1, bits), theta.rounded(bits + 16));
  return HPComplex(out.re.rounded(bits), out.im.rounded(bits));
}

}  // namespace cyclolab
