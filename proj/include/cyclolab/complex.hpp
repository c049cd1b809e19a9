#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>

#include "cyclolab/real.hpp"

namespace cyclolab {

/// Complex number with MPFR parts. precision() is the larger of the two parts.
struct HPComplex {
  Real re;
  Real im;

  explicit HPComplex(Bits bits = kDefaultPrecision) : re(bits), im(bits) {}
  HPComplex(Real real_part, Real imag_part) : re(std::move(real_part)), im(std::move(imag_part)) {}
  /// Purely real value.
  explicit HPComplex(const Real& real_part) : re(real_part), im(real_part.precision()) {}

  /// r * e^{i theta}.
  static HPComplex polar(const Real& r, const Real& theta);

  Bits precision() const { return std::max(re.precision(), im.precision()); }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  HPComplex& operator+=(const HPComplex& rhs);
  HPComplex& operator-=(const HPComplex& rhs);
  HPComplex& operator*=(const HPComplex& rhs);
  HPComplex& operator*=(const Real& rhs);
  HPComplex& operator/=(long rhs);
};

HPComplex operator+(const HPComplex& a, const HPComplex& b);
HPComplex operator-(const HPComplex& a, const HPComplex& b);
HPComplex operator*(const HPComplex& a, const HPComplex& b);
HPComplex operator*(const HPComplex& a, const Real& b);
HPComplex operator-(const HPComplex& a);

/// |z|^2
Real norm(const HPComplex& z);
Real abs(const HPComplex& z);
/// Argument in (-pi, pi].
Real arg(const HPComplex& z);
HPComplex exp(const HPComplex& z);
/// Principal logarithm, imaginary part in (-pi, pi].
HPComplex log(const HPComplex& z);
/// Principal Log(1 + w), accurate for small |w|.
HPComplex log1p(const HPComplex& w);

/// e^{2 pi i k / n}; k is reduced mod n before the trig evaluation.
HPComplex root_of_unity(std::int64_t k, std::uint64_t n, Bits bits);

}  // namespace cyclolab
