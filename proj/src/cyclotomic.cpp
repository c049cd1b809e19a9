#include "cyclolab/cyclotomic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <string>

#include "cyclolab/arith.hpp"
#include "cyclolab/errors.hpp"

namespace cyclolab {

IntPoly::IntPoly(std::vector<mpz_class> coefficients) : coeffs_(std::move(coefficients)) { trim(); }

IntPoly::IntPoly(std::initializer_list<long> coefficients) {
  coeffs_.reserve(coefficients.size());
  for (long c : coefficients) coeffs_.emplace_back(c);
  trim();
}

IntPoly IntPoly::power_minus_one(std::uint64_t n) {
  std::vector<mpz_class> c(n + 1);
  c[0] = -1;
  c[n] += 1;
  return IntPoly(std::move(c));
}

void IntPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

mpz_class IntPoly::content() const {
  mpz_class g = 0;
  for (const auto& c : coeffs_) g = gcd(g, c);
  return g;
}

bool IntPoly::is_palindromic() const {
  return std::equal(coeffs_.begin(), coeffs_.end(), coeffs_.rbegin());
}

IntPoly IntPoly::truncated(std::size_t max_degree) const {
  if (coeffs_.size() <= max_degree + 1) return *this;
  return IntPoly(std::vector<mpz_class>(coeffs_.begin(), coeffs_.begin() + static_cast<long>(max_degree + 1)));
}

IntPoly operator+(const IntPoly& a, const IntPoly& b) {
  std::vector<mpz_class> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
  return IntPoly(std::move(c));
}

IntPoly operator-(const IntPoly& a, const IntPoly& b) {
  std::vector<mpz_class> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] -= b.coeffs_[i];
  return IntPoly(std::move(c));
}

IntPoly operator*(const IntPoly& a, const IntPoly& b) {
  if (a.is_zero() || b.is_zero()) return IntPoly();
  std::vector<mpz_class> c(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return IntPoly(std::move(c));
}

IntPoly IntPoly::divide_exact(const IntPoly& divisor) const {
  if (divisor.is_zero()) throw DomainError("IntPoly::divide_exact: division by zero polynomial");
  if (is_zero()) return IntPoly();
  if (degree() < divisor.degree()) throw DomainError("IntPoly::divide_exact: divisor has larger degree");
  std::vector<mpz_class> rem = coeffs_;
  const auto& d = divisor.coeffs_;
  const mpz_class& lead = d.back();
  const std::size_t shift_max = rem.size() - d.size();
  std::vector<mpz_class> q(shift_max + 1);
  for (std::size_t s = shift_max + 1; s-- > 0;) {
    mpz_class& top = rem[s + d.size() - 1];
    if (top == 0) continue;
    if (mpz_divisible_p(top.get_mpz_t(), lead.get_mpz_t()) == 0) {
      throw DomainError("IntPoly::divide_exact: quotient is not integral");
    }
    q[s] = top / lead;
    for (std::size_t j = 0; j < d.size(); ++j) rem[s + j] -= q[s] * d[j];
  }
  for (const auto& r : rem) {
    if (r != 0) throw DomainError("IntPoly::divide_exact: nonzero remainder");
  }
  return IntPoly(std::move(q));
}

HPComplex IntPoly::evaluate(const HPComplex& z) const {
  HPComplex acc(z.precision());
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= z;
    acc.re += Real(*it, z.precision());
  }
  return acc;
}

std::string IntPoly::to_string(char variable) const {
  if (is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (std::size_t k = coeffs_.size(); k-- > 0;) {
    const mpz_class& c = coeffs_[k];
    if (c == 0) continue;
    const mpz_class mag = abs(c);
    if (first) {
      if (c < 0) out << '-';
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (k == 0 || mag != 1) out << mag.get_str();
    if (k >= 1) out << variable;
    if (k >= 2) out << '^' << k;
  }
  return out.str();
}

IntPoly cyclotomic(std::uint64_t n) {
  if (n == 0) throw DomainError("cyclotomic: n must be >= 1");
  const auto divs = divisors(n);
  std::map<std::uint64_t, IntPoly> built;
  for (std::uint64_t d : divs) {
    IntPoly p = IntPoly::power_minus_one(d);
    for (const auto& [e, phi_e] : built) {
      if (d % e == 0) p = p.divide_exact(phi_e);
    }
    built.emplace(d, std::move(p));
  }
  return built.at(n);
}

IntPoly cyclotomic_mobius(std::uint64_t n) {
  if (n == 0) throw DomainError("cyclotomic_mobius: n must be >= 1");
  IntPoly numerator{1};
  IntPoly denominator{1};
  for (std::uint64_t d : divisors(n)) {
    const int mu = mobius(n / d);
    if (mu == 1) numerator = numerator * IntPoly::power_minus_one(d);
    if (mu == -1) denominator = denominator * IntPoly::power_minus_one(d);
  }
  return numerator.divide_exact(denominator);
}

IntPoly cyclotomic_hat(std::uint64_t n) {
  if (n == 1) return IntPoly{1, -1};
  return cyclotomic(n);
}

namespace {

void require_inside_disk(const HPComplex& z, const char* who) {
  if (!(norm(z) < 1L)) throw DomainError(std::string(who) + ": requires |z| < 1");
}

HPComplex power(const HPComplex& z, std::uint64_t e) {
  HPComplex result(Real(1, z.precision()));
  HPComplex base = z;
  while (e > 0) {
    if (e & 1U) result *= base;
    e >>= 1U;
    if (e > 0) base *= base;
  }
  return result;
}

HPComplex widened(const HPComplex& z, Bits bits) {
  return HPComplex(z.re.rounded(std::max(bits, z.re.precision())), z.im.rounded(std::max(bits, z.im.precision())));
}

// m(x) = sum_{k <= x} mu(k) / k for x = 0..n.
std::vector<Real> mertens_weights(std::uint64_t n, Bits bits) {
  const SieveTables sieve = build_sieve(std::max<std::uint64_t>(n, 1));
  std::vector<Real> out;
  out.reserve(n + 1);
  out.emplace_back(bits);
  Real acc(bits);
  Real term(bits);
  for (std::uint64_t k = 1; k <= n; ++k) {
    if (sieve.mu[k] != 0) {
      mpfr_set_si(term.raw(), sieve.mu[k], MPFR_RNDN);
      mpfr_div_ui(term.raw(), term.raw(), k, MPFR_RNDN);
      acc += term;
    }
    out.push_back(acc);
  }
  return out;
}

// L[d] = Log(1 - z^d), d = 1..n; L[0] unused.
std::vector<HPComplex> log_factor_table(const HPComplex& z, std::uint64_t n, Bits bits) {
  std::vector<HPComplex> out;
  out.reserve(n + 1);
  out.emplace_back(bits);
  HPComplex zd = z;
  for (std::uint64_t d = 1; d <= n; ++d) {
    out.push_back(log1p(-zd));
    if (d < n) zd *= z;
  }
  return out;
}

struct Regrouped {
  HPComplex log_value;
  Real error_estimate;
};

// -sum_{d <= n} L[d] m(n / d) / d, with a first-order rounding estimate:
// L[d] carries relative error ~4(d + 4)u from the power chain, m(x) ~2xu, and
// the final sum ~nu, all against weights |L[d]| / d since |m(x)| <= 1.
Regrouped regroup(const std::vector<HPComplex>& logs, const std::vector<Real>& weights, std::uint64_t n,
                  Bits bits) {
  HPComplex acc(bits);
  HPComplex term(bits);
  double weighted = 0.0;
  for (std::uint64_t d = 1; d <= n; ++d) {
    const Real& w = weights[n / d];
    if (w.is_zero()) continue;
    mpfr_mul(term.re.raw(), logs[d].re.raw(), w.raw(), MPFR_RNDN);
    mpfr_mul(term.im.raw(), logs[d].im.raw(), w.raw(), MPFR_RNDN);
    mpfr_div_ui(term.re.raw(), term.re.raw(), d, MPFR_RNDN);
    mpfr_div_ui(term.im.raw(), term.im.raw(), d, MPFR_RNDN);
    acc -= term;
    weighted += abs(logs[d]).to_double() / static_cast<double>(d);
  }
  Real estimate = unit_roundoff(bits) * Real(weighted * 1.01 + 1e-300, bits) * static_cast<long>(7 * n + 16);
  return {std::move(acc), std::move(estimate)};
}

}  // namespace

HPComplex log_phi_hat(std::uint64_t n, const HPComplex& z) {
  if (n == 0) throw DomainError("log_phi_hat: n must be >= 1");
  require_inside_disk(z, "log_phi_hat");
  const Bits bits = z.precision();
  HPComplex sum(bits);
  for (std::uint64_t k = 1; k <= n; ++k) {
    if (std::gcd(k, n) != 1) continue;
    sum += log1p(-(z * root_of_unity(static_cast<std::int64_t>(k), n, bits)));
  }
  return sum;
}

HPComplex log_phi_hat_divisor(std::uint64_t n, const HPComplex& z) {
  if (n == 0) throw DomainError("log_phi_hat_divisor: n must be >= 1");
  require_inside_disk(z, "log_phi_hat_divisor");
  HPComplex sum(z.precision());
  for (std::uint64_t d : divisors(n)) {
    const int mu = mobius(n / d);
    if (mu == 0) continue;
    HPComplex term = log1p(-power(z, d));
    if (mu > 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  return sum;
}

ProductValue truncated_product(std::uint64_t n, const HPComplex& z, const ProductOptions& options) {
  if (n == 0) throw DomainError("truncated_product: N must be >= 1");
  require_inside_disk(z, "truncated_product");
  const Real tolerance = unit_roundoff(static_cast<Bits>(options.precision / 2));
  for (Bits bits = options.precision;; bits *= 2) {
    const HPComplex zw = widened(z, bits);
    const auto logs = log_factor_table(zw, n, bits);
    const auto weights = mertens_weights(n, bits);
    Regrouped r = regroup(logs, weights, n, bits);
    if (r.error_estimate <= tolerance) {
      HPComplex value = exp(r.log_value);
      return {std::move(r.log_value), std::move(value), n, z, bits, std::move(r.error_estimate)};
    }
    if (bits * 2 > options.max_precision) {
      throw PrecisionError("truncated_product: error estimate " + r.error_estimate.to_string(6) +
                           " above tolerance at " + std::to_string(bits) + " bits");
    }
  }
}

GridStudy boundary_grid_study(const std::vector<std::uint64_t>& n_list, const std::vector<Real>& radii,
                              std::uint64_t angle_count, Bits precision) {
  if (n_list.empty() || radii.empty() || angle_count == 0) {
    throw DomainError("boundary_grid_study: empty N list, radius list, or angle count");
  }
  for (std::uint64_t n : n_list) {
    if (n == 0) throw DomainError("boundary_grid_study: N must be >= 1");
  }
  for (const Real& r : radii) {
    if (!(r > 0L) || !(r < 1L)) throw DomainError("boundary_grid_study: radii must lie in (0, 1)");
  }
  const std::uint64_t n_top = *std::max_element(n_list.begin(), n_list.end());
  const auto weights = mertens_weights(n_top, precision);
  const Real tolerance = unit_roundoff(static_cast<Bits>(precision / 2));

  GridStudy study{n_list, radii, angle_count, precision, {}};
  const std::size_t per_n = radii.size() * angle_count;
  study.points.resize(n_list.size() * per_n);
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const Real r = radii[ri].rounded(std::max(precision, radii[ri].precision()));
    for (std::uint64_t j = 0; j < angle_count; ++j) {
      const HPComplex unit = root_of_unity(static_cast<std::int64_t>(j), angle_count, precision);
      const HPComplex z = unit * r;
      const auto logs = log_factor_table(z, n_top, precision);
      Real theta = Real::pi(precision) * static_cast<long>(2 * j);
      theta /= static_cast<long>(angle_count);
      for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        Regrouped g = regroup(logs, weights, n_list[ni], precision);
        if (!(g.error_estimate <= tolerance)) {
          throw PrecisionError("boundary_grid_study: error estimate above tolerance; raise precision");
        }
        study.points[ni * per_n + ri * angle_count + j] =
            GridPoint{n_list[ni], radii[ri], j, theta, exp(g.log_value.re)};
      }
    }
  }
  return study;
}

std::vector<GridRowSummary> GridStudy::summarize() const {
  std::vector<GridRowSummary> rows;
  if (angle_count == 0) return rows;
  for (std::size_t start = 0; start + angle_count <= points.size(); start += angle_count) {
    const GridPoint& first = points[start];
    GridRowSummary row{first.n, first.radius, first.abs_value, first.abs_value, Real(precision), 0, 0, 0};
    for (std::size_t k = start; k < start + angle_count; ++k) {
      const GridPoint& p = points[k];
      if (p.abs_value < row.min_abs) row.min_abs = p.abs_value;
      if (p.abs_value > row.max_abs) row.max_abs = p.abs_value;
      Real deviation = abs(p.abs_value - 1L);
      if (deviation > row.max_deviation) {
        row.max_deviation = deviation;
        row.angle_index_at_max = p.angle_index;
      }
      if (deviation > Real(0.5, precision)) ++row.spike_count;
    }
    row.root_order_at_max = angle_count / std::gcd(angle_count, row.angle_index_at_max);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cyclolab
