#include "cyclolab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cyclolab/errors.hpp"

namespace cyclolab {

namespace {

constexpr unsigned kTrialBound = 1000;

const std::vector<unsigned>& small_primes() {
  static const std::vector<unsigned> primes = [] {
    std::vector<bool> composite(kTrialBound + 1, false);
    std::vector<unsigned> out;
    for (unsigned i = 2; i <= kTrialBound; ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (unsigned j = i * i; j <= kTrialBound; j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

mpz_class brent_rho(const mpz_class& n, unsigned long c) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  mpz_class y = 2, x, ys, q = 1, g = 1, diff;
  const unsigned long m = 128;
  unsigned long r = 1;
  auto step = [&](mpz_class& v) {
    v = v * v + c;
    v %= n;
  };
  while (g == 1) {
    x = y;
    for (unsigned long i = 0; i < r; ++i) step(y);
    unsigned long k = 0;
    while (k < r && g == 1) {
      ys = y;
      const unsigned long todo = std::min(m, r - k);
      for (unsigned long i = 0; i < todo; ++i) {
        step(y);
        diff = x - y;
        q = (q * abs(diff)) % n;
      }
      g = gcd(q, n);
      k += m;
    }
    r *= 2;
  }
  if (g == n) {
    do {
      step(ys);
      diff = x - ys;
      g = gcd(abs(diff), n);
    } while (g == 1);
  }
  return g;
}

bool is_probable_prime(const mpz_class& n) { return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0; }

// Appends the prime factors of n (> 1, free of small primes) to out, unsorted.
void split_large(const mpz_class& n, std::vector<mpz_class>& out) {
  if (n == 1) return;
  if (is_probable_prime(n)) {
    out.push_back(n);
    return;
  }
  // Perfect powers defeat rho's cycle detection often enough to check first.
  const std::size_t max_k = mpz_sizeinbase(n.get_mpz_t(), 2);
  for (unsigned long k = max_k; k >= 2; --k) {
    mpz_class root;
    if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0) {
      std::vector<mpz_class> base;
      split_large(root, base);
      for (unsigned long i = 0; i < k; ++i) out.insert(out.end(), base.begin(), base.end());
      return;
    }
  }
  for (unsigned long c = 1;; ++c) {
    mpz_class d = brent_rho(n, c);
    if (d != n && d != 1) {
      split_large(d, out);
      split_large(mpz_class(n / d), out);
      return;
    }
  }
}

Factorization collect(const mpz_class& n, std::vector<mpz_class> primes) {
  std::sort(primes.begin(), primes.end());
  Factorization f{n, {}};
  for (auto& p : primes) {
    if (!f.factors.empty() && f.factors.back().prime == p) {
      ++f.factors.back().exponent;
    } else {
      f.factors.push_back({p, 1});
    }
  }
  return f;
}

}  // namespace

bool Factorization::valid() const {
  if (n < 1) return false;
  mpz_class product = 1;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& pp = factors[i];
    if (pp.exponent < 1 || pp.prime < 2) return false;
    if (i > 0 && !(factors[i - 1].prime < pp.prime)) return false;
    mpz_class power;
    mpz_pow_ui(power.get_mpz_t(), pp.prime.get_mpz_t(), pp.exponent);
    product *= power;
  }
  return product == n;
}

Factorization factorize(const mpz_class& n, const SieveTables* sieve) {
  if (n < 1) throw DomainError("factorize: n must be >= 1");
  if (sieve != nullptr && n.fits_ulong_p() && sieve->contains(n.get_ui())) {
    return factorize(static_cast<std::uint64_t>(n.get_ui()), sieve);
  }
  std::vector<mpz_class> primes;
  mpz_class rest = n;
  for (unsigned p : small_primes()) {
    if (rest == 1) break;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p) != 0) {
      rest /= p;
      primes.emplace_back(p);
    }
  }
  split_large(rest, primes);
  return collect(n, std::move(primes));
}

Factorization factorize(std::uint64_t n, const SieveTables* sieve) {
  if (n == 0) throw DomainError("factorize: n must be >= 1");
  if (sieve != nullptr && sieve->contains(n)) {
    Factorization f{mpz_class(static_cast<unsigned long>(n)), {}};
    std::uint64_t rest = n;
    while (rest > 1) {
      const std::uint32_t p = sieve->smallest_prime_factor[rest];
      unsigned e = 0;
      while (rest % p == 0) {
        rest /= p;
        ++e;
      }
      f.factors.push_back({mpz_class(static_cast<unsigned long>(p)), e});
    }
    return f;
  }
  return factorize(mpz_class(static_cast<unsigned long>(n)), nullptr);
}

int mobius(const Factorization& f) {
  int sign = 1;
  for (const auto& pp : f.factors) {
    if (pp.exponent > 1) return 0;
    sign = -sign;
  }
  return sign;
}

mpz_class totient(const Factorization& f) {
  mpz_class out = 1;
  for (const auto& pp : f.factors) {
    mpz_class power;
    mpz_pow_ui(power.get_mpz_t(), pp.prime.get_mpz_t(), pp.exponent - 1);
    out *= power * (pp.prime - 1);
  }
  return out;
}

mpz_class sigma(const Factorization& f) {
  mpz_class out = 1;
  for (const auto& pp : f.factors) {
    mpz_class power;
    mpz_pow_ui(power.get_mpz_t(), pp.prime.get_mpz_t(), pp.exponent + 1);
    out *= (power - 1) / (pp.prime - 1);
  }
  return out;
}

int mobius(std::uint64_t n) { return mobius(factorize(n)); }

std::uint64_t totient(std::uint64_t n) { return totient(factorize(n)).get_ui(); }

std::uint64_t sigma(std::uint64_t n) {
  const mpz_class s = sigma(factorize(n));
  if (!s.fits_ulong_p()) throw std::overflow_error("sigma(n) exceeds 64 bits");
  return s.get_ui();
}

std::vector<std::uint64_t> divisors(std::uint64_t n) {
  const Factorization f = factorize(n);
  std::vector<std::uint64_t> out{1};
  for (const auto& pp : f.factors) {
    const std::uint64_t p = pp.prime.get_ui();
    const std::size_t existing = out.size();
    std::uint64_t power = 1;
    for (unsigned e = 1; e <= pp.exponent; ++e) {
      power *= p;
      for (std::size_t i = 0; i < existing; ++i) out.push_back(out[i] * power);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DivisorClasses divisor_classes_mod4(std::uint64_t n) {
  const Factorization f = factorize(n);
  // Odd divisors only; track how many fall in each class as primes are folded in.
  DivisorClasses c{1, 0};
  for (const auto& pp : f.factors) {
    const std::uint64_t p = pp.prime.get_ui();
    const std::uint64_t e = pp.exponent;
    if (p == 2) continue;
    if (p % 4 == 1) {
      c.d1 *= e + 1;
      c.d3 *= e + 1;
    } else {
      const std::uint64_t even = e / 2 + 1;  // p^j with j even is 1 mod 4
      const std::uint64_t odd = (e + 1) / 2;
      c = {c.d1 * even + c.d3 * odd, c.d1 * odd + c.d3 * even};
    }
  }
  return c;
}

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && (r > n / r)) --r;
  while ((r + 1) <= n / (r + 1)) ++r;
  return r;
}

std::uint64_t r2_enumerate(std::uint64_t n) {
  if (n == 0) throw DomainError("r2_enumerate: n must be >= 1");
  std::uint64_t count = 0;
  const std::uint64_t top = isqrt(n);
  for (std::uint64_t a = 0; a <= top; ++a) {
    const std::uint64_t rest = n - a * a;
    const std::uint64_t b = isqrt(rest);
    if (b * b != rest) continue;
    count += (a > 0 ? 2 : 1) * (b > 0 ? 2 : 1);
  }
  return count;
}

std::size_t sieve_memory_estimate(std::uint64_t limit) {
  const std::size_t per_entry = sizeof(std::int8_t) + 2 * sizeof(std::uint32_t) + sizeof(std::uint64_t) +
                                sizeof(std::uint32_t);  // last term: temporary prime-power table
  const auto entries = static_cast<long double>(limit) + 1;
  const long double primes_guess = entries / std::max(1.0L, std::log(entries)) * 1.3L * sizeof(std::uint32_t);
  const long double total = entries * per_entry + primes_guess;
  if (total > static_cast<long double>(std::numeric_limits<std::size_t>::max())) {
    return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(total);
}

SieveTables build_sieve(std::uint64_t limit, const SieveOptions& options) {
  if (limit == 0) throw DomainError("build_sieve: limit must be >= 1");
  if (limit >= std::numeric_limits<std::uint32_t>::max()) {
    throw ResourceError("build_sieve: limit " + std::to_string(limit) + " exceeds 32-bit table range");
  }
  const std::size_t need = sieve_memory_estimate(limit);
  if (need > options.memory_ceiling_bytes) {
    throw ResourceError("build_sieve: limit " + std::to_string(limit) + " needs ~" + std::to_string(need) +
                        " bytes, ceiling is " + std::to_string(options.memory_ceiling_bytes));
  }

  const std::size_t size = limit + 1;
  SieveTables t;
  t.limit = limit;
  t.mu.assign(size, 0);
  t.phi.assign(size, 0);
  t.sigma.assign(size, 0);
  t.smallest_prime_factor.assign(size, 0);
  std::vector<std::uint32_t> prime_power(size, 0);  // largest power of spf(n) dividing n
  std::vector<std::uint32_t> primes;

  t.mu[1] = 1;
  t.phi[1] = 1;
  t.sigma[1] = 1;
  t.smallest_prime_factor[1] = 1;
  prime_power[1] = 1;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (t.smallest_prime_factor[i] == 0) {
      t.smallest_prime_factor[i] = static_cast<std::uint32_t>(i);
      primes.push_back(static_cast<std::uint32_t>(i));
      t.mu[i] = -1;
      t.phi[i] = static_cast<std::uint32_t>(i - 1);
      t.sigma[i] = i + 1;
      prime_power[i] = static_cast<std::uint32_t>(i);
    }
    const std::uint32_t spf_i = t.smallest_prime_factor[i];
    for (std::uint32_t p : primes) {
      if (p > spf_i || i * p > limit) break;
      const std::uint64_t n = i * p;
      t.smallest_prime_factor[n] = p;
      if (p == spf_i) {
        t.mu[n] = 0;
        t.phi[n] = t.phi[i] * p;
        prime_power[n] = prime_power[i] * p;
        const std::uint64_t rest = i / prime_power[i];
        const std::uint64_t pe = prime_power[n];
        t.sigma[n] = t.sigma[rest] * ((pe * p - 1) / (p - 1));
      } else {
        t.mu[n] = static_cast<std::int8_t>(-t.mu[i]);
        t.phi[n] = t.phi[i] * (p - 1);
        t.sigma[n] = t.sigma[i] * (p + 1);
        prime_power[n] = p;
      }
    }
  }
  return t;
}

std::vector<mpq_class> bernoulli_numbers(std::size_t count) {
  std::vector<mpq_class> b(count);
  if (count == 0) return b;
  b[0] = 1;
  // B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j
  for (std::size_t m = 1; m < count; ++m) {
    mpq_class acc = 0;
    mpz_class binom = 1;  // C(m+1, 0)
    for (std::size_t j = 0; j < m; ++j) {
      acc += binom * b[j];
      binom = binom * static_cast<unsigned long>(m + 1 - j) / static_cast<unsigned long>(j + 1);
    }
    b[m] = -acc / static_cast<unsigned long>(m + 1);
    b[m].canonicalize();
  }
  return b;
}

ZetaValue zeta(const Real& s, Bits precision) {
  if (!(s > 1L)) throw DomainError("zeta: s must be > 1, got " + s.to_string(12));
  if (precision < 2) throw DomainError("zeta: precision must be >= 2 bits");

  // Guard bits cover the size of zeta(s) ~ 1/(s-1) near s = 1 and the summation error.
  const double s_minus_one = (s - 1L).to_double();
  const long magnitude_bits = std::max(0L, static_cast<long>(std::ceil(-std::log2(s_minus_one)))) + 2;
  const Bits wp = std::max<Bits>(precision + magnitude_bits + 32, s.precision());
  const Real sw = s.rounded(wp);
  const Real target = unit_roundoff(precision + 4);
  const std::size_t max_terms = static_cast<std::size_t>(precision) / 2 + 16;
  const auto bern = bernoulli_numbers(2 * max_terms + 2);

  for (std::uint64_t n_cut = 16 + static_cast<std::uint64_t>(precision) / 5;; n_cut *= 2) {
    const Real big_n(n_cut, wp);
    Real head(wp);
    for (std::uint64_t n = 1; n < n_cut; ++n) head += pow(Real(n, wp), -sw);
    const Real n_pow = pow(big_n, -sw);  // N^-s
    Real value = head + n_pow * big_n / (sw - 1L) + ldexp(n_pow, -1);

    // Correction terms T_k = B_2k/(2k)! (s)_{2k-1} N^{-s-2k+1}; remainder after p terms <= |T_p|.
    Real rising = sw;                  // (s)_1
    Real n_power = n_pow / big_n;      // N^{-s-1}
    mpz_class factorial = 2;           // (2k)!
    const Real inv_n2 = 1L / (big_n * big_n);
    Real previous_abs(wp);
    bool converged = false;
    Real last_abs(wp);
    std::size_t used = 0;
    for (std::size_t k = 1; k <= max_terms; ++k) {
      Real term = Real(mpq_class(bern[2 * k] / factorial), wp) * rising * n_power;
      Real term_abs = abs(term);
      if (k > 1 && term_abs > previous_abs) break;  // asymptotic series turned; enlarge N
      value += term;
      used = k;
      last_abs = term_abs;
      if (term_abs < target) {
        converged = true;
        break;
      }
      previous_abs = term_abs;
      // (s)_{2k+1} = (s)_{2k-1} (s+2k-1)(s+2k)
      rising *= sw + static_cast<long>(2 * k - 1);
      rising *= sw + static_cast<long>(2 * k);
      n_power *= inv_n2;
      factorial *= static_cast<unsigned long>((2 * k + 1) * (2 * k + 2));
    }
    if (!converged) continue;

    // Rounding: every operation contributes at most u * (its operand magnitudes),
    // all bounded by value + the integral term; 4 ops per step is generous.
    const Real u = unit_roundoff(wp);
    const Real magnitude = abs(value) + big_n * n_pow / (sw - 1L) + 1L;
    Real rounding = u * magnitude * static_cast<long>(4 * (n_cut + used) + 16);
    Real bound = last_abs + rounding;
    // Slack for the bound's own evaluation in round-to-nearest.
    bound *= Real(1.0 + 1.0 / 1024, wp);
    return {std::move(value), std::move(bound)};
  }
}

}  // namespace cyclolab
