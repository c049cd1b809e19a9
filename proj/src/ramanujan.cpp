#include "cyclolab/ramanujan.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>

#include "cyclolab/errors.hpp"
#include "cyclolab/summation.hpp"

namespace cyclolab {

namespace {

void require_positive(std::uint64_t n, std::uint64_t m, const char* who) {
  if (n == 0 || m == 0) throw DomainError(std::string(who) + ": n and m must be >= 1");
}

std::int64_t round_checked(const HPComplex& sum, Bits precision, std::uint64_t n, std::uint64_t m) {
  const Real tolerance = ldexp(Real(1, precision), -static_cast<long>(precision / 2));
  const mpz_class nearest = sum.re.round_to_integer();
  const Real distance = abs(sum.re - Real(nearest, sum.re.precision()));
  if (abs(sum.im) > tolerance || distance > tolerance) {
    throw PrecisionError("cn_bruteforce(" + std::to_string(n) + ", " + std::to_string(m) + "): sum " +
                         sum.re.to_string(12) + " + " + sum.im.to_string(12) + "i is not within 2^-" +
                         std::to_string(precision / 2) + " of an integer");
  }
  return nearest.get_si();
}

}  // namespace

UnitRoots::UnitRoots(std::uint64_t n, Bits bits) : bits_(bits) {
  if (n == 0) throw DomainError("UnitRoots: order must be >= 1");
  roots_.reserve(n);
  for (std::uint64_t j = 0; j < n; ++j) roots_.push_back(root_of_unity(static_cast<std::int64_t>(j), n, bits));
}

std::int64_t cn_bruteforce(std::uint64_t n, std::uint64_t m, Bits precision) {
  require_positive(n, m, "cn_bruteforce");
  HPComplex sum(precision);
  const std::uint64_t step = m % n;
  for (std::uint64_t k = 1; k <= n; ++k) {
    if (std::gcd(k, n) != 1) continue;
    const auto j = static_cast<std::int64_t>((static_cast<unsigned __int128>(k) * step) % n);
    sum += root_of_unity(j, n, precision);
  }
  return round_checked(sum, precision, n, m);
}

std::int64_t cn_bruteforce(std::uint64_t n, std::uint64_t m, const UnitRoots& roots) {
  require_positive(n, m, "cn_bruteforce");
  if (roots.order() != n) throw DomainError("cn_bruteforce: root table order differs from n");
  HPComplex sum(roots.precision());
  const std::uint64_t step = m % n;
  for (std::uint64_t k = 1; k <= n; ++k) {
    if (std::gcd(k, n) != 1) continue;
    sum += roots[static_cast<std::uint64_t>((static_cast<unsigned __int128>(k) * step) % n)];
  }
  return round_checked(sum, roots.precision(), n, m);
}

std::int64_t cn_fast(std::uint64_t n, std::uint64_t m) {
  require_positive(n, m, "cn_fast");
  const std::uint64_t q = n / std::gcd(n, m);
  const int mu = mobius(q);
  if (mu == 0) return 0;
  return mu * static_cast<std::int64_t>(totient(n) / totient(q));
}

std::int64_t cn_fast(std::uint64_t n, std::uint64_t m, const SieveTables& sieve) {
  require_positive(n, m, "cn_fast");
  if (!sieve.contains(n)) throw DomainError("cn_fast: n = " + std::to_string(n) + " outside sieve");
  const std::uint64_t q = n / std::gcd(n, m);
  const int mu = sieve.mu[q];
  if (mu == 0) return 0;
  return mu * static_cast<std::int64_t>(sieve.phi[n] / sieve.phi[q]);
}

CnTable build_cn_table(std::uint64_t n_max, std::uint64_t m_max, std::size_t max_entries) {
  if (n_max == 0 || m_max == 0) throw DomainError("build_cn_table: dimensions must be >= 1");
  if (m_max > max_entries / n_max) {
    throw ResourceError("build_cn_table: " + std::to_string(n_max) + " x " + std::to_string(m_max) +
                        " exceeds " + std::to_string(max_entries) + " entries");
  }
  const SieveTables sieve = build_sieve(n_max);
  CnTable table{n_max, m_max, std::vector<std::int64_t>(n_max * m_max)};
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    for (std::uint64_t m = 1; m <= m_max; ++m) table.values[(n - 1) * m_max + (m - 1)] = cn_fast(n, m, sieve);
  }
  return table;
}

std::vector<std::uint64_t> powers_of_ten_schedule(std::uint64_t n_max) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 1; p <= n_max; p *= 10) {
    out.push_back(p);
    if (p > n_max / 10) break;
  }
  if (out.empty() || out.back() != n_max) out.push_back(n_max);
  return out;
}

PartialSumTrace partial_sum_trace(std::uint64_t m, std::uint64_t n_max, std::vector<std::uint64_t> schedule,
                                  SumMode mode, Bits precision, const SieveTables* sieve) {
  if (m == 0 || n_max == 0) throw DomainError("partial_sum_trace: m and n_max must be >= 1");
  if (schedule.empty()) schedule = powers_of_ten_schedule(n_max);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] == 0 || schedule[i] > n_max || (i > 0 && schedule[i] <= schedule[i - 1])) {
      throw DomainError("partial_sum_trace: checkpoints must increase strictly within [1, n_max]");
    }
  }
  if (mode == SumMode::exact && n_max > kExactTraceLimit) {
    throw ResourceError("partial_sum_trace: exact mode is limited to N <= " + std::to_string(kExactTraceLimit));
  }

  std::optional<SieveTables> owned;
  if (sieve == nullptr || sieve->limit < n_max) {
    owned = build_sieve(n_max);
    sieve = &*owned;
  }

  PartialSumTrace trace;
  trace.m = m;
  trace.mode = mode;
  trace.precision = mode == SumMode::floating ? std::max<Bits>(precision, 128) : precision;
  const Bits bits = trace.precision;

  auto next = schedule.begin();
  if (mode == SumMode::exact) {
    mpq_class acc = 0;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
      const std::int64_t c = cn_fast(n, m, *sieve);
      if (c != 0) {
        mpq_class term(static_cast<long>(c), static_cast<unsigned long>(n));
        term.canonicalize();
        acc += term;
      }
      if (n == *next) {
        Real value(acc, bits);
        Real bound = abs(value) * unit_roundoff(bits);
        trace.checkpoints.push_back({n, acc, std::move(value), std::move(bound)});
        if (++next == schedule.end()) break;
      }
    }
    return trace;
  }

  CompensatedSum sum(bits);
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const std::int64_t c = cn_fast(n, m, *sieve);
    if (c != 0) sum.add_ratio(static_cast<long>(c), static_cast<unsigned long>(n));
    if (n == *next) {
      // Each quotient c/n is rounded once: u * sum|t| on top of the summation bound.
      Real bound = sum.error_bound() + sum.abs_total() * unit_roundoff(bits) * Real(1.01, bits);
      trace.checkpoints.push_back({n, mpq_class(0), sum.result(), std::move(bound)});
      if (++next == schedule.end()) break;
    }
  }
  return trace;
}

}  // namespace cyclolab
