#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "cyclolab/arith.hpp"
#include "cyclolab/complex.hpp"
#include "cyclolab/real.hpp"

namespace cyclolab {

/// Dense table of c_n(m) for 1 <= n <= n_max, 1 <= m <= m_max, row-major by n.
struct CnTable {
  std::uint64_t n_max = 0;
  std::uint64_t m_max = 0;
  std::vector<std::int64_t> values;

  std::int64_t at(std::uint64_t n, std::uint64_t m) const { return values[(n - 1) * m_max + (m - 1)]; }
  bool operator==(const CnTable&) const = default;
};

/// The n-th roots of unity e^{2 pi i j / n}, j = 0..n-1, at a fixed precision.
class UnitRoots {
 public:
  UnitRoots(std::uint64_t n, Bits bits);

  std::uint64_t order() const { return roots_.size(); }
  Bits precision() const { return bits_; }
  const HPComplex& operator[](std::uint64_t j) const { return roots_[j]; }

 private:
  Bits bits_;
  std::vector<HPComplex> roots_;
};

/// c_n(m) straight from the exponential sum over k coprime to n, rounded to
/// the nearest integer. Throws PrecisionError when the imaginary part or the
/// rounding distance exceeds 2^(-precision/2).
std::int64_t cn_bruteforce(std::uint64_t n, std::uint64_t m, Bits precision = kDefaultPrecision);
/// Same, reusing a precomputed root table of order n.
std::int64_t cn_bruteforce(std::uint64_t n, std::uint64_t m, const UnitRoots& roots);

/// Hoelder's closed form mu(n/g) phi(n) / phi(n/g), g = gcd(n, m).
std::int64_t cn_fast(std::uint64_t n, std::uint64_t m);
/// Closed form with table lookups; n must lie inside the sieve.
std::int64_t cn_fast(std::uint64_t n, std::uint64_t m, const SieveTables& sieve);

CnTable build_cn_table(std::uint64_t n_max, std::uint64_t m_max,
                       std::size_t max_entries = std::size_t{1} << 27);

enum class SumMode { exact, floating };

struct TraceCheckpoint {
  std::uint64_t n = 0;
  /// Exact S_N(m); meaningful only for SumMode::exact.
  mpq_class exact;
  Real value;
  /// Bound on |value - S_N(m)|.
  Real error_bound;
};

/// S_N(m) = sum_{n <= N} c_n(m) / n at a schedule of checkpoints N.
struct PartialSumTrace {
  std::uint64_t m = 0;
  SumMode mode = SumMode::floating;
  Bits precision = kDefaultPrecision;
  std::vector<TraceCheckpoint> checkpoints;
};

inline constexpr std::uint64_t kExactTraceLimit = 100000;

/// 1, 10, 100, ... up to n_max, plus n_max itself.
std::vector<std::uint64_t> powers_of_ten_schedule(std::uint64_t n_max);

/// Checkpoints must be strictly increasing and within [1, n_max]; an empty
/// schedule means powers_of_ten_schedule(n_max). Floating mode runs at no less
/// than 128 bits. A sieve covering n_max is built when none is supplied.
PartialSumTrace partial_sum_trace(std::uint64_t m, std::uint64_t n_max, std::vector<std::uint64_t> schedule,
                                  SumMode mode, Bits precision = kDefaultPrecision,
                                  const SieveTables* sieve = nullptr);

}  // namespace cyclolab
