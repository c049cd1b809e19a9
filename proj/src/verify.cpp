#include "cyclolab/verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "calibration_data.hpp"
#include "cyclolab/complex.hpp"
#include "cyclolab/cyclotomic.hpp"
#include "cyclolab/errors.hpp"
#include "cyclolab/ramanujan.hpp"
#include "cyclolab/series.hpp"
#include "cyclolab/summation.hpp"

namespace cyclolab {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<IdentityId, std::string_view>, 11> kNames{{
    {IdentityId::PNT_COEFF_DECAY, "PNT_COEFF_DECAY"},
    {IdentityId::PNT_SERIES_EXACT, "PNT_SERIES_EXACT"},
    {IdentityId::SIGMA_ZETA, "SIGMA_ZETA"},
    {IdentityId::PRODUCT_IDENTITY_S, "PRODUCT_IDENTITY_S"},
    {IdentityId::ZETA_RATIO, "ZETA_RATIO"},
    {IdentityId::R2_SERIES, "R2_SERIES"},
    {IdentityId::R2_LOGDERIV, "R2_LOGDERIV"},
    {IdentityId::THETA_SQUARE, "THETA_SQUARE"},
    {IdentityId::PI_OVER_4, "PI_OVER_4"},
    {IdentityId::INTERIOR_CONVERGENCE, "INTERIOR_CONVERGENCE"},
    {IdentityId::BOUNDARY_STUDY, "BOUNDARY_STUDY"},
}};

std::string fmt(const Real& x) { return x.to_string(20); }

json fmt_list(const std::vector<std::uint64_t>& values) { return json(values); }

class Stopwatch {
 public:
  std::int64_t elapsed_ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

VerificationReport start_report(IdentityId id, json parameters) {
  VerificationReport r;
  r.id = id;
  r.parameters = std::move(parameters);
  return r;
}

void finish(VerificationReport& r, const Stopwatch& watch) {
  r.pass = r.recomputed_pass();
  r.runtime_ms = watch.elapsed_ms();
}

Real infinity(Bits bits) {
  Real out(bits);
  mpfr_set_inf(out.raw(), 1);
  return out;
}

void require_unit_interval(const Real& z, const char* who) {
  if (!(z > 0L) || !(z < 1L)) throw DomainError(std::string(who) + ": z must lie in (0, 1)");
}

// Reuse a caller's sieve when it is large enough.
const SieveTables& sieve_for(std::uint64_t limit, const SieveTables* given, SieveTables& local) {
  if (given != nullptr && given->limit >= limit) return *given;
  local = build_sieve(std::max<std::uint64_t>(limit, 1));
  return local;
}

bool is_integer(const Real& x) { return mpfr_integer_p(x.raw()) != 0; }

// Upper bound on the relative rounding of one correctly rounded operation,
// with room for the conversions around it.
Real ulp_factor(Bits bits, long operations) { return unit_roundoff(bits) * (operations + 1L); }

}  // namespace

std::string_view identity_name(IdentityId id) {
  for (const auto& [key, name] : kNames) {
    if (key == id) return name;
  }
  return "UNKNOWN";
}

std::optional<IdentityId> parse_identity(std::string_view text) {
  std::string normalized(text);
  for (char& c : normalized) {
    c = (c == '-') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  for (const auto& [key, name] : kNames) {
    if (name == normalized) return key;
  }
  return std::nullopt;
}

const std::vector<IdentityId>& all_identities() {
  static const std::vector<IdentityId> ids = [] {
    std::vector<IdentityId> out;
    for (const auto& entry : kNames) out.push_back(entry.first);
    return out;
  }();
  return ids;
}

std::string_view tolerance_kind_name(ToleranceKind kind) {
  switch (kind) {
    case ToleranceKind::rigorous_bound:
      return "rigorous-bound";
    case ToleranceKind::calibrated:
      return "calibrated";
    case ToleranceKind::exact:
      return "exact";
  }
  return "unknown";
}

std::vector<std::uint64_t> range_list(std::uint64_t first, std::uint64_t last) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = first; v <= last; ++v) out.push_back(v);
  return out;
}

// ---------------------------------------------------------------- calibration

Real Calibration::pnt_threshold(std::uint64_t m) const {
  if (pnt_thresholds.empty()) throw DomainError("calibration has no PNT thresholds");
  if (auto it = pnt_thresholds.find(m); it != pnt_thresholds.end()) return it->second;
  Real widest = pnt_thresholds.begin()->second;
  for (const auto& [key, value] : pnt_thresholds) widest = max(widest, value);
  return widest;
}

Calibration parse_calibration(const json& doc) {
  try {
    Calibration c;
    c.version = doc.at("version").get<int>();
    const json& pnt = doc.at("pnt_coeff_decay");
    c.pnt_reference_n = pnt.at("reference_n").get<std::uint64_t>();
    c.pnt_evaluated_at = pnt.at("evaluated_at").get<std::uint64_t>();
    for (const auto& [key, value] : pnt.at("thresholds").items()) {
      c.pnt_thresholds.emplace(std::stoull(key), Real::parse(value.get<std::string>(), kDefaultPrecision));
    }
    const json& r2 = doc.at("r2_series");
    c.r2_tolerance = Real::parse(r2.at("tolerance").get<std::string>(), kDefaultPrecision);
    c.window_divisor = r2.at("window_divisor").get<std::uint64_t>();
    c.pi_over_4_digits = doc.at("pi_over_4").at("significant_digits").get<int>();
    c.zeta_ratio_digits = doc.at("zeta_ratio").at("significant_digits").get<int>();
    const json& grid = doc.at("boundary_study");
    c.boundary_interior_radius = Real::parse(grid.at("interior_radius").get<std::string>(), kDefaultPrecision);
    c.boundary_interior_min_n = grid.at("interior_min_n").get<std::uint64_t>();
    c.boundary_interior_tolerance = Real::parse(grid.at("tolerance").get<std::string>(), kDefaultPrecision);
    c.interior_tolerance =
        Real::parse(doc.at("interior_convergence").at("tolerance").get<std::string>(), kDefaultPrecision);
    if (c.window_divisor == 0) throw DomainError("calibration: window_divisor must be positive");
    return c;
  } catch (const json::exception& e) {
    throw DomainError(std::string("calibration document: ") + e.what());
  }
}

const Calibration& default_calibration() {
  static const Calibration c = parse_calibration(json::parse(kEmbeddedCalibration));
  return c;
}

std::uint64_t averaging_window(std::uint64_t terms, const Calibration& calibration) {
  return std::max<std::uint64_t>(1, terms / calibration.window_divisor);
}

Real significant_digit_tolerance(const Real& target, int digits) {
  if (target.is_zero() || digits < 1) throw DomainError("significant_digit_tolerance: needs nonzero target");
  const long e = static_cast<long>(std::floor(std::log10(std::fabs(target.to_double()))));
  // 0.5 * 10^(e - digits + 1), built exactly enough at the target's precision.
  const long shift = e - digits + 1;
  Real ten(10, target.precision());
  Real out = pow(ten, shift);
  out /= 2L;
  return out;
}

// ---------------------------------------------------------------- PNT decay

VerificationReport verify_pnt_decay(const PntDecayParams& p, const Calibration& calibration,
                                    const SieveTables* sieve) {
  const Stopwatch watch;
  if (p.m_list.empty()) throw DomainError("verify_pnt_decay: empty m list");
  for (auto m : p.m_list) {
    if (m == 0) throw DomainError("verify_pnt_decay: m must be >= 1");
  }
  std::vector<std::uint64_t> schedule = p.schedule;
  if (schedule.empty()) {
    for (std::uint64_t n = 10; n < p.n_max; n *= 10) schedule.push_back(n);
    schedule.push_back(p.n_max);
  }
  VerificationReport r = start_report(IdentityId::PNT_COEFF_DECAY, {{"m_list", fmt_list(p.m_list)},
                                                                    {"n_max", p.n_max},
                                                                    {"schedule", fmt_list(schedule)},
                                                                    {"precision", p.precision}});
  SieveTables local;
  const SieveTables& sv = sieve_for(p.n_max, sieve, local);

  Real worst(p.precision);
  json items = json::array();
  for (auto m : p.m_list) {
    const PartialSumTrace trace = partial_sum_trace(m, p.n_max, schedule, SumMode::floating, p.precision, &sv);
    const TraceCheckpoint& last = trace.checkpoints.back();
    const Real final_abs = abs(last.value) + last.error_bound;
    const Real threshold = calibration.pnt_threshold(m);
    const Real threshold_ratio = final_abs / threshold;

    long increasing = 0;
    long non_increasing = 0;
    json points = json::array();
    for (std::size_t k = 0; k < trace.checkpoints.size(); ++k) {
      const auto& c = trace.checkpoints[k];
      points.push_back({{"n", c.n}, {"value", fmt(c.value)}, {"error_bound", fmt(c.error_bound)}});
      if (k == 0) continue;
      if (abs(c.value) > abs(trace.checkpoints[k - 1].value)) {
        ++increasing;
      } else {
        ++non_increasing;
      }
    }
    // (increasing + 1) / non_increasing <= 1 exactly when the non-increasing
    // steps are a strict majority.
    Real decay_score(p.precision);
    if (increasing + non_increasing > 0) {
      decay_score = non_increasing == 0 ? Real(increasing + 1, p.precision)
                                        : Real(increasing + 1, p.precision) / non_increasing;
    }
    const Real item = max(threshold_ratio, decay_score);
    worst = max(worst, item);
    items.push_back({{"m", m},
                     {"final_abs", fmt(final_abs)},
                     {"threshold", fmt(threshold)},
                     {"threshold_ratio", fmt(threshold_ratio)},
                     {"increasing_steps", increasing},
                     {"non_increasing_steps", non_increasing},
                     {"decay_score", fmt(decay_score)},
                     {"pass", item <= 1L},
                     {"trace", std::move(points)}});
  }
  r.residual = worst;
  r.tolerance = Real(1, p.precision);
  r.tolerance_kind = ToleranceKind::calibrated;
  r.details = {{"normalization", "max over m of max(|S_N(m)| / threshold(m), (increasing + 1) / non_increasing)"},
               {"calibration_version", calibration.version},
               {"items", std::move(items)}};
  finish(r, watch);
  return r;
}

// ---------------------------------------------------------------- PNT, series level

VerificationReport verify_pnt_series(const PntSeriesParams& p) {
  const Stopwatch watch;
  if (p.n_max == 0 || p.order == 0) throw DomainError("verify_pnt_series: N and M must be >= 1");
  if (p.n_max > kExactTraceLimit) throw ResourceError("verify_pnt_series: N above the exact trace limit");
  VerificationReport r =
      start_report(IdentityId::PNT_SERIES_EXACT, {{"n_max", p.n_max}, {"order", p.order}});
  const RationalSeries series = log_truncated_P(p.n_max, p.order);
  RationalSeries from_traces(p.order);
  for (std::uint64_t m = 1; m <= p.order; ++m) {
    const PartialSumTrace t = partial_sum_trace(m, p.n_max, {p.n_max}, SumMode::exact);
    mpq_class coefficient = t.checkpoints.back().exact / m;
    from_traces.set_coefficient(m, coefficient);
  }
  std::uint64_t mismatches = 0;
  for (std::size_t m = 0; m <= p.order; ++m) {
    if (series.coefficient(m) != from_traces.coefficient(m)) ++mismatches;
  }
  const SeriesComparison cmp = series_equal(series, from_traces);
  json coefficients = json::array();
  for (std::size_t m = 1; m <= p.order; ++m) coefficients.push_back(series.coefficient(m).get_str());
  r.residual = Real(static_cast<long>(mismatches), kDefaultPrecision);
  r.residual_exact = std::to_string(mismatches);
  r.tolerance = Real(kDefaultPrecision);
  r.tolerance_kind = ToleranceKind::exact;
  r.details = {{"residual_meaning", "number of coefficients where m [z^m] log P_N differs from S_N(m)"},
               {"coefficients", std::move(coefficients)}};
  if (cmp.first_mismatch) {
    r.details["first_mismatch"] = {{"exponent", cmp.first_mismatch->exponent},
                                   {"series", cmp.first_mismatch->lhs.get_str()},
                                   {"trace", cmp.first_mismatch->rhs.get_str()}};
  }
  finish(r, watch);
  return r;
}

// ---------------------------------------------------------------- sigma-zeta

namespace {

struct Valued {
  Real value;
  Real error;
};

// sum_{d | n} d^-s, the divisor side. At s = 1 this is sigma(n) / n.
Valued divisor_power_sum(std::uint64_t n, const Real& minus_s, Bits bits) {
  CompensatedSum sum(bits);
  const auto ds = divisors(n);
  for (auto d : ds) sum.add(pow(Real(static_cast<long>(d), bits), minus_s));
  Real error = sum.error_bound() + ulp_factor(bits, 1) * sum.abs_total();
  return {sum.result(), std::move(error)};
}

// |a b - a~ b~| for a~ within ea of a and b~ within eb of b, plus one rounding.
Real product_error(const Real& a, const Real& ea, const Real& b, const Real& eb, Bits bits) {
  return ea * abs(b) + (abs(a) + ea) * eb + unit_roundoff(bits) * abs(a * b);
}

}  // namespace

VerificationReport verify_sigma_zeta(const SigmaZetaParams& p, const SieveTables* sieve) {
  const Stopwatch watch;
  if (!(p.s > 0L)) throw DomainError("verify_sigma_zeta: s must be > 0");
  if (p.terms == 0) throw DomainError("verify_sigma_zeta: I must be >= 1");
  if (p.n_list.empty()) throw DomainError("verify_sigma_zeta: empty n list");
  for (auto n : p.n_list) {
    if (n == 0) throw DomainError("verify_sigma_zeta: n must be >= 1");
  }
  const Bits bits = p.precision;
  VerificationReport r = start_report(IdentityId::SIGMA_ZETA, {{"n_list", fmt_list(p.n_list)},
                                                               {"s", fmt(p.s)},
                                                               {"terms", p.terms},
                                                               {"precision", bits}});
  SieveTables local;
  const SieveTables& sv = sieve_for(p.terms, sieve, local);

  const Real s = p.s.rounded(bits);
  const Real w = s + 1L;
  const Real minus_w = -w;
  const ZetaValue zw = zeta(w, bits);

  // i runs outside so that each i^-(s+1) is formed once.
  std::vector<CompensatedSum> sums;
  sums.reserve(p.n_list.size());
  for (std::size_t k = 0; k < p.n_list.size(); ++k) sums.emplace_back(bits);
  Real weight(bits);
  Real term(bits);
  for (std::uint64_t i = 1; i <= p.terms; ++i) {
    mpfr_set_ui(weight.raw(), i, MPFR_RNDN);
    mpfr_pow(weight.raw(), weight.raw(), minus_w.raw(), MPFR_RNDN);
    for (std::size_t k = 0; k < p.n_list.size(); ++k) {
      const std::int64_t c = cn_fast(i, p.n_list[k], sv);
      if (c == 0) continue;
      mpfr_mul_si(term.raw(), weight.raw(), static_cast<long>(c), MPFR_RNDN);
      sums[k].add(term);
    }
  }

  // Tail: |c_i(n)| <= sigma(gcd(i, n)) <= sigma(n) and sum_{i > I} i^-(s+1) <= I^-s / s.
  const Real zeta_upper = zw.value + zw.error_bound;
  const Real tail_factor = zeta_upper * pow(Real(static_cast<long>(p.terms), bits), -s) / s;

  Real worst(bits);
  json items = json::array();
  for (std::size_t k = 0; k < p.n_list.size(); ++k) {
    const std::uint64_t n = p.n_list[k];
    const Valued lhs = divisor_power_sum(n, -s, bits);
    const Real partial = sums[k].result();
    const Real partial_error = sums[k].error_bound() + ulp_factor(bits, 2) * sums[k].abs_total();
    const Real rhs = zw.value * partial;
    const Real float_error = (product_error(zw.value, zw.error_bound, partial, partial_error, bits) + lhs.error) *
                             Real::parse("1.01", bits);
    Real tail = tail_factor * static_cast<long>(sigma(n));
    tail *= Real(1, bits) + ulp_factor(bits, 8);
    const Real bound = tail + float_error;
    const Real residual = abs(lhs.value - rhs);
    const Real ratio = residual / bound;
    worst = max(worst, ratio);
    items.push_back({{"n", n},
                     {"lhs", fmt(lhs.value)},
                     {"rhs", fmt(rhs)},
                     {"residual", fmt(residual)},
                     {"tail_bound", fmt(tail)},
                     {"float_error", fmt(float_error)},
                     {"pass", residual <= bound}});
  }
  r.residual = worst;
  r.tolerance = Real(1, bits);
  r.tolerance_kind = ToleranceKind::rigorous_bound;
  r.bound_formula = "SIGMA_ZETA_TAIL: zeta(s+1) * sigma(n) * I^-s / s + float_error";
  r.details = {{"identity", "sum_{d|n} d^-s = zeta(s+1) * sum_i c_i(n) / i^(s+1); equals sigma(n)/n at s = 1"},
               {"normalization", "max over n of residual(n) / bound(n)"},
               {"zeta", fmt(zw.value)},
               {"zeta_error_bound", fmt(zw.error_bound)},
               {"items", std::move(items)}};
  finish(r, watch);
  return r;
}

// ---------------------------------------------------------------- product identity, s > 1

VerificationReport verify_product_identity_s(const ProductIdentityParams& p) {
  const Stopwatch watch;
  if (!(p.s > 1L)) throw DomainError("verify_product_identity_s: s must be > 1");
  if (p.order == 0 || p.order > 60) throw DomainError("verify_product_identity_s: order must be in 1..60");
  if (p.terms == 0) throw DomainError("verify_product_identity_s: I must be >= 1");
  const Bits bits = p.precision;
  VerificationReport r = start_report(IdentityId::PRODUCT_IDENTITY_S,
                                      {{"order", p.order}, {"s", fmt(p.s)}, {"terms", p.terms}, {"precision", bits}});
  const Real s = p.s.rounded(bits);
  const std::size_t order = p.order;

  // Left side: sum_{i <= M} i^-s * (-log(1 - z^i)). For integer s this is an
  // exact rational series, checked against the divisor formula
  // (1/n) sum_{i | n} i^(1-s) before it is used.
  std::vector<Real> lhs(order + 1, Real(bits));
  bool exact_lhs = is_integer(s);
  bool lhs_structure_ok = true;
  if (exact_lhs) {
    const long s_int = s.round_to_integer().get_si();
    RationalSeries series(order);
    for (std::uint64_t i = 1; i <= order; ++i) {
      mpz_class power;
      mpz_ui_pow_ui(power.get_mpz_t(), i, static_cast<unsigned long>(s_int));
      series -= log_one_minus_power(i, order) * mpq_class(mpz_class(1), power);
    }
    for (std::size_t n = 1; n <= order; ++n) {
      mpq_class oracle = 0;
      for (auto i : divisors(n)) {
        mpz_class power;
        mpz_ui_pow_ui(power.get_mpz_t(), i, static_cast<unsigned long>(s_int - 1));
        oracle += mpq_class(mpz_class(1), power);
      }
      oracle /= n;
      if (series.coefficient(n) != oracle) lhs_structure_ok = false;
      lhs[n] = Real(series.coefficient(n), bits);
    }
  } else {
    const Real one_minus_s = Real(1, bits) - s;
    for (std::size_t n = 1; n <= order; ++n) {
      CompensatedSum sum(bits);
      for (auto i : divisors(n)) sum.add(pow(Real(static_cast<long>(i), bits), one_minus_s));
      lhs[n] = sum.result() / static_cast<long>(n);
    }
  }

  // Right side: zeta(s) / n * sum_{i <= I} c_i(n) i^-s.
  const ZetaValue zs = zeta(s, bits);
  const SieveTables sv = build_sieve(p.terms);
  std::vector<CompensatedSum> sums;
  for (std::size_t n = 0; n <= order; ++n) sums.emplace_back(bits);
  const Real minus_s = -s;
  Real weight(bits);
  Real term(bits);
  for (std::uint64_t i = 1; i <= p.terms; ++i) {
    mpfr_set_ui(weight.raw(), i, MPFR_RNDN);
    mpfr_pow(weight.raw(), weight.raw(), minus_s.raw(), MPFR_RNDN);
    for (std::size_t n = 1; n <= order; ++n) {
      const std::int64_t c = cn_fast(i, n, sv);
      if (c == 0) continue;
      mpfr_mul_si(term.raw(), weight.raw(), static_cast<long>(c), MPFR_RNDN);
      sums[n].add(term);
    }
  }
  const Real zeta_upper = zs.value + zs.error_bound;
  // sum_{i > I} i^-s <= I^(1-s) / (s - 1)
  const Real tail_factor =
      zeta_upper * pow(Real(static_cast<long>(p.terms), bits), Real(1, bits) - s) / (s - 1L);

  Real worst(bits);
  json items = json::array();
  for (std::size_t n = 1; n <= order; ++n) {
    const Real partial = sums[n].result();
    const Real partial_error = sums[n].error_bound() + ulp_factor(bits, 2) * sums[n].abs_total();
    const Real rhs = zs.value * partial / static_cast<long>(n);
    const Real lhs_error = exact_lhs ? unit_roundoff(bits) * abs(lhs[n]) : ulp_factor(bits, 40) * abs(lhs[n]);
    const Real float_error =
        (product_error(zs.value, zs.error_bound, partial, partial_error, bits) / static_cast<long>(n) + lhs_error) *
        Real::parse("1.01", bits);
    Real tail = tail_factor * static_cast<long>(sigma(static_cast<std::uint64_t>(n)));
    tail /= static_cast<long>(n);
    tail *= Real(1, bits) + ulp_factor(bits, 8);
    const Real bound = tail + float_error;
    const Real residual = abs(lhs[n] - rhs);
    worst = max(worst, residual / bound);
    items.push_back({{"n", n},
                     {"lhs", fmt(lhs[n])},
                     {"rhs", fmt(rhs)},
                     {"residual", fmt(residual)},
                     {"bound", fmt(bound)}});
  }
  if (!lhs_structure_ok) worst = infinity(bits);
  r.residual = worst;
  r.tolerance = Real(1, bits);
  r.tolerance_kind = ToleranceKind::rigorous_bound;
  r.bound_formula = "PRODUCT_S_TAIL: zeta(s) * sigma(n) / n * I^(1-s) / (s-1) + float_error";
  r.details = {{"coefficient_identity", "(1/n) sum_{i|n} i^(1-s) = zeta(s)/n * sum_i c_i(n) / i^s"},
               {"normalization", "max over n of residual(n) / bound(n)"},
               {"lhs_mode", exact_lhs ? "exact-rational" : "floating"},
               {"lhs_matches_divisor_oracle", lhs_structure_ok},
               {"zeta", fmt(zs.value)},
               {"items", std::move(items)}};
  finish(r, watch);
  return r;
}

// ---------------------------------------------------------------- log tables for real z

namespace {

// L[d] = log(1 - z^d) for d = 1..n (index 0 unused), z real in (0, 1).
std::vector<Real> real_log_table(const Real& z, std::uint64_t n, Bits bits) {
  std::vector<Real> out;
  out.reserve(n + 1);
  out.emplace_back(bits);
  const Real zb = z.rounded(std::max(bits, z.precision()));
  for (std::uint64_t d = 1; d <= n; ++d) out.push_back(log1p(-pow(zb, static_cast<long>(d))).rounded(bits));
  return out;
}

// log Phi^_k(z) = sum_{d | k} mu(k/d) L[d] for every k in 1..n, optionally odd k only.
std::vector<Real> real_log_phi_hat_table(const std::vector<Real>& logs, std::uint64_t n, const SieveTables& sv,
                                         bool odd_only, Bits bits) {
  std::vector<Real> out(n + 1, Real(bits));
  const std::uint64_t step = odd_only ? 2 : 1;
  for (std::uint64_t d = 1; d <= n; d += step) {
    for (std::uint64_t j = 1; d * j <= n; j += step) {
      const int mu = sv.mu[j];
      if (mu > 0) {
        out[d * j] += logs[d];
      } else if (mu < 0) {
        out[d * j] -= logs[d];
      }
    }
  }
  return out;
}

void guard_denominator(const Real& value, const Real& scale, Bits bits, const char* who) {
  if (abs(value) <= ldexp(scale, -static_cast<long>(bits / 2))) {
    throw PrecisionError(std::string(who) + ": denominator is numerically zero");
  }
}

}  // namespace

// ---------------------------------------------------------------- zeta ratio

VerificationReport verify_zeta_ratio(const ZetaRatioParams& p, const Calibration& calibration) {
  const Stopwatch watch;
  require_unit_interval(p.z, "verify_zeta_ratio");
  if (!(p.s > 0L)) throw DomainError("verify_zeta_ratio: s must be > 0");
  if (p.terms == 0) throw DomainError("verify_zeta_ratio: I must be >= 1");
  const Bits bits = p.precision;
  VerificationReport r = start_report(IdentityId::ZETA_RATIO,
                                      {{"z", fmt(p.z)}, {"s", fmt(p.s)}, {"terms", p.terms}, {"precision", bits}});
  const Real s = p.s.rounded(bits);
  const Real minus_w = -(s + 1L);
  const SieveTables sv = build_sieve(p.terms);
  const auto logs = real_log_table(p.z, p.terms, bits);
  const auto phi_logs = real_log_phi_hat_table(logs, p.terms, sv, false, bits);

  // numerator: sum_i i^-(s+1) log(1 - z^i); denominator: sum_i i^-(s+1) log Phi^_i(z),
  // whose i = 1 term is log(1 - z).
  CompensatedSum numerator(bits);
  CompensatedSum denominator(bits);
  for (std::uint64_t i = 1; i <= p.terms; ++i) {
    const Real weight = pow(Real(static_cast<long>(i), bits), minus_w);
    numerator.add(weight * logs[i]);
    denominator.add(weight * phi_logs[i]);
  }
  const Real den = denominator.result();
  guard_denominator(den, denominator.abs_total(), bits, "verify_zeta_ratio");
  const Real ratio = numerator.result() / den;
  const ZetaValue target = zeta(s + 1L, bits);
  const Real residual = abs(ratio - target.value);
  r.residual = residual;
  r.tolerance = significant_digit_tolerance(target.value, calibration.zeta_ratio_digits);
  r.tolerance_kind = ToleranceKind::calibrated;
  r.details = {{"numerator", fmt(numerator.result())},
               {"denominator", fmt(den)},
               {"ratio", fmt(ratio)},
               {"target_zeta_s_plus_1", fmt(target.value)},
               {"relative_residual", fmt(residual / target.value)},
               {"significant_digits", calibration.zeta_ratio_digits},
               {"calibration_version", calibration.version}};
  finish(r, watch);
  return r;
}

// ---------------------------------------------------------------- r2 series

namespace {

struct AveragedSum {
  Real raw;
  Real averaged;
};

// pi * sum_{i=0}^{I} (-1)^i c_{2i+1}(n) / (2i+1) in index order, with the mean
// of the last `window` partial sums alongside the final one.
AveragedSum r2_partial_sums(std::uint64_t n, std::uint64_t terms, std::uint64_t window, const SieveTables& sv,
                            const Real& pi, Bits bits) {
  CompensatedSum sum(bits);
  CompensatedSum window_total(bits);
  const std::uint64_t first_in_window = terms + 1 > window ? terms + 1 - window : 0;
  for (std::uint64_t i = 0; i <= terms; ++i) {
    const std::uint64_t k = 2 * i + 1;
    const std::int64_t c = cn_fast(k, n, sv);
    if (c != 0) sum.add_ratio((i % 2 == 0) ? static_cast<long>(c) : -static_cast<long>(c), k);
    if (i >= first_in_window) window_total.add(sum.result());
  }
  const long count = static_cast<long>(terms + 1 - first_in_window);
  return {pi * sum.result(), pi * window_total.result() / count};
}

json r2_item(std::uint64_t n, const AveragedSum& v, Real& worst, Bits bits) {
  const std::uint64_t target = r2_enumerate(n);
  const DivisorClasses dc = divisor_classes_mod4(n);
  const long by_classes = 4 * (static_cast<long>(dc.d1) - static_cast<long>(dc.d3));
  const Real t(static_cast<long>(target), bits);
  const Real raw_residual = abs(v.raw - t);
  const Real averaged_residual = abs(v.averaged - t);
  worst = max(worst, averaged_residual);
  if (by_classes != static_cast<long>(target)) worst = infinity(bits);
  return {{"n", n},
          {"target_r2", target},
          {"target_by_divisor_classes", by_classes},
          {"raw", fmt(v.raw)},
          {"averaged", fmt(v.averaged)},
          {"raw_residual", fmt(raw_residual)},
          {"averaged_residual", fmt(averaged_residual)},
          {"rounded_average", v.averaged.round_to_integer().get_str()}};
}

}  // namespace

VerificationReport verify_r2_series(const R2SeriesParams& p, const Calibration& calibration) {
  const Stopwatch watch;
  if (p.n_list.empty()) throw DomainError("verify_r2_series: empty n list");
  for (auto n : p.n_list) {
    if (n == 0) throw DomainError("verify_r2_series: n must be >= 1");
  }
  if (p.terms == 0) throw DomainError("verify_r2_series: I must be >= 1");
  const Bits bits = p.precision;
  const std::uint64_t window = p.window != 0 ? p.window : averaging_window(p.terms, calibration);
  VerificationReport r = start_report(IdentityId::R2_SERIES, {{"n_list", fmt_list(p.n_list)},
                                                              {"terms", p.terms},
                                                              {"window", window},
                                                              {"precision", bits}});
  const SieveTables sv = build_sieve(2 * p.terms + 1);
  const Real pi = Real::pi(bits);
  Real worst(bits);
  json items = json::array();
  for (auto n : p.n_list) items.push_back(r2_item(n, r2_partial_sums(n, p.terms, window, sv, pi, bits), worst, bits));
  r.residual = worst;
  r.tolerance = calibration.r2_tolerance.rounded(bits);
  r.tolerance_kind = ToleranceKind::calibrated;
  r.details = {{"summation", "index order i = 0..I; averaged = mean of the last `window` partial sums"},
               {"calibration_version", calibration.version},
               {"items", std::move(items)}};
  finish(r, watch);
  return r;
}

VerificationReport verify_r2_product_logderiv(const R2LogDerivParams& p, const Calibration& calibration) {
  const Stopwatch watch;
  if (p.order == 0 || p.order > 60) throw DomainError("verify_r2_product_logderiv: order must be in 1..60");
  if (p.terms == 0) throw DomainError("verify_r2_product_logderiv: I must be >= 1");
  const Bits bits = p.precision;
  const std::uint64_t window = p.window != 0 ? p.window : averaging_window(p.terms, calibration);
  VerificationReport r = start_report(
      IdentityId::R2_LOGDERIV, {{"order", p.order}, {"terms", p.terms}, {"window", window}, {"precision", bits}});
  const SieveTables sv = build_sieve(2 * p.terms + 1);
  const Real pi = Real::pi(bits);

  // z d/dz log prod_i phi_hat_{2i+1}(z)^{-(-1)^i pi/(2i+1)} has z^m coefficient
  // pi sum_i (-1)^i c_{2i+1}(m)/(2i+1), since -z d/dz log phi_hat_k = sum_m c_k(m) z^m.
  // The c_k(m) used here come from the exact log series, checked for the
  // smallest moduli against the closed form.
  for (std::uint64_t k = 1; k <= 15; k += 2) {
    const RationalSeries s = log_phi_hat_series(k, p.order);
    for (std::size_t m = 1; m <= p.order; ++m) {
      if (s.coefficient(m) * -static_cast<long>(m) != cn_fast(k, m)) {
        throw std::logic_error("log_phi_hat_series disagrees with c_k(m)");
      }
    }
  }
  Real worst(bits);
  json q_expansion = json::array();
  for (std::uint64_t m = 1; m <= p.order; ++m) {
    q_expansion.push_back(r2_item(m, r2_partial_sums(m, p.terms, window, sv, pi, bits), worst, bits));
  }
  r.residual = worst;
  r.tolerance = calibration.r2_tolerance.rounded(bits);
  r.tolerance_kind = ToleranceKind::calibrated;
  r.details = {{"summation", "index order i = 0..I; averaged = mean of the last `window` partial sums"},
               {"calibration_version", calibration.version},
               {"q_expansion", std::move(q_expansion)}};
  finish(r, watch);
  return r;
}

// ---------------------------------------------------------------- theta square

VerificationReport verify_theta_square(const ThetaSquareParams& p) {
  const Stopwatch watch;
  if (p.order == 0) throw DomainError("verify_theta_square: order must be >= 1");
  VerificationReport r = start_report(IdentityId::THETA_SQUARE, {{"order", p.order}});
  std::vector<mpz_class> theta(p.order + 1, 0);
  theta[0] = 1;
  for (std::uint64_t k = 1; k * k <= p.order; ++k) theta[k * k] = 2;
  const IntPoly square = (IntPoly(theta) * IntPoly(theta)).truncated(p.order);

  mpz_class total = 0;
  json mismatches = json::array();
  for (std::size_t n = 0; n <= p.order; ++n) {
    const mpz_class expected = n == 0 ? mpz_class(1) : mpz_class(static_cast<unsigned long>(r2_enumerate(n)));
    const mpz_class diff = square.coefficient(n) - expected;
    if (diff != 0) {
      total += abs(diff);
      if (mismatches.size() < 10) {
        mismatches.push_back({{"n", n}, {"theta_square", square.coefficient(n).get_str()},
                              {"r2", expected.get_str()}});
      }
    }
  }
  r.residual = Real(total, kDefaultPrecision);
  r.residual_exact = total.get_str();
  r.tolerance = Real(kDefaultPrecision);
  r.tolerance_kind = ToleranceKind::exact;
  json head = json::array();
  for (std::size_t n = 0; n <= std::min<std::size_t>(p.order, 25); ++n) head.push_back(square.coefficient(n).get_str());
  r.details = {{"residual_meaning", "sum over n <= M of |[z^n] theta^2 - r2(n)|, r2(0) = 1"},
               {"leading_coefficients", std::move(head)},
               {"mismatches", std::move(mismatches)}};
  finish(r, watch);
  return r;
}

// ---------------------------------------------------------------- pi / 4

VerificationReport verify_pi_over_4(const PiOver4Params& p, const Calibration& calibration) {
  const Stopwatch watch;
  require_unit_interval(p.z, "verify_pi_over_4");
  const Bits bits = p.precision;
  const std::uint64_t window = p.window != 0 ? p.window : averaging_window(p.terms, calibration);
  VerificationReport r = start_report(
      IdentityId::PI_OVER_4, {{"z", fmt(p.z)}, {"terms", p.terms}, {"window", window}, {"precision", bits}});
  const std::uint64_t k_max = 2 * p.terms + 1;
  const SieveTables sv = build_sieve(k_max);
  const auto logs = real_log_table(p.z, k_max, bits);
  const auto phi_logs = real_log_phi_hat_table(logs, k_max, sv, true, bits);

  // Partial sums over i = 0..I of (-1)^(i+1) log(.) / (2i+1), ratio at each i,
  // and the mean ratio over the last `window` indices.
  CompensatedSum numerator(bits);
  CompensatedSum denominator(bits);
  CompensatedSum ratio_total(bits);
  const std::uint64_t first_in_window = p.terms + 1 > window ? p.terms + 1 - window : 0;
  Real ratio(bits);
  for (std::uint64_t i = 0; i <= p.terms; ++i) {
    const std::uint64_t k = 2 * i + 1;
    Real a = logs[k] / static_cast<long>(k);
    Real b = phi_logs[k] / static_cast<long>(k);
    if (i % 2 == 0) {
      a = -a;
      b = -b;
    }
    numerator.add(a);
    denominator.add(b);
    if (i >= first_in_window) {
      const Real den = denominator.result();
      guard_denominator(den, denominator.abs_total(), bits, "verify_pi_over_4");
      ratio = numerator.result() / den;
      ratio_total.add(ratio);
    }
  }
  const long count = static_cast<long>(p.terms + 1 - first_in_window);
  const Real averaged = ratio_total.result() / count;
  Real target = Real::pi(bits);
  target /= 4L;
  r.residual = abs(averaged - target);
  r.tolerance = significant_digit_tolerance(target, calibration.pi_over_4_digits);
  r.tolerance_kind = ToleranceKind::calibrated;
  r.details = {{"raw_ratio", fmt(ratio)},
               {"raw_residual", fmt(abs(ratio - target))},
               {"averaged_ratio", fmt(averaged)},
               {"target", fmt(target)},
               {"numerator", fmt(numerator.result())},
               {"denominator", fmt(denominator.result())},
               {"significant_digits", calibration.pi_over_4_digits},
               {"calibration_version", calibration.version}};
  finish(r, watch);
  return r;
}

// ---------------------------------------------------------------- interior convergence

VerificationReport verify_interior_convergence(const InteriorParams& p, const Calibration& calibration) {
  const Stopwatch watch;
  if (p.n_list.empty()) throw DomainError("verify_interior_convergence: empty N list");
  if (!std::is_sorted(p.n_list.begin(), p.n_list.end()) ||
      std::adjacent_find(p.n_list.begin(), p.n_list.end()) != p.n_list.end()) {
    throw DomainError("verify_interior_convergence: N list must be strictly increasing");
  }
  if (!(abs(p.z) < 1L)) throw DomainError("verify_interior_convergence: requires |z| < 1");
  const Bits bits = p.precision;
  VerificationReport r = start_report(IdentityId::INTERIOR_CONVERGENCE,
                                      {{"z", fmt(p.z)}, {"n_list", fmt_list(p.n_list)}, {"precision", bits}});
  const HPComplex z(p.z.rounded(bits));
  const HPComplex one(Real(1, bits));
  json points = json::array();
  Real worst_step(bits);
  Real previous(bits);
  Real deviation(bits);
  for (std::size_t k = 0; k < p.n_list.size(); ++k) {
    const ProductValue v = truncated_product(p.n_list[k], z, {bits, 4096});
    deviation = abs(v.value - one);
    if (k > 0) worst_step = max(worst_step, deviation / previous);
    points.push_back({{"n", p.n_list[k]},
                      {"abs_deviation", fmt(deviation)},
                      {"value_re", fmt(v.value.re)},
                      {"value_im", fmt(v.value.im)},
                      {"error_estimate", fmt(v.error_estimate)},
                      {"precision_used", v.precision}});
    previous = deviation;
  }
  const Real tolerance = calibration.interior_tolerance.rounded(bits);
  r.residual = max(deviation / tolerance, worst_step);
  r.tolerance = Real(1, bits);
  r.tolerance_kind = ToleranceKind::calibrated;
  r.details = {{"normalization", "max(|P_N - 1| at last N / tolerance, max ratio of consecutive deviations)"},
               {"final_tolerance", fmt(tolerance)},
               {"calibration_version", calibration.version},
               {"checkpoints", std::move(points)}};
  finish(r, watch);
  return r;
}

// ---------------------------------------------------------------- boundary study

VerificationReport verify_boundary_study(const BoundaryStudyParams& p, const Calibration& calibration) {
  const Stopwatch watch;
  const Bits bits = p.precision;
  json radii = json::array();
  for (const auto& rad : p.radii) radii.push_back(fmt(rad));
  VerificationReport r = start_report(IdentityId::BOUNDARY_STUDY, {{"n_list", fmt_list(p.n_list)},
                                                                   {"radii", radii},
                                                                   {"angle_count", p.angle_count},
                                                                   {"precision", bits}});
  const GridStudy study = boundary_grid_study(p.n_list, p.radii, p.angle_count, bits);

  // Asserted: the N = 1 closed form |P_1(z)| = |1 - z|^-1, and the calibrated
  // interior band. Spikes near the boundary are recorded only.
  const Real closed_form_tol = ldexp(Real(1, bits), -static_cast<long>(bits / 2));
  const Real band = calibration.boundary_interior_tolerance.rounded(bits);
  const HPComplex one(Real(1, bits));
  Real worst(bits);
  for (const auto& pt : study.points) {
    if (pt.n != 1) continue;
    const Real expected = Real(1, bits) / abs(one - HPComplex::polar(pt.radius, pt.theta));
    worst = max(worst, abs(pt.abs_value - expected) / closed_form_tol);
  }
  json rows = json::array();
  for (const auto& row : study.summarize()) {
    const bool banded = row.radius <= calibration.boundary_interior_radius && row.n >= calibration.boundary_interior_min_n;
    if (banded) worst = max(worst, row.max_deviation / band);
    rows.push_back({{"n", row.n},
                    {"r", fmt(row.radius)},
                    {"min_abs", fmt(row.min_abs)},
                    {"max_abs", fmt(row.max_abs)},
                    {"max_deviation", fmt(row.max_deviation)},
                    {"angle_index_at_max", row.angle_index_at_max},
                    {"root_order_at_max", row.root_order_at_max},
                    {"spike_count", row.spike_count},
                    {"asserted_band", banded}});
  }
  r.residual = worst;
  r.tolerance = Real(1, bits);
  r.tolerance_kind = ToleranceKind::calibrated;
  r.details = {{"normalization",
                "max of N = 1 closed-form error / 2^-(prec/2) and interior-row deviation / band"},
               {"band", fmt(band)},
               {"band_radius_max", fmt(calibration.boundary_interior_radius)},
               {"band_min_n", calibration.boundary_interior_min_n},
               {"calibration_version", calibration.version},
               {"rows", std::move(rows)}};
  finish(r, watch);
  return r;
}

// ---------------------------------------------------------------- suite

std::uint64_t default_sieve_limit() {
  return std::max({PntDecayParams{}.n_max, SigmaZetaParams{}.terms});
}

std::vector<VerificationReport> run_all_verifiers(const Calibration& calibration, Bits precision,
                                                  const SieveTables* sieve) {
  std::vector<VerificationReport> out;
  for (IdentityId id : all_identities()) {
    switch (id) {
      case IdentityId::PNT_COEFF_DECAY: {
        PntDecayParams p;
        p.precision = precision;
        out.push_back(verify_pnt_decay(p, calibration, sieve));
        break;
      }
      case IdentityId::PNT_SERIES_EXACT:
        out.push_back(verify_pnt_series({}));
        break;
      case IdentityId::SIGMA_ZETA: {
        SigmaZetaParams p;
        p.precision = precision;
        out.push_back(verify_sigma_zeta(p, sieve));
        break;
      }
      case IdentityId::PRODUCT_IDENTITY_S: {
        ProductIdentityParams p;
        p.precision = precision;
        out.push_back(verify_product_identity_s(p));
        break;
      }
      case IdentityId::ZETA_RATIO: {
        ZetaRatioParams p;
        p.precision = precision;
        out.push_back(verify_zeta_ratio(p, calibration));
        break;
      }
      case IdentityId::R2_SERIES: {
        R2SeriesParams p;
        p.precision = precision;
        out.push_back(verify_r2_series(p, calibration));
        break;
      }
      case IdentityId::R2_LOGDERIV: {
        R2LogDerivParams p;
        p.precision = precision;
        out.push_back(verify_r2_product_logderiv(p, calibration));
        break;
      }
      case IdentityId::THETA_SQUARE:
        out.push_back(verify_theta_square({}));
        break;
      case IdentityId::PI_OVER_4: {
        PiOver4Params p;
        p.precision = precision;
        out.push_back(verify_pi_over_4(p, calibration));
        break;
      }
      case IdentityId::INTERIOR_CONVERGENCE: {
        InteriorParams p;
        p.precision = precision;
        out.push_back(verify_interior_convergence(p, calibration));
        break;
      }
      case IdentityId::BOUNDARY_STUDY: {
        BoundaryStudyParams p;
        p.precision = precision;
        out.push_back(verify_boundary_study(p, calibration));
        break;
      }
    }
  }
  return out;
}

}  // namespace cyclolab
