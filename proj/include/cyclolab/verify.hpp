#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cyclolab/arith.hpp"
#include "cyclolab/real.hpp"

namespace cyclolab {

enum class IdentityId {
  PNT_COEFF_DECAY,
  PNT_SERIES_EXACT,
  SIGMA_ZETA,
  PRODUCT_IDENTITY_S,
  ZETA_RATIO,
  R2_SERIES,
  R2_LOGDERIV,
  THETA_SQUARE,
  PI_OVER_4,
  INTERIOR_CONVERGENCE,
  BOUNDARY_STUDY,
};

std::string_view identity_name(IdentityId id);
/// Accepts "SIGMA_ZETA" as well as the CLI spelling "sigma-zeta".
std::optional<IdentityId> parse_identity(std::string_view text);
const std::vector<IdentityId>& all_identities();

enum class ToleranceKind { rigorous_bound, calibrated, exact };
std::string_view tolerance_kind_name(ToleranceKind kind);

struct VerificationReport {
  IdentityId id = IdentityId::THETA_SQUARE;
  nlohmann::json parameters = nlohmann::json::object();
  /// Multi-item reports carry max_i residual_i / tolerance_i here against a tolerance of 1.
  Real residual;
  std::optional<std::string> residual_exact;
  Real tolerance;
  ToleranceKind tolerance_kind = ToleranceKind::calibrated;
  /// Formula id of a rigorous bound; empty otherwise.
  std::string bound_formula;
  bool pass = false;
  std::int64_t runtime_ms = 0;
  nlohmann::json details = nlohmann::json::object();

  /// pass as a pure function of residual and tolerance.
  bool recomputed_pass() const { return residual <= tolerance; }
};

/// Thresholds fixed once from the implementer's oracle runs; see data/calibration.json.
struct Calibration {
  int version = 0;
  std::uint64_t pnt_reference_n = 0;
  std::uint64_t pnt_evaluated_at = 0;
  std::map<std::uint64_t, Real> pnt_thresholds;
  Real r2_tolerance;
  /// Averaging window is max(1, I / window_divisor) trailing partial sums.
  std::uint64_t window_divisor = 100;
  /// Agreement to this many significant digits: |x - target| <= 0.5 * 10^(e - digits + 1)
  /// where 10^e <= |target| < 10^(e + 1).
  int pi_over_4_digits = 3;
  int zeta_ratio_digits = 3;
  Real boundary_interior_radius;
  std::uint64_t boundary_interior_min_n = 0;
  Real boundary_interior_tolerance;
  Real interior_tolerance;

  /// Threshold for m; the largest stored threshold for m outside the table.
  Real pnt_threshold(std::uint64_t m) const;
};

Calibration parse_calibration(const nlohmann::json& document);
/// The calibration compiled into the binary.
const Calibration& default_calibration();
std::uint64_t averaging_window(std::uint64_t terms, const Calibration& calibration);
Real significant_digit_tolerance(const Real& target, int digits);

std::vector<std::uint64_t> range_list(std::uint64_t first, std::uint64_t last);

struct PntDecayParams {
  std::vector<std::uint64_t> m_list = range_list(1, 10);
  std::uint64_t n_max = 1'000'000;
  /// Empty: 10, 100, ..., n_max. N = 1 is left out since S_1(m) = 1 for every m.
  std::vector<std::uint64_t> schedule;
  Bits precision = kDefaultPrecision;
};

struct PntSeriesParams {
  std::uint64_t n_max = 1000;
  std::size_t order = 20;
};

struct SigmaZetaParams {
  std::vector<std::uint64_t> n_list = range_list(1, 100);
  Real s = Real(1, kDefaultPrecision);
  std::uint64_t terms = 1'000'000;
  Bits precision = kDefaultPrecision;
};

struct ProductIdentityParams {
  std::size_t order = 30;
  Real s = Real(2, kDefaultPrecision);
  std::uint64_t terms = 100'000;
  Bits precision = kDefaultPrecision;
};

struct ZetaRatioParams {
  Real z = Real::parse("0.5", kDefaultPrecision);
  Real s = Real(1, kDefaultPrecision);
  std::uint64_t terms = 10'000;
  Bits precision = kDefaultPrecision;
};

struct R2SeriesParams {
  std::vector<std::uint64_t> n_list{1, 2, 3, 5, 7, 25};
  std::uint64_t terms = 100'000;
  /// 0 selects the calibrated window.
  std::uint64_t window = 0;
  Bits precision = kDefaultPrecision;
};

struct R2LogDerivParams {
  std::size_t order = 60;
  std::uint64_t terms = 100'000;
  std::uint64_t window = 0;
  Bits precision = kDefaultPrecision;
};

struct ThetaSquareParams {
  std::size_t order = 200;
};

struct PiOver4Params {
  Real z = Real::parse("0.5", kDefaultPrecision);
  std::uint64_t terms = 10'000;
  std::uint64_t window = 0;
  Bits precision = kDefaultPrecision;
};

struct InteriorParams {
  Real z = Real::parse("0.3", kDefaultPrecision);
  std::vector<std::uint64_t> n_list{100, 1000, 10000};
  Bits precision = kDefaultPrecision;
};

struct BoundaryStudyParams {
  std::vector<std::uint64_t> n_list{1, 10, 100, 400, 1000};
  std::vector<Real> radii{Real::parse("0.1", kDefaultPrecision), Real::parse("0.5", kDefaultPrecision),
                          Real::parse("0.9", kDefaultPrecision), Real::parse("0.99", kDefaultPrecision),
                          Real::parse("0.999", kDefaultPrecision)};
  std::uint64_t angle_count = 24;
  Bits precision = kDefaultPrecision;
};

VerificationReport verify_pnt_decay(const PntDecayParams& params, const Calibration& calibration,
                                    const SieveTables* sieve = nullptr);
VerificationReport verify_pnt_series(const PntSeriesParams& params);
VerificationReport verify_sigma_zeta(const SigmaZetaParams& params, const SieveTables* sieve = nullptr);
VerificationReport verify_product_identity_s(const ProductIdentityParams& params);
VerificationReport verify_zeta_ratio(const ZetaRatioParams& params, const Calibration& calibration);
VerificationReport verify_r2_series(const R2SeriesParams& params, const Calibration& calibration);
VerificationReport verify_r2_product_logderiv(const R2LogDerivParams& params, const Calibration& calibration);
VerificationReport verify_theta_square(const ThetaSquareParams& params);
VerificationReport verify_pi_over_4(const PiOver4Params& params, const Calibration& calibration);
VerificationReport verify_interior_convergence(const InteriorParams& params, const Calibration& calibration);
VerificationReport verify_boundary_study(const BoundaryStudyParams& params, const Calibration& calibration);

/// Every verifier at its default parameters, in all_identities() order. The
/// sieve, when given, must reach the largest index any default needs.
std::vector<VerificationReport> run_all_verifiers(const Calibration& calibration, Bits precision,
                                                  const SieveTables* sieve = nullptr);
/// Largest sieve index the default verifier suite touches.
std::uint64_t default_sieve_limit();

}  // namespace cyclolab
