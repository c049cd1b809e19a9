#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"

#include "cyclolab/arith.hpp"
#include "cyclolab/complex.hpp"
#include "cyclolab/cyclotomic.hpp"
#include "cyclolab/errors.hpp"
#include "cyclolab/verify.hpp"

using namespace cyclolab;
using nlohmann::json;

namespace {

Real num(const json& field) { return Real::parse(field.get<std::string>(), 128); }

// r2 by counting lattice points, independent of the library's enumerator.
long lattice_r2(long n) {
  long count = 0;
  for (long a = -n; a <= n; ++a) {
    for (long b = -n; b <= n; ++b) count += (a * a + b * b == n);
  }
  return count;
}

std::vector<VerificationReport> seen;

const VerificationReport& keep(VerificationReport r) {
  seen.push_back(std::move(r));
  return seen.back();
}

}  // namespace

TEST_CASE("identity names parse in either spelling") {
  CHECK(parse_identity("sigma-zeta") == IdentityId::SIGMA_ZETA);
  CHECK(parse_identity("theta-square") == IdentityId::THETA_SQUARE);
  CHECK(parse_identity("PI_OVER_4") == IdentityId::PI_OVER_4);
  CHECK_FALSE(parse_identity("theta").has_value());
  CHECK_FALSE(parse_identity("").has_value());
  for (IdentityId id : all_identities()) CHECK(parse_identity(identity_name(id)) == id);
  CHECK(all_identities().size() == 11);
  CHECK(tolerance_kind_name(ToleranceKind::rigorous_bound) == "rigorous-bound");
}

TEST_CASE("embedded calibration") {
  const Calibration& cal = default_calibration();
  CHECK(cal.version >= 1);
  CHECK(cal.pnt_thresholds.size() == 10);
  CHECK(cal.pnt_reference_n == 10'000'000);
  Real largest(128);
  for (const auto& [m, t] : cal.pnt_thresholds) {
    CHECK(t > 0L);
    CHECK(t < 1e-2);
    largest = max(largest, t);
  }
  CHECK(cal.pnt_threshold(11) == largest);
  CHECK(cal.r2_tolerance == Real::parse("0.5", 128));

  CHECK_THROWS_AS(parse_calibration(json::object()), DomainError);
  CHECK_THROWS_AS(parse_calibration(json{{"version", 1}}), DomainError);
}

TEST_CASE("tolerance helpers") {
  CHECK(averaging_window(10'000, default_calibration()) == 100);
  CHECK(averaging_window(50, default_calibration()) == 1);
  const Real quarter_pi = Real::pi(128) / 4L;
  CHECK(abs(significant_digit_tolerance(quarter_pi, 3) - Real::parse("5e-4", 128)) < 1e-30);
  CHECK(abs(significant_digit_tolerance(Real::parse("1.6449", 128), 3) - Real::parse("5e-3", 128)) < 1e-30);
  CHECK(abs(significant_digit_tolerance(Real(12, 128), 2) - Real::parse("0.5", 128)) < 1e-30);
  CHECK_THROWS_AS(significant_digit_tolerance(Real(128), 3), DomainError);
}

TEST_CASE("THETA_SQUARE is exactly zero for every order up to 200") {
  for (std::size_t m = 1; m <= 200; ++m) {
    const auto& r = keep(verify_theta_square({m}));
    REQUIRE(r.residual_exact == std::string("0"));
    REQUIRE(r.pass);
  }
  const auto& r = keep(verify_theta_square({25}));
  const auto& head = r.details["leading_coefficients"];
  CHECK(head[0] == "1");
  for (long n = 1; n <= 25; ++n) CHECK(head[n].get<std::string>() == std::to_string(lattice_r2(n)));
  CHECK(head[1] == "4");
  CHECK(head[3] == "0");
  CHECK_THROWS_AS(verify_theta_square({0}), DomainError);
}

TEST_CASE("SIGMA_ZETA rigorous bound holds across n, s and I") {
  SigmaZetaParams p;
  p.n_list = range_list(1, 30);
  for (const char* s : {"0.5", "1", "2"}) {
    for (std::uint64_t terms : {1ULL, 10ULL, 1000ULL}) {
      p.s = Real::parse(s, 128);
      p.terms = terms;
      const auto& r = keep(verify_sigma_zeta(p));
      INFO("s = " << s << ", I = " << terms);
      CHECK(r.tolerance_kind == ToleranceKind::rigorous_bound);
      CHECK_FALSE(r.bound_formula.empty());
      CHECK(r.pass);
      for (const auto& item : r.details["items"]) CHECK(item["pass"].get<bool>());
    }
  }

  // n = 6 at s = 1: left side sigma(6)/6 = 2.
  p.n_list = {6};
  p.s = Real(1, 128);
  p.terms = 100'000;
  const auto& six = keep(verify_sigma_zeta(p));
  CHECK(six.pass);
  CHECK(abs(num(six.details["items"][0]["lhs"]) - 2L) < 1e-30);
  CHECK(num(six.details["items"][0]["residual"]) <= num(six.details["items"][0]["tail_bound"]) +
                                                        num(six.details["items"][0]["float_error"]));

  // n = 1: zeta(2) sum mu(i)/i^2 -> 1, and the residual shrinks with I.
  p.n_list = {1};
  p.terms = 100;
  const Real r100 = num(keep(verify_sigma_zeta(p)).details["items"][0]["residual"]);
  p.terms = 10'000;
  const Real r10k = num(keep(verify_sigma_zeta(p)).details["items"][0]["residual"]);
  CHECK(r10k < r100);

  p.s = Real(128);
  CHECK_THROWS_AS(verify_sigma_zeta(p), DomainError);
  p.s = Real(-1, 128);
  CHECK_THROWS_AS(verify_sigma_zeta(p), DomainError);
}

TEST_CASE("PRODUCT_IDENTITY_S coefficients") {
  ProductIdentityParams p;
  p.order = 5;
  p.terms = 10'000;
  const auto& r = keep(verify_product_identity_s(p));
  CHECK(r.pass);
  CHECK(r.details["lhs_mode"] == "exact-rational");
  CHECK(r.details["lhs_matches_divisor_oracle"].get<bool>());
  // (1/n) sum_{i | n} i^(1-s) at s = 2: n = 1 -> 1, n = 2 -> (1 + 1/2)/2, n = 4 -> (1 + 1/2 + 1/4)/4.
  CHECK(abs(num(r.details["items"][0]["lhs"]) - 1L) < 1e-30);
  CHECK(abs(num(r.details["items"][1]["lhs"]) - Real::parse("0.75", 128)) < 1e-30);
  CHECK(abs(num(r.details["items"][3]["lhs"]) - Real::parse("0.4375", 128)) < 1e-30);

  p.s = Real::parse("2.5", 128);
  p.order = 12;
  const auto& frac = keep(verify_product_identity_s(p));
  CHECK(frac.pass);
  CHECK(frac.details["lhs_mode"] == "floating");

  p.s = Real(1, 128);
  CHECK_THROWS_AS(verify_product_identity_s(p), DomainError);
  p.s = Real(2, 128);
  p.order = 61;
  CHECK_THROWS_AS(verify_product_identity_s(p), DomainError);
}

TEST_CASE("PNT_COEFF_DECAY") {
  const Calibration& cal = default_calibration();
  PntDecayParams degenerate;
  degenerate.m_list = {1};
  degenerate.n_max = 1;
  degenerate.schedule = {1};
  const auto& one = keep(verify_pnt_decay(degenerate, cal));
  CHECK_FALSE(one.pass);
  CHECK(abs(num(one.details["items"][0]["final_abs"]) - 1L) < 1e-20);

  // N = 10^5: each trace sits below its N = 10^2 checkpoint.
  PntDecayParams p;
  p.n_max = 100'000;
  p.schedule = {100, 1000, 10'000, 100'000};
  const auto& r = keep(verify_pnt_decay(p, cal));
  for (const auto& item : r.details["items"]) {
    INFO("m = " << item["m"]);
    const auto& trace = item["trace"];
    CHECK(abs(num(trace.back()["value"])) < abs(num(trace.front()["value"])));
    CHECK(trace.size() == 4);
  }

  p.m_list = {0};
  CHECK_THROWS_AS(verify_pnt_decay(p, cal), DomainError);
}

TEST_CASE("PNT_SERIES_EXACT") {
  const auto& r = keep(verify_pnt_series({}));
  CHECK(r.pass);
  CHECK(r.residual_exact == std::string("0"));
  CHECK(r.details["coefficients"].size() == 20);
  CHECK_FALSE(r.details.contains("first_mismatch"));
  CHECK_THROWS_AS(verify_pnt_series({0, 3}), DomainError);
}

TEST_CASE("ZETA_RATIO") {
  const Calibration& cal = default_calibration();
  ZetaRatioParams p;
  const auto& half = keep(verify_zeta_ratio(p, cal));
  CHECK(half.pass);
  const Real zeta2 = Real::pi(128) * Real::pi(128) / 6L;
  CHECK(abs(num(half.details["ratio"]) - zeta2) < 1e-4);

  p.z = Real::parse("0.001", 128);
  CHECK(keep(verify_zeta_ratio(p, cal)).pass);

  // I = 1: numerator and denominator are both log(1 - z).
  p.z = Real::parse("0.5", 128);
  p.terms = 1;
  const auto& floor = keep(verify_zeta_ratio(p, cal));
  CHECK_FALSE(floor.pass);
  CHECK(abs(num(floor.details["ratio"]) - 1L) < 1e-30);

  // Denominator against per-factor complex logs of Phi^_i.
  p.terms = 30;
  const auto& small = keep(verify_zeta_ratio(p, cal));
  Real oracle(128);
  for (std::uint64_t i = 1; i <= 30; ++i) {
    oracle += log_phi_hat(i, HPComplex(Real::parse("0.5", 128))).re / static_cast<long>(i * i);
  }
  CHECK(abs(num(small.details["denominator"]) - oracle) < 1e-17);  // details carry 20 digits

  p.z = Real(1, 128);
  CHECK_THROWS_AS(verify_zeta_ratio(p, cal), DomainError);
  p.z = Real(128);
  CHECK_THROWS_AS(verify_zeta_ratio(p, cal), DomainError);
}

TEST_CASE("PI_OVER_4") {
  const Calibration& cal = default_calibration();
  PiOver4Params p;
  const auto& half = keep(verify_pi_over_4(p, cal));
  CHECK(half.pass);
  CHECK(half.details.contains("raw_residual"));

  p.z = Real::parse("0.001", 128);
  CHECK(keep(verify_pi_over_4(p, cal)).residual < 1e-2);

  p.z = Real::parse("0.5", 128);
  p.terms = 0;
  const auto& single = keep(verify_pi_over_4(p, cal));
  CHECK_FALSE(single.pass);
  CHECK(abs(num(single.details["averaged_ratio"]) - 1L) < 1e-30);

  // Denominator sum_{i <= I} (-1)^(i+1) log Phi^_{2i+1}(z) / (2i+1) against per-factor logs.
  p.terms = 20;
  p.window = 1;
  const auto& small = keep(verify_pi_over_4(p, cal));
  Real oracle(128);
  for (std::uint64_t i = 0; i <= 20; ++i) {
    const Real term = log_phi_hat(2 * i + 1, HPComplex(Real::parse("0.5", 128))).re / static_cast<long>(2 * i + 1);
    oracle += (i % 2 == 0) ? -term : term;
  }
  CHECK(abs(num(small.details["denominator"]) - oracle) < 1e-17);  // details carry 20 digits
  CHECK(small.details["raw_ratio"] == small.details["averaged_ratio"]);
}

TEST_CASE("R2_SERIES targets and tenfold decrease") {
  const Calibration& cal = default_calibration();
  R2SeriesParams p;
  std::vector<Real> previous;
  for (std::uint64_t terms : {1000ULL, 10'000ULL, 100'000ULL}) {
    p.terms = terms;
    const auto& r = keep(verify_r2_series(p, cal));
    CHECK(r.pass);
    std::vector<Real> current;
    for (std::size_t k = 0; k < r.details["items"].size(); ++k) {
      const auto& item = r.details["items"][k];
      const long n = static_cast<long>(item["n"].get<std::uint64_t>());
      INFO("n = " << n << ", I = " << terms);
      CHECK(item["target_r2"].get<long>() == lattice_r2(n));
      CHECK(item["target_by_divisor_classes"].get<long>() == lattice_r2(n));
      CHECK(item["rounded_average"].get<std::string>() == std::to_string(lattice_r2(n)));
      current.push_back(num(item["averaged_residual"]));
      if (!previous.empty()) CHECK(current.back() <= previous[k]);
    }
    previous = current;
  }
  p.n_list = {0};
  CHECK_THROWS_AS(verify_r2_series(p, cal), DomainError);
}

TEST_CASE("R2_LOGDERIV q-expansion") {
  R2LogDerivParams p;
  p.order = 10;
  p.terms = 10'000;
  const auto& r = keep(verify_r2_product_logderiv(p, default_calibration()));
  CHECK(r.pass);
  const auto& q = r.details["q_expansion"];
  REQUIRE(q.size() == 10);
  CHECK(q[0]["rounded_average"] == "4");
  CHECK(q[1]["rounded_average"] == "4");
  CHECK(q[6]["rounded_average"] == "0");
  p.order = 61;
  CHECK_THROWS_AS(verify_r2_product_logderiv(p, default_calibration()), DomainError);
}

TEST_CASE("INTERIOR_CONVERGENCE and BOUNDARY_STUDY defaults") {
  const Calibration& cal = default_calibration();
  const auto& interior = keep(verify_interior_convergence({}, cal));
  CHECK(interior.pass);
  const auto& points = interior.details["checkpoints"];
  REQUIRE(points.size() == 3);
  CHECK(num(points[1]["abs_deviation"]) < num(points[0]["abs_deviation"]));
  CHECK(num(points[2]["abs_deviation"]) < num(points[1]["abs_deviation"]));
  CHECK(num(points[2]["abs_deviation"]) < 1e-2);

  InteriorParams unsorted;
  unsorted.n_list = {1000, 100};
  CHECK_THROWS_AS(verify_interior_convergence(unsorted, cal), DomainError);

  const auto& grid = keep(verify_boundary_study({}, cal));
  CHECK(grid.pass);
  CHECK(grid.details["rows"].size() == 25);
}

TEST_CASE("pass is recomputable from residual and tolerance") {
  REQUIRE(seen.size() > 50);
  for (const auto& r : seen) {
    INFO(identity_name(r.id));
    CHECK(r.pass == r.recomputed_pass());
    CHECK(r.pass == (r.residual <= r.tolerance));
    if (r.tolerance_kind == ToleranceKind::rigorous_bound) CHECK_FALSE(r.bound_formula.empty());
    CHECK(r.runtime_ms >= 0);
  }
}
