#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "cyclolab/errors.hpp"
#include "cyclolab/io.hpp"

using namespace cyclolab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("cyclolab-io-" + std::to_string(std::rand()) + "-" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

VerificationReport passing_report() {
  VerificationReport r;
  r.id = IdentityId::THETA_SQUARE;
  r.parameters = {{"order", 3}};
  r.residual = Real(128);
  r.residual_exact = "0";
  r.tolerance = Real(128);
  r.tolerance_kind = ToleranceKind::exact;
  r.pass = true;
  r.runtime_ms = 7;
  return r;
}

}  // namespace

TEST_CASE("cache payloads roundtrip bit-exactly") {
  const SieveTables sieve = build_sieve(1000);
  CHECK(sieve_from_payload(decode_cache(encode_cache(to_payload(sieve)))) == sieve);

  const CnTable table = build_cn_table(50, 50);
  CHECK(cn_table_from_payload(decode_cache(encode_cache(to_payload(table)))) == table);

  const IntPoly phi = cyclotomic(105);
  CHECK(cyclotomic_from_payload(decode_cache(encode_cache(to_payload(105, phi)))) == phi);

  mpz_class big;
  mpz_ui_pow_ui(big.get_mpz_t(), 2, 200);
  mpz_class odd;
  mpz_ui_pow_ui(odd.get_mpz_t(), 3, 101);
  const CachePayload raw{CacheKind::cn_table, {0, ~0ULL}, {0, -1, 1, 255, 256, -256, big, -odd, big - 1}};
  CHECK(decode_cache(encode_cache(raw)) == raw);

  const std::string bytes = encode_cache(raw);
  CHECK(bytes.substr(0, 9) == "CYCLOLAB1");
  CHECK(bytes[9] == static_cast<char>(CacheKind::cn_table));
}

TEST_CASE("any flipped or missing byte is detected") {
  const std::string bytes = encode_cache(to_payload(30, cyclotomic(30)));
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    for (unsigned char mask : {0x01, 0x80, 0xff}) {
      std::string bad = bytes;
      bad[i] = static_cast<char>(bad[i] ^ mask);
      INFO("byte " << i << " mask " << int(mask));
      REQUIRE_THROWS_AS(decode_cache(bad), CacheInvalidError);
    }
  }
  for (std::size_t len = 0; len < bytes.size(); ++len) REQUIRE_THROWS_AS(decode_cache(bytes.substr(0, len)), CacheInvalidError);
  CHECK_THROWS_AS(decode_cache(bytes + "x"), CacheInvalidError);
}

TEST_CASE("cache files: atomic write, misses and corruption") {
  TempDir dir;
  const fs::path file = dir.path / "sub" / "sieve.bin";
  const CachePayload payload = to_payload(build_sieve(200));
  save_cache_file(file, payload);
  CHECK(fs::exists(file));
  CHECK_FALSE(fs::exists(fs::path(file.string() + ".tmp")));

  CHECK(load_cache_file(file, CacheKind::sieve, {200}) == payload);
  CHECK_FALSE(load_cache_file(file, CacheKind::sieve, {201}).has_value());
  CHECK_FALSE(load_cache_file(file, CacheKind::cn_table, {200}).has_value());
  CHECK_FALSE(load_cache_file(dir.path / "absent.bin", CacheKind::sieve, {200}).has_value());

  std::string bytes = slurp(file);
  bytes[bytes.size() / 2] ^= 0x10;
  spit(file, bytes);
  CHECK_THROWS_AS(load_cache_file(file, CacheKind::sieve, {200}), CacheInvalidError);
}

TEST_CASE("TableCache recomputes and repairs damaged files") {
  TempDir dir;
  TableCache cache(dir.path);
  const SieveTables first = cache.sieve(500);
  CHECK(cache.misses() == 1);
  CHECK(cache.sieve(500) == first);
  CHECK(cache.hits() == 1);
  CHECK(first == build_sieve(500));

  const fs::path file = cache.file_for(CacheKind::sieve, {500});
  std::string bytes = slurp(file);
  bytes[20] ^= 0x01;
  spit(file, bytes);
  CHECK(cache.sieve(500) == first);
  CHECK(cache.invalid() == 1);
  CHECK(cache.misses() == 2);
  CHECK(load_cache_file(file, CacheKind::sieve, {500}).has_value());

  CHECK(cache.cn_table(20, 30) == build_cn_table(20, 30));
  CHECK(cache.cn_table(20, 30) == build_cn_table(20, 30));
  CHECK(cache.cyclotomic(105) == cyclotomic(105));
  CHECK(cache.cyclotomic(105).coefficient(7) == -2);
  CHECK(cache.hits() == 3);
}

TEST_CASE("cache directory from the environment") {
  ::unsetenv("CYCLOLAB_CACHE_DIR");
  CHECK(resolve_cache_dir("fallback") == fs::path("fallback"));
  ::setenv("CYCLOLAB_CACHE_DIR", "/tmp/elsewhere", 1);
  CHECK(resolve_cache_dir("fallback") == fs::path("/tmp/elsewhere"));
  ::setenv("CYCLOLAB_CACHE_DIR", "", 1);
  CHECK(resolve_cache_dir("fallback") == fs::path("fallback"));
  ::unsetenv("CYCLOLAB_CACHE_DIR");
}

TEST_CASE("RunConfig") {
  RunConfig c;
  CHECK(c.precision == 128);
  CHECK_NOTHROW(c.validate());
  c.precision = 63;
  CHECK_THROWS_AS(c.validate(), DomainError);
  CHECK(parse_format("json") == OutputFormat::json);
  CHECK(parse_format("csv") == OutputFormat::csv);
  CHECK(parse_format("table") == OutputFormat::table);
  CHECK_FALSE(parse_format("JSON").has_value());
}

TEST_CASE("emit_report") {
  std::ostringstream empty;
  const std::size_t empty_bytes = emit_report({}, OutputFormat::json, empty);
  CHECK(empty_bytes == empty.str().size());
  CHECK(empty.str() == "[]\n");

  std::ostringstream one;
  const std::size_t written = emit_report({passing_report()}, OutputFormat::json, one);
  CHECK(written == one.str().size());
  const json doc = json::parse(one.str());
  REQUIRE(doc.is_array());
  REQUIRE(doc.size() == 1);
  CHECK(doc[0]["pass"] == true);
  CHECK(doc[0]["identity_id"] == "THETA_SQUARE");
  CHECK(doc[0]["tolerance_kind"] == "exact");
  CHECK(doc[0]["schema_version"] == kReportSchemaVersion);

  // Fixed 20 significant digits in scientific notation.
  const std::regex twenty(R"(-?\d\.\d{19}e[+-]\d+)");
  CHECK(std::regex_match(doc[0]["residual"].get<std::string>(), twenty));
  VerificationReport pi_report = passing_report();
  pi_report.residual = Real::pi(128);
  const json pi_doc = report_to_json(pi_report);
  CHECK(pi_doc["residual"] == "3.1415926535897932385e+00");

  // Stable key order: keys come out sorted, so equal reports serialize identically.
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc[0].items()) keys.push_back(k);
  CHECK(std::is_sorted(keys.begin(), keys.end()));
  CHECK(render_report({passing_report(), pi_report}, OutputFormat::json) ==
        render_report({passing_report(), pi_report}, OutputFormat::json));

  const std::string csv = render_report({passing_report()}, OutputFormat::csv);
  CHECK(csv.rfind("identity_id,pass,residual,tolerance,tolerance_kind,bound_formula,residual_exact,runtime_ms\n", 0) == 0);
  CHECK(csv.find("THETA_SQUARE,true,") != std::string::npos);

  const std::string table = render_report({passing_report()}, OutputFormat::table);
  CHECK(table.find("THETA_SQUARE") != std::string::npos);
  CHECK(table.find("1/1 passed") != std::string::npos);
}

TEST_CASE("grid CSV") {
  const GridStudy study = boundary_grid_study({1, 10}, {Real::parse("0.5", 128)}, 4);
  std::ostringstream out;
  const std::size_t written = emit_grid_csv(study, out);
  CHECK(written == out.str().size());
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "N,r,theta,abs_PN");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 8);
  // N = 1, theta = 0: |P_1(1/2)| = 1 / (1 - 1/2) = 2.
  CHECK(out.str().find("1,5.0000000000000000000e-01,0.0000000000000000000e+00,2.0000000000000000000e+00") !=
        std::string::npos);
}

TEST_CASE("series JSON carries numerator and denominator strings") {
  const json doc = series_to_json(log_phi_hat_series(2, 4));
  CHECK(doc["order"] == 4);
  CHECK(doc["constant"] == json::array({"0", "1"}));
  CHECK(doc["coefficients"][0] == json::array({"1", "1"}));
  CHECK(doc["coefficients"][1] == json::array({"-1", "2"}));
  CHECK(doc["coefficients"][3] == json::array({"-1", "4"}));
}
