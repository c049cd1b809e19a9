#include <cstdlib>
#include <filesystem>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "cyclolab/cli.hpp"
#include "cyclolab/ramanujan.hpp"

using namespace cyclolab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string without_runtime(const std::string& json_text) {
  return std::regex_replace(json_text, std::regex(R"("runtime_ms": \d+)"), R"("runtime_ms": 0)");
}

std::string join(const std::vector<std::string>& args) {
  std::string s;
  for (const auto& a : args) s += "[" + a + "] ";
  return s;
}

}  // namespace

TEST_CASE("documented examples") {
  const Run csum = run({"csum", "4", "2"});
  CHECK(csum.code == 0);
  CHECK(csum.out == "-2\n");

  const Run phi2 = run({"cyclotomic", "2"});
  CHECK(phi2.code == 0);
  CHECK(phi2.out.find("Phi_2(z) = z + 1") != std::string::npos);
  CHECK(phi2.out.find("\n[1, 1]\n") != std::string::npos);

  CHECK(run({"verify", "theta-square", "--order", "100"}).code == 0);
}

TEST_CASE("csum agrees with the closed form, both routes") {
  for (std::uint64_t n = 1; n <= 12; ++n) {
    for (std::uint64_t m = 1; m <= 12; ++m) {
      const std::string expected = std::to_string(cn_fast(n, m)) + "\n";
      REQUIRE(run({"csum", std::to_string(n), std::to_string(m)}).out == expected);
      REQUIRE(run({"csum", std::to_string(n), std::to_string(m), "--bruteforce"}).out == expected);
    }
  }
}

TEST_CASE("cyclotomic output") {
  const Run one = run({"cyclotomic", "1"});
  CHECK(one.out.find("[-1, 1]") != std::string::npos);
  const Run hat = run({"cyclotomic", "1", "--hat"});
  CHECK(hat.out.find("[1, -1]") != std::string::npos);
  const Run json105 = run({"cyclotomic", "105", "--format", "json"});
  CHECK(json105.code == 0);
  CHECK(nlohmann::json::parse(json105.out)["coefficients"][7] == "-2");
}

TEST_CASE("trace, grid, series and oracle subcommands") {
  const Run trace = run({"trace", "1", "--nmax", "100", "--checkpoints", "1,10,100", "--mode", "exact"});
  CHECK(trace.code == 0);
  CHECK(trace.out.rfind("N,S_N,error_bound,S_N_exact\n1,", 0) == 0);
  CHECK(trace.out.find(",19/210\n") != std::string::npos);  // S_10(1) = sum mu(n)/n

  const Run grid = run({"grid", "--n-list", "1,5", "--radii", "0.5,0.9", "--angles", "6"});
  CHECK(grid.code == 0);
  CHECK(grid.out.rfind("N,r,theta,abs_PN\n", 0) == 0);
  CHECK(std::count(grid.out.begin(), grid.out.end(), '\n') == 1 + 2 * 2 * 6);

  const Run series = run({"series", "--kind", "log-p", "--index", "1", "--order", "3"});
  CHECK(series.code == 0);
  CHECK(nlohmann::json::parse(series.out)["coefficients"][2] == nlohmann::json::array({"1", "3"}));

  const Run oracle = run({"oracle", "--samples", "300", "--max", "60", "--seed", "7"});
  CHECK(oracle.code == 0);
  CHECK(nlohmann::json::parse(oracle.out)["mismatches"] == 0);
}

TEST_CASE("verification failures exit 1") {
  CHECK(run({"verify", "pi-over-4", "--terms", "0"}).code == 1);
  CHECK(run({"verify", "zeta-ratio", "--terms", "1"}).code == 1);
  CHECK(run({"verify", "pnt-coeff-decay", "--m-list", "1", "--nmax", "1", "--schedule", "1"}).code == 1);
  const Run ok = run({"verify", "r2-series", "--n-list", "1,25", "--terms", "1000", "--format", "json"});
  CHECK(ok.code == 0);
  CHECK(nlohmann::json::parse(ok.out)[0]["pass"] == true);
}

TEST_CASE("usage and domain errors exit 2") {
  const std::vector<std::vector<std::string>> cases{
      {},
      {"bogus"},
      {"csum"},
      {"csum", "4"},
      {"csum", "0", "2"},
      {"csum", "4", "x"},
      {"csum", "-4", "2"},
      {"csum", "4", "2", "extra"},
      {"csum", "99999999999999999999999", "1"},
      {"--precision", "32", "csum", "4", "2"},
      {"--precision", "abc", "csum", "4", "2"},
      {"--format", "xml", "csum", "4", "2"},
      {"cyclotomic", "0"},
      {"trace", "1"},
      {"trace", "1", "--nmax", "10", "--mode", "sloppy"},
      {"trace", "1", "--nmax", "10", "--checkpoints", "5,3"},
      {"trace", "0", "--nmax", "10"},
      {"verify"},
      {"verify", "no-such-identity"},
      {"verify", "theta-square", "--terms", "5"},
      {"verify", "theta-square", "--order", "0"},
      {"verify", "sigma-zeta", "--s", "0", "--terms", "10"},
      {"verify", "zeta-ratio", "--z", "1.5"},
      {"verify", "zeta-ratio", "--z", "half"},
      {"verify", "r2-series", "--n-list", "1,,2"},
      {"verify", "r2-series", "--n-list", "5..1"},
      {"grid", "--n-list", "1", "--radii", "1.2", "--angles", "4"},
      {"grid", "--n-list", "1", "--radii", "0.5"},
      {"report"},
      {"report", "--all", "--override", "theta-square.terms=5"},
      {"report", "--all", "--override", "nonsense"},
      {"report", "--all", "--override", "nowhere.order=5"},
      {"series", "--kind", "log-q", "--index", "1", "--order", "3"},
  };
  for (const auto& args : cases) {
    const Run r = run(args);
    INFO(join(args) << " -> " << r.err);
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
  }
}

TEST_CASE("resource errors exit 3") {
  CHECK(run({"trace", "1", "--nmax", "1000000000000"}).code == 3);
  CHECK(run({"csum", "2000000", "1", "--bruteforce"}).code == 3);
  CHECK(run({"oracle", "--max", "100000"}).code == 3);
  CHECK(run({"--cache-dir", "/proc/cyclolab-cannot-exist", "cyclotomic", "6"}).code == 3);
}

TEST_CASE("help exits 0") {
  const Run help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("csum") != std::string::npos);
}

TEST_CASE("malformed argv property: mutations of valid commands exit 2") {
  const std::vector<std::vector<std::string>> valid{
      {"csum", "4", "2"},
      {"cyclotomic", "6"},
      {"trace", "2", "--nmax", "100", "--checkpoints", "10,100"},
      {"verify", "theta-square", "--order", "20"},
      {"grid", "--n-list", "5", "--radii", "0.5", "--angles", "4"},
      {"series", "--kind", "log-phi-hat", "--index", "3", "--order", "4"},
  };
  for (const auto& args : valid) REQUIRE(run(args).code == 0);

  const std::vector<std::string> junk{"", "abc", "-1", "1.5.2", "99999999999999999999999", "--bogus", "0x10", "NaN"};
  std::mt19937_64 rng(20240601);
  int checked = 0;
  for (const auto& args : valid) {
    for (std::size_t pos = 0; pos < args.size(); ++pos) {
      for (const auto& token : junk) {
        std::vector<std::string> bad = args;
        bad[pos] = token;
        const Run r = run(bad);
        INFO(join(bad) << " -> " << r.err);
        CHECK(r.code == 2);
        ++checked;
      }
      std::vector<std::string> dropped = args;
      dropped.erase(dropped.begin() + static_cast<long>(pos));
      const int code = run(dropped).code;
      INFO(join(dropped));
      // Dropping an optional flag with its value can still be valid.
      CHECK((code == 0 || code == 2));
    }
    std::vector<std::string> extra = args;
    extra.insert(extra.begin() + static_cast<long>(rng() % (args.size() + 1)), "--unknown-flag");
    CHECK(run(extra).code == 2);
  }
  CHECK(checked > 200);
}

TEST_CASE("malformed argv property: random token soup never escapes the exit-code contract") {
  const std::vector<std::string> pool{"csum",     "cyclotomic", "trace",  "verify", "grid",   "series",
                                      "theta-square", "--order", "--nmax", "--n-list", "--radii", "--angles",
                                      "--format", "json",       "csv",    "--hat",  "--precision", "64",
                                      "3",        "12",         "0",      "-2",     "0.5",    "x",
                                      "--kind",   "log-p",      "--index", "1,2",   "",       "--mode"};
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<std::string> args;
    const std::size_t len = rng() % 7;
    for (std::size_t k = 0; k < len; ++k) args.push_back(pool[rng() % pool.size()]);
    const Run r = run(args);
    INFO(join(args));
    CHECK((r.code == 0 || r.code == 1 || r.code == 2 || r.code == 3));
    if (r.code != 0) CHECK_FALSE(r.err.empty());
  }
}

TEST_CASE("identical argv gives byte-identical JSON apart from runtime_ms") {
  const std::vector<std::string> args{"report",
                                      "--all",
                                      "--override", "pnt-coeff-decay.nmax=10000",
                                      "--override", "sigma-zeta.terms=2000",
                                      "--override", "sigma-zeta.n-list=1..20",
                                      "--override", "product-identity-s.terms=2000",
                                      "--override", "r2-series.terms=2000",
                                      "--override", "r2-logderiv.order=8",
                                      "--override", "r2-logderiv.terms=2000",
                                      "--override", "boundary-study.n-list=1,100",
                                      "--override", "interior-convergence.n-list=10,100"};
  const Run a = run(args);
  const Run b = run(args);
  CHECK((a.code == 0 || a.code == 1));
  CHECK(a.code == b.code);
  CHECK(without_runtime(a.out) == without_runtime(b.out));
  const auto doc = nlohmann::json::parse(a.out);
  REQUIRE(doc.size() == all_identities().size());
  CHECK(doc[2]["parameters"]["terms"] == 2000);
}

TEST_CASE("cache directory from the environment is used") {
  const fs::path dir = fs::temp_directory_path() / "cyclolab-cli-env-cache";
  fs::remove_all(dir);
  ::setenv("CYCLOLAB_CACHE_DIR", dir.c_str(), 1);
  CHECK(run({"cyclotomic", "12"}).code == 0);
  ::unsetenv("CYCLOLAB_CACHE_DIR");
  CHECK(fs::exists(dir / "cyclotomic_coeffs-12.bin"));
  // The explicit flag wins over the environment.
  const fs::path flag_dir = fs::temp_directory_path() / "cyclolab-cli-flag-cache";
  fs::remove_all(flag_dir);
  ::setenv("CYCLOLAB_CACHE_DIR", dir.c_str(), 1);
  CHECK(run({"--cache-dir", flag_dir.string(), "cyclotomic", "10"}).code == 0);
  ::unsetenv("CYCLOLAB_CACHE_DIR");
  CHECK(fs::exists(flag_dir / "cyclotomic_coeffs-10.bin"));
  CHECK_FALSE(fs::exists(dir / "cyclotomic_coeffs-10.bin"));
  fs::remove_all(dir);
  fs::remove_all(flag_dir);
}
