#include "cyclolab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cyclolab/arith.hpp"
#include "cyclolab/complex.hpp"
#include "cyclolab/cyclotomic.hpp"
#include "cyclolab/errors.hpp"
#include "cyclolab/io.hpp"
#include "cyclolab/ramanujan.hpp"
#include "cyclolab/series.hpp"

namespace cyclolab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---- strict value parsing ---------------------------------------------------

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw UsageError(what + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

// "1,2,5" or "1..100" or a mix: "1..10,25".
std::vector<std::uint64_t> parse_u64_list(const std::string& text, const std::string& what) {
  if (text.empty()) throw UsageError(what + ": empty list");
  std::vector<std::uint64_t> out;
  for (const auto& item : split(text, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_u64(item, what));
      continue;
    }
    const auto lo = parse_u64(item.substr(0, dots), what);
    const auto hi = parse_u64(item.substr(dots + 2), what);
    if (lo > hi) throw UsageError(what + ": empty range '" + item + "'");
    if (hi - lo > 10'000'000) throw UsageError(what + ": range '" + item + "' is too long");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

Real parse_real(const std::string& text, Bits bits, const std::string& what) {
  try {
    return Real::parse(text, bits);
  } catch (const DomainError&) {
    throw UsageError(what + ": expected a decimal number, got '" + text + "'");
  }
}

std::vector<Real> parse_real_list(const std::string& text, Bits bits, const std::string& what) {
  if (text.empty()) throw UsageError(what + ": empty list");
  std::vector<Real> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_real(item, bits, what));
  return out;
}

// ---- per-identity options -----------------------------------------------------

class Options {
 public:
  Options(IdentityId id, const OptionMap& map) : map_(map) {
    const auto& allowed = allowed_options(id);
    for (const auto& [key, value] : map) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw UsageError(std::string(identity_name(id)) + " does not take --" + key);
      }
    }
  }
  template <class T, class Parse>
  void apply(const std::string& key, T& target, Parse parse) const {
    if (auto it = map_.find(key); it != map_.end()) target = parse(it->second, "--" + key);
  }
  void u64(const std::string& key, std::uint64_t& target) const { apply(key, target, parse_u64); }
  void size(const std::string& key, std::size_t& target) const { apply(key, target, parse_u64); }
  void list(const std::string& key, std::vector<std::uint64_t>& target) const { apply(key, target, parse_u64_list); }
  void real(const std::string& key, Real& target, Bits bits) const {
    apply(key, target, [bits](const std::string& t, const std::string& w) { return parse_real(t, bits, w); });
  }

 private:
  const OptionMap& map_;
};

}  // namespace

const std::vector<std::string>& allowed_options(IdentityId id) {
  static const std::map<IdentityId, std::vector<std::string>> table{
      {IdentityId::PNT_COEFF_DECAY, {"m-list", "nmax", "schedule"}},
      {IdentityId::PNT_SERIES_EXACT, {"nmax", "order"}},
      {IdentityId::SIGMA_ZETA, {"n-list", "s", "terms"}},
      {IdentityId::PRODUCT_IDENTITY_S, {"order", "s", "terms"}},
      {IdentityId::ZETA_RATIO, {"z", "s", "terms"}},
      {IdentityId::R2_SERIES, {"n-list", "terms", "window"}},
      {IdentityId::R2_LOGDERIV, {"order", "terms", "window"}},
      {IdentityId::THETA_SQUARE, {"order"}},
      {IdentityId::PI_OVER_4, {"z", "terms", "window"}},
      {IdentityId::INTERIOR_CONVERGENCE, {"z", "n-list"}},
      {IdentityId::BOUNDARY_STUDY, {"n-list", "radii", "angles"}},
  };
  return table.at(id);
}

VerificationReport run_identity(IdentityId id, const OptionMap& options, Bits precision,
                                const Calibration& calibration, const SieveTables* sieve) {
  const Options o(id, options);
  // A shared sieve only helps when it reaches far enough.
  auto usable = [sieve](std::uint64_t need) { return sieve != nullptr && sieve->limit >= need ? sieve : nullptr; };
  switch (id) {
    case IdentityId::PNT_COEFF_DECAY: {
      PntDecayParams p;
      p.precision = precision;
      o.list("m-list", p.m_list);
      o.u64("nmax", p.n_max);
      o.list("schedule", p.schedule);
      return verify_pnt_decay(p, calibration, usable(p.n_max));
    }
    case IdentityId::PNT_SERIES_EXACT: {
      PntSeriesParams p;
      o.u64("nmax", p.n_max);
      o.size("order", p.order);
      return verify_pnt_series(p);
    }
    case IdentityId::SIGMA_ZETA: {
      SigmaZetaParams p;
      p.precision = precision;
      o.list("n-list", p.n_list);
      o.real("s", p.s, precision);
      o.u64("terms", p.terms);
      return verify_sigma_zeta(p, usable(p.terms));
    }
    case IdentityId::PRODUCT_IDENTITY_S: {
      ProductIdentityParams p;
      p.precision = precision;
      o.size("order", p.order);
      o.real("s", p.s, precision);
      o.u64("terms", p.terms);
      return verify_product_identity_s(p);
    }
    case IdentityId::ZETA_RATIO: {
      ZetaRatioParams p;
      p.precision = precision;
      o.real("z", p.z, precision);
      o.real("s", p.s, precision);
      o.u64("terms", p.terms);
      return verify_zeta_ratio(p, calibration);
    }
    case IdentityId::R2_SERIES: {
      R2SeriesParams p;
      p.precision = precision;
      o.list("n-list", p.n_list);
      o.u64("terms", p.terms);
      o.u64("window", p.window);
      return verify_r2_series(p, calibration);
    }
    case IdentityId::R2_LOGDERIV: {
      R2LogDerivParams p;
      p.precision = precision;
      o.size("order", p.order);
      o.u64("terms", p.terms);
      o.u64("window", p.window);
      return verify_r2_product_logderiv(p, calibration);
    }
    case IdentityId::THETA_SQUARE: {
      ThetaSquareParams p;
      o.size("order", p.order);
      return verify_theta_square(p);
    }
    case IdentityId::PI_OVER_4: {
      PiOver4Params p;
      p.precision = precision;
      o.real("z", p.z, precision);
      o.u64("terms", p.terms);
      o.u64("window", p.window);
      return verify_pi_over_4(p, calibration);
    }
    case IdentityId::INTERIOR_CONVERGENCE: {
      InteriorParams p;
      p.precision = precision;
      o.real("z", p.z, precision);
      o.list("n-list", p.n_list);
      return verify_interior_convergence(p, calibration);
    }
    case IdentityId::BOUNDARY_STUDY: {
      BoundaryStudyParams p;
      p.precision = precision;
      o.list("n-list", p.n_list);
      o.apply("radii", p.radii,
              [precision](const std::string& t, const std::string& w) { return parse_real_list(t, precision, w); });
      o.u64("angles", p.angle_count);
      return verify_boundary_study(p, calibration);
    }
  }
  throw std::logic_error("unhandled identity");
}

namespace {

// ---- subcommand bodies --------------------------------------------------------

struct Context {
  RunConfig config;
  std::string format_text;
  std::string calibration_path;
  std::ostream& out;
  std::ostream& err;
  std::unique_ptr<TableCache> cache;

  OutputFormat format_or(OutputFormat fallback) const {
    if (format_text.empty()) return fallback;
    return config.format;
  }
  SieveTables sieve(std::uint64_t limit) { return cache ? cache->sieve(limit) : build_sieve(limit); }
  IntPoly cyclotomic_poly(std::uint64_t n) { return cache ? cache->cyclotomic(n) : cyclotomic(n); }
  Calibration calibration() const {
    if (calibration_path.empty()) return default_calibration();
    std::ifstream in(calibration_path);
    if (!in) throw std::ios_base::failure("cannot read calibration file " + calibration_path);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError("calibration file " + calibration_path + ": " + e.what());
    }
    return parse_calibration(doc);
  }
};

int exit_for(const std::vector<VerificationReport>& reports) {
  const bool all = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
  return all ? kExitOk : kExitVerificationFailed;
}

int run_csum(Context& ctx, const std::string& n_text, const std::string& m_text, bool bruteforce) {
  const auto n = parse_u64(n_text, "n");
  const auto m = parse_u64(m_text, "m");
  if (bruteforce && n > 1'000'000) throw ResourceError("csum --bruteforce: n above 10^6 needs too many roots");
  const std::int64_t value = bruteforce ? cn_bruteforce(n, m, ctx.config.precision) : cn_fast(n, m);
  if (ctx.format_or(OutputFormat::table) == OutputFormat::json) {
    ctx.out << json{{"n", n}, {"m", m}, {"value", value}}.dump(2) << "\n";
  } else {
    ctx.out << value << "\n";
  }
  return kExitOk;
}

int run_cyclotomic(Context& ctx, const std::string& n_text, bool hat) {
  const auto n = parse_u64(n_text, "n");
  if (n == 0) throw DomainError("cyclotomic: n must be >= 1");
  const IntPoly poly = hat ? cyclotomic_hat(n) : ctx.cyclotomic_poly(n);
  const std::string name = std::string(hat ? "PhiHat_" : "Phi_") + std::to_string(n);
  json coeffs = json::array();
  for (const auto& c : poly.coefficients()) coeffs.push_back(c.get_str());
  if (ctx.format_or(OutputFormat::table) == OutputFormat::json) {
    ctx.out << json{{"n", n}, {"hat", hat}, {"polynomial", poly.to_string()}, {"coefficients", coeffs}}.dump(2)
            << "\n";
    return kExitOk;
  }
  ctx.out << "# " << name << "(z) = " << poly.to_string() << "; coefficients of z^0, z^1, ... (low to high)\n[";
  for (std::size_t k = 0; k < poly.coefficients().size(); ++k) {
    ctx.out << (k ? ", " : "") << poly.coefficients()[k].get_str();
  }
  ctx.out << "]\n";
  return kExitOk;
}

int run_trace(Context& ctx, const std::string& m_text, const std::string& nmax_text, const std::string& checkpoints,
              const std::string& mode_text) {
  const auto m = parse_u64(m_text, "m");
  const auto n_max = parse_u64(nmax_text, "--nmax");
  if (m == 0 || n_max == 0) throw DomainError("trace: m and --nmax must be >= 1");
  SumMode mode;
  if (mode_text == "floating") {
    mode = SumMode::floating;
  } else if (mode_text == "exact") {
    mode = SumMode::exact;
  } else {
    throw UsageError("--mode must be floating or exact");
  }
  const std::vector<std::uint64_t> schedule =
      checkpoints.empty() ? std::vector<std::uint64_t>{} : parse_u64_list(checkpoints, "--checkpoints");
  const SieveTables sv = ctx.sieve(n_max);
  const PartialSumTrace t = partial_sum_trace(m, n_max, schedule, mode, ctx.config.precision, &sv);

  if (ctx.format_or(OutputFormat::csv) == OutputFormat::json) {
    json rows = json::array();
    for (const auto& c : t.checkpoints) {
      json row{{"N", c.n}, {"S_N", c.value.to_string(kReportDigits)}, {"error_bound", c.error_bound.to_string(kReportDigits)}};
      if (mode == SumMode::exact) row["S_N_exact"] = c.exact.get_str();
      rows.push_back(row);
    }
    ctx.out << json{{"m", m}, {"mode", mode_text}, {"precision", t.precision}, {"checkpoints", rows}}.dump(2) << "\n";
    return kExitOk;
  }
  ctx.out << (mode == SumMode::exact ? "N,S_N,error_bound,S_N_exact\n" : "N,S_N,error_bound\n");
  for (const auto& c : t.checkpoints) {
    ctx.out << c.n << "," << c.value.to_string(kReportDigits) << "," << c.error_bound.to_string(kReportDigits);
    if (mode == SumMode::exact) ctx.out << "," << c.exact.get_str();
    ctx.out << "\n";
  }
  return kExitOk;
}

int run_grid(Context& ctx, const std::string& n_list, const std::string& radii, const std::string& angles) {
  const Bits bits = ctx.config.precision;
  const GridStudy study = boundary_grid_study(parse_u64_list(n_list, "--n-list"), parse_real_list(radii, bits, "--radii"),
                                              parse_u64(angles, "--angles"), bits);
  if (ctx.format_or(OutputFormat::csv) == OutputFormat::json) {
    json rows = json::array();
    for (const auto& p : study.points) {
      rows.push_back({{"N", p.n},
                      {"r", p.radius.to_string(kReportDigits)},
                      {"theta", p.theta.to_string(kReportDigits)},
                      {"abs_PN", p.abs_value.to_string(kReportDigits)}});
    }
    ctx.out << rows.dump(2) << "\n";
  } else {
    emit_grid_csv(study, ctx.out);
  }
  return kExitOk;
}

int run_series(Context& ctx, const std::string& kind, const std::string& index_text, const std::string& order_text) {
  const auto index = parse_u64(index_text, "--index");
  const auto order = parse_u64(order_text, "--order");
  if (order == 0 || order > 10'000) throw DomainError("series: --order must be in 1..10000");
  RationalSeries s(1);
  if (kind == "log-one-minus") {
    s = log_one_minus_power(index, order);
  } else if (kind == "log-phi-hat") {
    s = log_phi_hat_series(index, order);
  } else if (kind == "log-p") {
    s = log_truncated_P(index, order);
  } else {
    throw UsageError("--kind must be log-one-minus, log-phi-hat or log-p");
  }
  json doc = series_to_json(s);
  doc["kind"] = kind;
  doc["index"] = index;
  ctx.out << doc.dump(2) << "\n";
  return kExitOk;
}

int run_oracle(Context& ctx, const std::string& samples_text, const std::string& max_text) {
  const auto samples = parse_u64(samples_text, "--samples");
  const auto bound = parse_u64(max_text, "--max");
  if (bound == 0) throw DomainError("oracle: --max must be >= 1");
  if (bound > 5000) throw ResourceError("oracle: --max above 5000 makes brute force too slow");
  std::mt19937_64 rng(ctx.config.seed);
  std::uniform_int_distribution<std::uint64_t> pick(1, bound);
  std::uint64_t mismatches = 0;
  for (std::uint64_t k = 0; k < samples; ++k) {
    const auto n = pick(rng);
    const auto m = pick(rng);
    const auto fast = cn_fast(n, m);
    const auto brute = cn_bruteforce(n, m, ctx.config.precision);
    if (fast != brute) {
      if (mismatches == 0) ctx.err << "mismatch at n = " << n << ", m = " << m << ": " << fast << " vs " << brute << "\n";
      ++mismatches;
    }
  }
  ctx.out << json{{"samples", samples}, {"max", bound}, {"seed", ctx.config.seed}, {"mismatches", mismatches}}.dump(2)
          << "\n";
  return mismatches == 0 ? kExitOk : kExitVerificationFailed;
}

void parse_overrides(const std::vector<std::string>& items, std::map<IdentityId, OptionMap>& by_id) {
  for (const auto& item : items) {
    const auto eq = item.find('=');
    const auto dot = item.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw UsageError("--override expects IDENTITY.option=value, got '" + item + "'");
    }
    const auto id = parse_identity(item.substr(0, dot));
    if (!id) throw UsageError("--override: unknown identity '" + item.substr(0, dot) + "'");
    by_id[*id][item.substr(dot + 1, eq - dot - 1)] = item.substr(eq + 1);
  }
}

int run_report(Context& ctx, const std::vector<std::string>& override_items) {
  std::map<IdentityId, OptionMap> by_id;
  parse_overrides(override_items, by_id);
  // Reject bad overrides before the long run starts.
  for (const auto& [id, options] : by_id) Options check(id, options);
  for (auto& [id, options] : by_id) {
    for (const auto& [key, value] : options) ctx.config.overrides[std::string(identity_name(id))][key] = value;
  }
  const Calibration cal = ctx.calibration();
  const SieveTables sv = ctx.sieve(default_sieve_limit());
  std::vector<VerificationReport> reports;
  for (IdentityId id : all_identities()) {
    const auto it = by_id.find(id);
    reports.push_back(run_identity(id, it == by_id.end() ? OptionMap{} : it->second, ctx.config.precision, cal, &sv));
  }
  emit_report(reports, ctx.format_or(OutputFormat::json), ctx.out);
  return exit_for(reports);
}

int run_verify(Context& ctx, const std::string& id_text, const OptionMap& options) {
  const auto id = parse_identity(id_text);
  if (!id) throw UsageError("unknown identity '" + id_text + "'");
  Options check(*id, options);
  const Calibration cal = ctx.calibration();
  const std::vector<VerificationReport> reports{run_identity(*id, options, ctx.config.precision, cal)};
  emit_report(reports, ctx.format_or(OutputFormat::table), ctx.out);
  return exit_for(reports);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ramanujan sums, cyclotomic products and the identities built from them", "cyclolab"};
  app.require_subcommand(1);
  // Global options may also follow the subcommand.
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string precision_text = std::to_string(kDefaultPrecision);
  std::string seed_text;
  std::string cache_dir;
  Context ctx{{}, {}, {}, out, err, nullptr};
  app.add_option("--precision", precision_text, "Working precision in bits (>= 64)");
  app.add_option("--format", ctx.format_text, "Output format: json, csv or table");
  app.add_option("--cache-dir", cache_dir, "Cache directory for tables (CYCLOLAB_CACHE_DIR when absent)");
  app.add_option("--seed", seed_text, "Seed for sampled checks");
  app.add_option("--calibration", ctx.calibration_path, "Calibration file replacing the built-in one");

  std::string n_text, m_text, nmax_text, checkpoints, mode_text = "floating";
  bool bruteforce = false, hat = false, all = false;
  auto* csum = app.add_subcommand("csum", "Print the Ramanujan sum c_n(m)");
  csum->add_option("n", n_text)->required();
  csum->add_option("m", m_text)->required();
  csum->add_flag("--bruteforce", bruteforce, "Sum roots of unity instead of the closed form");

  auto* cyclo = app.add_subcommand("cyclotomic", "Print the coefficients of Phi_n, low degree first");
  cyclo->add_option("n", n_text)->required();
  cyclo->add_flag("--hat", hat, "Hat normalization (1 - z for n = 1)");

  auto* trace = app.add_subcommand("trace", "Partial sums S_N(m) at checkpoints");
  trace->add_option("m", m_text)->required();
  trace->add_option("--nmax", nmax_text)->required();
  auto* checkpoints_opt = trace->add_option("--checkpoints", checkpoints, "Comma list; default 1, 10, 100, ..., nmax");
  trace->add_option("--mode", mode_text, "floating or exact");

  std::string id_text;
  OptionMap verify_values;
  const std::vector<std::string> verify_keys{"order", "terms", "n-list", "m-list", "nmax", "schedule",
                                             "s",     "z",     "window", "radii",  "angles"};
  std::map<std::string, CLI::Option*> verify_opts;
  auto* verify = app.add_subcommand("verify", "Run one identity verifier");
  verify->add_option("identity", id_text)->required();
  for (const auto& key : verify_keys) verify_opts[key] = verify->add_option("--" + key, verify_values[key]);

  std::string grid_n, grid_r, grid_a;
  auto* grid = app.add_subcommand("grid", "Tabulate |P_N(r e^{i theta})| as CSV");
  grid->add_option("--n-list", grid_n)->required();
  grid->add_option("--radii", grid_r)->required();
  grid->add_option("--angles", grid_a)->required();

  std::vector<std::string> overrides;
  auto* report = app.add_subcommand("report", "Run the verifier suite");
  report->add_flag("--all", all, "Every identity at its default truncation")->required();
  report->add_option("--override", overrides, "IDENTITY.option=value, repeatable");

  std::string kind, index_text, order_text;
  auto* series = app.add_subcommand("series", "Dump an exact log-series as JSON");
  series->add_option("--kind", kind, "log-one-minus, log-phi-hat or log-p")->required();
  series->add_option("--index", index_text, "i, n or N depending on kind")->required();
  series->add_option("--order", order_text)->required();

  std::string samples_text = "1000", max_text = "200";
  auto* oracle = app.add_subcommand("oracle", "Compare closed-form and brute-force c_n(m) on random pairs");
  oracle->add_option("--samples", samples_text);
  oracle->add_option("--max", max_text);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "usage: " << e.what() << "\n";
    return kExitUsage;
  }

  ctx.config.precision = static_cast<Bits>(parse_u64(precision_text, "--precision"));
  if (!seed_text.empty()) ctx.config.seed = parse_u64(seed_text, "--seed");
  if (!ctx.format_text.empty()) {
    const auto f = parse_format(ctx.format_text);
    if (!f) throw UsageError("--format must be json, csv or table");
    ctx.config.format = *f;
  }
  ctx.config.cache_dir = cache_dir.empty() ? resolve_cache_dir({}) : fs::path(cache_dir);
  ctx.config.validate();
  if (ctx.config.precision > 1 << 16) throw UsageError("--precision above 65536 bits is not supported");
  if (!ctx.config.cache_dir.empty()) ctx.cache = std::make_unique<TableCache>(ctx.config.cache_dir);

  if (*csum) return run_csum(ctx, n_text, m_text, bruteforce);
  if (*cyclo) return run_cyclotomic(ctx, n_text, hat);
  if (*trace && checkpoints_opt->count() > 0 && checkpoints.empty()) throw UsageError("--checkpoints: empty list");
  if (*trace) return run_trace(ctx, m_text, nmax_text, checkpoints, mode_text);
  if (*grid) return run_grid(ctx, grid_n, grid_r, grid_a);
  if (*report) return run_report(ctx, overrides);
  if (*series) return run_series(ctx, kind, index_text, order_text);
  if (*oracle) return run_oracle(ctx, samples_text, max_text);
  OptionMap given;
  for (const auto& [key, opt] : verify_opts) {
    if (opt->count() > 0) given[key] = verify_values[key];
  }
  return run_verify(ctx, id_text, given);
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << "\n";
  } catch (const PrecisionError& e) {
    err << "precision error: " << e.what() << "\n";
  } catch (const CacheInvalidError& e) {
    err << "cache error: " << e.what() << "\n";
  } catch (const std::bad_alloc&) {
    err << "resource error: out of memory\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitResource;
}

}  // namespace cyclolab
