#include "cyclolab/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>

#include "cyclolab/errors.hpp"

namespace cyclolab {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<OutputFormat> parse_format(std::string_view text) {
  if (text == "json") return OutputFormat::json;
  if (text == "csv") return OutputFormat::csv;
  if (text == "table") return OutputFormat::table;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (precision < 64) throw DomainError("precision must be at least 64 bits, got " + std::to_string(precision));
}

fs::path resolve_cache_dir(const fs::path& fallback) {
  const char* env = std::getenv("CYCLOLAB_CACHE_DIR");
  if (env != nullptr && *env != '\0') return fs::path(env);
  return fallback;
}

// ---- reports ----------------------------------------------------------------

json report_to_json(const VerificationReport& r) {
  json out = json::object();
  out["schema_version"] = kReportSchemaVersion;
  out["identity_id"] = std::string(identity_name(r.id));
  out["parameters"] = r.parameters;
  out["residual"] = r.residual.to_string(kReportDigits);
  out["residual_exact"] = r.residual_exact ? json(*r.residual_exact) : json(nullptr);
  out["tolerance"] = r.tolerance.to_string(kReportDigits);
  out["tolerance_kind"] = std::string(tolerance_kind_name(r.tolerance_kind));
  out["bound_formula"] = r.bound_formula;
  out["pass"] = r.pass;
  out["runtime_ms"] = r.runtime_ms;
  out["details"] = r.details;
  return out;
}

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

std::string render_table(const std::vector<VerificationReport>& reports) {
  std::ostringstream os;
  os << std::left << std::setw(22) << "identity" << std::setw(6) << "pass" << std::setw(28) << "residual"
     << std::setw(28) << "tolerance" << std::setw(16) << "kind" << "ms\n";
  for (const auto& r : reports) {
    os << std::setw(22) << identity_name(r.id) << std::setw(6) << (r.pass ? "yes" : "NO") << std::setw(28)
       << r.residual.to_string(kReportDigits) << std::setw(28) << r.tolerance.to_string(kReportDigits)
       << std::setw(16) << tolerance_kind_name(r.tolerance_kind) << r.runtime_ms << "\n";
  }
  const auto passed = std::count_if(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
  os << passed << "/" << reports.size() << " passed\n";
  return os.str();
}

}  // namespace

std::string render_report(const std::vector<VerificationReport>& reports, OutputFormat format) {
  switch (format) {
    case OutputFormat::json: {
      json arr = json::array();
      for (const auto& r : reports) arr.push_back(report_to_json(r));
      return arr.dump(2) + "\n";
    }
    case OutputFormat::csv: {
      std::string out = "identity_id,pass,residual,tolerance,tolerance_kind,bound_formula,residual_exact,runtime_ms\n";
      for (const auto& r : reports) {
        out += std::string(identity_name(r.id)) + "," + (r.pass ? "true" : "false") + "," +
               r.residual.to_string(kReportDigits) + "," + r.tolerance.to_string(kReportDigits) + "," +
               std::string(tolerance_kind_name(r.tolerance_kind)) + "," + csv_field(r.bound_formula) + "," +
               csv_field(r.residual_exact.value_or("")) + "," + std::to_string(r.runtime_ms) + "\n";
      }
      return out;
    }
    case OutputFormat::table:
      return render_table(reports);
  }
  return {};
}

std::size_t emit_report(const std::vector<VerificationReport>& reports, OutputFormat format, std::ostream& out) {
  const std::string text = render_report(reports, format);
  out << text;
  if (!out) throw std::runtime_error("failed writing report output");
  return text.size();
}

std::size_t emit_grid_csv(const GridStudy& study, std::ostream& out) {
  std::string text = "N,r,theta,abs_PN\n";
  for (const auto& p : study.points) {
    text += std::to_string(p.n) + "," + p.radius.to_string(kReportDigits) + "," + p.theta.to_string(kReportDigits) +
            "," + p.abs_value.to_string(kReportDigits) + "\n";
  }
  out << text;
  if (!out) throw std::runtime_error("failed writing grid output");
  return text.size();
}

json series_to_json(const RationalSeries& series) {
  auto pair = [](const mpq_class& q) { return json::array({q.get_num().get_str(), q.get_den().get_str()}); };
  json coeffs = json::array();
  for (std::size_t k = 1; k <= series.order(); ++k) coeffs.push_back(pair(series.coefficient(k)));
  return {{"order", series.order()}, {"constant", pair(series.constant_term())}, {"coefficients", coeffs}};
}

// ---- cache encoding ---------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "CYCLOLAB1";

void put_u64(std::string& out, std::uint64_t v, int bytes = 8) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

// LEB128: seven bits per byte, high bit set on all but the last.
void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

void put_integer(std::string& out, const mpz_class& v) {
  out.push_back(sgn(v) < 0 ? 1 : 0);
  const std::size_t length = sgn(v) == 0 ? 0 : (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  put_varint(out, length);
  const std::size_t at = out.size();
  out.resize(at + length);
  if (length > 0) mpz_export(out.data() + at, nullptr, -1, 1, -1, 0, v.get_mpz_t());
}

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t at = 0;
  while (at < bytes.size()) {
    const std::size_t chunk = std::min<std::size_t>(bytes.size() - at, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + at), static_cast<uInt>(chunk));
    at += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : b_(bytes) {}

  std::uint64_t u64(int bytes = 8) {
    need(bytes);
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t{static_cast<unsigned char>(b_[at_ + i])} << (8 * i);
    at_ += bytes;
    return v;
  }
  mpz_class integer() {
    need(1);
    const unsigned char sign = static_cast<unsigned char>(b_[at_++]);
    if (sign > 1) throw CacheInvalidError("cache: bad sign byte");
    const std::uint64_t length = varint();
    need(length);
    mpz_class v;
    if (length > 0) mpz_import(v.get_mpz_t(), length, -1, 1, -1, 0, b_.data() + at_);
    at_ += length;
    if (sign == 1) v = -v;
    return v;
  }
  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      need(1);
      const auto byte = static_cast<unsigned char>(b_[at_++]);
      v |= std::uint64_t{byte & 0x7fu} << shift;
      if ((byte & 0x80) == 0) return v;
    }
    throw CacheInvalidError("cache: overlong length prefix");
  }
  std::size_t remaining() const { return b_.size() - at_; }

 private:
  void need(std::uint64_t n) const {
    if (n > b_.size() - at_) throw CacheInvalidError("cache: truncated file");
  }
  std::string_view b_;
  std::size_t at_ = 0;
};

}  // namespace

std::string_view cache_kind_name(CacheKind kind) {
  switch (kind) {
    case CacheKind::sieve: return "sieve";
    case CacheKind::cn_table: return "cn_table";
    case CacheKind::cyclotomic_coeffs: return "cyclotomic_coeffs";
  }
  return "unknown";
}

std::string encode_cache(const CachePayload& payload) {
  std::string body;
  body.push_back(static_cast<char>(payload.kind));
  put_u64(body, payload.parameters.size(), 4);
  for (auto p : payload.parameters) put_u64(body, p);
  put_u64(body, payload.values.size());
  for (const auto& v : payload.values) put_integer(body, v);

  std::string out(kMagic);
  out += body;
  put_u64(out, crc_of(body), 4);
  return out;
}

CachePayload decode_cache(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 1 + 4 + 8 + 4 || bytes.substr(0, kMagic.size()) != kMagic) {
    throw CacheInvalidError("cache: bad magic or short file");
  }
  const std::string_view body = bytes.substr(kMagic.size(), bytes.size() - kMagic.size() - 4);
  Reader tail(bytes.substr(bytes.size() - 4));
  if (tail.u64(4) != crc_of(body)) throw CacheInvalidError("cache: checksum mismatch");

  Reader r(body);
  CachePayload p;
  const auto kind = r.u64(1);
  if (kind < 1 || kind > 3) throw CacheInvalidError("cache: unknown payload kind");
  p.kind = static_cast<CacheKind>(kind);
  const auto param_count = r.u64(4);
  for (std::uint64_t i = 0; i < param_count; ++i) p.parameters.push_back(r.u64());
  const auto value_count = r.u64();
  // Each value takes at least two bytes, which caps a hostile count.
  if (value_count > r.remaining() / 2) throw CacheInvalidError("cache: value count exceeds file size");
  p.values.reserve(value_count);
  for (std::uint64_t i = 0; i < value_count; ++i) p.values.push_back(r.integer());
  if (r.remaining() != 0) throw CacheInvalidError("cache: trailing bytes");
  return p;
}

void save_cache_file(const fs::path& path, const CachePayload& payload) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const std::string bytes = encode_cache(payload);
  fs::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("cache: cannot write " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, path, ec);
  if (ec) {
    fs::remove(temp);
    throw std::runtime_error("cache: cannot rename " + temp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::optional<CachePayload> load_cache_file(const fs::path& path, CacheKind kind,
                                            const std::vector<std::uint64_t>& parameters) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CachePayload p;
  try {
    p = decode_cache(bytes);
  } catch (const CacheInvalidError& e) {
    throw CacheInvalidError(path.string() + ": " + e.what());
  }
  if (p.kind != kind || p.parameters != parameters) return std::nullopt;
  return p;
}

// ---- typed payloads ---------------------------------------------------------

namespace {

std::uint64_t as_u64(const mpz_class& v) {
  if (sgn(v) < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 64) throw CacheInvalidError("cache: value out of range");
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof out, 0, 0, v.get_mpz_t());
  return out;
}

std::int64_t as_i64(const mpz_class& v) {
  const mpz_class magnitude = abs(v);
  const std::uint64_t m = as_u64(magnitude);
  if (m > static_cast<std::uint64_t>(INT64_MAX)) throw CacheInvalidError("cache: value out of range");
  return sgn(v) < 0 ? -static_cast<std::int64_t>(m) : static_cast<std::int64_t>(m);
}

mpz_class from_u64(std::uint64_t v) {
  mpz_class out;
  mpz_import(out.get_mpz_t(), 1, -1, sizeof v, 0, 0, &v);
  return out;
}

mpz_class from_i64(std::int64_t v) {
  const std::uint64_t magnitude = v < 0 ? 0 - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v);
  mpz_class out = from_u64(magnitude);
  return v < 0 ? mpz_class(-out) : out;
}

void expect(const CachePayload& p, CacheKind kind, std::size_t params) {
  if (p.kind != kind || p.parameters.size() != params) {
    throw CacheInvalidError(std::string("cache: not a ") + std::string(cache_kind_name(kind)) + " payload");
  }
}

}  // namespace

// Sieve values are the four tables interleaved per index 0..limit.
CachePayload to_payload(const SieveTables& s) {
  CachePayload p{CacheKind::sieve, {s.limit}, {}};
  const std::size_t count = s.mu.size();
  p.values.reserve(4 * count);
  for (std::size_t i = 0; i < count; ++i) {
    p.values.push_back(from_i64(s.mu[i]));
    p.values.push_back(from_u64(s.phi[i]));
    p.values.push_back(from_u64(s.sigma[i]));
    p.values.push_back(from_u64(s.smallest_prime_factor[i]));
  }
  return p;
}

SieveTables sieve_from_payload(const CachePayload& p) {
  expect(p, CacheKind::sieve, 1);
  if (p.values.size() % 4 != 0) throw CacheInvalidError("cache: sieve payload is not a whole number of rows");
  SieveTables s;
  s.limit = p.parameters[0];
  const std::size_t count = p.values.size() / 4;
  if (count != s.limit + 1) throw CacheInvalidError("cache: sieve row count does not match its limit");
  s.mu.resize(count);
  s.phi.resize(count);
  s.sigma.resize(count);
  s.smallest_prime_factor.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    s.mu[i] = static_cast<std::int8_t>(as_i64(p.values[4 * i]));
    s.phi[i] = static_cast<std::uint32_t>(as_u64(p.values[4 * i + 1]));
    s.sigma[i] = as_u64(p.values[4 * i + 2]);
    s.smallest_prime_factor[i] = static_cast<std::uint32_t>(as_u64(p.values[4 * i + 3]));
  }
  return s;
}

CachePayload to_payload(const CnTable& t) {
  CachePayload p{CacheKind::cn_table, {t.n_max, t.m_max}, {}};
  p.values.reserve(t.values.size());
  for (auto v : t.values) p.values.push_back(from_i64(v));
  return p;
}

CnTable cn_table_from_payload(const CachePayload& p) {
  expect(p, CacheKind::cn_table, 2);
  CnTable t;
  t.n_max = p.parameters[0];
  t.m_max = p.parameters[1];
  if (p.values.size() != t.n_max * t.m_max) throw CacheInvalidError("cache: cn_table size mismatch");
  t.values.reserve(p.values.size());
  for (const auto& v : p.values) t.values.push_back(as_i64(v));
  return t;
}

CachePayload to_payload(std::uint64_t n, const IntPoly& poly) {
  return {CacheKind::cyclotomic_coeffs, {n}, poly.coefficients()};
}

IntPoly cyclotomic_from_payload(const CachePayload& p) {
  expect(p, CacheKind::cyclotomic_coeffs, 1);
  return IntPoly(p.values);
}

// ---- TableCache -------------------------------------------------------------

TableCache::TableCache(fs::path directory) : dir_(std::move(directory)) {}

fs::path TableCache::file_for(CacheKind kind, const std::vector<std::uint64_t>& parameters) const {
  std::string name(cache_kind_name(kind));
  for (auto p : parameters) name += "-" + std::to_string(p);
  return dir_ / (name + ".bin");
}

template <class Compute, class Decode, class Encode>
auto TableCache::load_or_compute(CacheKind kind, const std::vector<std::uint64_t>& parameters, Compute compute,
                                 Decode decode, Encode encode) {
  const fs::path path = file_for(kind, parameters);
  try {
    if (auto payload = load_cache_file(path, kind, parameters)) {
      auto value = decode(*payload);
      ++hits_;
      return value;
    }
  } catch (const CacheInvalidError&) {
    ++invalid_;
  }
  ++misses_;
  auto value = compute();
  save_cache_file(path, encode(value));
  return value;
}

SieveTables TableCache::sieve(std::uint64_t limit) {
  return load_or_compute(
      CacheKind::sieve, {limit}, [&] { return build_sieve(limit); }, sieve_from_payload,
      [](const SieveTables& s) { return to_payload(s); });
}

CnTable TableCache::cn_table(std::uint64_t n_max, std::uint64_t m_max) {
  return load_or_compute(
      CacheKind::cn_table, {n_max, m_max}, [&] { return build_cn_table(n_max, m_max); }, cn_table_from_payload,
      [](const CnTable& t) { return to_payload(t); });
}

IntPoly TableCache::cyclotomic(std::uint64_t n) {
  return load_or_compute(
      CacheKind::cyclotomic_coeffs, {n}, [&] { return cyclolab::cyclotomic(n); }, cyclotomic_from_payload,
      [n](const IntPoly& poly) { return to_payload(n, poly); });
}

}  // namespace cyclolab
