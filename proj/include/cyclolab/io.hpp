#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "json.hpp"

#include "cyclolab/arith.hpp"
#include "cyclolab/cyclotomic.hpp"
#include "cyclolab/ramanujan.hpp"
#include "cyclolab/series.hpp"
#include "cyclolab/verify.hpp"

namespace cyclolab {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kReportDigits = 20;

enum class OutputFormat { json, csv, table };
std::optional<OutputFormat> parse_format(std::string_view text);

struct RunConfig {
  Bits precision = kDefaultPrecision;
  /// Empty disables the on-disk cache.
  std::filesystem::path cache_dir;
  OutputFormat format = OutputFormat::table;
  /// Identity id -> option -> raw value, e.g. R2_SERIES -> terms -> "100000".
  std::map<std::string, std::map<std::string, std::string>> overrides;
  std::uint64_t seed = 20240601;

  /// Throws DomainError when precision < 64.
  void validate() const;
};

/// CYCLOLAB_CACHE_DIR when set and non-empty, otherwise `fallback`.
std::filesystem::path resolve_cache_dir(const std::filesystem::path& fallback);

// ---- reports ----------------------------------------------------------------

/// Floats as decimal strings at 20 significant digits; keys sorted.
nlohmann::json report_to_json(const VerificationReport& report);
/// Writes the reports and returns the number of bytes written. JSON is an array
/// of report objects ("[]" when empty); CSV has one row per report.
std::size_t emit_report(const std::vector<VerificationReport>& reports, OutputFormat format, std::ostream& out);
std::string render_report(const std::vector<VerificationReport>& reports, OutputFormat format);
/// Header "N,r,theta,abs_PN", one row per grid point.
std::size_t emit_grid_csv(const GridStudy& study, std::ostream& out);
/// {"order": M, "constant": [num, den], "coefficients": [[num, den], ...]} for z^1..z^M.
nlohmann::json series_to_json(const RationalSeries& series);

// ---- cache files ------------------------------------------------------------

enum class CacheKind : std::uint8_t { sieve = 1, cn_table = 2, cyclotomic_coeffs = 3 };
std::string_view cache_kind_name(CacheKind kind);

struct CachePayload {
  CacheKind kind = CacheKind::sieve;
  std::vector<std::uint64_t> parameters;
  std::vector<mpz_class> values;

  bool operator==(const CachePayload&) const = default;
};

/// "CYCLOLAB1", kind byte, u32 parameter count, u64 parameters, u64 value
/// count, then per value a sign byte, LEB128 byte length and little-endian
/// magnitude; a CRC-32 of everything after the magic closes the file. Fixed-width
/// integers are little-endian.
std::string encode_cache(const CachePayload& payload);
/// Throws CacheInvalidError on bad magic, truncation, trailing bytes or checksum.
CachePayload decode_cache(std::string_view bytes);

/// Written to a sibling temp file, then renamed into place.
void save_cache_file(const std::filesystem::path& path, const CachePayload& payload);
/// nullopt when the file is absent or holds another kind or other parameters.
/// A damaged file throws CacheInvalidError.
std::optional<CachePayload> load_cache_file(const std::filesystem::path& path, CacheKind kind,
                                            const std::vector<std::uint64_t>& parameters);

CachePayload to_payload(const SieveTables& sieve);
CachePayload to_payload(const CnTable& table);
CachePayload to_payload(std::uint64_t n, const IntPoly& cyclotomic_poly);
SieveTables sieve_from_payload(const CachePayload& payload);
CnTable cn_table_from_payload(const CachePayload& payload);
IntPoly cyclotomic_from_payload(const CachePayload& payload);

/// Load-or-compute front end over a cache directory. A damaged file is
/// counted, recomputed and overwritten.
class TableCache {
 public:
  explicit TableCache(std::filesystem::path directory);

  SieveTables sieve(std::uint64_t limit);
  CnTable cn_table(std::uint64_t n_max, std::uint64_t m_max);
  IntPoly cyclotomic(std::uint64_t n);

  std::filesystem::path file_for(CacheKind kind, const std::vector<std::uint64_t>& parameters) const;
  const std::filesystem::path& directory() const { return dir_; }

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  std::uint64_t invalid() const { return invalid_; }

 private:
  template <class Compute, class Decode, class Encode>
  auto load_or_compute(CacheKind kind, const std::vector<std::uint64_t>& parameters, Compute compute,
                       Decode decode, Encode encode);

  std::filesystem::path dir_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
  std::uint64_t invalid_ = 0;
};

}  // namespace cyclolab
