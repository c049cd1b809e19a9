#pragma once

#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclolab/verify.hpp"

namespace cyclolab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitResource = 3;

/// Malformed command line: unknown option, bad number, missing argument.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Verifier options by CLI name ("order", "terms", "n-list", ...).
using OptionMap = std::map<std::string, std::string>;

/// Options each identity accepts; anything else is a usage error.
const std::vector<std::string>& allowed_options(IdentityId id);

/// Runs one verifier at its defaults with `options` applied on top.
VerificationReport run_identity(IdentityId id, const OptionMap& options, Bits precision,
                                const Calibration& calibration, const SieveTables* sieve = nullptr);

/// `args` excludes the program name. Never throws; every failure maps to an exit code:
/// 0 ok, 1 verification failed, 2 usage or domain error, 3 resource, precision or I/O error.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cyclolab
