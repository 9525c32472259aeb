#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tlscond/conditioning.hpp"
#include "tlscond/generators.hpp"

namespace tlscond {

enum class OutputFormat { human, csv, json };

/// Parsed command line. Input is either a matrix/rhs file pair or a
/// generator spec, never both.
struct CliConfig {
  std::string subcommand;
  std::optional<std::string> matrix_path;
  std::optional<std::string> rhs_path;
  std::optional<GeneratorSpec> generator;
  std::uint64_t seed = 0;
  double tol_gap = kDefaultTolGap;
  std::size_t samples = 100;
  std::size_t size_cap_k = kDefaultKSizeCap;
  unsigned threads = 1;
  bool per_sample = false;
  OutputFormat format = OutputFormat::human;
  std::optional<std::string> output_path;
};

/// Exit codes: 0 success, 1 numerical/model error, 2 usage or input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation. `args` includes the program name. Results go to
/// `out` (or --output), diagnostics to `err`. Every flag also reads the
/// environment variable TLSCOND_<FLAG> (upper case, dashes as underscores);
/// an explicit flag wins.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tlscond
