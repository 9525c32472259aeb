#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tlscond/conditioning.hpp"
#include "tlscond/error.hpp"
#include "tlscond/generators.hpp"

namespace tlscond {

/// Numeric columns of a result row, in serialization order. Relative values
/// are absolute ones scaled by ||[A, b]||_F / ||x_TLS||.
enum class Column : std::size_t {
  kappa_abs,
  kappa_rel,
  kappa_kron_rel,
  kappa_bg_rel,
  alpha_lower_rel,
  alpha_upper_rel,
  last_row_lower_rel,
  last_row_upper_rel,
  kappa1_lower_rel,
  kappa1_upper_rel,
  kappa2_lower_rel,
  kappa2_upper_rel,
  bg_upper_rel,
  gvl_upper_rel,
  sigma_np1_over_sigma_n,
  sigma_np1_over_sigma_hat_n,
  sigma_1_over_sigma_hat_n,
  one_minus_sigma_np1_over_sigma_hat_n,
  alpha,
  gap,
};

inline constexpr std::size_t kColumnCount = static_cast<std::size_t>(Column::gap) + 1;

std::string_view column_name(Column c) noexcept;
const std::array<Column, kColumnCount>& all_columns() noexcept;

struct ProblemRow {
  std::string label;
  Index m = 0;
  Index n = 0;
  std::optional<ErrorCode> error;
  std::string error_message;
  std::array<std::optional<double>, kColumnCount> values{};
  bool consistent = false;
  bool v11_ill_conditioned = false;
  bool kronecker_computed = false;

  bool ok() const noexcept { return !error.has_value(); }
  std::optional<double>& operator[](Column c) { return values[static_cast<std::size_t>(c)]; }
  const std::optional<double>& operator[](Column c) const {
    return values[static_cast<std::size_t>(c)];
  }
};

struct AnalysisOptions {
  double tol_gap = kDefaultTolGap;
  /// Kronecker route runs only when n(mn + m) fits under this many entries.
  std::size_t size_cap_k = kDefaultKSizeCap;
};

/// Exact kappa by the closed route, the other two routes for cross-checking
/// (Kronecker only under the size cap), every bound in relative form, and the
/// spectral diagnostics. Model errors become an error row instead of throwing.
ProblemRow analyze_problem(const TlsProblem& problem, const AnalysisOptions& options = {},
                           std::string label = {});

/// Names of the relative-level sandwich inequalities the row violates
/// (lower <= kappa_rel <= upper, relative slack `slack`). Empty when the row
/// is consistent with the theory.
std::vector<std::string> bound_violations(const ProblemRow& row, double slack = 1e-10);

struct ColumnSummary {
  std::size_t count = 0;
  std::optional<double> mean;
  std::optional<double> log10_mean;  // mean of log10, positive values only
};

struct ExperimentSummary {
  GeneratorSpec spec;
  std::uint64_t base_seed = 0;
  std::size_t samples = 0;
  std::size_t failures = 0;
  std::map<std::string, std::size_t> failure_codes;
  std::array<ColumnSummary, kColumnCount> columns{};

  const ColumnSummary& operator[](Column c) const {
    return columns[static_cast<std::size_t>(c)];
  }
};

/// Aggregates rows in index order; failed rows are counted and excluded.
ExperimentSummary summarize(const GeneratorSpec& spec, std::uint64_t base_seed,
                            std::span<const ProblemRow> rows);

/// Sample i uses seed base_seed + i. Deterministic generators (vanhuffel) are
/// evaluated once regardless of `samples`. `threads` > 1 analyzes samples
/// concurrently; the result does not depend on it.
ExperimentSummary run_experiment(const GeneratorSpec& spec, std::size_t samples,
                                 std::uint64_t base_seed, const AnalysisOptions& options = {},
                                 unsigned threads = 1);

std::vector<ProblemRow> run_samples(const GeneratorSpec& spec, std::size_t samples,
                                    std::uint64_t base_seed, const AnalysisOptions& options = {},
                                    unsigned threads = 1);

nlohmann::json to_json(const ProblemRow& row);
nlohmann::json to_json(const ExperimentSummary& summary);

/// CSV with a fixed header: label,status,error_code,m,n,<columns>,flags.
void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ProblemRow& row);

/// Two data rows, statistic = mean and statistic = log10_mean.
void write_summary_csv(std::ostream& out, const ExperimentSummary& summary);

/// "kind key=value ..." identifier used as a row label.
std::string generator_label(const GeneratorSpec& spec);

/// "%.17g", the CSV number format.
std::string format_exact(double v);

}  // namespace tlscond
