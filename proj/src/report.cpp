#include "tlscond/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>
#include <utility>

#include "tlscond/bounds.hpp"

namespace tlscond {
namespace {

constexpr std::array<Column, kColumnCount> kColumns = {
    Column::kappa_abs,
    Column::kappa_rel,
    Column::kappa_kron_rel,
    Column::kappa_bg_rel,
    Column::alpha_lower_rel,
    Column::alpha_upper_rel,
    Column::last_row_lower_rel,
    Column::last_row_upper_rel,
    Column::kappa1_lower_rel,
    Column::kappa1_upper_rel,
    Column::kappa2_lower_rel,
    Column::kappa2_upper_rel,
    Column::bg_upper_rel,
    Column::gvl_upper_rel,
    Column::sigma_np1_over_sigma_n,
    Column::sigma_np1_over_sigma_hat_n,
    Column::sigma_1_over_sigma_hat_n,
    Column::one_minus_sigma_np1_over_sigma_hat_n,
    Column::alpha,
    Column::gap,
};

std::optional<double> scaled(const BoundValue& b, double scale) {
  if (!b.applicable()) return std::nullopt;
  return b.value * scale;
}

}  // namespace

std::string generator_label(const GeneratorSpec& spec) {
  std::string label{to_string(spec.kind)};
  for (const auto& [key, value] : spec.to_config()) {
    if (key == "kind") continue;
    label += ' ';
    label += key;
    label += '=';
    label += value;
  }
  return label;
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_cell(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? format_exact(*v) : std::string{};
}

}  // namespace

std::string_view column_name(Column c) noexcept {
  switch (c) {
    case Column::kappa_abs: return "kappa_abs";
    case Column::kappa_rel: return "kappa_rel";
    case Column::kappa_kron_rel: return "kappa_kron_rel";
    case Column::kappa_bg_rel: return "kappa_bg_rel";
    case Column::alpha_lower_rel: return "alpha_lower_rel";
    case Column::alpha_upper_rel: return "alpha_upper_rel";
    case Column::last_row_lower_rel: return "last_row_lower_rel";
    case Column::last_row_upper_rel: return "last_row_upper_rel";
    case Column::kappa1_lower_rel: return "kappa1_lower_rel";
    case Column::kappa1_upper_rel: return "kappa1_upper_rel";
    case Column::kappa2_lower_rel: return "kappa2_lower_rel";
    case Column::kappa2_upper_rel: return "kappa2_upper_rel";
    case Column::bg_upper_rel: return "bg_upper_rel";
    case Column::gvl_upper_rel: return "gvl_upper_rel";
    case Column::sigma_np1_over_sigma_n: return "sigma_np1_over_sigma_n";
    case Column::sigma_np1_over_sigma_hat_n: return "sigma_np1_over_sigma_hat_n";
    case Column::sigma_1_over_sigma_hat_n: return "sigma_1_over_sigma_hat_n";
    case Column::one_minus_sigma_np1_over_sigma_hat_n:
      return "one_minus_sigma_np1_over_sigma_hat_n";
    case Column::alpha: return "alpha";
    case Column::gap: return "gap";
  }
  return "unknown";
}

const std::array<Column, kColumnCount>& all_columns() noexcept { return kColumns; }

std::string format_exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ProblemRow analyze_problem(const TlsProblem& problem, const AnalysisOptions& options,
                           std::string label) {
  ProblemRow row;
  row.label = std::move(label);
  row.m = problem.rows();
  row.n = problem.cols();
  try {
    const SpectralData sd = spectral_data(problem);
    const TlsSolution sol = solve_tls(problem, sd, options.tol_gap);
    row.consistent = sol.consistent;

    const ConditionReport cr =
        condition_report(problem, sd, sol, KappaRoute::closed, options.size_cap_k);
    const double scale = cr.scale_factor;
    row.v11_ill_conditioned = cr.v11_ill_conditioned;
    row[Column::kappa_abs] = cr.kappa_abs;
    row[Column::kappa_rel] = cr.kappa_rel;

    try {
      row[Column::kappa_kron_rel] = kappa_kronecker(problem, sol, options.size_cap_k) * scale;
      row.kronecker_computed = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TooLarge && e.code() != ErrorCode::ConsistentSystem) throw;
    }
    row[Column::kappa_bg_rel] = kappa_bg_closed(sd) * scale;

    const BoundSet bs = bound_report(sd, sol);
    row[Column::alpha_lower_rel] = scaled(bs.alpha_lower, scale);
    row[Column::alpha_upper_rel] = scaled(bs.alpha_upper, scale);
    row[Column::last_row_lower_rel] = scaled(bs.last_row_lower, scale);
    row[Column::last_row_upper_rel] = scaled(bs.last_row_upper, scale);
    row[Column::kappa1_lower_rel] = scaled(bs.kappa1_lower, scale);
    row[Column::kappa1_upper_rel] = scaled(bs.kappa1_upper, scale);
    row[Column::kappa2_lower_rel] = scaled(bs.kappa2_lower, scale);
    row[Column::kappa2_upper_rel] = scaled(bs.kappa2_upper, scale);
    row[Column::bg_upper_rel] = scaled(bs.bg_upper_rel, 1.0);
    row[Column::gvl_upper_rel] = scaled(bs.gvl_upper_rel, 1.0);

    const double sh = sd.sigma_hat_n();
    row[Column::sigma_np1_over_sigma_n] = bs.rho;
    row[Column::sigma_np1_over_sigma_hat_n] = sd.sigma_np1() / sh;
    row[Column::sigma_1_over_sigma_hat_n] = sd.sigma_1() / sh;
    row[Column::one_minus_sigma_np1_over_sigma_hat_n] = sol.gap / sh;
    row[Column::alpha] = sol.alpha;
    row[Column::gap] = sol.gap;
  } catch (const Error& e) {
    row.error = e.code();
    row.error_message = e.what();
    row.values.fill(std::nullopt);
    row.consistent = false;
    row.v11_ill_conditioned = false;
    row.kronecker_computed = false;
  }
  return row;
}

std::vector<std::string> bound_violations(const ProblemRow& row, double slack) {
  std::vector<std::string> out;
  if (!row.ok() || !row[Column::kappa_rel]) return out;
  const double k = *row[Column::kappa_rel];
  constexpr Column lowers[] = {Column::alpha_lower_rel, Column::last_row_lower_rel,
                               Column::kappa1_lower_rel, Column::kappa2_lower_rel};
  constexpr Column uppers[] = {Column::alpha_upper_rel, Column::last_row_upper_rel,
                               Column::kappa1_upper_rel, Column::kappa2_upper_rel,
                               Column::bg_upper_rel, Column::gvl_upper_rel};
  for (Column c : lowers) {
    const auto& v = row[c];
    if (v && !(*v <= k * (1.0 + slack))) out.emplace_back(column_name(c));
  }
  for (Column c : uppers) {
    const auto& v = row[c];
    if (v && !(k <= *v * (1.0 + slack))) out.emplace_back(column_name(c));
  }
  return out;
}

ExperimentSummary summarize(const GeneratorSpec& spec, std::uint64_t base_seed,
                            std::span<const ProblemRow> rows) {
  if (rows.empty()) {
    throw Error(ErrorCode::InvalidInput, "experiment needs at least one sample");
  }
  ExperimentSummary s;
  s.spec = spec;
  s.base_seed = base_seed;
  s.samples = rows.size();
  for (std::size_t c = 0; c < kColumnCount; ++c) {
    double sum = 0.0;
    double log_sum = 0.0;
    std::size_t count = 0;
    bool all_positive = true;
    for (const ProblemRow& row : rows) {
      const auto& v = row.values[c];
      if (!row.ok() || !v || !std::isfinite(*v)) continue;
      sum += *v;
      if (*v > 0.0) {
        log_sum += std::log10(*v);
      } else {
        all_positive = false;
      }
      ++count;
    }
    ColumnSummary& cs = s.columns[c];
    cs.count = count;
    if (count > 0) {
      cs.mean = sum / static_cast<double>(count);
      if (all_positive) cs.log10_mean = log_sum / static_cast<double>(count);
    }
  }
  for (const ProblemRow& row : rows) {
    if (row.ok()) continue;
    ++s.failures;
    ++s.failure_codes[std::string(to_string(*row.error))];
  }
  return s;
}

std::vector<ProblemRow> run_samples(const GeneratorSpec& spec, std::size_t samples,
                                    std::uint64_t base_seed, const AnalysisOptions& options,
                                    unsigned threads) {
  if (samples == 0) {
    throw Error(ErrorCode::InvalidInput, "experiment needs at least one sample");
  }
  spec.validate();
  if (!spec.is_random()) samples = 1;

  std::vector<ProblemRow> rows(samples);
  auto work = [&](std::size_t i) {
    GeneratorSpec s = spec;
    s.seed = base_seed + i;
    const TlsProblem p = generate(s);
    rows[i] = analyze_problem(p, options, generator_label(s));
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, samples));
  if (workers == 1) {
    for (std::size_t i = 0; i < samples; ++i) work(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < samples; i = next++) work(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = samples;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

ExperimentSummary run_experiment(const GeneratorSpec& spec, std::size_t samples,
                                 std::uint64_t base_seed, const AnalysisOptions& options,
                                 unsigned threads) {
  const auto rows = run_samples(spec, samples, base_seed, options, threads);
  return summarize(spec, base_seed, rows);
}

nlohmann::json to_json(const ProblemRow& row) {
  nlohmann::json j;
  j["label"] = row.label;
  j["status"] = row.ok() ? "ok" : "error";
  j["error_code"] = row.ok() ? nlohmann::json(nullptr)
                             : nlohmann::json(std::string(to_string(*row.error)));
  if (!row.ok()) j["error_message"] = row.error_message;
  j["m"] = row.m;
  j["n"] = row.n;
  for (Column c : kColumns) j[std::string(column_name(c))] = optional_json(row[c]);
  j["consistent"] = row.consistent;
  j["v11_ill_conditioned"] = row.v11_ill_conditioned;
  j["kronecker_computed"] = row.kronecker_computed;
  return j;
}

nlohmann::json to_json(const ExperimentSummary& summary) {
  nlohmann::json j;
  nlohmann::json gen = nlohmann::json::object();
  for (const auto& [k, v] : summary.spec.to_config()) {
    if (k != "seed") gen[k] = v;
  }
  j["generator"] = gen;
  j["base_seed"] = summary.base_seed;
  j["samples"] = summary.samples;
  j["failures"] = summary.failures;
  j["failure_codes"] = summary.failure_codes;
  j["table_statistic"] = "mean";
  j["figure_statistic"] = "log10_mean";
  nlohmann::json cols = nlohmann::json::object();
  for (Column c : kColumns) {
    const ColumnSummary& cs = summary[c];
    cols[std::string(column_name(c))] = {{"count", cs.count},
                                         {"mean", optional_json(cs.mean)},
                                         {"log10_mean", optional_json(cs.log10_mean)}};
  }
  j["columns"] = cols;
  return j;
}

void write_csv_header(std::ostream& out) {
  out << "label,status,error_code,m,n";
  for (Column c : kColumns) out << ',' << column_name(c);
  out << ",consistent,v11_ill_conditioned,kronecker_computed\n";
}

void write_csv_row(std::ostream& out, const ProblemRow& row) {
  out << csv_escape(row.label) << ',' << (row.ok() ? "ok" : "error") << ','
      << (row.ok() ? std::string_view{} : to_string(*row.error)) << ',' << row.m << ','
      << row.n;
  for (Column c : kColumns) out << ',' << csv_cell(row[c]);
  out << ',' << int{row.consistent} << ',' << int{row.v11_ill_conditioned} << ','
      << int{row.kronecker_computed} << '\n';
}

void write_summary_csv(std::ostream& out, const ExperimentSummary& summary) {
  out << "statistic,generator,base_seed,samples,failures";
  for (Column c : kColumns) out << ',' << column_name(c);
  out << '\n';
  GeneratorSpec spec = summary.spec;
  spec.seed = summary.base_seed;
  const std::string gen = csv_escape(generator_label(spec));
  for (const bool log_domain : {false, true}) {
    out << (log_domain ? "log10_mean" : "mean") << ',' << gen << ',' << summary.base_seed << ','
        << summary.samples << ',' << summary.failures;
    for (Column c : kColumns) {
      const ColumnSummary& cs = summary[c];
      out << ',' << csv_cell(log_domain ? cs.log10_mean : cs.mean);
    }
    out << '\n';
  }
}

}  // namespace tlscond
