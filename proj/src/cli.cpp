#include "tlscond/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tlscond/bounds.hpp"
#include "tlscond/error.hpp"
#include "tlscond/matrix_market.hpp"
#include "tlscond/oracle.hpp"
#include "tlscond/report.hpp"

namespace tlscond {
namespace {

using nlohmann::json;

constexpr double kRouteTol = 1e-8;
constexpr double kFdTol = 1e-6;
constexpr double kSlopeLow = 1.8;
constexpr double kSlopeHigh = 2.2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flag values as typed; turned into a CliConfig after parsing.
struct RawFlags {
  std::string matrix, rhs, gen;
  long long m = 0, n = 0;
  double e_p = 1e-3, alpha = 1e-2, beta_blur = 1.25, gamma = 1e-3;
  int omega = 8;
  std::uint64_t seed = 0;
  double tol_gap = kDefaultTolGap;
  std::size_t samples = 100;
  std::size_t size_cap_k = kDefaultKSizeCap;
  unsigned threads = 1;
  bool per_sample = false;
  std::string format = "human";
  std::string output;
};

struct FlagHandles {
  CLI::Option *matrix, *rhs, *gen, *m, *n, *e_p, *alpha, *omega, *beta_blur, *gamma, *output;
};

FlagHandles add_flags(CLI::App* sub, RawFlags& f, bool experiment) {
  FlagHandles h{};
  h.matrix = sub->add_option("--matrix", f.matrix, "Matrix Market file holding A");
  h.rhs = sub->add_option("--rhs", f.rhs, "right-hand side b (Matrix Market m x 1 or plain list)");
  h.gen = sub->add_option("--gen", f.gen, "generator")
              ->check(CLI::IsMember(
                  {"bg_example", "vanhuffel", "toeplitz_blur", "controlled_alpha", "gaussian"}));
  h.m = sub->add_option("--m", f.m, "rows");
  h.n = sub->add_option("--n", f.n, "columns");
  h.e_p = sub->add_option("--ep", f.e_p, "bg_example: sigma_n - sigma_{n+1}");
  h.alpha = sub->add_option("--alpha", f.alpha, "controlled_alpha: target alpha");
  h.omega = sub->add_option("--omega", f.omega, "toeplitz_blur: half bandwidth");
  h.beta_blur = sub->add_option("--beta-blur", f.beta_blur, "toeplitz_blur: kernel width");
  h.gamma = sub->add_option("--gamma", f.gamma, "toeplitz_blur: noise level");
  sub->add_option("--seed", f.seed, "random seed")->envname("TLSCOND_SEED");
  sub->add_option("--tol-gap", f.tol_gap, "relative genericity tolerance")
      ->envname("TLSCOND_TOL_GAP");
  sub->add_option("--size-cap-k", f.size_cap_k, "max entries of the explicit Kronecker Jacobian")
      ->envname("TLSCOND_SIZE_CAP_K");
  sub->add_option("--format", f.format, "human, csv or json")
      ->check(CLI::IsMember({"human", "csv", "json"}))
      ->envname("TLSCOND_FORMAT");
  h.output = sub->add_option("--output", f.output, "write results to this file");
  if (experiment) {
    sub->add_option("--samples", f.samples, "number of samples")
        ->check(CLI::PositiveNumber)
        ->envname("TLSCOND_SAMPLES");
    sub->add_option("--threads", f.threads, "worker threads")
        ->check(CLI::PositiveNumber)
        ->envname("TLSCOND_THREADS");
    sub->add_flag("--per-sample", f.per_sample, "emit every sample row instead of the summary");
  }
  return h;
}

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  return OutputFormat::human;
}

CliConfig make_config(const std::string& subcommand, const RawFlags& f, const FlagHandles& h) {
  CliConfig cfg;
  cfg.subcommand = subcommand;
  cfg.seed = f.seed;
  cfg.tol_gap = f.tol_gap;
  cfg.samples = f.samples;
  cfg.size_cap_k = f.size_cap_k;
  cfg.threads = f.threads;
  cfg.per_sample = f.per_sample;
  cfg.format = parse_format(f.format);
  if (h.output->count() > 0) cfg.output_path = f.output;

  const bool files = h.matrix->count() > 0 || h.rhs->count() > 0;
  const bool gen = h.gen->count() > 0;
  if (files == gen) {
    throw UsageError("give exactly one input: --matrix/--rhs or --gen");
  }
  if (files) {
    if (h.matrix->count() == 0 || h.rhs->count() == 0) {
      throw UsageError("--matrix and --rhs must be given together");
    }
    cfg.matrix_path = f.matrix;
    cfg.rhs_path = f.rhs;
    return cfg;
  }

  GeneratorSpec spec;
  spec.kind = generator_kind_from_string(f.gen);
  if (h.m->count() == 0) throw UsageError("--gen needs --m");
  spec.m = static_cast<Index>(f.m);
  const bool needs_n = spec.kind != GeneratorKind::vanhuffel &&
                       spec.kind != GeneratorKind::toeplitz_blur;
  if (needs_n && h.n->count() == 0) {
    throw UsageError("--gen " + f.gen + " needs --n");
  }
  if (h.n->count() > 0) spec.n = static_cast<Index>(f.n);
  spec.e_p = f.e_p;
  spec.alpha = f.alpha;
  spec.omega = f.omega;
  spec.beta_blur = f.beta_blur;
  spec.gamma = f.gamma;
  spec.seed = f.seed;
  spec.validate();
  cfg.generator = spec;
  return cfg;
}

std::string fmt(double v, int digits = 6) {
  if (!std::isfinite(v)) return "-";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

void pad(std::ostream& out, const std::string& s, std::size_t width) {
  out << s;
  for (std::size_t i = s.size(); i < width; ++i) out << ' ';
}

struct Loaded {
  TlsProblem problem;
  std::string label;
};

Loaded load_problem(const CliConfig& cfg) {
  if (cfg.generator) {
    return {generate(*cfg.generator), generator_label(*cfg.generator)};
  }
  DenseMatrix a = read_matrix_market(*cfg.matrix_path);
  DenseVector b = read_vector(*cfg.rhs_path);
  if (a.rows() != b.size()) {
    throw Error(ErrorCode::ParseError, *cfg.rhs_path + ": has " + std::to_string(b.size()) +
                                           " entries but " + *cfg.matrix_path + " has " +
                                           std::to_string(a.rows()) + " rows");
  }
  return {TlsProblem(std::move(a), std::move(b)), *cfg.matrix_path};
}

int cmd_solve(const CliConfig& cfg, std::ostream& out) {
  const Loaded in = load_problem(cfg);
  const SpectralData sd = spectral_data(in.problem);
  const TlsSolution sol = solve_tls(in.problem, sd, cfg.tol_gap);
  const double rnorm = sol.residual.norm();
  switch (cfg.format) {
    case OutputFormat::json: {
      json j;
      j["label"] = in.label;
      j["x"] = std::vector<double>(sol.x.data(), sol.x.data() + sol.x.size());
      j["sigma_np1"] = sol.sigma_np1;
      j["alpha"] = sol.alpha;
      j["gap"] = sol.gap;
      j["residual_norm"] = rnorm;
      j["consistent"] = sol.consistent;
      out << j.dump(2) << '\n';
      break;
    }
    case OutputFormat::csv:
      out << "index,x\n";
      for (Index i = 0; i < sol.x.size(); ++i) out << i << ',' << format_exact(sol.x(i)) << '\n';
      break;
    case OutputFormat::human:
      out << "problem        " << in.label << " (" << in.problem.rows() << " x "
          << in.problem.cols() << ")\n";
      out << "x_TLS\n";
      for (Index i = 0; i < sol.x.size(); ++i) out << "  " << fmt(sol.x(i), 15) << '\n';
      out << "sigma_np1      " << fmt(sol.sigma_np1) << '\n';
      out << "alpha          " << fmt(sol.alpha) << '\n';
      out << "gap            " << fmt(sol.gap) << '\n';
      out << "residual_norm  " << fmt(rnorm) << '\n';
      out << "consistent     " << (sol.consistent ? "yes" : "no") << '\n';
      break;
  }
  return kExitOk;
}

void print_row_human(std::ostream& out, const ProblemRow& row) {
  out << "problem  " << row.label << " (" << row.m << " x " << row.n << ")\n";
  if (!row.ok()) {
    out << "status   error " << to_string(*row.error) << ": " << row.error_message << '\n';
    return;
  }
  out << "status   ok\n";
  for (Column c : all_columns()) {
    const auto& v = row[c];
    pad(out, std::string(column_name(c)), 40);
    out << (v ? fmt(*v) : std::string("n/a")) << '\n';
  }
  pad(out, "consistent", 40);
  out << (row.consistent ? "yes" : "no") << '\n';
  pad(out, "v11_ill_conditioned", 40);
  out << (row.v11_ill_conditioned ? "yes" : "no") << '\n';
}

int cmd_analyze(const CliConfig& cfg, std::ostream& out) {
  const Loaded in = load_problem(cfg);
  const ProblemRow row =
      analyze_problem(in.problem, {cfg.tol_gap, cfg.size_cap_k}, in.label);
  switch (cfg.format) {
    case OutputFormat::json: out << to_json(row).dump(2) << '\n'; break;
    case OutputFormat::csv:
      write_csv_header(out);
      write_csv_row(out, row);
      break;
    case OutputFormat::human: print_row_human(out, row); break;
  }
  return row.ok() ? kExitOk : kExitNumerical;
}

int cmd_bounds(const CliConfig& cfg, std::ostream& out) {
  const Loaded in = load_problem(cfg);
  const SpectralData sd = spectral_data(in.problem);
  const TlsSolution sol = solve_tls(in.problem, sd, cfg.tol_gap);
  const double kappa = kappa_closed(sd);
  const double scale = sd.frobenius_augmented() / sol.x.norm();
  const BoundSet bs = bound_report(sd, sol);

  struct Entry {
    const char* name;
    BoundStatus status;
    double abs;
    double rel;
  };
  auto both = [&](const char* name, const BoundValue& b) {
    return Entry{name, b.status, b.value, b.value * scale};
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const Entry entries[] = {
      {"kappa", BoundStatus::applicable, kappa, kappa * scale},
      both("alpha_lower", bs.alpha_lower),
      both("alpha_upper", bs.alpha_upper),
      both("last_row_lower", bs.last_row_lower),
      both("last_row_upper", bs.last_row_upper),
      both("kappa1_lower", bs.kappa1_lower),
      both("kappa1_upper", bs.kappa1_upper),
      both("kappa2_lower", bs.kappa2_lower),
      both("kappa2_upper", bs.kappa2_upper),
      {"bg_upper", bs.bg_upper_abs.status, bs.bg_upper_abs.value, bs.bg_upper_rel.value},
      {"gvl_upper", bs.gvl_upper_rel.status, nan, bs.gvl_upper_rel.value},
  };

  switch (cfg.format) {
    case OutputFormat::json: {
      json j;
      j["label"] = in.label;
      j["rho"] = bs.rho;
      j["alpha"] = sol.alpha;
      json b = json::object();
      for (const Entry& e : entries) {
        b[e.name] = {{"status", std::string(to_string(e.status))},
                     {"absolute", num(e.abs)},
                     {"relative", num(e.rel)}};
      }
      j["bounds"] = b;
      out << j.dump(2) << '\n';
      break;
    }
    case OutputFormat::csv:
      out << "bound,status,absolute,relative\n";
      for (const Entry& e : entries) {
        out << e.name << ',' << to_string(e.status) << ','
            << (std::isfinite(e.abs) ? format_exact(e.abs) : "") << ','
            << (std::isfinite(e.rel) ? format_exact(e.rel) : "") << '\n';
      }
      break;
    case OutputFormat::human:
      out << "problem  " << in.label << " (" << in.problem.rows() << " x " << in.problem.cols()
          << ")\nalpha    " << fmt(sol.alpha) << "\nrho      " << fmt(bs.rho) << "\n\n";
      pad(out, "bound", 18);
      pad(out, "status", 16);
      pad(out, "absolute", 16);
      out << "relative\n";
      for (const Entry& e : entries) {
        pad(out, e.name, 18);
        pad(out, std::string(to_string(e.status)), 16);
        pad(out, fmt(e.abs), 16);
        out << fmt(e.rel) << '\n';
      }
      break;
  }
  return kExitOk;
}

int cmd_experiment(const CliConfig& cfg, std::ostream& out) {
  if (!cfg.generator) throw UsageError("experiment needs --gen");
  const AnalysisOptions opts{cfg.tol_gap, cfg.size_cap_k};
  const auto rows = run_samples(*cfg.generator, cfg.samples, cfg.seed, opts, cfg.threads);
  const ExperimentSummary summary = summarize(*cfg.generator, cfg.seed, rows);

  switch (cfg.format) {
    case OutputFormat::json: {
      json j = to_json(summary);
      if (cfg.per_sample) {
        json arr = json::array();
        for (const ProblemRow& r : rows) arr.push_back(to_json(r));
        j["rows"] = arr;
      }
      out << j.dump(2) << '\n';
      break;
    }
    case OutputFormat::csv:
      if (cfg.per_sample) {
        write_csv_header(out);
        for (const ProblemRow& r : rows) write_csv_row(out, r);
      } else {
        write_summary_csv(out, summary);
      }
      break;
    case OutputFormat::human: {
      GeneratorSpec spec = *cfg.generator;
      spec.seed = cfg.seed;
      out << "generator  " << generator_label(spec) << '\n'
          << "samples    " << summary.samples << " (" << summary.failures << " failed)\n";
      for (const auto& [code, count] : summary.failure_codes) {
        out << "  " << code << ": " << count << '\n';
      }
      out << '\n';
      pad(out, "column", 40);
      pad(out, "mean", 16);
      out << "log10 mean\n";
      for (Column c : all_columns()) {
        const ColumnSummary& cs = summary[c];
        pad(out, std::string(column_name(c)), 40);
        pad(out, cs.mean ? fmt(*cs.mean) : "n/a", 16);
        out << (cs.log10_mean ? fmt(*cs.log10_mean) : "n/a") << '\n';
      }
      if (cfg.per_sample) {
        for (const ProblemRow& r : rows) {
          out << '\n';
          print_row_human(out, r);
        }
      }
      break;
    }
  }
  return kExitOk;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

int cmd_verify(const CliConfig& cfg, std::ostream& out) {
  const Loaded in = load_problem(cfg);
  const TlsProblem& p = in.problem;
  const SpectralData sd = spectral_data(p);
  const TlsSolution sol = solve_tls(p, sd, cfg.tol_gap);
  const double k_closed = kappa_closed(sd);
  const double k_bg = kappa_bg_closed(sd);

  std::optional<DenseMatrix> k;
  std::string k_note;
  try {
    k = build_k(p, sol, cfg.size_cap_k);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooLarge && e.code() != ErrorCode::ConsistentSystem) throw;
    k_note = e.what();
  }
  const double k_kron = k ? spectral_norm(*k) : std::numeric_limits<double>::quiet_NaN();

  std::optional<DenseMatrix> fd;
  std::string fd_note;
  FdConfig fdc;
  fdc.tol_gap = cfg.tol_gap;
  try {
    fd = fd_jacobian(p, fdc);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooLarge && e.code() != ErrorCode::NonGenericUnderPerturbation) {
      throw;
    }
    fd_note = e.what();
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double d_bg = rel_diff(k_bg, k_closed);
  const double d_kron = k ? rel_diff(k_kron, k_closed) : nan;
  const double d_fd = (k && fd) ? (*fd - *k).norm() / k->norm() : nan;

  std::optional<ExpansionFit> fit;
  std::string fit_note;
  if (k) {
    // A separate stream: with the generator's own seed the direction would be
    // vec([A, b]) itself, along which x_TLS does not move.
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed),
                      static_cast<std::uint32_t>(cfg.seed >> 32), 0x7665u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    DenseVector d(p.rows() * (p.cols() + 1));
    for (Index i = 0; i < d.size(); ++i) d(i) = normal(rng);
    d /= d.norm();
    try {
      fit = expansion_order_check(p, *k, d, default_epsilons(sol.gap), cfg.tol_gap);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientData &&
          e.code() != ErrorCode::NonGenericUnderPerturbation) {
        throw;
      }
      fit_note = e.what();
    }
  } else {
    fit_note = "Kronecker Jacobian unavailable";
  }

  const bool routes_ok = d_bg <= kRouteTol && (!k || d_kron <= kRouteTol);
  const bool fd_ok = !fd || !k || d_fd <= kFdTol;
  const bool slope_ok = !fit || (fit->slope >= kSlopeLow && fit->slope <= kSlopeHigh);

  switch (cfg.format) {
    case OutputFormat::json: {
      json j;
      j["label"] = in.label;
      j["kappa_closed"] = k_closed;
      j["kappa_kronecker"] = num(k_kron);
      j["kappa_bg"] = k_bg;
      j["kappa_fd"] = fd ? num(spectral_norm(*fd)) : json(nullptr);
      j["rel_diff_kronecker"] = num(d_kron);
      j["rel_diff_bg"] = num(d_bg);
      j["rel_diff_fd_jacobian"] = num(d_fd);
      j["expansion_slope"] = fit ? num(fit->slope) : json(nullptr);
      j["expansion_points"] = fit ? json(fit->epsilons.size()) : json(nullptr);
      j["routes_agree"] = routes_ok;
      j["fd_agrees"] = fd_ok;
      j["slope_in_range"] = slope_ok;
      json notes = json::object();
      if (!k_note.empty()) notes["kronecker"] = k_note;
      if (!fd_note.empty()) notes["fd"] = fd_note;
      if (!fit_note.empty()) notes["expansion"] = fit_note;
      j["notes"] = notes;
      out << j.dump(2) << '\n';
      break;
    }
    case OutputFormat::csv:
      out << "label,kappa_closed,kappa_kronecker,kappa_bg,rel_diff_kronecker,rel_diff_bg,"
             "rel_diff_fd_jacobian,expansion_slope,routes_agree,fd_agrees,slope_in_range\n";
      out << '"' << in.label << "\"," << format_exact(k_closed) << ','
          << (k ? format_exact(k_kron) : "") << ',' << format_exact(k_bg) << ','
          << (k ? format_exact(d_kron) : "") << ',' << format_exact(d_bg) << ','
          << (std::isfinite(d_fd) ? format_exact(d_fd) : "") << ','
          << (fit ? format_exact(fit->slope) : "") << ',' << int{routes_ok} << ','
          << int{fd_ok} << ',' << int{slope_ok} << '\n';
      break;
    case OutputFormat::human:
      out << "problem            " << in.label << " (" << p.rows() << " x " << p.cols() << ")\n"
          << "kappa closed       " << fmt(k_closed, 12) << '\n'
          << "kappa kronecker    " << (k ? fmt(k_kron, 12) : "skipped: " + k_note) << '\n'
          << "kappa bg           " << fmt(k_bg, 12) << '\n'
          << "route agreement    " << (routes_ok ? "yes" : "NO") << " (kronecker "
          << fmt(d_kron, 3) << ", bg " << fmt(d_bg, 3) << ")\n"
          << "fd jacobian        "
          << (fd ? (k ? fmt(d_fd, 3) + " relative difference" : "no K to compare")
                 : "skipped: " + fd_note)
          << '\n'
          << "expansion slope    " << (fit ? fmt(fit->slope, 4) : "skipped: " + fit_note)
          << '\n';
      break;
  }
  return kExitOk;
}

void report_error(std::ostream& out, std::ostream& err, OutputFormat format,
                  std::string_view code, const std::string& message) {
  if (format == OutputFormat::json) {
    json j;
    j["status"] = "error";
    j["error_code"] = code;
    j["error_message"] = message;
    out << j.dump(2) << '\n';
  }
  err << "error: " << message << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Total least squares solver and condition number analysis", "tlscond"};
  app.require_subcommand(1);
  RawFlags flags;
  struct Sub {
    CLI::App* app;
    FlagHandles handles;
  };
  std::vector<Sub> subs;
  const std::pair<const char*, const char*> names[] = {
      {"solve", "solve the TLS problem"},
      {"analyze", "condition number, bounds and diagnostics"},
      {"bounds", "every bound in absolute and relative form"},
      {"experiment", "aggregate over seeded generated problems"},
      {"verify", "cross-check the three routes and the finite-difference oracle"},
  };
  for (const auto& [name, help] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    subs.push_back({sub, add_flags(sub, flags, std::string_view(name) == "experiment")});
  }

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  const Sub* active = nullptr;
  for (const Sub& s : subs) {
    if (s.app->parsed()) active = &s;
  }
  const OutputFormat format = parse_format(flags.format);

  std::ostringstream buffer;
  int code = kExitOk;
  try {
    const CliConfig cfg = make_config(active->app->get_name(), flags, active->handles);
    const std::string& sub = cfg.subcommand;
    if (sub == "solve") {
      code = cmd_solve(cfg, buffer);
    } else if (sub == "analyze") {
      code = cmd_analyze(cfg, buffer);
    } else if (sub == "bounds") {
      code = cmd_bounds(cfg, buffer);
    } else if (sub == "experiment") {
      code = cmd_experiment(cfg, buffer);
    } else {
      code = cmd_verify(cfg, buffer);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const Error& e) {
    const bool input = e.code() == ErrorCode::ParseError || e.code() == ErrorCode::InvalidInput;
    report_error(out, err, format, to_string(e.code()), e.what());
    return input ? kExitUsage : kExitNumerical;
  } catch (const std::exception& e) {
    report_error(out, err, format, "internal", e.what());
    return kExitNumerical;
  }

  if (!flags.output.empty() && active->handles.output->count() > 0) {
    std::ofstream file(flags.output, std::ios::binary);
    if (!(file << buffer.str())) {
      err << "error: cannot write " << flags.output << '\n';
      return kExitUsage;
    }
  } else {
    out << buffer.str();
  }
  return code;
}

}  // namespace tlscond
