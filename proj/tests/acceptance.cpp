// Acceptance gate: one PASS/FAIL line per criterion, indented detail lines
// underneath. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "tlscond/bounds.hpp"
#include "tlscond/cli.hpp"
#include "tlscond/conditioning.hpp"
#include "tlscond/generators.hpp"
#include "tlscond/oracle.hpp"
#include "tlscond/report.hpp"

namespace {

using namespace tlscond;
using tlscond::testing::random_case;
using tlscond::testing::rel_err;
using Clock = std::chrono::steady_clock;

class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)), start_(Clock::now()) {}

  void check(bool ok, const std::string& what) {
    if (!ok) {
      ++failures_;
      if (failures_ <= 10) detail("violated: " + what);
    }
  }
  void detail(const std::string& line) { details_.push_back(line); }

  double seconds() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  void time_limit(double limit) {
    const double t = seconds();
    char buf[96];
    std::snprintf(buf, sizeof buf, "runtime %.2f s (limit %.0f s)", t, limit);
    check(t < limit, buf);
    if (t < limit) detail(buf);
  }

  bool finish() const {
    std::printf("%s %s\n", failures_ == 0 ? "PASS" : "FAIL", name_.c_str());
    for (const std::string& d : details_) std::printf("       %s\n", d.c_str());
    if (failures_ > 10) std::printf("       ... %d violations in total\n", failures_);
    std::fflush(stdout);
    return failures_ == 0;
  }

 private:
  std::string name_;
  Clock::time_point start_;
  std::vector<std::string> details_;
  int failures_ = 0;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Problems shared by criteria 4-7.
struct TestProblem {
  std::string label;
  TlsProblem problem;
};

std::vector<TestProblem> random_problems() {
  std::vector<TestProblem> out;
  for (std::uint64_t i = 0; i < 100; ++i) {
    auto c = random_case(i, 40, 10);
    out.push_back({generator_label(c.spec), std::move(c.problem)});
  }
  return out;
}

std::vector<TestProblem> bg_sweep() {
  std::vector<TestProblem> out;
  for (double e_p : {1e-3, 1e-7, 1e-10}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      GeneratorSpec spec;
      spec.kind = GeneratorKind::bg_example;
      spec.m = 100;
      spec.n = 20;
      spec.e_p = e_p;
      spec.seed = seed;
      out.push_back({generator_label(spec), generate(spec)});
    }
  }
  return out;
}

bool table1(std::vector<ProblemRow>& rows) {
  Criterion c("[1] vanhuffel reference condition numbers, m in {200, 500, 1000}, 1%, < 30 s");
  const Index ms[] = {200, 500, 1000};
  struct Target {
    Column column;
    double values[3];
  };
  const Target targets[] = {
      {Column::kappa_rel, {2.01e2, 5.01e2, 1.00e3}},
      {Column::kappa2_lower_rel, {2.00e2, 5.00e2, 1.00e3}},
      {Column::kappa2_upper_rel, {2.15e2, 5.15e2, 1.02e3}},
      {Column::kappa1_upper_rel, {3.46e2, 8.65e2, 1.73e3}},
      {Column::bg_upper_rel, {2.83e3, 1.12e4, 3.16e4}},
      {Column::gvl_upper_rel, {5.15e3, 1.21e4, 2.35e4}},
  };
  for (int k = 0; k < 3; ++k) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::vanhuffel;
    spec.m = ms[k];
    rows.push_back(analyze_problem(generate(spec), {}, generator_label(spec)));
    const ProblemRow& row = rows.back();
    c.check(row.ok(), "analysis failed for m=" + std::to_string(ms[k]));
    if (!row.ok()) continue;
    std::string line = "m=" + std::to_string(ms[k]) + ":";
    for (const Target& t : targets) {
      const double got = row[t.column].value_or(std::nan(""));
      const double want = t.values[k];
      line += fmt(" %.4g", got);
      c.check(rel_err(got, want) <= 0.01,
              std::string(column_name(t.column)) + fmt(" m=%.0f got %.6g want %.3g", ms[k], got,
                                                        want));
    }
    c.detail(line + "  (kappa_rel k2_lo k2_up k1_up bg gvl)");
  }
  c.time_limit(30.0);
  return c.finish();
}

bool table2(const std::vector<ProblemRow>& rows) {
  Criterion c("[2] vanhuffel reference spectral ratios, 1%");
  const double ratio_n[] = {7.07e-2, 4.47e-2, 3.16e-2};
  const double ratio_1[] = {1.00e1, 1.58e1, 2.24e1};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const ProblemRow& row = rows[k];
    if (!row.ok()) {
      c.check(false, "missing row");
      continue;
    }
    const double a = *row[Column::sigma_np1_over_sigma_n];
    const double b = *row[Column::sigma_np1_over_sigma_hat_n];
    const double d = *row[Column::sigma_1_over_sigma_hat_n];
    c.check(rel_err(a, ratio_n[k]) <= 0.01, fmt("sigma_np1/sigma_n %.6g vs %.3g", a, ratio_n[k]));
    c.check(rel_err(b, 7.07e-1) <= 0.01, fmt("sigma_np1/sigma_hat_n %.6g vs 0.707", b));
    c.check(rel_err(d, ratio_1[k]) <= 0.01, fmt("sigma_1/sigma_hat_n %.6g vs %.3g", d, ratio_1[k]));
    c.detail("m=" + std::to_string(row.m) + fmt(": %.4g %.4g %.4g", a, b, d));
  }
  return c.finish();
}

bool closed_forms() {
  Criterion c("[3] vanhuffel closed forms, m in {6, 50, 200}, 1e-8 relative");
  for (Index m : {6, 50, 200}) {
    const TlsProblem p = gen_vanhuffel(m);
    const SpectralData sd = spectral_data(p);
    const TlsSolution sol = solve_tls(p, sd);
    const double md = static_cast<double>(m);
    const double ea = rel_err(sol.alpha, 1.0 / std::sqrt(md - 1.0));
    const double eh = rel_err(sd.sigma_hat_n(), std::sqrt(2.0 * md));
    const double es = rel_err(sol.sigma_np1, std::sqrt(md));
    const double ex = (sol.x + DenseVector::Ones(m - 2)).norm() / std::sqrt(md - 2.0);
    c.check(ea <= 1e-8 && eh <= 1e-8 && es <= 1e-8 && ex <= 1e-8,
            "m=" + std::to_string(m) + fmt(" errors %.2e %.2e %.2e", ea, eh, es));
    c.detail("m=" + std::to_string(m) + fmt(": max relative error %.2e",
                                            std::max({ea, eh, es, ex})));
  }
  return c.finish();
}

bool route_agreement(const std::vector<TestProblem>& problems) {
  Criterion c("[4] three-route kappa agreement on 100 random problems, 1e-8, < 60 s");
  double worst_kron = 0.0, worst_bg = 0.0;
  for (const TestProblem& t : problems) {
    const SpectralData sd = spectral_data(t.problem);
    const TlsSolution sol = solve_tls(t.problem, sd);
    const double k = kappa_closed(sd);
    const double dk = rel_err(kappa_kronecker(t.problem, sol), k);
    const double db = rel_err(kappa_bg_closed(sd), k);
    worst_kron = std::max(worst_kron, dk);
    worst_bg = std::max(worst_bg, db);
    c.check(dk <= 1e-8 && db <= 1e-8, t.label + fmt(" kron %.2e bg %.2e", dk, db));
  }
  c.detail(fmt("worst relative difference: kronecker %.2e, bg %.2e", worst_kron, worst_bg));
  c.time_limit(60.0);
  return c.finish();
}

bool sandwiches(const std::vector<TestProblem>& problems) {
  Criterion c("[5] bound sandwiches, alpha bound ratio, last-row tightness, kappa1_upper <= bg_upper");
  const double slack = 1e-10;
  double min_margin_lower = INFINITY, min_margin_upper = INFINITY;
  for (const TestProblem& t : problems) {
    const SpectralData sd = spectral_data(t.problem);
    const TlsSolution sol = solve_tls(t.problem, sd);
    const double k = kappa_closed(sd);
    const BoundSet bs = bound_report(sd, sol);
    const std::pair<const char*, const BoundValue*> lowers[] = {
        {"alpha_lower", &bs.alpha_lower},
        {"last_row_lower", &bs.last_row_lower},
        {"kappa1_lower", &bs.kappa1_lower},
        {"kappa2_lower", &bs.kappa2_lower}};
    const std::pair<const char*, const BoundValue*> uppers[] = {
        {"alpha_upper", &bs.alpha_upper},
        {"last_row_upper", &bs.last_row_upper},
        {"kappa1_upper", &bs.kappa1_upper},
        {"kappa2_upper", &bs.kappa2_upper},
        {"bg_upper_abs", &bs.bg_upper_abs}};
    for (const auto& [name, b] : lowers) {
      if (!b->applicable()) continue;
      min_margin_lower = std::min(min_margin_lower, (k - b->value) / k);
      c.check(b->value <= k * (1 + slack),
              t.label + " " + name + fmt(" %.17g > kappa %.17g", b->value, k));
    }
    for (const auto& [name, b] : uppers) {
      if (!b->applicable()) continue;
      min_margin_upper = std::min(min_margin_upper, (b->value - k) / k);
      c.check(k <= b->value * (1 + slack),
              t.label + " " + name + fmt(" %.17g < kappa %.17g", b->value, k) +
                  fmt(" (short by %.2e; eps*sigma_1/gap = %.2e)", (k - b->value) / k,
                      2.220446049250313e-16 * sd.sigma_1() / sol.gap));
    }
    const double ratio = bs.alpha_upper.value / bs.alpha_lower.value;
    c.check(rel_err(ratio, 1.0 / sd.alpha) <= 1e-12, t.label + " alpha bound ratio");
    if (sd.alpha <= 0.5) {
      c.check(bs.last_row_upper.value < 4.0 * bs.last_row_lower.value, t.label + " last-row bound ratio");
    }
    c.check(bs.kappa1_upper.value <= bs.bg_upper_abs.value,
            t.label + fmt(" kappa1_upper %.17g > bg %.17g", bs.kappa1_upper.value,
                          bs.bg_upper_abs.value));
  }
  c.detail(std::to_string(problems.size()) + " problems" +
           fmt("; smallest relative margins: lower %.2e, upper %.2e", min_margin_lower,
               min_margin_upper));
  return c.finish();
}

bool v11_pattern(const std::vector<TestProblem>& problems) {
  Criterion c("[6] singular values of V11 are (1, ..., 1, alpha), 1e-8");
  double worst = 0.0;
  for (const TestProblem& t : problems) {
    const SpectralData sd = spectral_data(t.problem);
    DenseVector s = singular_values(sd.v11);
    std::sort(s.data(), s.data() + s.size());
    double err = std::abs(s(0) - sd.alpha);
    for (Index i = 1; i < s.size(); ++i) err = std::max(err, std::abs(s(i) - 1.0));
    worst = std::max(worst, err);
    c.check(err <= 1e-8, t.label + fmt(" deviation %.2e", err));
  }
  c.detail(std::to_string(problems.size()) + fmt(" problems; worst deviation %.2e", worst));
  return c.finish();
}

bool residual_identities(const std::vector<TestProblem>& problems) {
  Criterion c("[7] residual identities at 1e-8, gap inequality on generic problems");
  double worst5 = 0.0, worst6 = 0.0;
  for (const TestProblem& t : problems) {
    const TlsProblem& p = t.problem;
    const SpectralData sd = spectral_data(p);
    const TlsSolution sol = solve_tls(p, sd);
    const double s2 = sol.sigma_np1 * sol.sigma_np1;
    const double xn = sol.x.norm();
    const double e5 = std::abs(s2 - sol.residual.squaredNorm() / (1.0 + xn * xn)) / s2;
    const double e6 =
        (p.a().transpose() * sol.residual - s2 * sol.x).norm() / (s2 * (1.0 + xn));
    worst5 = std::max(worst5, e5);
    worst6 = std::max(worst6, e6);
    c.check(e5 <= 1e-8, t.label + fmt(" residual norm %.2e", e5));
    c.check(e6 <= 1e-8, t.label + fmt(" normal equations %.2e", e6));
    const DenseVector u_n = sd.svd_a.left_vectors.col(p.cols() - 1);
    const double lower = std::abs(u_n.dot(p.b())) / (2.0 * xn);
    const double upper = p.b().norm() / xn;
    c.check(lower <= sol.gap && sol.gap <= upper,
            t.label + fmt(" gap %.6g outside [%.6g, %.6g]", sol.gap, lower, upper));
  }
  c.detail(std::to_string(problems.size()) +
           fmt(" problems; worst residual norm %.2e, worst normal equations %.2e", worst5, worst6));
  return c.finish();
}

bool oracle() {
  Criterion c("[8] FD Jacobian vs K (1e-6) on 20 problems; slope in [1.8, 2.2] for >= 95/100");
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto rc = random_case(1000 + i, 12, 4);
    const DenseMatrix k = build_k(rc.problem, solve_tls(rc.problem));
    const double d = (fd_jacobian(rc.problem) - k).norm() / k.norm();
    worst = std::max(worst, d);
    c.check(d <= 1e-6, generator_label(rc.spec) + fmt(" fd difference %.2e", d));
  }
  c.detail(fmt("worst FD relative difference %.2e", worst));

  int good = 0;
  double lo = INFINITY, hi = -INFINITY;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto rc = random_case(2000 + i, 12, 4);
    const TlsSolution sol = solve_tls(rc.problem);
    const DenseMatrix k = build_k(rc.problem, sol);
    std::mt19937_64 rng(i);
    std::normal_distribution<double> normal;
    DenseVector dir(k.cols());
    for (Index j = 0; j < dir.size(); ++j) dir(j) = normal(rng);
    dir /= dir.norm();
    try {
      const ExpansionFit fit =
          expansion_order_check(rc.problem, k, dir, default_epsilons(sol.gap));
      lo = std::min(lo, fit.slope);
      hi = std::max(hi, fit.slope);
      if (fit.slope >= 1.8 && fit.slope <= 2.2) ++good;
    } catch (const Error& e) {
      c.detail(generator_label(rc.spec) + ": " + e.what());
    }
  }
  c.check(good >= 95, std::to_string(good) + "/100 slopes in range");
  c.detail(std::to_string(good) + fmt("/100 slopes in range; observed [%.4f, %.4f]", lo, hi));
  c.time_limit(120.0);
  return c.finish();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool statistical() {
  Criterion c("[9] statistical patterns: bg_example, toeplitz_blur, controlled_alpha");

  double min_ratio = INFINITY;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TlsProblem p = gen_bg_example(100, 20, 1e-3, seed);
    const SpectralData sd = spectral_data(p);
    const TlsSolution sol = solve_tls(p, sd);
    const double k = kappa_closed(sd);
    const BoundSet bs = bound_report(sd, sol);
    c.check(bs.alpha_lower.value <= k * (1 + 1e-10) && k <= bs.alpha_upper.value * (1 + 1e-10),
            fmt("bg seed %.0f outside alpha sandwich", static_cast<double>(seed)));
    const double ratio = bs.bg_upper_abs.value / bs.kappa1_upper.value;
    min_ratio = std::min(min_ratio, ratio);
    c.check(ratio >= 10.0, fmt("bg seed %.0f: bg/kappa1_upper = %.3g", static_cast<double>(seed),
                               ratio));
  }
  c.detail(fmt("bg example e_p=1e-3, 20 seeds: min bg_upper_abs/kappa1_upper %.3g", min_ratio));

  GeneratorSpec blur;
  blur.kind = GeneratorKind::toeplitz_blur;
  blur.m = 100;
  const auto rows = run_samples(blur, 100, 0);
  std::vector<double> kappas;
  double min_gvl = INFINITY;
  int skipped = 0;
  for (const ProblemRow& r : rows) {
    if (!r.ok()) {
      ++skipped;
      continue;
    }
    const double k = *r[Column::kappa_rel];
    kappas.push_back(k);
    const double g = *r[Column::gvl_upper_rel] / k;
    min_gvl = std::min(min_gvl, g);
    c.check(g >= 1e6, r.label + fmt(": gvl/kappa_rel %.3g", g));
  }
  const double med = kappas.empty() ? 0.0 : median(kappas);
  c.check(med >= 1e6 && med <= 1e9, fmt("toeplitz_blur median kappa_rel %.3g", med));
  c.check(!kappas.empty(), "toeplitz_blur produced no generic samples");
  c.detail(fmt("toeplitz_blur (m=100), 100 seeds: median kappa_rel %.3g, min gvl/kappa_rel %.3g", med,
               min_gvl) +
           ", " + std::to_string(skipped) + " non-generic samples excluded");

  GeneratorSpec ex3;
  ex3.kind = GeneratorKind::controlled_alpha;
  ex3.m = 500;
  ex3.n = 350;
  ex3.alpha = 1e-2;
  const ExperimentSummary s = run_experiment(ex3, 100, 0);
  const double gap = s[Column::one_minus_sigma_np1_over_sigma_hat_n].mean.value_or(0.0);
  c.check(s.failures == 0, "controlled_alpha failures");
  c.check(gap >= 2.91e-4 / 3 && gap <= 2.91e-4 * 3,
          fmt("controlled_alpha mean 1 - sigma_np1/sigma_hat_n %.3g", gap));
  c.detail(fmt("controlled_alpha (500x350, alpha=1e-2), 100 seeds: mean 1 - sigma_np1/sigma_hat_n %.3g "
               "(target 2.91e-4)",
               gap));
  return c.finish();
}

bool determinism() {
  Criterion c("[10] byte-identical CSV/JSON on repeated runs");
  const std::vector<std::vector<std::string>> invocations = {
      {"tlscond", "experiment", "--gen", "gaussian", "--m", "30", "--n", "8", "--samples", "20",
       "--seed", "5", "--format", "csv"},
      {"tlscond", "experiment", "--gen", "controlled_alpha", "--m", "30", "--n", "8", "--alpha",
       "0.05", "--samples", "20", "--seed", "5", "--format", "json", "--per-sample"},
      {"tlscond", "analyze", "--gen", "toeplitz_blur", "--m", "60", "--seed", "5", "--format",
       "json"},
      {"tlscond", "analyze", "--gen", "bg_example", "--m", "50", "--n", "10", "--ep", "1e-7",
       "--seed", "3", "--format", "csv"},
      {"tlscond", "bounds", "--gen", "gaussian", "--m", "20", "--n", "5", "--format", "csv"},
  };
  for (const auto& args : invocations) {
    std::string outputs[2];
    for (std::string& o : outputs) {
      std::ostringstream out, err;
      const int code = run_cli(args, out, err);
      c.check(code == 0, args[1] + " exit code " + std::to_string(code) + ": " + err.str());
      o = out.str();
    }
    c.check(!outputs[0].empty() && outputs[0] == outputs[1], args[1] + " output differs");
  }
  auto threaded = invocations[0];
  threaded.insert(threaded.end(), {"--threads", "4"});
  std::ostringstream a, b, err;
  run_cli(invocations[0], a, err);
  run_cli(threaded, b, err);
  c.check(a.str() == b.str(), "threaded experiment output differs");
  c.detail(std::to_string(invocations.size()) + " invocations run twice, plus a 4-thread rerun");
  return c.finish();
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const std::vector<TestProblem> randoms = random_problems();
  std::vector<TestProblem> all = randoms;
  for (TestProblem& t : bg_sweep()) all.push_back(std::move(t));
  for (Index m : {6, 50, 200}) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::vanhuffel;
    spec.m = m;
    all.push_back({generator_label(spec), generate(spec)});
  }

  int failed = 0;
  std::vector<ProblemRow> table_rows;
  failed += !table1(table_rows);
  failed += !table2(table_rows);
  failed += !closed_forms();
  failed += !route_agreement(randoms);
  failed += !sandwiches(all);
  failed += !v11_pattern(all);
  failed += !residual_identities(all);
  failed += !oracle();
  failed += !statistical();
  failed += !determinism();

  const double total = std::chrono::duration<double>(Clock::now() - start).count();
  std::printf("%d/10 criteria passed (%.1f s)\n", 10 - failed, total);
  return failed == 0 ? 0 : 1;
}
