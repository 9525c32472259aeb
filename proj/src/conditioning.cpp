#include "tlscond/conditioning.hpp"

#include <cmath>
#include <string>

#include "tlscond/error.hpp"

namespace tlscond {
namespace {

// (s - t)(s + t) keeps the small gap exact where s*s - t*t would cancel.
double diff_of_squares(double s, double t) { return (s - t) * (s + t); }

}  // namespace

std::string_view to_string(KappaRoute route) noexcept {
  switch (route) {
    case KappaRoute::closed: return "closed";
    case KappaRoute::kronecker: return "kronecker";
    case KappaRoute::baboulin_gratton: return "baboulin_gratton";
  }
  return "unknown";
}

double kappa_closed(const SpectralData& sd) {
  const Index n = sd.n();
  const double t = sd.sigma_np1();
  if (!(sd.sigma_n() > t)) {
    throw Error(ErrorCode::NonGeneric, "sigma_n must exceed sigma_{n+1}");
  }
  DenseMatrix s = DenseMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const double si = sd.sigma(i);
    s(i, i) = std::hypot(si, t) / diff_of_squares(si, t);
  }
  const DenseMatrix w = solve_square(sd.v11.transpose(), s);
  return spectral_norm(w) / sd.alpha;
}

DenseMatrix build_k(const TlsProblem& problem, const TlsSolution& sol, std::size_t size_cap) {
  const Index m = problem.rows();
  const Index n = problem.cols();
  const Index cols = m * n + m;
  const double entries = static_cast<double>(n) * static_cast<double>(cols);
  if (entries > static_cast<double>(size_cap)) {
    throw Error(ErrorCode::TooLarge, "Kronecker Jacobian would have " +
                                         std::to_string(static_cast<long long>(entries)) +
                                         " entries (cap " + std::to_string(size_cap) + ")");
  }
  const double rnorm = sol.residual.norm();
  if (sol.consistent || !(rnorm > 0.0)) {
    throw Error(ErrorCode::ConsistentSystem,
                "residual is zero (b in range(A)); K is undefined");
  }
  const DenseMatrix& a = problem.a();
  const DenseVector rhat = sol.residual / rnorm;

  // G = [x^T, -1] kron I_m
  DenseMatrix g = DenseMatrix::Zero(m, cols);
  for (Index j = 0; j < n; ++j) {
    g.block(0, j * m, m, m).diagonal().setConstant(sol.x(j));
  }
  g.block(0, n * m, m, m).diagonal().setConstant(-1.0);

  // [I_n kron r^T, O_{n,m}]
  DenseMatrix ir = DenseMatrix::Zero(n, cols);
  for (Index j = 0; j < n; ++j) {
    ir.block(j, j * m, 1, m) = sol.residual.transpose();
  }

  const DenseMatrix atg = a.transpose() * g;
  const DenseVector atr = a.transpose() * rhat;
  const DenseMatrix inner = 2.0 * atr * (rhat.transpose() * g) - atg - ir;

  DenseMatrix p = a.transpose() * a;
  p.diagonal().array() -= sol.sigma_np1 * sol.sigma_np1;
  return solve_square(p, inner);
}

double kappa_kronecker(const TlsProblem& problem, const TlsSolution& sol, std::size_t size_cap) {
  return spectral_norm(build_k(problem, sol, size_cap));
}

double kappa_bg_closed(const SpectralData& sd) {
  const Index n = sd.n();
  const double t = sd.sigma_np1();
  const DenseVector& sigma_hat = sd.svd_a.singular_values;
  DenseVector d_hat(n);
  DenseVector d(n);
  for (Index i = 0; i < n; ++i) {
    const double gap = diff_of_squares(sigma_hat(i), t);
    if (!(gap > 0.0)) {
      throw Error(ErrorCode::NonGeneric, "sigma_hat_i <= sigma_{n+1} for i = " +
                                             std::to_string(i + 1));
    }
    d_hat(i) = 1.0 / gap;
    d(i) = std::hypot(sd.sigma(i), t);
  }
  const DenseMatrix core = d_hat.asDiagonal() *
                           (sd.svd_a.right_vectors.transpose() * sd.v11) *
                           d.asDiagonal();
  return spectral_norm(core) / sd.alpha;
}

double kappa_relative(double kappa_abs, const TlsProblem& problem, const TlsSolution& sol) {
  const double xnorm = sol.x.norm();
  if (!(xnorm > 0.0)) {
    throw Error(ErrorCode::DegenerateSolution,
                "relative condition number undefined for x_TLS = 0");
  }
  return kappa_abs * problem.augmented().norm() / xnorm;
}

ConditionReport condition_report(const TlsProblem& problem, const SpectralData& sd,
                                 const TlsSolution& sol, KappaRoute route,
                                 std::size_t size_cap) {
  ConditionReport report;
  report.route = route;
  switch (route) {
    case KappaRoute::closed: report.kappa_abs = kappa_closed(sd); break;
    case KappaRoute::kronecker: report.kappa_abs = kappa_kronecker(problem, sol, size_cap); break;
    case KappaRoute::baboulin_gratton: report.kappa_abs = kappa_bg_closed(sd); break;
  }
  report.kappa_rel = kappa_relative(report.kappa_abs, problem, sol);
  report.scale_factor = problem.augmented().norm() / sol.x.norm();
  report.v11_condition = 1.0 / sd.alpha;
  report.v11_ill_conditioned = report.v11_condition > kV11ConditionWarning;
  return report;
}

}  // namespace tlscond
