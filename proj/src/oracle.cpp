#include "tlscond/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tlscond/error.hpp"

namespace tlscond {
namespace {

DenseVector perturbed_solution(const TlsProblem& problem, const DenseVector& delta,
                               double tol_gap) {
  try {
    return solve_tls(perturbed(problem, delta), tol_gap).x;
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::NonGeneric:
      case ErrorCode::RankDeficient:
      case ErrorCode::DegenerateSolution:
      case ErrorCode::NoSolutionDirection:
        throw Error(ErrorCode::NonGenericUnderPerturbation,
                    std::string("perturbed problem failed: ") + e.what());
      default:
        throw;
    }
  }
}

}  // namespace

TlsProblem perturbed(const TlsProblem& problem, const DenseVector& delta) {
  const Index m = problem.rows();
  const Index n = problem.cols();
  if (delta.size() != m * (n + 1)) {
    throw Error(ErrorCode::InvalidInput, "perturbation must have length m(n+1)");
  }
  DenseMatrix a = problem.a() + Eigen::Map<const DenseMatrix>(delta.data(), m, n);
  DenseVector b = problem.b() + delta.tail(m);
  return TlsProblem(std::move(a), std::move(b));
}

DenseMatrix fd_jacobian(const TlsProblem& problem, const FdConfig& cfg) {
  const Index m = problem.rows();
  const Index n = problem.cols();
  const Index cols = m * (n + 1);
  if (static_cast<std::size_t>(cols) > cfg.max_columns) {
    throw Error(ErrorCode::TooLarge, "finite-difference Jacobian needs " +
                                         std::to_string(cols) + " columns (cap " +
                                         std::to_string(cfg.max_columns) + ")");
  }
  const double h = cfg.step.value_or(
      std::sqrt(std::numeric_limits<double>::epsilon()) * problem.augmented().norm());
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidInput, "finite-difference step must be > 0");

  const DenseVector x0 = cfg.scheme == FdScheme::forward ? solve_tls(problem, cfg.tol_gap).x
                                                         : DenseVector();
  DenseMatrix jac(n, cols);
  DenseVector delta = DenseVector::Zero(cols);
  for (Index j = 0; j < cols; ++j) {
    delta(j) = h;
    const DenseVector plus = perturbed_solution(problem, delta, cfg.tol_gap);
    if (cfg.scheme == FdScheme::central) {
      delta(j) = -h;
      const DenseVector minus = perturbed_solution(problem, delta, cfg.tol_gap);
      jac.col(j) = (plus - minus) / (2.0 * h);
    } else {
      jac.col(j) = (plus - x0) / h;
    }
    delta(j) = 0.0;
  }
  return jac;
}

double kappa_fd(const TlsProblem& problem, const FdConfig& cfg) {
  return spectral_norm(fd_jacobian(problem, cfg));
}

ExpansionFit expansion_order_check(const TlsProblem& problem, const DenseMatrix& k,
                                   const DenseVector& direction,
                                   std::span<const double> epsilons, double tol_gap) {
  const Index cols = problem.rows() * (problem.cols() + 1);
  if (direction.size() != cols || k.cols() != cols || k.rows() != problem.cols()) {
    throw Error(ErrorCode::InvalidInput, "expansion check: dimension mismatch");
  }
  if (std::abs(direction.norm() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidInput, "expansion check: direction must have unit norm");
  }
  const DenseVector x0 = solve_tls(problem, tol_gap).x;
  const DenseVector first_order = k * direction;
  // Rounding in x_TLS is roughly eps * (||x|| + ||K|| ||[A, b]||_F).
  const double floor = 10.0 * std::numeric_limits<double>::epsilon() *
                       (std::max(1.0, x0.norm()) + k.norm() * problem.augmented().norm());

  ExpansionFit fit;
  for (const double eps : epsilons) {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidInput, "epsilons must be positive");
    const DenseVector x = perturbed_solution(problem, eps * direction, tol_gap);
    const double rem = (x - x0 - eps * first_order).norm();
    if (!(rem > floor)) {
      ++fit.dropped;
      continue;
    }
    fit.epsilons.push_back(eps);
    fit.remainders.push_back(rem);
  }
  const std::size_t count = fit.epsilons.size();
  if (count < 3) {
    throw Error(ErrorCode::InsufficientData,
                "expansion check: only " + std::to_string(count) +
                    " points above the noise floor");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    mx += std::log(fit.epsilons[i]);
    my += std::log(fit.remainders[i]);
  }
  mx /= static_cast<double>(count);
  my /= static_cast<double>(count);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double dx = std::log(fit.epsilons[i]) - mx;
    sxy += dx * (std::log(fit.remainders[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0)) {
    throw Error(ErrorCode::InsufficientData, "expansion check: epsilons must be distinct");
  }
  fit.slope = sxy / sxx;
  return fit;
}

std::vector<double> default_epsilons(double gap) {
  std::vector<double> out;
  for (int k = 0; k < 6; ++k) out.push_back(gap * std::pow(10.0, -1.0 - 0.5 * k));
  return out;
}

}  // namespace tlscond
