#include "tlscond/tls_core.hpp"

#include <cmath>
#include <string>

#include "tlscond/error.hpp"

namespace tlscond {
namespace {

constexpr double kZeroDirection = 1e-14;

std::string shape(Index r, Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

TlsProblem::TlsProblem(DenseMatrix a, DenseVector b) : a_(std::move(a)), b_(std::move(b)) {
  require_finite(a_, "matrix A");
  require_finite(b_, "right-hand side b");
  if (b_.size() != a_.rows()) {
    throw Error(ErrorCode::InvalidInput, "A is " + shape(a_.rows(), a_.cols()) +
                                             " but b has length " +
                                             std::to_string(b_.size()));
  }
  if (a_.rows() <= a_.cols()) {
    throw Error(ErrorCode::InvalidInput,
                "TLS problem needs m > n, got A " + shape(a_.rows(), a_.cols()));
  }
}

DenseMatrix TlsProblem::augmented() const {
  DenseMatrix c(rows(), cols() + 1);
  c.leftCols(cols()) = a_;
  c.col(cols()) = b_;
  return c;
}

double SpectralData::frobenius_augmented() const {
  return svd_augmented.singular_values.norm();
}

double SpectralData::norm_b() const {
  const Index last = svd_augmented.right_vectors.rows() - 1;
  return svd_augmented.singular_values
      .cwiseProduct(svd_augmented.right_vectors.row(last).transpose())
      .norm();
}

double SpectralData::norm_x() const {
  return std::sqrt(std::max(0.0, (1.0 - alpha) * (1.0 + alpha))) / alpha;
}

SpectralData spectral_data(const TlsProblem& problem) {
  const Index n = problem.cols();
  SpectralData sd;
  sd.svd_augmented = thin_svd(problem.augmented());
  sd.svd_a = thin_svd(problem.a());

  auto& v = sd.svd_augmented.right_vectors;
  if (!(std::abs(v(n, n)) > kZeroDirection)) {
    throw Error(ErrorCode::NoSolutionDirection,
                "last right singular vector of [A, b] has zero last entry; "
                "the TLS solution is undefined");
  }
  if (v(n, n) > 0.0) {
    v.col(n) = -v.col(n);
    sd.svd_augmented.left_vectors.col(n) = -sd.svd_augmented.left_vectors.col(n);
  }
  sd.v_last = v.col(n);
  sd.alpha = -v(n, n);
  sd.beta = v.row(n).head(n).transpose();
  sd.v11 = v.topLeftCorner(n, n);
  return sd;
}

double check_genericity(const SpectralData& sd, double tol_gap) {
  const double scale = sd.sigma_1();
  const double sigma_hat_n = sd.sigma_hat_n();
  if (!(sigma_hat_n > tol_gap * scale)) {
    throw Error(ErrorCode::RankDeficient,
                "A is numerically rank deficient (sigma_hat_n = " +
                    format_short(sigma_hat_n) + ")");
  }
  const double gap = sigma_hat_n - sd.sigma_np1();
  if (!(gap > tol_gap * scale)) {
    throw Error(ErrorCode::NonGeneric,
                "sigma_hat_n - sigma_{n+1} = " + format_short(gap) +
                    " is below tolerance; the TLS solution is not unique");
  }
  if (!(sd.norm_x() > tol_gap)) {
    throw Error(ErrorCode::DegenerateSolution,
                "x_TLS vanishes (A^T b = 0); b is orthogonal to the range of A");
  }
  return gap;
}

TlsSolution solve_tls(const TlsProblem& problem, const SpectralData& sd, double tol_gap) {
  const double gap = check_genericity(sd, tol_gap);
  const Index n = problem.cols();
  TlsSolution sol;
  sol.x = -sd.v_last.head(n) / sd.v_last(n);
  sol.residual = problem.a() * sol.x - problem.b();
  sol.sigma_np1 = sd.sigma_np1();
  sol.alpha = sd.alpha;
  sol.gap = gap;
  sol.consistent = !(sol.sigma_np1 > tol_gap * sd.sigma_1());
  return sol;
}

TlsSolution solve_tls(const TlsProblem& problem, double tol_gap) {
  return solve_tls(problem, spectral_data(problem), tol_gap);
}

DenseVector solve_tls_normal_equations(const TlsProblem& problem, double sigma_np1) {
  DenseMatrix p = problem.a().transpose() * problem.a();
  p.diagonal().array() -= sigma_np1 * sigma_np1;
  const DenseVector rhs = problem.a().transpose() * problem.b();
  return solve_square(p, rhs);
}

}  // namespace tlscond
