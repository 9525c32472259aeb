#include "tlscond/kernel.hpp"

#include <string>

#include "tlscond/error.hpp"

namespace tlscond {
namespace {

constexpr double kSingularRcond = 1e-14;

}  // namespace

void require_finite(const DenseMatrix& m, std::string_view what) {
  if (m.size() == 0) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + " is empty");
  }
  if (!m.allFinite()) {
    throw Error(ErrorCode::InvalidInput,
                std::string(what) + " contains non-finite entries");
  }
}

ThinSvd thin_svd(const DenseMatrix& m) {
  require_finite(m, "svd input");
  if (m.rows() < m.cols()) {
    throw Error(ErrorCode::InvalidInput,
                "thin_svd requires rows >= cols, got " +
                    std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  // BDCSVD falls back to one-sided Jacobi below 16 columns.
  Eigen::BDCSVD<DenseMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return ThinSvd{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

DenseVector singular_values(const DenseMatrix& m) {
  require_finite(m, "svd input");
  if (m.rows() < m.cols()) {
    return Eigen::BDCSVD<DenseMatrix>(m.transpose()).singularValues();
  }
  return Eigen::BDCSVD<DenseMatrix>(m).singularValues();
}

double spectral_norm(const DenseMatrix& m) { return singular_values(m)(0); }

DenseMatrix solve_square(const DenseMatrix& m, const DenseMatrix& rhs) {
  require_finite(m, "system matrix");
  require_finite(rhs, "right-hand side");
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::InvalidInput, "solve_square requires a square matrix");
  }
  if (rhs.rows() != m.rows()) {
    throw Error(ErrorCode::InvalidInput,
                "solve_square: right-hand side row count mismatch");
  }
  Eigen::PartialPivLU<DenseMatrix> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > kSingularRcond)) {
    throw Error(ErrorCode::SingularSystem,
                "matrix is singular to working precision (rcond estimate " +
                    format_short(rcond) + ")");
  }
  return lu.solve(rhs);
}

}  // namespace tlscond
