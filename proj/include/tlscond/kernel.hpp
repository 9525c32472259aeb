#pragma once

#include <Eigen/Dense>
#include <string_view>

namespace tlscond {

using DenseMatrix = Eigen::MatrixXd;
using DenseVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Thin singular value decomposition M = U diag(s) V^T of an m x p matrix
/// with m >= p. Columns of U (m x p) and V (p x p) are orthonormal and the
/// singular values are sorted nonincreasing. Column signs are whatever the
/// factorization produced; callers that need a sign convention fix it
/// themselves.
struct ThinSvd {
  DenseMatrix left_vectors;
  DenseVector singular_values;
  DenseMatrix right_vectors;
};

/// Throws Error(InvalidInput) if any entry of `m` is NaN or infinite, or if
/// `m` is empty.
void require_finite(const DenseMatrix& m, std::string_view what);

ThinSvd thin_svd(const DenseMatrix& m);

/// Singular values only, nonincreasing. Accepts any shape.
DenseVector singular_values(const DenseMatrix& m);

/// Largest singular value (operator 2-norm). Accepts any shape.
double spectral_norm(const DenseMatrix& m);

/// Solves M X = RHS with partial-pivoting LU. Throws Error(SingularSystem)
/// when the reciprocal condition estimate of M falls below 1e-14.
DenseMatrix solve_square(const DenseMatrix& m, const DenseMatrix& rhs);

}  // namespace tlscond
