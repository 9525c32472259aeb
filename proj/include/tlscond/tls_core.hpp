#pragma once

#include "tlscond/kernel.hpp"

namespace tlscond {

/// Relative gap threshold used when no tolerance is given: genericity
/// margins below 1e-12 * sigma_1([A, b]) are treated as zero.
inline constexpr double kDefaultTolGap = 1e-12;

/// Dense TLS problem A x ~ b with A of size m x n, m > n >= 1.
class TlsProblem {
 public:
  /// Throws Error(InvalidInput) on shape mismatch, m <= n, or non-finite data.
  TlsProblem(DenseMatrix a, DenseVector b);

  const DenseMatrix& a() const noexcept { return a_; }
  const DenseVector& b() const noexcept { return b_; }
  Index rows() const noexcept { return a_.rows(); }
  Index cols() const noexcept { return a_.cols(); }

  /// The m x (n+1) matrix [A, b].
  DenseMatrix augmented() const;

 private:
  DenseMatrix a_;
  DenseVector b_;
};

/// Everything the condition-number formulas consume, extracted from the thin
/// SVDs of [A, b] and A.
///
/// The last right singular vector of [A, b] is sign-normalized so that its
/// last entry is negative; alpha, beta and v11 are read from that same
/// normalized V.
struct SpectralData {
  ThinSvd svd_augmented;  // sigma_1 >= ... >= sigma_{n+1}
  ThinSvd svd_a;          // sigma_hat_1 >= ... >= sigma_hat_n
  DenseVector v_last;     // V(:, n+1), last entry < 0
  double alpha = 0.0;     // -V(n+1, n+1)
  DenseVector beta;       // V(n+1, 1:n)
  DenseMatrix v11;        // V(1:n, 1:n)

  Index n() const noexcept { return v11.rows(); }
  double sigma(Index i) const { return svd_augmented.singular_values(i); }
  double sigma_1() const { return sigma(0); }
  double sigma_n() const { return sigma(n() - 1); }
  double sigma_np1() const { return sigma(n()); }
  double sigma_hat_n() const { return svd_a.singular_values(n() - 1); }

  /// ||[A, b]||_F, from the singular values.
  double frobenius_augmented() const;
  /// ||b||, recovered as ||diag(sigma) V(n+1, :)^T||.
  double norm_b() const;
  /// ||x_TLS|| = sqrt(1 - alpha^2) / alpha.
  double norm_x() const;
};

struct TlsSolution {
  DenseVector x;         // x_TLS
  DenseVector residual;  // r = A x_TLS - b
  double sigma_np1 = 0.0;
  double alpha = 0.0;
  double gap = 0.0;         // sigma_hat_n - sigma_{n+1}
  bool consistent = false;  // sigma_{n+1} within tolerance of zero
};

/// Throws Error(NoSolutionDirection) when the last entry of the last right
/// singular vector vanishes (|v| <= 1e-14).
SpectralData spectral_data(const TlsProblem& problem);

/// Returns the genericity gap sigma_hat_n - sigma_{n+1}.
///
/// Checks, in order: A has numerical rank n (RankDeficient), the gap exceeds
/// tol_gap * sigma_1 (NonGeneric), and ||x_TLS|| > tol_gap
/// (DegenerateSolution, i.e. A^T b = 0).
double check_genericity(const SpectralData& sd, double tol_gap = kDefaultTolGap);

/// x_TLS from the last right singular vector of [A, b].
TlsSolution solve_tls(const TlsProblem& problem, const SpectralData& sd,
                      double tol_gap = kDefaultTolGap);
TlsSolution solve_tls(const TlsProblem& problem, double tol_gap = kDefaultTolGap);

/// x_TLS = (A^T A - sigma_{n+1}^2 I)^{-1} A^T b. Independent of the singular
/// vectors; used to cross-check solve_tls. Accuracy degrades with
/// 1 / (sigma_hat_n^2 - sigma_{n+1}^2).
DenseVector solve_tls_normal_equations(const TlsProblem& problem, double sigma_np1);

}  // namespace tlscond
