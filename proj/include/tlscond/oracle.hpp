#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tlscond/tls_core.hpp"

namespace tlscond {

// Model-independent checks of the analytic Jacobian: finite differences of
// the data -> x_TLS map, and the order of the first-order remainder.

enum class FdScheme { forward, central };

struct FdConfig {
  /// Perturbation size; defaults to sqrt(machine epsilon) * ||[A, b]||_F.
  std::optional<double> step;
  FdScheme scheme = FdScheme::central;
  /// Upper bound on m * (n + 1), the number of Jacobian columns.
  std::size_t max_columns = 5000;
  double tol_gap = kDefaultTolGap;
};

/// Perturbs [vec(A); b] by `delta` (length m(n+1), column-major A first).
TlsProblem perturbed(const TlsProblem& problem, const DenseVector& delta);

/// Finite-difference Jacobian of x_TLS with respect to [vec(A); b]
/// (n x m(n+1)). Throws NonGenericUnderPerturbation if a perturbed problem
/// loses genericity and TooLarge above the column cap.
DenseMatrix fd_jacobian(const TlsProblem& problem, const FdConfig& cfg = {});

/// ||fd_jacobian||_2.
double kappa_fd(const TlsProblem& problem, const FdConfig& cfg = {});

struct ExpansionFit {
  double slope = 0.0;
  std::vector<double> epsilons;    // points kept in the fit
  std::vector<double> remainders;  // matching ||x(eps d) - x - eps K d||
  std::size_t dropped = 0;         // points at or below the noise floor
};

/// Fits log(remainder) against log(eps) by least squares, where
/// remainder(eps) = ||x_TLS(data + eps d) - x_TLS - eps K d||. A correct K
/// gives slope ~2. Remainders below the rounding floor
/// 10 eps_mach (max(1, ||x||) + ||K||_F ||[A, b]||_F) are dropped; fewer
/// than three usable points throws InsufficientData.
ExpansionFit expansion_order_check(const TlsProblem& problem, const DenseMatrix& k,
                                   const DenseVector& direction,
                                   std::span<const double> epsilons,
                                   double tol_gap = kDefaultTolGap);

/// Six step sizes from 1e-1 * gap down to 3e-4 * gap, half a decade apart,
/// small enough that the perturbed problems stay generic.
std::vector<double> default_epsilons(double gap);

}  // namespace tlscond
