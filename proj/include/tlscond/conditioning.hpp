#pragma once

#include <cstddef>
#include <string_view>

#include "tlscond/tls_core.hpp"

namespace tlscond {

/// Default cap on the number of entries of the explicit Kronecker Jacobian.
inline constexpr std::size_t kDefaultKSizeCap = 4'000'000;

/// kappa(V11) = sqrt(1 + ||x||^2) above which the V11 solve is flagged.
inline constexpr double kV11ConditionWarning = 1e8;

enum class KappaRoute { closed, kronecker, baboulin_gratton };

std::string_view to_string(KappaRoute route) noexcept;

struct ConditionReport {
  double kappa_abs = 0.0;
  double kappa_rel = 0.0;
  KappaRoute route = KappaRoute::closed;
  double scale_factor = 0.0;  // ||[A, b]||_F / ||x_TLS||
  double v11_condition = 0.0;
  bool v11_ill_conditioned = false;
};

/// Absolute condition number sqrt(1 + ||x||^2) * ||V11^{-T} S|| with
/// S = diag(sqrt(sigma_i^2 + sigma_{n+1}^2) / (sigma_i^2 - sigma_{n+1}^2)).
/// Uses only the SVD of [A, b].
double kappa_closed(const SpectralData& sd);

/// The n x (mn + m) Jacobian of x_TLS with respect to [vec(A); b], with every
/// Kronecker product materialized. Throws TooLarge above `size_cap` entries and
/// ConsistentSystem when r = 0.
DenseMatrix build_k(const TlsProblem& problem, const TlsSolution& sol,
                    std::size_t size_cap = kDefaultKSizeCap);

/// ||K||_2.
double kappa_kronecker(const TlsProblem& problem, const TlsSolution& sol,
                       std::size_t size_cap = kDefaultKSizeCap);

/// Closed formula built from the SVDs of both A and [A, b]:
/// sqrt(1 + ||x||^2) * ||D_hat V_hat^T V11 D||, where
/// D_hat = diag(1 / (sigma_hat_i^2 - sigma_{n+1}^2)) and
/// D = diag(sqrt(sigma_i^2 + sigma_{n+1}^2)).
double kappa_bg_closed(const SpectralData& sd);

/// kappa_abs * ||[A, b]||_F / ||x_TLS||.
double kappa_relative(double kappa_abs, const TlsProblem& problem, const TlsSolution& sol);

ConditionReport condition_report(const TlsProblem& problem, const SpectralData& sd,
                                 const TlsSolution& sol,
                                 KappaRoute route = KappaRoute::closed,
                                 std::size_t size_cap = kDefaultKSizeCap);

}  // namespace tlscond
