#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string_view>

#include "tlscond/tls_core.hpp"

namespace tlscond {

// Cheap lower/upper bounds on the absolute TLS condition number kappa.
//
// Every scalar routine takes raw singular values so that values obtained
// elsewhere (e.g. from a partial SVD) can be plugged in directly. Notation:
// sigma_i are the singular values of [A, b], sigma_hat_i those of A, alpha is
// -V(n+1, n+1) of the sign-normalized V of [A, b], and beta is the rest of
// V's last row.

enum class BoundStatus { applicable, not_applicable, not_available };

std::string_view to_string(BoundStatus status) noexcept;

struct BoundValue {
  double value = std::numeric_limits<double>::quiet_NaN();
  BoundStatus status = BoundStatus::not_available;

  bool applicable() const noexcept { return status == BoundStatus::applicable; }

  static BoundValue of(double v) noexcept { return {v, BoundStatus::applicable}; }
  static BoundValue missing(BoundStatus s) noexcept {
    return {std::numeric_limits<double>::quiet_NaN(), s};
  }
};

struct BoundPair {
  double lower = 0.0;
  double upper = 0.0;
};

/// s_n / alpha <= kappa <= s_n / alpha^2 with
/// s_n = sqrt(sigma_n^2 + sigma_{n+1}^2) / (sigma_n^2 - sigma_{n+1}^2).
/// The ratio upper/lower is exactly 1/alpha.
BoundPair alpha_bounds(double sigma_n, double sigma_np1, double alpha);

/// Bounds from all singular values of [A, b] and the last row of V.
/// `sigmas` holds sigma_1..sigma_{n+1}; `beta` holds beta_1..beta_n.
/// When alpha <= 1/2 the upper bound is below four times the lower one.
/// Throws AlphaNearOne when 1 - alpha^2 underflows the formula.
BoundPair last_row_bounds(std::span<const double> sigmas, std::span<const double> beta,
                          double alpha);

struct Kappa1Bounds {
  std::optional<double> lower;  // needs sigma_hat_{n-1}, absent for n = 1
  double upper = 0.0;
};

/// kappa_1 lower/upper from the smallest two singular values of A:
/// alpha^{-1} sqrt(s^2 + sigma_{n+1}^2) / (s^2 - sigma_{n+1}^2) evaluated at
/// s = sigma_hat_{n-1} (lower) and s = sigma_hat_n (upper).
Kappa1Bounds kappa1_bounds(std::optional<double> sigma_hat_nm1, double sigma_hat_n,
                           double sigma_np1, double alpha);

/// 1 / (alpha sqrt(sigma_hat_n^2 - sigma_{n+1}^2)).
double kappa2_lower(double sigma_hat_n, double sigma_np1, double alpha);

/// sqrt((1 + 31 rho^2) / (1 - rho^2)) * kappa2_lower, rho = sigma_{n+1} / sigma_n.
/// Only valid for alpha <= 1/2; throws NotApplicable otherwise.
double kappa2_upper(double sigma_hat_n, double sigma_n, double sigma_np1, double alpha);

/// Golub-Van Loan upper bound on the relative condition number. Throws
/// NotApplicable when ||b|| <= sigma_{n+1}.
double gvl_rel_bound(double sigma_1, double sigma_n, double sigma_np1, double sigma_hat_n,
                     double norm_b, double frob_ab);

struct BgUpper {
  double abs = 0.0;
  double rel = 0.0;
};

/// Baboulin-Gratton upper bounds (absolute and relative).
BgUpper bg_upper(double sigma_1, double sigma_np1, double sigma_hat_n, double alpha,
                 double frob_ab, double norm_x);

/// Bounds on ||W11^{-T} diag(sbar)|| for an orthogonal (n+1) x (n+1) W with
/// W(n+1, n+1) = -alpha in (0, 1) and 0 < sbar_1 <= ... <= sbar_n.
BoundPair sandwich_bounds(const DenseMatrix& w, std::span<const double> sbar);

/// Every bound evaluated for one problem. Fields whose preconditions fail
/// carry status not_applicable (hypothesis violated) or not_available
/// (ingredient missing, e.g. sigma_hat_{n-1} when n = 1).
struct BoundSet {
  BoundValue alpha_lower, alpha_upper;
  BoundValue last_row_lower, last_row_upper;
  BoundValue kappa1_lower, kappa1_upper;
  BoundValue kappa2_lower, kappa2_upper;
  BoundValue bg_upper_abs, bg_upper_rel;
  BoundValue gvl_upper_rel;
  double rho = 0.0;  // sigma_{n+1} / sigma_n
};

BoundSet bound_report(const SpectralData& sd, const TlsSolution& sol);

}  // namespace tlscond
