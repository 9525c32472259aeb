#include "tlscond/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tlscond/error.hpp"

namespace tlscond {
namespace {

constexpr double kAlphaNearOne = 1e-14;
constexpr double kOrthogonalityTol = 1e-10;

double diff_of_squares(double s, double t) { return (s - t) * (s + t); }

// sqrt(s^2 + t^2) / (s^2 - t^2), the building block of most bounds.
double s_ratio(double s, double t) { return std::hypot(s, t) / diff_of_squares(s, t); }

void require_generic(double upper, double sigma_np1, const char* name) {
  if (!(upper > sigma_np1)) {
    throw Error(ErrorCode::NonGeneric,
                std::string(name) + " must exceed sigma_{n+1}");
  }
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::InvalidInput, "alpha must lie in (0, 1]");
  }
}

// Shared shape of the last-row and W-sandwich bounds:
//   lower = (a * sqrt(sum beta_i^2 s_i^2) / q + sqrt(q^2 - beta_n^2) / q * b * s_n) / 2
//   upper =  a * sqrt(sum beta_i^2 s_i^2) / q + b * s_n
// with q = sqrt(1 - alpha^2).
BoundPair row_sandwich(std::span<const double> s, std::span<const double> beta, double alpha,
                       double lead, double tail) {
  const double q2 = (1.0 - alpha) * (1.0 + alpha);
  if (!(alpha < 1.0 - kAlphaNearOne) || !(q2 > 0.0)) {
    throw Error(ErrorCode::AlphaNearOne, "alpha is too close to one for the last-row bounds");
  }
  const double q = std::sqrt(q2);
  const std::size_t n = s.size();
  double weighted = 0.0;
  for (std::size_t i = 0; i < n; ++i) weighted += beta[i] * beta[i] * s[i] * s[i];
  const double rank_one = lead * std::sqrt(weighted) / q;
  // 1 - alpha^2 - beta_n^2 summed from the other last-row entries; the direct
  // difference cancels when beta_n carries almost all of the row.
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) head += beta[i] * beta[i];
  const double rest = std::sqrt(head) / q;
  return {0.5 * (rank_one + rest * tail * s[n - 1]), rank_one + tail * s[n - 1]};
}

}  // namespace

std::string_view to_string(BoundStatus status) noexcept {
  switch (status) {
    case BoundStatus::applicable: return "applicable";
    case BoundStatus::not_applicable: return "not_applicable";
    case BoundStatus::not_available: return "not_available";
  }
  return "unknown";
}

BoundPair alpha_bounds(double sigma_n, double sigma_np1, double alpha) {
  require_generic(sigma_n, sigma_np1, "sigma_n");
  require_alpha(alpha);
  const double lower = s_ratio(sigma_n, sigma_np1) / alpha;
  return {lower, lower / alpha};
}

BoundPair last_row_bounds(std::span<const double> sigmas, std::span<const double> beta,
                          double alpha) {
  if (sigmas.size() < 2 || beta.size() + 1 != sigmas.size()) {
    throw Error(ErrorCode::InvalidInput,
                "last_row_bounds needs n+1 singular values and n beta entries");
  }
  require_alpha(alpha);
  const std::size_t n = beta.size();
  const double t = sigmas[n];
  require_generic(sigmas[n - 1], t, "sigma_n");
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = s_ratio(sigmas[i], t);
  return row_sandwich(s, beta, alpha, 1.0 / (alpha * alpha), 1.0 / alpha);
}

Kappa1Bounds kappa1_bounds(std::optional<double> sigma_hat_nm1, double sigma_hat_n,
                           double sigma_np1, double alpha) {
  require_generic(sigma_hat_n, sigma_np1, "sigma_hat_n");
  require_alpha(alpha);
  Kappa1Bounds out;
  out.upper = s_ratio(sigma_hat_n, sigma_np1) / alpha;
  if (sigma_hat_nm1) {
    require_generic(*sigma_hat_nm1, sigma_np1, "sigma_hat_{n-1}");
    out.lower = s_ratio(*sigma_hat_nm1, sigma_np1) / alpha;
  }
  return out;
}

double kappa2_lower(double sigma_hat_n, double sigma_np1, double alpha) {
  require_generic(sigma_hat_n, sigma_np1, "sigma_hat_n");
  require_alpha(alpha);
  return 1.0 / (alpha * std::sqrt(diff_of_squares(sigma_hat_n, sigma_np1)));
}

double kappa2_upper(double sigma_hat_n, double sigma_n, double sigma_np1, double alpha) {
  require_generic(sigma_n, sigma_np1, "sigma_n");
  if (!(alpha <= 0.5)) {
    throw Error(ErrorCode::NotApplicable, "kappa2 upper bound requires alpha <= 1/2");
  }
  const double lower = kappa2_lower(sigma_hat_n, sigma_np1, alpha);
  const double rho = sigma_np1 / sigma_n;
  const double rho2 = rho * rho;
  return std::sqrt((1.0 + 31.0 * rho2) / ((1.0 - rho) * (1.0 + rho))) * lower;
}

double gvl_rel_bound(double sigma_1, double sigma_n, double sigma_np1, double sigma_hat_n,
                     double norm_b, double frob_ab) {
  require_generic(sigma_n, sigma_np1, "sigma_n");
  require_generic(sigma_hat_n, sigma_np1, "sigma_hat_n");
  if (!(norm_b > sigma_np1)) {
    throw Error(ErrorCode::NotApplicable, "Golub-Van Loan bound requires ||b|| > sigma_{n+1}");
  }
  return 9.0 * sigma_1 / (sigma_n - sigma_np1) *
         (1.0 + norm_b / (sigma_hat_n - sigma_np1)) * frob_ab / (norm_b - sigma_np1);
}

BgUpper bg_upper(double sigma_1, double sigma_np1, double sigma_hat_n, double alpha,
                 double frob_ab, double norm_x) {
  require_generic(sigma_hat_n, sigma_np1, "sigma_hat_n");
  require_alpha(alpha);
  if (!(norm_x > 0.0)) {
    throw Error(ErrorCode::DegenerateSolution, "relative bound undefined for x_TLS = 0");
  }
  const double core = std::hypot(sigma_1, sigma_np1) / diff_of_squares(sigma_hat_n, sigma_np1);
  const double abs = core / alpha;
  const double rel = std::sqrt(1.0 + norm_x * norm_x) / norm_x * core * frob_ab;
  return {abs, rel};
}

BoundPair sandwich_bounds(const DenseMatrix& w, std::span<const double> sbar) {
  require_finite(w, "W");
  const Index np1 = w.rows();
  if (w.cols() != np1 || np1 < 2) {
    throw Error(ErrorCode::InvalidInput, "W must be square of order >= 2");
  }
  const auto n = static_cast<std::size_t>(np1 - 1);
  if (sbar.size() != n) {
    throw Error(ErrorCode::InvalidInput, "sbar must have n entries");
  }
  const double defect =
      (w.transpose() * w - DenseMatrix::Identity(np1, np1)).lpNorm<Eigen::Infinity>();
  if (!(defect <= kOrthogonalityTol)) {
    throw Error(ErrorCode::InvalidInput, "W is not orthogonal (defect " +
                                             format_short(defect) + ")");
  }
  const double alpha = -w(np1 - 1, np1 - 1);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidInput, "W(n+1, n+1) must equal -alpha with alpha in (0, 1)");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(sbar[i] > 0.0) || (i > 0 && sbar[i] < sbar[i - 1])) {
      throw Error(ErrorCode::InvalidInput, "sbar must be positive and nondecreasing");
    }
  }
  std::vector<double> beta(n);
  for (std::size_t i = 0; i < n; ++i) beta[i] = w(np1 - 1, static_cast<Index>(i));
  return row_sandwich(sbar, beta, alpha, 1.0 / alpha, 1.0);
}

BoundSet bound_report(const SpectralData& sd, const TlsSolution& sol) {
  const Index n = sd.n();
  const double alpha = sd.alpha;
  const double s1 = sd.sigma_1();
  const double sn = sd.sigma_n();
  const double t = sd.sigma_np1();
  const double hat_n = sd.sigma_hat_n();
  const double frob = sd.frobenius_augmented();
  const double norm_x = sol.x.norm();

  BoundSet set;
  set.rho = t / sn;

  const BoundPair ab = alpha_bounds(sn, t, alpha);
  set.alpha_lower = BoundValue::of(ab.lower);
  set.alpha_upper = BoundValue::of(ab.upper);

  const DenseVector& sig = sd.svd_augmented.singular_values;
  try {
    const BoundPair lr = last_row_bounds(std::span(sig.data(), static_cast<std::size_t>(n + 1)),
                                         std::span(sd.beta.data(), static_cast<std::size_t>(n)),
                                         alpha);
    set.last_row_lower = BoundValue::of(lr.lower);
    set.last_row_upper = BoundValue::of(lr.upper);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AlphaNearOne) throw;
    set.last_row_lower = BoundValue::missing(BoundStatus::not_applicable);
    set.last_row_upper = BoundValue::missing(BoundStatus::not_applicable);
  }

  std::optional<double> hat_nm1;
  if (n >= 2) hat_nm1 = sd.svd_a.singular_values(n - 2);
  const Kappa1Bounds k1 = kappa1_bounds(hat_nm1, hat_n, t, alpha);
  set.kappa1_lower = k1.lower ? BoundValue::of(*k1.lower)
                              : BoundValue::missing(BoundStatus::not_available);
  set.kappa1_upper = BoundValue::of(k1.upper);

  set.kappa2_lower = BoundValue::of(kappa2_lower(hat_n, t, alpha));
  set.kappa2_upper = alpha <= 0.5 ? BoundValue::of(kappa2_upper(hat_n, sn, t, alpha))
                                  : BoundValue::missing(BoundStatus::not_applicable);

  const BgUpper bg = bg_upper(s1, t, hat_n, alpha, frob, norm_x);
  set.bg_upper_abs = BoundValue::of(bg.abs);
  set.bg_upper_rel = BoundValue::of(bg.rel);

  const double norm_b = sd.norm_b();
  set.gvl_upper_rel = norm_b > t
                          ? BoundValue::of(gvl_rel_bound(s1, sn, t, hat_n, norm_b, frob))
                          : BoundValue::missing(BoundStatus::not_applicable);
  return set;
}

}  // namespace tlscond
