#include "tlscond/generators.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

#include "tlscond/error.hpp"

namespace tlscond {
namespace {

DenseMatrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseMatrix out(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = normal(rng);
  return out;
}

DenseVector random_unit_vector(Index n, std::mt19937_64& rng) {
  DenseVector v = gaussian_matrix(n, 1, rng).col(0);
  return v / v.norm();
}

TlsProblem split_augmented(const DenseMatrix& c) {
  const Index n = c.cols() - 1;
  return TlsProblem(c.leftCols(n), c.col(n));
}

// Lower banded Toeplitz matrix with `band` as the nonzero part of each column.
DenseMatrix banded_toeplitz(Index m, Index n, const DenseVector& band) {
  DenseMatrix t = DenseMatrix::Zero(m, n);
  for (Index j = 0; j < n; ++j) {
    const Index len = std::min<Index>(band.size(), m - j);
    t.block(j, j, len, 1) = band.head(len);
  }
  return t;
}

void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidInput, msg); }

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    invalid("generator config: bad value '" + text + "' for key '" + key + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view to_string(GeneratorKind kind) noexcept {
  switch (kind) {
    case GeneratorKind::bg_example: return "bg_example";
    case GeneratorKind::vanhuffel: return "vanhuffel";
    case GeneratorKind::toeplitz_blur: return "toeplitz_blur";
    case GeneratorKind::controlled_alpha: return "controlled_alpha";
    case GeneratorKind::gaussian: return "gaussian";
  }
  return "unknown";
}

GeneratorKind generator_kind_from_string(std::string_view name) {
  for (auto kind : {GeneratorKind::bg_example, GeneratorKind::vanhuffel,
                    GeneratorKind::toeplitz_blur, GeneratorKind::controlled_alpha,
                    GeneratorKind::gaussian}) {
    if (to_string(kind) == name) return kind;
  }
  invalid("unknown generator kind '" + std::string(name) + "'");
  return GeneratorKind::gaussian;
}

Index GeneratorSpec::effective_n() const {
  switch (kind) {
    case GeneratorKind::vanhuffel: return m - 2;
    case GeneratorKind::toeplitz_blur: return m - 2 * static_cast<Index>(omega);
    default: return n;
  }
}

void GeneratorSpec::validate() const {
  switch (kind) {
    case GeneratorKind::vanhuffel:
      if (m < 4) invalid("vanhuffel needs m >= 4");
      return;
    case GeneratorKind::toeplitz_blur:
      if (omega < 1) invalid("toeplitz_blur needs omega >= 1");
      if (m <= 2 * static_cast<Index>(omega) + 1) invalid("toeplitz_blur needs m > 2*omega + 1");
      if (!(beta_blur > 0.0)) invalid("toeplitz_blur needs beta_blur > 0");
      if (!(gamma >= 0.0)) invalid("toeplitz_blur needs gamma >= 0");
      return;
    case GeneratorKind::bg_example:
      if (!(e_p > 0.0 && e_p < 1.0)) invalid("bg_example needs 0 < e_p < 1");
      break;
    case GeneratorKind::controlled_alpha:
      if (!(alpha > 0.0 && alpha < 1.0)) invalid("controlled_alpha needs 0 < alpha < 1");
      break;
    case GeneratorKind::gaussian:
      break;
  }
  if (n < 1 || m <= n) invalid("generator needs m > n >= 1");
}

std::map<std::string, std::string> GeneratorSpec::to_config() const {
  std::map<std::string, std::string> out;
  out["kind"] = std::string(to_string(kind));
  out["m"] = std::to_string(m);
  switch (kind) {
    case GeneratorKind::vanhuffel:
      return out;
    case GeneratorKind::toeplitz_blur:
      out["omega"] = std::to_string(omega);
      out["beta_blur"] = format_double(beta_blur);
      out["gamma"] = format_double(gamma);
      break;
    case GeneratorKind::bg_example:
      out["n"] = std::to_string(n);
      out["e_p"] = format_double(e_p);
      break;
    case GeneratorKind::controlled_alpha:
      out["n"] = std::to_string(n);
      out["alpha"] = format_double(alpha);
      break;
    case GeneratorKind::gaussian:
      out["n"] = std::to_string(n);
      break;
  }
  out["seed"] = std::to_string(seed);
  return out;
}

GeneratorSpec GeneratorSpec::from_config(const std::map<std::string, std::string>& config) {
  GeneratorSpec spec;
  const auto kind_it = config.find("kind");
  if (kind_it == config.end()) invalid("generator config: missing 'kind'");
  spec.kind = generator_kind_from_string(kind_it->second);
  for (const auto& [key, value] : config) {
    if (key == "kind") continue;
    if (key == "m") spec.m = parse_number<Index>(key, value);
    else if (key == "n") spec.n = parse_number<Index>(key, value);
    else if (key == "e_p") spec.e_p = parse_number<double>(key, value);
    else if (key == "alpha") spec.alpha = parse_number<double>(key, value);
    else if (key == "omega") spec.omega = parse_number<int>(key, value);
    else if (key == "beta_blur") spec.beta_blur = parse_number<double>(key, value);
    else if (key == "gamma") spec.gamma = parse_number<double>(key, value);
    else if (key == "seed") spec.seed = parse_number<std::uint64_t>(key, value);
    else invalid("generator config: unknown key '" + key + "'");
  }
  spec.n = spec.effective_n();
  spec.validate();
  return spec;
}

TlsProblem generate(const GeneratorSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case GeneratorKind::bg_example: return gen_bg_example(spec.m, spec.n, spec.e_p, spec.seed);
    case GeneratorKind::vanhuffel: return gen_vanhuffel(spec.m);
    case GeneratorKind::toeplitz_blur:
      return gen_toeplitz_blur(spec.m, spec.omega, spec.beta_blur, spec.gamma, spec.seed);
    case GeneratorKind::controlled_alpha:
      return gen_controlled_alpha(spec.m, spec.n, spec.alpha, spec.seed);
    case GeneratorKind::gaussian: return gen_gaussian(spec.m, spec.n, spec.seed);
  }
  invalid("unknown generator kind");
  return gen_vanhuffel(4);
}

TlsProblem gen_bg_example(Index m, Index n, double e_p, std::uint64_t seed) {
  GeneratorSpec{GeneratorKind::bg_example, m, n, e_p}.validate();
  std::mt19937_64 rng(seed);
  const DenseVector y = random_unit_vector(m, rng);
  const DenseVector z = random_unit_vector(n + 1, rng);

  DenseVector sigma(n + 1);
  for (Index i = 0; i < n; ++i) sigma(i) = static_cast<double>(n - i);
  sigma(n) = 1.0 - e_p;

  // Q [Sigma; O] V^T with Q = I - 2yy^T, V = I - 2zz^T, applied without
  // forming Q or V.
  DenseMatrix c = DenseMatrix::Zero(m, n + 1);
  c.topRows(n + 1) = sigma.asDiagonal();
  c -= 2.0 * (c * z) * z.transpose();
  c -= 2.0 * y * (y.transpose() * c);
  return split_augmented(c);
}

TlsProblem gen_vanhuffel(Index m) {
  GeneratorSpec{GeneratorKind::vanhuffel, m}.validate();
  const Index n = m - 2;
  DenseMatrix a = DenseMatrix::Constant(m, n, -1.0);
  a.topRows(n).diagonal().setConstant(static_cast<double>(m - 1));
  DenseVector b = DenseVector::Constant(m, -1.0);
  b(m - 2) = static_cast<double>(m - 1);
  return TlsProblem(std::move(a), std::move(b));
}

DenseVector blur_kernel(int omega, double beta_blur) {
  const Index len = 2 * static_cast<Index>(omega) + 1;
  DenseVector t(len);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * beta_blur * beta_blur);
  for (Index i = 0; i < len; ++i) {
    const double d = static_cast<double>(omega - i);  // omega - (i+1) + 1
    t(i) = norm * std::exp(-d * d / (2.0 * beta_blur * beta_blur));
  }
  return t;
}

TlsProblem gen_toeplitz_blur(Index m, int omega, double beta_blur, double gamma,
                             std::uint64_t seed) {
  GeneratorSpec spec{GeneratorKind::toeplitz_blur, m};
  spec.omega = omega;
  spec.beta_blur = beta_blur;
  spec.gamma = gamma;
  spec.validate();

  const Index n = spec.effective_n();
  const DenseVector kernel = blur_kernel(omega, beta_blur);
  DenseMatrix a = banded_toeplitz(m, n, kernel);
  DenseVector b = DenseVector::Ones(m);

  std::mt19937_64 rng(seed);
  const DenseVector noise_band = gaussian_matrix(kernel.size(), 1, rng).col(0);
  const DenseVector e = gaussian_matrix(m, 1, rng).col(0);
  if (gamma > 0.0) {
    const DenseMatrix noise = banded_toeplitz(m, n, noise_band);
    a += (gamma * spectral_norm(a) / spectral_norm(noise)) * noise;
    b += (gamma * std::sqrt(static_cast<double>(m)) / e.norm()) * e;
  }
  return TlsProblem(std::move(a), std::move(b));
}

DenseMatrix random_orthogonal(Index n, std::mt19937_64& rng) {
  const DenseMatrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  DenseMatrix q = qr.householderQ();
  const DenseMatrix& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

DenseMatrix build_alpha_orthogonal(Index n, double alpha, std::uint64_t seed) {
  if (n < 1) invalid("build_alpha_orthogonal needs n >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) invalid("build_alpha_orthogonal needs 0 < alpha < 1");
  std::mt19937_64 rng(seed);
  const DenseMatrix ubar = random_orthogonal(n, rng);
  const DenseMatrix vbar = random_orthogonal(n, rng);
  const DenseVector u = ubar.col(n - 1);
  const DenseVector v = vbar.col(n - 1);
  const double t = std::sqrt((1.0 - alpha) * (1.0 + alpha));

  DenseMatrix out(n + 1, n + 1);
  out.topLeftCorner(n, n) =
      ubar.leftCols(n - 1) * vbar.leftCols(n - 1).transpose() + alpha * u * v.transpose();
  out.topRightCorner(n, 1) = t * u;
  out.bottomLeftCorner(1, n) = t * v.transpose();
  out(n, n) = -alpha;
  return out;
}

TlsProblem gen_controlled_alpha(Index m, Index n, double alpha, std::uint64_t seed) {
  GeneratorSpec spec{GeneratorKind::controlled_alpha, m, n};
  spec.alpha = alpha;
  spec.validate();
  std::mt19937_64 rng(seed);
  const ThinSvd base = thin_svd(gaussian_matrix(m, n + 1, rng));
  const DenseMatrix v = build_alpha_orthogonal(n, alpha, rng());
  const DenseMatrix c =
      base.left_vectors * base.singular_values.asDiagonal() * v.transpose();
  return split_augmented(c);
}

TlsProblem gen_gaussian(Index m, Index n, std::uint64_t seed) {
  GeneratorSpec{GeneratorKind::gaussian, m, n}.validate();
  std::mt19937_64 rng(seed);
  DenseMatrix c = gaussian_matrix(m, n + 1, rng);
  return split_augmented(c);
}

}  // namespace tlscond
