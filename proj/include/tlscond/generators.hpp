#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>

#include "tlscond/tls_core.hpp"

namespace tlscond {

// Test-problem generators. All randomness comes from std::mt19937_64 seeded
// with the 64-bit seed passed in; identical arguments give bit-identical
// problems.

enum class GeneratorKind { bg_example, vanhuffel, toeplitz_blur, controlled_alpha, gaussian };

std::string_view to_string(GeneratorKind kind) noexcept;
GeneratorKind generator_kind_from_string(std::string_view name);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::gaussian;
  Index m = 0;
  Index n = 0;             // ignored by vanhuffel (n = m-2) and toeplitz_blur (n = m-2*omega)
  double e_p = 1e-3;       // bg_example: sigma_n - sigma_{n+1}
  double alpha = 1e-2;     // controlled_alpha
  int omega = 8;           // toeplitz_blur half bandwidth
  double beta_blur = 1.25; // toeplitz_blur kernel width
  double gamma = 1e-3;     // toeplitz_blur relative noise level
  std::uint64_t seed = 0;

  /// Column count after the kind-specific shape rule.
  Index effective_n() const;
  /// Whether the generated problem depends on `seed`.
  bool is_random() const noexcept { return kind != GeneratorKind::vanhuffel; }

  /// Throws InvalidInput if parameters violate the kind's preconditions.
  void validate() const;

  /// Plain key/value form, only keys relevant to `kind` are emitted.
  std::map<std::string, std::string> to_config() const;
  static GeneratorSpec from_config(const std::map<std::string, std::string>& config);
};

TlsProblem generate(const GeneratorSpec& spec);

/// [A, b] = Q [Sigma; O] V^T with Householder reflectors Q, V built from random
/// unit vectors and Sigma = diag(n, n-1, ..., 1, 1 - e_p).
TlsProblem gen_bg_example(Index m, Index n, double e_p, std::uint64_t seed);

/// Deterministic m x (m-2) problem with closed-form solution x = -1,
/// sigma_hat_n = sqrt(2m), sigma_{n+1} = sqrt(m), alpha = 1/sqrt(m-1).
TlsProblem gen_vanhuffel(Index m);

/// Banded lower Toeplitz Gaussian blur T (m x (m - 2 omega)) plus Toeplitz
/// noise E, right-hand side ones + e, with ||E|| = gamma ||T|| and
/// ||e|| = gamma ||ones||.
TlsProblem gen_toeplitz_blur(Index m, int omega, double beta_blur, double gamma,
                             std::uint64_t seed);

/// The 2*omega+1 nonzero entries of the blur matrix's first column.
DenseVector blur_kernel(int omega, double beta_blur);

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of R's diagonal moved into Q.
DenseMatrix random_orthogonal(Index n, std::mt19937_64& rng);

/// Orthogonal (n+1) x (n+1) V with V(n+1, n+1) = -alpha whose leading block
/// has singular values {1, ..., 1, alpha}.
DenseMatrix build_alpha_orthogonal(Index n, double alpha, std::uint64_t seed);

/// Random [A, b] whose last right singular vector ends in -alpha: the left
/// factor and singular values of a Gaussian matrix are kept, V is replaced.
TlsProblem gen_controlled_alpha(Index m, Index n, double alpha, std::uint64_t seed);

/// i.i.d. standard normal A and b.
TlsProblem gen_gaussian(Index m, Index n, std::uint64_t seed);

}  // namespace tlscond
