#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "tlscond/generators.hpp"
#include "tlscond/tls_core.hpp"

namespace tlscond::testing {

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

/// A = [1; 1], b = [1; 0]: x_TLS is the golden ratio conjugate.
inline TlsProblem golden_problem() {
  DenseMatrix a(2, 1);
  a << 1.0, 1.0;
  DenseVector b(2);
  b << 1.0, 0.0;
  return TlsProblem(a, b);
}

/// Random shape and generator for property tests; case i is reproducible.
struct RandomCase {
  GeneratorSpec spec;
  TlsProblem problem;
};

inline RandomCase random_case(std::uint64_t i, Index max_m = 40, Index max_n = 10) {
  std::mt19937_64 rng(0x5eed0000ULL + i);
  std::uniform_int_distribution<Index> n_dist(1, max_n);
  GeneratorSpec spec;
  spec.n = n_dist(rng);
  std::uniform_int_distribution<Index> m_dist(spec.n + 2, std::max(spec.n + 2, max_m));
  spec.m = m_dist(rng);
  spec.seed = rng();
  if (i % 2 == 0) {
    spec.kind = GeneratorKind::gaussian;
  } else {
    spec.kind = GeneratorKind::controlled_alpha;
    std::uniform_real_distribution<double> log_alpha(-3.0, -0.05);
    spec.alpha = std::pow(10.0, log_alpha(rng));
  }
  return {spec, generate(spec)};
}

}  // namespace tlscond::testing
