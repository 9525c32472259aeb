#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "tlscond/bounds.hpp"
#include "tlscond/error.hpp"
#include "tlscond/generators.hpp"

namespace tlscond {
namespace {

using testing::rel_err;

bool same_problem(const TlsProblem& p, const TlsProblem& q) {
  return p.a() == q.a() && p.b() == q.b();
}

TEST(BgExample, SingularValuesArePrescribed) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const TlsProblem p = gen_bg_example(100, 20, 1e-3, seed);
    const DenseVector s = singular_values(p.augmented());
    for (Index i = 0; i < 20; ++i) EXPECT_NEAR(s(i), 20.0 - static_cast<double>(i), 1e-10);
    EXPECT_NEAR(s(20), 1.0 - 1e-3, 1e-10);
    EXPECT_NEAR(s(19) - s(20), 1e-3, 1e-10);
  }
  EXPECT_THROW(gen_bg_example(10, 3, 1.0, 0), Error);
  EXPECT_THROW(gen_bg_example(3, 3, 0.1, 0), Error);
}

TEST(VanHuffel, StructureAndClosedForms) {
  const TlsProblem p = gen_vanhuffel(6);
  ASSERT_EQ(p.cols(), 4);
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j < 4; ++j) EXPECT_EQ(p.a()(i, j), i == j ? 5.0 : -1.0);
    EXPECT_EQ(p.b()(i), i == 4 ? 5.0 : -1.0);
  }
  const TlsProblem q = gen_vanhuffel(200);
  const SpectralData sd = spectral_data(q);
  EXPECT_LE(rel_err(sd.alpha, 1.0 / std::sqrt(199.0)), 1e-8);
  EXPECT_LE(rel_err(sd.sigma_hat_n(), 20.0), 1e-8);
  EXPECT_LE(rel_err(sd.sigma_np1(), std::sqrt(200.0)), 1e-8);
  EXPECT_LE(rel_err(sd.sigma_np1() / sd.sigma_hat_n(), 0.707), 1e-3);
  EXPECT_THROW(gen_vanhuffel(3), Error);
}

TEST(ToeplitzBlur, KernelSumsToOne) {
  const DenseVector t = blur_kernel(8, 1.25);
  ASSERT_EQ(t.size(), 17);
  EXPECT_NEAR(t.sum(), 1.0, 1e-10);
  EXPECT_NEAR(t(8), 1.0 / std::sqrt(2.0 * std::numbers::pi * 1.25 * 1.25), 1e-15);
  EXPECT_DOUBLE_EQ(t(0), t(16));
}

TEST(ToeplitzBlur, NoiseFreeAndNoiseScaling) {
  const TlsProblem clean = gen_toeplitz_blur(40, 3, 1.25, 0.0, 9);
  ASSERT_EQ(clean.cols(), 34);
  const DenseVector t = blur_kernel(3, 1.25);
  for (Index j = 0; j < clean.cols(); ++j) {
    for (Index i = 0; i < clean.rows(); ++i) {
      const Index k = i - j;
      EXPECT_EQ(clean.a()(i, j), k >= 0 && k < t.size() ? t(k) : 0.0);
    }
  }
  EXPECT_EQ(clean.b(), DenseVector::Ones(40));

  const TlsProblem noisy = gen_toeplitz_blur(40, 3, 1.25, 1e-3, 9);
  const DenseMatrix e = noisy.a() - clean.a();
  EXPECT_LE(rel_err(spectral_norm(e), 1e-3 * spectral_norm(clean.a())), 1e-10);
  EXPECT_LE(rel_err((noisy.b() - clean.b()).norm(), 1e-3 * std::sqrt(40.0)), 1e-10);
  // The noise keeps the banded Toeplitz pattern.
  for (Index j = 1; j < e.cols(); ++j) {
    for (Index i = j; i < e.rows(); ++i) EXPECT_EQ(e(i, j), e(i - 1, j - 1));
    EXPECT_EQ(e(0, j), 0.0);
  }
  EXPECT_THROW(gen_toeplitz_blur(7, 3, 1.25, 1e-3, 0), Error);
}

TEST(AlphaOrthogonal, StructureAndPattern) {
  for (Index n : {1, 2, 5, 9}) {
    for (double alpha : {1e-4, 0.1, 0.49, 0.9}) {
      const DenseMatrix v = build_alpha_orthogonal(n, alpha, 3);
      const Index k = n + 1;
      EXPECT_LE((v.transpose() * v - DenseMatrix::Identity(k, k)).norm(), 1e-12);
      EXPECT_EQ(v(n, n), -alpha);
      DenseVector s = singular_values(v.topLeftCorner(n, n));
      std::sort(s.data(), s.data() + s.size());
      EXPECT_NEAR(s(0), alpha, 1e-10);
      for (Index i = 1; i < n; ++i) EXPECT_NEAR(s(i), 1.0, 1e-10);
    }
  }
  EXPECT_THROW(build_alpha_orthogonal(3, 0.0, 1), Error);
  EXPECT_THROW(build_alpha_orthogonal(3, 1.0, 1), Error);
}

TEST(RandomOrthogonal, IsOrthogonalAndSeeded) {
  std::mt19937_64 a(5), b(5);
  const DenseMatrix q = random_orthogonal(7, a);
  EXPECT_LE((q.transpose() * q - DenseMatrix::Identity(7, 7)).norm(), 1e-13);
  EXPECT_EQ(q, random_orthogonal(7, b));
}

TEST(ControlledAlpha, AlphaRoundTrip) {
  for (double alpha : {1e-3, 1e-2, 0.3, 0.49, 0.8}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const SpectralData sd = spectral_data(gen_controlled_alpha(30, 8, alpha, seed));
      EXPECT_NEAR(sd.alpha, alpha, 1e-10) << alpha << " " << seed;
    }
  }
  const TlsProblem p = gen_controlled_alpha(20, 5, 0.49, 1);
  const SpectralData sd = spectral_data(p);
  EXPECT_TRUE(bound_report(sd, solve_tls(p, sd)).kappa2_upper.applicable());
}

TEST(Gaussian, Deterministic) {
  EXPECT_TRUE(same_problem(gen_gaussian(20, 5, 42), gen_gaussian(20, 5, 42)));
  EXPECT_FALSE(same_problem(gen_gaussian(20, 5, 42), gen_gaussian(20, 5, 43)));
  EXPECT_THROW(gen_gaussian(5, 5, 0), Error);
}

TEST(Generators, AllKindsDeterministic) {
  for (auto kind : {GeneratorKind::bg_example, GeneratorKind::vanhuffel,
                    GeneratorKind::toeplitz_blur, GeneratorKind::controlled_alpha,
                    GeneratorKind::gaussian}) {
    GeneratorSpec spec;
    spec.kind = kind;
    spec.m = 30;
    spec.n = 6;
    spec.omega = 4;
    spec.seed = 77;
    EXPECT_TRUE(same_problem(generate(spec), generate(spec))) << to_string(kind);
    EXPECT_EQ(generate(spec).cols(), spec.effective_n());
  }
}

TEST(GeneratorSpec, ConfigRoundTrip) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::toeplitz_blur;
  spec.m = 100;
  spec.omega = 8;
  spec.beta_blur = 1.25;
  spec.gamma = 0.1 + 0.2;  // not exactly representable in short decimal
  spec.seed = 0xFFFFFFFFFFFFFFFFULL;
  const auto cfg = spec.to_config();
  EXPECT_EQ(cfg.count("n"), 0u);
  const GeneratorSpec back = GeneratorSpec::from_config(cfg);
  EXPECT_EQ(back.kind, spec.kind);
  EXPECT_EQ(back.m, spec.m);
  EXPECT_EQ(back.omega, spec.omega);
  EXPECT_EQ(back.gamma, spec.gamma);
  EXPECT_EQ(back.seed, spec.seed);

  GeneratorSpec ca;
  ca.kind = GeneratorKind::controlled_alpha;
  ca.m = 50;
  ca.n = 20;
  ca.alpha = 1e-2;
  const GeneratorSpec cb = GeneratorSpec::from_config(ca.to_config());
  EXPECT_EQ(cb.n, 20);
  EXPECT_EQ(cb.alpha, 1e-2);

  EXPECT_THROW(GeneratorSpec::from_config({{"kind", "gaussian"}, {"m", "x"}}), Error);
  EXPECT_THROW(GeneratorSpec::from_config({{"kind", "nope"}}), Error);
  EXPECT_THROW(generator_kind_from_string("nope"), Error);
}

}  // namespace
}  // namespace tlscond
