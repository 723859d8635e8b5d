#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pinlab/fast_engine.hpp"
#include "pinlab/logspace.hpp"
#include "pinlab/partition_engine.hpp"
#include "pinlab/rng.hpp"

using namespace pinlab;

TEST_CASE("tiny horizons fall back to the reference path") {
  const Environment env =
      generate_environment(ChargeDist::StandardGaussian, 1, 64);
  const RenewalLaw law = build_law(LawFamily::PowerLaw, 0.5, 64);
  const ModelParams params{0.4, 0.3};
  for (int L : {1, 2, 64}) {
    FastEngineDiagnostics diag;
    const Eigen::ArrayXd fast =
        compute_constrained_fast(env, law, params, L, &diag);
    const Eigen::ArrayXd ref = compute_constrained(env, law, params, L);
    CHECK(diag.reference_fallback);
    CHECK(max_abs_log_deviation(fast, ref) == 0.0);
  }
}

TEST_CASE("geometric law is served by the reference engine") {
  const Environment env =
      generate_environment(ChargeDist::StandardGaussian, 1, 512);
  const RenewalLaw law = build_law(LawFamily::Geometric, 0.5, 512);
  FastEngineDiagnostics diag;
  const Eigen::ArrayXd fast =
      compute_constrained_fast(env, law, ModelParams{0.3, 0.2}, 512, &diag);
  const Eigen::ArrayXd ref =
      compute_constrained(env, law, ModelParams{0.3, 0.2}, 512);
  CHECK(diag.reference_fallback);
  CHECK(max_abs_log_deviation(fast, ref) == 0.0);
}

TEST_CASE("randomized agreement with the reference engine") {
  Xoshiro256pp rng(31337);
  double worst = 0.0;
  for (int rep = 0; rep < 30; ++rep) {
    const bool srw = rng.next_unit() < 0.3;
    const double alpha = 0.3 + 1.7 * rng.next_unit();
    const int L = 64 + static_cast<int>(rng.next_unit() * 1984);
    const RenewalLaw law =
        srw ? build_law(LawFamily::SimpleRandomWalkReturn, 0.0, L)
            : build_law(LawFamily::PowerLaw, alpha, L);
    const Environment env = generate_environment(
        ChargeDist::StandardGaussian, rng.next_u64(), L);
    const ModelParams params{rng.next_unit(),
                             -0.2 + 1.4 * rng.next_unit()};
    CAPTURE(law.spec_string());
    CAPTURE(L);
    CAPTURE(params.beta);
    CAPTURE(params.h);
    FastEngineDiagnostics diag;
    const Eigen::ArrayXd fast =
        compute_constrained_fast(env, law, params, L, &diag);
    const Eigen::ArrayXd ref = compute_constrained(env, law, params, L);
    const double dev = max_abs_log_deviation(fast, ref);
    worst = std::max(worst, dev);
    CHECK(dev <= 1e-9);
    CHECK(diag.max_bound_ratio <= 1.0 + 1e-9);
    if (!diag.reference_fallback) CHECK(diag.fft_count > 0);
  }
  MESSAGE("worst randomized deviation: " << worst);
}

TEST_CASE("structural zeros survive the transform path") {
  const int L = 1024;
  const RenewalLaw law = build_law(LawFamily::SimpleRandomWalkReturn, 0.0, L);
  const Environment env =
      generate_environment(ChargeDist::StandardGaussian, 77, L);
  const ModelParams params{0.6, 0.4};
  FastEngineDiagnostics diag;
  const Eigen::ArrayXd fast =
      compute_constrained_fast(env, law, params, L, &diag);
  CHECK_FALSE(diag.reference_fallback);
  for (int n = 1; n <= L; n += 2) CHECK(is_log_zero(fast[n]));
  const Eigen::ArrayXd ref = compute_constrained(env, law, params, L);
  CHECK(max_abs_log_deviation(fast, ref) <= 1e-9);
}

TEST_CASE("localized growth and fast polynomial decay both stay accurate") {
  SUBCASE("localized: exponentially growing source blocks") {
    const int L = 2048;
    const RenewalLaw law = build_law(LawFamily::PowerLaw, 0.5, L);
    const Environment env =
        generate_environment(ChargeDist::StandardGaussian, 5, L);
    const ModelParams params{0.8, -0.2};
    const Eigen::ArrayXd fast = compute_constrained_fast(env, law, params, L);
    const Eigen::ArrayXd ref = compute_constrained(env, law, params, L);
    CHECK(max_abs_log_deviation(fast, ref) <= 1e-9);
    CHECK(ref[L] > 10.0);  // really localized
  }
  SUBCASE("steep kernel decay: the hard case for transform noise") {
    const int L = 4096;
    const RenewalLaw law = build_law(LawFamily::PowerLaw, 2.0, L);
    const Environment env =
        generate_environment(ChargeDist::StandardGaussian, 6, L);
    const ModelParams params{0.5, 0.8};
    const Eigen::ArrayXd fast = compute_constrained_fast(env, law, params, L);
    const Eigen::ArrayXd ref = compute_constrained(env, law, params, L);
    CHECK(max_abs_log_deviation(fast, ref) <= 1e-9);
  }
}

TEST_CASE("fast engine is deterministic") {
  const int L = 777;
  const RenewalLaw law = build_law(LawFamily::PowerLaw, 0.9, L);
  const Environment env =
      generate_environment(ChargeDist::Rademacher, 123, L);
  const ModelParams params{0.7, 0.1};
  const Eigen::ArrayXd a = compute_constrained_fast(env, law, params, L);
  const Eigen::ArrayXd b = compute_constrained_fast(env, law, params, L);
  CHECK(max_abs_log_deviation(a, b) == 0.0);
}

TEST_CASE("deviation metric") {
  Eigen::ArrayXd a(3), b(3);
  a << 0.0, kLogZero, -5.0;
  b << 0.0, kLogZero, -5.0 + 1e-12;
  CHECK(max_abs_log_deviation(a, b) == doctest::Approx(1e-12).epsilon(1e-3));
  b[1] = -700.0;
  CHECK(std::isinf(max_abs_log_deviation(a, b)));
}
