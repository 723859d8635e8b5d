#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "pinlab/errors.hpp"
#include "pinlab/logspace.hpp"
#include "pinlab/renewal_law.hpp"

using namespace pinlab;

TEST_CASE("geometric closed forms") {
  const RenewalLaw law = build_law(LawFamily::Geometric, 0.5, 64);
  CHECK(mass(law, 3) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(tail(law, 2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(tail(law, 3) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(tail(law, 1) == 1.0);
  const RenewalLaw law3 = build_law(LawFamily::Geometric, 0.3, 64);
  CHECK(mass(law3, 1) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(std::isinf(law.alpha));
  CHECK_FALSE(law.regvar());
}

TEST_CASE("simple random walk returns vs exhaustive walk enumeration") {
  const RenewalLaw law = build_law(LawFamily::SimpleRandomWalkReturn, 0.0, 64);
  CHECK(mass(law, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mass(law, 4) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(mass(law, 3) == 0.0);
  CHECK(log_mass(law, 3) == kLogZero);
  CHECK(tail(law, 3) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(law.alpha == 0.5);
  CHECK(law.even_support());
  for (int steps = 2; steps <= 12; steps += 2)
    CHECK(mass(law, steps) ==
          doctest::Approx(oracle::srw_first_return_enumeration(steps))
              .epsilon(1e-13));
}

TEST_CASE("power law normalizer against zeta oracles") {
  // zeta(2) and zeta(4) have closed forms
  const double pi = std::numbers::pi;
  CHECK(zeta_partial(2.0) == doctest::Approx(pi * pi / 6.0).epsilon(1e-14));
  CHECK(zeta_partial(4.0) ==
        doctest::Approx(pi * pi * pi * pi / 90.0).epsilon(1e-14));
  const auto zb = oracle::zeta_bracket(1.5);
  CHECK(zeta_partial(1.5) >= zb.lo - 1e-12);
  CHECK(zeta_partial(1.5) <= zb.hi + 1e-12);

  const RenewalLaw law1 = build_law(LawFamily::PowerLaw, 1.0, 64);
  CHECK(mass(law1, 1) == doctest::Approx(6.0 / (pi * pi)).epsilon(1e-12));
  const RenewalLaw law05 = build_law(LawFamily::PowerLaw, 0.5, 64);
  CHECK(mass(law05, 2) ==
        doctest::Approx(std::pow(2.0, -1.5) / zeta_partial(1.5)).epsilon(1e-12));
}

TEST_CASE("normalization and exact tail consistency across families") {
  std::vector<RenewalLaw> laws;
  laws.push_back(build_law(LawFamily::Geometric, 0.5, 1000));
  laws.push_back(build_law(LawFamily::Geometric, 0.85, 1000));
  laws.push_back(build_law(LawFamily::SimpleRandomWalkReturn, 0.0, 1000));
  laws.push_back(build_law(LawFamily::PowerLaw, 0.35, 1000));
  laws.push_back(build_law(LawFamily::PowerLaw, 1.0, 1000));
  laws.push_back(build_law(LawFamily::PowerLaw, 2.5, 1000));
  for (const auto& law : laws) {
    CAPTURE(law.spec_string());
    const int t = law.n_table();
    double sum = 0.0, comp = 0.0;
    bool exact_diff = true, nonneg = true, tail_monotone = true;
    for (int m = 1; m <= t; ++m) {
      detail::kahan_add(sum, comp, law.mass_table[m]);
      exact_diff = exact_diff &&
                   (law.tail_table[m] - law.tail_table[m + 1] ==
                    law.mass_table[m]);
      nonneg = nonneg && law.mass_table[m] >= 0.0;
      tail_monotone = tail_monotone &&
                      law.tail_table[m + 1] <= law.tail_table[m];
    }
    CHECK(exact_diff);
    CHECK(nonneg);
    CHECK(tail_monotone);
    CHECK(law.tail_table[1] == 1.0);
    CHECK(std::abs(sum + comp + law.tail_table[t + 1] - 1.0) <= 1e-12);
  }
}

TEST_CASE("regular variation diagnostic") {
  auto exponent_estimate = [](const RenewalLaw& law, int n) {
    return -log_mass(law, n) / std::log(static_cast<double>(n));
  };
  SUBCASE("offset shrinks monotonically on a dyadic grid") {
    for (double alpha : {0.5, 1.0, 2.0}) {
      const RenewalLaw law = build_law(LawFamily::PowerLaw, alpha, 1 << 14);
      double prev = 1e100;
      for (int n = 64; n <= (1 << 14); n *= 4) {
        const double dev = std::abs(exponent_estimate(law, n) - (1.0 + alpha));
        CHECK(dev <= prev + 1e-15);
        prev = dev;
      }
    }
  }
  SUBCASE("endpoint accuracy where the normalizer offset allows it") {
    const RenewalLaw law = build_law(LawFamily::PowerLaw, 2.0, 1 << 14);
    CHECK(std::abs(exponent_estimate(law, 1 << 14) - 3.0) <= 0.05);
    const RenewalLaw srw = build_law(LawFamily::SimpleRandomWalkReturn, 0.0, 1 << 14);
    CHECK(std::abs(exponent_estimate(srw, 1 << 14) - 1.5) <= 0.05);
  }
  SUBCASE("dyadic slope is exact for pure powers") {
    for (double alpha : {0.5, 1.0}) {
      const RenewalLaw law = build_law(LawFamily::PowerLaw, alpha, 1 << 13);
      const double slope =
          -(log_mass(law, 1 << 13) - log_mass(law, 1 << 12)) / std::log(2.0);
      CHECK(slope == doctest::Approx(1.0 + alpha).epsilon(1e-9));
    }
  }
}

TEST_CASE("gap sampler") {
  SUBCASE("deterministic replay") {
    const RenewalLaw law = build_law(LawFamily::PowerLaw, 0.5, 4096);
    Xoshiro256pp a(42), b(42);
    for (int i = 0; i < 2000; ++i) CHECK(sample_gap(law, a) == sample_gap(law, b));
  }
  SUBCASE("near-degenerate geometric returns 1") {
    const RenewalLaw law = build_law(LawFamily::Geometric, 1.0 - 1e-8, 64);
    Xoshiro256pp rng(1);
    for (int i = 0; i < 20; ++i) CHECK(sample_gap(law, rng) == 1);
  }
  SUBCASE("srw gap-2 frequency within the binomial band") {
    const RenewalLaw law = build_law(LawFamily::SimpleRandomWalkReturn, 0.0, 4096);
    Xoshiro256pp rng(7);
    const int m = 1000000;
    int twos = 0;
    for (int i = 0; i < m; ++i)
      if (sample_gap(law, rng) == 2) ++twos;
    CHECK(std::abs(twos / static_cast<double>(m) - 0.5) <= 0.002);
  }
  SUBCASE("chi-square goodness of fit on the first 50 atoms") {
    for (const auto& law : {build_law(LawFamily::Geometric, 0.3, 2048),
                            build_law(LawFamily::PowerLaw, 0.7, 2048)}) {
      CAPTURE(law.spec_string());
      Xoshiro256pp rng(123);
      const int m = 1000000;
      std::vector<long> counts(51, 0);
      for (int i = 0; i < m; ++i) {
        const int64_t g = sample_gap(law, rng);
        ++counts[g <= 50 ? g : 0];  // slot 0 collects the overflow bin
      }
      double stat = 0.0;
      int dof = -1;
      for (int g = 1; g <= 50; ++g) {
        const double expd = m * law.mass_table[g];
        if (expd < 5.0) continue;
        stat += (counts[g] - expd) * (counts[g] - expd) / expd;
        ++dof;
      }
      const double tail_exp = m * tail(law, 51);
      if (tail_exp >= 5.0) {
        stat += (counts[0] - tail_exp) * (counts[0] - tail_exp) / tail_exp;
        ++dof;
      }
      CHECK(oracle::chi_square_pvalue(stat, dof) > 0.001);
    }
  }
}

TEST_CASE("parameter and range errors") {
  CHECK_THROWS_AS(build_law(LawFamily::PowerLaw, -1.0, 64), ConfigError);
  CHECK_THROWS_AS(build_law(LawFamily::PowerLaw, 0.0, 64), ConfigError);
  CHECK_THROWS_AS(build_law(LawFamily::Geometric, 1.2, 64), ConfigError);
  CHECK_THROWS_AS(build_law(LawFamily::Geometric, 0.0, 64), ConfigError);
  CHECK_THROWS_AS(build_law(LawFamily::Geometric, 0.5, 1), ConfigError);
  const RenewalLaw law = build_law(LawFamily::Geometric, 0.5, 64);
  CHECK_THROWS_AS(mass(law, 0), ConfigError);
  CHECK_THROWS_AS(mass(law, 65), ConfigError);
  CHECK_THROWS_AS(tail(law, 66), ConfigError);
  CHECK_NOTHROW(tail(law, 65));
  CHECK_THROWS_AS(parse_law_spec("cauchy:1", 64), ConfigError);
  CHECK_THROWS_AS(parse_law_spec("powerlaw", 64), ConfigError);
}

TEST_CASE("law record round trip and checksum audit") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pinlab_law_test";
  fs::create_directories(dir);
  const fs::path p = dir / "law.json";

  const RenewalLaw law = parse_law_spec("powerlaw:alpha=0.75", 512);
  save_law_record(law, p);
  const RenewalLaw back = load_law_record(p);
  CHECK(back.spec_string() == law.spec_string());
  CHECK(back.checksum == law.checksum);
  CHECK(back.n_table() == 512);

  // Tampered parameter: rebuilt tables no longer match the recorded digest.
  std::ifstream is(p);
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  is.close();
  size_t pos = text.find("0.75");
  REQUIRE(pos != std::string::npos);
  while (pos != std::string::npos) {
    text.replace(pos, 4, "0.85");
    pos = text.find("0.75", pos);
  }
  std::ofstream os(p);
  os << text;
  os.close();
  CHECK_THROWS_AS(load_law_record(p), DataFormatError);
  fs::remove_all(dir);
}
