#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pinlab/logspace.hpp"
#include "pinlab/rng.hpp"

using namespace pinlab;

TEST_CASE("log_add basics") {
  CHECK(log_add(kLogZero, kLogZero) == kLogZero);
  CHECK(log_add(kLogZero, 1.5) == 1.5);
  CHECK(log_add(-2.0, kLogZero) == -2.0);
  CHECK(log_add(std::log(2.0), std::log(3.0)) ==
        doctest::Approx(std::log(5.0)).epsilon(1e-15));
  // far-apart magnitudes do not lose the big one
  CHECK(log_add(0.0, -800.0) == doctest::Approx(0.0));
}

TEST_CASE("log_sub basics") {
  CHECK(log_sub(std::log(5.0), std::log(3.0)) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(log_sub(1.25, 1.25) == kLogZero);
  CHECK(log_sub(2.0, kLogZero) == 2.0);
  CHECK_THROWS(log_sub(0.0, 1.0));
}

TEST_CASE("log_sum_exp matches direct summation and handles zeros") {
  Xoshiro256pp rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng.next_unit() * 40);
    std::vector<double> xs(n);
    long double direct = 0.0L;
    for (auto& x : xs) {
      x = -5.0 + 10.0 * rng.next_unit();
      if (rng.next_unit() < 0.2) x = kLogZero;
      if (!is_log_zero(x)) direct += std::exp(static_cast<long double>(x));
    }
    const double got = log_sum_exp(xs);
    if (direct == 0.0L)
      CHECK(is_log_zero(got));
    else
      CHECK(got == doctest::Approx(static_cast<double>(std::log(direct)))
                       .epsilon(1e-13));

    LogAccumulator acc;
    for (double x : xs) acc.add(x);
    if (!is_log_zero(got))
      CHECK(acc.value() == doctest::Approx(got).epsilon(1e-13));
    else
      CHECK(is_log_zero(acc.value()));
  }
}

TEST_CASE("kahan_sum compensates tiny addends") {
  std::vector<double> xs;
  xs.push_back(1.0);
  for (int i = 0; i < 10000; ++i) xs.push_back(1e-17);
  CHECK(kahan_sum(xs) == doctest::Approx(1.0 + 1e-13).epsilon(1e-15));
}

TEST_CASE("xoshiro256++ stream determinism and basic moments") {
  Xoshiro256pp a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const uint64_t x = a.next_u64();
    all_equal = all_equal && (x == b.next_u64());
    any_diff = any_diff || (x != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);

  Xoshiro256pp rng(7);
  const int m = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < m; ++i) {
    const double u = rng.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(sum / m == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sum2 / m == doctest::Approx(1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("gaussian and rademacher draws") {
  Xoshiro256pp rng(11);
  const int m = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < m; ++i) {
    const double z = rng.next_gaussian();
    sum += z;
    sum2 += z * z;
  }
  CHECK(std::abs(sum / m) < 0.01);
  CHECK(sum2 / m == doctest::Approx(1.0).epsilon(0.02));

  Xoshiro256pp rng2(12);
  int plus = 0;
  for (int i = 0; i < m; ++i) {
    const double r = rng2.next_rademacher();
    CHECK((r == 1.0 || r == -1.0));
    if (r > 0) ++plus;
  }
  CHECK(std::abs(plus / static_cast<double>(m) - 0.5) < 0.005);
}

TEST_CASE("fnv1a known basis and incremental equivalence") {
  CHECK(fnv1a_bytes({}) == 0xcbf29ce484222325ULL);
  Fnv1a one;
  one.update_u64(0x0123456789abcdefULL);
  one.update_double(3.5);
  Fnv1a two;
  unsigned char bytes[16];
  for (int i = 0; i < 8; ++i)
    bytes[i] = static_cast<unsigned char>(0x0123456789abcdefULL >> (8 * i));
  const uint64_t dbits = 0x400C000000000000ULL;  // 3.5 in IEEE-754
  for (int i = 0; i < 8; ++i)
    bytes[8 + i] = static_cast<unsigned char>(dbits >> (8 * i));
  two.update(bytes);
  CHECK(one.digest() == two.digest());
}
