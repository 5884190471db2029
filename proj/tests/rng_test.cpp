#include "hsnn/rng.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"

using namespace hsnn;

TEST_CASE("derive_key depends on every component and their order") {
  CHECK(derive_key({1, 2, 3}) != derive_key({3, 2, 1}));
  CHECK(derive_key({1, 2, 3}) != derive_key({1, 2, 4}));
  CHECK(derive_key({1, 2}) != derive_key({1, 2, 0}));
  CHECK(derive_key({42}) == derive_key({42}));
}

TEST_CASE("identical keys reproduce identical streams") {
  Rng a(derive_key({7, 1, 0}));
  Rng b(derive_key({7, 1, 0}));
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform moments") {
  Rng rng(123);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    sum += x;
    sq += x * x;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.03));
}

TEST_CASE("normal moments") {
  Rng rng(456);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uniform_int covers [0, n) roughly evenly") {
  Rng rng(789);
  std::vector<int> counts(10, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    int k = rng.uniform_int(10);
    REQUIRE(k >= 0);
    REQUIRE(k < 10);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - n / 10) < 600);
}

TEST_CASE("gamma moments match shape*scale and shape*scale^2") {
  Rng rng(1011);
  const double shape = 1.85, scale = 11.7;
  const int n = 400000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.gamma(shape, scale);
    REQUIRE(x > 0.0);
    sum += x;
    sq += x * x;
  }
  double mean = sum / n;
  double var = sq / n - mean * mean;
  CHECK(mean == doctest::Approx(shape * scale).epsilon(0.02));
  CHECK(var == doctest::Approx(shape * scale * scale).epsilon(0.05));
}

TEST_CASE("gamma with shape below one stays positive and matches mean") {
  Rng rng(1213);
  const double shape = 0.6, scale = 2.0;
  const int n = 400000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.gamma(shape, scale);
    REQUIRE(x > 0.0);
    sum += x;
  }
  CHECK(sum / n == doctest::Approx(shape * scale).epsilon(0.03));
}

TEST_CASE("lognormal median equals scale and log-space std equals shape") {
  Rng rng(1415);
  const double shape = 0.27, scale = 21.1;
  const int n = 200000;
  double logsum = 0.0, logsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.lognormal(shape, scale);
    REQUIRE(x > 0.0);
    double lx = std::log(x);
    logsum += lx;
    logsq += lx * lx;
  }
  double lmean = logsum / n;
  double lvar = logsq / n - lmean * lmean;
  CHECK(std::exp(lmean) == doctest::Approx(scale).epsilon(0.01));
  CHECK(std::sqrt(lvar) == doctest::Approx(shape).epsilon(0.02));
}
