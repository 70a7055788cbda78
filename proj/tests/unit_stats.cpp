#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "orbitadv/random_stream.hpp"
#include "orbitadv/stats.hpp"

using namespace orbitadv;

TEST_CASE("compensated sum recovers a small addend next to a large one") {
  KahanSum k;
  k.add(1e16);
  k.add(1.0);
  k.add(1.0);
  k.add(-1e16);
  CHECK(k.value() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("compensated sum of many small terms stays accurate") {
  KahanSum k;
  const int n = 10000000;
  for (int i = 0; i < n; ++i) k.add(0.1);
  CHECK(std::abs(k.value() - 0.1 * n) < 1e-6);
}

TEST_CASE("mean and unbiased variance on a known sample") {
  std::vector<double> xs = {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  CHECK(mean(xs) == doctest::Approx(5.0));
  // Sum of squared deviations is 32; divided by n-1 = 7.
  CHECK(sample_variance(xs) == doctest::Approx(32.0 / 7.0));
}

TEST_CASE("binomial halfwidth matches the closed form") {
  // z_{0.995} * 0.5 / sqrt(n) with z_{0.995} = 2.5758293035489004.
  CHECK(binomial_halfwidth99(10000) ==
        doctest::Approx(2.5758293035489004 * 0.5 / 100.0).epsilon(1e-14));
  CHECK(binomial_halfwidth99(100) > binomial_halfwidth99(1000));
}

TEST_CASE("nearest-rank quantile picks the ceil(qn)-th smallest") {
  std::vector<double> xs;
  for (int i = 100; i >= 1; --i) xs.push_back(i);  // descending 100..1
  CHECK(quantile_nearest_rank(xs, 0.95) == 95.0);
  CHECK(quantile_nearest_rank(xs, 0.01) == 1.0);
  CHECK(quantile_nearest_rank(xs, 1.0) == 100.0);
  CHECK(quantile_nearest_rank(xs, 0.5) == 50.0);
}

TEST_CASE("ks test accepts two samples from the same distribution") {
  RandomStream rng(31);
  std::vector<double> a, b;
  for (int i = 0; i < 5000; ++i) a.push_back(rng.uniform());
  for (int i = 0; i < 5000; ++i) b.push_back(rng.uniform());
  KsResult r = two_sample_ks(a, b, 0.01);
  CHECK_FALSE(r.reject);
  CHECK(r.statistic <= r.threshold);
}

TEST_CASE("ks test rejects a clearly shifted distribution") {
  RandomStream rng(32);
  std::vector<double> a, b;
  for (int i = 0; i < 2000; ++i) a.push_back(rng.uniform());
  for (int i = 0; i < 2000; ++i) b.push_back(rng.uniform() + 0.2);
  KsResult r = two_sample_ks(a, b, 0.01);
  CHECK(r.reject);
}

TEST_CASE("ks threshold uses the asymptotic critical value") {
  std::vector<double> a = {1, 2, 3, 4}, b = {1, 2, 3, 4};
  KsResult r = two_sample_ks(a, b, 0.01);
  const double c = std::sqrt(-std::log(0.01 / 2.0) / 2.0);
  CHECK(r.threshold == doctest::Approx(c * std::sqrt(8.0 / 16.0)));
  CHECK(r.statistic == 0.0);
}
