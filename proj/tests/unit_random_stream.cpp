#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "orbitadv/random_stream.hpp"

using orbitadv::RandomStream;
using orbitadv::derive_stream;

TEST_CASE("same seed reproduces the same bit stream") {
  RandomStream a(12345), b(12345);
  for (int i = 0; i < 256; ++i) CHECK(a.bits() == b.bits());
}

TEST_CASE("different seeds give different streams") {
  RandomStream a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 64; ++i)
    if (a.bits() == b.bits()) ++equal;
  CHECK(equal < 4);
}

TEST_CASE("uniform lies in the half-open unit interval") {
  RandomStream rng(7);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform over a range respects the bounds") {
  RandomStream rng(8);
  for (int i = 0; i < 1000; ++i) {
    double u = rng.uniform(-3.0, 5.0);
    CHECK(u >= -3.0);
    CHECK(u < 5.0);
  }
}

TEST_CASE("uniform mean matches one half over a hundred thousand draws") {
  RandomStream rng(99);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += rng.uniform();
  CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("gaussian moments match the standard normal") {
  RandomStream rng(4242);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double g = rng.gaussian();
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);       // ~6 standard errors
  CHECK(std::abs(var - 1.0) < 0.05);  // generous band for n = 1e5
}

TEST_CASE("derived stream is reproducible for the same seed and index") {
  RandomStream a = derive_stream(555, 17);
  RandomStream b = derive_stream(555, 17);
  for (int i = 0; i < 64; ++i) CHECK(a.bits() == b.bits());
}

TEST_CASE("derived streams at neighboring indices differ immediately") {
  RandomStream a = derive_stream(555, 0);
  RandomStream b = derive_stream(555, 1);
  int equal = 0;
  for (int i = 0; i < 64; ++i)
    if (a.bits() == b.bits()) ++equal;
  CHECK(equal == 0);
}

TEST_CASE("derived streams pass a mean equidistribution smoke test") {
  RandomStream rng = derive_stream(2024, 3);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += rng.uniform();
  CHECK(std::abs(sum / n - 0.5) < 0.01);
}

TEST_CASE("widely separated derived indices stay independent-looking") {
  RandomStream a = derive_stream(9, 0);
  RandomStream b = derive_stream(9, std::uint64_t{1} << 32);
  double corr = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i)
    corr += (a.uniform() - 0.5) * (b.uniform() - 0.5);
  // Covariance of independent uniforms has sd 1/(12 sqrt(n)).
  CHECK(std::abs(corr / n) < 6.0 / (12.0 * std::sqrt(double(n))));
}
