#include "orbitadv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace orbitadv {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty input");
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_variance: need >= 2 values");
  double m = mean(xs);
  KahanSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  return s.value() / static_cast<double>(xs.size() - 1);
}

double binomial_halfwidth99(std::size_t n) {
  if (n == 0) throw std::invalid_argument("binomial_halfwidth99: n must be positive");
  constexpr double z995 = 2.5758293035489004;  // standard normal 99.5% quantile
  return z995 * 0.5 / std::sqrt(static_cast<double>(n));
}

double quantile_nearest_rank(std::vector<double> xs, double q) {
  if (xs.empty()) throw std::invalid_argument("quantile_nearest_rank: empty input");
  if (!(q > 0.0) || q > 1.0)
    throw std::invalid_argument("quantile_nearest_rank: q must be in (0, 1]");
  std::sort(xs.begin(), xs.end());
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(xs.size())));
  if (rank == 0) rank = 1;
  return xs[rank - 1];
}

KsResult two_sample_ks(std::vector<double> a, std::vector<double> b,
                       double alpha) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("two_sample_ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  d = std::max(d, std::abs(1.0 - static_cast<double>(j) / nb));
  d = std::max(d, std::abs(static_cast<double>(i) / na - 1.0));
  double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  double threshold = c * std::sqrt((na + nb) / (na * nb));
  return KsResult{d, threshold, d > threshold};
}

}  // namespace orbitadv
