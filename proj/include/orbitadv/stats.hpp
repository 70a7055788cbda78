#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace orbitadv {

// Kahan compensated accumulator.  Used for every statistic that feeds a
// reported number, so that a fixed summation order gives bit-stable results.
class KahanSum {
 public:
  void add(double x) {
    double y = x - compensation_;
    double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);  // unbiased, n-1 divisor

// Conservative 99% confidence halfwidth for a binomial proportion from n
// samples: z_{0.995} * (1/2) / sqrt(n), the worst case over p.
double binomial_halfwidth99(std::size_t n);

// Nearest-rank quantile: the ceil(q*n)-th smallest value, q in (0, 1].
double quantile_nearest_rank(std::vector<double> xs, double q);

struct KsResult {
  double statistic;  // sup |F_a - F_b|
  double threshold;  // c(alpha) * sqrt((n+m)/(n*m))
  bool reject;       // statistic > threshold
};

// Two-sample Kolmogorov-Smirnov test at significance `alpha` using the
// asymptotic critical value c(alpha) = sqrt(-ln(alpha/2)/2).
KsResult two_sample_ks(std::vector<double> a, std::vector<double> b,
                       double alpha = 0.01);

}  // namespace orbitadv
