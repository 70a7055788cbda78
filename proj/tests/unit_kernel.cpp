#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "orbitadv/compositional_kernel.hpp"
#include "orbitadv/conv_net.hpp"
#include "orbitadv/point_cloud.hpp"
#include "orbitadv/random_stream.hpp"
#include "orbitadv/so_group.hpp"
#include "orbitadv/stats.hpp"

using namespace orbitadv;

namespace {

// Columns of y replaced so that <x_t, y_t> = target for every position t,
// with both staying on the sphere of radius sqrt(d).
PointCloud paired_cloud(const PointCloud& x, double target, RandomStream& rng) {
  const int d = int(x.dim());
  const double r2 = double(d);  // squared radius
  Eigen::MatrixXd y(d, x.count());
  for (Eigen::Index t = 0; t < x.count(); ++t) {
    Eigen::VectorXd u = x.m.col(t) / std::sqrt(r2);
    Eigen::VectorXd g(d);
    for (int i = 0; i < d; ++i) g[i] = rng.gaussian();
    g -= g.dot(u) * u;
    g.normalize();
    const double a = target / std::sqrt(r2);              // component along u
    const double b = std::sqrt(r2 - a * a);               // orthogonal part
    y.col(t) = a * u + b * g;
  }
  return PointCloud(std::move(y));
}

}  // namespace

TEST_CASE("dual activation hits its anchor values") {
  CHECK(std::abs(dual_activation(1.0) - 1.0) < 1e-15);
  CHECK(std::abs(dual_activation(-1.0)) < 1e-15);
  CHECK(std::abs(dual_activation(0.0) - 1.0 / std::numbers::pi) < 1e-15);
  CHECK(std::abs(dual_activation(0.5) - 0.60899778104422935808899658249) <
        1e-12);
}

TEST_CASE("dual activation clamps rounding noise but rejects real overshoot") {
  CHECK(dual_activation(1.0 + 1e-13) == doctest::Approx(1.0));
  CHECK(dual_activation(-1.0 - 1e-13) == doctest::Approx(0.0));
  CHECK_THROWS_AS(dual_activation(1.001), std::domain_error);
  CHECK_THROWS_AS(dual_activation(-1.001), std::domain_error);
}

TEST_CASE("dual activation is monotone with range inside the unit interval") {
  double prev = dual_activation(-1.0);
  for (int i = 1; i <= 10000; ++i) {
    const double u = -1.0 + 2.0 * i / 10000.0;
    const double v = dual_activation(u);
    CHECK(v >= prev - 1e-15);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-15);
    prev = v;
  }
  // Strictly above the identity on the interior: a fixed point only at 1.
  for (double u : {-0.9, -0.3, 0.0, 0.4, 0.95})
    CHECK(dual_activation(u) > u);
}

TEST_CASE("kernel diagonal is one on the scaled sphere") {
  RandomStream rng(60);
  for (auto [d, n, ch] : {std::tuple{16, 4, 8}, {64, 4, 32}, {33, 1, 5}}) {
    NetworkSpec arch = make_two_layer_spec(d, n, ch, Activation::relu);
    PointCloud x = random_sphere_columns(d, n, rng);
    KernelEvaluation eval = kernel_recursion(arch, x, x);
    CHECK(std::abs(eval.k - 1.0) < 1e-12);
    for (double level0 : eval.levels[0])
      CHECK(level0 == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("orthogonal inputs give kernel value one over pi") {
  const int d = 12, n = 1;
  NetworkSpec arch = make_two_layer_spec(d, n, 16, Activation::relu);
  Eigen::MatrixXd mx = Eigen::MatrixXd::Zero(d, n);
  Eigen::MatrixXd my = Eigen::MatrixXd::Zero(d, n);
  mx(0, 0) = std::sqrt(double(d));
  my(1, 0) = std::sqrt(double(d));
  KernelEvaluation eval = kernel_recursion(arch, PointCloud(mx), PointCloud(my));
  CHECK(std::abs(eval.k - 1.0 / std::numbers::pi) < 1e-12);
}

TEST_CASE("half-correlation inputs iterate the dual activation per level") {
  RandomStream rng(61);
  const int d = 16, n = 4;
  PointCloud x = random_sphere_columns(d, n, rng);
  PointCloud y = paired_cloud(x, d / 2.0, rng);

  NetworkSpec two = make_two_layer_spec(d, n, 8, Activation::relu);
  KernelEvaluation e2 = kernel_recursion(two, x, y);
  const double s1 = dual_activation(0.5);
  for (double v : e2.levels[0]) CHECK(v == doctest::Approx(0.5).epsilon(1e-10));
  for (double v : e2.levels[1]) CHECK(v == doctest::Approx(s1).epsilon(1e-10));
  CHECK(e2.k == doctest::Approx(s1).epsilon(1e-10));

  // Depth three: conv(relu) -> conv(relu) -> fully connected identity.
  ConvLayerSpec l1{d, 4, 2, 2, 8, Activation::relu, InitKind::xavier_gaussian};
  ConvLayerSpec l2{8, 2, 2, 1, 8, Activation::relu, InitKind::xavier_gaussian};
  ConvLayerSpec l3{8, 1, 1, 1, 1, Activation::identity,
                   InitKind::xavier_gaussian};
  NetworkSpec three{{l1, l2, l3}};
  KernelEvaluation e3 = kernel_recursion(three, x, y);
  CHECK(e3.levels[2][0] == doctest::Approx(dual_activation(s1)).epsilon(1e-10));
  CHECK(e3.k == doctest::Approx(dual_activation(s1)).epsilon(1e-10));
}

TEST_CASE("kernel is bounded by the iterated dual at half correlation") {
  RandomStream rng(62);
  const int d = 10, n = 4;
  NetworkSpec arch = make_two_layer_spec(d, n, 8, Activation::relu);
  const double cap = dual_activation(0.5);
  for (int rep = 0; rep < 50; ++rep) {
    PointCloud x = random_sphere_columns(d, n, rng);
    PointCloud y = random_sphere_columns(d, n, rng);
    // Force every pairwise correlation at or below one half.
    for (Eigen::Index t = 0; t < y.count(); ++t)
      if (x.m.col(t).dot(y.m.col(t)) > d / 2.0) y.m.col(t) *= -1.0;
    KernelEvaluation eval = kernel_recursion(arch, x, y);
    CHECK(eval.k <= cap + 1e-12);
  }
}

TEST_CASE("kernel values are invariant under a joint rotation") {
  RandomStream rng(63);
  const int d = 14, n = 4;
  NetworkSpec arch = make_two_layer_spec(d, n, 8, Activation::relu);
  for (int rep = 0; rep < 10; ++rep) {
    PointCloud x = random_sphere_columns(d, n, rng);
    PointCloud y = random_sphere_columns(d, n, rng);
    RotationMatrix u = haar_sample(d, rng);
    const double base = kernel_recursion(arch, x, y).k;
    const double rotated = kernel_recursion(arch, act(u, x), act(u, y)).k;
    CHECK(std::abs(base - rotated) < 1e-10);
  }
}

TEST_CASE("kernel recursion rejects malformed inputs") {
  RandomStream rng(64);
  const int d = 8, n = 4;
  NetworkSpec arch = make_two_layer_spec(d, n, 8, Activation::relu);
  PointCloud x = random_sphere_columns(d, n, rng);

  // Off-sphere column: the message points at the offending column.
  PointCloud bad = x;
  bad.m.col(1) *= 0.9;
  try {
    kernel_recursion(arch, x, bad);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("column 2") != std::string::npos);
  }

  // Shape mismatches.
  CHECK_THROWS_AS(kernel_recursion(arch, x, random_sphere_columns(d, 2, rng)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      kernel_recursion(arch, random_sphere_columns(16, n, rng),
                       random_sphere_columns(16, n, rng)),
      std::invalid_argument);

  // No closed-form dual for tanh.
  NetworkSpec tanh_arch = make_two_layer_spec(d, n, 8, Activation::tanh);
  CHECK_THROWS_AS(kernel_recursion(tanh_arch, x, x), std::invalid_argument);

  // Depth one is not enough for a feature map.
  ConvLayerSpec only{d, n, n, 1, 1, Activation::identity,
                     InitKind::xavier_gaussian};
  NetworkSpec shallow{{only}};
  CHECK_THROWS_AS(kernel_recursion(shallow, x, x), std::invalid_argument);
}

TEST_CASE("empirical kernel is an unbiased estimate of the analytic value") {
  RandomStream rng(65);
  const int d = 16, n = 4, channels = 32, trials = 2000;
  NetworkSpec spec = make_two_layer_spec(d, n, channels, Activation::relu);
  PointCloud x = random_sphere_columns(d, n, rng);
  PointCloud y = random_sphere_columns(d, n, rng);
  const double k = kernel_recursion(spec, x, y).k;
  std::vector<double> samples;
  samples.reserve(trials);
  for (int i = 0; i < trials; ++i) {
    std::vector<LayerWeights> w = sample_network(spec, rng);
    samples.push_back(empirical_kernel(spec, w, x, y));
  }
  const double avg = mean(samples);
  const double se = std::sqrt(sample_variance(samples) / trials);
  CHECK(std::abs(avg - k) <= 3.0 * se);
}

TEST_CASE("wide networks concentrate the empirical kernel") {
  std::vector<DeviationStats> stats =
      kernel_deviation_experiment(64, 4, {512}, 100, 777);
  REQUIRE(stats.size() == 1);
  // 95th percentile below 0.1 means at least 95 of the 100 trials landed
  // within 0.1 of the analytic kernel.
  CHECK(stats[0].p95 < 0.1);
  CHECK(stats[0].mean < 0.05);
}

TEST_CASE("deviation quantiles shrink as the width grows") {
  std::vector<DeviationStats> stats =
      kernel_deviation_experiment(32, 4, {16, 64, 256}, 60, 778);
  REQUIRE(stats.size() == 3);
  CHECK(stats[0].channels == 16);
  CHECK(stats[2].channels == 256);
  CHECK(stats[2].p95 <= stats[0].p95 + 1e-12);
  CHECK(stats[2].mean <= stats[0].mean + 1e-12);
  for (const DeviationStats& s : stats) {
    CHECK(s.trials == 60);
    CHECK(s.p50 <= s.p95 + 1e-15);
    CHECK(s.p95 <= s.max + 1e-15);
    CHECK(s.mean >= 0.0);
  }
}

TEST_CASE("deviation experiment validates its arguments") {
  CHECK_THROWS_AS(kernel_deviation_experiment(8, 4, {16}, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(kernel_deviation_experiment(8, 4, {}, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("deviation experiment is reproducible from the seed") {
  auto a = kernel_deviation_experiment(16, 4, {16, 32}, 25, 555);
  auto b = kernel_deviation_experiment(16, 4, {16, 32}, 25, 555);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mean == b[i].mean);
    CHECK(a[i].p95 == b[i].p95);
    CHECK(a[i].max == b[i].max);
  }
  auto c = kernel_deviation_experiment(16, 4, {16, 32}, 25, 556);
  CHECK(a[0].mean != c[0].mean);
}
