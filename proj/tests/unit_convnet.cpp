#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "orbitadv/conv_net.hpp"
#include "orbitadv/point_cloud.hpp"
#include "orbitadv/random_stream.hpp"
#include "orbitadv/so_group.hpp"
#include "orbitadv/stats.hpp"

using namespace orbitadv;

namespace {

PointCloud random_cloud(int d, int n, RandomStream& rng) {
  Eigen::MatrixXd m(d, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < d; ++i) m(i, j) = rng.gaussian();
  return PointCloud(std::move(m));
}

}  // namespace

TEST_CASE("activation names round trip and oddness is classified") {
  for (Activation a : {Activation::relu, Activation::identity,
                       Activation::tanh, Activation::arctan}) {
    CHECK(activation_from_name(activation_name(a)) == a);
  }
  CHECK_THROWS_AS(activation_from_name("sigmoid"), std::invalid_argument);
  CHECK_FALSE(activation_is_odd(Activation::relu));
  CHECK(activation_is_odd(Activation::identity));
  CHECK(activation_is_odd(Activation::tanh));
  CHECK(activation_is_odd(Activation::arctan));
  CHECK(apply_activation(Activation::relu, -2.0) == 0.0);
  CHECK(apply_activation(Activation::relu, 3.0) == 3.0);
  CHECK(apply_activation(Activation::tanh, 0.5) == doctest::Approx(std::tanh(0.5)));
}

TEST_CASE("window selects the expected columns") {
  Eigen::MatrixXd m(2, 4);
  m << 1, 2, 3, 4,
       5, 6, 7, 8;
  PointCloud x(m);
  // Second window (index 1) of width 2 at stride 2 covers columns 3 and 4.
  PointCloud w = window(x, 1, 2, 2);
  CHECK(w.count() == 2);
  CHECK(w.m(0, 0) == 3);
  CHECK(w.m(1, 0) == 7);
  CHECK(w.m(0, 1) == 4);
  CHECK(w.m(1, 1) == 8);
  // Full-width window is the whole input.
  CHECK((window(x, 0, 1, 4).m - m).norm() == 0.0);
  CHECK_THROWS_AS(window(x, 2, 2, 2), std::out_of_range);
  CHECK_THROWS_AS(window(x, 0, 1, 5), std::invalid_argument);
}

TEST_CASE("layer spec validation enforces shape constraints") {
  ConvLayerSpec s;
  s.in_channels = 3;
  s.in_positions = 5;
  s.width = 2;
  s.stride = 2;
  s.out_channels = 4;
  // stride 2 does not divide 5 - 2.
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.stride = 3;
  CHECK_NOTHROW(s.validate());
  CHECK(s.out_positions() == 2);
  s.width = 6;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.width = 2;
  s.out_channels = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("a scalar shared weight acts pointwise on positions") {
  ConvLayerSpec spec;
  spec.in_channels = 1;
  spec.in_positions = 2;
  spec.width = 1;
  spec.stride = 1;
  spec.out_channels = 1;
  spec.activation = Activation::identity;
  LayerWeights lw;
  lw.w = Eigen::MatrixXd::Constant(1, 1, 2.0);
  Eigen::MatrixXd m(1, 2);
  m << 3, -1;
  PointCloud out = layer_forward(spec, lw, PointCloud(m));
  CHECK(out.m(0, 0) == 6.0);
  CHECK(out.m(0, 1) == -2.0);
  spec.activation = Activation::relu;
  out = layer_forward(spec, lw, PointCloud(m));
  CHECK(out.m(0, 0) == 6.0);
  CHECK(out.m(0, 1) == 0.0);
}

TEST_CASE("windows are flattened channels-fastest") {
  ConvLayerSpec spec;
  spec.in_channels = 2;
  spec.in_positions = 2;
  spec.width = 2;
  spec.stride = 1;
  spec.out_channels = 4;
  spec.activation = Activation::identity;
  // Each output row picks out one coordinate of the flattened window.
  LayerWeights lw;
  lw.w = Eigen::MatrixXd::Identity(4, 4);
  Eigen::MatrixXd m(2, 2);
  m << 1, 3,
       2, 4;
  PointCloud out = layer_forward(spec, lw, PointCloud(m));
  // Expected order: both channels of position 1, then both of position 2.
  CHECK(out.m(0, 0) == 1.0);
  CHECK(out.m(1, 0) == 2.0);
  CHECK(out.m(2, 0) == 3.0);
  CHECK(out.m(3, 0) == 4.0);
}

TEST_CASE("a stride-2 layer computes both windows with the shared weights") {
  ConvLayerSpec spec;
  spec.in_channels = 1;
  spec.in_positions = 4;
  spec.width = 2;
  spec.stride = 2;
  spec.out_channels = 1;
  spec.activation = Activation::identity;
  LayerWeights lw;
  lw.w = Eigen::MatrixXd(1, 2);
  lw.w << 1.0, -1.0;
  Eigen::MatrixXd m(1, 4);
  m << 5, 2, 9, 4;
  PointCloud out = layer_forward(spec, lw, PointCloud(m));
  CHECK(out.count() == 2);
  CHECK(out.m(0, 0) == 3.0);   // 5 - 2
  CHECK(out.m(0, 1) == 5.0);   // 9 - 4
}

TEST_CASE("layer_forward rejects mismatched inputs and weights") {
  ConvLayerSpec spec;
  spec.in_channels = 2;
  spec.in_positions = 3;
  spec.width = 3;
  spec.stride = 1;
  spec.out_channels = 2;
  LayerWeights lw;
  lw.w = Eigen::MatrixXd::Zero(2, 6);
  RandomStream rng(40);
  CHECK_NOTHROW(layer_forward(spec, lw, random_cloud(2, 3, rng)));
  CHECK_THROWS_AS(layer_forward(spec, lw, random_cloud(3, 3, rng)),
                  std::invalid_argument);
  lw.w = Eigen::MatrixXd::Zero(2, 5);
  CHECK_THROWS_AS(layer_forward(spec, lw, random_cloud(2, 3, rng)),
                  std::invalid_argument);
}

TEST_CASE("two-layer factory produces composing scalar networks") {
  NetworkSpec even = make_two_layer_spec(10, 4, 32, Activation::relu);
  CHECK(even.depth() == 2);
  CHECK(even.layers[0].width == 2);
  CHECK(even.layers[0].stride == 2);
  CHECK(even.layers[0].out_positions() == 2);
  CHECK(even.layers[1].in_positions == 2);
  CHECK(even.scalar_output());
  CHECK_FALSE(even.all_odd());

  NetworkSpec single = make_two_layer_spec(10, 1, 16, Activation::tanh);
  CHECK(single.layers[0].width == 1);
  CHECK(single.layers[0].out_positions() == 1);
  CHECK(single.scalar_output());
  CHECK(single.all_odd());

  NetworkSpec odd_n = make_two_layer_spec(6, 3, 8, Activation::arctan);
  CHECK(odd_n.layers[0].width == 3);
  CHECK(odd_n.layers[0].out_positions() == 1);
  CHECK(odd_n.scalar_output());
}

TEST_CASE("network validation flags non-composing layers") {
  NetworkSpec spec = make_two_layer_spec(8, 4, 16, Activation::relu);
  spec.layers[1].in_channels = 17;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("xavier weights have the reciprocal fan-in variance") {
  ConvLayerSpec spec;
  spec.in_channels = 32;
  spec.in_positions = 2;
  spec.width = 2;
  spec.stride = 1;
  spec.out_channels = 128;
  spec.init = InitKind::xavier_gaussian;
  NetworkSpec net{{spec}};
  RandomStream rng(41);
  std::vector<LayerWeights> w = sample_network(net, rng);
  const Eigen::MatrixXd& m = w[0].w;
  CHECK(m.rows() == 128);
  CHECK(m.cols() == 64);
  const double mean = m.mean();
  const double var = (m.array() - mean).square().sum() / (m.size() - 1);
  CHECK(std::abs(mean) < 0.01);
  CHECK(var > 0.8 / 64.0);
  CHECK(var < 1.2 / 64.0);
}

TEST_CASE("row-orthonormal weights form an orthonormal family") {
  ConvLayerSpec spec;
  spec.in_channels = 16;
  spec.in_positions = 1;
  spec.width = 1;
  spec.stride = 1;
  spec.out_channels = 8;
  spec.init = InitKind::row_orthonormal;
  NetworkSpec net{{spec}};
  RandomStream rng(42);
  std::vector<LayerWeights> w = sample_network(net, rng);
  Eigen::MatrixXd gram = w[0].w * w[0].w.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).norm() < 1e-10);

  spec.out_channels = 17;  // more rows than the fan-in supports
  NetworkSpec bad{{spec}};
  CHECK_THROWS_AS(sample_network(bad, rng), std::invalid_argument);
}

TEST_CASE("weight sampling is reproducible from the seed") {
  NetworkSpec spec = make_two_layer_spec(12, 4, 24, Activation::relu);
  RandomStream a(43), b(43);
  std::vector<LayerWeights> wa = sample_network(spec, a);
  std::vector<LayerWeights> wb = sample_network(spec, b);
  REQUIRE(wa.size() == wb.size());
  for (std::size_t i = 0; i < wa.size(); ++i)
    CHECK((wa[i].w - wb[i].w).norm() == 0.0);
}

TEST_CASE("network output distribution is rotation invariant") {
  const int d = 8, n = 4;
  NetworkSpec spec = make_two_layer_spec(d, n, 16, Activation::relu);
  RandomStream rng(44);
  PointCloud x0 = random_sphere_columns(d, n, rng);
  RotationMatrix u = haar_sample(d, rng);
  PointCloud xr = act(RotationMatrix(u.m.transpose()), x0);
  std::vector<double> a, b;
  RandomStream wa(45), wb(46);
  for (int i = 0; i < 10000; ++i)
    a.push_back(network_forward(spec, sample_network(spec, wa), x0));
  for (int i = 0; i < 10000; ++i)
    b.push_back(network_forward(spec, sample_network(spec, wb), xr));
  CHECK_FALSE(two_sample_ks(a, b, 0.01).reject);
}

TEST_CASE("odd-activation networks are odd functions of the input") {
  const int d = 10, n = 4;
  NetworkSpec spec = make_two_layer_spec(d, n, 20, Activation::tanh);
  RandomStream rng(47);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<LayerWeights> w = sample_network(spec, rng);
    PointCloud x = random_cloud(d, n, rng);
    const double plus = network_forward(spec, w, x);
    const double minus = network_forward(spec, w, PointCloud(-x.m));
    CHECK(std::abs(plus + minus) < 1e-10);
  }
}

TEST_CASE("relu networks are positively homogeneous in the input scale") {
  // Each bias-free layer satisfies h(c x) = c h(x) for c > 0, and the
  // composition of degree-one maps is again degree one.
  const int d = 6, n = 4;
  NetworkSpec spec = make_two_layer_spec(d, n, 12, Activation::relu);
  RandomStream rng(48);
  for (double c : {0.5, 2.0, 7.25}) {
    std::vector<LayerWeights> w = sample_network(spec, rng);
    PointCloud x = random_cloud(d, n, rng);
    const double base = network_forward(spec, w, x);
    const double scaled = network_forward(spec, w, PointCloud(c * x.m));
    CHECK(scaled == doctest::Approx(c * base).epsilon(1e-8));
    // Sign is therefore determined by the direction alone.
    CHECK(((scaled > 0) == (base > 0)));
  }
}

TEST_CASE("network_forward demands a scalar head") {
  ConvLayerSpec spec;
  spec.in_channels = 3;
  spec.in_positions = 2;
  spec.width = 1;
  spec.stride = 1;
  spec.out_channels = 2;
  NetworkSpec net{{spec}};
  RandomStream rng(49);
  std::vector<LayerWeights> w = sample_network(net, rng);
  CHECK_THROWS_AS(network_forward(net, w, random_cloud(3, 2, rng)),
                  std::invalid_argument);
}

TEST_CASE("feature maps are the normalized penultimate activations") {
  const int d = 100, n = 1, channels = 100;
  NetworkSpec spec = make_two_layer_spec(d, n, channels, Activation::relu);
  RandomStream rng(50);
  std::vector<LayerWeights> w = sample_network(spec, rng);
  PointCloud x = random_sphere_columns(d, n, rng);
  PointCloud hidden = layer_forward(spec.layers[0], w[0], x);
  PointCloud psi = feature_map(spec, w, x);
  const double scale = std::sqrt(2.0 / 100.0);
  CHECK((psi.m - scale * hidden.m).norm() < 1e-12);
}

TEST_CASE("feature map norm concentrates near one on sphere input") {
  const int d = 64, n = 4, channels = 256;
  NetworkSpec spec = make_two_layer_spec(d, n, channels, Activation::relu);
  RandomStream rng(51);
  PointCloud x = random_sphere_columns(d, n, rng);
  double sum = 0.0;
  const int trials = 200;
  for (int i = 0; i < trials; ++i) {
    std::vector<LayerWeights> w = sample_network(spec, rng);
    sum += feature_map(spec, w, x).m.squaredNorm();
  }
  // E ||Psi||^2 = k(x, x) = 1 on the scaled sphere.
  CHECK(sum / trials == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("feature_map requires at least two layers") {
  ConvLayerSpec spec;
  spec.in_channels = 2;
  spec.in_positions = 1;
  spec.width = 1;
  spec.stride = 1;
  spec.out_channels = 1;
  NetworkSpec net{{spec}};
  RandomStream rng(52);
  std::vector<LayerWeights> w = sample_network(net, rng);
  CHECK_THROWS_AS(feature_map(net, w, random_cloud(2, 1, rng)),
                  std::invalid_argument);
}
