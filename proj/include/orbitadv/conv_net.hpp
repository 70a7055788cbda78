#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "orbitadv/point_cloud.hpp"
#include "orbitadv/random_stream.hpp"

namespace orbitadv {

enum class Activation { relu, identity, tanh, arctan };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);
bool activation_is_odd(Activation a);
double apply_activation(Activation a, double x);

enum class InitKind { xavier_gaussian, row_orthonormal };

// One convolutional layer: the shared weight matrix W (out_channels x
// in_channels*width) is applied to every length-`width` window of positions,
// stepping by `stride`, followed by the entrywise activation.  A fully
// connected layer is the special case width = in_positions.
struct ConvLayerSpec {
  int in_channels = 0;
  int in_positions = 0;
  int width = 0;
  int stride = 1;
  int out_channels = 0;
  Activation activation = Activation::relu;
  InitKind init = InitKind::xavier_gaussian;

  int out_positions() const { return (in_positions - width) / stride + 1; }

  // width <= in_positions, stride >= 1 and stride divides
  // in_positions - width; positive channel counts.
  void validate() const;
};

struct LayerWeights {
  Eigen::MatrixXd w;  // out_channels x (in_channels * width)
  InitKind init = InitKind::xavier_gaussian;
};

struct NetworkSpec {
  std::vector<ConvLayerSpec> layers;

  int depth() const { return static_cast<int>(layers.size()); }

  // Validates each layer and checks that consecutive layers compose.
  void validate() const;

  // True when the network ends in a single scalar output.
  bool scalar_output() const;

  // True when every activation is odd (identity counts as odd).
  bool all_odd() const;
};

// Convenience constructor used by experiments and the CLI: a depth-2 network
// on inputs of n positions in R^d — a convolutional layer (width 2, stride 2
// when n allows it, otherwise width n) with `channels` output channels and
// the given activation, followed by a fully connected identity layer with
// scalar output.
NetworkSpec make_two_layer_spec(int d, int n, int channels,
                                Activation activation);

// The w consecutive columns starting at position i*s (0-based window index
// i, valid for 0 <= i <= (n-w)/s).
PointCloud window(const PointCloud& x, int i, int s, int w);

PointCloud layer_forward(const ConvLayerSpec& spec, const LayerWeights& lw,
                         const PointCloud& x);

// Independent weights per layer.  Xavier: i.i.d. N(0, 1/(in_channels*width)).
// Row-orthonormal: rows form an orthonormal family (requires out_channels <=
// in_channels*width).
std::vector<LayerWeights> sample_network(const NetworkSpec& spec,
                                         RandomStream& rng);

double network_forward(const NetworkSpec& spec,
                       const std::vector<LayerWeights>& weights,
                       const PointCloud& x);

// Output of all layers but the last, scaled by
// sqrt(2^(l-1) / (out_positions * out_channels of layer l-1)).
PointCloud feature_map(const NetworkSpec& spec,
                       const std::vector<LayerWeights>& weights,
                       const PointCloud& x);

}  // namespace orbitadv
