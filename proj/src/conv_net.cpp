#include "orbitadv/conv_net.hpp"

#include <cmath>
#include <stdexcept>

namespace orbitadv {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::identity: return "identity";
    case Activation::tanh: return "tanh";
    case Activation::arctan: return "arctan";
  }
  throw std::logic_error("activation_name: unknown activation");
}

Activation activation_from_name(const std::string& name) {
  if (name == "relu") return Activation::relu;
  if (name == "identity") return Activation::identity;
  if (name == "tanh") return Activation::tanh;
  if (name == "arctan") return Activation::arctan;
  throw std::invalid_argument("unknown activation: " + name);
}

bool activation_is_odd(Activation a) {
  return a == Activation::identity || a == Activation::tanh ||
         a == Activation::arctan;
}

double apply_activation(Activation a, double x) {
  switch (a) {
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::identity: return x;
    case Activation::tanh: return std::tanh(x);
    case Activation::arctan: return std::atan(x);
  }
  throw std::logic_error("apply_activation: unknown activation");
}

void ConvLayerSpec::validate() const {
  if (in_channels < 1 || out_channels < 1)
    throw std::invalid_argument("layer: channel counts must be positive");
  if (in_positions < 1)
    throw std::invalid_argument("layer: in_positions must be positive");
  if (width < 1 || width > in_positions)
    throw std::invalid_argument("layer: need 1 <= width <= in_positions");
  if (stride < 1)
    throw std::invalid_argument("layer: stride must be positive");
  if ((in_positions - width) % stride != 0)
    throw std::invalid_argument(
        "layer: stride must divide in_positions - width");
}

void NetworkSpec::validate() const {
  if (layers.empty()) throw std::invalid_argument("network: no layers");
  for (const ConvLayerSpec& layer : layers) layer.validate();
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    if (layers[i].out_channels != layers[i + 1].in_channels ||
        layers[i].out_positions() != layers[i + 1].in_positions)
      throw std::invalid_argument(
          "network: layer " + std::to_string(i + 1) +
          " output shape does not match layer " + std::to_string(i + 2) +
          " input shape");
  }
}

bool NetworkSpec::scalar_output() const {
  if (layers.empty()) return false;
  const ConvLayerSpec& last = layers.back();
  return last.out_channels == 1 && last.out_positions() == 1;
}

bool NetworkSpec::all_odd() const {
  for (const ConvLayerSpec& layer : layers)
    if (!activation_is_odd(layer.activation)) return false;
  return true;
}

NetworkSpec make_two_layer_spec(int d, int n, int channels,
                                Activation activation) {
  ConvLayerSpec conv;
  conv.in_channels = d;
  conv.in_positions = n;
  conv.width = (n >= 2 && n % 2 == 0) ? 2 : n;
  conv.stride = (n >= 2 && n % 2 == 0) ? 2 : 1;
  conv.out_channels = channels;
  conv.activation = activation;

  ConvLayerSpec fc;
  fc.in_channels = channels;
  fc.in_positions = conv.out_positions();
  fc.width = fc.in_positions;
  fc.stride = 1;
  fc.out_channels = 1;
  fc.activation = Activation::identity;

  NetworkSpec spec{{conv, fc}};
  spec.validate();
  return spec;
}

PointCloud window(const PointCloud& x, int i, int s, int w) {
  const int n = static_cast<int>(x.count());
  if (w < 1 || w > n || s < 1)
    throw std::invalid_argument("window: invalid width or stride");
  if (i < 0 || i > (n - w) / s || i * s + w > n)
    throw std::out_of_range("window: index out of range");
  return PointCloud(x.m.middleCols(i * s, w));
}

namespace {

// Stacks the w columns of a window into one vector of length d*w, channels
// fastest within each position (column-major flattening).
Eigen::VectorXd flatten_window(const PointCloud& x, int i, int s, int w) {
  return x.m.middleCols(i * s, w).reshaped();
}

}  // namespace

PointCloud layer_forward(const ConvLayerSpec& spec, const LayerWeights& lw,
                         const PointCloud& x) {
  spec.validate();
  if (x.dim() != spec.in_channels || x.count() != spec.in_positions)
    throw std::invalid_argument("layer_forward: input shape mismatch");
  if (lw.w.rows() != spec.out_channels ||
      lw.w.cols() != static_cast<Eigen::Index>(spec.in_channels) * spec.width)
    throw std::invalid_argument("layer_forward: weight shape mismatch");

  const int out_n = spec.out_positions();
  Eigen::MatrixXd out(spec.out_channels, out_n);
  for (int t = 0; t < out_n; ++t) {
    out.col(t).noalias() =
        lw.w * flatten_window(x, t, spec.stride, spec.width);
  }
  switch (spec.activation) {
    case Activation::identity: break;
    case Activation::relu: out = out.cwiseMax(0.0); break;
    case Activation::tanh: out = out.array().tanh().matrix(); break;
    case Activation::arctan: out = out.array().atan().matrix(); break;
  }
  return PointCloud(std::move(out));
}

std::vector<LayerWeights> sample_network(const NetworkSpec& spec,
                                         RandomStream& rng) {
  spec.validate();
  std::vector<LayerWeights> weights;
  weights.reserve(spec.layers.size());
  for (const ConvLayerSpec& layer : spec.layers) {
    const Eigen::Index fan_in =
        static_cast<Eigen::Index>(layer.in_channels) * layer.width;
    Eigen::MatrixXd w(layer.out_channels, fan_in);
    if (layer.init == InitKind::xavier_gaussian) {
      const double sd = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i)
          w(i, j) = sd * rng.gaussian();
    } else {
      if (layer.out_channels > fan_in)
        throw std::invalid_argument(
            "sample_network: row-orthonormal init needs out_channels <= "
            "in_channels * width");
      Eigen::MatrixXd g(fan_in, layer.out_channels);
      for (Eigen::Index j = 0; j < g.cols(); ++j)
        for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.gaussian();
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
      Eigen::MatrixXd q =
          qr.householderQ() * Eigen::MatrixXd::Identity(fan_in, layer.out_channels);
      // Sign-correct against R's diagonal so the frame is uniform over
      // orthonormal families, not biased by the QR gauge.
      for (Eigen::Index j = 0; j < q.cols(); ++j)
        if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
      w = q.transpose();
    }
    weights.push_back(LayerWeights{std::move(w), layer.init});
  }
  return weights;
}

double network_forward(const NetworkSpec& spec,
                       const std::vector<LayerWeights>& weights,
                       const PointCloud& x) {
  spec.validate();
  if (!spec.scalar_output())
    throw std::invalid_argument("network_forward: network is not scalar-valued");
  if (weights.size() != spec.layers.size())
    throw std::invalid_argument("network_forward: weight count mismatch");
  PointCloud h = x;
  for (std::size_t v = 0; v < spec.layers.size(); ++v)
    h = layer_forward(spec.layers[v], weights[v], h);
  return h.m(0, 0);
}

PointCloud feature_map(const NetworkSpec& spec,
                       const std::vector<LayerWeights>& weights,
                       const PointCloud& x) {
  spec.validate();
  if (spec.depth() < 2)
    throw std::invalid_argument("feature_map: network depth must be >= 2");
  if (weights.size() != spec.layers.size())
    throw std::invalid_argument("feature_map: weight count mismatch");
  PointCloud h = x;
  for (std::size_t v = 0; v + 1 < spec.layers.size(); ++v)
    h = layer_forward(spec.layers[v], weights[v], h);
  const ConvLayerSpec& penultimate = spec.layers[spec.layers.size() - 2];
  const double scale =
      std::sqrt(std::pow(2.0, spec.depth() - 1) /
                (static_cast<double>(penultimate.out_positions()) *
                 penultimate.out_channels));
  return PointCloud(scale * h.m);
}

}  // namespace orbitadv
