#include "orbitadv/compositional_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "orbitadv/stats.hpp"

namespace orbitadv {

double dual_activation(double u) {
  if (std::abs(u) > 1.0 + 1e-12)
    throw std::domain_error("dual_activation: |u| > 1");
  u = std::clamp(u, -1.0, 1.0);
  constexpr double pi = 3.14159265358979323846;
  // sqrt((1-u)(1+u)) keeps full precision near the endpoints.
  double root = std::sqrt((1.0 - u) * (1.0 + u));
  return (u * (pi - std::acos(u)) + root) / pi;
}

namespace {

void check_sphere_columns(const PointCloud& x, const char* which) {
  const double target = std::sqrt(static_cast<double>(x.dim()));
  for (Eigen::Index t = 0; t < x.count(); ++t) {
    double norm = x.m.col(t).norm();
    if (std::abs(norm - target) > 1e-8 * std::max(1.0, target))
      throw std::invalid_argument(
          std::string("kernel_recursion: column ") + std::to_string(t + 1) +
          " of " + which + " does not have norm sqrt(d)");
  }
}

// The per-layer map on kernel values: the dual activation of the layer's
// nonlinearity applied to the window mean.  Only ReLU (arc-cosine dual) and
// identity (identity dual) have closed forms here.
double layer_dual(Activation a, double window_mean) {
  switch (a) {
    case Activation::relu: return dual_activation(window_mean);
    case Activation::identity: return window_mean;
    default:
      throw std::invalid_argument(
          std::string("kernel_recursion: no closed-form dual for "
                      "activation ") + activation_name(a));
  }
}

}  // namespace

KernelEvaluation kernel_recursion(const NetworkSpec& arch, const PointCloud& x,
                                  const PointCloud& y) {
  arch.validate();
  if (arch.depth() < 2)
    throw std::invalid_argument("kernel_recursion: network depth must be >= 2");
  if (x.dim() != y.dim() || x.count() != y.count())
    throw std::invalid_argument("kernel_recursion: input shape mismatch");
  if (x.dim() != arch.layers.front().in_channels ||
      x.count() != arch.layers.front().in_positions)
    throw std::invalid_argument(
        "kernel_recursion: inputs do not match the architecture");
  check_sphere_columns(x, "x");
  check_sphere_columns(y, "y");

  const double d = static_cast<double>(x.dim());
  KernelEvaluation eval;
  eval.levels.resize(arch.depth());
  eval.levels[0].resize(x.count());
  for (Eigen::Index t = 0; t < x.count(); ++t)
    eval.levels[0][t] = x.m.col(t).dot(y.m.col(t)) / d;

  // Hidden layers 1 .. l-1 produce levels 1 .. l-1; the last (fully
  // connected, identity) layer is folded into the top scalar k.
  for (int v = 1; v < arch.depth(); ++v) {
    const ConvLayerSpec& layer = arch.layers[v - 1];
    const std::vector<double>& prev = eval.levels[v - 1];
    std::vector<double>& cur = eval.levels[v];
    cur.resize(layer.out_positions());
    for (int t = 0; t < layer.out_positions(); ++t) {
      KahanSum s;
      for (int r = 0; r < layer.width; ++r)
        s.add(prev[t * layer.stride + r]);
      double window_mean = s.value() / layer.width;
      cur[t] = layer_dual(layer.activation, std::clamp(window_mean, -1.0, 1.0));
    }
  }

  const ConvLayerSpec& last = arch.layers.back();
  const std::vector<double>& top = eval.levels.back();
  KahanSum s;
  for (int r = 0; r < last.width; ++r) s.add(top[r]);
  eval.k = layer_dual(last.activation, std::clamp(s.value() / last.width, -1.0, 1.0));
  return eval;
}

double empirical_kernel(const NetworkSpec& spec,
                        const std::vector<LayerWeights>& weights,
                        const PointCloud& x, const PointCloud& y) {
  PointCloud px = feature_map(spec, weights, x);
  PointCloud py = feature_map(spec, weights, y);
  return px.m.cwiseProduct(py.m).sum();
}

std::vector<DeviationStats> kernel_deviation_experiment(
    int d, int n, const std::vector<int>& channel_counts, int trials,
    std::uint64_t master_seed) {
  if (trials < 1)
    throw std::invalid_argument("kernel_deviation_experiment: trials must be >= 1");
  if (channel_counts.empty())
    throw std::invalid_argument("kernel_deviation_experiment: no channel counts");
  const int max_channels =
      *std::max_element(channel_counts.begin(), channel_counts.end());

  std::vector<std::vector<double>> deviations(channel_counts.size());
  for (auto& v : deviations) v.reserve(trials);

  const NetworkSpec widest = make_two_layer_spec(d, n, max_channels,
                                                 Activation::relu);
  const int conv_positions = widest.layers[0].out_positions();
  const Eigen::Index fan_in = widest.layers[0].width * static_cast<Eigen::Index>(d);

  for (int trial = 0; trial < trials; ++trial) {
    RandomStream rng = derive_stream(master_seed, trial);
    PointCloud x = random_sphere_columns(d, n, rng);
    PointCloud y = random_sphere_columns(d, n, rng);

    // One weight draw at the widest channel count per trial; narrower
    // networks reuse its leading rows so deviations shrink monotonically
    // along a common sample path.
    Eigen::MatrixXd g1(max_channels, fan_in);
    for (Eigen::Index j = 0; j < g1.cols(); ++j)
      for (Eigen::Index i = 0; i < g1.rows(); ++i) g1(i, j) = rng.gaussian();
    Eigen::MatrixXd g2(max_channels, conv_positions);
    for (Eigen::Index j = 0; j < g2.cols(); ++j)
      for (Eigen::Index i = 0; i < g2.rows(); ++i) g2(i, j) = rng.gaussian();

    for (std::size_t ci = 0; ci < channel_counts.size(); ++ci) {
      const int ch = channel_counts[ci];
      NetworkSpec spec = make_two_layer_spec(d, n, ch, Activation::relu);
      std::vector<LayerWeights> weights(2);
      weights[0].w = g1.topRows(ch) / std::sqrt(static_cast<double>(fan_in));
      // Flattening is channels-fastest, so the row prefix of g2 reshapes to
      // the right fully connected weight layout at any channel count.
      weights[1].w = g2.topRows(ch).reshaped().transpose() /
                     std::sqrt(static_cast<double>(ch) * conv_positions);

      double analytic = kernel_recursion(spec, x, y).k;
      double empirical = empirical_kernel(spec, weights, x, y);
      deviations[ci].push_back(std::abs(analytic - empirical));
    }
  }

  std::vector<DeviationStats> out;
  out.reserve(channel_counts.size());
  for (std::size_t ci = 0; ci < channel_counts.size(); ++ci) {
    DeviationStats st;
    st.channels = channel_counts[ci];
    st.trials = trials;
    st.mean = mean(deviations[ci]);
    st.p50 = quantile_nearest_rank(deviations[ci], 0.50);
    st.p95 = quantile_nearest_rank(deviations[ci], 0.95);
    st.max = *std::max_element(deviations[ci].begin(), deviations[ci].end());
    out.push_back(st);
  }
  return out;
}

}  // namespace orbitadv
