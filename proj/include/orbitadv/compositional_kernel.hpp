#pragma once

#include <cstdint>
#include <vector>

#include "orbitadv/conv_net.hpp"
#include "orbitadv/point_cloud.hpp"

namespace orbitadv {

// Dual activation of ReLU under Gaussian weights:
//   (1/pi) * (u * (pi - arccos(u)) + sqrt(1 - u^2)).
// Monotone nondecreasing on [-1, 1] with range [0, 1].  Inputs within 1e-12
// outside [-1, 1] are clamped; anything further is a domain error.
double dual_activation(double u);

// Analytic kernel values of a network on inputs whose columns lie on the
// sphere of radius sqrt(d).  levels[0][t] = <x_t, y_t>/d; level v applies
// the dual activation of layer v to window means of level v-1.  The final
// scalar k is the level matched to the feature map (all layers but the
// last): the fully connected identity last layer contributes the window
// mean without another nonlinearity.
struct KernelEvaluation {
  std::vector<std::vector<double>> levels;
  double k = 0.0;
};

KernelEvaluation kernel_recursion(const NetworkSpec& arch, const PointCloud& x,
                                  const PointCloud& y);

// <Psi(x), Psi(y)> for sampled weights — the empirical counterpart of k.
double empirical_kernel(const NetworkSpec& spec,
                        const std::vector<LayerWeights>& weights,
                        const PointCloud& x, const PointCloud& y);

struct DeviationStats {
  int channels = 0;
  int trials = 0;
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double max = 0.0;
};

// |k - <Psi, Psi>| quantiles for a two-layer ReLU network at each channel
// count, over `trials` independent (weights, input pair) draws.  Channel
// counts share one weight draw per trial (row prefixes of the widest
// matrix), so quantiles across counts are positively coupled and the decay
// trend is visible at moderate trial counts.
std::vector<DeviationStats> kernel_deviation_experiment(
    int d, int n, const std::vector<int>& channel_counts, int trials,
    std::uint64_t master_seed);

}  // namespace orbitadv
