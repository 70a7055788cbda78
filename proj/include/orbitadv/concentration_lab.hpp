#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "orbitadv/point_cloud.hpp"
#include "orbitadv/random_stream.hpp"
#include "orbitadv/so_group.hpp"

namespace orbitadv {

// Black-box membership predicate on an orbit.
struct IndicatorSet {
  std::function<bool(const PointCloud&)> contains;
  std::string label;
};

struct ConcentrationRecord {
  int d = 0;
  double epsilon = 0.0;
  double lipschitz = 0.0;
  double empirical_tail = 0.0;
  double theoretical_bound = 0.0;  // exp(-(d-2) eps^2 / (8 L^2))
  std::size_t samples = 0;
  double halfwidth = 0.0;
};

// Upper-tail frequencies of g around its sample mean under Haar measure,
// paired with the concentration bound.  The claimed Lipschitz constant is
// first spot-checked on random rotation pairs; a violation is an error.
std::vector<ConcentrationRecord> concentration_experiment(
    const std::function<double(const RotationMatrix&)>& g, double lipschitz,
    int d, const std::vector<double>& epsilons, std::size_t samples,
    RandomStream& rng);

struct BlowupWitness {
  PointCloud z;      // the certified point
  PointCloud y;      // a member of A with ||y - z|| <= epsilon
  double distance = 0.0;
};

struct BlowupRecord {
  double epsilon = 0.0;
  double measure_estimate = 0.0;       // mu(A)
  double blowup_lower_estimate = 0.0;  // certified fraction in A_eps
  double theoretical_bound = 0.0;  // 1 - exp(-(d-2) eps^2 mu^2 / (8 L^2))
  std::size_t samples_measure = 0;
  std::size_t samples_blowup = 0;
  double halfwidth_measure = 0.0;
  double halfwidth_blowup = 0.0;
};

struct BlowupOutcome {
  std::vector<BlowupRecord> records;               // one per epsilon
  std::vector<std::vector<BlowupWitness>> witnesses;  // parallel to records
  // Sampled points the probes failed to certify, per epsilon; kept so a
  // closed-form membership rule (when one exists) can be compared against
  // the certification decisions point by point.
  std::vector<std::vector<PointCloud>> uncertified;
};

// Phase 1 estimates mu(A) by orbit sampling; phase 2 certifies membership in
// the blow-up A_eps with plane-rotation probes, both rotation senses, half
// at the full distance eps and half on a ladder over (0, eps].
// Certification is one-sided: every counted point carries a witness, and
// points the probes miss are never counted, so the estimate is a lower
// bound up to Monte Carlo noise.  The bound uses L = ||x0||_sp.
BlowupOutcome blowup_experiment(const IndicatorSet& a, const PointCloud& x0,
                                const std::vector<double>& epsilons,
                                std::size_t samples_measure,
                                std::size_t samples_blowup, RandomStream& rng,
                                int k_probe = 128);

// Closed-form membership in the eps-blow-up of the hemisphere {z_1 >= 0} on
// the orbit of sqrt(d)*e_1 (n = 1): either z_1 >= 0 already, or the chord
// distance to the nearest equator point, sqrt(z_1^2 + (sqrt(d - z_1^2) -
// sqrt(d))^2), is at most eps.  Used to cross-check probe certification.
bool hemisphere_blowup_member(const Eigen::VectorXd& z, double eps);

struct SudakovRecord {
  int m = 0;
  double separation = 0.0;
  double estimate = 0.0;   // E max_i <w, x_i>
  double reference = 0.0;  // separation * sqrt(ln m)
  double ratio = 0.0;      // estimate / reference (0 when m = 1)
  std::size_t samples = 0;
  double std_error = 0.0;
};

// Monte Carlo E max_i <w, x_i> over standard Gaussian w; errors out unless
// the points are pairwise at least `separation` apart.
SudakovRecord sudakov_check(const std::vector<Eigen::VectorXd>& points,
                            double separation, std::size_t samples,
                            RandomStream& rng);

struct SphereTailRecord {
  double t = 0.0;
  double empirical_tail = 0.0;
  double bound = 0.0;  // exp(-t^2 / (2d))
  std::size_t samples = 0;
  double halfwidth = 0.0;
};

// Tail of <x, y> for independent uniform points on the sphere of radius
// sqrt(d), against exp(-t^2/2d).
std::vector<SphereTailRecord> sphere_tail_check(
    int d, const std::vector<double>& t_values, std::size_t samples,
    RandomStream& rng);

struct VarianceRecord {
  double variance = 0.0;
  double bound = 4.0;
  std::size_t trials = 0;
  double sigma = 0.0;  // standard error of the variance estimate (batched)
  double max_feature_norm = 0.0;
};

// Var(max_i <G, Psi_i>) over fresh standard-Gaussian last layers G, holding
// the feature maps fixed.  Requires every ||Psi_i|| <= 2, under which the
// Gaussian concentration bound gives Var <= 4.
VarianceRecord variance_check_last_layer(
    const std::vector<PointCloud>& feature_maps, std::size_t trials,
    RandomStream& rng);

}  // namespace orbitadv
