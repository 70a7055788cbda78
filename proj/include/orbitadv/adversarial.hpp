#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "orbitadv/conv_net.hpp"
#include "orbitadv/point_cloud.hpp"
#include "orbitadv/random_stream.hpp"

namespace orbitadv {

// Sign with a distinguished zero: f(x) = 0 is its own value, and a flip
// requires strict opposition (+ against -).
int sign_of(double x);

struct AdversarialBudget {
  double tau = 0.0;
  int d = 0;
  double spectral = 0.0;  // ||x0||_sp
  double norm = 0.0;      // ||x0||
  double epsilon = 0.0;   // tau * spectral / sqrt(d - 2)
  double success_floor = 0.0;  // 1 - 2 exp(-tau^2 / 32)
};

// Derived perturbation budget; requires d >= 3 and a nonzero input.
AdversarialBudget make_budget(double tau, const PointCloud& x0);

using OrbitFunction = std::function<double(const PointCloud&)>;

struct CandidateTrace {
  double distance = 0.0;
  int sign = 0;
};

struct AdversarialResult {
  int base_sign = 0;
  bool found = false;
  std::optional<PointCloud> flip_point;
  double achieved_distance = 0.0;  // +inf when no flip was found at all
  AdversarialBudget budget;
  std::size_t evaluations = 0;
  std::vector<CandidateTrace> trace;
};

// Knobs of the two-phase search; the counts are config-overridable defaults,
// the procedure itself is fixed.
struct SearchParams {
  int planes = 64;      // phase-1 random 2-planes
  int rungs = 32;       // geometric distance ladder per plane
  int path_steps = 32;  // ascending scan of the shrink path per Haar flip
};

// Two-phase orbit search.  Phase 1 sweeps random 2-planes (orthonormalized
// Gaussian pairs) over a geometric ladder of angles whose induced distance
// spans (0, 2*epsilon], bisecting to relative 1e-6 on a sign flip.  Phase 2
// draws full Haar rotations; for any flip found, the rotation is split into
// invariant-plane rotations and the flip is pulled toward the identity along
// the family that scales every plane angle, again by bisection.  Returns the
// minimum-distance flip; found = distance <= budget.epsilon.
AdversarialResult find_adversarial(const OrbitFunction& f, const PointCloud& x0,
                                   const AdversarialBudget& budget,
                                   int max_candidates, RandomStream& rng,
                                   const SearchParams& params = {});

struct BalanceReport {
  double p_plus = 0.0;   // fraction of orbit samples with f >= 0
  double p_minus = 0.0;  // fraction with f <= 0
  std::size_t samples = 0;
  double confidence_halfwidth = 0.0;
};

// Monte Carlo balance of the sign regions on the orbit of x0.
BalanceReport estimate_balance(const OrbitFunction& f, const PointCloud& x0,
                               std::size_t samples, RandomStream& rng);

enum class TheoremKind { odd, relu };

struct TheoremTauRecord {
  double tau = 0.0;
  double epsilon = 0.0;
  double success_floor = 0.0;
  double success_rate = 0.0;
  double mean_distance_ratio = 0.0;  // achieved/epsilon over successes
  int successes = 0;
};

struct TheoremTrialResult {
  TheoremKind kind = TheoremKind::odd;
  int networks = 0;
  double zero_sign_rate = 0.0;  // fraction of draws with f(x0) = 0 exactly
  std::vector<TheoremTauRecord> by_tau;
};

// Samples `networks` independent weight draws (stream derived per network
// from the master seed) and runs the search at each tau in ascending order.
// Flips found at a smaller budget are reused at larger ones, so the success
// rate is nondecreasing in tau by construction.
TheoremTrialResult theorem_trial(TheoremKind kind, const NetworkSpec& arch,
                                 const PointCloud& x0,
                                 std::vector<double> taus, int networks,
                                 int max_candidates,
                                 std::uint64_t master_seed,
                                 const SearchParams& params = {});

// One network's worth of theorem_trial: derives the per-network stream,
// samples weights, and runs the ascending-tau searches with the carried
// best flip.  carried[i] is the best flip distance known after the tau_i
// stage (0 throughout when f(x0) = 0); taus must be sorted ascending.
// Independent across net_index, so trials can run in parallel.
struct TheoremNetOutcome {
  bool zero_sign = false;
  std::vector<double> carried;
};

TheoremNetOutcome theorem_trial_single(TheoremKind kind,
                                       const NetworkSpec& arch,
                                       const PointCloud& x0,
                                       const std::vector<double>& taus,
                                       int net_index, int max_candidates,
                                       std::uint64_t master_seed,
                                       const SearchParams& params = {});

struct SeparationStats {
  int m = 0;  // points per trial: floor(sqrt(ln d))
  int trials = 0;
  double separation_frequency = 0.0;  // some pair has f(z^i) < 0 < f(z^j)
  double inner_product_event_frequency = 0.0;  // all column pairs <= d/2
  double inner_product_event_bound = 0.0;  // 1 - 2 C(m,2) n exp(-d/8)
  double mean_min_feature_distance = 0.0;
  double mean_max_feature_norm = 0.0;
};

// Per trial: m Haar orbit points and a fresh network; records whether the
// network separates some pair by sign, the all-pairs column inner-product
// event, and feature-map separation statistics.
SeparationStats separation_experiment(const NetworkSpec& arch,
                                      const PointCloud& x0, int trials,
                                      std::uint64_t master_seed);

}  // namespace orbitadv
