#include "orbitadv/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "orbitadv/so_group.hpp"
#include "orbitadv/stats.hpp"

namespace orbitadv {

int sign_of(double x) {
  if (x > 0.0) return 1;
  if (x < 0.0) return -1;
  return 0;
}

AdversarialBudget make_budget(double tau, const PointCloud& x0) {
  if (!(tau > 0.0))
    throw std::invalid_argument("make_budget: tau must be positive");
  if (x0.dim() < 3)
    throw std::invalid_argument("make_budget: dimension must be >= 3");
  if (x0.norm() == 0.0)
    throw std::invalid_argument("make_budget: input must be nonzero");
  AdversarialBudget b;
  b.tau = tau;
  b.d = static_cast<int>(x0.dim());
  b.spectral = x0.spectral_norm();
  b.norm = x0.norm();
  b.epsilon = tau * b.spectral / std::sqrt(static_cast<double>(b.d - 2));
  b.success_floor = 1.0 - 2.0 * std::exp(-tau * tau / 32.0);
  return b;
}

namespace {

// x0 rotated by `theta` in the plane (u, v), given the precomputed column
// projections a = X^T u, b = X^T v.
PointCloud plane_point(const PointCloud& x0, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& v, const Eigen::RowVectorXd& a,
                       const Eigen::RowVectorXd& b, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::MatrixXd out = x0.m;
  out.noalias() += u * ((c - 1.0) * a - s * b);
  out.noalias() += v * ((c - 1.0) * b + s * a);
  return PointCloud(std::move(out));
}

}  // namespace

AdversarialResult find_adversarial(const OrbitFunction& f, const PointCloud& x0,
                                   const AdversarialBudget& budget,
                                   int max_candidates, RandomStream& rng,
                                   const SearchParams& params) {
  if (x0.norm() == 0.0)
    throw std::invalid_argument("find_adversarial: input must be nonzero");
  if (max_candidates < 1)
    throw std::invalid_argument("find_adversarial: max_candidates must be >= 1");

  AdversarialResult result;
  result.budget = budget;
  result.base_sign = sign_of(f(x0));
  result.evaluations = 1;

  if (result.base_sign == 0) {
    // Degenerate branch: the claim holds at x0 itself.
    result.found = true;
    result.achieved_distance = 0.0;
    return result;
  }
  const int base = result.base_sign;
  const Eigen::Index d = x0.dim();
  const double eps = budget.epsilon;

  double best = std::numeric_limits<double>::infinity();
  std::optional<PointCloud> best_point;

  auto consider = [&](PointCloud candidate) {
    double dist = (candidate.m - x0.m).norm();
    if (dist < best) {
      best = dist;
      best_point = std::move(candidate);
    }
  };

  int candidates_used = 0;

  // ---- Phase 1: random 2-planes, geometric distance ladder ---------------
  const int plane_budget = std::min(params.planes, max_candidates);
  const int rungs = std::max(params.rungs, 2);
  for (int p = 0; p < plane_budget; ++p) {
    ++candidates_used;
    Eigen::VectorXd u(d), v(d);
    for (Eigen::Index i = 0; i < d; ++i) u[i] = rng.gaussian();
    for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.gaussian();
    if (u.norm() == 0.0) continue;
    u.normalize();
    v -= u.dot(v) * u;
    if (v.norm() < 1e-12) continue;
    v.normalize();

    Eigen::RowVectorXd a = u.transpose() * x0.m;
    Eigen::RowVectorXd b = v.transpose() * x0.m;
    const double rho = std::sqrt(a.squaredNorm() + b.squaredNorm());
    if (rho < 1e-12 * x0.norm()) {
      result.trace.push_back(CandidateTrace{0.0, base});
      continue;
    }

    double prev_theta = 0.0;
    bool flipped = false;
    double reached = 0.0;
    for (int j = 0; j < rungs; ++j) {
      const double delta =
          2.0 * eps *
          std::pow(1e-3, static_cast<double>(rungs - 1 - j) / (rungs - 1));
      const double q = delta / (2.0 * rho);
      const double theta = 2.0 * std::asin(std::min(1.0, q));
      PointCloud cand = plane_point(x0, u, v, a, b, theta);
      const int s = sign_of(f(cand));
      ++result.evaluations;
      reached = (cand.m - x0.m).norm();
      if (s == -base) {
        double lo = prev_theta, hi = theta;
        for (int iter = 0; iter < 60 && (hi - lo) > 1e-6 * hi; ++iter) {
          const double mid = 0.5 * (lo + hi);
          PointCloud probe = plane_point(x0, u, v, a, b, mid);
          ++result.evaluations;
          if (sign_of(f(probe)) == -base)
            hi = mid;
          else
            lo = mid;
        }
        PointCloud flip = plane_point(x0, u, v, a, b, hi);
        result.trace.push_back(
            CandidateTrace{(flip.m - x0.m).norm(), -base});
        consider(std::move(flip));
        flipped = true;
        break;
      }
      prev_theta = theta;
      if (q >= 1.0) break;  // the plane's antipode was just examined
    }
    if (!flipped) result.trace.push_back(CandidateTrace{reached, base});
  }

  // ---- Phase 2: Haar candidates pulled toward the identity ---------------
  const int path_steps = std::max(params.path_steps, 2);
  while (best > eps && candidates_used < max_candidates) {
    ++candidates_used;
    RotationMatrix vrot = haar_sample(d, rng);
    PointCloud z = act(vrot, x0);
    const int s = sign_of(f(z));
    ++result.evaluations;
    result.trace.push_back(CandidateTrace{(z.m - x0.m).norm(), s});
    if (s != -base) continue;

    const std::vector<PlaneRotation> planes = rotation_planes(vrot);
    // Ascending scan for the first sign change along the shrink path, then
    // bisection inside the bracket; the induced distance grows with t, so
    // the first crossing is the closest one this path offers.
    double lo = 0.0, hi = 1.0;
    for (int k = 1; k < path_steps; ++k) {
      const double t = static_cast<double>(k) / path_steps;
      PointCloud xt = apply_scaled_planes(planes, t, x0);
      ++result.evaluations;
      if (sign_of(f(xt)) == -base) {
        hi = t;
        break;
      }
      lo = t;
    }
    for (int iter = 0; iter < 60 && (hi - lo) > 1e-6 * hi; ++iter) {
      const double mid = 0.5 * (lo + hi);
      PointCloud xm = apply_scaled_planes(planes, mid, x0);
      ++result.evaluations;
      if (sign_of(f(xm)) == -base)
        hi = mid;
      else
        lo = mid;
    }
    consider(apply_scaled_planes(planes, hi, x0));
  }

  result.found = best <= eps;
  result.achieved_distance = best;
  if (best_point) result.flip_point = std::move(best_point);
  return result;
}

BalanceReport estimate_balance(const OrbitFunction& f, const PointCloud& x0,
                               std::size_t samples, RandomStream& rng) {
  if (samples < 100)
    throw std::invalid_argument("estimate_balance: need at least 100 samples");
  std::size_t plus = 0, minus = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    double value = f(orbit_sample(x0, rng));
    if (value >= 0.0) ++plus;
    if (value <= 0.0) ++minus;
  }
  BalanceReport report;
  report.p_plus = static_cast<double>(plus) / static_cast<double>(samples);
  report.p_minus = static_cast<double>(minus) / static_cast<double>(samples);
  report.samples = samples;
  report.confidence_halfwidth = binomial_halfwidth99(samples);
  return report;
}

namespace {

void check_theorem_preconditions(TheoremKind kind, const NetworkSpec& arch,
                                 const PointCloud& x0) {
  arch.validate();
  if (!arch.scalar_output())
    throw std::invalid_argument("theorem_trial: network must be scalar-valued");
  if (kind == TheoremKind::odd) {
    if (!arch.all_odd())
      throw std::invalid_argument(
          "theorem_trial: odd kind requires odd activations in every layer");
    if (x0.dim() % 2 != 0)
      throw std::invalid_argument("theorem_trial: odd kind requires even d");
  } else {
    for (std::size_t v = 0; v + 1 < arch.layers.size(); ++v) {
      if (arch.layers[v].activation != Activation::relu ||
          arch.layers[v].init != InitKind::xavier_gaussian)
        throw std::invalid_argument(
            "theorem_trial: relu kind requires Xavier ReLU hidden layers");
    }
    if (arch.layers.back().activation != Activation::identity)
      throw std::invalid_argument(
          "theorem_trial: relu kind requires an identity last layer");
  }
}

}  // namespace

TheoremNetOutcome theorem_trial_single(TheoremKind kind,
                                       const NetworkSpec& arch,
                                       const PointCloud& x0,
                                       const std::vector<double>& taus,
                                       int net_index, int max_candidates,
                                       std::uint64_t master_seed,
                                       const SearchParams& params) {
  check_theorem_preconditions(kind, arch, x0);
  if (taus.empty())
    throw std::invalid_argument("theorem_trial: no tau values");
  if (!std::is_sorted(taus.begin(), taus.end()))
    throw std::invalid_argument("theorem_trial: taus must be ascending");

  RandomStream stream = derive_stream(master_seed, net_index);
  std::vector<LayerWeights> weights = sample_network(arch, stream);
  OrbitFunction f = [&](const PointCloud& x) {
    return network_forward(arch, weights, x);
  };

  TheoremNetOutcome out;
  out.carried.assign(taus.size(), std::numeric_limits<double>::infinity());

  // Ascending budgets share the carried best flip: success at a smaller
  // tau implies success at every larger one.
  double carried = std::numeric_limits<double>::infinity();
  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    AdversarialBudget budget = make_budget(taus[ti], x0);
    AdversarialResult r =
        find_adversarial(f, x0, budget, max_candidates, stream, params);
    if (r.base_sign == 0) {
      out.zero_sign = true;
      std::fill(out.carried.begin(), out.carried.end(), 0.0);
      return out;
    }
    carried = std::min(carried, r.achieved_distance);
    out.carried[ti] = carried;
  }
  return out;
}

TheoremTrialResult theorem_trial(TheoremKind kind, const NetworkSpec& arch,
                                 const PointCloud& x0,
                                 std::vector<double> taus, int networks,
                                 int max_candidates,
                                 std::uint64_t master_seed,
                                 const SearchParams& params) {
  check_theorem_preconditions(kind, arch, x0);
  if (taus.empty())
    throw std::invalid_argument("theorem_trial: no tau values");
  if (networks < 1)
    throw std::invalid_argument("theorem_trial: networks must be >= 1");
  std::sort(taus.begin(), taus.end());

  TheoremTrialResult out;
  out.kind = kind;
  out.networks = networks;
  out.by_tau.resize(taus.size());
  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    AdversarialBudget b = make_budget(taus[ti], x0);
    out.by_tau[ti].tau = taus[ti];
    out.by_tau[ti].epsilon = b.epsilon;
    out.by_tau[ti].success_floor = b.success_floor;
  }

  std::vector<KahanSum> ratio_sums(taus.size());
  std::vector<int> successes(taus.size(), 0);
  int zero_signs = 0;

  for (int net = 0; net < networks; ++net) {
    TheoremNetOutcome o = theorem_trial_single(kind, arch, x0, taus, net,
                                               max_candidates, master_seed,
                                               params);
    if (o.zero_sign) ++zero_signs;
    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
      if (o.zero_sign || o.carried[ti] <= out.by_tau[ti].epsilon) {
        ++successes[ti];
        ratio_sums[ti].add(o.zero_sign
                               ? 0.0
                               : o.carried[ti] / out.by_tau[ti].epsilon);
      }
    }
  }

  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    out.by_tau[ti].successes = successes[ti];
    out.by_tau[ti].success_rate =
        static_cast<double>(successes[ti]) / networks;
    out.by_tau[ti].mean_distance_ratio =
        successes[ti] > 0 ? ratio_sums[ti].value() / successes[ti] : 0.0;
  }
  out.zero_sign_rate = static_cast<double>(zero_signs) / networks;
  return out;
}

SeparationStats separation_experiment(const NetworkSpec& arch,
                                      const PointCloud& x0, int trials,
                                      std::uint64_t master_seed) {
  check_theorem_preconditions(TheoremKind::relu, arch, x0);
  if (trials < 1)
    throw std::invalid_argument("separation_experiment: trials must be >= 1");
  const int d = static_cast<int>(x0.dim());
  const int n = static_cast<int>(x0.count());
  const int m = static_cast<int>(
      std::floor(std::sqrt(std::log(static_cast<double>(d)))));
  if (m < 2)
    throw std::invalid_argument(
        "separation_experiment: floor(sqrt(ln d)) must be >= 2");

  int separated = 0, inner_event = 0;
  KahanSum min_dist_sum, max_norm_sum;
  for (int trial = 0; trial < trials; ++trial) {
    RandomStream stream = derive_stream(master_seed, trial);
    std::vector<PointCloud> points;
    points.reserve(m);
    for (int i = 0; i < m; ++i) points.push_back(orbit_sample(x0, stream));
    std::vector<LayerWeights> weights = sample_network(arch, stream);

    bool has_negative = false, has_positive = false;
    for (const PointCloud& z : points) {
      double value = network_forward(arch, weights, z);
      if (value < 0.0) has_negative = true;
      if (value > 0.0) has_positive = true;
    }
    if (has_negative && has_positive) ++separated;

    std::vector<PointCloud> features;
    features.reserve(m);
    for (const PointCloud& z : points)
      features.push_back(feature_map(arch, weights, z));

    bool all_small = true;
    double min_dist = std::numeric_limits<double>::infinity();
    double max_norm = 0.0;
    for (int i = 0; i < m; ++i) {
      max_norm = std::max(max_norm, features[i].norm());
      for (int j = i + 1; j < m; ++j) {
        for (int t = 0; t < n; ++t) {
          if (points[i].m.col(t).dot(points[j].m.col(t)) > d / 2.0)
            all_small = false;
        }
        min_dist = std::min(min_dist, (features[i].m - features[j].m).norm());
      }
    }
    if (all_small) ++inner_event;
    min_dist_sum.add(min_dist);
    max_norm_sum.add(max_norm);
  }

  SeparationStats st;
  st.m = m;
  st.trials = trials;
  st.separation_frequency = static_cast<double>(separated) / trials;
  st.inner_product_event_frequency =
      static_cast<double>(inner_event) / trials;
  const double pairs = 0.5 * m * (m - 1);
  st.inner_product_event_bound =
      1.0 - 2.0 * pairs * n * std::exp(-d / 8.0);
  st.mean_min_feature_distance = min_dist_sum.value() / trials;
  st.mean_max_feature_norm = max_norm_sum.value() / trials;
  return st;
}

}  // namespace orbitadv
