#include "orbitadv/experiment_runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "orbitadv/adversarial.hpp"
#include "orbitadv/compositional_kernel.hpp"
#include "orbitadv/concentration_lab.hpp"
#include "orbitadv/conv_net.hpp"
#include "orbitadv/csv.hpp"
#include "orbitadv/parallel.hpp"
#include "orbitadv/so_group.hpp"
#include "orbitadv/stats.hpp"

namespace orbitadv {

namespace {

using nlohmann::ordered_json;

// Stream indices are partitioned so no two purposes collide: per-trial
// streams use the trial index directly, the shared base input uses 2^32,
// and kind-level sampling uses 2^33.
constexpr std::uint64_t kInputStreamIndex = 1ULL << 32;
constexpr std::uint64_t kKindStreamIndex = 1ULL << 33;

struct KindOutput {
  CsvWriter csv;
  ordered_json estimates = ordered_json::object();
  ordered_json bounds = ordered_json::object();
  std::vector<std::pair<std::string, bool>> checks;
};

std::string fmt(double x) { return format_double(x); }
std::string fmt(int x) { return std::to_string(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }

ordered_json to_json_array(const std::vector<double>& xs) {
  ordered_json a = ordered_json::array();
  for (double x : xs) a.push_back(x);
  return a;
}

ordered_json to_json_array(const std::vector<int>& xs) {
  ordered_json a = ordered_json::array();
  for (int x : xs) a.push_back(x);
  return a;
}

SearchParams search_params(const ExperimentConfig& c) {
  SearchParams p;
  p.planes = c.planes;
  p.rungs = c.rungs;
  p.path_steps = c.path_steps;
  return p;
}

PointCloud base_input(const ExperimentConfig& c) {
  RandomStream rng = derive_stream(c.seed, kInputStreamIndex);
  return random_sphere_columns(c.d, c.n, rng);
}

std::vector<double> tau_ladder(const ExperimentConfig& c) {
  std::vector<double> taus = c.taus.empty() ? std::vector<double>{c.tau}
                                            : c.taus;
  std::sort(taus.begin(), taus.end());
  return taus;
}

// ---------------------------------------------------------------------------
// haar-test: entrywise mean, orthogonality residual, and determinant of
// Haar samples.  The mean threshold is 6 standard errors: each entry has
// variance 1/d under the Haar measure, so the sample mean of N draws has
// standard error 1/sqrt(d N).
KindOutput run_haar_test(const ExperimentConfig& c) {
  RandomStream rng = derive_stream(c.seed, kKindStreamIndex);
  const int d = c.d;
  const std::size_t samples = c.samples;
  if (samples == 0) throw std::invalid_argument("haar-test: samples must be >= 1");

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
  double max_ortho = 0.0;
  double max_det_dev = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    RotationMatrix u = haar_sample(d, rng);
    sum += u.m;
    const double ortho =
        (u.m.transpose() * u.m - Eigen::MatrixXd::Identity(d, d)).norm();
    max_ortho = std::max(max_ortho, ortho);
    max_det_dev = std::max(max_det_dev, std::abs(u.m.determinant() - 1.0));
  }
  const double max_mean =
      (sum / static_cast<double>(samples)).cwiseAbs().maxCoeff();
  const double mean_threshold =
      6.0 / std::sqrt(static_cast<double>(d) * static_cast<double>(samples));
  const double ortho_tol = 1e-10;
  const double det_tol = 1e-8;

  KindOutput out{CsvWriter({"statistic", "value", "threshold", "pass"})};
  auto row = [&](const char* name, double value, double threshold) {
    out.csv.add_row({name, fmt(value), fmt(threshold),
                     value <= threshold ? "pass" : "fail"});
  };
  row("max_abs_mean_entry", max_mean, mean_threshold);
  row("max_orthogonality_residual", max_ortho, ortho_tol);
  row("max_determinant_deviation", max_det_dev, det_tol);

  out.estimates["max_abs_mean_entry"] = max_mean;
  out.estimates["max_orthogonality_residual"] = max_ortho;
  out.estimates["max_determinant_deviation"] = max_det_dev;
  out.estimates["samples"] = samples;
  out.bounds["mean_threshold"] = mean_threshold;
  out.bounds["orthogonality_tolerance"] = ortho_tol;
  out.bounds["determinant_tolerance"] = det_tol;
  out.checks.emplace_back("entrywise_mean", max_mean <= mean_threshold);
  out.checks.emplace_back("orthogonality", max_ortho <= ortho_tol);
  out.checks.emplace_back("determinant", max_det_dev <= det_tol);
  return out;
}

// ---------------------------------------------------------------------------
// kernel-check: |k - <Psi, Psi>| quantiles per channel count.
KindOutput run_kernel_check(const ExperimentConfig& c) {
  std::vector<DeviationStats> stats = kernel_deviation_experiment(
      c.d, c.n, c.channels, c.trials, c.seed);

  KindOutput out{
      CsvWriter({"channels", "trials", "mean", "p50", "p95", "max"})};
  std::vector<int> chans;
  std::vector<double> means, p50s, p95s, maxes;
  for (const DeviationStats& s : stats) {
    out.csv.add_row({fmt(s.channels), fmt(s.trials), fmt(s.mean), fmt(s.p50),
                     fmt(s.p95), fmt(s.max)});
    chans.push_back(s.channels);
    means.push_back(s.mean);
    p50s.push_back(s.p50);
    p95s.push_back(s.p95);
    maxes.push_back(s.max);
  }

  bool nonincreasing = true;
  for (std::size_t i = 1; i < p95s.size(); ++i)
    if (p95s[i] > p95s[i - 1] + 1e-12) nonincreasing = false;
  const double p95_limit = 0.1;
  const bool final_small = p95s.empty() ? false : p95s.back() < p95_limit;

  out.estimates["channels"] = to_json_array(chans);
  out.estimates["p95_deviation"] = to_json_array(p95s);
  out.estimates["median_deviation"] = to_json_array(p50s);
  out.estimates["mean_deviation"] = to_json_array(means);
  out.estimates["max_deviation"] = to_json_array(maxes);
  out.bounds["p95_limit_at_max_channels"] = p95_limit;
  out.checks.emplace_back("p95_nonincreasing_in_channels", nonincreasing);
  out.checks.emplace_back("p95_below_limit_at_max_channels", final_small);
  return out;
}

// ---------------------------------------------------------------------------
// balance: per-network sign-region masses on the orbit of a shared input.
// theorem=odd checks |p+ - p-| <= 3*halfwidth for every network;
// theorem=relu checks that >= 90% of networks have min(p+, p-) >=
// 1/ln(d) - 3*halfwidth.
KindOutput run_balance(const ExperimentConfig& c) {
  const NetworkSpec arch = build_network_spec(c);
  const PointCloud x0 = base_input(c);
  const int networks = c.networks;
  if (networks < 1) throw std::invalid_argument("balance: networks must be >= 1");

  std::vector<BalanceReport> slots(networks);
  parallel_for(networks, c.workers, [&](std::size_t net) {
    RandomStream stream = derive_stream(c.seed, net);
    std::vector<LayerWeights> weights = sample_network(arch, stream);
    OrbitFunction f = [&](const PointCloud& x) {
      return network_forward(arch, weights, x);
    };
    slots[net] = estimate_balance(f, x0, c.samples, stream);
  });

  KindOutput out{CsvWriter(
      {"network", "p_plus", "p_minus", "min_balance", "samples", "halfwidth"})};
  const double hw = binomial_halfwidth99(c.samples);
  const double sym_tol = 3.0 * hw;
  const double balance_floor =
      1.0 / std::log(static_cast<double>(c.d)) - 3.0 * hw;

  std::vector<double> p_plus, p_minus, min_balance;
  int symmetric = 0, balanced = 0;
  double max_abs_diff = 0.0;
  for (int net = 0; net < networks; ++net) {
    const BalanceReport& r = slots[net];
    const double mn = std::min(r.p_plus, r.p_minus);
    out.csv.add_row({fmt(net), fmt(r.p_plus), fmt(r.p_minus), fmt(mn),
                     fmt(r.samples), fmt(r.confidence_halfwidth)});
    p_plus.push_back(r.p_plus);
    p_minus.push_back(r.p_minus);
    min_balance.push_back(mn);
    max_abs_diff = std::max(max_abs_diff, std::abs(r.p_plus - r.p_minus));
    if (std::abs(r.p_plus - r.p_minus) <= sym_tol) ++symmetric;
    if (mn >= balance_floor) ++balanced;
  }
  const double balanced_fraction = static_cast<double>(balanced) / networks;
  const double symmetric_fraction = static_cast<double>(symmetric) / networks;

  out.estimates["p_plus"] = to_json_array(p_plus);
  out.estimates["p_minus"] = to_json_array(p_minus);
  out.estimates["min_balance"] = to_json_array(min_balance);
  out.estimates["max_abs_sign_difference"] = max_abs_diff;
  out.estimates["balanced_fraction"] = balanced_fraction;
  out.estimates["symmetric_fraction"] = symmetric_fraction;
  out.bounds["halfwidth"] = hw;
  out.bounds["symmetry_tolerance"] = sym_tol;
  out.bounds["balance_floor"] = balance_floor;
  out.bounds["balanced_fraction_floor"] = 0.9;
  if (c.theorem == "odd") {
    out.checks.emplace_back("sign_symmetry_all_networks",
                            symmetric == networks);
  } else {
    out.checks.emplace_back("balanced_fraction_at_least_0.9",
                            balanced_fraction >= 0.9);
  }
  return out;
}

// ---------------------------------------------------------------------------
// adv-search: the two-phase search on `networks` independent draws at a
// single tau.  Per-network rows; flips are re-verified against the network.
KindOutput run_adv_search(const ExperimentConfig& c) {
  const NetworkSpec arch = build_network_spec(c);
  const PointCloud x0 = base_input(c);
  const int networks = c.networks;
  if (networks < 1)
    throw std::invalid_argument("adv-search: networks must be >= 1");
  const AdversarialBudget budget = make_budget(c.tau, x0);
  const SearchParams params = search_params(c);

  struct Slot {
    AdversarialResult result;
    bool flip_verified = true;
    bool on_orbit = true;
  };
  std::vector<Slot> slots(networks);
  parallel_for(networks, c.workers, [&](std::size_t net) {
    RandomStream stream = derive_stream(c.seed, net);
    std::vector<LayerWeights> weights = sample_network(arch, stream);
    OrbitFunction f = [&](const PointCloud& x) {
      return network_forward(arch, weights, x);
    };
    Slot& s = slots[net];
    s.result = find_adversarial(f, x0, budget, c.max_candidates, stream,
                                params);
    if (s.result.flip_point) {
      const PointCloud& y = *s.result.flip_point;
      s.on_orbit = std::abs(y.norm() - x0.norm()) <= 1e-6 * x0.norm();
      s.flip_verified =
          sign_of(f(y)) == -s.result.base_sign &&
          std::abs((y.m - x0.m).norm() - s.result.achieved_distance) <=
              1e-6 * std::max(1.0, s.result.achieved_distance);
    }
  });

  KindOutput out{CsvWriter({"network", "base_sign", "found",
                            "achieved_distance", "epsilon", "evaluations"})};
  int successes = 0, zero_signs = 0;
  bool all_verified = true, all_on_orbit = true, within_budget = true;
  KahanSum ratio_sum;
  for (int net = 0; net < networks; ++net) {
    const AdversarialResult& r = slots[net].result;
    out.csv.add_row({fmt(net), fmt(r.base_sign), r.found ? "1" : "0",
                     fmt(r.achieved_distance), fmt(budget.epsilon),
                     fmt(r.evaluations)});
    if (r.found) {
      ++successes;
      ratio_sum.add(r.base_sign == 0 ? 0.0
                                     : r.achieved_distance / budget.epsilon);
      if (r.achieved_distance > budget.epsilon * (1.0 + 1e-12))
        within_budget = false;
    }
    if (r.base_sign == 0) ++zero_signs;
    all_verified = all_verified && slots[net].flip_verified;
    all_on_orbit = all_on_orbit && slots[net].on_orbit;
  }

  out.estimates["success_rate"] = static_cast<double>(successes) / networks;
  out.estimates["successes"] = successes;
  out.estimates["networks"] = networks;
  out.estimates["mean_distance_ratio"] =
      successes > 0 ? ratio_sum.value() / successes : 0.0;
  out.estimates["zero_sign_rate"] =
      static_cast<double>(zero_signs) / networks;
  out.bounds["success_floor"] = budget.success_floor;
  out.bounds["epsilon"] = budget.epsilon;
  out.bounds["tau"] = budget.tau;
  out.checks.emplace_back("successes_within_budget", within_budget);
  out.checks.emplace_back("flips_change_sign", all_verified);
  out.checks.emplace_back("flips_on_orbit", all_on_orbit);
  return out;
}

// ---------------------------------------------------------------------------
// theorem-trial: ascending-tau searches with carried flips over many
// networks; success floors use 1 - 2 exp(-tau^2/32).
KindOutput run_theorem_trial(const ExperimentConfig& c) {
  const NetworkSpec arch = build_network_spec(c);
  const PointCloud x0 = base_input(c);
  const TheoremKind kind =
      c.theorem == "odd" ? TheoremKind::odd : TheoremKind::relu;
  const std::vector<double> taus = tau_ladder(c);
  const int networks = c.networks;
  if (networks < 1)
    throw std::invalid_argument("theorem-trial: networks must be >= 1");
  const SearchParams params = search_params(c);

  std::vector<AdversarialBudget> budgets;
  for (double t : taus) budgets.push_back(make_budget(t, x0));

  std::vector<TheoremNetOutcome> slots(networks);
  parallel_for(networks, c.workers, [&](std::size_t net) {
    slots[net] = theorem_trial_single(kind, arch, x0, taus,
                                      static_cast<int>(net),
                                      c.max_candidates, c.seed, params);
  });

  KindOutput out{CsvWriter(
      {"network", "tau", "epsilon", "carried_distance", "success"})};
  std::vector<int> successes(taus.size(), 0);
  std::vector<KahanSum> ratio_sums(taus.size());
  int zero_signs = 0;
  bool within_budget = true;
  for (int net = 0; net < networks; ++net) {
    const TheoremNetOutcome& o = slots[net];
    if (o.zero_sign) ++zero_signs;
    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
      const bool success =
          o.zero_sign || o.carried[ti] <= budgets[ti].epsilon;
      out.csv.add_row({fmt(net), fmt(taus[ti]), fmt(budgets[ti].epsilon),
                       fmt(o.carried[ti]), success ? "1" : "0"});
      if (success) {
        ++successes[ti];
        const double ratio =
            o.zero_sign ? 0.0 : o.carried[ti] / budgets[ti].epsilon;
        ratio_sums[ti].add(ratio);
        if (ratio > 1.0 + 1e-12) within_budget = false;
      }
    }
  }

  std::vector<double> rates, floors, epsilons, ratios;
  std::vector<int> success_counts;
  const double hw = binomial_halfwidth99(networks);
  bool floor_met = true, nondecreasing = true;
  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    const double rate = static_cast<double>(successes[ti]) / networks;
    rates.push_back(rate);
    floors.push_back(budgets[ti].success_floor);
    epsilons.push_back(budgets[ti].epsilon);
    ratios.push_back(successes[ti] > 0
                         ? ratio_sums[ti].value() / successes[ti]
                         : 0.0);
    success_counts.push_back(successes[ti]);
    if (rate < budgets[ti].success_floor - 3.0 * hw) floor_met = false;
    if (ti > 0 && successes[ti] < successes[ti - 1]) nondecreasing = false;
  }

  out.estimates["taus"] = to_json_array(taus);
  out.estimates["success_rate"] = to_json_array(rates);
  out.estimates["successes"] = to_json_array(success_counts);
  out.estimates["mean_distance_ratio"] = to_json_array(ratios);
  out.estimates["zero_sign_rate"] =
      static_cast<double>(zero_signs) / networks;
  out.estimates["networks"] = networks;
  out.bounds["success_floor"] = to_json_array(floors);
  out.bounds["epsilon"] = to_json_array(epsilons);
  out.bounds["halfwidth"] = hw;
  out.checks.emplace_back("success_rate_meets_floor", floor_met);
  out.checks.emplace_back("success_nondecreasing_in_tau", nondecreasing);
  out.checks.emplace_back("successes_within_budget", within_budget);
  return out;
}

// ---------------------------------------------------------------------------
// isoperimetry: hemisphere benchmark on the orbit of sqrt(d)*e1 (n = 1).
// The set has known measure 1/2, so the check bound uses mu = 1/2 exactly;
// probe certification is cross-checked against closed-form membership.
KindOutput run_isoperimetry(const ExperimentConfig& c) {
  const int d = c.d;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, 1);
  m(0, 0) = std::sqrt(static_cast<double>(d));
  const PointCloud x0(std::move(m));

  IndicatorSet hemisphere{
      [](const PointCloud& z) { return z.m(0, 0) >= 0.0; }, "hemisphere"};

  RandomStream rng = derive_stream(c.seed, kKindStreamIndex);
  BlowupOutcome outcome =
      blowup_experiment(hemisphere, x0, c.epsilons, c.samples_measure,
                        c.samples_blowup, rng, c.k_probe);

  KindOutput out{CsvWriter({"epsilon", "measure", "certified_lower",
                            "bound_mu_estimated", "bound_mu_half",
                            "agreement", "samples_measure", "samples_blowup",
                            "halfwidth_blowup"})};
  const double lipschitz = x0.spectral_norm();
  std::vector<double> certified, bounds_half, agreements, measures;
  bool meets_bound = true, agree_ok = true, witnesses_sound = true;
  for (std::size_t ei = 0; ei < outcome.records.size(); ++ei) {
    const BlowupRecord& rec = outcome.records[ei];
    const double eps = rec.epsilon;
    const double bound_half =
        1.0 - std::exp(-(d - 2) * eps * eps * 0.25 /
                       (8.0 * lipschitz * lipschitz));

    // Soundness: every certified point carries a witness that is in the
    // set, on the orbit, and within the claimed distance.
    std::size_t agree = 0;
    for (const BlowupWitness& w : outcome.witnesses[ei]) {
      const double dist = (w.y.m - w.z.m).norm();
      if (!hemisphere.contains(w.y) || dist > eps + 1e-9 ||
          std::abs(dist - w.distance) > 1e-9 ||
          std::abs(w.y.norm() - x0.norm()) > 1e-9 * x0.norm())
        witnesses_sound = false;
      if (hemisphere_blowup_member(w.z.m.col(0), eps)) ++agree;
    }
    for (const PointCloud& z : outcome.uncertified[ei])
      if (!hemisphere_blowup_member(z.m.col(0), eps)) ++agree;
    const double agreement =
        static_cast<double>(agree) / rec.samples_blowup;

    out.csv.add_row({fmt(eps), fmt(rec.measure_estimate),
                     fmt(rec.blowup_lower_estimate),
                     fmt(rec.theoretical_bound), fmt(bound_half),
                     fmt(agreement), fmt(rec.samples_measure),
                     fmt(rec.samples_blowup), fmt(rec.halfwidth_blowup)});
    certified.push_back(rec.blowup_lower_estimate);
    bounds_half.push_back(bound_half);
    agreements.push_back(agreement);
    measures.push_back(rec.measure_estimate);
    if (rec.blowup_lower_estimate <
        bound_half - 3.0 * rec.halfwidth_blowup)
      meets_bound = false;
    if (agreement < 0.99) agree_ok = false;
  }

  out.estimates["epsilons"] = to_json_array(c.epsilons);
  out.estimates["measure"] = to_json_array(measures);
  out.estimates["certified_lower"] = to_json_array(certified);
  out.estimates["closed_form_agreement"] = to_json_array(agreements);
  out.bounds["blowup_bound_mu_half"] = to_json_array(bounds_half);
  out.bounds["agreement_floor"] = 0.99;
  out.bounds["halfwidth_blowup"] = binomial_halfwidth99(c.samples_blowup);
  out.checks.emplace_back("certified_meets_bound", meets_bound);
  out.checks.emplace_back("closed_form_agreement", agree_ok);
  out.checks.emplace_back("witnesses_sound", witnesses_sound);
  return out;
}

// ---------------------------------------------------------------------------
// concentration: upper tails of g(U) = U_11 (1-Lipschitz in the Frobenius
// metric) against exp(-(d-2) eps^2 / 8).
KindOutput run_concentration(const ExperimentConfig& c) {
  RandomStream rng = derive_stream(c.seed, kKindStreamIndex);
  auto g = [](const RotationMatrix& u) { return u.m(0, 0); };
  std::vector<ConcentrationRecord> records =
      concentration_experiment(g, 1.0, c.d, c.epsilons, c.samples, rng);

  KindOutput out{CsvWriter({"d", "epsilon", "lipschitz", "empirical_tail",
                            "bound", "samples", "halfwidth"})};
  std::vector<double> tails, bounds;
  bool bounded = true;
  for (const ConcentrationRecord& r : records) {
    out.csv.add_row({fmt(r.d), fmt(r.epsilon), fmt(r.lipschitz),
                     fmt(r.empirical_tail), fmt(r.theoretical_bound),
                     fmt(r.samples), fmt(r.halfwidth)});
    tails.push_back(r.empirical_tail);
    bounds.push_back(r.theoretical_bound);
    if (r.empirical_tail > r.theoretical_bound + 3.0 * r.halfwidth)
      bounded = false;
  }

  out.estimates["epsilons"] = to_json_array(c.epsilons);
  out.estimates["empirical_tail"] = to_json_array(tails);
  out.bounds["concentration_bound"] = to_json_array(bounds);
  out.bounds["halfwidth"] = binomial_halfwidth99(c.samples);
  out.checks.emplace_back("tail_within_bound", bounded);
  return out;
}

// ---------------------------------------------------------------------------
// separate: sign separation of m = floor(sqrt(ln d)) orbit points by fresh
// networks, with the all-pairs inner-product event against its union bound.
KindOutput run_separate(const ExperimentConfig& c) {
  const NetworkSpec arch = build_network_spec(c);
  const PointCloud x0 = base_input(c);
  SeparationStats s = separation_experiment(arch, x0, c.trials, c.seed);

  KindOutput out{CsvWriter(
      {"m", "trials", "separation_frequency", "inner_event_frequency",
       "inner_event_bound", "mean_min_feature_distance",
       "mean_max_feature_norm"})};
  out.csv.add_row({fmt(s.m), fmt(s.trials), fmt(s.separation_frequency),
                   fmt(s.inner_product_event_frequency),
                   fmt(s.inner_product_event_bound),
                   fmt(s.mean_min_feature_distance),
                   fmt(s.mean_max_feature_norm)});

  const double hw = binomial_halfwidth99(c.trials);
  out.estimates["m"] = s.m;
  out.estimates["separation_frequency"] = s.separation_frequency;
  out.estimates["inner_event_frequency"] = s.inner_product_event_frequency;
  out.estimates["mean_min_feature_distance"] = s.mean_min_feature_distance;
  out.estimates["mean_max_feature_norm"] = s.mean_max_feature_norm;
  out.bounds["inner_event_bound"] = s.inner_product_event_bound;
  out.bounds["halfwidth"] = hw;
  out.checks.emplace_back(
      "inner_event_meets_bound",
      s.inner_product_event_frequency >=
          s.inner_product_event_bound - 3.0 * hw);
  return out;
}

// ---------------------------------------------------------------------------
// sudakov: E max_i <w, x_i> for sqrt(2)-separated orthonormal frames
// e_1..e_m, against separation * sqrt(ln m).
KindOutput run_sudakov(const ExperimentConfig& c) {
  RandomStream rng = derive_stream(c.seed, kKindStreamIndex);
  KindOutput out{CsvWriter({"m", "separation", "estimate", "reference",
                            "ratio", "samples", "std_error"})};
  std::vector<double> estimates, references, ratios;
  bool nondecreasing = true, ratio_ok = true;
  double prev = -std::numeric_limits<double>::infinity();
  for (int m : c.m_values) {
    if (m < 1) throw std::invalid_argument("sudakov: m values must be >= 1");
    std::vector<Eigen::VectorXd> points;
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
      e[i] = 1.0;
      points.push_back(std::move(e));
    }
    const double separation = m > 1 ? std::sqrt(2.0) : 0.0;
    SudakovRecord r = sudakov_check(points, separation, c.samples, rng);
    out.csv.add_row({fmt(r.m), fmt(r.separation), fmt(r.estimate),
                     fmt(r.reference), fmt(r.ratio), fmt(r.samples),
                     fmt(r.std_error)});
    estimates.push_back(r.estimate);
    references.push_back(r.reference);
    ratios.push_back(r.ratio);
    if (r.estimate < prev - 3.0 * r.std_error) nondecreasing = false;
    prev = r.estimate;
    if (m > 1 && r.ratio < 0.5) ratio_ok = false;
  }

  out.estimates["m"] = to_json_array(c.m_values);
  out.estimates["estimate"] = to_json_array(estimates);
  out.estimates["ratio"] = to_json_array(ratios);
  out.bounds["reference"] = to_json_array(references);
  out.bounds["ratio_floor"] = 0.5;
  out.checks.emplace_back("estimate_nondecreasing_in_m", nondecreasing);
  out.checks.emplace_back("ratio_at_least_half", ratio_ok);
  return out;
}

// ---------------------------------------------------------------------------
// sphere-tail: P(<x, y> >= t) for independent uniform sqrt(d)-sphere points
// against exp(-t^2 / 2d).
KindOutput run_sphere_tail(const ExperimentConfig& c) {
  RandomStream rng = derive_stream(c.seed, kKindStreamIndex);
  std::vector<SphereTailRecord> records =
      sphere_tail_check(c.d, c.t_values, c.samples, rng);

  KindOutput out{CsvWriter(
      {"t", "empirical_tail", "bound", "samples", "halfwidth"})};
  std::vector<double> tails, bounds;
  bool bounded = true, monotone = true;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SphereTailRecord& r = records[i];
    out.csv.add_row({fmt(r.t), fmt(r.empirical_tail), fmt(r.bound),
                     fmt(r.samples), fmt(r.halfwidth)});
    tails.push_back(r.empirical_tail);
    bounds.push_back(r.bound);
    if (r.empirical_tail > r.bound + 3.0 * r.halfwidth) bounded = false;
    if (i > 0 && records[i].t > records[i - 1].t &&
        r.empirical_tail > records[i - 1].empirical_tail + 1e-12)
      monotone = false;
  }

  out.estimates["t"] = to_json_array(c.t_values);
  out.estimates["empirical_tail"] = to_json_array(tails);
  out.bounds["tail_bound"] = to_json_array(bounds);
  out.bounds["halfwidth"] = binomial_halfwidth99(c.samples);
  out.checks.emplace_back("tail_within_bound", bounded);
  out.checks.emplace_back("tail_nonincreasing_in_t", monotone);
  return out;
}

KindOutput dispatch(const ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::haar_test: return run_haar_test(c);
    case ExperimentKind::kernel_check: return run_kernel_check(c);
    case ExperimentKind::balance: return run_balance(c);
    case ExperimentKind::adv_search: return run_adv_search(c);
    case ExperimentKind::theorem_trial: return run_theorem_trial(c);
    case ExperimentKind::isoperimetry: return run_isoperimetry(c);
    case ExperimentKind::concentration: return run_concentration(c);
    case ExperimentKind::separate: return run_separate(c);
    case ExperimentKind::sudakov: return run_sudakov(c);
    case ExperimentKind::sphere_tail: return run_sphere_tail(c);
  }
  throw std::logic_error("run: unhandled experiment kind");
}

}  // namespace

std::uint64_t resolve_seed(const ExperimentConfig& config,
                           std::optional<std::uint64_t> cli_seed) {
  if (cli_seed) return *cli_seed;
  if (const char* env = std::getenv("ORBITADV_SEED")) {
    std::string text(env);
    std::size_t used = 0;
    std::uint64_t value = 0;
    try {
      value = std::stoull(text, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument(
          "ORBITADV_SEED is not an unsigned integer: " + text);
    }
    if (used != text.size())
      throw std::invalid_argument(
          "ORBITADV_SEED is not an unsigned integer: " + text);
    return value;
  }
  return config.seed;
}

RunRecord run(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  KindOutput output = dispatch(config);
  const auto t1 = std::chrono::steady_clock::now();

  RunRecord record;
  record.config = config;
  record.config_hash = fnv1a_hex(serialize_config(config));
  record.version = kLibraryVersion;
  record.runtime_seconds =
      std::chrono::duration<double>(t1 - t0).count();

  const std::string kind_name = experiment_kind_name(config.kind);
  const std::filesystem::path out_dir(config.out_dir);
  std::filesystem::create_directories(out_dir);
  record.csv_path = out_dir / (kind_name + ".csv");
  record.summary_path = out_dir / (kind_name + "_summary.json");
  output.csv.write(record.csv_path);

  ordered_json checks = ordered_json::object();
  record.all_checks_passed = true;
  for (const auto& [name, passed] : output.checks) {
    checks[name] = passed ? "pass" : "fail";
    record.all_checks_passed = record.all_checks_passed && passed;
  }

  record.summary = ordered_json{{"experiment", kind_name},
                                {"config_hash", record.config_hash},
                                {"seed", config.seed},
                                {"estimates", output.estimates},
                                {"bounds", output.bounds},
                                {"checks", checks},
                                {"runtime_seconds", record.runtime_seconds}};

  std::ofstream json_out(record.summary_path, std::ios::binary);
  if (!json_out)
    throw std::runtime_error("run: cannot open " +
                             record.summary_path.string());
  json_out << record.summary.dump(2) << '\n';
  if (!json_out.flush())
    throw std::runtime_error("run: write failed for " +
                             record.summary_path.string());
  return record;
}

std::string report_table(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error("report: not a directory: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 13 &&
        name.substr(name.size() - 13) == "_summary.json")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::ostringstream table;
  int total_checks = 0, failed_checks = 0;
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    ordered_json summary;
    try {
      in >> summary;
    } catch (const std::exception& e) {
      table << path.filename().string() << ": unreadable (" << e.what()
            << ")\n";
      continue;
    }
    table << summary.value("experiment", std::string("?"))
          << "  seed=" << summary.value("seed", std::uint64_t{0})
          << "  hash=" << summary.value("config_hash", std::string("?"))
          << "\n";
    auto dump_section = [&](const char* label) {
      if (!summary.contains(label) || !summary[label].is_object()) return;
      for (const auto& [key, value] : summary[label].items())
        table << "    " << label << "." << key << " = " << value.dump()
              << "\n";
    };
    dump_section("estimates");
    dump_section("bounds");
    if (summary.contains("checks") && summary["checks"].is_object()) {
      for (const auto& [key, value] : summary["checks"].items()) {
        const bool ok = value == "pass";
        ++total_checks;
        if (!ok) ++failed_checks;
        table << "    [" << (ok ? "pass" : "FAIL") << "] " << key << "\n";
      }
    }
  }
  table << files.size() << " experiment(s), " << total_checks
        << " check(s), " << failed_checks << " failure(s)\n";
  return table.str();
}

}  // namespace orbitadv
