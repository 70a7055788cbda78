#include "orbitadv/concentration_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "orbitadv/stats.hpp"

namespace orbitadv {

std::vector<ConcentrationRecord> concentration_experiment(
    const std::function<double(const RotationMatrix&)>& g, double lipschitz,
    int d, const std::vector<double>& epsilons, std::size_t samples,
    RandomStream& rng) {
  if (samples < 1000)
    throw std::invalid_argument(
        "concentration_experiment: need at least 1000 samples");
  if (!(lipschitz > 0.0))
    throw std::invalid_argument(
        "concentration_experiment: Lipschitz constant must be positive");

  // Trust-but-verify the claimed constant before using it in the bound.
  for (int pair = 0; pair < 256; ++pair) {
    RotationMatrix u = haar_sample(d, rng);
    RotationMatrix v = haar_sample(d, rng);
    double lhs = std::abs(g(u) - g(v));
    if (lhs > lipschitz * frobenius_distance(u, v) + 1e-9)
      throw std::invalid_argument(
          "concentration_experiment: test function violates the claimed "
          "Lipschitz constant");
  }

  std::vector<double> values(samples);
  for (std::size_t i = 0; i < samples; ++i)
    values[i] = g(haar_sample(d, rng));
  const double m = mean(values);

  std::vector<ConcentrationRecord> records;
  records.reserve(epsilons.size());
  for (double eps : epsilons) {
    std::size_t exceed = 0;
    for (double v : values)
      if (v >= m + eps) ++exceed;
    ConcentrationRecord rec;
    rec.d = d;
    rec.epsilon = eps;
    rec.lipschitz = lipschitz;
    rec.empirical_tail = static_cast<double>(exceed) / samples;
    rec.theoretical_bound =
        std::exp(-(d - 2) * eps * eps / (8.0 * lipschitz * lipschitz));
    rec.samples = samples;
    rec.halfwidth = binomial_halfwidth99(samples);
    records.push_back(rec);
  }
  return records;
}

BlowupOutcome blowup_experiment(const IndicatorSet& a, const PointCloud& x0,
                                const std::vector<double>& epsilons,
                                std::size_t samples_measure,
                                std::size_t samples_blowup, RandomStream& rng,
                                int k_probe) {
  if (x0.norm() == 0.0)
    throw std::invalid_argument("blowup_experiment: degenerate orbit");
  if (samples_measure < 100 || samples_blowup < 100)
    throw std::invalid_argument("blowup_experiment: need at least 100 samples");
  if (k_probe < 1)
    throw std::invalid_argument("blowup_experiment: k_probe must be >= 1");

  const Eigen::Index d = x0.dim();
  const double lipschitz = x0.spectral_norm();

  std::size_t members = 0;
  for (std::size_t i = 0; i < samples_measure; ++i)
    if (a.contains(orbit_sample(x0, rng))) ++members;
  const double mu = static_cast<double>(members) / samples_measure;

  BlowupOutcome outcome;
  for (double eps : epsilons) {
    std::size_t certified = 0;
    std::vector<BlowupWitness> witnesses;
    std::vector<PointCloud> missed;
    for (std::size_t i = 0; i < samples_blowup; ++i) {
      PointCloud z = orbit_sample(x0, rng);
      if (a.contains(z)) {
        ++certified;
        witnesses.push_back(BlowupWitness{z, z, 0.0});
        continue;
      }
      // Plane probes through z: the plane holds a random mix of z's columns
      // (so the rotation actually moves z) and a random orthogonal
      // direction, both senses.  Even probes use the full budget eps --
      // maximal reach toward a boundary -- and odd probes walk a ladder
      // over (0, eps] to catch sets with structure at smaller scales.
      bool found = false;
      for (int j = 0; j < k_probe && !found; ++j) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
        for (Eigen::Index t = 0; t < z.count(); ++t)
          u += rng.gaussian() * z.m.col(t);
        if (u.norm() < 1e-12) continue;
        u.normalize();
        Eigen::VectorXd v(d);
        for (Eigen::Index r = 0; r < d; ++r) v[r] = rng.gaussian();
        v -= u.dot(v) * u;
        if (v.norm() < 1e-12) continue;
        v.normalize();

        Eigen::RowVectorXd pa = u.transpose() * z.m;
        Eigen::RowVectorXd pb = v.transpose() * z.m;
        const double rho = std::sqrt(pa.squaredNorm() + pb.squaredNorm());
        if (rho < 1e-12) continue;
        const double delta = j % 2 == 0 ? eps : eps * (j + 1) / k_probe;
        const double theta = 2.0 * std::asin(std::min(1.0, delta / (2.0 * rho)));
        for (double sign : {1.0, -1.0}) {
          PlaneRotation probe{u, v, sign * theta};
          PointCloud y = plane_rotation_apply(probe, z);
          const double dist = (y.m - z.m).norm();
          if (dist <= eps + 1e-9 && a.contains(y)) {
            ++certified;
            witnesses.push_back(BlowupWitness{z, std::move(y), dist});
            found = true;
            break;
          }
        }
      }
      if (!found) missed.push_back(std::move(z));
    }

    BlowupRecord rec;
    rec.epsilon = eps;
    rec.measure_estimate = mu;
    rec.blowup_lower_estimate =
        static_cast<double>(certified) / samples_blowup;
    rec.theoretical_bound =
        1.0 - std::exp(-(d - 2) * eps * eps * mu * mu /
                       (8.0 * lipschitz * lipschitz));
    rec.samples_measure = samples_measure;
    rec.samples_blowup = samples_blowup;
    rec.halfwidth_measure = binomial_halfwidth99(samples_measure);
    rec.halfwidth_blowup = binomial_halfwidth99(samples_blowup);
    outcome.records.push_back(rec);
    outcome.witnesses.push_back(std::move(witnesses));
    outcome.uncertified.push_back(std::move(missed));
  }
  return outcome;
}

bool hemisphere_blowup_member(const Eigen::VectorXd& z, double eps) {
  const double z1 = z[0];
  if (z1 >= 0.0) return true;
  const double d = z.squaredNorm();  // the orbit radius is sqrt(d)
  const double rest = std::sqrt(std::max(d - z1 * z1, 0.0));
  const double chord = std::sqrt(z1 * z1 + (rest - std::sqrt(d)) * (rest - std::sqrt(d)));
  return chord <= eps;
}

SudakovRecord sudakov_check(const std::vector<Eigen::VectorXd>& points,
                            double separation, std::size_t samples,
                            RandomStream& rng) {
  if (points.empty())
    throw std::invalid_argument("sudakov_check: no points");
  if (samples < 2)
    throw std::invalid_argument("sudakov_check: need at least 2 samples");
  const Eigen::Index dim = points.front().size();
  for (const auto& p : points)
    if (p.size() != dim)
      throw std::invalid_argument("sudakov_check: inconsistent dimensions");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if ((points[i] - points[j]).norm() < separation - 1e-9)
        throw std::invalid_argument(
            "sudakov_check: separation violated by a point pair");

  std::vector<double> maxima(samples);
  Eigen::VectorXd w(dim);
  for (std::size_t s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < dim; ++i) w[i] = rng.gaussian();
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : points) best = std::max(best, w.dot(p));
    maxima[s] = best;
  }

  SudakovRecord rec;
  rec.m = static_cast<int>(points.size());
  rec.separation = separation;
  rec.estimate = mean(maxima);
  rec.reference = separation * std::sqrt(std::log(static_cast<double>(rec.m)));
  rec.ratio = rec.m > 1 ? rec.estimate / rec.reference : 0.0;
  rec.samples = samples;
  rec.std_error = std::sqrt(sample_variance(maxima) / samples);
  return rec;
}

std::vector<SphereTailRecord> sphere_tail_check(
    int d, const std::vector<double>& t_values, std::size_t samples,
    RandomStream& rng) {
  if (d < 1) throw std::invalid_argument("sphere_tail_check: d must be >= 1");
  if (samples < 2)
    throw std::invalid_argument("sphere_tail_check: need at least 2 samples");

  const double radius = std::sqrt(static_cast<double>(d));
  std::vector<double> inner(samples);
  Eigen::VectorXd x(d), y(d);
  for (std::size_t s = 0; s < samples; ++s) {
    for (int i = 0; i < d; ++i) x[i] = rng.gaussian();
    for (int i = 0; i < d; ++i) y[i] = rng.gaussian();
    if (x.norm() == 0.0 || y.norm() == 0.0) {
      inner[s] = 0.0;
      continue;
    }
    inner[s] = (radius / x.norm()) * (radius / y.norm()) * x.dot(y);
  }

  std::vector<SphereTailRecord> records;
  records.reserve(t_values.size());
  for (double t : t_values) {
    std::size_t exceed = 0;
    for (double v : inner)
      if (v >= t) ++exceed;
    SphereTailRecord rec;
    rec.t = t;
    rec.empirical_tail = static_cast<double>(exceed) / samples;
    rec.bound = std::exp(-t * t / (2.0 * d));
    rec.samples = samples;
    rec.halfwidth = binomial_halfwidth99(samples);
    records.push_back(rec);
  }
  return records;
}

VarianceRecord variance_check_last_layer(
    const std::vector<PointCloud>& feature_maps, std::size_t trials,
    RandomStream& rng) {
  if (feature_maps.empty())
    throw std::invalid_argument("variance_check_last_layer: no feature maps");
  if (trials < 100)
    throw std::invalid_argument(
        "variance_check_last_layer: need at least 100 trials");
  const Eigen::Index rows = feature_maps.front().dim();
  const Eigen::Index cols = feature_maps.front().count();
  double max_norm = 0.0;
  for (const PointCloud& psi : feature_maps) {
    if (psi.dim() != rows || psi.count() != cols)
      throw std::invalid_argument(
          "variance_check_last_layer: inconsistent feature shapes");
    max_norm = std::max(max_norm, psi.norm());
  }
  if (max_norm > 2.0)
    throw std::invalid_argument(
        "variance_check_last_layer: feature maps must satisfy ||Psi|| <= 2");

  std::vector<double> z_values(trials);
  Eigen::MatrixXd g(rows, cols);
  for (std::size_t s = 0; s < trials; ++s) {
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = rng.gaussian();
    double best = -std::numeric_limits<double>::infinity();
    for (const PointCloud& psi : feature_maps)
      best = std::max(best, g.cwiseProduct(psi.m).sum());
    z_values[s] = best;
  }

  // Batched variance estimate: stable point estimate plus an honest
  // standard error from batch scatter.
  const std::size_t batches = 10;
  const std::size_t per_batch = trials / batches;
  std::vector<double> batch_vars;
  for (std::size_t b = 0; b < batches && per_batch >= 2; ++b) {
    std::span<const double> chunk(z_values.data() + b * per_batch, per_batch);
    batch_vars.push_back(sample_variance(chunk));
  }

  VarianceRecord rec;
  rec.trials = trials;
  rec.max_feature_norm = max_norm;
  rec.variance = sample_variance(z_values);
  if (batch_vars.size() >= 2)
    rec.sigma = std::sqrt(sample_variance(batch_vars) /
                          static_cast<double>(batch_vars.size()));
  return rec;
}

}  // namespace orbitadv
