#include "orbitadv/point_cloud.hpp"

#include <cmath>

#include "orbitadv/random_stream.hpp"

namespace orbitadv {

double PointCloud::spectral_norm() const {
  if (m.size() == 0) return 0.0;
  if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  // Iterate on the smaller of X^T X (n x n) and X X^T (d x d); for a PSD
  // matrix the iterate norms ||G v_k|| converge to the top eigenvalue.
  Eigen::MatrixXd gram;
  if (m.cols() <= m.rows())
    gram.noalias() = m.transpose() * m;
  else
    gram.noalias() = m * m.transpose();

  const Eigen::Index k = gram.rows();
  // Fixed pseudo-random start vector: deterministic and almost surely not
  // orthogonal to the leading eigenvector.
  RandomStream rng(0x9e3779b97f4a7c15ULL);
  Eigen::VectorXd v(k);
  for (Eigen::Index i = 0; i < k; ++i) v[i] = rng.gaussian();
  v.normalize();

  double lambda = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    Eigen::VectorXd w = gram * v;
    double nw = w.norm();
    if (nw == 0.0) {
      // Start vector landed in the null space: restart from the largest
      // column of the Gram matrix, which lies in its range.
      Eigen::Index c;
      gram.colwise().norm().maxCoeff(&c);
      if (gram.col(c).norm() == 0.0) return 0.0;
      v = gram.col(c).normalized();
      continue;
    }
    if (iter > 0 && std::abs(nw - lambda) <= 1e-12 * nw) {
      lambda = nw;
      break;
    }
    lambda = nw;
    v = w / nw;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

PointCloud random_sphere_columns(int dimension, int count, RandomStream& rng) {
  Eigen::MatrixXd m(dimension, count);
  for (int j = 0; j < count; ++j) {
    for (int i = 0; i < dimension; ++i) m(i, j) = rng.gaussian();
    double nrm = m.col(j).norm();
    m.col(j) *= std::sqrt(static_cast<double>(dimension)) / nrm;
  }
  return PointCloud(std::move(m));
}

}  // namespace orbitadv
