#pragma once

#include <Eigen/Dense>

#include "orbitadv/random_stream.hpp"

namespace orbitadv {

// An ordered tuple of n vectors in R^d, stored as the d x n matrix whose
// columns are the vectors.  The Euclidean norm of the tuple is the Frobenius
// norm of the matrix; the spectral norm is its largest singular value.
struct PointCloud {
  Eigen::MatrixXd m;  // d x n

  PointCloud() = default;
  explicit PointCloud(Eigen::MatrixXd matrix) : m(std::move(matrix)) {}

  Eigen::Index dim() const { return m.rows(); }
  Eigen::Index count() const { return m.cols(); }

  double norm() const { return m.norm(); }

  // Largest singular value via power iteration on the smaller Gram matrix
  // (relative change < 1e-12 or 10000 iterations).  All-zero input gives 0.
  double spectral_norm() const;
};

// Draws a d x n cloud whose columns are independent uniform points on the
// sphere of radius sqrt(d).
PointCloud random_sphere_columns(int dimension, int count, RandomStream& rng);

}  // namespace orbitadv
