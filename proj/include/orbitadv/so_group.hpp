#pragma once

#include <vector>

#include <Eigen/Dense>

#include "orbitadv/point_cloud.hpp"
#include "orbitadv/random_stream.hpp"

namespace orbitadv {

// Element of SO(d): orthogonal with determinant +1.
struct RotationMatrix {
  Eigen::MatrixXd m;  // d x d

  RotationMatrix() = default;
  explicit RotationMatrix(Eigen::MatrixXd matrix) : m(std::move(matrix)) {}

  static RotationMatrix identity(Eigen::Index d) {
    return RotationMatrix(Eigen::MatrixXd::Identity(d, d));
  }

  Eigen::Index dim() const { return m.rows(); }

  // ||U^T U - I||_F <= 1e-10 and det within 1e-8 of +1.
  bool is_valid() const;
};

// Rotation by `theta` in the oriented plane spanned by the orthonormal pair
// (u, v), identity on the orthogonal complement:
//   R(theta) = I + (cos(theta)-1)(u u^T + v v^T) + sin(theta)(v u^T - u v^T).
struct PlaneRotation {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  double theta = 0.0;
};

// Uniform (Haar) sample: QR of a standard Gaussian matrix, columns of Q
// multiplied by the signs of R's diagonal, then one column negated if the
// determinant is -1.
RotationMatrix haar_sample(Eigen::Index d, RandomStream& rng);

double frobenius_distance(const RotationMatrix& a, const RotationMatrix& b);

// Simultaneous rotation of all columns: U * X.
PointCloud act(const RotationMatrix& u, const PointCloud& x);

// Applies R(theta) to every column without materializing the matrix.
// Throws if (u, v) is not orthonormal to within 1e-10.
PointCloud plane_rotation_apply(const PlaneRotation& p, const PointCloud& x);

// Explicit d x d matrix of the plane rotation.
RotationMatrix materialize(const PlaneRotation& p);

// Haar-distributed point on the orbit {U x0 : U in SO(d)}.
PointCloud orbit_sample(const PointCloud& x0, RandomStream& rng);

// Decomposition of a rotation into rotations in mutually orthogonal
// invariant planes (via the real Schur form).  Angles lie in (-pi, pi];
// -1 eigenvalue pairs become pi-rotations.  Composing the returned planes
// in any order reproduces the rotation.
std::vector<PlaneRotation> rotation_planes(const RotationMatrix& v);

// Applies the rotation obtained by scaling every plane angle by t.  t = 0 is
// the identity, t = 1 the original rotation; the induced displacement
// ||V(t)x - x|| is nondecreasing in t on [0, 1] when all angles lie in
// [-pi, pi].
PointCloud apply_scaled_planes(const std::vector<PlaneRotation>& planes,
                               double t, const PointCloud& x);

}  // namespace orbitadv
