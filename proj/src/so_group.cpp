#include "orbitadv/so_group.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace orbitadv {

bool RotationMatrix::is_valid() const {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  const Eigen::Index d = m.rows();
  double ortho_residual =
      (m.transpose() * m - Eigen::MatrixXd::Identity(d, d)).norm();
  if (ortho_residual > 1e-10) return false;
  return std::abs(m.determinant() - 1.0) <= 1e-8;
}

RotationMatrix haar_sample(Eigen::Index d, RandomStream& rng) {
  if (d < 1) throw std::invalid_argument("haar_sample: dimension must be >= 1");
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  // Track det(Q) instead of recomputing it: each active Householder
  // reflection contributes -1, and so does each column sign flip below.
  double det_sign = 1.0;
  for (Eigen::Index i = 0; i < d; ++i)
    if (qr.hCoeffs()(i) != 0.0) det_sign = -det_sign;
  // Fix the gauge: make diag(R) positive so Q is exactly Haar on O(d).
  for (Eigen::Index j = 0; j < d; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) {
      q.col(j) = -q.col(j);
      det_sign = -det_sign;
    }
  }
  // Land in SO(d); negating one fixed column maps Haar on the det=-1
  // component onto Haar on the det=+1 component.
  if (det_sign < 0.0) q.col(0) = -q.col(0);
  return RotationMatrix(std::move(q));
}

double frobenius_distance(const RotationMatrix& a, const RotationMatrix& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("frobenius_distance: dimension mismatch");
  return (a.m - b.m).norm();
}

PointCloud act(const RotationMatrix& u, const PointCloud& x) {
  if (u.dim() != x.dim())
    throw std::invalid_argument("act: dimension mismatch");
  return PointCloud(u.m * x.m);
}

PointCloud plane_rotation_apply(const PlaneRotation& p, const PointCloud& x) {
  if (p.u.size() != x.dim() || p.v.size() != x.dim())
    throw std::invalid_argument("plane_rotation_apply: dimension mismatch");
  const double tol = 1e-10;
  if (std::abs(p.u.norm() - 1.0) > tol || std::abs(p.v.norm() - 1.0) > tol ||
      std::abs(p.u.dot(p.v)) > tol)
    throw std::invalid_argument(
        "plane_rotation_apply: (u, v) must be an orthonormal pair");
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  // R x = x + (c-1)(u a^T + v b^T) + s(v a^T - u b^T), a = X^T u, b = X^T v.
  Eigen::RowVectorXd a = p.u.transpose() * x.m;
  Eigen::RowVectorXd b = p.v.transpose() * x.m;
  Eigen::MatrixXd out = x.m;
  out.noalias() += p.u * ((c - 1.0) * a - s * b);
  out.noalias() += p.v * ((c - 1.0) * b + s * a);
  return PointCloud(std::move(out));
}

RotationMatrix materialize(const PlaneRotation& p) {
  const Eigen::Index d = p.u.size();
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(d, d);
  r.noalias() += (c - 1.0) * (p.u * p.u.transpose() + p.v * p.v.transpose());
  r.noalias() += s * (p.v * p.u.transpose() - p.u * p.v.transpose());
  return RotationMatrix(std::move(r));
}

PointCloud orbit_sample(const PointCloud& x0, RandomStream& rng) {
  return act(haar_sample(x0.dim(), rng), x0);
}

std::vector<PlaneRotation> rotation_planes(const RotationMatrix& v) {
  const Eigen::Index d = v.dim();
  Eigen::RealSchur<Eigen::MatrixXd> schur(v.m);
  const Eigen::MatrixXd& t = schur.matrixT();
  const Eigen::MatrixXd& q = schur.matrixU();

  std::vector<PlaneRotation> planes;
  std::vector<Eigen::Index> minus_ones;
  Eigen::Index i = 0;
  while (i < d) {
    if (i + 1 < d && std::abs(t(i + 1, i)) > 1e-12) {
      // 2x2 rotation block [[cos, -sin], [sin, cos]] in the Schur basis.
      double theta = std::atan2(t(i + 1, i), t(i, i));
      planes.push_back(PlaneRotation{q.col(i), q.col(i + 1), theta});
      i += 2;
    } else {
      if (t(i, i) < 0.0) minus_ones.push_back(i);
      ++i;
    }
  }
  // det = +1 forces an even number of -1 eigenvalues; pair them up as
  // rotations by pi.
  for (std::size_t j = 0; j + 1 < minus_ones.size(); j += 2) {
    planes.push_back(PlaneRotation{q.col(minus_ones[j]),
                                   q.col(minus_ones[j + 1]),
                                   3.14159265358979323846});
  }
  return planes;
}

PointCloud apply_scaled_planes(const std::vector<PlaneRotation>& planes,
                               double t, const PointCloud& x) {
  // The planes are mutually orthogonal, so the scaled rotations commute and
  // can be applied one at a time.
  PointCloud y = x;
  for (const PlaneRotation& p : planes) {
    PlaneRotation scaled{p.u, p.v, t * p.theta};
    y = plane_rotation_apply(scaled, y);
  }
  return y;
}

}  // namespace orbitadv
