#include "rbstc/subspace.hpp"

#include <algorithm>
#include <cmath>

#include "rbstc/errors.hpp"

namespace rbstc {

Subspace::Subspace(int ambient_dim)
    : ambient_(ambient_dim), basis_(Eigen::MatrixXd::Zero(ambient_dim, 0)) {
  if (ambient_dim < 0) throw InvalidArgument("Subspace: negative dimension");
}

Subspace Subspace::span(const Eigen::MatrixXd& vectors, double tol_rank) {
  Subspace s(static_cast<int>(vectors.rows()));
  if (vectors.cols() == 0 || vectors.rows() == 0) return s;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(vectors, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return s;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol_rank * sv(0)) ++rank;
  }
  s.basis_ = svd.matrixU().leftCols(rank);
  return s;
}

Subspace Subspace::whole(int ambient_dim) {
  Subspace s(ambient_dim);
  s.basis_ = Eigen::MatrixXd::Identity(ambient_dim, ambient_dim);
  return s;
}

Eigen::MatrixXd Subspace::projector() const { return basis_ * basis_.transpose(); }

Eigen::VectorXd Subspace::project(const Eigen::VectorXd& x) const {
  return basis_ * (basis_.transpose() * x);
}

double Subspace::distance_to_unit_sphere(const Eigen::VectorXd& x) const {
  if (x.size() != ambient_) throw InvalidArgument("Subspace: dimension mismatch");
  if (empty()) return std::sqrt(2.0);
  const Eigen::VectorXd c = basis_.transpose() * x;
  const double proj = std::min(c.norm(), 1.0);
  // 2 - 2|Px| cancels near 1; use the orthogonal residual r with
  // 1 - |Px| = r^2 / (1 + |Px|) instead.
  const double r = (x - basis_ * c).norm();
  return r * std::sqrt(2.0 / (1.0 + proj));
}

bool Subspace::contains(const Eigen::VectorXd& x, double tol) const {
  const double nx = x.norm();
  if (nx == 0.0) return true;
  return (x - project(x)).norm() <= tol * nx;
}

bool Subspace::contains(const Subspace& other, double tol) const {
  for (int j = 0; j < other.dim(); ++j) {
    if (!contains(Eigen::VectorXd(other.basis_.col(j)), tol)) return false;
  }
  return true;
}

Subspace Subspace::sum(const Subspace& other, double tol_rank) const {
  if (other.ambient_ != ambient_) throw InvalidArgument("Subspace: dimension mismatch");
  Eigen::MatrixXd both(ambient_, dim() + other.dim());
  both << basis_, other.basis_;
  return span(both, tol_rank);
}

Subspace Subspace::intersect(const Subspace& other, double tol) const {
  if (other.ambient_ != ambient_) throw InvalidArgument("Subspace: dimension mismatch");
  Subspace out(ambient_);
  if (empty() || other.empty()) return out;
  // Principal vectors with cosine 1 span the intersection.
  Eigen::MatrixXd cross = basis_.transpose() * other.basis_;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  int k = 0;
  while (k < sv.size() && sv(k) >= 1.0 - tol) ++k;
  if (k == 0) return out;
  return span(basis_ * svd.matrixU().leftCols(k));
}

double Subspace::projector_distance(const Subspace& other) const {
  Eigen::MatrixXd d = projector() - other.projector();
  if (d.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d);
  return svd.singularValues()(0);
}

}  // namespace rbstc
