#pragma once

#include <Eigen/Dense>

namespace rbstc {

/// Linear subspace of R^n stored as an orthonormal column basis.
class Subspace {
 public:
  explicit Subspace(int ambient_dim = 0);

  /// Orthonormalizes the columns of `vectors`; directions whose singular
  /// value falls below `tol_rank * sigma_max` are dropped.
  static Subspace span(const Eigen::MatrixXd& vectors, double tol_rank = 1e-9);
  static Subspace whole(int ambient_dim);

  int ambient_dim() const { return ambient_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  bool empty() const { return basis_.cols() == 0; }
  const Eigen::MatrixXd& basis() const { return basis_; }

  Eigen::MatrixXd projector() const;
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;

  /// Distance from a unit vector to the unit sphere of the subspace. The
  /// nearest point is P x / |P x|, which gives sqrt(2 - 2 |P x|).
  double distance_to_unit_sphere(const Eigen::VectorXd& x) const;

  bool contains(const Eigen::VectorXd& x, double tol) const;
  bool contains(const Subspace& other, double tol) const;

  Subspace sum(const Subspace& other, double tol_rank = 1e-9) const;
  Subspace intersect(const Subspace& other, double tol = 1e-7) const;

  /// Spectral norm of the difference of orthogonal projectors.
  double projector_distance(const Subspace& other) const;

 private:
  int ambient_;
  Eigen::MatrixXd basis_;
};

}  // namespace rbstc
