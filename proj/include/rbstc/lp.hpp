#pragma once

#include <optional>

#include <Eigen/Dense>

namespace rbstc::lp {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
  Status status = Status::Infeasible;
  double value = 0.0;
  Eigen::VectorXd x;
};

/// Dense two-phase simplex: maximize c'x subject to A x <= b, x >= 0.
/// Intended for the small programs arising in cone/subspace feasibility.
Result maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

/// Decides whether the polyhedral cone {x : normals * x >= 0} meets the
/// column span of `basis` in a nonzero vector. Returns a unit witness or
/// nullopt when the intersection is {0}.
std::optional<Eigen::VectorXd> cone_meets_subspace(const Eigen::MatrixXd& normals,
                                                   const Eigen::MatrixXd& basis,
                                                   double tol = 1e-9);

}  // namespace rbstc::lp
