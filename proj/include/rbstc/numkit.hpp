#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "rbstc/subspace.hpp"

namespace rbstc {

using Complex = std::complex<double>;

/// Numerical tolerances shared by every analysis routine.
struct Tolerances {
  double eig = 1e-7;      ///< eigenvalue clustering, relative to max(1, rho)
  double rank = 1e-9;     ///< singular values below rank * sigma_max are zero
  double orth = 1e-10;    ///< orthonormality / projector equality
  double member = 1e-6;   ///< set-membership and invariance checks
  double conv = 1e-12;    ///< root finding and iteration convergence

  void validate() const;
};

enum class Defect { No, Yes, Ambiguous };

const char* to_string(Defect d);

/// One distinct eigenvalue after clustering.
struct EigenCluster {
  Complex value;
  int algebraic = 1;
  int geometric = 1;
  Defect defective = Defect::No;
  /// Orthonormal basis of ker(M - value I); real-valued when value is real.
  std::vector<Eigen::VectorXcd> eigenvectors;

  bool is_real() const { return value.imag() == 0.0; }
  const Eigen::VectorXcd& eigenvector() const { return eigenvectors.front(); }
};

struct Spectrum {
  int dim = 0;
  std::vector<EigenCluster> clusters;
  double spectral_radius = 0.0;

  /// Index of the cluster matching `lambda` within the clustering radius,
  /// or -1.
  int find(Complex lambda, const Tolerances& tol) const;
  double cluster_radius(const Tolerances& tol) const;
};

/// Matrix exponential e^M.
Eigen::MatrixXd expm(const Eigen::MatrixXd& m);

/// Eigenvalues with algebraic/geometric multiplicities and kernel bases.
Spectrum eig(const Eigen::MatrixXd& m, const Tolerances& tol = {});

/// Real span of {v + v*, i (v - v*)}: a line for real (up to phase) v,
/// otherwise a plane.
Subspace rspan(const Eigen::VectorXcd& v, double tol_rank = 1e-9);

/// Real form of the generalized eigenspace of `lambda` (joint with its
/// conjugate when non-real).
Subspace generalized_eigenspace(const Eigen::MatrixXd& m, Complex lambda,
                                const Tolerances& tol = {});
Subspace generalized_eigenspace(const Eigen::MatrixXd& m, const Spectrum& spec,
                                int cluster, const Tolerances& tol = {});

/// Distance from the unit vector x to S intersected with the unit sphere.
double subspace_distance(const Eigen::VectorXd& x, const Subspace& s);

/// Numerical rank with singular values compared against tol_rank * sigma_1.
int numerical_rank(const Eigen::MatrixXd& m, double tol_rank);

/// Orthonormal basis of the numerical kernel of a real matrix.
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, double tol_rank);

}  // namespace rbstc
