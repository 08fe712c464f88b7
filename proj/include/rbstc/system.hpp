#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbstc/numkit.hpp"

namespace rbstc {

class Partition;

/// Plant x' = A x + B u under sample-and-hold feedback u = K x(t_k).
struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd K;

  LinearSystem() = default;
  LinearSystem(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd k);

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }

  Eigen::MatrixXd closed_loop() const { return A + B * K; }
  /// Advisory only: every eigenvalue of A + BK has negative real part.
  bool closed_loop_hurwitz() const;
  void validate() const;
};

struct TransitionMatrix {
  double tau = 0.0;
  Eigen::MatrixXd G;
};

/// G(tau) = e^{A tau} + int_0^tau e^{A(tau - s)} B K ds, read off the blocks
/// of exp([[A, BK], [0, 0]] tau).
TransitionMatrix transition_matrix(const LinearSystem& sys, double tau);

std::vector<Eigen::MatrixXd> transition_matrices(const LinearSystem& sys,
                                                 std::span<const double> taus);

/// Gain placing the closed-loop poles of a controllable companion pair
/// (A with shift structure in the first n-1 rows, B = e_n) at `desired`.
Eigen::MatrixXd pole_place_companion(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                     std::span<const Complex> desired);

/// Monic characteristic polynomial coefficients c_0..c_{n-1} of prod (s - r).
std::vector<double> monic_from_roots(std::span<const Complex> roots);

struct A1Violation {
  enum class Kind { DuplicateTau, NullDirection } kind;
  int region = -1;
  int other_region = -1;
  int power = 0;
  Eigen::VectorXd witness;
  std::string message;
};

struct A1Report {
  bool passed = true;
  std::vector<A1Violation> violations;
};

/// Checks that the IETs are pairwise distinct and that no sampled unit
/// vector of R_i lies in ker G^l(tau_i), l = 1..n.
A1Report check_assumption_a1(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                             const Tolerances& tol = {}, int samples = 256,
                             unsigned long long seed = 7);

}  // namespace rbstc
