#include "rbstc/system.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "rbstc/errors.hpp"
#include "rbstc/regions.hpp"

namespace rbstc {

LinearSystem::LinearSystem(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd k)
    : A(std::move(a)), B(std::move(b)), K(std::move(k)) {
  validate();
}

void LinearSystem::validate() const {
  if (A.rows() == 0 || A.rows() != A.cols()) {
    throw InvalidArgument("LinearSystem: A must be a nonempty square matrix");
  }
  if (B.rows() != A.rows() || B.cols() == 0) {
    throw InvalidArgument("LinearSystem: B must have n rows and at least one column");
  }
  if (K.rows() != B.cols() || K.cols() != A.rows()) {
    throw InvalidArgument("LinearSystem: K must be m x n");
  }
  if (!A.allFinite() || !B.allFinite() || !K.allFinite()) {
    throw InvalidArgument("LinearSystem: non-finite entries");
  }
}

bool LinearSystem::closed_loop_hurwitz() const {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(closed_loop(), false);
  for (int i = 0; i < solver.eigenvalues().size(); ++i) {
    if (solver.eigenvalues()(i).real() >= 0.0) return false;
  }
  return true;
}

TransitionMatrix transition_matrix(const LinearSystem& sys, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw InvalidArgument("transition_matrix: tau must be finite and nonnegative");
  }
  const int n = sys.n();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = sys.A * tau;
  aug.topRightCorner(n, n) = sys.B * sys.K * tau;
  Eigen::MatrixXd e = expm(aug);
  return {tau, e.topLeftCorner(n, n) + e.topRightCorner(n, n)};
}

std::vector<Eigen::MatrixXd> transition_matrices(const LinearSystem& sys,
                                                 std::span<const double> taus) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(taus.size());
  for (double t : taus) out.push_back(transition_matrix(sys, t).G);
  return out;
}

std::vector<double> monic_from_roots(std::span<const Complex> roots) {
  // Coefficients stored lowest degree first, leading 1 implicit at the end.
  std::vector<Complex> poly{1.0};
  for (Complex r : roots) {
    std::vector<Complex> next(poly.size() + 1, 0.0);
    for (size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= r * poly[i];
    }
    poly = std::move(next);
  }
  std::vector<double> out(roots.size());
  for (size_t i = 0; i < roots.size(); ++i) {
    if (std::abs(poly[i].imag()) > 1e-9 * std::max(1.0, std::abs(poly[i]))) {
      throw InvalidArgument("desired poles must be closed under conjugation");
    }
    out[i] = poly[i].real();
  }
  return out;
}

Eigen::MatrixXd pole_place_companion(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                     std::span<const Complex> desired) {
  const int n = static_cast<int>(a.rows());
  if (n == 0 || a.cols() != n) throw InvalidArgument("pole_place_companion: A must be square");
  if (static_cast<int>(desired.size()) != n) {
    throw InvalidArgument("pole_place_companion: need exactly n desired poles");
  }
  bool companion = b.rows() == n && b.cols() == 1;
  for (int i = 0; companion && i < n; ++i) {
    companion = b(i, 0) == (i == n - 1 ? 1.0 : 0.0);
  }
  for (int i = 0; companion && i + 1 < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (a(i, j) != (j == i + 1 ? 1.0 : 0.0)) {
        companion = false;
        break;
      }
    }
  }
  if (!companion) {
    throw UnsupportedForm(
        "pole placement needs A in companion form with B = e_n; supply K directly");
  }
  // A + BK keeps the shift rows and has last row a_n + K; its characteristic
  // polynomial is s^n - sum_j (a_n + K)_j s^j.
  std::vector<double> c = monic_from_roots(desired);
  Eigen::MatrixXd k(1, n);
  for (int j = 0; j < n; ++j) k(0, j) = -c[j] - a(n - 1, j);
  return k;
}

A1Report check_assumption_a1(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                             const Tolerances& tol, int samples, unsigned long long seed) {
  A1Report report;
  const int r = partition.size();
  if (static_cast<int>(gs.size()) != r) {
    throw InvalidArgument("check_assumption_a1: partition and transition matrices misaligned");
  }
  const auto& taus = partition.taus();
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      if (taus[i] == taus[j]) {
        A1Violation v{A1Violation::Kind::DuplicateTau, i, j, 0, {}, {}};
        std::ostringstream os;
        os << "regions " << i << " and " << j << " share the inter-event time " << taus[i];
        v.message = os.str();
        report.violations.push_back(v);
      }
    }
  }
  const int n = partition.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int i = 0; i < r; ++i) {
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
    for (int l = 1; l <= n; ++l) {
      power = gs[i] * power;
      Eigen::MatrixXd ker = kernel_basis(power, tol.rank);
      if (ker.cols() == 0) continue;
      std::vector<Eigen::VectorXd> probes;
      for (int c = 0; c < ker.cols(); ++c) {
        probes.push_back(ker.col(c));
        probes.push_back(-ker.col(c));
      }
      for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd y(ker.cols());
        for (int c = 0; c < y.size(); ++c) y(c) = normal(rng);
        probes.push_back((ker * y).normalized());
      }
      for (const auto& x : probes) {
        if (partition.membership(x) == i) {
          A1Violation v{A1Violation::Kind::NullDirection, i, -1, l, x, {}};
          std::ostringstream os;
          os << "region " << i << " meets the null space of G^" << l << "(tau_" << i << ")";
          v.message = os.str();
          report.violations.push_back(v);
          break;
        }
      }
      if (!report.violations.empty() &&
          report.violations.back().kind == A1Violation::Kind::NullDirection &&
          report.violations.back().region == i) {
        break;
      }
    }
  }
  report.passed = report.violations.empty();
  return report;
}

}  // namespace rbstc
