#include "rbstc/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "rbstc/errors.hpp"

namespace rbstc::lp {

namespace {

constexpr double kEps = 1e-12;

// Tableau layout: rows 0..m-1 constraints, row m objective, row m+1 the
// phase-one objective. Column n is the auxiliary variable, n+1 the RHS.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c)
      : m_(static_cast<int>(b.size())),
        n_(static_cast<int>(c.size())),
        basic_(m_),
        nonbasic_(n_ + 1),
        d_(Eigen::MatrixXd::Zero(m_ + 2, n_ + 2)) {
    d_.topLeftCorner(m_, n_) = a;
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      d_(i, n_) = -1.0;
      d_(i, n_ + 1) = b(i);
    }
    for (int j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      d_(m_, j) = -c(j);
    }
    nonbasic_[n_] = -1;
    d_(m_ + 1, n_) = 1.0;
  }

  Result solve() {
    Result res;
    int r = 0;
    for (int i = 1; i < m_; ++i) {
      if (d_(i, n_ + 1) < d_(r, n_ + 1)) r = i;
    }
    if (m_ > 0 && d_(r, n_ + 1) < -kEps) {
      pivot(r, n_);
      if (!simplex(1) || d_(m_ + 1, n_ + 1) < -kEps) {
        res.status = Status::Infeasible;
        return res;
      }
      for (int i = 0; i < m_; ++i) {
        if (basic_[i] != -1) continue;
        int s = -1;
        for (int j = 0; j <= n_; ++j) {
          if (s == -1 || d_(i, j) < d_(i, s) || (d_(i, j) == d_(i, s) && nonbasic_[j] < nonbasic_[s])) s = j;
        }
        pivot(i, s);
      }
    }
    if (!simplex(2)) {
      res.status = Status::Unbounded;
      res.value = std::numeric_limits<double>::infinity();
      return res;
    }
    res.status = Status::Optimal;
    res.x = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i) {
      if (basic_[i] >= 0 && basic_[i] < n_) res.x(basic_[i]) = d_(i, n_ + 1);
    }
    res.value = d_(m_, n_ + 1);
    return res;
  }

 private:
  void pivot(int r, int s) {
    const double inv = 1.0 / d_(r, s);
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      for (int j = 0; j < n_ + 2; ++j) {
        if (j != s) d_(i, j) -= d_(r, j) * d_(i, s) * inv;
      }
    }
    for (int j = 0; j < n_ + 2; ++j) {
      if (j != s) d_(r, j) *= inv;
    }
    for (int i = 0; i < m_ + 2; ++i) {
      if (i != r) d_(i, s) *= -inv;
    }
    d_(r, s) = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  bool simplex(int phase) {
    const int x = phase == 1 ? m_ + 1 : m_;
    for (int guard = 0; guard < 100000; ++guard) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasic_[j] == -1) continue;
        if (s == -1 || d_(x, j) < d_(x, s) ||
            (d_(x, j) == d_(x, s) && nonbasic_[j] < nonbasic_[s])) {
          s = j;
        }
      }
      if (d_(x, s) > -kEps) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (d_(i, s) < kEps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = d_(i, n_ + 1) / d_(i, s);
        const double rhs = d_(r, n_ + 1) / d_(r, s);
        if (lhs < rhs || (lhs == rhs && basic_[i] < basic_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
    throw NumericalFailure("lp: simplex iteration limit reached");
  }

  int m_, n_;
  std::vector<int> basic_, nonbasic_;
  Eigen::MatrixXd d_;
};

}  // namespace

Result maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != b.size() || a.cols() != c.size()) {
    throw InvalidArgument("lp::maximize: dimension mismatch");
  }
  return Tableau(a, b, c).solve();
}

std::optional<Eigen::VectorXd> cone_meets_subspace(const Eigen::MatrixXd& normals,
                                                   const Eigen::MatrixXd& basis, double tol) {
  const int k = static_cast<int>(basis.cols());
  if (k == 0) return std::nullopt;
  if (normals.rows() == 0) {
    return Eigen::VectorXd(basis.col(0).normalized());
  }
  // Coordinates y in [-1, 1]^k with A y >= 0, shifted to u = y + 1 >= 0.
  const Eigen::MatrixXd a = normals * basis;
  const int rows = static_cast<int>(a.rows());
  Eigen::MatrixXd lhs(rows + k, k);
  Eigen::VectorXd rhs(rows + k);
  lhs.topRows(rows) = -a;
  rhs.head(rows) = -a * Eigen::VectorXd::Ones(k);
  lhs.bottomRows(k) = Eigen::MatrixXd::Identity(k, k);
  rhs.tail(k) = Eigen::VectorXd::Constant(k, 2.0);
  for (int j = 0; j < k; ++j) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(k);
      c(j) = sign;
      Result r = maximize(c, lhs, rhs);
      if (r.status != Status::Optimal) continue;
      Eigen::VectorXd y = r.x - Eigen::VectorXd::Ones(k);
      if (sign * y(j) > tol) {
        Eigen::VectorXd x = basis * y;
        return Eigen::VectorXd(x.normalized());
      }
    }
  }
  return std::nullopt;
}

}  // namespace rbstc::lp
