#pragma once
// Independent reference computations used only by the tests.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// Truncated Taylor series in long double with scaling and squaring.
inline Eigen::MatrixXd taylor_expm(const Eigen::MatrixXd& m, int terms = 30) {
  const int n = static_cast<int>(m.rows());
  MatL a = m.cast<long double>();
  long double norm = 0;
  for (int i = 0; i < n; ++i) {
    long double row = 0;
    for (int j = 0; j < n; ++j) row += std::fabs(a(i, j));
    norm = std::max(norm, row);
  }
  int s = 0;
  while (norm > 0.5L) {
    norm /= 2;
    ++s;
  }
  a /= std::pow(2.0L, s);
  MatL sum = MatL::Identity(n, n), term = MatL::Identity(n, n);
  for (int k = 1; k <= terms; ++k) {
    term = term * a / static_cast<long double>(k);
    sum += term;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return sum.cast<double>();
}

// Adaptive Simpson quadrature of a matrix-valued function on [a, b].
inline Eigen::MatrixXd simpson(const std::function<Eigen::MatrixXd(double)>& f, double a, double b,
                               double tol, int depth = 40) {
  std::function<Eigen::MatrixXd(double, double, const Eigen::MatrixXd&, const Eigen::MatrixXd&,
                                const Eigen::MatrixXd&, const Eigen::MatrixXd&, double, int)>
      rec = [&](double lo, double hi, const Eigen::MatrixXd& flo, const Eigen::MatrixXd& fmid,
                const Eigen::MatrixXd& fhi, const Eigen::MatrixXd& whole, double eps,
                int d) -> Eigen::MatrixXd {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const Eigen::MatrixXd flm = f(lm), frm = f(rm);
    const Eigen::MatrixXd left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const Eigen::MatrixXd right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    const Eigen::MatrixXd diff = left + right - whole;
    if (d <= 0 || diff.cwiseAbs().maxCoeff() <= 15.0 * eps) return left + right + diff / 15.0;
    return rec(lo, mid, flo, flm, fmid, left, eps / 2, d - 1) +
           rec(mid, hi, fmid, frm, fhi, right, eps / 2, d - 1);
  };
  const Eigen::MatrixXd fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const Eigen::MatrixXd whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return rec(a, b, fa, fm, fb, whole, tol, depth);
}

// G(tau) = e^{A tau} + int_0^tau e^{A(tau - s)} B K ds by quadrature.
inline Eigen::MatrixXd transition_by_quadrature(const Eigen::MatrixXd& a, const Eigen::MatrixXd& bk,
                                                double tau, double tol = 1e-14) {
  auto f = [&](double s) { Eigen::MatrixXd e = taylor_expm(a * (tau - s)); return Eigen::MatrixXd(e * bk); };
  return taylor_expm(a * tau) + simpson(f, 0.0, tau, tol);
}

// Real roots of a monic polynomial s^n + c_{n-1} s^{n-1} + ... + c_0 by sign
// scanning and bisection over [-bound, bound] (Cauchy bound).
inline std::vector<double> real_roots(const std::vector<double>& c, int grid = 200000) {
  const int n = static_cast<int>(c.size());
  auto p = [&](long double x) {
    long double v = 1.0L;
    for (int k = n - 1; k >= 0; --k) v = v * x + c[k];
    return v;
  };
  double bound = 1.0;
  for (double ck : c) bound = std::max(bound, 1.0 + std::abs(ck));
  std::vector<double> roots;
  const double h = 2.0 * bound / grid;
  long double prev = p(-bound);
  for (int i = 1; i <= grid; ++i) {
    const double x = -bound + i * h;
    const long double cur = p(x);
    if (cur == 0.0L) {
      roots.push_back(x);
    } else if ((prev < 0) != (cur < 0) && prev != 0.0L) {
      long double lo = x - h, hi = x;
      for (int it = 0; it < 200; ++it) {
        const long double mid = 0.5L * (lo + hi);
        if ((p(mid) < 0) == (p(lo) < 0)) lo = mid; else hi = mid;
      }
      roots.push_back(static_cast<double>(0.5L * (lo + hi)));
    }
    prev = cur;
  }
  return roots;
}

// Distance from unit x to the unit sphere of span(basis) by dense search
// over the sphere of a 2-dimensional subspace, with local refinement.
inline double grid_distance(const Eigen::VectorXd& x, const Eigen::MatrixXd& basis2) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis2);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(basis2.rows(), 2);
  double best = 1e300, best_t = 0;
  const int steps = 20000;
  for (int i = 0; i < steps; ++i) {
    const double t = 2 * M_PI * i / steps;
    const double d = (x - (std::cos(t) * q.col(0) + std::sin(t) * q.col(1))).norm();
    if (d < best) { best = d; best_t = t; }
  }
  double h = 2 * M_PI / steps;
  for (int it = 0; it < 60; ++it) {
    for (double t : {best_t - h, best_t + h}) {
      const double d = (x - (std::cos(t) * q.col(0) + std::sin(t) * q.col(1))).norm();
      if (d < best) { best = d; best_t = t; }
    }
    h *= 0.5;
  }
  return best;
}

inline Eigen::MatrixXd random_matrix(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = scale * nd(rng);
  return m;
}

inline Eigen::VectorXd random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = nd(rng);
  return v / v.norm();
}

}  // namespace oracle
