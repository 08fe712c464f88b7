#include "rbstc/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

#include "rbstc/errors.hpp"

namespace rbstc {

namespace {

constexpr double kLooseClusterRadius = 1e-2;
constexpr double kAmbiguityFactor = 100.0;

void require_square_finite(const Eigen::MatrixXd& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument(std::string(who) + ": matrix must be square");
  }
  if (!m.allFinite()) {
    throw InvalidArgument(std::string(who) + ": matrix has non-finite entries");
  }
}

Eigen::MatrixXcd shifted(const Eigen::MatrixXd& m, Complex lambda) {
  Eigen::MatrixXcd k = m.cast<Complex>();
  k.diagonal().array() -= lambda;
  return k;
}

Eigen::MatrixXcd power(const Eigen::MatrixXcd& k, int p) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(k.rows(), k.cols());
  for (int i = 0; i < p; ++i) out = out * k;
  return out;
}

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

// A group of m computed eigenvalues is one eigenvalue when (M - mu I)^m has
// an m-dimensional numerical kernel at their mean mu. Perturbed Jordan blocks
// scatter their eigenvalues by eps^(1/m) but keep an accurate mean.
bool group_is_single_eigenvalue(const Eigen::MatrixXd& m, double norm_m,
                                const std::vector<Complex>& values,
                                const std::vector<int>& members, double tol_rank) {
  const int n = static_cast<int>(m.rows());
  const int k = static_cast<int>(members.size());
  Complex mu = 0.0;
  for (int i : members) mu += values[i];
  mu /= static_cast<double>(k);
  Eigen::MatrixXcd p = power(shifted(m, mu), k);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p);
  const auto& sv = svd.singularValues();
  const double floor = std::max(sv(0), std::pow(std::max(norm_m, 1.0), k));
  return sv(n - k) <= tol_rank * floor;
}

// Single-linkage components of `idx` at the given radius.
std::vector<std::vector<int>> link(const std::vector<Complex>& values,
                                   const std::vector<int>& idx, double radius) {
  const int k = static_cast<int>(idx.size());
  std::vector<int> comp(k, -1);
  int next = 0;
  for (int s = 0; s < k; ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    std::vector<int> stack{s};
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (int b = 0; b < k; ++b) {
        if (comp[b] < 0 && std::abs(values[idx[a]] - values[idx[b]]) <= radius) {
          comp[b] = next;
          stack.push_back(b);
        }
      }
    }
    ++next;
  }
  std::vector<std::vector<int>> out(next);
  for (int s = 0; s < k; ++s) out[comp[s]].push_back(idx[s]);
  return out;
}

void cluster_recursive(const Eigen::MatrixXd& m, double norm_m,
                       const std::vector<Complex>& values, const std::vector<int>& idx,
                       double radius, double tight, double tol_rank,
                       std::vector<std::vector<int>>& out) {
  for (auto& group : link(values, idx, radius)) {
    if (group.size() == 1 || radius <= tight ||
        group_is_single_eigenvalue(m, norm_m, values, group, tol_rank)) {
      out.push_back(group);
    } else {
      cluster_recursive(m, norm_m, values, group, std::max(radius / 10.0, tight), tight,
                        tol_rank, out);
    }
  }
}

}  // namespace

void Tolerances::validate() const {
  for (double t : {eig, rank, orth, member, conv}) {
    if (!(t > 0.0) || !std::isfinite(t)) {
      throw InvalidArgument("Tolerances: every tolerance must be a positive finite number");
    }
  }
  if (rank < 1e-15) throw InvalidArgument("Tolerances: rank tolerance below machine precision");
}

const char* to_string(Defect d) {
  switch (d) {
    case Defect::No: return "no";
    case Defect::Yes: return "yes";
    case Defect::Ambiguous: return "ambiguous";
  }
  return "?";
}

double Spectrum::cluster_radius(const Tolerances& tol) const {
  return tol.eig * std::max(1.0, spectral_radius);
}

int Spectrum::find(Complex lambda, const Tolerances& tol) const {
  int best = -1;
  double best_d = 0.0;
  for (int i = 0; i < static_cast<int>(clusters.size()); ++i) {
    double d = std::abs(clusters[i].value - lambda);
    if (best < 0 || d < best_d) {
      best = i;
      best_d = d;
    }
  }
  if (best >= 0 && best_d <= 10.0 * cluster_radius(tol)) return best;
  return -1;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& m) {
  require_square_finite(m, "expm");
  if (m.size() == 0) return m;
  Eigen::MatrixXd out = m.exp();
  if (!out.allFinite()) throw NumericalFailure("expm: result overflowed");
  return out;
}

Spectrum eig(const Eigen::MatrixXd& m, const Tolerances& tol) {
  require_square_finite(m, "eig");
  tol.validate();
  const int n = static_cast<int>(m.rows());
  Spectrum spec;
  spec.dim = n;
  if (n == 0) return spec;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("eig: QR iteration did not converge");
  }
  std::vector<Complex> values(n);
  for (int i = 0; i < n; ++i) values[i] = solver.eigenvalues()(i);
  double rho = 0.0;
  for (auto v : values) rho = std::max(rho, std::abs(v));
  spec.spectral_radius = rho;

  const double scale = std::max(1.0, rho);
  const double tight = tol.eig * scale;
  const double loose = std::max(tight, kLooseClusterRadius * scale);
  const double norm_m = spectral_norm(m);

  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::vector<int>> groups;
  cluster_recursive(m, norm_m, values, all, loose, tight, tol.rank, groups);

  for (const auto& g : groups) {
    Complex mean = 0.0;
    for (int i : g) mean += values[i];
    mean /= static_cast<double>(g.size());
    EigenCluster c;
    c.value = std::abs(mean.imag()) <= 0.5 * tight ? Complex(mean.real(), 0.0) : mean;
    c.algebraic = static_cast<int>(g.size());
    spec.clusters.push_back(c);
  }

  // Conjugate clusters carry exactly conjugate values.
  for (auto& c : spec.clusters) {
    if (c.value.imag() <= 0.0) continue;
    EigenCluster* partner = nullptr;
    double best = 0.0;
    for (auto& d : spec.clusters) {
      if (d.value.imag() >= 0.0) continue;
      double dist = std::abs(d.value - std::conj(c.value));
      if (partner == nullptr || dist < best) {
        partner = &d;
        best = dist;
      }
    }
    if (partner != nullptr) partner->value = std::conj(c.value);
  }

  std::sort(spec.clusters.begin(), spec.clusters.end(), [](const auto& a, const auto& b) {
    if (std::abs(a.value) != std::abs(b.value)) return std::abs(a.value) > std::abs(b.value);
    if (a.value.real() != b.value.real()) return a.value.real() > b.value.real();
    return a.value.imag() > b.value.imag();
  });

  std::vector<double> residuals;
  for (auto& c : spec.clusters) {
    Eigen::MatrixXcd k = shifted(m, c.value);
    Eigen::MatrixXcd v;
    Eigen::VectorXd sv;
    if (c.is_real()) {
      Eigen::MatrixXd kr = k.real();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(kr, Eigen::ComputeFullV);
      sv = svd.singularValues();
      v = svd.matrixV().cast<Complex>();
    } else {
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(k, Eigen::ComputeFullV);
      sv = svd.singularValues();
      v = svd.matrixV();
    }
    const double thr = tol.rank * std::max(sv(0), tol.rank * scale);
    int zeros = 0;
    for (int i = 0; i < n; ++i) {
      if (sv(i) <= thr) ++zeros;
    }
    c.geometric = std::clamp(zeros, 1, c.algebraic);
    c.defective = c.geometric < c.algebraic ? Defect::Yes : Defect::No;
    for (int i = n - c.algebraic; i < n; ++i) {
      if (sv(i) > thr / kAmbiguityFactor && sv(i) < thr * kAmbiguityFactor) {
        c.defective = Defect::Ambiguous;
      }
    }
    for (int j = 0; j < c.geometric; ++j) {
      Eigen::VectorXcd vec = v.col(n - 1 - j);
      if (c.is_real()) vec = vec.real().cast<Complex>();
      vec.normalize();
      c.eigenvectors.push_back(vec);
      residuals.push_back((m.cast<Complex>() * vec - c.value * vec).norm());
    }
  }
  const double bound = 1e-8 * std::max(norm_m, 1e-300);
  for (double r : residuals) {
    if (!(r <= bound)) {
      throw NumericalFailure("eig: eigenpair residual exceeds bound", residuals);
    }
  }
  return spec;
}

Subspace rspan(const Eigen::VectorXcd& v, double tol_rank) {
  if (v.size() == 0 || v.norm() == 0.0) throw InvalidArgument("rspan: zero vector");
  // v + v* = 2 Re v and i (v - v*) = -2 Im v.
  Eigen::MatrixXd cols(v.size(), 2);
  cols.col(0) = v.real();
  cols.col(1) = v.imag();
  return Subspace::span(cols, tol_rank);
}

Subspace generalized_eigenspace(const Eigen::MatrixXd& m, const Spectrum& spec, int cluster,
                                const Tolerances& tol) {
  if (cluster < 0 || cluster >= static_cast<int>(spec.clusters.size())) {
    throw InvalidArgument("generalized_eigenspace: cluster index out of range");
  }
  const EigenCluster& c = spec.clusters[cluster];
  const int n = static_cast<int>(m.rows());
  const int a = c.algebraic;
  // The dimension is known from clustering, so take exactly `a` kernel
  // directions of (M - lambda I)^a.
  if (c.is_real()) {
    Eigen::MatrixXd k = m;
    k.diagonal().array() -= c.value.real();
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < a; ++i) p = p * k;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(p, Eigen::ComputeFullV);
    return Subspace::span(svd.matrixV().rightCols(a), tol.rank);
  }
  Eigen::MatrixXcd p = power(shifted(m, c.value), a);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(p, Eigen::ComputeFullV);
  Eigen::MatrixXcd ker = svd.matrixV().rightCols(a);
  Eigen::MatrixXd both(n, 2 * a);
  both << ker.real(), ker.imag();
  return Subspace::span(both, tol.rank);
}

Subspace generalized_eigenspace(const Eigen::MatrixXd& m, Complex lambda, const Tolerances& tol) {
  Spectrum spec = eig(m, tol);
  int idx = spec.find(lambda, tol);
  if (idx < 0) throw InvalidArgument("generalized_eigenspace: value is not an eigenvalue");
  return generalized_eigenspace(m, spec, idx, tol);
}

double subspace_distance(const Eigen::VectorXd& x, const Subspace& s) {
  const double nx = x.norm();
  if (std::abs(nx - 1.0) > 1e-8) throw InvalidArgument("subspace_distance: x must be a unit vector");
  return s.distance_to_unit_sphere(x);
}

int numerical_rank(const Eigen::MatrixXd& m, double tol_rank) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol_rank * sv(0)) ++r;
  }
  return r;
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& m, double tol_rank) {
  const int cols = static_cast<int>(m.cols());
  if (m.size() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int r = 0;
  if (sv(0) > 0.0) {
    for (int i = 0; i < sv.size(); ++i) {
      if (sv(i) > tol_rank * sv(0)) ++r;
    }
  }
  return svd.matrixV().rightCols(cols - r);
}

}  // namespace rbstc
