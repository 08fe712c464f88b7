#include "rbstc/invariants.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "rbstc/errors.hpp"
#include "rbstc/lp.hpp"

namespace rbstc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd unit(const Eigen::VectorXd& x) { return x / x.norm(); }

bool same_ray(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
  return (a - b).norm() <= tol;
}

double gap(const Spectrum& spec, const Tolerances& tol) { return spec.cluster_radius(tol); }

Eigen::VectorXd real_vector(const Eigen::VectorXcd& v) {
  // Remove the phase so the largest entry is real, then take the real part.
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  Complex phase = std::abs(v(k)) > 0 ? std::conj(v(k)) / std::abs(v(k)) : Complex(1.0);
  Eigen::VectorXd r = (v * phase).real();
  return r / r.norm();
}

// Does G map the subspace into itself?
bool subspace_invariant(const Eigen::MatrixXd& g, const Subspace& s, double tol) {
  for (int j = 0; j < s.dim(); ++j) {
    Eigen::VectorXd y = g * s.basis().col(j);
    if (y.norm() == 0.0) continue;
    if (!s.contains(y, tol)) return false;
  }
  return true;
}

// Ray sets closed under the gamma map, every ray inside the cone.
void check_ray_set(const ConeView& view, PisCandidate& c, const Tolerances& tol) {
  c.contained = true;
  c.min_margin = kInf;
  for (const auto& r : c.rays) {
    c.contained = c.contained && view.contains(r);
    c.min_margin = std::min(c.min_margin, view.margin(r));
  }
  bool closed = c.contained;
  for (size_t i = 0; i < c.rays.size() && closed; ++i) {
    Eigen::VectorXd y = view.G * c.rays[i];
    if (y.norm() < tol.rank) {
      closed = false;
      break;
    }
    y /= y.norm();
    closed = c.distance(y) <= tol.member;
  }
  c.verified = closed;
}

void check_subspace(const ConeView& view, PisCandidate& c, int samples, unsigned long long seed,
                    const Tolerances& tol) {
  std::vector<Eigen::VectorXd> pts;
  if (c.span.dim() == 1) {
    Eigen::VectorXd v = c.span.basis().col(0);
    pts = {v, -v};
  } else {
    pts = sample_subspace(c.span, samples, seed);
    for (int j = 0; j < c.span.dim(); ++j) {
      pts.push_back(c.span.basis().col(j));
      pts.push_back(-c.span.basis().col(j));
    }
  }
  c.contained = true;
  c.min_margin = kInf;
  for (const auto& p : pts) {
    if (!view.contains(p)) {
      c.contained = false;
    }
    c.min_margin = std::min(c.min_margin, view.margin(p));
  }
  c.verified = c.contained && subspace_invariant(view.G, c.span, tol.member);
}

std::vector<int> cluster_pair(const Spectrum& spec, int cluster, const Tolerances& tol) {
  std::vector<int> out{cluster};
  const auto& c = spec.clusters[cluster];
  if (!c.is_real()) {
    int other = spec.find(std::conj(c.value), tol);
    if (other >= 0 && other != cluster) out.push_back(other);
  }
  return out;
}

}  // namespace

Eigen::VectorXd ConeView::step(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = G * x;
  const double ny = y.norm();
  if (!(ny > 0.0)) throw AssumptionViolation("gamma map: G x vanishes");
  return y / ny;
}

ConeView region_view(const Partition& partition, std::span<const Eigen::MatrixXd> gs, int region) {
  if (region < 0 || region >= partition.size() || static_cast<int>(gs.size()) != partition.size()) {
    throw InvalidArgument("region_view: region or transition matrices out of range");
  }
  ConeView v;
  v.region = region;
  v.pattern = {region};
  v.G = gs[region];
  const Partition* p = &partition;
  v.contains = [p, region](const Eigen::VectorXd& x) { return p->contains(region, x); };
  v.margin = [p, region](const Eigen::VectorXd& x) { return p->margin(region, x); };
  v.halfspaces = partition.halfspaces(region);
  return v;
}

const char* to_string(PisCandidate::Kind kind) {
  switch (kind) {
    case PisCandidate::Kind::Ray: return "ray";
    case PisCandidate::Kind::Line: return "line";
    case PisCandidate::Kind::Plane: return "plane";
    case PisCandidate::Kind::UnionOfRays: return "union-of-rays";
    case PisCandidate::Kind::Subspace: return "subspace";
  }
  return "?";
}

double PisCandidate::distance(const Eigen::VectorXd& x) const {
  if (is_ray_set()) {
    double d = kInf;
    for (const auto& r : rays) d = std::min(d, (x - r).norm());
    return d;
  }
  return subspace_distance(x, span);
}

std::vector<Eigen::VectorXd> PisCandidate::sample(int count, unsigned long long seed) const {
  std::vector<Eigen::VectorXd> out;
  if (is_ray_set()) {
    for (int k = 0; k < count; ++k) out.push_back(rays[k % rays.size()]);
    return out;
  }
  return sample_subspace(span, count, seed);
}

std::vector<Eigen::VectorXd> sample_subspace(const Subspace& s, int count,
                                             unsigned long long seed) {
  std::vector<Eigen::VectorXd> out;
  if (s.empty()) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd y(s.dim());
    for (int j = 0; j < s.dim(); ++j) y(j) = nd(rng);
    if (y.norm() == 0.0) y(0) = 1.0;
    out.push_back(unit(s.basis() * y));
  }
  return out;
}

std::vector<Subspace> reig(const Spectrum& spec, int cluster, const Tolerances& tol) {
  std::vector<Subspace> out;
  for (const auto& v : spec.clusters.at(cluster).eigenvectors) out.push_back(rspan(v, tol.rank));
  return out;
}

std::vector<Subspace> reig(const Eigen::MatrixXd& m, Complex lambda, const Tolerances& tol) {
  Spectrum spec = eig(m, tol);
  int idx = spec.find(lambda, tol);
  if (idx < 0) throw InvalidArgument("reig: value is not an eigenvalue");
  return reig(spec, idx, tol);
}

std::vector<MagnitudeGroup> magnitude_groups(const Spectrum& spec, const Tolerances& tol) {
  std::vector<MagnitudeGroup> out;
  const double r = gap(spec, tol);
  // Clusters are sorted by decreasing magnitude.
  for (int c = 0; c < static_cast<int>(spec.clusters.size()); ++c) {
    const double mu = std::abs(spec.clusters[c].value);
    if (!out.empty() && std::abs(out.back().mu - mu) <= r) {
      out.back().clusters.push_back(c);
    } else {
      out.push_back({mu, {c}});
    }
  }
  return out;
}

Subspace s_mu(const Spectrum& spec, const MagnitudeGroup& group, const Tolerances& tol) {
  Subspace s(spec.dim);
  for (int c : group.clusters) {
    for (const auto& r : reig(spec, c, tol)) s = s.sum(r, tol.rank);
  }
  return s;
}

Subspace s_mu(const Eigen::MatrixXd& m, double mu, const Tolerances& tol) {
  Spectrum spec = eig(m, tol);
  for (const auto& g : magnitude_groups(spec, tol)) {
    if (std::abs(g.mu - mu) <= gap(spec, tol)) return s_mu(spec, g, tol);
  }
  throw InvalidArgument("s_mu: no eigenvalue of that magnitude");
}

std::vector<PisCandidate> find_pirs(const ConeView& view, const Spectrum& spec,
                                    const Tolerances& tol) {
  std::vector<PisCandidate> out;
  const double floor = tol.rank * std::max(1.0, spec.spectral_radius);
  for (int c = 0; c < static_cast<int>(spec.clusters.size()); ++c) {
    const auto& cl = spec.clusters[c];
    if (!cl.is_real() || cl.value.real() <= floor) continue;
    for (const auto& v : cl.eigenvectors) {
      Eigen::VectorXd r = real_vector(v);
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd d = sgn * r;
        if (!view.contains(d)) continue;
        PisCandidate p;
        p.region = view.region;
        p.kind = PisCandidate::Kind::Ray;
        p.rays = {d};
        p.span = Subspace::span(d);
        p.eigenvalues = {cl.value};
        p.clusters = {c};
        check_ray_set(view, p, tol);
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

std::vector<PisCandidate> find_invariant_subspaces(const ConeView& view, const Spectrum& spec,
                                                   int samples, unsigned long long seed,
                                                   const Tolerances& tol) {
  std::vector<PisCandidate> out;
  std::vector<size_t> contained_eigenspaces;
  unsigned long long s = seed;
  auto emit = [&](PisCandidate p) {
    for (const auto& q : out) {
      if (q.span.dim() == p.span.dim() && q.span.projector_distance(p.span) <= tol.member) return;
    }
    check_subspace(view, p, samples, s++, tol);
    out.push_back(std::move(p));
  };

  for (int c = 0; c < static_cast<int>(spec.clusters.size()); ++c) {
    const auto& cl = spec.clusters[c];
    if (cl.value.imag() < 0.0) continue;  // the pair is handled from its upper member
    const std::vector<int> pair = cluster_pair(spec, c, tol);
    std::vector<Complex> values;
    for (int k : pair) values.push_back(spec.clusters[k].value);

    for (const auto& r : reig(spec, c, tol)) {
      PisCandidate p;
      p.region = view.region;
      p.kind = r.dim() == 1 ? PisCandidate::Kind::Line : PisCandidate::Kind::Plane;
      p.span = r;
      p.eigenvalues = values;
      p.clusters = pair;
      emit(std::move(p));
      if (out.back().verified) contained_eigenspaces.push_back(out.size() - 1);
    }
    if (cl.geometric > 1) {
      Subspace e(spec.dim);
      for (const auto& r : reig(spec, c, tol)) e = e.sum(r, tol.rank);
      PisCandidate p;
      p.region = view.region;
      p.kind = PisCandidate::Kind::Subspace;
      p.span = e;
      p.eigenvalues = values;
      p.clusters = pair;
      emit(std::move(p));
    }
    if (cl.algebraic > cl.geometric) {
      PisCandidate p;
      p.region = view.region;
      p.kind = PisCandidate::Kind::Subspace;
      p.span = generalized_eigenspace(view.G, spec, c, tol);
      p.eigenvalues = values;
      p.clusters = pair;
      emit(std::move(p));
    }
  }

  // Spans of several contained R-eigenspaces.
  const size_t m = contained_eigenspaces.size();
  if (m >= 2) {
    std::vector<std::vector<size_t>> subsets;
    if (m <= 6) {
      for (unsigned mask = 0; mask < (1u << m); ++mask) {
        if (std::popcount(mask) < 2) continue;
        std::vector<size_t> sub;
        for (size_t j = 0; j < m; ++j) {
          if (mask & (1u << j)) sub.push_back(contained_eigenspaces[j]);
        }
        subsets.push_back(sub);
      }
    } else {
      subsets.push_back(contained_eigenspaces);
    }
    const std::vector<PisCandidate> base = out;
    for (const auto& sub : subsets) {
      PisCandidate p;
      p.region = view.region;
      p.kind = PisCandidate::Kind::Subspace;
      p.span = Subspace(spec.dim);
      for (size_t j : sub) {
        p.span = p.span.sum(base[j].span, tol.rank);
        for (auto v : base[j].eigenvalues) p.eigenvalues.push_back(v);
        for (int k : base[j].clusters) p.clusters.push_back(k);
      }
      std::sort(p.clusters.begin(), p.clusters.end());
      p.clusters.erase(std::unique(p.clusters.begin(), p.clusters.end()), p.clusters.end());
      emit(std::move(p));
    }
  }
  return out;
}

std::optional<std::pair<int, int>> rational_angle(double x, int max_den, double tol) {
  // Convergents of the continued fraction of x.
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const long long ai = static_cast<long long>(a);
    const long long p2 = ai * p1 + p0;
    const long long q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    if (std::abs(x - static_cast<double>(p2) / static_cast<double>(q2)) <= tol) {
      return std::make_pair(static_cast<int>(p2), static_cast<int>(q2));
    }
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = r - a;
    if (frac < 1e-15) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

UnionSearch find_union_of_rays(const ConeView& view, const Spectrum& spec, int max_denominator,
                               unsigned long long seed, const Tolerances& tol) {
  if (max_denominator < 2) throw InvalidArgument("find_union_of_rays: max_denominator must be >= 2");
  UnionSearch res;
  const double r = gap(spec, tol);
  const int nc = static_cast<int>(spec.clusters.size());
  auto duplicate = [&](const PisCandidate& p) {
    for (const auto& q : res.candidates) {
      if (q.rays.size() != p.rays.size()) continue;
      bool all = true;
      for (const auto& a : p.rays) {
        bool any = false;
        for (const auto& b : q.rays) any = any || same_ray(a, b, tol.member);
        all = all && any;
      }
      if (all) return true;
    }
    return false;
  };

  // (a) eigenvalue pairs l > 0 and -l: G maps u(t) = cos t v1 + sin t v2 to
  // a positive multiple of u(-t).
  constexpr int kGrid = 16;
  for (int c = 0; c < nc; ++c) {
    const auto& pos = spec.clusters[c];
    if (!pos.is_real() || pos.value.real() <= 0.0) continue;
    const int neg = spec.find(-pos.value, tol);
    if (neg < 0 || std::abs(spec.clusters[neg].value + pos.value) > r) continue;
    const Eigen::VectorXd v1 = real_vector(pos.eigenvector());
    const Eigen::VectorXd v2 = real_vector(spec.clusters[neg].eigenvector());
    for (int k = 1; k < kGrid; ++k) {
      if (2 * k == kGrid) continue;  // t = pi/2 is the negative eigenline
      const double t = std::numbers::pi * k / kGrid;
      PisCandidate p;
      p.region = view.region;
      p.kind = PisCandidate::Kind::UnionOfRays;
      p.rays = {unit(std::cos(t) * v1 + std::sin(t) * v2), unit(std::cos(t) * v1 - std::sin(t) * v2)};
      p.eigenvalues = {pos.value, spec.clusters[neg].value};
      p.clusters = {c, neg};
      Eigen::MatrixXd cols(spec.dim, 2);
      cols << p.rays[0], p.rays[1];
      p.span = Subspace::span(cols, tol.rank);
      check_ray_set(view, p, tol);
      if (p.contained && !duplicate(p)) res.candidates.push_back(std::move(p));
    }
  }

  // (b) rotations by a rational multiple of pi.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(0.0, 2.0 * std::numbers::pi);
  for (int c = 0; c < nc; ++c) {
    const auto& cl = spec.clusters[c];
    if (cl.value.imag() <= 0.0) continue;
    const double x = std::arg(cl.value) / std::numbers::pi;
    auto pq = rational_angle(x, max_denominator, std::max(tol.eig, 1e-12));
    if (!pq) {
      res.notes.push_back("Arg(" + std::to_string(cl.value.real()) + "+" +
                          std::to_string(cl.value.imag()) + "i)/pi = " + std::to_string(x) +
                          " treated as irrational; plane candidate only");
      continue;
    }
    const auto [pn, qd] = *pq;
    const int period = (pn % 2 == 0) ? qd : 2 * qd;
    const Subspace plane = rspan(cl.eigenvector(), tol.rank);
    if (plane.dim() != 2) continue;
    for (int s = 0; s < 8; ++s) {
      const double a = s == 0 ? 0.0 : ud(rng);
      Eigen::VectorXd w = unit(std::cos(a) * plane.basis().col(0) + std::sin(a) * plane.basis().col(1));
      PisCandidate p;
      p.region = view.region;
      p.kind = PisCandidate::Kind::UnionOfRays;
      p.eigenvalues = {cl.value, std::conj(cl.value)};
      p.clusters = cluster_pair(spec, c, tol);
      p.span = plane;
      Eigen::VectorXd y = w;
      bool closed = false;
      for (int k = 0; k < period; ++k) {
        p.rays.push_back(y);
        y = view.step(y);
        if (same_ray(y, w, tol.member)) {
          closed = k + 1 == period;
          break;
        }
      }
      if (!closed) continue;
      check_ray_set(view, p, tol);
      if (p.contained && !duplicate(p)) res.candidates.push_back(std::move(p));
    }
  }
  return res;
}

const char* to_string(IntersectStatus s) {
  switch (s) {
    case IntersectStatus::Intersects: return "intersects";
    case IntersectStatus::NoIntersectionFound: return "no-intersection-found";
    case IntersectStatus::CertifiedDisjoint: return "certified-disjoint";
  }
  return "?";
}

ClosureIntersection intersect_closure(const ConeView& view, const Subspace& s,
                                      const Tolerances& tol, int starts,
                                      unsigned long long seed) {
  ClosureIntersection out;
  out.best_margin = -kInf;
  if (s.empty()) {
    out.status = IntersectStatus::CertifiedDisjoint;
    return out;
  }
  if (view.halfspaces) {
    auto w = lp::cone_meets_subspace(*view.halfspaces, s.basis(), tol.rank);
    if (w) {
      out.status = IntersectStatus::Intersects;
      out.witnesses.push_back(*w);
      out.best_margin = view.margin(*w);
    } else {
      out.status = IntersectStatus::CertifiedDisjoint;
    }
    return out;
  }
  if (s.dim() == 1) {
    // The unit sphere of a line is two points.
    const Eigen::VectorXd v = s.basis().col(0);
    for (const Eigen::VectorXd& d : {Eigen::VectorXd(v), Eigen::VectorXd(-v)}) {
      const double m = view.margin(d);
      out.best_margin = std::max(out.best_margin, m);
      if (m >= -tol.member) out.witnesses.push_back(d);
    }
    out.status = out.witnesses.empty() ? IntersectStatus::CertifiedDisjoint
                                       : IntersectStatus::Intersects;
    return out;
  }
  // Multi-start compass search maximizing the margin over the unit sphere
  // of the subspace.
  const int k = s.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto eval = [&](const Eigen::VectorXd& y) { return view.margin(s.basis() * (y / y.norm())); };
  for (int st = 0; st < starts; ++st) {
    Eigen::VectorXd y(k);
    for (int j = 0; j < k; ++j) y(j) = nd(rng);
    y /= y.norm();
    double f = eval(y);
    double h = 0.5;
    int iters = 0;
    while (f < -tol.member && h > 1e-6 && iters < 400) {
      ++iters;
      bool improved = false;
      for (int j = 0; j < k && !improved; ++j) {
        for (double sgn : {1.0, -1.0}) {
          Eigen::VectorXd z = y;
          z(j) += sgn * h;
          if (z.norm() == 0.0) continue;
          z /= z.norm();
          const double fz = eval(z);
          if (fz > f) {
            y = z;
            f = fz;
            improved = true;
            break;
          }
        }
      }
      if (!improved) h *= 0.5;
    }
    out.best_margin = std::max(out.best_margin, f);
    if (f >= -tol.member) {
      out.witnesses.push_back(unit(s.basis() * y));
      if (out.witnesses.size() >= 3) break;
    }
  }
  out.status = out.witnesses.empty() ? IntersectStatus::NoIntersectionFound
                                     : IntersectStatus::Intersects;
  return out;
}

SMuReport screen_region(const ConeView& view, const Spectrum& spec, const Tolerances& tol,
                        int starts, unsigned long long seed) {
  SMuReport rep;
  rep.region = view.region;
  bool all_certified = true;
  unsigned long long s = seed;
  for (const auto& g : magnitude_groups(spec, tol)) {
    SMuEntry e;
    e.mu = g.mu;
    e.clusters = g.clusters;
    e.s = s_mu(spec, g, tol);
    e.hit = intersect_closure(view, e.s, tol, starts, s++);
    if (e.hit.status == IntersectStatus::Intersects && !rep.mu_max) rep.mu_max = g.mu;
    if (e.hit.status == IntersectStatus::NoIntersectionFound) all_certified = false;
    rep.entries.push_back(std::move(e));
  }
  rep.pis_free = !rep.mu_max.has_value();
  rep.pis_free_certified = rep.pis_free && all_certified;
  return rep;
}

PisWithoutPirReport screen_pis_without_pir(const ConeView& view, const Spectrum& spec,
                                           const Tolerances& tol, int starts,
                                           unsigned long long seed) {
  PisWithoutPirReport rep;
  unsigned long long s = seed;
  for (int c = 0; c < static_cast<int>(spec.clusters.size()); ++c) {
    const auto& cl = spec.clusters[c];
    if (!cl.is_real() || cl.value.real() >= 0.0) continue;
    Subspace e(spec.dim);
    for (const auto& r : reig(spec, c, tol)) e = e.sum(r, tol.rank);
    auto hit = intersect_closure(view, e, tol, starts, s++);
    if (hit.status == IntersectStatus::NoIntersectionFound) rep.decided_exactly = false;
    if (hit.status == IntersectStatus::Intersects) {
      rep.negative_line = true;
      rep.negative_eigenvalues.push_back(cl.value);
    }
  }
  for (const auto& g : magnitude_groups(spec, tol)) {
    if (g.clusters.size() < 2) continue;  // a conjugate pair is two clusters
    auto hit = intersect_closure(view, s_mu(spec, g, tol), tol, starts, s++);
    if (hit.status == IntersectStatus::NoIntersectionFound) rep.decided_exactly = false;
    if (hit.status == IntersectStatus::Intersects) {
      rep.equal_magnitude = true;
      rep.equal_magnitude_mus.push_back(g.mu);
    }
  }
  rep.has_pir = !find_pirs(view, spec, tol).empty();
  if (rep.negative_line || rep.equal_magnitude || rep.has_pir) {
    rep.verdict = "possible";
  } else {
    rep.verdict = rep.decided_exactly ? "no-pis-certified" : "no-pis-found";
  }
  return rep;
}

Subspace dominant_limit_set(const PisCandidate& candidate, const Eigen::MatrixXd& g,
                            const Spectrum& spec, const Tolerances& tol) {
  (void)g;
  const Subspace& span = candidate.span;
  for (const auto& grp : magnitude_groups(spec, tol)) {
    Subspace hit = s_mu(spec, grp, tol).intersect(span);
    if (!hit.empty()) return hit;
  }
  return Subspace(spec.dim);
}

}  // namespace rbstc
