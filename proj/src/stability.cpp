#include "rbstc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "rbstc/errors.hpp"
#include "rbstc/gamma.hpp"

namespace rbstc {

namespace {

enum class Tri { F, T, A };

Tri tri_and(Tri a, Tri b) {
  if (a == Tri::F || b == Tri::F) return Tri::F;
  if (a == Tri::A || b == Tri::A) return Tri::A;
  return Tri::T;
}
Tri tri_or(Tri a, Tri b) {
  if (a == Tri::T || b == Tri::T) return Tri::T;
  if (a == Tri::A || b == Tri::A) return Tri::A;
  return Tri::F;
}
Tri tri_not(Tri a) { return a == Tri::A ? Tri::A : (a == Tri::T ? Tri::F : Tri::T); }
Tri tri(bool b) { return b ? Tri::T : Tri::F; }
const char* str(Tri t) { return t == Tri::T ? "true" : (t == Tri::F ? "false" : "ambiguous"); }

Tri non_defective(Defect d) {
  return d == Defect::No ? Tri::T : (d == Defect::Yes ? Tri::F : Tri::A);
}

// Magnitude comparison with an ambiguity band of twice the cluster radius.
enum class Cmp { Less, Equal, Greater, Ambiguous };
Cmp compare(double a, double b, double r) {
  const double d = a - b;
  if (std::abs(d) <= r) return Cmp::Equal;
  if (std::abs(d) <= 2.0 * r) return Cmp::Ambiguous;
  return d < 0 ? Cmp::Less : Cmp::Greater;
}
Tri is_equal(Cmp c) { return c == Cmp::Equal ? Tri::T : (c == Cmp::Ambiguous ? Tri::A : Tri::F); }
Tri is_less(Cmp c) { return c == Cmp::Less ? Tri::T : (c == Cmp::Ambiguous ? Tri::A : Tri::F); }

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::vector<int> generator_pair(const PisCandidate& c, const Spectrum& spec,
                                const Tolerances& tol) {
  if (c.clusters.empty()) throw UnsupportedCandidate("candidate has no generating eigenvalue");
  std::vector<int> pair{c.clusters.front()};
  const auto& cl = spec.clusters.at(pair[0]);
  if (!cl.is_real()) {
    const int other = spec.find(std::conj(cl.value), tol);
    if (other >= 0 && other != pair[0]) pair.push_back(other);
  }
  for (int k : c.clusters) {
    if (std::find(pair.begin(), pair.end(), k) == pair.end()) {
      throw UnsupportedCandidate(
          "candidate spans several generalized eigenspaces; the classification covers single "
          "generalized-eigenspace intersections and two-ray unions only");
    }
  }
  return pair;
}

// Theorem hypothesis: a ball of the given radius around every point of the
// candidate on the unit sphere stays in the cone.
double check_interior(const PisCandidate& c, const ConeView& view, double radius,
                      unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const int n = view.dim();
  const auto pts = c.sample(c.is_ray_set() ? static_cast<int>(c.rays.size()) : 64, seed + 1);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    for (int k = 0; k < 16; ++k) {
      Eigen::VectorXd w(n);
      for (int j = 0; j < n; ++j) w(j) = nd(rng);
      Eigen::VectorXd z = p + radius * w / w.norm();
      if (!view.contains(z)) {
        throw HypothesisViolation("candidate is not interior to its cone (a point at distance " +
                                  num(radius) + " leaves the cone)");
      }
      worst = std::min(worst, view.margin(z));
    }
  }
  return worst;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::AsymptoticallyStable: return "asymptotically-stable";
    case Verdict::Unstable: return "unstable";
    case Verdict::Ambiguous: return "ambiguous";
  }
  return "?";
}

SpectralPartition spectral_partition(const Spectrum& spec, std::span<const int> pair,
                                     const Tolerances& tol) {
  SpectralPartition sp;
  const double lam = std::abs(spec.clusters.at(pair[0]).value);
  const double r = spec.cluster_radius(tol) / std::max(lam, 1e-300);
  for (int c = 0; c < static_cast<int>(spec.clusters.size()); ++c) {
    const auto& cl = spec.clusters[c];
    const Complex q = cl.value / lam;
    std::vector<Complex>* dst;
    if (std::find(pair.begin(), pair.end(), c) != pair.end()) {
      dst = &sp.q2;
    } else {
      const Cmp cmp = compare(std::abs(q), 1.0, r);
      dst = cmp == Cmp::Greater ? &sp.q1 : (cmp == Cmp::Less ? &sp.q4 : &sp.q3);
    }
    for (int k = 0; k < cl.algebraic; ++k) dst->push_back(q);
  }
  return sp;
}

StabilityVerdict classify(const PisCandidate& candidate, const ConeView& view,
                          const Spectrum& spec, const Tolerances& tol, double interior_radius,
                          unsigned long long seed) {
  if (candidate.kind == PisCandidate::Kind::UnionOfRays) {
    throw UnsupportedCandidate("ray unions are handled by classify_general");
  }
  if (!candidate.verified) throw InvalidArgument("classify: candidate is not verified");
  const std::vector<int> pair = generator_pair(candidate, spec, tol);
  StabilityVerdict out;
  out.interior_margin = check_interior(candidate, view, interior_radius, seed);

  const EigenCluster& cl = spec.clusters[pair[0]];
  const double r = spec.cluster_radius(tol);
  const double lam = std::abs(cl.value);
  const double rho = spec.spectral_radius;
  out.defective = cl.defective;
  out.partition = spectral_partition(spec, pair, tol);

  const Tri rho_eq = is_equal(compare(lam, rho, r));
  out.reasons.push_back({"abs_lambda_equals_rho", str(rho_eq), "|lambda|=" + num(lam) + ", rho=" + num(rho)});

  Tri eq_nondefective = Tri::T;  // every other q with |q| = |lambda| is non-defective
  Tri others_smaller = Tri::T;   // every other q has |q| < |lambda|
  for (int c = 0; c < static_cast<int>(spec.clusters.size()); ++c) {
    if (std::find(pair.begin(), pair.end(), c) != pair.end()) continue;
    const auto& q = spec.clusters[c];
    const Cmp cmp = compare(std::abs(q.value), lam, r);
    others_smaller = tri_and(others_smaller, is_less(cmp));
    eq_nondefective = tri_and(eq_nondefective, tri_or(tri_not(is_equal(cmp)), non_defective(q.defective)));
  }

  const Tri lam_defective = tri_not(non_defective(cl.defective));
  out.reasons.push_back({"lambda_defective", str(lam_defective), "alg=" + std::to_string(cl.algebraic) + ", geo=" + std::to_string(cl.geometric)});

  // Containment of subspaces in the candidate set; a ray holds no line.
  auto in_candidate = [&](const Subspace& s) {
    if (candidate.is_ray_set()) return s.empty();
    return candidate.span.contains(s, tol.member);
  };

  Tri stable;
  if (lam_defective == Tri::F) {
    out.reasons.push_back({"equal_magnitude_nondefective", str(eq_nondefective), ""});
    stable = tri_and(rho_eq, eq_nondefective);
  } else {
    const Subspace ge = generalized_eigenspace(view.G, spec, pair[0], tol);
    const Tri ge_in = tri(in_candidate(ge));
    out.reasons.push_back({"generalized_eigenspace_in_candidate", str(ge_in), "dim=" + std::to_string(ge.dim())});
    out.reasons.push_back({"others_strictly_smaller", str(others_smaller), ""});
    stable = tri_and(tri_and(rho_eq, ge_in), others_smaller);
    if (lam_defective == Tri::A) {
      // Evaluate both branches; disagreement is ambiguous.
      const Tri nd = tri_and(rho_eq, eq_nondefective);
      if (nd != stable) stable = Tri::A;
    }
  }
  out.reasons.push_back({"stable", str(stable), ""});

  Tri clause_a = Tri::T;
  for (const auto& v : cl.eigenvectors) clause_a = tri_and(clause_a, tri(in_candidate(rspan(v, tol.rank))));
  const Tri clause_b = tri(cl.is_real() && cl.value.real() > 0.0 && cl.algebraic == 1);
  out.reasons.push_back({"clause_a_eigenvector_rspans_in_candidate", str(clause_a), ""});
  out.reasons.push_back({"clause_b_simple_positive", str(clause_b), ""});
  if (lam_defective == Tri::F) out.reasons.push_back({"others_strictly_smaller", str(others_smaller), ""});
  const Tri asym = tri_and(tri_and(stable, others_smaller), tri_or(clause_a, clause_b));
  out.reasons.push_back({"asymptotically_stable", str(asym), ""});

  if (stable == Tri::A || asym == Tri::A) {
    out.verdict = Verdict::Ambiguous;
  } else if (asym == Tri::T) {
    out.verdict = Verdict::AsymptoticallyStable;
  } else if (stable == Tri::T) {
    out.verdict = Verdict::Stable;
  } else {
    out.verdict = Verdict::Unstable;
  }
  return out;
}

StabilityVerdict classify_general(const PisCandidate& candidate, const ConeView& view,
                                  const Spectrum& spec, const Tolerances& tol,
                                  double interior_radius, unsigned long long seed) {
  if (candidate.kind != PisCandidate::Kind::UnionOfRays || candidate.rays.size() != 2 ||
      candidate.clusters.size() != 2) {
    throw UnsupportedCandidate("classify_general: candidate is not a two-ray union");
  }
  const auto& a = spec.clusters.at(candidate.clusters[0]);
  const auto& b = spec.clusters.at(candidate.clusters[1]);
  const double r = spec.cluster_radius(tol);
  if (!a.is_real() || !b.is_real() || std::abs(a.value.real() + b.value.real()) > r) {
    throw UnsupportedCandidate("classify_general: generators are not a pair l, -l");
  }
  if (!candidate.verified) throw InvalidArgument("classify_general: candidate is not verified");
  StabilityVerdict out;
  out.interior_margin = check_interior(candidate, view, interior_radius, seed);
  const std::vector<int> pair{candidate.clusters[0], candidate.clusters[1]};
  out.partition = spectral_partition(spec, pair, tol);
  const double lam = std::abs(a.value);
  const double rho = spec.spectral_radius;
  out.defective = a.defective == Defect::Yes || b.defective == Defect::Yes
                      ? Defect::Yes
                      : (a.defective == Defect::Ambiguous || b.defective == Defect::Ambiguous
                             ? Defect::Ambiguous
                             : Defect::No);

  const Tri rho_eq = is_equal(compare(lam, rho, r));
  const Tri gen_nd = tri_and(non_defective(a.defective), non_defective(b.defective));
  Tri eq_nondefective = Tri::T;
  Tri others_smaller = Tri::T;
  for (int c = 0; c < static_cast<int>(spec.clusters.size()); ++c) {
    if (c == pair[0] || c == pair[1]) continue;
    const auto& q = spec.clusters[c];
    const Cmp cmp = compare(std::abs(q.value), lam, r);
    others_smaller = tri_and(others_smaller, is_less(cmp));
    eq_nondefective = tri_and(eq_nondefective, tri_or(tri_not(is_equal(cmp)), non_defective(q.defective)));
  }
  out.reasons.push_back({"abs_lambda_equals_rho", str(rho_eq), "|lambda|=" + num(lam) + ", rho=" + num(rho)});
  out.reasons.push_back({"generators_nondefective", str(gen_nd), ""});
  out.reasons.push_back({"others_strictly_smaller", str(others_smaller), ""});
  out.reasons.push_back({"equal_magnitude_nondefective", str(eq_nondefective), ""});
  const Tri stable = tri_and(tri_and(rho_eq, gen_nd), eq_nondefective);
  out.reasons.push_back({"stable", str(stable), ""});
  out.reasons.push_back({"asymptotically_stable", "false", "ray unions keep oscillating"});
  out.verdict = stable == Tri::T ? Verdict::Stable
                                 : (stable == Tri::F ? Verdict::Unstable : Verdict::Ambiguous);
  return out;
}

StabilityVerdict classify_any(const PisCandidate& candidate, const ConeView& view,
                              const Spectrum& spec, const Tolerances& tol) {
  if (candidate.kind == PisCandidate::Kind::UnionOfRays) {
    return classify_general(candidate, view, spec, tol);
  }
  return classify(candidate, view, spec, tol);
}

ProbeResult empirical_probe(const PisCandidate& candidate, const ConeView& view,
                            const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                            const ProbeOptions& opt, const Tolerances& tol) {
  const int n = view.dim();
  const int p = std::max(1, view.period());
  ProbeResult res;
  for (size_t e = 0; e < opt.eps.size(); ++e) {
    const double eps = opt.eps[e];
    struct Trial {
      double max_d = 0.0, final_d = 0.0;
      bool escaped = false, left = false, valid = false;
    };
    std::vector<Trial> trials(opt.trials);
    auto run = [&](int t) {
      // Per-trial seed keeps serial and parallel runs identical.
      const unsigned long long s = opt.seed * 1000003ULL + e * 7919ULL + static_cast<unsigned long long>(t);
      std::mt19937_64 rng(s);
      std::normal_distribution<double> nd;
      const Eigen::VectorXd base = candidate.sample(1, s ^ 0x9e3779b97f4a7c15ULL).front();
      Eigen::VectorXd z;
      bool ok = false;
      for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
        Eigen::VectorXd w(n);
        for (int j = 0; j < n; ++j) w(j) = nd(rng);
        z = base + eps * w / w.norm();
        z /= z.norm();
        ok = view.contains(z);
      }
      Trial tr;
      if (!ok) {
        trials[t] = tr;
        return;
      }
      tr.valid = true;
      Eigen::VectorXd x = z;
      for (int k = 1; k <= opt.horizon; ++k) {
        for (int j = 0; j < p; ++j) {
          if (partition.membership(x) != view.pattern[j]) tr.left = true;
          x = gamma_step(partition, gs, x, tol).next;
        }
        const double d = candidate.distance(x);
        tr.max_d = std::max(tr.max_d, d);
        if (d > opt.escape) tr.escaped = true;
        tr.final_d = d;
      }
      trials[t] = tr;
    };
    if (opt.exec == Exec::Parallel) {
      std::exception_ptr err;
#pragma omp parallel for schedule(dynamic, 1)
      for (int t = 0; t < opt.trials; ++t) {
        try {
          run(t);
        } catch (...) {
#pragma omp critical(rbstc_probe_error)
          if (!err) err = std::current_exception();
        }
      }
      if (err) std::rethrow_exception(err);
    } else {
      for (int t = 0; t < opt.trials; ++t) run(t);
    }
    ProbeLevel lv;
    lv.eps = eps;
    for (const auto& tr : trials) {
      if (!tr.valid) continue;
      ++lv.trials;
      lv.max_distance = std::max(lv.max_distance, tr.max_d);
      lv.final_distance = std::max(lv.final_distance, tr.final_d);
      lv.escaped += tr.escaped;
      lv.left_cone += tr.left;
    }
    res.levels.push_back(lv);
  }
  bool all_escape = !res.levels.empty();
  bool bounded = !res.levels.empty();
  bool decays = true;
  for (const auto& lv : res.levels) {
    all_escape = all_escape && lv.escaped > 0;
    bounded = bounded && lv.trials > 0 && lv.max_distance <= opt.c * lv.eps;
    decays = decays && lv.final_distance <= lv.eps / 10.0;
  }
  if (all_escape) {
    res.verdict = Verdict::Unstable;
  } else if (bounded) {
    res.verdict = decays ? Verdict::AsymptoticallyStable : Verdict::Stable;
  } else {
    res.verdict = Verdict::Ambiguous;
  }
  return res;
}

}  // namespace rbstc
