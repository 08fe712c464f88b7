#include "rbstc/periodic.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <set>

#include "rbstc/errors.hpp"
#include "rbstc/kernels.hpp"

namespace rbstc {

namespace {

void check_pattern(int regions, std::span<const int> pattern) {
  if (pattern.empty()) throw InvalidArgument("pattern must be nonempty");
  for (int j : pattern) {
    if (j < 0 || j >= regions) throw InvalidArgument("pattern index out of range");
  }
}

// Iterates the view map from seeded points of the cone. A trajectory that
// never leaves the cone yet ends far from every verified candidate hints at
// an invariant set outside the searched classes.
std::optional<std::string> off_class_hint(const ConeView& view,
                                          const std::vector<CandidateAnalysis>& found,
                                          unsigned long long seed) {
  constexpr int kStarts = 32, kSteps = 400;
  constexpr double kNear = 1e-2;
  int tried = 0, escaped = 0;
  for (const auto& x0 : unit_sphere_samples(view.dim(), 4000, seed)) {
    if (tried == kStarts) break;
    if (!view.contains(x0)) continue;
    ++tried;
    Eigen::VectorXd x = x0;
    bool inside = true;
    for (int k = 0; k < kSteps && inside; ++k) {
      x = view.step(x);
      inside = view.contains(x);
    }
    if (!inside) continue;
    bool near = false;
    for (const auto& a : found) near = near || (a.candidate.verified && a.candidate.distance(x) < kNear);
    if (!near) ++escaped;
  }
  if (escaped == 0) return std::nullopt;
  return std::to_string(escaped) + " of " + std::to_string(tried) +
         " sampled trajectories stay in the cone but away from every listed candidate; an "
         "invariant set outside the searched classes may exist";
}

}  // namespace

Eigen::MatrixXd pattern_matrix(std::span<const Eigen::MatrixXd> gs, std::span<const int> pattern) {
  check_pattern(static_cast<int>(gs.size()), pattern);
  Eigen::MatrixXd g = gs[pattern[0]];
  for (size_t k = 1; k < pattern.size(); ++k) g = gs[pattern[k]] * g;
  return g;
}

PeriodicPattern make_pattern(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                             std::span<const int> pattern) {
  check_pattern(partition.size(), pattern);
  PeriodicPattern p;
  p.regions.assign(pattern.begin(), pattern.end());
  for (int j : pattern) p.taus.push_back(partition.tau(j));
  p.G = pattern_matrix(gs, pattern);
  return p;
}

bool pattern_membership(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                        const Eigen::VectorXd& x, std::span<const int> pattern) {
  check_pattern(partition.size(), pattern);
  Eigen::VectorXd y = x;
  for (size_t k = 0; k < pattern.size(); ++k) {
    const double ny = y.norm();
    if (!(ny > 0.0)) return false;
    y /= ny;
    if (partition.membership(y) != pattern[k]) return false;
    y = gs[pattern[k]] * y;
  }
  return true;
}

ConeView pattern_view(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                      std::span<const int> pattern) {
  if (static_cast<int>(gs.size()) != partition.size()) {
    throw InvalidArgument("pattern_view: partition and transition matrices misaligned");
  }
  check_pattern(partition.size(), pattern);
  if (pattern.size() == 1) return region_view(partition, gs, pattern[0]);
  ConeView v;
  v.region = -1;
  v.pattern.assign(pattern.begin(), pattern.end());
  v.G = pattern_matrix(gs, pattern);
  const Partition* part = &partition;
  // Copies keep the view independent of the caller's buffers.
  std::vector<Eigen::MatrixXd> g(gs.begin(), gs.end());
  std::vector<int> pat = v.pattern;
  v.contains = [part, g, pat](const Eigen::VectorXd& x) {
    return pattern_membership(*part, g, x, pat);
  };
  v.margin = [part, g, pat](const Eigen::VectorXd& x) {
    double m = std::numeric_limits<double>::infinity();
    Eigen::VectorXd y = x;
    for (size_t k = 0; k < pat.size(); ++k) {
      const double ny = y.norm();
      if (!(ny > 0.0)) return -std::numeric_limits<double>::infinity();
      y /= ny;
      m = std::min(m, part->margin(pat[k], y));
      y = g[pat[k]] * y;
    }
    return m;
  };
  // R_P = {x : N_k P_{k-1} x >= 0 for all k} when every region is polyhedral.
  Eigen::MatrixXd rows(0, partition.dim());
  Eigen::MatrixXd prefix = Eigen::MatrixXd::Identity(partition.dim(), partition.dim());
  bool polyhedral = true;
  for (int j : pattern) {
    auto h = partition.halfspaces(j);
    if (!h) {
      polyhedral = false;
      break;
    }
    Eigen::MatrixXd block = *h * prefix;
    Eigen::MatrixXd grown(rows.rows() + block.rows(), rows.cols());
    grown << rows, block;
    rows = grown;
    prefix = gs[j] * prefix;
  }
  if (polyhedral) v.halfspaces = rows;
  return v;
}

int ViewAnalysis::count(PisCandidate::Kind kind, bool verified_only) const {
  int c = 0;
  for (const auto& a : candidates) {
    if (a.candidate.kind == kind && (!verified_only || a.candidate.verified)) ++c;
  }
  return c;
}

ViewAnalysis analyze_view(const ConeView& view, const Partition& partition,
                          std::span<const Eigen::MatrixXd> gs, const AnalysisOptions& opt) {
  const Tolerances& tol = opt.tol;
  ViewAnalysis out;
  out.pattern = view.pattern;
  for (int j : view.pattern) out.taus.push_back(partition.tau(j));
  out.G = view.G;
  out.spectrum = eig(view.G, tol);
  const unsigned long long s = opt.seed;

  if (opt.screening) {
    out.screening = screen_region(view, out.spectrum, tol, opt.starts, s + 101);
    out.without_pir = screen_pis_without_pir(view, out.spectrum, tol, opt.starts, s + 103);
  }
  std::vector<PisCandidate> cands;
  if (opt.pirs) {
    for (auto& c : find_pirs(view, out.spectrum, tol)) cands.push_back(std::move(c));
  }
  if (opt.subspaces) {
    for (auto& c : find_invariant_subspaces(view, out.spectrum, opt.samples, s + 107, tol)) {
      cands.push_back(std::move(c));
    }
  }
  if (opt.unions) {
    UnionSearch u = find_union_of_rays(view, out.spectrum, opt.max_denominator, s + 109, tol);
    for (auto& c : u.candidates) cands.push_back(std::move(c));
    out.notes = std::move(u.notes);
  }

  for (auto& c : cands) {
    CandidateAnalysis a;
    a.candidate = std::move(c);
    a.limit_set = dominant_limit_set(a.candidate, view.G, out.spectrum, tol);
    if (!a.candidate.verified) {
      a.status = "unverified";
    } else if (!opt.stability) {
      a.status = "not-requested";
    } else {
      try {
        a.verdict = classify_any(a.candidate, view, out.spectrum, tol);
        a.status = "classified";
        if (opt.probe) {
          a.probe = empirical_probe(a.candidate, view, partition, gs, opt.probe_options, tol);
        }
      } catch (const HypothesisViolation& e) {
        a.status = "hypothesis-violation";
        a.message = e.what();
      } catch (const UnsupportedCandidate& e) {
        a.status = "unsupported";
        a.message = e.what();
      }
    }
    out.certified = out.certified || a.candidate.verified;
    if (a.verdict && a.verdict->verdict == Verdict::AsymptoticallyStable) {
      out.asymptotically_stable = true;
    }
    out.candidates.push_back(std::move(a));
  }
  if (auto hint = off_class_hint(view, out.candidates, s + 113)) out.notes.push_back(*hint);
  return out;
}

ViewAnalysis analyze_region(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                            int region, const AnalysisOptions& opt) {
  return analyze_view(region_view(partition, gs, region), partition, gs, opt);
}

ViewAnalysis analyze_pattern(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                             std::span<const int> pattern, const AnalysisOptions& opt) {
  return analyze_view(pattern_view(partition, gs, pattern), partition, gs, opt);
}

std::vector<std::vector<int>> harvest_patterns(const Partition& partition,
                                               std::span<const Eigen::MatrixXd> gs,
                                               int simulations, int events,
                                               unsigned long long seed, int window,
                                               int max_period, const Tolerances& tol,
                                               Exec exec) {
  if (events < window) throw InvalidArgument("harvest_patterns: events must be >= window");
  const auto x0s = unit_sphere_samples(partition.dim(), simulations, seed);
  const auto traces = simulate_batch(partition, gs, x0s, events, tol, exec);
  std::set<std::vector<int>> found;
  for (const auto& tr : traces) {
    SteadyState ss = detect_steady_state(tr, partition.taus(), window, max_period);
    if (ss.kind != SteadyState::Kind::None) found.insert(canonical_rotation(ss.region_pattern));
  }
  std::vector<std::vector<int>> out(found.begin(), found.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

std::vector<std::vector<int>> enumerate_patterns(int regions, int max_len) {
  if (regions < 1 || max_len < 1) throw InvalidArgument("enumerate_patterns: invalid size");
  std::set<std::vector<int>> found;
  for (int len = 1; len <= max_len; ++len) {
    std::vector<int> p(len, 0);
    while (true) {
      // Keep primitive patterns only (minimal period equals the length).
      bool primitive = true;
      for (int d = 1; d < len && primitive; ++d) {
        if (len % d != 0) continue;
        bool rep = true;
        for (int k = 0; k + d < len && rep; ++k) rep = p[k] == p[k + d];
        if (rep) primitive = false;
      }
      if (primitive) found.insert(canonical_rotation(p));
      int k = len - 1;
      while (k >= 0 && ++p[k] == regions) p[k--] = 0;
      if (k < 0) break;
    }
  }
  std::vector<std::vector<int>> out(found.begin(), found.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

}  // namespace rbstc
