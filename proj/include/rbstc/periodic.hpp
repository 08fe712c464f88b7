#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbstc/gamma.hpp"
#include "rbstc/invariants.hpp"
#include "rbstc/stability.hpp"

namespace rbstc {

struct PeriodicPattern {
  std::vector<int> regions;  ///< j_1, ..., j_p
  std::vector<double> taus;
  Eigen::MatrixXd G;         ///< G(tau_{j_p}) ... G(tau_{j_1})

  int period() const { return static_cast<int>(regions.size()); }
};

/// G(tau_{j_p}) ... G(tau_{j_1}), applied right to left.
Eigen::MatrixXd pattern_matrix(std::span<const Eigen::MatrixXd> gs, std::span<const int> pattern);

PeriodicPattern make_pattern(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                             std::span<const int> pattern);

/// x in R_{j_1}, G(tau_{j_1}) x in R_{j_2}, and so on through j_p.
bool pattern_membership(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                        const Eigen::VectorXd& x, std::span<const int> pattern);

/// Cone view of R_P with the composite map. Polyhedral when every visited
/// region is.
ConeView pattern_view(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                      std::span<const int> pattern);

struct AnalysisOptions {
  bool pirs = true;
  bool subspaces = true;
  bool unions = true;
  bool screening = true;
  bool stability = true;
  bool probe = false;  ///< also run the empirical probe on classified candidates
  int samples = 256;   ///< containment samples per subspace
  int starts = 64;     ///< multi-start count for closure intersection
  int max_denominator = 12;
  unsigned long long seed = 0;
  Tolerances tol;
  ProbeOptions probe_options;
};

struct CandidateAnalysis {
  PisCandidate candidate;
  /// "classified", "hypothesis-violation", "unsupported" or "unverified".
  std::string status;
  std::string message;
  std::optional<StabilityVerdict> verdict;
  std::optional<ProbeResult> probe;
  Subspace limit_set;
};

struct ViewAnalysis {
  std::vector<int> pattern;
  std::vector<double> taus;
  Eigen::MatrixXd G;
  Spectrum spectrum;
  std::optional<SMuReport> screening;
  std::optional<PisWithoutPirReport> without_pir;
  std::vector<CandidateAnalysis> candidates;
  std::vector<std::string> notes;
  bool certified = false;               ///< some verified candidate exists
  bool asymptotically_stable = false;   ///< some candidate classified so

  int count(PisCandidate::Kind kind, bool verified_only = true) const;
};

/// Full invariant-set and stability pipeline on one cone view.
ViewAnalysis analyze_view(const ConeView& view, const Partition& partition,
                          std::span<const Eigen::MatrixXd> gs, const AnalysisOptions& opt);

/// Single-region analysis (a length-one pattern).
ViewAnalysis analyze_region(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                            int region, const AnalysisOptions& opt);

/// Pipeline on R_P with G_P; a verified candidate certifies that the IET
/// sequence repeating the pattern exists.
ViewAnalysis analyze_pattern(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                             std::span<const int> pattern, const AnalysisOptions& opt);

/// Steady-state region patterns (canonical rotations, deduplicated, sorted)
/// observed from seeded random initial states.
std::vector<std::vector<int>> harvest_patterns(const Partition& partition,
                                               std::span<const Eigen::MatrixXd> gs,
                                               int simulations, int events,
                                               unsigned long long seed, int window = 100,
                                               int max_period = 20, const Tolerances& tol = {},
                                               Exec exec = Exec::Parallel);

/// Every pattern of length <= max_len in canonical form (r^L growth).
std::vector<std::vector<int>> enumerate_patterns(int regions, int max_len);

}  // namespace rbstc
