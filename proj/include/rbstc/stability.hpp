#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbstc/invariants.hpp"
#include "rbstc/kernels.hpp"

namespace rbstc {

enum class Verdict { Stable, AsymptoticallyStable, Unstable, Ambiguous };
const char* to_string(Verdict v);

/// One evaluated condition: value is "true", "false" or "ambiguous".
struct Clause {
  std::string name;
  std::string value;
  std::string detail;
};

/// Eigenvalues of J = G / |lambda|: |q| > 1, the lambda pair, other |q| = 1,
/// and |q| < 1 (repeated by algebraic multiplicity).
struct SpectralPartition {
  std::vector<Complex> q1, q2, q3, q4;
};

struct StabilityVerdict {
  Verdict verdict = Verdict::Ambiguous;
  Defect defective = Defect::No;
  std::vector<Clause> reasons;
  SpectralPartition partition;
  double interior_margin = 0.0;  ///< smallest margin of the perturbed samples
};

/// Stability of the candidate's intersection with the unit sphere from the
/// spectrum of G. Throws HypothesisViolation when the candidate is not
/// interior to the cone, UnsupportedCandidate for forms not covered.
StabilityVerdict classify(const PisCandidate& candidate, const ConeView& view,
                          const Spectrum& spec, const Tolerances& tol = {},
                          double interior_radius = 1e-3, unsigned long long seed = 23);

/// Two-ray unions generated by eigenvalues l and -l with |l| = rho(G).
/// Stable at best; trajectories keep oscillating between the rays' span.
StabilityVerdict classify_general(const PisCandidate& candidate, const ConeView& view,
                                  const Spectrum& spec, const Tolerances& tol = {},
                                  double interior_radius = 1e-3, unsigned long long seed = 23);

/// Dispatches on the candidate kind.
StabilityVerdict classify_any(const PisCandidate& candidate, const ConeView& view,
                              const Spectrum& spec, const Tolerances& tol = {});

SpectralPartition spectral_partition(const Spectrum& spec, std::span<const int> pair,
                                     const Tolerances& tol = {});

struct ProbeOptions {
  std::vector<double> eps{1e-2, 1e-3, 1e-4};
  int trials = 50;
  int horizon = 300;          ///< gamma steps of the view (pattern periods)
  double c = 10.0;            ///< bounded-drift constant
  double escape = 0.5;
  unsigned long long seed = 29;
  Exec exec = Exec::Parallel;
};

struct ProbeLevel {
  double eps = 0.0;
  double max_distance = 0.0;    ///< over trials and steps
  double final_distance = 0.0;  ///< max over trials at the horizon
  int escaped = 0;              ///< trials exceeding the escape threshold
  int left_cone = 0;            ///< trials that left the cone at some step
  int trials = 0;
};

struct ProbeResult {
  Verdict verdict = Verdict::Ambiguous;
  std::vector<ProbeLevel> levels;
};

/// Perturbs points of the candidate, runs the gamma map of the partition and
/// watches the distance to the candidate (every `view.period()` events).
ProbeResult empirical_probe(const PisCandidate& candidate, const ConeView& view,
                            const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                            const ProbeOptions& opt = {}, const Tolerances& tol = {});

}  // namespace rbstc
