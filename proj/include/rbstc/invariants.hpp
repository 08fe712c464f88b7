#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbstc/numkit.hpp"
#include "rbstc/regions.hpp"
#include "rbstc/subspace.hpp"

namespace rbstc {

/// A cone together with the linear map that governs the gamma map on it:
/// either one region R_i with G(tau_i), or a pattern region R_P with the
/// composite G_P.
struct ConeView {
  int region = -1;           ///< region index, -1 for composite views
  std::vector<int> pattern;  ///< visited regions, {region} for single regions
  Eigen::MatrixXd G;
  std::function<bool(const Eigen::VectorXd&)> contains;
  /// Signed margin; >= 0 on the closure.
  std::function<double(const Eigen::VectorXd&)> margin;
  /// Inward normals when the cone is polyhedral.
  std::optional<Eigen::MatrixXd> halfspaces;

  int dim() const { return static_cast<int>(G.rows()); }
  int period() const { return static_cast<int>(pattern.size()); }
  /// G x / |G x|.
  Eigen::VectorXd step(const Eigen::VectorXd& x) const;
};

ConeView region_view(const Partition& partition, std::span<const Eigen::MatrixXd> gs, int region);

struct PisCandidate {
  enum class Kind { Ray, Line, Plane, UnionOfRays, Subspace };
  int region = -1;
  Kind kind = Kind::Ray;
  std::vector<Eigen::VectorXd> rays;  ///< Ray / UnionOfRays generators
  Subspace span;                      ///< linear span of the candidate
  std::vector<Complex> eigenvalues;   ///< generating eigenvalues
  std::vector<int> clusters;          ///< generating spectrum clusters
  bool contained = false;
  bool verified = false;
  double min_margin = 0.0;            ///< smallest sampled region margin

  bool is_ray_set() const { return kind == Kind::Ray || kind == Kind::UnionOfRays; }
  /// Distance from a unit vector to the candidate intersected with the
  /// unit sphere.
  double distance(const Eigen::VectorXd& x) const;
  /// Seeded unit points of the candidate.
  std::vector<Eigen::VectorXd> sample(int count, unsigned long long seed) const;
};

const char* to_string(PisCandidate::Kind kind);

/// R-eigenspaces of one eigenvalue, one per independent eigenvector.
std::vector<Subspace> reig(const Eigen::MatrixXd& m, Complex lambda, const Tolerances& tol = {});
std::vector<Subspace> reig(const Spectrum& spec, int cluster, const Tolerances& tol = {});

/// Distinct eigenvalue magnitudes, descending, with the clusters of each.
struct MagnitudeGroup {
  double mu = 0.0;
  std::vector<int> clusters;
};
std::vector<MagnitudeGroup> magnitude_groups(const Spectrum& spec, const Tolerances& tol);

/// Span of every R-eigenspace whose eigenvalue has magnitude mu.
Subspace s_mu(const Eigen::MatrixXd& m, double mu, const Tolerances& tol = {});
Subspace s_mu(const Spectrum& spec, const MagnitudeGroup& group, const Tolerances& tol = {});

/// Rays G x = a x, a > 0, inside the cone.
std::vector<PisCandidate> find_pirs(const ConeView& view, const Spectrum& spec,
                                    const Tolerances& tol = {});

/// R-eigenspaces, eigenspaces of repeated eigenvalues, generalized
/// eigenspaces of defective ones, and spans of contained R-eigenspaces.
std::vector<PisCandidate> find_invariant_subspaces(const ConeView& view, const Spectrum& spec,
                                                   int samples = 256,
                                                   unsigned long long seed = 11,
                                                   const Tolerances& tol = {});

struct UnionSearch {
  std::vector<PisCandidate> candidates;
  std::vector<std::string> notes;  ///< e.g. angles treated as irrational
};

/// Finite ray sets closed under the gamma map: pairs from {l, -l}
/// eigenvectors and orbits of rational-angle rotations.
UnionSearch find_union_of_rays(const ConeView& view, const Spectrum& spec,
                               int max_denominator = 12, unsigned long long seed = 13,
                               const Tolerances& tol = {});

/// Best rational approximation p/q of x with q <= max_den, if within tol.
std::optional<std::pair<int, int>> rational_angle(double x, int max_den, double tol);

enum class IntersectStatus { Intersects, NoIntersectionFound, CertifiedDisjoint };
const char* to_string(IntersectStatus s);

struct ClosureIntersection {
  IntersectStatus status = IntersectStatus::NoIntersectionFound;
  std::vector<Eigen::VectorXd> witnesses;
  double best_margin = 0.0;
};

/// Does the subspace meet the closure of the cone away from the origin?
/// Exact for polyhedral cones and lines, multi-start search otherwise.
ClosureIntersection intersect_closure(const ConeView& view, const Subspace& s,
                                      const Tolerances& tol = {}, int starts = 64,
                                      unsigned long long seed = 17);

struct SMuEntry {
  double mu = 0.0;
  Subspace s;
  std::vector<int> clusters;
  ClosureIntersection hit;
};

struct SMuReport {
  int region = -1;
  std::vector<SMuEntry> entries;  ///< mu descending
  std::optional<double> mu_max;
  bool pis_free = false;          ///< no S_mu meets the closure (certified or not)
  bool pis_free_certified = false;
};

SMuReport screen_region(const ConeView& view, const Spectrum& spec, const Tolerances& tol = {},
                        int starts = 64, unsigned long long seed = 17);

struct PisWithoutPirReport {
  bool negative_line = false;          ///< a real negative eigenline meets the closure
  std::vector<Complex> negative_eigenvalues;
  bool equal_magnitude = false;        ///< two distinct eigenvalues, same mu, S_mu meets closure
  std::vector<double> equal_magnitude_mus;
  bool has_pir = false;
  bool decided_exactly = true;         ///< every intersection test was exact
  /// "possible", "no-pis-certified" or "no-pis-found".
  std::string verdict;
};

PisWithoutPirReport screen_pis_without_pir(const ConeView& view, const Spectrum& spec,
                                           const Tolerances& tol = {}, int starts = 64,
                                           unsigned long long seed = 19);

/// S_{mu_max}(G) intersected with the span of the candidate, mu_max being
/// the largest magnitude with a nontrivial intersection.
Subspace dominant_limit_set(const PisCandidate& candidate, const Eigen::MatrixXd& g,
                            const Spectrum& spec, const Tolerances& tol = {});

/// Seeded unit vectors of a subspace.
std::vector<Eigen::VectorXd> sample_subspace(const Subspace& s, int count,
                                             unsigned long long seed);

}  // namespace rbstc
