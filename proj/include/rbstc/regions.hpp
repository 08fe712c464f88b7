#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "rbstc/trigger.hpp"

namespace rbstc {

/// States whose trigger time falls in [lo, hi).
struct TriggerSlice {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

/// {x : normals.row(j) . x >= 0 for all j}.
struct PolyhedralCone {
  Eigen::MatrixXd normals;
};

/// Union of the spherical Voronoi cells of the listed centers.
struct VoronoiCells {
  std::vector<int> centers;
};

using RegionShape = std::variant<TriggerSlice, PolyhedralCone, VoronoiCells>;

struct ConicRegion {
  int index = 0;
  RegionShape shape;
};

/// Finite family of cones covering R^n \ {0}, each with a fixed IET.
/// Immutable after construction; every query is thread safe.
class Partition {
 public:
  enum class Mode { TriggerSlices, Voronoi, Polyhedral };

  static Partition trigger_slices(RelativeTrigger trigger, std::vector<TriggerSlice> slices,
                                  std::vector<double> taus);
  /// centers: n x c unit columns; center_region[c] is the region of center c.
  static Partition voronoi(Eigen::MatrixXd centers, std::vector<int> center_region,
                           std::vector<double> taus);
  /// First matching cone wins on shared boundaries.
  static Partition polyhedral(std::vector<Eigen::MatrixXd> normals, std::vector<double> taus);

  Mode mode() const { return mode_; }
  int dim() const { return n_; }
  int size() const { return static_cast<int>(regions_.size()); }
  const std::vector<double>& taus() const { return taus_; }
  double tau(int region) const { return taus_.at(region); }
  const std::vector<ConicRegion>& regions() const { return regions_; }
  const RelativeTrigger* trigger() const { return trigger_ ? &*trigger_ : nullptr; }
  const Eigen::MatrixXd& centers() const { return centers_; }
  const std::vector<int>& center_region() const { return center_region_; }

  /// Region containing the ray through x (x != 0).
  int membership(const Eigen::VectorXd& x) const;
  bool contains(int region, const Eigen::VectorXd& x) const { return membership(x) == region; }

  /// Signed margin of the direction of x with respect to a region: positive
  /// inside, negative outside, zero on the boundary. Units depend on the
  /// region kind (seconds for trigger slices, cosine gaps otherwise).
  double margin(int region, const Eigen::VectorXd& x) const;

  /// Inward normals when the region is a single polyhedral cone (a polyhedral
  /// region or a one-center Voronoi cell).
  std::optional<Eigen::MatrixXd> halfspaces(int region) const;

  /// Taus strictly increasing (and therefore pairwise distinct).
  bool taus_increasing() const;

 private:
  Partition() = default;
  int voronoi_best(const Eigen::VectorXd& xhat) const;

  Mode mode_ = Mode::Polyhedral;
  int n_ = 0;
  std::vector<ConicRegion> regions_;
  std::vector<double> taus_;
  std::optional<RelativeTrigger> trigger_;
  Eigen::MatrixXd centers_;
  std::vector<int> center_region_;
};

const char* to_string(Partition::Mode mode);

/// Seeded Gaussian-normalized samples of the unit sphere in R^n.
std::vector<Eigen::VectorXd> unit_sphere_samples(int n, int count, unsigned long long seed);

/// r equal-width slices of [tau_min, tau_max]; region i carries the left
/// endpoint. Trigger times below tau_min fall in the first slice and above
/// tau_max in the last.
Partition build_trigger_partition(const RelativeTrigger& trigger, int r, double tau_min,
                                  double tau_max);

/// Spherical Voronoi cones; centers sharing a tau are merged into one region
/// and regions are indexed by increasing tau.
Partition build_cone_partition(const std::vector<Eigen::VectorXd>& centers,
                               const std::vector<double>& taus);

struct RegionSamples {
  std::vector<Eigen::VectorXd> vectors;
  bool empty_region_warning = false;
  long long attempts = 0;
};

/// Rejection sampling of unit vectors of one region.
RegionSamples sample_region(const Partition& partition, int region, int count,
                            unsigned long long seed);

}  // namespace rbstc
