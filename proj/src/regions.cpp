#include "rbstc/regions.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "rbstc/errors.hpp"

namespace rbstc {

namespace {

constexpr double kVoronoiTie = 1e-12;

Eigen::VectorXd unit(const Eigen::VectorXd& x, const char* who) {
  const double nx = x.norm();
  if (!(nx > 0.0) || !std::isfinite(nx)) {
    throw InvalidArgument(std::string(who) + ": the origin belongs to no region");
  }
  return x / nx;
}

double polyhedral_margin(const Eigen::MatrixXd& normals, const Eigen::VectorXd& xhat) {
  double m = std::numeric_limits<double>::infinity();
  for (int j = 0; j < normals.rows(); ++j) {
    const double nn = normals.row(j).norm();
    m = std::min(m, normals.row(j).dot(xhat) / nn);
  }
  return m;
}

}  // namespace

const char* to_string(Partition::Mode mode) {
  switch (mode) {
    case Partition::Mode::TriggerSlices: return "tau-slices";
    case Partition::Mode::Voronoi: return "cones";
    case Partition::Mode::Polyhedral: return "polyhedral";
  }
  return "?";
}

Partition Partition::trigger_slices(RelativeTrigger trigger, std::vector<TriggerSlice> slices,
                                    std::vector<double> taus) {
  if (slices.empty() || slices.size() != taus.size()) {
    throw InvalidArgument("trigger partition: need one tau per slice");
  }
  Partition p;
  p.mode_ = Mode::TriggerSlices;
  p.n_ = trigger.dim();
  p.trigger_ = std::move(trigger);
  for (size_t i = 0; i < slices.size(); ++i) {
    if (!(slices[i].lo < slices[i].hi)) throw InvalidArgument("trigger partition: empty slice");
    if (i > 0 && slices[i].lo != slices[i - 1].hi) {
      throw InvalidArgument("trigger partition: slices must be contiguous");
    }
    p.regions_.push_back({static_cast<int>(i), slices[i]});
  }
  p.taus_ = std::move(taus);
  return p;
}

Partition Partition::voronoi(Eigen::MatrixXd centers, std::vector<int> center_region,
                             std::vector<double> taus) {
  if (centers.cols() == 0 || static_cast<int>(center_region.size()) != centers.cols()) {
    throw InvalidArgument("voronoi partition: need a region for every center");
  }
  Partition p;
  p.mode_ = Mode::Voronoi;
  p.n_ = static_cast<int>(centers.rows());
  for (int c = 0; c < centers.cols(); ++c) {
    centers.col(c) = unit(centers.col(c), "voronoi partition");
  }
  const int r = static_cast<int>(taus.size());
  std::vector<VoronoiCells> cells(r);
  for (int c = 0; c < centers.cols(); ++c) {
    if (center_region[c] < 0 || center_region[c] >= r) {
      throw InvalidArgument("voronoi partition: center region out of range");
    }
    cells[center_region[c]].centers.push_back(c);
  }
  for (int i = 0; i < r; ++i) {
    if (cells[i].centers.empty()) throw InvalidArgument("voronoi partition: region without centers");
    p.regions_.push_back({i, cells[i]});
  }
  p.centers_ = std::move(centers);
  p.center_region_ = std::move(center_region);
  p.taus_ = std::move(taus);
  return p;
}

Partition Partition::polyhedral(std::vector<Eigen::MatrixXd> normals, std::vector<double> taus) {
  if (normals.empty() || normals.size() != taus.size()) {
    throw InvalidArgument("polyhedral partition: need one tau per cone");
  }
  Partition p;
  p.mode_ = Mode::Polyhedral;
  p.n_ = static_cast<int>(normals.front().cols());
  for (size_t i = 0; i < normals.size(); ++i) {
    if (normals[i].cols() != p.n_) throw InvalidArgument("polyhedral partition: dimension mismatch");
    p.regions_.push_back({static_cast<int>(i), PolyhedralCone{normals[i]}});
  }
  p.taus_ = std::move(taus);
  return p;
}

bool Partition::taus_increasing() const {
  for (size_t i = 1; i < taus_.size(); ++i) {
    if (!(taus_[i - 1] < taus_[i])) return false;
  }
  return true;
}

int Partition::voronoi_best(const Eigen::VectorXd& xhat) const {
  Eigen::VectorXd dots = centers_.transpose() * xhat;
  const double best = dots.maxCoeff();
  int region = size();
  for (int c = 0; c < dots.size(); ++c) {
    if (dots(c) >= best - kVoronoiTie) region = std::min(region, center_region_[c]);
  }
  return region;
}

int Partition::membership(const Eigen::VectorXd& x) const {
  if (x.size() != n_) throw InvalidArgument("membership: dimension mismatch");
  const Eigen::VectorXd xhat = unit(x, "membership");
  switch (mode_) {
    case Mode::TriggerSlices: {
      const double t = trigger_->tau_e(xhat);
      for (int i = 0; i + 1 < size(); ++i) {
        if (t < std::get<TriggerSlice>(regions_[i].shape).hi) return i;
      }
      return size() - 1;
    }
    case Mode::Voronoi:
      return voronoi_best(xhat);
    case Mode::Polyhedral: {
      int best = 0;
      double best_margin = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < size(); ++i) {
        const double m = polyhedral_margin(std::get<PolyhedralCone>(regions_[i].shape).normals, xhat);
        if (m >= 0.0) return i;
        if (m > best_margin) {
          best_margin = m;
          best = i;
        }
      }
      return best;
    }
  }
  return 0;
}

double Partition::margin(int region, const Eigen::VectorXd& x) const {
  if (region < 0 || region >= size()) throw InvalidArgument("margin: region out of range");
  const Eigen::VectorXd xhat = unit(x, "margin");
  switch (mode_) {
    case Mode::TriggerSlices: {
      const auto& s = std::get<TriggerSlice>(regions_[region].shape);
      const double t = trigger_->tau_e(xhat);
      double m = std::numeric_limits<double>::infinity();
      if (region > 0) m = std::min(m, t - s.lo);
      if (region + 1 < size()) m = std::min(m, s.hi - t);
      return m;
    }
    case Mode::Voronoi: {
      Eigen::VectorXd dots = centers_.transpose() * xhat;
      double own = -2.0, other = -2.0;
      for (int c = 0; c < dots.size(); ++c) {
        if (center_region_[c] == region) {
          own = std::max(own, dots(c));
        } else {
          other = std::max(other, dots(c));
        }
      }
      return other < -1.5 ? 1.0 : own - other;
    }
    case Mode::Polyhedral:
      return polyhedral_margin(std::get<PolyhedralCone>(regions_[region].shape).normals, xhat);
  }
  return 0.0;
}

std::optional<Eigen::MatrixXd> Partition::halfspaces(int region) const {
  if (mode_ == Mode::Polyhedral) return std::get<PolyhedralCone>(regions_.at(region).shape).normals;
  if (mode_ != Mode::Voronoi) return std::nullopt;
  // A single Voronoi cell is the polyhedral cone {x : (c - c_j) . x >= 0}.
  const auto& own = std::get<VoronoiCells>(regions_.at(region).shape).centers;
  const int total = static_cast<int>(centers_.cols());
  if (own.size() != 1 || total < 2) return std::nullopt;
  Eigen::MatrixXd normals(total - 1, n_);
  int row = 0;
  for (int c = 0; c < total; ++c) {
    if (c == own[0]) continue;
    normals.row(row++) = (centers_.col(own[0]) - centers_.col(c)).transpose();
  }
  return normals;
}

std::vector<Eigen::VectorXd> unit_sphere_samples(int n, int count, unsigned long long seed) {
  if (n < 1 || count < 0) throw InvalidArgument("unit_sphere_samples: invalid size");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  while (static_cast<int>(out.size()) < count) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(rng);
    const double nv = v.norm();
    if (nv < 1e-12) continue;
    out.push_back(v / nv);
  }
  return out;
}

Partition build_trigger_partition(const RelativeTrigger& trigger, int r, double tau_min,
                                  double tau_max) {
  if (r < 1) throw InvalidArgument("build_trigger_partition: need at least one region");
  if (!(tau_min > 0.0) || !(tau_min < tau_max)) {
    throw InvalidArgument("build_trigger_partition: need 0 < tau_min < tau_max");
  }
  const double width = (tau_max - tau_min) / r;
  std::vector<TriggerSlice> slices;
  std::vector<double> taus;
  for (int i = 0; i < r; ++i) {
    const double left = tau_min + i * width;
    TriggerSlice s;
    s.lo = i == 0 ? 0.0 : left;
    s.hi = i + 1 == r ? std::numeric_limits<double>::infinity() : tau_min + (i + 1) * width;
    slices.push_back(s);
    taus.push_back(left);
  }
  return Partition::trigger_slices(trigger, std::move(slices), std::move(taus));
}

Partition build_cone_partition(const std::vector<Eigen::VectorXd>& centers,
                               const std::vector<double>& taus) {
  if (centers.empty() || centers.size() != taus.size()) {
    throw InvalidArgument("build_cone_partition: need one tau per center");
  }
  const int n = static_cast<int>(centers.front().size());
  Eigen::MatrixXd c(n, centers.size());
  for (size_t i = 0; i < centers.size(); ++i) {
    if (centers[i].size() != n) throw InvalidArgument("build_cone_partition: dimension mismatch");
    if (!(taus[i] > 0.0)) throw InvalidArgument("build_cone_partition: taus must be positive");
    c.col(i) = unit(centers[i], "build_cone_partition");
  }
  for (int i = 0; i < c.cols(); ++i) {
    for (int j = i + 1; j < c.cols(); ++j) {
      if ((c.col(i) - c.col(j)).norm() < 1e-12) {
        throw InvalidArgument("build_cone_partition: duplicate centers");
      }
    }
  }
  std::map<double, int> index;
  for (double t : taus) index.emplace(t, 0);
  std::vector<double> unique;
  for (auto& [t, idx] : index) {
    idx = static_cast<int>(unique.size());
    unique.push_back(t);
  }
  std::vector<int> center_region;
  for (double t : taus) center_region.push_back(index.at(t));
  return Partition::voronoi(std::move(c), std::move(center_region), std::move(unique));
}

RegionSamples sample_region(const Partition& partition, int region, int count,
                            unsigned long long seed) {
  if (region < 0 || region >= partition.size()) {
    throw InvalidArgument("sample_region: region out of range");
  }
  RegionSamples out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const int n = partition.dim();
  constexpr long long kBatch = 100000;
  while (static_cast<int>(out.vectors.size()) < count) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(rng);
    const double nv = v.norm();
    if (nv < 1e-12) continue;
    v /= nv;
    ++out.attempts;
    if (partition.membership(v) == region) out.vectors.push_back(v);
    if (out.attempts % kBatch == 0 &&
        static_cast<double>(out.vectors.size()) < 1e-5 * static_cast<double>(out.attempts)) {
      out.empty_region_warning = true;
      break;
    }
  }
  return out;
}

}  // namespace rbstc
