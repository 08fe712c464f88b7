#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rbstc/periodic.hpp"
#include "rbstc/regions.hpp"
#include "rbstc/system.hpp"
#include "rbstc/trigger.hpp"

namespace rbstc {

/// Malformed configuration; `field` is a JSON-pointer-like path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct TriggerSpec {
  double sigma = 0.0;
  double horizon = 0.0;
  int steps = TriggerFlow::kDefaultSteps;
};

struct RandomCones {
  int count = 0;
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  int decimals = 4;  ///< taus are rounded, so repeated values merge regions
};

struct PartitionSpec {
  std::string mode;  ///< "tau-slices", "cones" or "polyhedral"
  int r = 0;
  std::optional<double> tau_min, tau_max;
  int bound_samples = 10000;
  std::vector<Eigen::VectorXd> centers;
  std::optional<RandomCones> random;
  std::vector<Eigen::MatrixXd> normals;
  std::vector<double> taus;
};

struct PeriodicSpec {
  bool enabled = true;
  int max_period = 20;
  int window = 100;
  int simulations = 64;
  int events = 400;
  int enumerate_length = 0;  ///< exhaustive enumeration up to this length
};

struct AnalysisConfig {
  Eigen::MatrixXd A, B;
  std::optional<Eigen::MatrixXd> K;
  std::vector<Complex> desired_poles;
  std::optional<TriggerSpec> trigger;
  PartitionSpec partition;
  Tolerances tol;
  unsigned long long seed = 1;
  AnalysisOptions analysis;
  PeriodicSpec periodic;
  int a1_samples = 256;
};

AnalysisConfig parse_config(const nlohmann::json& j);
/// Reads and parses a file; parse failures become ConfigError.
AnalysisConfig load_config(const std::string& path);

/// System, trigger, partition and transition matrices built from a config.
struct Model {
  LinearSystem system;
  std::optional<RelativeTrigger> trigger;
  std::optional<Partition> partition;
  std::vector<Eigen::MatrixXd> gs;
  std::optional<TauBounds> bounds;  ///< sampled when tau-slices omit them

  const Partition& part() const { return *partition; }
};

/// Builds the system only (no partition); used by trigger-only commands.
LinearSystem build_system(const AnalysisConfig& cfg);
Model build_model(const AnalysisConfig& cfg);

}  // namespace rbstc
