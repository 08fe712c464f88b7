#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rbstc/regions.hpp"

namespace rbstc {

struct GammaStep {
  Eigen::VectorXd next;   ///< G(tau_i) x / |G(tau_i) x|
  int region = 0;
  double tau = 0.0;
  double log_gain = 0.0;  ///< log |G(tau_i) x| - log |x|
};

/// Normalized inter-event state jump map.
GammaStep gamma_step(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                     const Eigen::VectorXd& x, const Tolerances& tol = {});

struct IETTrace {
  std::vector<Eigen::VectorXd> states;  ///< normalized x(t_k), k = 0..N-1
  std::vector<int> regions;
  std::vector<double> iets;
  std::vector<double> event_times;      ///< t_0 = 0
  std::vector<double> log_norms;        ///< log |x(t_k)| with |x(t_0)| from x0

  int size() const { return static_cast<int>(regions.size()); }
};

/// N events of the closed loop from x0; the trace holds the states at the
/// events t_0 .. t_{N-1}.
IETTrace simulate(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                  const Eigen::VectorXd& x0, int events, const Tolerances& tol = {});

struct SteadyState {
  enum class Kind { None, Constant, Periodic } kind = Kind::None;
  std::vector<int> region_pattern;  ///< minimal period, in phase at onset
  std::vector<double> tau_pattern;
  int onset_index = -1;

  int period() const { return static_cast<int>(region_pattern.size()); }
};

const char* to_string(SteadyState::Kind kind);

/// Finds the shortest period p <= max_period that repeats exactly over the
/// last `window` region indices, then walks back to the onset.
SteadyState detect_steady_state(const IETTrace& trace, const std::vector<double>& taus,
                                int window = 100, int max_period = 20);

/// Lexicographically smallest rotation of a cyclic pattern.
std::vector<int> canonical_rotation(const std::vector<int>& pattern);

/// True when b is a cyclic rotation of a.
bool same_cycle(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace rbstc
