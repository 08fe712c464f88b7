#include "rbstc/gamma.hpp"

#include <algorithm>
#include <cmath>

#include "rbstc/errors.hpp"

namespace rbstc {

GammaStep gamma_step(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                     const Eigen::VectorXd& x, const Tolerances& tol) {
  if (static_cast<int>(gs.size()) != partition.size()) {
    throw InvalidArgument("gamma_step: partition and transition matrices misaligned");
  }
  const double nx = x.norm();
  if (!(nx > 0.0)) throw InvalidArgument("gamma_step: x must be nonzero");
  GammaStep out;
  out.region = partition.membership(x);
  out.tau = partition.tau(out.region);
  Eigen::VectorXd y = gs[out.region] * (x / nx);
  const double ny = y.norm();
  if (!(ny >= tol.rank)) {
    throw AssumptionViolation("gamma_step: G(tau_i) x vanishes; the null-space assumption fails");
  }
  out.next = y / ny;
  out.log_gain = std::log(ny);
  return out;
}

IETTrace simulate(const Partition& partition, std::span<const Eigen::MatrixXd> gs,
                  const Eigen::VectorXd& x0, int events, const Tolerances& tol) {
  if (events < 1) throw InvalidArgument("simulate: need at least one event");
  const double n0 = x0.norm();
  if (!(n0 > 0.0)) throw InvalidArgument("simulate: x0 must be nonzero");
  IETTrace trace;
  trace.states.reserve(events);
  Eigen::VectorXd x = x0 / n0;
  double t = 0.0;
  double log_norm = std::log(n0);
  for (int k = 0; k < events; ++k) {
    GammaStep s = gamma_step(partition, gs, x, tol);
    trace.states.push_back(x);
    trace.regions.push_back(s.region);
    trace.iets.push_back(s.tau);
    trace.event_times.push_back(t);
    trace.log_norms.push_back(log_norm);
    t += s.tau;
    log_norm += s.log_gain;
    x = s.next;
  }
  return trace;
}

const char* to_string(SteadyState::Kind kind) {
  switch (kind) {
    case SteadyState::Kind::None: return "none";
    case SteadyState::Kind::Constant: return "constant";
    case SteadyState::Kind::Periodic: return "periodic";
  }
  return "?";
}

SteadyState detect_steady_state(const IETTrace& trace, const std::vector<double>& taus,
                                int window, int max_period) {
  const int len = trace.size();
  if (window < 1 || window > len) {
    throw InvalidArgument("detect_steady_state: window must lie in [1, trace length]");
  }
  if (max_period < 1) throw InvalidArgument("detect_steady_state: max_period must be >= 1");
  const auto& idx = trace.regions;
  const int start = len - window;
  SteadyState out;
  for (int p = 1; p <= max_period && 2 * p <= window; ++p) {
    bool repeats = true;
    for (int k = start; k + p < len && repeats; ++k) repeats = idx[k] == idx[k + p];
    if (!repeats) continue;
    int onset = start;
    while (onset > 0 && idx[onset - 1] == idx[onset - 1 + p]) --onset;
    out.kind = p == 1 ? SteadyState::Kind::Constant : SteadyState::Kind::Periodic;
    out.onset_index = onset;
    for (int k = 0; k < p; ++k) {
      out.region_pattern.push_back(idx[onset + k]);
      out.tau_pattern.push_back(taus.at(idx[onset + k]));
    }
    return out;
  }
  return out;
}

std::vector<int> canonical_rotation(const std::vector<int>& pattern) {
  std::vector<int> best = pattern;
  std::vector<int> rot = pattern;
  for (size_t s = 1; s < pattern.size(); ++s) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    if (rot < best) best = rot;
  }
  return best;
}

bool same_cycle(const std::vector<int>& a, const std::vector<int>& b) {
  return a.size() == b.size() && canonical_rotation(a) == canonical_rotation(b);
}

}  // namespace rbstc
