#pragma once

#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rbstc/system.hpp"

namespace rbstc {

/// Held-input flow x(t) = G(t) x0 sampled on a uniform grid over
/// [0, horizon], plus exact half-step propagators for bisection. The flow
/// does not depend on the threshold, so one instance serves every sigma.
class TriggerFlow {
 public:
  static constexpr int kDefaultSteps = 2000;

  TriggerFlow(const LinearSystem& sys, double horizon, int steps = kDefaultSteps);

  int dim() const { return n_; }
  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  double step() const { return horizon_ / steps_; }
  const LinearSystem& system() const { return sys_; }

  /// First tau in (0, horizon] with |x(tau) - x0| >= sigma |x(tau)|; the
  /// horizon when there is no crossing. x is normalized first.
  double tau_e(const Eigen::VectorXd& x, double sigma, double tol_conv) const;

 private:
  struct Propagator {
    double dt;
    Eigen::MatrixXd eA;   // e^{A dt}
    Eigen::MatrixXd phi;  // int_0^dt e^{A(dt - s)} B K ds
  };

  LinearSystem sys_;
  int n_;
  double horizon_;
  int steps_;
  std::vector<Propagator> levels_;  // levels_[k] advances by step / 2^k
};

/// Relative thresholding rule tau_e(x) with its flow grid.
struct RelativeTrigger {
  std::shared_ptr<const TriggerFlow> flow;
  double sigma = 0.1;
  double tol_conv = 1e-12;

  double tau_e(const Eigen::VectorXd& x) const { return flow->tau_e(x, sigma, tol_conv); }
  int dim() const { return flow->dim(); }
};

RelativeTrigger make_relative_trigger(const LinearSystem& sys, double sigma, double horizon,
                                      double tol_conv = 1e-12);

/// One-shot evaluation; builds the flow grid on every call.
double tau_e_relative(const LinearSystem& sys, const Eigen::VectorXd& x, double sigma,
                      double horizon, double tol_conv = 1e-12);

struct TauBounds {
  double tau_min = 0.0;
  double tau_max = 0.0;
  int samples = 0;
};

/// Min and max of tau_e over seeded unit-sphere samples. Sampled extrema
/// bracket the true ones from inside.
TauBounds estimate_tau_bounds(const RelativeTrigger& trigger, int sample_count,
                              unsigned long long seed);

struct SigmaCalibration {
  bool ok = false;
  double sigma = 0.0;
  TauBounds bounds;
  double residual_min = 0.0;  ///< |tau_min - target| / target
  double residual_max = 0.0;
  int iterations = 0;
};

/// Bisection over sigma so that the sampled tau_min matches the target.
/// `ok` is false when the best residual exceeds 20%.
SigmaCalibration calibrate_sigma(const LinearSystem& sys, double horizon, double target_tmin,
                                 double target_tmax, int sample_count, unsigned long long seed,
                                 double sigma_lo = 1e-3, double sigma_hi = 2.0,
                                 double tol_conv = 1e-12);

}  // namespace rbstc
