#include "rbstc/trigger.hpp"

#include <algorithm>
#include <cmath>

#include "rbstc/errors.hpp"
#include "rbstc/kernels.hpp"
#include "rbstc/regions.hpp"

namespace rbstc {

namespace {

constexpr int kMaxHalvings = 60;

}  // namespace

TriggerFlow::TriggerFlow(const LinearSystem& sys, double horizon, int steps)
    : sys_(sys), n_(sys.n()), horizon_(horizon), steps_(steps) {
  sys_.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidArgument("TriggerFlow: horizon must be positive");
  }
  if (steps < 1) throw InvalidArgument("TriggerFlow: need at least one grid step");
  const int n = n_;
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = sys_.A;
  aug.topRightCorner(n, n) = sys_.B * sys_.K;
  double dt = step();
  for (int k = 0; k <= kMaxHalvings; ++k, dt *= 0.5) {
    Eigen::MatrixXd e = expm(aug * dt);
    levels_.push_back({dt, e.topLeftCorner(n, n), e.topRightCorner(n, n)});
  }
}

double TriggerFlow::tau_e(const Eigen::VectorXd& x, double sigma, double tol_conv) const {
  if (x.size() != n_) throw InvalidArgument("tau_e: dimension mismatch");
  const double nx = x.norm();
  if (!(nx > 0.0)) throw InvalidArgument("tau_e: x must be nonzero");
  if (!(sigma > 0.0)) throw InvalidArgument("tau_e: sigma must be positive");
  const Eigen::VectorXd x0 = x / nx;
  auto crossed = [&](const Eigen::VectorXd& xt) {
    return (xt - x0).norm() >= sigma * xt.norm();
  };

  const Propagator& coarse = levels_[0];
  Eigen::VectorXd lo_state = x0;
  Eigen::VectorXd next(n_);
  int j = 0;
  for (; j < steps_; ++j) {
    next.noalias() = coarse.eA * lo_state;
    next.noalias() += coarse.phi * x0;
    if (crossed(next)) break;
    lo_state = next;
  }
  if (j == steps_) return horizon_;

  // Crossing lies in (j h, (j+1) h]; halve with the exact propagators.
  double lo = j * step();
  double hi = (j + 1) * step();
  for (int k = 1; k <= kMaxHalvings && (hi - lo) > tol_conv; ++k) {
    const Propagator& p = levels_[k];
    next.noalias() = p.eA * lo_state;
    next.noalias() += p.phi * x0;
    const double mid = lo + p.dt;
    if (crossed(next)) {
      hi = mid;
    } else {
      lo = mid;
      lo_state = next;
    }
  }
  return hi;
}

RelativeTrigger make_relative_trigger(const LinearSystem& sys, double sigma, double horizon,
                                      double tol_conv) {
  if (!(sigma > 0.0)) throw InvalidArgument("relative trigger: sigma must be positive");
  return {std::make_shared<const TriggerFlow>(sys, horizon), sigma, tol_conv};
}

double tau_e_relative(const LinearSystem& sys, const Eigen::VectorXd& x, double sigma,
                      double horizon, double tol_conv) {
  if (x.size() == 0 || x.norm() == 0.0) throw InvalidArgument("tau_e: x must be nonzero");
  return TriggerFlow(sys, horizon).tau_e(x, sigma, tol_conv);
}

TauBounds estimate_tau_bounds(const RelativeTrigger& trigger, int sample_count,
                              unsigned long long seed) {
  if (sample_count < 1) throw InvalidArgument("estimate_tau_bounds: need samples");
  auto xs = unit_sphere_samples(trigger.dim(), sample_count, seed);
  auto taus = tau_e_field(trigger, xs);
  auto [mn, mx] = std::minmax_element(taus.begin(), taus.end());
  return {*mn, *mx, sample_count};
}

SigmaCalibration calibrate_sigma(const LinearSystem& sys, double horizon, double target_tmin,
                                 double target_tmax, int sample_count, unsigned long long seed,
                                 double sigma_lo, double sigma_hi, double tol_conv) {
  if (!(target_tmin > 0.0) || !(target_tmax > target_tmin)) {
    throw InvalidArgument("calibrate_sigma: need 0 < target_tmin < target_tmax");
  }
  if (!(sigma_lo > 0.0) || !(sigma_hi > sigma_lo)) {
    throw InvalidArgument("calibrate_sigma: invalid sigma bracket");
  }
  auto flow = std::make_shared<const TriggerFlow>(sys, horizon);
  auto xs = unit_sphere_samples(sys.n(), sample_count, seed);
  auto bounds_at = [&](double sigma) {
    RelativeTrigger trig{flow, sigma, tol_conv};
    auto taus = tau_e_field(trig, xs);
    auto [mn, mx] = std::minmax_element(taus.begin(), taus.end());
    return TauBounds{*mn, *mx, sample_count};
  };

  SigmaCalibration out;
  double lo = sigma_lo, hi = sigma_hi;
  TauBounds b_lo = bounds_at(lo);
  TauBounds b_hi = bounds_at(hi);
  double best_sigma = lo;
  TauBounds best = b_lo;
  auto consider = [&](double s, const TauBounds& b) {
    if (std::abs(b.tau_min - target_tmin) < std::abs(best.tau_min - target_tmin)) {
      best_sigma = s;
      best = b;
    }
  };
  consider(hi, b_hi);
  if (b_lo.tau_min <= target_tmin && target_tmin <= b_hi.tau_min) {
    // tau_min grows monotonically with sigma.
    for (int it = 0; it < 60 && (hi - lo) > 1e-6 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      TauBounds b = bounds_at(mid);
      consider(mid, b);
      if (b.tau_min < target_tmin) {
        lo = mid;
      } else {
        hi = mid;
      }
      out.iterations = it + 1;
    }
  }
  out.sigma = best_sigma;
  out.bounds = best;
  out.residual_min = std::abs(best.tau_min - target_tmin) / target_tmin;
  out.residual_max = std::abs(best.tau_max - target_tmax) / target_tmax;
  out.ok = out.residual_min <= 0.2;
  return out;
}

}  // namespace rbstc
