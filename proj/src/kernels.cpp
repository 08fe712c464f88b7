#include "rbstc/kernels.hpp"

#include <exception>

#include <omp.h>

namespace rbstc {

namespace {

// Exceptions may not cross an OpenMP region; the first one is rethrown after
// the loop.
class ExceptionSlot {
 public:
  template <typename F>
  void run(F&& f) {
    try {
      f();
    } catch (...) {
#pragma omp critical(rbstc_exception_slot)
      if (!eptr_) eptr_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (eptr_) std::rethrow_exception(eptr_);
  }

 private:
  std::exception_ptr eptr_;
};

}  // namespace

std::vector<double> tau_e_field_serial(const RelativeTrigger& trigger,
                                       std::span<const Eigen::VectorXd> xs) {
  std::vector<double> out(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) out[i] = trigger.tau_e(xs[i]);
  return out;
}

std::vector<double> tau_e_field_parallel(const RelativeTrigger& trigger,
                                         std::span<const Eigen::VectorXd> xs) {
  std::vector<double> out(xs.size());
  const long long count = static_cast<long long>(xs.size());
  ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 64)
  for (long long i = 0; i < count; ++i) {
    slot.run([&] { out[i] = trigger.tau_e(xs[i]); });
  }
  slot.rethrow();
  return out;
}

std::vector<double> tau_e_field(const RelativeTrigger& trigger,
                                std::span<const Eigen::VectorXd> xs, Exec exec) {
  return exec == Exec::Serial ? tau_e_field_serial(trigger, xs)
                              : tau_e_field_parallel(trigger, xs);
}

std::vector<int> membership_batch_serial(const Partition& partition,
                                         std::span<const Eigen::VectorXd> xs) {
  std::vector<int> out(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) out[i] = partition.membership(xs[i]);
  return out;
}

std::vector<int> membership_batch_parallel(const Partition& partition,
                                           std::span<const Eigen::VectorXd> xs) {
  std::vector<int> out(xs.size());
  const long long count = static_cast<long long>(xs.size());
  ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 64)
  for (long long i = 0; i < count; ++i) {
    slot.run([&] { out[i] = partition.membership(xs[i]); });
  }
  slot.rethrow();
  return out;
}

std::vector<int> membership_batch(const Partition& partition, std::span<const Eigen::VectorXd> xs,
                                  Exec exec) {
  return exec == Exec::Serial ? membership_batch_serial(partition, xs)
                              : membership_batch_parallel(partition, xs);
}

std::vector<IETTrace> simulate_batch_serial(const Partition& partition,
                                            std::span<const Eigen::MatrixXd> gs,
                                            std::span<const Eigen::VectorXd> x0s, int events,
                                            const Tolerances& tol) {
  std::vector<IETTrace> out(x0s.size());
  for (size_t i = 0; i < x0s.size(); ++i) out[i] = simulate(partition, gs, x0s[i], events, tol);
  return out;
}

std::vector<IETTrace> simulate_batch_parallel(const Partition& partition,
                                              std::span<const Eigen::MatrixXd> gs,
                                              std::span<const Eigen::VectorXd> x0s, int events,
                                              const Tolerances& tol) {
  std::vector<IETTrace> out(x0s.size());
  const long long count = static_cast<long long>(x0s.size());
  ExceptionSlot slot;
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) {
    slot.run([&] { out[i] = simulate(partition, gs, x0s[i], events, tol); });
  }
  slot.rethrow();
  return out;
}

std::vector<IETTrace> simulate_batch(const Partition& partition,
                                     std::span<const Eigen::MatrixXd> gs,
                                     std::span<const Eigen::VectorXd> x0s, int events,
                                     const Tolerances& tol, Exec exec) {
  return exec == Exec::Serial ? simulate_batch_serial(partition, gs, x0s, events, tol)
                              : simulate_batch_parallel(partition, gs, x0s, events, tol);
}

void set_max_threads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace rbstc
