#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rbstc/gamma.hpp"
#include "rbstc/regions.hpp"
#include "rbstc/trigger.hpp"

namespace rbstc {

// Data-parallel sweeps over independent inputs. Each kernel has a serial
// reference and an OpenMP version; both write results by input index, so
// they agree bit for bit for any thread count.

enum class Exec { Serial, Parallel };

std::vector<double> tau_e_field_serial(const RelativeTrigger& trigger,
                                       std::span<const Eigen::VectorXd> xs);
std::vector<double> tau_e_field_parallel(const RelativeTrigger& trigger,
                                         std::span<const Eigen::VectorXd> xs);
std::vector<double> tau_e_field(const RelativeTrigger& trigger,
                                std::span<const Eigen::VectorXd> xs, Exec exec = Exec::Parallel);

std::vector<int> membership_batch_serial(const Partition& partition,
                                         std::span<const Eigen::VectorXd> xs);
std::vector<int> membership_batch_parallel(const Partition& partition,
                                           std::span<const Eigen::VectorXd> xs);
std::vector<int> membership_batch(const Partition& partition, std::span<const Eigen::VectorXd> xs,
                                  Exec exec = Exec::Parallel);

std::vector<IETTrace> simulate_batch_serial(const Partition& partition,
                                            std::span<const Eigen::MatrixXd> gs,
                                            std::span<const Eigen::VectorXd> x0s, int events,
                                            const Tolerances& tol = {});
std::vector<IETTrace> simulate_batch_parallel(const Partition& partition,
                                              std::span<const Eigen::MatrixXd> gs,
                                              std::span<const Eigen::VectorXd> x0s, int events,
                                              const Tolerances& tol = {});
std::vector<IETTrace> simulate_batch(const Partition& partition,
                                     std::span<const Eigen::MatrixXd> gs,
                                     std::span<const Eigen::VectorXd> x0s, int events,
                                     const Tolerances& tol = {}, Exec exec = Exec::Parallel);

/// Upper bound on worker threads for the parallel kernels (0 = runtime default).
void set_max_threads(int threads);

}  // namespace rbstc
