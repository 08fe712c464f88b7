#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rbstc/kernels.hpp"
#include "rbstc/system.hpp"

using namespace rbstc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

LinearSystem example1() {
  MatrixXd a(3, 3), b(3, 1), k(1, 3);
  a << 0, 1, 0, 0, 0, 1, -6, 7, 0;
  b << 0, 0, 1;
  k << 0, -18, -6;
  return {a, b, k};
}

class Threads : public ::testing::Test {
 protected:
  void SetUp() override { set_max_threads(4); }
  void TearDown() override { set_max_threads(0); }
};

}  // namespace

TEST_F(Threads, TauFieldSerialEqualsParallel) {
  auto trig = make_relative_trigger(example1(), 0.12853866, 0.6);
  auto xs = unit_sphere_samples(3, 500, 41);
  auto a = tau_e_field_serial(trig, xs);
  auto b = tau_e_field_parallel(trig, xs);
  EXPECT_EQ(a, b);
  for (size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(a[i], trig.tau_e(xs[i]));
}

TEST_F(Threads, MembershipSerialEqualsParallel) {
  auto centers = unit_sphere_samples(4, 30, 42);
  std::vector<double> taus;
  for (int i = 0; i < 30; ++i) taus.push_back(0.01 * (i + 1));
  auto p = build_cone_partition(centers, taus);
  auto xs = unit_sphere_samples(4, 5000, 43);
  EXPECT_EQ(membership_batch_serial(p, xs), membership_batch_parallel(p, xs));
}

TEST_F(Threads, SimulationSerialEqualsParallel) {
  std::mt19937_64 rng(44);
  auto centers = unit_sphere_samples(3, 6, 45);
  auto p = build_cone_partition(centers, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
  std::vector<MatrixXd> gs;
  for (int i = 0; i < 6; ++i) gs.push_back(oracle::random_matrix(3, rng));
  auto x0 = unit_sphere_samples(3, 64, 46);
  auto a = simulate_batch_serial(p, gs, x0, 150);
  auto b = simulate_batch_parallel(p, gs, x0, 150);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].regions, b[i].regions);
    EXPECT_EQ(a[i].log_norms, b[i].log_norms);
    for (int k = 0; k < a[i].size(); ++k) ASSERT_EQ(a[i].states[k], b[i].states[k]);
  }
}

TEST_F(Threads, ParallelPropagatesErrors) {
  auto p = build_cone_partition({VectorXd::Unit(2, 0)}, {0.1});
  MatrixXd g(2, 2);
  g << 1, -1, 1, -1;
  std::vector<MatrixXd> gs{g};
  std::vector<VectorXd> x0(16, VectorXd::Unit(2, 1));
  x0[9] = VectorXd::Ones(2);
  EXPECT_ANY_THROW(simulate_batch_parallel(p, gs, x0, 5));
  EXPECT_ANY_THROW(simulate_batch_serial(p, gs, x0, 5));
}
