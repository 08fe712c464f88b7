// Serial reference vs OpenMP kernels on Example 1 and a random cone partition.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "rbstc/config.hpp"
#include "rbstc/kernels.hpp"

using namespace rbstc;

namespace {

const Model& example1() {
  static const Model m = build_model(load_config(RBSTC_SOURCE_DIR "/configs/example1.json"));
  return m;
}

const Model& example2() {
  static const Model m = build_model(load_config(RBSTC_SOURCE_DIR "/configs/example2.json"));
  return m;
}

std::vector<Eigen::VectorXd> points(int n, int count) { return unit_sphere_samples(n, count, 11); }

void TauField(benchmark::State& st, Exec exec) {
  const auto& m = example1();
  auto xs = points(3, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(tau_e_field(*m.trigger, xs, exec));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void Membership(benchmark::State& st, Exec exec) {
  const auto& m = example2();
  auto xs = points(5, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(membership_batch(m.part(), xs, exec));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void Simulate(benchmark::State& st, Exec exec) {
  const auto& m = example2();
  auto xs = points(5, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(simulate_batch(m.part(), m.gs, xs, 400, {}, exec));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(TauField, serial, Exec::Serial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(TauField, parallel, Exec::Parallel)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(Membership, serial, Exec::Serial)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(Membership, parallel, Exec::Parallel)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(Simulate, serial, Exec::Serial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(Simulate, parallel, Exec::Parallel)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
