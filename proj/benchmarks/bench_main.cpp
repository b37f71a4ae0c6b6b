#include <benchmark/benchmark.h>

#include "sspkit/sspkit.hpp"

using namespace sspkit;

namespace {

MechanismTable fixture(std::size_t agents, std::size_t points) {
  return envelope_payments(PayoffModel::product(),
                           make_random_monotone(agents, TypeGrid::uniform(points), 1234, true));
}

// range(0) = agents, range(1) = grid points
void BM_CheckStrictSP(benchmark::State& state) {
  const auto mech = fixture(state.range(0), state.range(1));
  const auto model = PayoffModel::product();
  VerifyOptions opts;
  opts.threads = static_cast<unsigned>(state.range(2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_strict_sp(model, mech, opts));
  }
  const double devs = double(mech.profile_count()) * double(mech.agents()) *
                      double(mech.grid().size() - 1);
  state.counters["deviations/s"] = benchmark::Counter(devs, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_CheckStrictSP)
    ->Args({2, 9, 1})
    ->Args({2, 33, 1})
    ->Args({3, 17, 1})
    ->Args({3, 17, 4})
    ->Args({4, 9, 4})
    ->Unit(benchmark::kMicrosecond);

void BM_EnvelopePayments(benchmark::State& state) {
  const auto mech = fixture(state.range(0), state.range(1));
  const auto model = PayoffModel::power(1.7);
  const auto interp = state.range(2) ? Interpolation::Linear : Interpolation::LeftStep;
  for (auto _ : state) {
    benchmark::DoNotOptimize(envelope_payments(model, mech, std::nullopt, interp));
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(mech.profile_count()));
}
BENCHMARK(BM_EnvelopePayments)->Args({2, 33, 0})->Args({2, 33, 1})->Args({3, 17, 1})->Unit(benchmark::kMicrosecond);

void BM_Strictify(benchmark::State& state) {
  const auto mech = make_second_price(state.range(0), TypeGrid::uniform(state.range(1)));
  const auto model = PayoffModel::product();
  for (auto _ : state) {
    benchmark::DoNotOptimize(strictify(model, mech, 0.01));
  }
}
BENCHMARK(BM_Strictify)->Args({2, 3})->Args({2, 17})->Args({3, 9})->Unit(benchmark::kMillisecond);

void BM_AdaptiveSimpsonStep(benchmark::State& state) {
  auto step = [](double x) { return x < 0.7071 ? 0.25 : 1.0; };
  for (auto _ : state) {
    benchmark::DoNotOptimize(adaptive_simpson(step, 0.0, 1.0));
  }
}
BENCHMARK(BM_AdaptiveSimpsonStep);

}  // namespace

BENCHMARK_MAIN();
