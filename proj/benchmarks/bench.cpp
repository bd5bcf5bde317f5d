#include <benchmark/benchmark.h>

#include "nfs/scattering.hpp"

namespace {

using namespace nfs;

struct Fixture {
  NuclearConstants consts;
  Geometry geom;
  LevelScheme scheme = build_level_scheme(calibrated_config());
  SampleConfig sample;
};

void BM_solve_series(benchmark::State& state) {
  Fixture f;
  SwitchSequence seq;
  seq.events = {{8e-9, beam_parallel_rotation()},
                {46.9196e-9, back_to_z_rotation()},
                {95.552e-9, beam_parallel_rotation()},
                {137.68e-9, back_to_z_rotation()}};
  TimeGrid grid;
  const int max_order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto rec = solve_series(f.sample, seq, f.scheme, f.geom, f.consts, grid,
                            max_order, 1e-8);
    benchmark::DoNotOptimize(rec.E_sigma);
  }
}
BENCHMARK(BM_solve_series)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_apply_switch(benchmark::State& state) {
  Fixture f;
  auto amps = initial_amplitudes(f.geom, f.scheme, f.sample, f.consts);
  const SwitchingEvent ev{8e-9, beam_parallel_rotation()};
  for (auto _ : state) {
    auto out = apply_switch(amps, ev, f.scheme);
    benchmark::DoNotOptimize(out.pairs);
  }
}
BENCHMARK(BM_apply_switch);

void BM_design_release(benchmark::State& state) {
  Fixture f;
  auto amps = initial_amplitudes(f.geom, f.scheme, f.sample, f.consts);
  auto s1 = apply_switch(amps, {8e-9, beam_parallel_rotation()}, f.scheme);
  for (auto _ : state) {
    auto c = design_release_time(s1, ReleaseTarget::pi_only, {8e-9, 100e-9},
                                 f.scheme, f.geom, f.consts);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_design_release)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
