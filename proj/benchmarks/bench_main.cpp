// Microbenchmarks for the hot paths: network evaluation, substrate painting,
// morphology generation and lattice integration.
#include <benchmark/benchmark.h>

#include "voxbend/evolve.hpp"

using namespace voxbend;

namespace {

Genome random_cppn(int inputs, int outputs, std::uint64_t seed) {
  Rng rng = make_stream(seed, "init");
  Genome g = random_genome(inputs, outputs, -1.0, 1.0, rng);
  InnovationLedger ledger((inputs + 1) * outputs, inputs + outputs + 1);
  NeatConfig cfg;
  for (int i = 0; i < 12; ++i) g = mutate(g, cfg, ledger, rng);
  return g;
}

void cppn_activate(benchmark::State& state) {
  Genome g = random_cppn(3, 2, 7);
  CppnEvaluator eval(g);
  double t = -1.0;
  for (auto _ : state) {
    auto out = eval.evaluate({t, 0.5, -0.5});
    benchmark::DoNotOptimize(out);
    t += 1e-3;
    if (t > 1.0) t = -1.0;
  }
}
BENCHMARK(cppn_activate);

void substrate_build(benchmark::State& state) {
  Genome g = random_cppn(4, 1, 11);
  SubstrateSpec spec = SubstrateSpec::make_default(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) {
    SubstrateNetwork net = build_network(g, spec);
    benchmark::DoNotOptimize(net);
  }
}
BENCHMARK(substrate_build)->Arg(1)->Arg(3)->Arg(5);

void morphology_generate(benchmark::State& state) {
  Genome g = random_cppn(3, 2, 13);
  GridDims dims{20, 8, 8};
  MorphogenConfig cfg;
  for (auto _ : state) {
    VoxelGrid grid = generate_from_cppn(g, dims, cfg);
    benchmark::DoNotOptimize(grid);
  }
}
BENCHMARK(morphology_generate);

void lattice_step(benchmark::State& state) {
  GridDims dims{static_cast<int>(state.range(0)), 4, 4};
  VoxelGrid grid(dims);
  for (int x = 0; x < dims.x; ++x)
    for (int y = 0; y < dims.y; ++y)
      for (int z = 0; z < dims.z; ++z)
        grid.set(x, y, z, grid.is_enclosure(x, y, z) ? Material::kPassive
                                                     : Material::kContractile);
  MaterialProperties props;
  SimConfig cfg;
  apply_desk_scale(props, cfg);
  LatticeState lattice;
  std::string error;
  if (!build_lattice(grid, props, cfg, lattice, &error)) {
    state.SkipWithError(error.c_str());
    return;
  }
  std::vector<double> phases(lattice.contractile_count, 1.0);
  double dt = stable_timestep(lattice);
  double t = 0.0;
  for (auto _ : state) {
    step(lattice, t, phases, props, cfg, dt);
    t += dt;
  }
}
BENCHMARK(lattice_step)->Arg(6)->Arg(10)->Arg(20);

void aptitude_eval(benchmark::State& state) {
  Genome g = random_cppn(3, 2, 17);
  GridDims dims{6, 4, 4};
  VoxelGrid grid = generate_from_cppn(g, dims, MorphogenConfig{});
  MaterialProperties props;
  SimConfig cfg;
  apply_desk_scale(props, cfg);
  cfg.duration = 0.5;
  Rng rng = make_stream(23, "controllers");
  auto controllers = sample_controllers(5, (dims.x - 2) * (dims.y - 2) * (dims.z - 2), rng);
  SimulateFn sim = default_simulate();
  for (auto _ : state) {
    double a = aptitude(grid, controllers, props, cfg, sim, 1);
    benchmark::DoNotOptimize(a);
  }
}
BENCHMARK(aptitude_eval);

}  // namespace

BENCHMARK_MAIN();
