#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "voxbend/harness.hpp"
#include "voxbend/hyperneat.hpp"
#include "voxbend/neat.hpp"

namespace voxbend {

enum class Algo : std::uint8_t { kAfpo = 0, kNeat, kHyperneat };

const char* algo_name(Algo algo);
bool algo_from_name(const std::string& name, Algo& out);

struct EvolveConfig {
  Algo algo = Algo::kAfpo;
  std::uint64_t master_seed = 1;
  int controllers = 25;
  GridDims dims{20, 8, 8};
  NeatConfig neat;  // population size, generations and mutation rates for every engine
  MaterialProperties props;
  SimConfig sim;
  MorphogenConfig morphogen;
  int substrate_hidden_layers = 2;
  int substrate_width = 5;
  std::string out_dir;
  std::string run_id;  // defaults to "<algo>-s<seed>"
  int workers = 1;
  int checkpoint_every = 1;  // generations between checkpoint rewrites
  bool desk_scale = false;   // swap in the unit-scale physics profile

  bool valid(std::string* why = nullptr) const;
};

std::string evolve_config_to_json(const EvolveConfig& cfg);
bool evolve_config_from_json(const std::string& text, EvolveConfig& out,
                             std::string* error = nullptr);

// Genome arity per algorithm: direct encodings query (x,y,z) -> (v,m); the
// HyperNEAT CPPN queries coordinate pairs (x_m,y_m,x_h,y_h) -> weight.
int genome_inputs(Algo algo);
int genome_outputs(Algo algo);

// Genome -> morphology for the configured algorithm (direct CPPN sampling or
// substrate painting + sampling).
std::function<VoxelGrid(const Genome&)> make_decoder(const EvolveConfig& cfg);

struct EvolveResult {
  Genome best_genome;
  double best_aptitude = 0.0;
  VoxelGrid best_morphology;
  std::vector<GenerationStats> stats;
};

// Full run: writes manifest.json, generations.csv, results.csv,
// controllers.csv, controller_hash.csv, checkpoint.txt and the best-of-run
// genome/morphology (plus best_substrate.txt under hyperneat) into
// cfg.out_dir. Deterministic per master seed for any worker count.
bool run_evolution(const EvolveConfig& cfg, EvolveResult& out, std::string* error = nullptr,
                   const SimulateFn& sim = default_simulate());

// Continues a checkpointed run in-place up to `generations` total, appending
// rows the uninterrupted run would have produced.
bool resume_evolution(const std::string& out_dir, int generations, EvolveResult& out,
                      std::string* error = nullptr, const SimulateFn& sim = default_simulate());

// Mean aptitude of n freshly sampled random genomes under the given frozen
// controllers — the no-evolution baseline.
double random_genome_baseline(const EvolveConfig& cfg, int n,
                              const std::vector<PhaseController>& controllers,
                              const SimulateFn& sim);

}  // namespace voxbend
