#include "voxbend/evolve.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "voxbend/afpo.hpp"
#include "voxbend/csv.hpp"
#include "voxbend/parallel.hpp"

namespace voxbend {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kGenerationsHeader =
    "generation,best_fitness,mean_fitness,species_count,activation_entropy,best_so_far\n";
constexpr const char* kResultsHeader =
    "run_id,generation,individual,aptitude,voxel_count,contractile_count,wall_ms\n";
constexpr const char* kControllersHeader = "controller,slot,phase\n";
constexpr const char* kHashHeader = "generation,controller_hash\n";

const char* constraint_name(MotionConstraint c) {
  return c == MotionConstraint::kYzPlane ? "yz-plane" : "none";
}

bool constraint_from_name(const std::string& name, MotionConstraint& out) {
  if (name == "none") {
    out = MotionConstraint::kNone;
    return true;
  }
  if (name == "yz-plane") {
    out = MotionConstraint::kYzPlane;
    return true;
  }
  return false;
}

template <class T>
void read_field(const json& j, const char* key, T& slot) {
  if (j.contains(key)) j.at(key).get_to(slot);
}

// Everything one run needs at evaluation time, shared by the engine batch
// callbacks and the per-generation logging.
struct RunContext {
  EvolveConfig cfg;  // generations/out_dir resolved; physics NOT yet desk-scaled
  MaterialProperties props;
  SimConfig sim_cfg;
  std::vector<PhaseController> controllers;
  std::uint64_t controller_hash = 0;
  SimulateFn sim;
  std::function<VoxelGrid(const Genome&)> decode;

  fs::path dir;
  std::string run_id;

  std::atomic<long long> eval_us{0};  // wall time spent in fitness evaluations
  std::atomic<long long> eval_count{0};

  BatchEvalFn batch() {
    return [this](const std::vector<const Genome*>& genomes) {
      std::vector<double> fit(genomes.size(), 0.0);
      parallel_for(genomes.size(), cfg.workers, [&](std::size_t i) {
        auto t0 = std::chrono::steady_clock::now();
        VoxelGrid grid = decode(*genomes[i]);
        fit[i] = aptitude(grid, controllers, props, sim_cfg, sim, 1);
        auto dt = std::chrono::steady_clock::now() - t0;
        eval_us += std::chrono::duration_cast<std::chrono::microseconds>(dt).count();
      });
      eval_count += static_cast<long long>(genomes.size());
      return fit;
    };
  }

  long long take_mean_eval_ms() {
    long long us = eval_us.exchange(0);
    long long n = eval_count.exchange(0);
    return n > 0 ? us / n / 1000 : 0;
  }
};

bool append_or_fail(const fs::path& path, const std::string& text, std::string* error) {
  return append_text_file(path.string(), text, error);
}

// Uniform member access over the two engine population layouts.
std::size_t member_count(const NeatEngine& e) { return e.population().size(); }
const Genome& member_genome(const NeatEngine& e, std::size_t i) { return e.population()[i]; }
double member_fitness(const NeatEngine& e, std::size_t i) { return e.fitness()[i]; }
double engine_best(const NeatEngine& e) { return e.best_fitness_so_far(); }

std::size_t member_count(const AfpoEngine& e) { return e.population().size(); }
const Genome& member_genome(const AfpoEngine& e, std::size_t i) {
  return e.population()[i].genome;
}
double member_fitness(const AfpoEngine& e, std::size_t i) { return e.population()[i].aptitude; }
double engine_best(const AfpoEngine& e) { return e.best_aptitude_so_far(); }

template <class Engine>
bool write_checkpoint(const Engine& engine, const RunContext& ctx, std::string* error) {
  std::string text = "evolve 1\nalgo " + std::string(algo_name(ctx.cfg.algo)) + "\n" +
                     engine.checkpoint_text();
  return write_text_file((ctx.dir / "checkpoint.txt").string(), text, error);
}

template <class Engine>
bool log_generation(Engine& engine, RunContext& ctx, EvolveResult& out, std::string* error) {
  engine.evaluate_current();
  GenerationStats st = engine.stats();
  out.stats.push_back(st);

  std::string row = std::to_string(st.generation) + "," + format_double(st.best_fitness) + "," +
                    format_double(st.mean_fitness) + "," + std::to_string(st.species_count) +
                    "," + format_double(st.activation_entropy) + "," +
                    format_double(st.best_so_far) + "\n";
  if (!append_or_fail(ctx.dir / "generations.csv", row, error)) return false;

  long long wall_ms = ctx.take_mean_eval_ms();
  std::string rows;
  for (std::size_t i = 0; i < member_count(engine); ++i) {
    VoxelGrid grid = ctx.decode(member_genome(engine, i));
    VoxelCounts counts = count_voxels(grid);
    rows += ctx.run_id + "," + std::to_string(st.generation) + "," + std::to_string(i) + "," +
            format_double(member_fitness(engine, i)) + "," + std::to_string(counts.total) +
            "," + std::to_string(counts.contractile) + "," + std::to_string(wall_ms) + "\n";
  }
  if (!append_or_fail(ctx.dir / "results.csv", rows, error)) return false;

  std::string hash_row =
      std::to_string(st.generation) + "," + std::to_string(ctx.controller_hash) + "\n";
  return append_or_fail(ctx.dir / "controller_hash.csv", hash_row, error);
}

template <class Engine>
bool finish_run(const Engine& engine, RunContext& ctx, EvolveResult& out, std::string* error) {
  if (!write_checkpoint(engine, ctx, error)) return false;

  out.best_genome = engine.best_genome_so_far();
  out.best_aptitude = engine_best(engine);
  out.best_morphology = ctx.decode(out.best_genome);

  if (!write_text_file((ctx.dir / "best_genome.txt").string(), genome_to_text(out.best_genome),
                       error))
    return false;
  if (!write_text_file((ctx.dir / "best_morphology.txt").string(),
                       grid_to_text(out.best_morphology), error))
    return false;
  if (ctx.cfg.algo == Algo::kHyperneat) {
    SubstrateSpec spec = SubstrateSpec::make_default(ctx.cfg.substrate_hidden_layers,
                                                     ctx.cfg.substrate_width);
    SubstrateNetwork net = build_network(out.best_genome, spec);
    if (!write_text_file((ctx.dir / "best_substrate.txt").string(), substrate_to_text(net),
                         error))
      return false;
  }
  return true;
}

// Logs the current (restored or freshly evaluated) generation when asked,
// then advances/logs until engine.generation() reaches generations-1.
template <class Engine>
bool drive(Engine& engine, RunContext& ctx, bool log_current, EvolveResult& out,
           std::string* error) {
  int total = ctx.cfg.neat.generations;
  if (log_current) {
    if (!log_generation(engine, ctx, out, error)) return false;
    if (engine.generation() % ctx.cfg.checkpoint_every == 0 &&
        !write_checkpoint(engine, ctx, error))
      return false;
  }
  while (engine.generation() + 1 < total) {
    engine.advance();
    if (!log_generation(engine, ctx, out, error)) return false;
    if (engine.generation() % ctx.cfg.checkpoint_every == 0 &&
        !write_checkpoint(engine, ctx, error))
      return false;
  }
  return finish_run(engine, ctx, out, error);
}

bool make_context(const EvolveConfig& cfg, const SimulateFn& sim, RunContext& ctx,
                  std::string* error) {
  std::string why;
  if (!cfg.valid(&why)) {
    if (error) *error = "invalid config: " + why;
    return false;
  }
  ctx.cfg = cfg;
  ctx.run_id = cfg.run_id.empty()
                   ? std::string(algo_name(cfg.algo)) + "-s" + std::to_string(cfg.master_seed)
                   : cfg.run_id;
  ctx.cfg.run_id = ctx.run_id;
  ctx.props = cfg.props;
  ctx.sim_cfg = cfg.sim;
  if (cfg.desk_scale) apply_desk_scale(ctx.props, ctx.sim_cfg);
  ctx.sim = sim;
  ctx.decode = make_decoder(cfg);
  ctx.dir = fs::path(cfg.out_dir);

  int budget = (cfg.dims.x - 2) * (cfg.dims.y - 2) * (cfg.dims.z - 2);
  Rng controller_rng = make_stream(cfg.master_seed, "controllers");
  ctx.controllers = sample_controllers(cfg.controllers, budget, controller_rng);
  ctx.controller_hash = controller_set_hash(ctx.controllers);
  return true;
}

}  // namespace

const char* algo_name(Algo algo) {
  switch (algo) {
    case Algo::kNeat:
      return "neat";
    case Algo::kHyperneat:
      return "hyperneat";
    case Algo::kAfpo:
    default:
      return "afpo";
  }
}

bool algo_from_name(const std::string& name, Algo& out) {
  if (name == "afpo") {
    out = Algo::kAfpo;
    return true;
  }
  if (name == "neat") {
    out = Algo::kNeat;
    return true;
  }
  if (name == "hyperneat") {
    out = Algo::kHyperneat;
    return true;
  }
  return false;
}

int genome_inputs(Algo algo) { return algo == Algo::kHyperneat ? 4 : 3; }
int genome_outputs(Algo algo) { return algo == Algo::kHyperneat ? 1 : 2; }

bool EvolveConfig::valid(std::string* why) const {
  auto fail = [&](const char* what) {
    if (why) *why = what;
    return false;
  };
  if (out_dir.empty()) return fail("out_dir must be set");
  if (controllers < 1) return fail("controllers must be positive");
  if (dims.x < 3 || dims.y < 3 || dims.z < 3)
    return fail("every grid dimension needs an interior (>= 3)");
  if (substrate_hidden_layers < 1) return fail("substrate_hidden_layers must be positive");
  if (substrate_width < 1) return fail("substrate_width must be positive");
  if (workers < 1) return fail("workers must be positive");
  if (checkpoint_every < 1) return fail("checkpoint_every must be positive");
  if (!(sim.duration > 0.0)) return fail("sim duration must be positive");
  if (!(sim.voxel_edge > 0.0)) return fail("voxel_edge must be positive");
  if (!neat.valid(why)) return false;
  if (!props.valid(why)) return false;
  return true;
}

std::string evolve_config_to_json(const EvolveConfig& cfg) {
  json j;
  j["algo"] = algo_name(cfg.algo);
  j["master_seed"] = cfg.master_seed;
  j["controllers"] = cfg.controllers;
  j["dims"] = {cfg.dims.x, cfg.dims.y, cfg.dims.z};
  j["substrate_hidden_layers"] = cfg.substrate_hidden_layers;
  j["substrate_width"] = cfg.substrate_width;
  j["out_dir"] = cfg.out_dir;
  j["run_id"] = cfg.run_id;
  j["workers"] = cfg.workers;
  j["checkpoint_every"] = cfg.checkpoint_every;
  j["desk_scale"] = cfg.desk_scale;

  json& n = j["neat"];
  n["population_size"] = cfg.neat.population_size;
  n["generations"] = cfg.neat.generations;
  n["compat_threshold"] = cfg.neat.compat_threshold;
  n["c_excess"] = cfg.neat.c_excess;
  n["c_disjoint"] = cfg.neat.c_disjoint;
  n["c_weight"] = cfg.neat.c_weight;
  n["small_genome_limit"] = cfg.neat.small_genome_limit;
  n["max_stagnation"] = cfg.neat.max_stagnation;
  n["survival_threshold"] = cfg.neat.survival_threshold;
  n["champion_min_species_size"] = cfg.neat.champion_min_species_size;
  n["activation_mutate_rate"] = cfg.neat.activation_mutate_rate;
  n["add_connection_rate"] = cfg.neat.add_connection_rate;
  n["delete_connection_rate"] = cfg.neat.delete_connection_rate;
  n["toggle_connection_rate"] = cfg.neat.toggle_connection_rate;
  n["add_node_rate"] = cfg.neat.add_node_rate;
  n["delete_node_rate"] = cfg.neat.delete_node_rate;
  n["weight_jitter_rate"] = cfg.neat.weight_jitter_rate;
  n["weight_replace_rate"] = cfg.neat.weight_replace_rate;
  n["weight_jitter_sigma"] = cfg.neat.weight_jitter_sigma;
  n["weight_init_min"] = cfg.neat.weight_init_min;
  n["weight_init_max"] = cfg.neat.weight_init_max;
  n["crossover_keep_disabled"] = cfg.neat.crossover_keep_disabled;
  n["mutation_retry_limit"] = cfg.neat.mutation_retry_limit;

  json& p = j["material"];
  p["youngs_modulus"] = cfg.props.youngs_modulus;
  p["poissons_ratio"] = cfg.props.poissons_ratio;
  p["static_friction"] = cfg.props.static_friction;
  p["dynamic_friction"] = cfg.props.dynamic_friction;
  p["density"] = cfg.props.density;
  p["actuation_amplitude"] = cfg.props.actuation_amplitude;
  p["actuation_frequency"] = cfg.props.actuation_frequency;

  json& s = j["sim"];
  s["voxel_edge"] = cfg.sim.voxel_edge;
  s["duration"] = cfg.sim.duration;
  s["timestep"] = cfg.sim.timestep;
  s["damping_ratio"] = cfg.sim.damping_ratio;
  s["gravity"] = cfg.sim.gravity;
  s["fix_end"] = cfg.sim.fix_end;
  s["constraint"] = constraint_name(cfg.sim.constraint);
  s["record_trajectory"] = cfg.sim.record_trajectory;
  s["trajectory_sample_dt"] = cfg.sim.trajectory_sample_dt;

  json& m = j["morphogen"];
  m["prune_floating"] = cfg.morphogen.prune_floating;
  m["forbid_interior_passive"] = cfg.morphogen.forbid_interior_passive;

  return j.dump(2) + "\n";
}

bool evolve_config_from_json(const std::string& text, EvolveConfig& out, std::string* error) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    if (error) *error = "config is not valid JSON";
    return false;
  }
  out = EvolveConfig{};
  try {
    if (j.contains("algo")) {
      std::string name = j.at("algo").get<std::string>();
      if (!algo_from_name(name, out.algo)) {
        if (error) *error = "unknown algo \"" + name + "\"";
        return false;
      }
    }
    read_field(j, "master_seed", out.master_seed);
    read_field(j, "controllers", out.controllers);
    if (j.contains("dims")) {
      const json& d = j.at("dims");
      if (!d.is_array() || d.size() != 3) {
        if (error) *error = "dims must be a [x, y, z] array";
        return false;
      }
      out.dims = {d[0].get<int>(), d[1].get<int>(), d[2].get<int>()};
    }
    read_field(j, "substrate_hidden_layers", out.substrate_hidden_layers);
    read_field(j, "substrate_width", out.substrate_width);
    read_field(j, "out_dir", out.out_dir);
    read_field(j, "run_id", out.run_id);
    read_field(j, "workers", out.workers);
    read_field(j, "checkpoint_every", out.checkpoint_every);
    read_field(j, "desk_scale", out.desk_scale);

    if (j.contains("neat")) {
      const json& n = j.at("neat");
      read_field(n, "population_size", out.neat.population_size);
      read_field(n, "generations", out.neat.generations);
      read_field(n, "compat_threshold", out.neat.compat_threshold);
      read_field(n, "c_excess", out.neat.c_excess);
      read_field(n, "c_disjoint", out.neat.c_disjoint);
      read_field(n, "c_weight", out.neat.c_weight);
      read_field(n, "small_genome_limit", out.neat.small_genome_limit);
      read_field(n, "max_stagnation", out.neat.max_stagnation);
      read_field(n, "survival_threshold", out.neat.survival_threshold);
      read_field(n, "champion_min_species_size", out.neat.champion_min_species_size);
      read_field(n, "activation_mutate_rate", out.neat.activation_mutate_rate);
      read_field(n, "add_connection_rate", out.neat.add_connection_rate);
      read_field(n, "delete_connection_rate", out.neat.delete_connection_rate);
      read_field(n, "toggle_connection_rate", out.neat.toggle_connection_rate);
      read_field(n, "add_node_rate", out.neat.add_node_rate);
      read_field(n, "delete_node_rate", out.neat.delete_node_rate);
      read_field(n, "weight_jitter_rate", out.neat.weight_jitter_rate);
      read_field(n, "weight_replace_rate", out.neat.weight_replace_rate);
      read_field(n, "weight_jitter_sigma", out.neat.weight_jitter_sigma);
      read_field(n, "weight_init_min", out.neat.weight_init_min);
      read_field(n, "weight_init_max", out.neat.weight_init_max);
      read_field(n, "crossover_keep_disabled", out.neat.crossover_keep_disabled);
      read_field(n, "mutation_retry_limit", out.neat.mutation_retry_limit);
    }
    if (j.contains("material")) {
      const json& p = j.at("material");
      read_field(p, "youngs_modulus", out.props.youngs_modulus);
      read_field(p, "poissons_ratio", out.props.poissons_ratio);
      read_field(p, "static_friction", out.props.static_friction);
      read_field(p, "dynamic_friction", out.props.dynamic_friction);
      read_field(p, "density", out.props.density);
      read_field(p, "actuation_amplitude", out.props.actuation_amplitude);
      read_field(p, "actuation_frequency", out.props.actuation_frequency);
    }
    if (j.contains("sim")) {
      const json& s = j.at("sim");
      read_field(s, "voxel_edge", out.sim.voxel_edge);
      read_field(s, "duration", out.sim.duration);
      read_field(s, "timestep", out.sim.timestep);
      read_field(s, "damping_ratio", out.sim.damping_ratio);
      read_field(s, "gravity", out.sim.gravity);
      read_field(s, "fix_end", out.sim.fix_end);
      if (s.contains("constraint")) {
        std::string name = s.at("constraint").get<std::string>();
        if (!constraint_from_name(name, out.sim.constraint)) {
          if (error) *error = "unknown constraint \"" + name + "\"";
          return false;
        }
      }
      read_field(s, "record_trajectory", out.sim.record_trajectory);
      read_field(s, "trajectory_sample_dt", out.sim.trajectory_sample_dt);
    }
    if (j.contains("morphogen")) {
      const json& m = j.at("morphogen");
      read_field(m, "prune_floating", out.morphogen.prune_floating);
      read_field(m, "forbid_interior_passive", out.morphogen.forbid_interior_passive);
    }
  } catch (const json::exception& e) {
    if (error) *error = e.what();
    return false;
  }
  return true;
}

std::function<VoxelGrid(const Genome&)> make_decoder(const EvolveConfig& cfg) {
  GridDims dims = cfg.dims;
  MorphogenConfig morph = cfg.morphogen;
  if (cfg.algo == Algo::kHyperneat) {
    SubstrateSpec spec =
        SubstrateSpec::make_default(cfg.substrate_hidden_layers, cfg.substrate_width);
    return [spec, dims, morph](const Genome& genome) {
      return generate_from_substrate(build_network(genome, spec), dims, morph);
    };
  }
  return [dims, morph](const Genome& genome) {
    return generate_from_cppn(genome, dims, morph);
  };
}

bool run_evolution(const EvolveConfig& cfg, EvolveResult& out, std::string* error,
                   const SimulateFn& sim) {
  RunContext ctx;
  if (!make_context(cfg, sim, ctx, error)) return false;
  out = EvolveResult{};

  std::error_code ec;
  fs::create_directories(ctx.dir, ec);
  if (ec) {
    if (error) *error = "cannot create " + ctx.dir.string() + ": " + ec.message();
    return false;
  }

  if (!write_text_file((ctx.dir / "manifest.json").string(), evolve_config_to_json(ctx.cfg),
                       error))
    return false;

  std::string controller_rows = kControllersHeader;
  for (const auto& ctl : ctx.controllers)
    for (std::size_t slot = 0; slot < ctl.phases.size(); ++slot)
      controller_rows += std::to_string(ctl.id) + "," + std::to_string(slot) + "," +
                         format_double(ctl.phases[slot]) + "\n";
  if (!write_text_file((ctx.dir / "controllers.csv").string(), controller_rows, error))
    return false;

  if (!write_text_file((ctx.dir / "generations.csv").string(), kGenerationsHeader, error) ||
      !write_text_file((ctx.dir / "results.csv").string(), kResultsHeader, error) ||
      !write_text_file((ctx.dir / "controller_hash.csv").string(), kHashHeader, error))
    return false;

  int n_in = genome_inputs(cfg.algo);
  int n_out = genome_outputs(cfg.algo);
  if (cfg.algo == Algo::kAfpo) {
    AfpoEngine engine(cfg.neat, n_in, n_out, ctx.batch(), cfg.master_seed);
    return drive(engine, ctx, true, out, error);
  }
  NeatEngine engine(cfg.neat, n_in, n_out, ctx.batch(), cfg.master_seed);
  return drive(engine, ctx, true, out, error);
}

bool resume_evolution(const std::string& out_dir, int generations, EvolveResult& out,
                      std::string* error, const SimulateFn& sim) {
  std::string manifest;
  if (!read_text_file((fs::path(out_dir) / "manifest.json").string(), manifest, error))
    return false;
  EvolveConfig cfg;
  if (!evolve_config_from_json(manifest, cfg, error)) return false;
  cfg.out_dir = out_dir;
  cfg.neat.generations = generations;

  std::string checkpoint;
  if (!read_text_file((fs::path(out_dir) / "checkpoint.txt").string(), checkpoint, error))
    return false;
  std::size_t first_nl = checkpoint.find('\n');
  std::size_t second_nl = first_nl == std::string::npos ? std::string::npos
                                                        : checkpoint.find('\n', first_nl + 1);
  if (second_nl == std::string::npos ||
      checkpoint.substr(0, first_nl) != "evolve 1" ||
      checkpoint.substr(first_nl + 1, second_nl - first_nl - 1) !=
          "algo " + std::string(algo_name(cfg.algo))) {
    if (error) *error = "checkpoint does not match the manifest";
    return false;
  }
  std::string engine_text = checkpoint.substr(second_nl + 1);

  RunContext ctx;
  if (!make_context(cfg, sim, ctx, error)) return false;
  out = EvolveResult{};

  int n_in = genome_inputs(cfg.algo);
  int n_out = genome_outputs(cfg.algo);
  if (cfg.algo == Algo::kAfpo) {
    AfpoEngine engine(cfg.neat, n_in, n_out, ctx.batch(), cfg.master_seed);
    if (!AfpoEngine::restore(engine_text, cfg.neat, ctx.batch(), engine, error)) return false;
    return drive(engine, ctx, false, out, error);
  }
  NeatEngine engine(cfg.neat, n_in, n_out, ctx.batch(), cfg.master_seed);
  if (!NeatEngine::restore(engine_text, cfg.neat, ctx.batch(), engine, error)) return false;
  return drive(engine, ctx, false, out, error);
}

double random_genome_baseline(const EvolveConfig& cfg, int n,
                              const std::vector<PhaseController>& controllers,
                              const SimulateFn& sim) {
  if (n <= 0) return 0.0;
  MaterialProperties props = cfg.props;
  SimConfig sim_cfg = cfg.sim;
  if (cfg.desk_scale) apply_desk_scale(props, sim_cfg);
  auto decode = make_decoder(cfg);
  Rng rng = make_stream(cfg.master_seed, "baseline");
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    Genome genome = random_genome(genome_inputs(cfg.algo), genome_outputs(cfg.algo),
                                  cfg.neat.weight_init_min, cfg.neat.weight_init_max, rng);
    sum += aptitude(decode(genome), controllers, props, sim_cfg, sim, cfg.workers);
  }
  return sum / static_cast<double>(n);
}

}  // namespace voxbend
