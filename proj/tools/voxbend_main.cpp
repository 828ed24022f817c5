// Command-line workbench: evolve voxel actuators, probe robustness, sweep
// materials, ablate slices, and export morphologies.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "voxbend/csv.hpp"
#include "voxbend/evolve.hpp"

namespace fs = std::filesystem;
using namespace voxbend;

namespace {

int fail(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 1;
}

bool load_morphology(const std::string& path, VoxelGrid& grid, std::string& error) {
  return load_grid(path, grid, &error);
}

// Writes `<path>.manifest.json` describing the command that produced `path`.
bool write_sidecar_manifest(const std::string& path, const EvolveConfig& cfg,
                            const std::string& command, std::string* error) {
  std::string body = "{\n  \"command\": \"" + command + "\",\n  \"config\": ";
  std::string config = evolve_config_to_json(cfg);
  while (!config.empty() && (config.back() == '\n' || config.back() == ' ')) config.pop_back();
  body += config + "\n}\n";
  return write_text_file(path + ".manifest.json", body, error);
}

std::string summary_line(const RobustnessSummary& s) {
  return "mean=" + format_double(s.mean) + " min=" + format_double(s.min) +
         " max=" + format_double(s.max) + " median=" + format_double(s.median);
}

bool parse_range(const std::string& text, int& lo, int& hi) {
  auto sep = text.find("..");
  if (sep == std::string::npos) return false;
  try {
    lo = std::stoi(text.substr(0, sep));
    hi = std::stoi(text.substr(sep + 2));
  } catch (...) {
    return false;
  }
  return lo >= 1 && hi >= lo;
}

// Shared evolve-style flags, applied over an optional --config file.
struct EvolveFlags {
  std::string config_path;
  std::string algo = "afpo";
  std::uint64_t seed = 1;
  int pop = -1;
  int gens = -1;
  int controllers = -1;
  std::vector<int> dims;
  std::string out_dir;
  int workers = -1;
  int checkpoint_every = -1;
  bool desk_scale = false;
  int hidden_layers = -1;
  int width = -1;

  void attach(CLI::App* cmd, bool out_required) {
    cmd->add_option("--config", config_path, "JSON config file (flags override it)");
    cmd->add_option("--algo", algo, "afpo|neat|hyperneat")
        ->check(CLI::IsMember({"afpo", "neat", "hyperneat"}));
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--pop", pop, "population size");
    cmd->add_option("--gens", gens, "generations");
    cmd->add_option("--controllers", controllers, "frozen controllers per run");
    cmd->add_option("--dims", dims, "grid dims X,Y,Z")->delimiter(',')->expected(3);
    auto* out = cmd->add_option("--out", out_dir, "artifact directory");
    if (out_required) out->required();
    cmd->add_option("--workers", workers, "evaluation threads");
    cmd->add_option("--checkpoint-every", checkpoint_every, "generations between checkpoints");
    cmd->add_flag("--desk-scale", desk_scale, "unit-scale physics profile (fast)");
    cmd->add_option("--hidden-layers", hidden_layers, "substrate hidden layers (hyperneat)");
    cmd->add_option("--width", width, "substrate neurons per hidden layer (hyperneat)");
  }

  bool resolve(const CLI::App* cmd, EvolveConfig& cfg, std::string& error) {
    cfg = EvolveConfig{};
    if (!config_path.empty()) {
      std::string text;
      if (!read_text_file(config_path, text, &error)) return false;
      if (!evolve_config_from_json(text, cfg, &error)) return false;
    }
    if (cmd->count("--algo") || config_path.empty()) {
      if (!algo_from_name(algo, cfg.algo)) {
        error = "unknown algo " + algo;
        return false;
      }
    }
    if (cmd->count("--seed")) cfg.master_seed = seed;
    if (cmd->count("--pop")) cfg.neat.population_size = pop;
    if (cmd->count("--gens")) cfg.neat.generations = gens;
    if (cmd->count("--controllers")) cfg.controllers = controllers;
    if (cmd->count("--dims")) cfg.dims = {dims[0], dims[1], dims[2]};
    if (cmd->count("--out")) cfg.out_dir = out_dir;
    if (cmd->count("--workers")) cfg.workers = workers;
    if (cmd->count("--checkpoint-every")) cfg.checkpoint_every = checkpoint_every;
    if (desk_scale) cfg.desk_scale = true;
    if (cmd->count("--hidden-layers")) cfg.substrate_hidden_layers = hidden_layers;
    if (cmd->count("--width")) cfg.substrate_width = width;
    return true;
  }
};

// Protocol commands share the morphology + sampling surface.
struct ProtocolFlags {
  std::string morphology;
  std::uint64_t seed = 1;
  int n = 1000;
  int workers = 1;
  bool desk_scale = false;
  double duration = -1.0;
  double voxel_edge = -1.0;
  std::string out_file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--morphology", morphology, "morphology file (text or binary)")->required();
    cmd->add_option("--seed", seed, "controller sampling seed");
    cmd->add_option("--n", n, "number of sampled controllers");
    cmd->add_option("--workers", workers, "evaluation threads");
    cmd->add_flag("--desk-scale", desk_scale, "unit-scale physics profile (fast)");
    cmd->add_option("--duration", duration, "simulated seconds per controller");
    cmd->add_option("--voxel-edge", voxel_edge,
                    "voxel edge length in meters (keeps material values; shortens dt)");
    cmd->add_option("--out", out_file, "CSV output path");
  }

  void materialize(MaterialProperties& props, SimConfig& sim) const {
    props = MaterialProperties{};
    sim = SimConfig{};
    if (desk_scale) apply_desk_scale(props, sim);
    if (duration > 0.0) sim.duration = duration;
    if (voxel_edge > 0.0) sim.voxel_edge = voxel_edge;
  }

  EvolveConfig manifest_config() const {
    EvolveConfig cfg;
    cfg.master_seed = seed;
    cfg.controllers = n;
    cfg.workers = workers;
    cfg.desk_scale = desk_scale;
    if (duration > 0.0) cfg.sim.duration = duration;
    if (voxel_edge > 0.0) cfg.sim.voxel_edge = voxel_edge;
    cfg.out_dir = out_file;
    return cfg;
  }
};

int run_evolve(const CLI::App* cmd, EvolveFlags& flags) {
  EvolveConfig cfg;
  std::string error;
  if (!flags.resolve(cmd, cfg, error)) return fail(error);
  EvolveResult result;
  if (!run_evolution(cfg, result, &error)) return fail(error);
  std::cout << "run " << cfg.run_id << (cfg.run_id.empty() ? "" : " ") << "finished: best aptitude "
            << format_double(result.best_aptitude) << " over "
            << result.stats.size() << " generations\nartifacts in " << cfg.out_dir << "\n";
  return 0;
}

int run_resume(const std::string& out_dir, int gens) {
  EvolveResult result;
  std::string error;
  if (!resume_evolution(out_dir, gens, result, &error)) return fail(error);
  std::cout << "resumed to " << gens << " generations: best aptitude "
            << format_double(result.best_aptitude) << "\n";
  return 0;
}

int run_robustness(const ProtocolFlags& flags) {
  VoxelGrid grid;
  std::string error;
  if (!load_morphology(flags.morphology, grid, error)) return fail(error);
  MaterialProperties props;
  SimConfig sim;
  flags.materialize(props, sim);
  Rng rng = make_stream(flags.seed, "robustness");
  RobustnessSummary s =
      robustness(grid, flags.n, rng, props, sim, default_simulate(), flags.workers);
  std::cout << "robustness over " << flags.n << " controllers: " << summary_line(s) << "\n";
  if (!flags.out_file.empty()) {
    std::string csv = "controller,displacement\n";
    for (std::size_t i = 0; i < s.samples.size(); ++i)
      csv += std::to_string(i) + "," + format_double(s.samples[i]) + "\n";
    if (!write_text_file(flags.out_file, csv, &error)) return fail(error);
    if (!write_sidecar_manifest(flags.out_file, flags.manifest_config(), "robustness", &error))
      return fail(error);
  }
  return 0;
}

int run_sweep_material(const ProtocolFlags& flags) {
  VoxelGrid grid;
  std::string error;
  if (!load_morphology(flags.morphology, grid, error)) return fail(error);
  MaterialProperties props;
  SimConfig sim;
  flags.materialize(props, sim);
  std::vector<SweepRow> rows;
  if (!material_sweep(grid, flags.n, flags.seed, props, sim, default_simulate(), flags.workers,
                      rows, &error))
    return fail(error);
  std::string csv = "property,delta,value,controller,displacement\n";
  for (const auto& row : rows) {
    std::cout << row.property << " delta=" << format_double(row.delta)
              << " value=" << format_double(row.value) << ": " << summary_line(row.summary)
              << "\n";
    for (std::size_t i = 0; i < row.summary.samples.size(); ++i)
      csv += row.property + "," + format_double(row.delta) + "," + format_double(row.value) +
             "," + std::to_string(i) + "," + format_double(row.summary.samples[i]) + "\n";
  }
  if (!flags.out_file.empty()) {
    if (!write_text_file(flags.out_file, csv, &error)) return fail(error);
    if (!write_sidecar_manifest(flags.out_file, flags.manifest_config(), "sweep-material",
                                &error))
      return fail(error);
  }
  return 0;
}

int run_ablate(const ProtocolFlags& flags, const std::string& mode_name) {
  VoxelGrid grid;
  std::string error;
  if (!load_morphology(flags.morphology, grid, error)) return fail(error);
  MaterialProperties props;
  SimConfig sim;
  flags.materialize(props, sim);
  if (grid.dims.x != 20)
    std::cerr << "warning: non-default x dimension " << grid.dims.x << ", ablating "
              << grid.dims.x - 2 << " interior slices\n";
  AblationMode mode =
      mode_name == "disable" ? AblationMode::kDisable : AblationMode::kZeroPhase;
  int budget = static_cast<int>(contractile_cells(grid).size());
  Rng rng = make_stream(flags.seed, "controllers");
  auto controllers = sample_controllers(1, budget, rng);
  auto rows =
      slice_ablation(grid, controllers[0], props, sim, default_simulate(), flags.workers, mode);
  std::string csv = "slice,voxels_affected,displacement\n";
  for (const auto& row : rows) {
    std::cout << (row.slice == 0 ? "baseline" : "slice " + std::to_string(row.slice))
              << ": affected=" << row.voxels_affected
              << " displacement=" << format_double(row.displacement) << "\n";
    csv += std::to_string(row.slice) + "," + std::to_string(row.voxels_affected) + "," +
           format_double(row.displacement) + "\n";
  }
  if (!flags.out_file.empty()) {
    if (!write_text_file(flags.out_file, csv, &error)) return fail(error);
    if (!write_sidecar_manifest(flags.out_file, flags.manifest_config(), "ablate-slices",
                                &error))
      return fail(error);
  }
  return 0;
}

int run_export(const std::string& morphology, const std::string& format,
               const std::string& out_file) {
  VoxelGrid grid;
  std::string error;
  if (!load_morphology(morphology, grid, error)) return fail(error);
  std::string payload = format == "mesh" ? grid_to_obj(grid) : grid_to_text(grid);
  if (out_file.empty()) {
    std::cout << payload;
    return 0;
  }
  if (!write_text_file(out_file, payload, &error)) return fail(error);
  std::cout << "wrote " << out_file << "\n";
  return 0;
}

int run_simulate(const ProtocolFlags& flags, const std::string& trajectory_file) {
  VoxelGrid grid;
  std::string error;
  if (!load_morphology(flags.morphology, grid, error)) return fail(error);
  MaterialProperties props;
  SimConfig sim;
  flags.materialize(props, sim);
  sim.record_trajectory = !trajectory_file.empty();
  int budget = static_cast<int>(contractile_cells(grid).size());
  Rng rng = make_stream(flags.seed, "controllers");
  auto controllers = sample_controllers(1, budget, rng);
  SimOutcome out = simulate(grid, props, controllers[0].phases, sim);
  std::cout << "voxels=" << out.voxel_count << " diverged=" << (out.diverged ? "yes" : "no")
            << " displacement_yz=" << format_double(out.displacement_yz) << "\n";
  if (!trajectory_file.empty()) {
    std::string csv = "t,tip_x,tip_y,tip_z\n";
    for (const auto& row : out.trajectory)
      csv += format_double(row[0]) + "," + format_double(row[1]) + "," + format_double(row[2]) +
             "," + format_double(row[3]) + "\n";
    if (!write_text_file(trajectory_file, csv, &error)) return fail(error);
  }
  return 0;
}

int run_substrate_sweep(const CLI::App* cmd, EvolveFlags& flags, const std::string& hidden_range,
                        const std::string& width_range) {
  int h_lo, h_hi, w_lo, w_hi;
  if (!parse_range(hidden_range, h_lo, h_hi)) return fail("bad --hidden-range, want LO..HI");
  if (!parse_range(width_range, w_lo, w_hi)) return fail("bad --width-range, want LO..HI");
  EvolveConfig base;
  std::string error;
  if (!flags.resolve(cmd, base, error)) return fail(error);
  base.algo = Algo::kHyperneat;
  fs::path root(base.out_dir);

  std::string csv = "hidden_layers,width,best_aptitude\n";
  for (int h = h_lo; h <= h_hi; ++h)
    for (int w = w_lo; w <= w_hi; ++w) {
      EvolveConfig cfg = base;
      cfg.substrate_hidden_layers = h;
      cfg.substrate_width = w;
      cfg.out_dir = (root / ("h" + std::to_string(h) + "-w" + std::to_string(w))).string();
      cfg.run_id = "hyperneat-s" + std::to_string(cfg.master_seed) + "-h" + std::to_string(h) +
                   "-w" + std::to_string(w);
      EvolveResult result;
      if (!run_evolution(cfg, result, &error)) return fail(error);
      std::cout << "hidden=" << h << " width=" << w
                << " best=" << format_double(result.best_aptitude) << "\n";
      csv += std::to_string(h) + "," + std::to_string(w) + "," +
             format_double(result.best_aptitude) + "\n";
    }
  if (!write_text_file((root / "substrate_sweep.csv").string(), csv, &error)) return fail(error);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voxbend: evolving voxel-based soft actuators for a bending task"};
  app.require_subcommand(1);

  EvolveFlags evolve_flags;
  auto* evolve_cmd = app.add_subcommand("evolve", "run one evolution experiment");
  evolve_flags.attach(evolve_cmd, false);

  std::string resume_dir;
  int resume_gens = 0;
  auto* resume_cmd = app.add_subcommand("resume", "continue a checkpointed run");
  resume_cmd->add_option("--out", resume_dir, "artifact directory of the run")->required();
  resume_cmd->add_option("--gens", resume_gens, "new total generation count")->required();

  ProtocolFlags robustness_flags;
  auto* robustness_cmd =
      app.add_subcommand("robustness", "evaluate a morphology under fresh controllers");
  robustness_flags.attach(robustness_cmd);

  ProtocolFlags sweep_flags;
  auto* sweep_cmd =
      app.add_subcommand("sweep-material", "robustness under perturbed material properties");
  sweep_flags.attach(sweep_cmd);

  ProtocolFlags ablate_flags;
  std::string ablate_mode = "zero-phase";
  auto* ablate_cmd = app.add_subcommand("ablate-slices", "per-slice phase ablation");
  ablate_flags.attach(ablate_cmd);
  ablate_cmd->add_option("--mode", ablate_mode, "zero-phase|disable")
      ->check(CLI::IsMember({"zero-phase", "disable"}));

  std::string export_morphology, export_format = "text", export_out;
  auto* export_cmd = app.add_subcommand("export", "convert a morphology file");
  export_cmd->add_option("--morphology", export_morphology, "morphology file")->required();
  export_cmd->add_option("--format", export_format, "text|mesh")
      ->check(CLI::IsMember({"text", "mesh"}));
  export_cmd->add_option("--out", export_out, "output path (stdout when omitted)");

  ProtocolFlags simulate_flags;
  std::string trajectory_file;
  auto* simulate_cmd = app.add_subcommand("simulate", "one simulation of a morphology");
  simulate_flags.attach(simulate_cmd);
  simulate_cmd->add_option("--trajectory", trajectory_file, "tip trajectory CSV path");

  EvolveFlags sweep_substrate_flags;
  std::string hidden_range = "1..5", width_range = "1..5";
  auto* substrate_cmd =
      app.add_subcommand("substrate-sweep", "hyperneat substrate layout sweep");
  sweep_substrate_flags.attach(substrate_cmd, true);
  substrate_cmd->add_option("--hidden-range", hidden_range, "hidden layer range LO..HI");
  substrate_cmd->add_option("--width-range", width_range, "hidden width range LO..HI");

  CLI11_PARSE(app, argc, argv);

  if (evolve_cmd->parsed()) return run_evolve(evolve_cmd, evolve_flags);
  if (resume_cmd->parsed()) return run_resume(resume_dir, resume_gens);
  if (robustness_cmd->parsed()) return run_robustness(robustness_flags);
  if (sweep_cmd->parsed()) return run_sweep_material(sweep_flags);
  if (ablate_cmd->parsed()) return run_ablate(ablate_flags, ablate_mode);
  if (export_cmd->parsed()) return run_export(export_morphology, export_format, export_out);
  if (simulate_cmd->parsed()) return run_simulate(simulate_flags, trajectory_file);
  if (substrate_cmd->parsed())
    return run_substrate_sweep(substrate_cmd, sweep_substrate_flags, hidden_range, width_range);
  return fail("no subcommand");
}
