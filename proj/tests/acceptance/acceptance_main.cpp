// Acceptance gate: ten go/no-go checks over the assembled workbench. Each
// criterion prints exactly one [PASS]/[FAIL] line (details indented under
// failures); the exit status is the number of failed criteria.
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "voxbend/afpo.hpp"
#include "voxbend/csv.hpp"
#include "voxbend/evolve.hpp"

namespace fs = std::filesystem;
using namespace voxbend;

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

struct Criterion {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back(what);
    }
  }

  // Context shown alongside failures (notes are printed only when ok is false).
  void info(const std::string& what) { notes.push_back(what); }
};

struct Shared {
  fs::path scratch;
  bool have_afpo = false;
  double afpo_best = 0.0;
};

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------- fixtures

VoxelGrid shell_grid(GridDims dims) {
  VoxelGrid g(dims);
  for (int x = 0; x < dims.x; ++x)
    for (int y = 0; y < dims.y; ++y)
      for (int z = 0; z < dims.z; ++z)
        if (g.is_enclosure(x, y, z)) g.set(x, y, z, Material::kPassive);
  return g;
}

// 20x8x8 shell plus the first `contractile` interior cells in scan order.
VoxelGrid table_fixture(int contractile) {
  VoxelGrid g = shell_grid({20, 8, 8});
  int placed = 0;
  for (int x = 1; x < 19 && placed < contractile; ++x)
    for (int y = 1; y < 7 && placed < contractile; ++y)
      for (int z = 1; z < 7 && placed < contractile; ++z) {
        g.set(x, y, z, Material::kContractile);
        ++placed;
      }
  return g;
}

VoxelGrid filled_interior(GridDims dims, Material interior) {
  VoxelGrid g = shell_grid(dims);
  for (int x = 1; x < dims.x - 1; ++x)
    for (int y = 1; y < dims.y - 1; ++y)
      for (int z = 1; z < dims.z - 1; ++z) g.set(x, y, z, interior);
  return g;
}

std::vector<double> random_phases(int n, std::uint64_t seed) {
  Rng rng = make_stream(seed, "controllers");
  std::vector<double> p(static_cast<std::size_t>(n));
  for (auto& v : p) v = uniform_range(rng, 0.0, kTwoPi);
  return p;
}

// Connection-only genome for the distance arithmetic (innovation, weight).
Genome conn_only(const std::vector<std::pair<int, double>>& genes) {
  Genome g;
  g.num_inputs = 1;
  g.num_outputs = 1;
  g.nodes = {
      {0, NodeType::kInput, Activation::kSigmoid},
      {1, NodeType::kBias, Activation::kSigmoid},
      {2, NodeType::kOutput, Activation::kSigmoid},
  };
  for (auto [innov, w] : genes) g.conns.push_back({innov, 0, 2, w, true});
  return g;
}

// Criterion 6/8 experiment shape: small beam, short sims, desk-scale physics.
EvolveConfig learning_config(Algo algo) {
  EvolveConfig cfg;
  cfg.algo = algo;
  cfg.master_seed = 42;
  cfg.controllers = 5;
  cfg.dims = {10, 4, 4};
  cfg.neat.population_size = 20;
  cfg.neat.generations = 100;
  cfg.desk_scale = true;
  cfg.sim.duration = 1.0;
  cfg.workers = 2;
  cfg.out_dir = "unused";
  return cfg;
}

int interior_volume(GridDims d) { return (d.x - 2) * (d.y - 2) * (d.z - 2); }

// ---------------------------------------------------------------- criteria

// Compatibility distance reproduces the three hand-worked examples exactly.
void c1_distance(Criterion& c) {
  NeatConfig cfg;
  cfg.small_genome_limit = 0;  // plain N = larger genome's gene count

  Genome a = conn_only({{1, 0.0}, {2, 0.0}, {3, 0.0}, {4, 0.0}, {5, 0.0}});
  double d_self = compatibility_distance(a, a, cfg);
  c.expect(d_self == 0.0, "identical genomes: delta " + fmt(d_self) + ", want exactly 0");

  Genome b = conn_only({{1, 0.0}, {2, 0.0}, {3, 0.0}});
  double d_ab = compatibility_distance(a, b, cfg);  // E=2 D=0 Wbar=0 N=5
  c.expect(std::fabs(d_ab - 0.4) <= 1e-12, "excess-only pair: delta " + fmt(d_ab) + ", want 0.4");
  double d_ba = compatibility_distance(b, a, cfg);
  c.expect(d_ba == d_ab, "distance must be symmetric");

  Genome g1 = conn_only({{1, 0.0}, {2, 0.0}, {3, 0.0}, {4, 0.0}});
  Genome g2 = conn_only({{1, 0.2}, {2, 0.2}, {3, 0.2}, {4, 0.2}});
  double d_w = compatibility_distance(g1, g2, cfg);  // Wbar=0.2 -> 0.5*0.2
  c.expect(std::fabs(d_w - 0.1) <= 1e-12, "weight-only pair: delta " + fmt(d_w) + ", want 0.1");
}

// Presence/material thresholds agree with a direct transliteration on a grid
// of values straddling both 0.5 boundaries.
void c2_thresholds(Criterion& c) {
  const std::array<double, 7> vals = {-0.6, -0.5, -0.49, 0.0, 0.49, 0.5, 0.6};
  GridDims dims{3, 3, 3};
  MorphogenConfig mcfg;
  for (double v : vals)
    for (double m : vals) {
      VoxelGrid g = generate(dims, mcfg, [&](double, double, double) {
        return std::array<double, 2>{v, m};
      });
      bool present = std::fabs(v) >= 0.5;
      Material want = !present             ? Material::kEmpty
                      : std::fabs(m) >= 0.5 ? Material::kContractile
                                            : Material::kPassive;
      Material got = g.at(1, 1, 1);
      c.expect(got == want, "field (" + fmt(v) + "," + fmt(m) + "): interior cell code " +
                                std::to_string(static_cast<int>(got)) + ", want " +
                                std::to_string(static_cast<int>(want)));
      c.expect(g.at(0, 0, 0) == Material::kPassive && g.at(2, 2, 2) == Material::kPassive,
               "boundary cells must always be passive");
    }
}

// Closed-form enclosure count against brute-force boundary enumeration.
void c3_enclosure(Criterion& c) {
  int reference = passive_enclosure_count({20, 8, 8});
  c.expect(reference == 632,
           "default 20x8x8 enclosure: " + std::to_string(reference) + ", want 632");

  Rng rng(421);
  for (int t = 0; t < 20; ++t) {
    GridDims d{3 + static_cast<int>(uniform_index(rng, 12)),
               3 + static_cast<int>(uniform_index(rng, 12)),
               3 + static_cast<int>(uniform_index(rng, 12))};
    int brute = 0;
    for (int x = 0; x < d.x; ++x)
      for (int y = 0; y < d.y; ++y)
        for (int z = 0; z < d.z; ++z)
          if (x == 0 || y == 0 || z == 0 || x == d.x - 1 || y == d.y - 1 || z == d.z - 1)
            ++brute;
    int closed = passive_enclosure_count(d);
    c.expect(closed == brute, "dims " + std::to_string(d.x) + "x" + std::to_string(d.y) + "x" +
                                  std::to_string(d.z) + ": closed form " +
                                  std::to_string(closed) + " vs brute " + std::to_string(brute));
  }
}

// The three published voxel-count rows round-trip through both file formats.
void c4_fixtures(Criterion& c, const Shared& shared) {
  const std::array<std::array<int, 3>, 3> rows = {{{900, 632, 268}, {1063, 632, 431},
                                                   {1253, 632, 621}}};
  for (const auto& row : rows) {
    VoxelGrid g = table_fixture(row[2]);
    VoxelCounts direct = count_voxels(g);
    c.expect(direct.total == row[0] && direct.passive == row[1] && direct.contractile == row[2],
             "constructed counts (" + std::to_string(direct.total) + "," +
                 std::to_string(direct.passive) + "," + std::to_string(direct.contractile) +
                 "), want (" + std::to_string(row[0]) + "," + std::to_string(row[1]) + "," +
                 std::to_string(row[2]) + ")");

    VoxelGrid from_text;
    std::string error;
    c.expect(grid_from_text(grid_to_text(g), from_text, &error), "text round-trip: " + error);
    VoxelCounts t = count_voxels(from_text);
    c.expect(t.total == row[0] && t.passive == row[1] && t.contractile == row[2] &&
                 from_text.cells == g.cells,
             "text round-trip altered the grid");

    VoxelGrid from_bin;
    c.expect(grid_from_binary(grid_to_binary(g), from_bin, &error),
             "binary round-trip: " + error);
    c.expect(from_bin.cells == g.cells, "binary round-trip altered the grid");
  }

  std::string path = (shared.scratch / "fixture_621.vox").string();
  std::string error;
  VoxelGrid g = table_fixture(621);
  c.expect(save_grid(g, path, &error), "save: " + error);
  VoxelGrid loaded;
  c.expect(load_grid(path, loaded, &error), "load: " + error);
  c.expect(loaded.cells == g.cells && loaded.dims == g.dims, "file round-trip altered the grid");
}

// Physical invariants of the simulator at the unit-scale profile.
void c5_simulator(Criterion& c) {
  MaterialProperties props;
  SimConfig cfg;
  apply_desk_scale(props, cfg);

  // (a)+(f): worst-case all-contractile beam, default settings. The anchored
  // face must not move at all and nothing may diverge over the full run.
  {
    VoxelGrid g = filled_interior({20, 8, 8}, Material::kContractile);
    LatticeState lat;
    std::string error;
    c.expect(build_lattice(g, props, cfg, lat, &error), "build: " + error);
    auto phases = random_phases(lat.contractile_count, 71);
    double dt = stable_timestep(lat);
    int steps = static_cast<int>(std::ceil(cfg.duration / dt));
    auto initial = lat.pos;
    int fixed_count = 0;
    bool finite = true;
    for (int s = 0; s < steps && finite; ++s)
      finite = step(lat, s * dt, phases, props, cfg, dt);
    c.expect(finite, "(f) all-contractile worst case diverged at default settings");
    double worst = 0.0;
    for (std::size_t i = 0; i < lat.pos.size(); ++i) {
      if (!lat.fixed[i]) continue;
      ++fixed_count;
      for (int k = 0; k < 3; ++k)
        worst = std::max(worst, std::fabs(lat.pos[i][k] - initial[i][k]));
    }
    c.expect(fixed_count > 0, "(a) no anchored nodes found");
    c.expect(worst <= 1e-12, "(a) anchored face moved by " + fmt(worst) + " > 1e-12");
  }

  // (f) spot check at millimeter scale: the stability bound also holds for
  // the stiff published material (a full 2 s run is ~1e7 steps, so this
  // integrates a 2000-step prefix).
  {
    MaterialProperties mm_props;  // defaults: 5 MPa, 1000 kg/m^3
    SimConfig mm_cfg;             // defaults: 1 mm voxels
    VoxelGrid g = filled_interior({6, 4, 4}, Material::kContractile);
    LatticeState lat;
    std::string error;
    c.expect(build_lattice(g, mm_props, mm_cfg, lat, &error), "mm build: " + error);
    auto phases = random_phases(lat.contractile_count, 72);
    double dt = stable_timestep(lat);
    bool finite = true;
    for (int s = 0; s < 2000 && finite; ++s)
      finite = step(lat, s * dt, phases, mm_props, mm_cfg, dt);
    c.expect(finite, "(f) millimeter-scale prefix diverged");
  }

  // (b) no contractile voxels: the lattice starts in exact equilibrium.
  {
    VoxelGrid g = filled_interior({20, 8, 8}, Material::kPassive);
    SimOutcome out = simulate(g, props, {}, cfg);
    c.expect(!out.diverged, "(b) passive model diverged");
    c.expect(out.displacement_yz <= 1e-6,
             "(b) passive model drifted " + fmt(out.displacement_yz) + " > 1e-6");
  }

  // (c) mirroring the morphology and its phases across y mirrors the motion.
  {
    GridDims dims{12, 6, 6};
    VoxelGrid g = shell_grid(dims);
    for (int x = 1; x < dims.x - 1; ++x)
      for (int y = 1; y < dims.y - 1; ++y)
        for (int z = 1; z < dims.z - 1; ++z)
          if ((x * 31 + y * 17 + z * 7) % 5 < 2) g.set(x, y, z, Material::kContractile);
          else g.set(x, y, z, Material::kPassive);
    VoxelGrid m(dims);
    for (int x = 0; x < dims.x; ++x)
      for (int y = 0; y < dims.y; ++y)
        for (int z = 0; z < dims.z; ++z) m.set(x, dims.y - 1 - y, z, g.at(x, y, z));

    auto cells_g = contractile_cells(g);
    auto cells_m = contractile_cells(m);
    c.expect(cells_g.size() == cells_m.size(), "(c) mirror changed the contractile census");
    std::map<std::array<int, 3>, int> index_m;
    for (std::size_t i = 0; i < cells_m.size(); ++i) index_m[cells_m[i]] = static_cast<int>(i);
    auto phases_g = random_phases(static_cast<int>(cells_g.size()), 73);
    std::vector<double> phases_m(phases_g.size(), 0.0);
    for (std::size_t i = 0; i < cells_g.size(); ++i) {
      auto [x, y, z] = cells_g[i];
      phases_m[static_cast<std::size_t>(index_m.at({x, dims.y - 1 - y, z}))] = phases_g[i];
    }
    SimOutcome a = simulate(g, props, phases_g, cfg);
    SimOutcome b = simulate(m, props, phases_m, cfg);
    c.expect(!a.diverged && !b.diverged, "(c) mirrored pair diverged");
    double gap = std::fabs(a.displacement_yz - b.displacement_yz);
    c.expect(gap <= 1e-6, "(c) mirror displacement gap " + fmt(gap) + " > 1e-6");
  }

  // (d) a free oscillating voxel keeps its centroid (momentum conservation).
  {
    VoxelGrid g({1, 1, 1});
    g.set(0, 0, 0, Material::kContractile);
    SimConfig free_cfg = cfg;
    free_cfg.fix_end = false;
    LatticeState lat;
    std::string error;
    c.expect(build_lattice(g, props, free_cfg, lat, &error), "(d) build: " + error);
    std::vector<double> phases = {0.7};
    double dt = stable_timestep(lat);
    int steps = static_cast<int>(std::ceil(1.0 / props.actuation_frequency / dt));
    std::array<double, 3> before{}, after{};
    for (const auto& p : lat.pos)
      for (int k = 0; k < 3; ++k) before[k] += p[k] / static_cast<double>(lat.pos.size());
    for (int s = 0; s < steps; ++s) step(lat, s * dt, phases, props, free_cfg, dt);
    for (const auto& p : lat.pos)
      for (int k = 0; k < 3; ++k) after[k] += p[k] / static_cast<double>(lat.pos.size());
    double drift = std::sqrt((after[0] - before[0]) * (after[0] - before[0]) +
                             (after[1] - before[1]) * (after[1] - before[1]) +
                             (after[2] - before[2]) * (after[2] - before[2]));
    c.expect(drift <= 1e-9, "(d) centroid drifted " + fmt(drift) + " per period > 1e-9");
  }

  // (e) the driven response oscillates at the actuation frequency (within 1%)
  // when integrating at a tenth of the stability bound.
  {
    VoxelGrid g({1, 1, 1});
    g.set(0, 0, 0, Material::kContractile);
    LatticeState lat;
    std::string error;
    c.expect(build_lattice(g, props, cfg, lat, &error), "(e) build: " + error);
    std::vector<double> phases = {0.0};
    double dt = stable_timestep(lat) / 10.0;
    int steps = static_cast<int>(std::ceil(4.0 / dt));
    std::vector<double> ts, xs;
    for (int s = 0; s < steps; ++s) {
      step(lat, s * dt, phases, props, cfg, dt);
      double t = (s + 1) * dt;
      if (t < 2.0) continue;  // let the start-up transient decay
      double tip_x = 0.0;
      for (int node : lat.tip_nodes) tip_x += lat.pos[static_cast<std::size_t>(node)][0];
      ts.push_back(t);
      xs.push_back(tip_x / static_cast<double>(lat.tip_nodes.size()));
    }
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    for (double& x : xs) x -= mean;
    double best_f = 0.0, best_power = -1.0;
    for (double f = 3.0; f <= 5.0 + 1e-9; f += 0.002) {
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        re += xs[i] * std::cos(kTwoPi * f * ts[i]);
        im += xs[i] * std::sin(kTwoPi * f * ts[i]);
      }
      double power = re * re + im * im;
      if (power > best_power) {
        best_power = power;
        best_f = f;
      }
    }
    c.expect(std::fabs(best_f - props.actuation_frequency) <=
                 0.01 * props.actuation_frequency,
             "(e) dominant frequency " + fmt(best_f) + " Hz, want 4.0 +- 1%");
  }
}

// Independent O(n^2) non-domination scan.
std::vector<int> brute_front(const std::vector<AgedGenome>& pop) {
  std::vector<int> out;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pop.size() && !dominated; ++j) {
      if (i == j) continue;
      bool no_worse = pop[j].aptitude >= pop[i].aptitude && pop[j].age <= pop[i].age;
      bool strictly = pop[j].aptitude > pop[i].aptitude || pop[j].age < pop[i].age;
      dominated = no_worse && strictly;
    }
    if (!dominated) out.push_back(static_cast<int>(i));
  }
  return out;
}

// Full AFPO run on the real simulator: monotone best-so-far, exactly one
// age-1 newcomer surviving every generation, engine fronts equal to brute
// force every 10 generations.
void c6_afpo(Criterion& c, Shared& shared) {
  EvolveConfig cfg = learning_config(Algo::kAfpo);
  MaterialProperties props = cfg.props;
  SimConfig sim_cfg = cfg.sim;
  apply_desk_scale(props, sim_cfg);
  auto decode = make_decoder(cfg);
  Rng crng = make_stream(cfg.master_seed, "controllers");
  auto controllers = sample_controllers(cfg.controllers, interior_volume(cfg.dims), crng);
  SimulateFn simulate_fn = default_simulate();
  BatchEvalFn eval = [&](const std::vector<const Genome*>& batch) {
    std::vector<double> out(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
      out[i] = aptitude(decode(*batch[i]), controllers, props, sim_cfg, simulate_fn, 1);
    return out;
  };

  AfpoEngine engine(cfg.neat, genome_inputs(cfg.algo), genome_outputs(cfg.algo), eval,
                    cfg.master_seed);
  engine.evaluate_current();
  double last_best = engine.stats().best_so_far;
  for (int gen = 1; gen <= cfg.neat.generations; ++gen) {
    engine.advance();
    engine.evaluate_current();
    GenerationStats st = engine.stats();
    if (st.best_so_far < last_best) {
      c.expect(false, "best-so-far dropped from " + fmt(last_best) + " to " +
                          fmt(st.best_so_far) + " at generation " + std::to_string(gen));
      break;
    }
    last_best = st.best_so_far;

    int age_one = 0;
    for (const auto& member : engine.population())
      if (member.age == 1) ++age_one;
    if (age_one != 1) {
      c.expect(false, "generation " + std::to_string(gen) + " holds " +
                          std::to_string(age_one) + " age-1 members, want exactly 1");
      break;
    }

    if (gen % 10 == 0) {
      auto engine_front = pareto_front(engine.population());
      auto reference = brute_front(engine.population());
      if (engine_front != reference) {
        c.expect(false,
                 "pareto front mismatch at generation " + std::to_string(gen) + " (engine " +
                     std::to_string(engine_front.size()) + " members, brute force " +
                     std::to_string(reference.size()) + ")");
        break;
      }
    }
  }
  shared.have_afpo = c.ok;
  shared.afpo_best = engine.best_aptitude_so_far();
}

// Structural laws of the NEAT machinery and the substrate weight rule.
void c7_structure(Criterion& c) {
  // Shared innovation numbering within one generation.
  {
    InnovationLedger ledger(50, 20);
    ledger.begin_generation();
    int a = ledger.connection_innovation(3, 7);
    int b = ledger.connection_innovation(3, 7);
    int other = ledger.connection_innovation(7, 3);
    c.expect(a == b, "identical same-generation mutations got distinct innovations");
    c.expect(other > a, "distinct mutation did not advance the counter");
    SplitRecord s1 = ledger.split_records(4);
    SplitRecord s2 = ledger.split_records(4);
    c.expect(s1.node_id == s2.node_id && s1.in_innovation == s2.in_innovation &&
                 s1.out_innovation == s2.out_innovation,
             "identical same-generation splits diverged");
    ledger.begin_generation();
    int fresh = ledger.connection_innovation(3, 7);
    c.expect(fresh > other, "new generation must mint fresh innovation numbers");
  }

  // Engine run: species always partition the population; the global
  // innovation counter never decreases; genome genes stay innovation-sorted.
  {
    NeatConfig ncfg;
    ncfg.population_size = 30;
    ncfg.generations = 15;
    BatchEvalFn eval = [](const std::vector<const Genome*>& batch) {
      std::vector<double> out;
      out.reserve(batch.size());
      for (const Genome* g : batch) {
        double s = 0.0;
        for (const auto& conn : g->conns)
          if (conn.enabled) s += std::fabs(conn.weight);
        out.push_back(s);
      }
      return out;
    };
    NeatEngine engine(ncfg, 3, 2, eval, 9);
    int last_innovation = engine.ledger().next_innovation();
    for (int gen = 0; gen < ncfg.generations && c.ok; ++gen) {
      engine.evaluate_current();
      std::vector<int> seen(engine.population().size(), 0);
      for (const auto& sp : engine.species())
        for (int member : sp.members) {
          c.expect(member >= 0 && member < static_cast<int>(seen.size()),
                   "species member index out of range");
          if (member >= 0 && member < static_cast<int>(seen.size()))
            ++seen[static_cast<std::size_t>(member)];
        }
      for (std::size_t i = 0; i < seen.size() && c.ok; ++i)
        c.expect(seen[i] == 1, "generation " + std::to_string(gen) + ": population member " +
                                   std::to_string(i) + " covered " + std::to_string(seen[i]) +
                                   " times, want exactly once");
      c.expect(engine.ledger().next_innovation() >= last_innovation,
               "innovation counter decreased");
      last_innovation = engine.ledger().next_innovation();
      for (const auto& genome : engine.population()) {
        for (std::size_t k = 1; k < genome.conns.size() && c.ok; ++k)
          c.expect(genome.conns[k - 1].innovation < genome.conns[k].innovation,
                   "genome connections not strictly innovation-ordered");
      }
      engine.advance();
    }
  }

  // Substrate weight law over 1000 random CPPNs: present weights lie in
  // (0, 3], and the 0.2 presence threshold is strict.
  {
    c.expect(threshold_scale(0.2) == 0.0, "raw 0.2 must map to an absent connection");
    c.expect(threshold_scale(-0.2) == 0.0, "raw -0.2 must map to an absent connection");
    c.expect(threshold_scale(0.2000001) > 0.0, "raw just above 0.2 must be present");
    c.expect(threshold_scale(1.0) == 3.0, "raw 1.0 must scale to exactly 3");
    c.expect(threshold_scale(5.0) == 3.0 && threshold_scale(-5.0) == -3.0,
             "saturated raw values must clamp to +-3");

    SubstrateSpec spec = SubstrateSpec::make_default(2, 5);
    NeatConfig mcfg;
    Rng rng = make_stream(1234, "init");
    InnovationLedger ledger(5 * 1, 4 + 1 + 1);
    int checked = 0;
    for (int i = 0; i < 1000 && c.ok; ++i) {
      Genome g = random_genome(4, 1, -2.0, 2.0, rng);
      ledger.begin_generation();
      for (int m = 0; m < i % 4; ++m) g = mutate(g, mcfg, ledger, rng);
      SubstrateNetwork net = build_network(g, spec);
      for (const auto& link : net.links)
        for (std::size_t k = 0; k < link.weight.size(); ++k) {
          if (!link.present[k]) continue;
          ++checked;
          double w = std::fabs(link.weight[k]);
          c.expect(w > 0.0 && w <= 3.0 + 1e-15,
                   "present substrate weight " + fmt(link.weight[k]) + " outside (0, 3]");
          if (!c.ok) break;
        }
      for (std::size_t layer = 0; layer < net.bias.size() && c.ok; ++layer)
        for (std::size_t k = 0; k < net.bias[layer].size(); ++k) {
          if (!net.bias_present[layer][k]) continue;
          double w = std::fabs(net.bias[layer][k]);
          c.expect(w > 0.0 && w <= 3.0 + 1e-15,
                   "present substrate bias " + fmt(net.bias[layer][k]) + " outside (0, 3]");
          if (!c.ok) break;
        }
    }
    c.expect(checked > 0, "no present substrate connections in 1000 genomes");
  }
}

// Every algorithm beats twice the random-genome baseline under the shared
// desk-scale experiment.
void c8_learning(Criterion& c, const Shared& shared) {
  Rng crng = make_stream(42, "controllers");
  auto controllers = sample_controllers(5, interior_volume({10, 4, 4}), crng);
  SimulateFn simulate_fn = default_simulate();

  EvolveConfig direct_cfg = learning_config(Algo::kNeat);
  double direct_baseline = random_genome_baseline(direct_cfg, 100, controllers, simulate_fn);
  EvolveConfig hyper_cfg = learning_config(Algo::kHyperneat);
  double hyper_baseline = random_genome_baseline(hyper_cfg, 100, controllers, simulate_fn);

  c.expect(shared.have_afpo, "afpo run unavailable (criterion 6 failed)");
  if (shared.have_afpo) {
    c.info("afpo best " + fmt(shared.afpo_best) + " vs 2x baseline " +
           fmt(2.0 * direct_baseline));
    c.expect(shared.afpo_best >= 2.0 * direct_baseline,
             "afpo best " + fmt(shared.afpo_best) + " < 2x baseline " +
                 fmt(2.0 * direct_baseline));
  }

  for (Algo algo : {Algo::kNeat, Algo::kHyperneat}) {
    EvolveConfig cfg = learning_config(algo);
    cfg.out_dir = (fs::temp_directory_path() / "voxbend_acceptance" /
                   (std::string("c8_") + algo_name(algo)))
                      .string();
    EvolveResult result;
    std::string error;
    if (!run_evolution(cfg, result, &error, simulate_fn)) {
      c.expect(false, std::string(algo_name(algo)) + " run failed: " + error);
      continue;
    }
    double baseline = algo == Algo::kHyperneat ? hyper_baseline : direct_baseline;
    c.info(std::string(algo_name(algo)) + " best " + fmt(result.best_aptitude) +
           " vs 2x baseline " + fmt(2.0 * baseline));
    c.expect(result.best_aptitude >= 2.0 * baseline,
             std::string(algo_name(algo)) + " best " + fmt(result.best_aptitude) +
                 " < 2x baseline " + fmt(2.0 * baseline));
  }
}

// Shapes and internal consistency of the three measurement protocols.
void c9_protocols(Criterion& c, const Shared& shared) {
  MaterialProperties props;
  SimConfig cfg;
  apply_desk_scale(props, cfg);
  cfg.duration = 0.25;
  SimulateFn simulate_fn = default_simulate();

  // Robustness: exactly 1000 samples; the persisted mean is recomputable.
  {
    VoxelGrid g = table_fixture(268);
    Rng rng = make_stream(11, "robustness");
    RobustnessSummary s = robustness(g, 1000, rng, props, cfg, simulate_fn, 2);
    c.expect(static_cast<int>(s.samples.size()) == 1000,
             "robustness returned " + std::to_string(s.samples.size()) + " samples, want 1000");

    std::string csv = "controller,displacement\nmean," + fmt(s.mean) + "\n";
    for (std::size_t i = 0; i < s.samples.size(); ++i)
      csv += std::to_string(i) + "," + fmt(s.samples[i]) + "\n";
    std::string path = (shared.scratch / "robustness.csv").string();
    std::string error;
    c.expect(write_text_file(path, csv, &error), "persist: " + error);
    std::string read_back;
    c.expect(read_text_file(path, read_back, &error), "re-read: " + error);
    auto lines = split(read_back, '\n');
    double persisted_mean = 0.0, recomputed = 0.0;
    int rows = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      auto fields = split(lines[i], ',');
      c.expect(fields.size() == 2, "bad row: " + lines[i]);
      if (fields.size() != 2) continue;
      double value = parse_double(fields[1]);
      if (fields[0] == "mean") {
        persisted_mean = value;
      } else {
        recomputed += value;
        ++rows;
      }
    }
    recomputed /= static_cast<double>(rows);
    c.expect(rows == 1000, "persisted " + std::to_string(rows) + " sample rows, want 1000");
    c.expect(std::fabs(recomputed - persisted_mean) <= 1e-12,
             "recomputed mean " + fmt(recomputed) + " vs persisted " + fmt(persisted_mean));
  }

  // Material sweep: 1 baseline + 8 perturbed rows at the exact property
  // values, on the published material (unit voxels keep the runtime sane).
  {
    VoxelGrid g = filled_interior({5, 3, 3}, Material::kContractile);
    MaterialProperties mm;  // defaults: E = 5e6 Pa, nu = 0.35
    SimConfig sweep_cfg;
    sweep_cfg.voxel_edge = 1.0;
    sweep_cfg.duration = 0.2;
    std::vector<SweepRow> rows;
    std::string error;
    c.expect(material_sweep(g, 10, 13, mm, sweep_cfg, simulate_fn, 2, rows, &error),
             "sweep failed: " + error);
    c.expect(rows.size() == 9,
             "sweep produced " + std::to_string(rows.size()) + " rows, want 9");
    if (rows.size() == 9) {
      c.expect(rows[0].property == "baseline", "row 0 must be the baseline");
      const std::array<double, 4> deltas = {-0.10, -0.05, 0.05, 0.10};
      for (int k = 0; k < 4; ++k) {
        const SweepRow& row = rows[static_cast<std::size_t>(1 + k)];
        double want = mm.youngs_modulus * (1.0 + deltas[static_cast<std::size_t>(k)]);
        c.expect(row.property == "youngs_modulus" &&
                     std::fabs(row.value - want) <= 1e-9 * want,
                 "row " + std::to_string(1 + k) + ": " + row.property + "=" + fmt(row.value) +
                     ", want youngs_modulus=" + fmt(want));
      }
      for (int k = 0; k < 4; ++k) {
        const SweepRow& row = rows[static_cast<std::size_t>(5 + k)];
        double want = mm.poissons_ratio * (1.0 + deltas[static_cast<std::size_t>(k)]);
        c.expect(row.property == "poissons_ratio" &&
                     std::fabs(row.value - want) <= 1e-9 * want,
                 "row " + std::to_string(5 + k) + ": " + row.property + "=" + fmt(row.value) +
                     ", want poissons_ratio=" + fmt(want));
      }
      for (const auto& row : rows)
        c.expect(static_cast<int>(row.summary.samples.size()) == 10,
                 row.property + " row carries " + std::to_string(row.summary.samples.size()) +
                     " samples, want 10");
    }
  }

  // Slice ablation: baseline + 18 interior slices on the default beam; a
  // contractile-free slice must reproduce the baseline bit for bit.
  {
    VoxelGrid g = filled_interior({20, 8, 8}, Material::kContractile);
    for (int y = 1; y < 7; ++y)
      for (int z = 1; z < 7; ++z) g.set(10, y, z, Material::kPassive);
    int budget = static_cast<int>(contractile_cells(g).size());
    Rng rng = make_stream(17, "controllers");
    auto controllers = sample_controllers(1, budget, rng);
    auto rows = slice_ablation(g, controllers[0], props, cfg, simulate_fn, 2,
                               AblationMode::kZeroPhase);
    c.expect(rows.size() == 19,
             "ablation produced " + std::to_string(rows.size()) + " rows, want 19");
    if (rows.size() == 19) {
      c.expect(rows[0].slice == 0 && rows[0].voxels_affected == 0,
               "row 0 must be the untouched baseline");
      for (int s = 1; s <= 18; ++s) {
        int want = s == 10 ? 0 : 36;
        c.expect(rows[static_cast<std::size_t>(s)].slice == s &&
                     rows[static_cast<std::size_t>(s)].voxels_affected == want,
                 "slice " + std::to_string(s) + " affected " +
                     std::to_string(rows[static_cast<std::size_t>(s)].voxels_affected) +
                     " voxels, want " + std::to_string(want));
      }
      c.expect(rows[10].displacement == rows[0].displacement,
               "contractile-free slice displacement " + fmt(rows[10].displacement) +
                   " != baseline " + fmt(rows[0].displacement));
    }
  }
}

std::string strip_last_column(const std::string& csv) {
  std::string out;
  for (const auto& line : split(csv, '\n')) {
    if (line.empty()) continue;
    auto pos = line.rfind(',');
    out += (pos == std::string::npos ? line : line.substr(0, pos)) + "\n";
  }
  return out;
}

// Identical artifacts for 1 vs 8 evaluation workers (wall-time column aside).
void c10_determinism(Criterion& c, const Shared& shared) {
  auto run_with = [&](Algo algo, int workers, const std::string& tag, std::string& error) {
    EvolveConfig cfg;
    cfg.algo = algo;
    cfg.master_seed = 7;
    cfg.controllers = 3;
    cfg.dims = {6, 4, 4};
    cfg.neat.population_size = 8;
    cfg.neat.generations = 5;
    cfg.desk_scale = true;
    cfg.sim.duration = 0.5;
    cfg.workers = workers;
    cfg.out_dir = (shared.scratch / tag).string();
    EvolveResult result;
    return run_evolution(cfg, result, &error) ? cfg.out_dir : std::string();
  };

  for (Algo algo : {Algo::kAfpo, Algo::kHyperneat}) {
    std::string error;
    std::string d1 = run_with(algo, 1, std::string("det_") + algo_name(algo) + "_w1", error);
    c.expect(!d1.empty(), std::string(algo_name(algo)) + " w1: " + error);
    std::string d8 = run_with(algo, 8, std::string("det_") + algo_name(algo) + "_w8", error);
    c.expect(!d8.empty(), std::string(algo_name(algo)) + " w8: " + error);
    if (d1.empty() || d8.empty()) continue;

    for (const char* name :
         {"generations.csv", "controllers.csv", "controller_hash.csv", "best_genome.txt",
          "best_morphology.txt", "checkpoint.txt"}) {
      std::string a, b;
      c.expect(read_text_file((fs::path(d1) / name).string(), a, &error) &&
                   read_text_file((fs::path(d8) / name).string(), b, &error),
               std::string(name) + ": " + error);
      c.expect(a == b, std::string(algo_name(algo)) + " " + name + " differs across workers");
    }
    std::string r1, r8;
    c.expect(read_text_file((fs::path(d1) / "results.csv").string(), r1, &error) &&
                 read_text_file((fs::path(d8) / "results.csv").string(), r8, &error),
             std::string("results.csv: ") + error);
    c.expect(strip_last_column(r1) == strip_last_column(r8),
             std::string(algo_name(algo)) +
                 " results.csv differs across workers beyond the wall-time column");
  }

  // Protocol path: robustness samples must be bitwise worker-invariant.
  {
    VoxelGrid g = table_fixture(268);
    MaterialProperties props;
    SimConfig cfg;
    apply_desk_scale(props, cfg);
    cfg.duration = 0.25;
    Rng r1 = make_stream(19, "robustness");
    Rng r8 = make_stream(19, "robustness");
    RobustnessSummary s1 = robustness(g, 64, r1, props, cfg, default_simulate(), 1);
    RobustnessSummary s8 = robustness(g, 64, r8, props, cfg, default_simulate(), 8);
    c.expect(s1.samples == s8.samples && s1.mean == s8.mean,
             "robustness samples differ across workers");
  }
}

}  // namespace

int main() {
  Shared shared;
  shared.scratch = fs::temp_directory_path() / "voxbend_acceptance";
  std::error_code ec;
  fs::remove_all(shared.scratch, ec);
  fs::create_directories(shared.scratch, ec);
  if (ec) {
    std::cerr << "cannot create scratch directory: " << ec.message() << "\n";
    return 10;
  }

  struct Entry {
    std::string title;
    std::function<void(Criterion&)> run;
  };
  const std::vector<Entry> entries = {
      {"compatibility distance matches the worked examples exactly",
       [&](Criterion& c) { c1_distance(c); }},
      {"presence/material thresholds match a direct transliteration",
       [&](Criterion& c) { c2_thresholds(c); }},
      {"passive enclosure count: closed form equals brute force",
       [&](Criterion& c) { c3_enclosure(c); }},
      {"published voxel-count fixtures round-trip through both formats",
       [&](Criterion& c) { c4_fixtures(c, shared); }},
      {"simulator invariants: anchoring, equilibrium, symmetry, momentum, frequency, stability",
       [&](Criterion& c) { c5_simulator(c); }},
      {"afpo: monotone best, single newcomer, exact pareto fronts",
       [&](Criterion& c) { c6_afpo(c, shared); }},
      {"neat/hyperneat structure: speciation cover, innovation order, substrate weight law",
       [&](Criterion& c) { c7_structure(c); }},
      {"learning signal: every algorithm beats 2x the random baseline",
       [&](Criterion& c) { c8_learning(c, shared); }},
      {"protocol shapes: robustness 1000, sweep 9 rows, ablation 19 rows",
       [&](Criterion& c) { c9_protocols(c, shared); }},
      {"determinism: byte-identical artifacts for 1 vs 8 workers",
       [&](Criterion& c) { c10_determinism(c, shared); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Criterion c;
    try {
      entries[i].run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("unhandled exception: ") + e.what());
    }
    std::cout << (c.ok ? "[PASS] " : "[FAIL] ") << (i + 1) << ". " << entries[i].title << "\n";
    if (!c.ok) {
      ++failures;
      for (const auto& note : c.notes) std::cout << "       - " << note << "\n";
    }
    std::cout.flush();
  }
  std::cout << (entries.size() - static_cast<std::size_t>(failures)) << "/" << entries.size()
            << " criteria passed\n";
  return failures;
}
