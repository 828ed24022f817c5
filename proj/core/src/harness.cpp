#include "voxbend/harness.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

#include "voxbend/parallel.hpp"

namespace voxbend {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

void fnv1a_u64(std::uint64_t& h, std::uint64_t v) {
  for (int byte = 0; byte < 8; ++byte) {
    h ^= (v >> (8 * byte)) & 0xffu;
    h *= 0x100000001b3ULL;
  }
}

// Per-controller displacements (diverged runs count 0), indexed like
// `controllers`; phases validated and truncated to the contractile count.
std::vector<double> controller_displacements(const VoxelGrid& grid,
                                             const std::vector<PhaseController>& controllers,
                                             const MaterialProperties& props,
                                             const SimConfig& cfg, const SimulateFn& sim,
                                             int workers) {
  std::size_t count = contractile_cells(grid).size();
  std::vector<std::vector<double>> phases(controllers.size());
  for (std::size_t i = 0; i < controllers.size(); ++i) {
    const auto& ctl = controllers[i];
    if (ctl.phases.size() < count)
      throw std::invalid_argument("controller " + std::to_string(ctl.id) + " holds " +
                                  std::to_string(ctl.phases.size()) + " phases but the morphology needs " +
                                  std::to_string(count));
    phases[i].assign(ctl.phases.begin(), ctl.phases.begin() + static_cast<std::ptrdiff_t>(count));
  }
  std::vector<double> disp(controllers.size(), 0.0);
  parallel_for(controllers.size(), workers, [&](std::size_t i) {
    SimOutcome out = sim(grid, props, phases[i], cfg);
    disp[i] = out.diverged ? 0.0 : out.displacement_yz;
  });
  return disp;
}

RobustnessSummary summarize(std::vector<double> samples) {
  RobustnessSummary s;
  s.samples = std::move(samples);
  if (s.samples.empty()) return s;
  double sum = 0.0;
  for (double d : s.samples) sum += d;
  s.mean = sum / static_cast<double>(s.samples.size());
  s.min = *std::min_element(s.samples.begin(), s.samples.end());
  s.max = *std::max_element(s.samples.begin(), s.samples.end());
  std::vector<double> sorted = s.samples;
  std::sort(sorted.begin(), sorted.end());
  std::size_t n = sorted.size();
  s.median = n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  return s;
}

}  // namespace

std::vector<PhaseController> sample_controllers(int n, int voxel_budget, Rng& rng) {
  std::vector<PhaseController> out(static_cast<std::size_t>(std::max(n, 0)));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].id = static_cast<int>(i);
    out[i].phases.resize(static_cast<std::size_t>(std::max(voxel_budget, 0)));
    for (double& p : out[i].phases) p = uniform_range(rng, 0.0, kTwoPi);
  }
  return out;
}

std::uint64_t controller_set_hash(const std::vector<PhaseController>& controllers) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& ctl : controllers) {
    fnv1a_u64(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(ctl.id)));
    for (double p : ctl.phases) fnv1a_u64(h, std::bit_cast<std::uint64_t>(p));
  }
  return h;
}

SimulateFn default_simulate() {
  return [](const VoxelGrid& grid, const MaterialProperties& props,
            const std::vector<double>& phases, const SimConfig& cfg) {
    return simulate(grid, props, phases, cfg);
  };
}

double aptitude(const VoxelGrid& grid, const std::vector<PhaseController>& controllers,
                const MaterialProperties& props, const SimConfig& cfg,
                const SimulateFn& sim, int workers) {
  if (controllers.empty()) return 0.0;
  std::vector<double> disp = controller_displacements(grid, controllers, props, cfg, sim, workers);
  // Sum in ascending controller-id order: the mean is then exactly invariant
  // to both the vector order and the worker count.
  std::vector<std::size_t> order(controllers.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return controllers[a].id < controllers[b].id; });
  double sum = 0.0;
  for (std::size_t i : order) sum += disp[i];
  return sum / static_cast<double>(controllers.size());
}

RobustnessSummary robustness(const VoxelGrid& grid, int n, Rng& rng,
                             const MaterialProperties& props, const SimConfig& cfg,
                             const SimulateFn& sim, int workers) {
  int count = static_cast<int>(contractile_cells(grid).size());
  std::vector<PhaseController> controllers = sample_controllers(n, count, rng);
  return summarize(controller_displacements(grid, controllers, props, cfg, sim, workers));
}

bool material_sweep(const VoxelGrid& grid, int n, std::uint64_t seed,
                    const MaterialProperties& base, const SimConfig& cfg,
                    const SimulateFn& sim, int workers, std::vector<SweepRow>& out,
                    std::string* error) {
  static constexpr double kDeltas[4] = {-0.10, -0.05, 0.05, 0.10};

  struct RowSpec {
    std::string property;
    double delta;
    double value;
    MaterialProperties props;
  };
  std::vector<RowSpec> specs;
  specs.push_back({"baseline", 0.0, 0.0, base});
  for (double d : kDeltas) {
    MaterialProperties p = base;
    p.youngs_modulus = base.youngs_modulus * (1.0 + d);
    specs.push_back({"youngs_modulus", d, p.youngs_modulus, p});
  }
  for (double d : kDeltas) {
    MaterialProperties p = base;
    p.poissons_ratio = base.poissons_ratio * (1.0 + d);
    specs.push_back({"poissons_ratio", d, p.poissons_ratio, p});
  }
  for (const auto& spec : specs) {
    std::string why;
    if (!spec.props.valid(&why)) {
      if (error)
        *error = spec.property + " at delta " + std::to_string(spec.delta) +
                 " leaves the material invalid: " + why;
      return false;
    }
  }

  int count = static_cast<int>(contractile_cells(grid).size());
  Rng rng(seed);
  std::vector<PhaseController> controllers = sample_controllers(n, count, rng);

  out.clear();
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    SweepRow row;
    row.property = spec.property;
    row.delta = spec.delta;
    row.value = spec.value;
    row.summary =
        summarize(controller_displacements(grid, controllers, spec.props, cfg, sim, workers));
    out.push_back(std::move(row));
  }
  return true;
}

std::vector<AblationRow> slice_ablation(const VoxelGrid& grid, const PhaseController& base,
                                        const MaterialProperties& props, const SimConfig& cfg,
                                        const SimulateFn& sim, int workers, AblationMode mode) {
  std::vector<std::array<int, 3>> cells = contractile_cells(grid);
  std::size_t count = cells.size();
  if (base.phases.size() < count)
    throw std::invalid_argument("controller holds " + std::to_string(base.phases.size()) +
                                " phases but the morphology needs " + std::to_string(count));
  std::vector<double> trunc(base.phases.begin(),
                            base.phases.begin() + static_cast<std::ptrdiff_t>(count));

  std::size_t n_rows = static_cast<std::size_t>(std::max(grid.dims.x - 1, 1));
  std::vector<AblationRow> rows(n_rows);
  parallel_for(n_rows, workers, [&](std::size_t r) {
    AblationRow row;
    row.slice = static_cast<int>(r);
    SimOutcome out;
    if (r == 0) {
      out = sim(grid, props, trunc, cfg);
    } else {
      std::vector<std::size_t> hit;
      for (std::size_t i = 0; i < count; ++i)
        if (cells[i][0] == row.slice) hit.push_back(i);
      row.voxels_affected = static_cast<int>(hit.size());
      if (mode == AblationMode::kZeroPhase) {
        std::vector<double> phases = trunc;
        for (std::size_t i : hit) phases[i] = 0.0;
        out = sim(grid, props, phases, cfg);
      } else {
        VoxelGrid frozen = grid;
        std::vector<bool> drop(count, false);
        for (std::size_t i : hit) {
          frozen.set(cells[i][0], cells[i][1], cells[i][2], Material::kPassive);
          drop[i] = true;
        }
        std::vector<double> phases;
        phases.reserve(count - hit.size());
        for (std::size_t i = 0; i < count; ++i)
          if (!drop[i]) phases.push_back(trunc[i]);
        out = sim(frozen, props, phases, cfg);
      }
    }
    row.displacement = out.diverged ? 0.0 : out.displacement_yz;
    rows[r] = row;
  });
  return rows;
}

void apply_desk_scale(MaterialProperties& props, SimConfig& cfg) {
  props.youngs_modulus = 1.0;
  props.density = 1.0;
  cfg.voxel_edge = 1.0;
}

}  // namespace voxbend
