#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "voxbend/morphogen.hpp"
#include "voxbend/rng.hpp"
#include "voxbend/voxelsim.hpp"

namespace voxbend {

// One actuation scenario: a stream of phase offsets in [0, 2*pi), one per
// contractile voxel in x-major scan order. Controllers are materialized to a
// fixed budget (the largest contractile count they may drive) and truncated
// per morphology, so one frozen controller applies to any individual.
struct PhaseController {
  int id = 0;
  std::vector<double> phases;
};

std::vector<PhaseController> sample_controllers(int n, int voxel_budget, Rng& rng);

// FNV-1a over ids and phase bit patterns; logged per generation to pin the
// frozen controller set.
std::uint64_t controller_set_hash(const std::vector<PhaseController>& controllers);

// Simulation entry point, injectable so protocol logic is testable against
// stub simulators.
using SimulateFn = std::function<SimOutcome(const VoxelGrid&, const MaterialProperties&,
                                            const std::vector<double>& phases,
                                            const SimConfig&)>;
SimulateFn default_simulate();

// Mean yz-displacement over the frozen controller set; diverged runs
// contribute 0. Simulations fan out over `workers` threads.
double aptitude(const VoxelGrid& grid, const std::vector<PhaseController>& controllers,
                const MaterialProperties& props, const SimConfig& cfg,
                const SimulateFn& sim, int workers);

struct RobustnessSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
  std::vector<double> samples;  // in controller order
};

// Aptitude under n fresh controllers sampled from `rng` (phases sized to the
// morphology's contractile count).
RobustnessSummary robustness(const VoxelGrid& grid, int n, Rng& rng,
                             const MaterialProperties& props, const SimConfig& cfg,
                             const SimulateFn& sim, int workers);

struct SweepRow {
  std::string property;  // "baseline", "youngs_modulus", "poissons_ratio"
  double delta = 0.0;    // fractional change, e.g. -0.1
  double value = 0.0;    // property value after perturbation
  RobustnessSummary summary;
};

// Baseline plus each property in {youngs_modulus, poissons_ratio} at deltas
// {-10%, -5%, +5%, +10%}, all evaluated on one controller set sampled from
// `seed` so rows differ only in material response. A perturbed Poisson ratio
// >= 0.5 aborts with an error.
bool material_sweep(const VoxelGrid& grid, int n, std::uint64_t seed,
                    const MaterialProperties& base, const SimConfig& cfg,
                    const SimulateFn& sim, int workers, std::vector<SweepRow>& out,
                    std::string* error = nullptr);

enum class AblationMode : std::uint8_t { kZeroPhase = 0, kDisable };

struct AblationRow {
  int slice = 0;  // 0 = unmodified baseline, 1..X-2 = interior x-slice
  int voxels_affected = 0;
  double displacement = 0.0;
};

// Scenario n copies the base controller and sets the phase of every
// contractile voxel with x == n to 0 (kZeroPhase) or freezes those voxels at
// rest scale 1 (kDisable).
std::vector<AblationRow> slice_ablation(const VoxelGrid& grid, const PhaseController& base,
                                        const MaterialProperties& props, const SimConfig& cfg,
                                        const SimulateFn& sim, int workers,
                                        AblationMode mode = AblationMode::kZeroPhase);

// Unit-scale physics profile (L = E = rho = 1) for fast runs: identical code
// path, ~1e2 integration steps per simulated second instead of the ~1e7 the
// millimeter/MPa defaults require.
void apply_desk_scale(MaterialProperties& props, SimConfig& cfg);

}  // namespace voxbend
