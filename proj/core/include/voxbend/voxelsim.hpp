#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "voxbend/morphogen.hpp"

namespace voxbend {

struct MaterialProperties {
  double youngs_modulus = 5e6;   // Pa
  double poissons_ratio = 0.35;
  double static_friction = 1.0;  // stored for fidelity; no contacts are simulated
  double dynamic_friction = 0.5;
  double density = 1000.0;       // kg/m^3
  double actuation_amplitude = 0.5;  // fraction of rest volume
  double actuation_frequency = 4.0;  // Hz

  bool valid(std::string* why = nullptr) const;
};

enum class MotionConstraint : std::uint8_t { kNone = 0, kYzPlane };

struct SimConfig {
  double voxel_edge = 0.001;  // m
  double duration = 2.0;      // s
  double timestep = 0.0;      // 0 = stability bound; overrides are clamped to it
  double damping_ratio = 0.1;
  bool gravity = false;
  bool fix_end = true;  // anchor every node of the x = 0 face
  MotionConstraint constraint = MotionConstraint::kNone;
  bool record_trajectory = false;
  double trajectory_sample_dt = 0.01;  // s
};

// Mass-spring lattice over the corner nodes of present voxels. Every present
// voxel spreads rho*L^3/8 onto its 8 corners and contributes 12 edge springs
// (k = E*L each), 12 face diagonals and 4 body diagonals (k = E*L*nu/(1-nu)
// each); contributions meeting on the same node pair are summed into one
// spring. Rest lengths are captured from the initial geometry, so the
// untouched lattice is in exact equilibrium.
struct LatticeState {
  GridDims voxel_dims;
  double edge_length = 0.0;

  // Nodes (dense ids over corners touching at least one present voxel).
  std::vector<std::array<double, 3>> pos;
  std::vector<std::array<double, 3>> vel;
  std::vector<double> mass;
  std::vector<double> damping;  // per-node 2*zeta*sqrt(k_n*m_n)
  std::vector<std::uint8_t> fixed;
  std::vector<int> node_id;  // (X+1)(Y+1)(Z+1) x-major corner grid -> dense id or -1

  struct Spring {
    int a = 0;
    int b = 0;
    double k = 0.0;
    double rest0 = 0.0;
    double passive_weight = 1.0;  // stiffness fraction contributed by passive voxels
  };
  std::vector<Spring> springs;
  // Per-spring contractile contributions (CSR): actuated rest length is
  // rest0 * (passive_weight + sum w_i * rest_scale(phase_i)).
  std::vector<int> contrib_offset;
  std::vector<std::pair<int, double>> contrib;  // (contractile index, stiffness fraction)

  int contractile_count = 0;
  std::vector<int> tip_nodes;  // nodes on the x = X face (free tip)

  std::size_t corner_index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * (voxel_dims.y + 1) + j) * (voxel_dims.z + 1) + k;
  }
};

struct SimOutcome {
  std::array<double, 3> tip_initial{};
  std::array<double, 3> tip_final{};
  double displacement_yz = 0.0;  // in voxel-edge lengths
  int voxel_count = 0;
  bool diverged = false;
  std::vector<std::array<double, 4>> trajectory;  // (t, tip x, y, z) when recorded
};

// Fails (returns false, sets error) on a grid with no present voxels.
bool build_lattice(const VoxelGrid& grid, const MaterialProperties& props,
                   const SimConfig& cfg, LatticeState& out, std::string* error = nullptr);

// Stability bound 0.1*sqrt(m_min / k_max) with k_max the largest per-node
// incident stiffness sum.
double stable_timestep(const LatticeState& state);

// Edge multiplier (1 + A*sin(2*pi*f*t + phase))^(1/3): cubing it yields the
// +-A volumetric oscillation.
double rest_scale(double t, double phase, const MaterialProperties& props);

// One semi-implicit Euler step at time t: spring forces against actuated rest
// lengths, per-node viscous damping, optional gravity; velocities then
// positions; fixed nodes pinned. Returns false when any coordinate stops
// being finite (divergence).
bool step(LatticeState& state, double t, const std::vector<double>& phases,
          const MaterialProperties& props, const SimConfig& cfg, double dt);

// Full run: phases[i] drives the i-th contractile cell in x-major scan order
// (extra entries ignored; too few is an error). Divergence yields a flagged
// outcome with displacement 0.
SimOutcome simulate(const VoxelGrid& grid, const MaterialProperties& props,
                    const std::vector<double>& phases, const SimConfig& cfg);

}  // namespace voxbend
