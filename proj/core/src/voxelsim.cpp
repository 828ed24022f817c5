#include "voxbend/voxelsim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace voxbend {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;
constexpr double kGravity = 9.81;

struct SpringAccumulator {
  double k = 0.0;
  double rest0 = 0.0;
  double passive_k = 0.0;
  std::vector<std::pair<int, double>> contractile_k;  // (contractile index, k share)
};

}  // namespace

bool MaterialProperties::valid(std::string* why) const {
  auto fail = [&](const char* what) {
    if (why) *why = what;
    return false;
  };
  if (!(youngs_modulus > 0.0)) return fail("youngs_modulus must be positive");
  if (!(poissons_ratio >= 0.0 && poissons_ratio < 0.5))
    return fail("poissons_ratio must lie in [0, 0.5)");
  if (!(density > 0.0)) return fail("density must be positive");
  if (!(static_friction >= 0.0) || !(dynamic_friction >= 0.0))
    return fail("friction coefficients must be non-negative");
  if (!(actuation_amplitude >= 0.0 && actuation_amplitude < 1.0))
    return fail("actuation_amplitude must lie in [0, 1)");
  if (!(actuation_frequency > 0.0)) return fail("actuation_frequency must be positive");
  return true;
}

bool build_lattice(const VoxelGrid& grid, const MaterialProperties& props,
                   const SimConfig& cfg, LatticeState& out, std::string* error) {
  VoxelCounts counts = count_voxels(grid);
  if (counts.total == 0) {
    if (error) *error = "no present voxels to simulate";
    return false;
  }

  LatticeState s;
  s.voxel_dims = grid.dims;
  s.edge_length = cfg.voxel_edge;
  const int cx = grid.dims.x + 1;
  const int cy = grid.dims.y + 1;
  const int cz = grid.dims.z + 1;

  // Dense node ids over corners of present voxels, in corner-grid scan order.
  s.node_id.assign(static_cast<std::size_t>(cx) * cy * cz, -1);
  auto touches_present = [&](int i, int j, int k) {
    for (int dx = -1; dx <= 0; ++dx)
      for (int dy = -1; dy <= 0; ++dy)
        for (int dz = -1; dz <= 0; ++dz) {
          int vx = i + dx;
          int vy = j + dy;
          int vz = k + dz;
          if (vx < 0 || vy < 0 || vz < 0 || vx >= grid.dims.x || vy >= grid.dims.y ||
              vz >= grid.dims.z)
            continue;
          if (grid.present(vx, vy, vz)) return true;
        }
    return false;
  };
  const double L = cfg.voxel_edge;
  for (int i = 0; i < cx; ++i)
    for (int j = 0; j < cy; ++j)
      for (int k = 0; k < cz; ++k)
        if (touches_present(i, j, k)) {
          s.node_id[s.corner_index(i, j, k)] = static_cast<int>(s.pos.size());
          s.pos.push_back({i * L, j * L, k * L});
        }
  s.vel.assign(s.pos.size(), {0.0, 0.0, 0.0});
  s.mass.assign(s.pos.size(), 0.0);
  s.fixed.assign(s.pos.size(), 0);

  // The 28 corner pairs of one voxel: 12 edges, 12 face diagonals, 4 body
  // diagonals, as (corner index in 0..7, corner index, diagonal?).
  struct Pair {
    int a, b;
    bool diagonal;
  };
  static const std::vector<Pair> kPairs = [] {
    std::vector<Pair> pairs;
    for (int a = 0; a < 8; ++a)
      for (int b = a + 1; b < 8; ++b) {
        int differ = ((a ^ b) & 1) + ((a ^ b) >> 1 & 1) + ((a ^ b) >> 2 & 1);
        pairs.push_back({a, b, differ > 1});
      }
    return pairs;
  }();

  const double k_edge = props.youngs_modulus * L;
  const double k_diag = k_edge * props.poissons_ratio / (1.0 - props.poissons_ratio);
  const double corner_mass = props.density * L * L * L / 8.0;

  std::map<std::pair<int, int>, SpringAccumulator> merged;
  int contractile_index = 0;
  for (int x = 0; x < grid.dims.x; ++x)
    for (int y = 0; y < grid.dims.y; ++y)
      for (int z = 0; z < grid.dims.z; ++z) {
        if (!grid.present(x, y, z)) continue;
        bool contractile = grid.at(x, y, z) == Material::kContractile;
        int corner_node[8];
        for (int c = 0; c < 8; ++c) {
          int i = x + (c & 1);
          int j = y + ((c >> 1) & 1);
          int k = z + ((c >> 2) & 1);
          corner_node[c] = s.node_id[s.corner_index(i, j, k)];
          s.mass[static_cast<std::size_t>(corner_node[c])] += corner_mass;
        }
        for (const auto& p : kPairs) {
          int a = corner_node[p.a];
          int b = corner_node[p.b];
          auto key = std::minmax(a, b);
          SpringAccumulator& acc = merged[{key.first, key.second}];
          double k = p.diagonal ? k_diag : k_edge;
          acc.k += k;
          if (contractile)
            acc.contractile_k.emplace_back(contractile_index, k);
          else
            acc.passive_k += k;
        }
        if (contractile) ++contractile_index;
      }
  s.contractile_count = contractile_index;

  s.springs.reserve(merged.size());
  s.contrib_offset.reserve(merged.size() + 1);
  s.contrib_offset.push_back(0);
  for (const auto& [key, acc] : merged) {
    LatticeState::Spring sp;
    sp.a = key.first;
    sp.b = key.second;
    sp.k = acc.k;
    const auto& pa = s.pos[static_cast<std::size_t>(sp.a)];
    const auto& pb = s.pos[static_cast<std::size_t>(sp.b)];
    double dx = pb[0] - pa[0];
    double dy = pb[1] - pa[1];
    double dz = pb[2] - pa[2];
    sp.rest0 = std::sqrt(dx * dx + dy * dy + dz * dz);
    sp.passive_weight = acc.passive_k / acc.k;
    for (const auto& [idx, share] : acc.contractile_k)
      s.contrib.emplace_back(idx, share / acc.k);
    s.contrib_offset.push_back(static_cast<int>(s.contrib.size()));
    s.springs.push_back(sp);
  }

  double zeta = cfg.damping_ratio;
  std::vector<double> node_k(s.pos.size(), 0.0);
  for (const auto& sp : s.springs) {
    node_k[static_cast<std::size_t>(sp.a)] += sp.k;
    node_k[static_cast<std::size_t>(sp.b)] += sp.k;
  }
  s.damping.resize(s.pos.size());
  for (std::size_t n = 0; n < s.pos.size(); ++n)
    s.damping[n] = 2.0 * zeta * std::sqrt(node_k[n] * s.mass[n]);

  if (cfg.fix_end)
    for (int j = 0; j < cy; ++j)
      for (int k = 0; k < cz; ++k) {
        int id = s.node_id[s.corner_index(0, j, k)];
        if (id >= 0) s.fixed[static_cast<std::size_t>(id)] = 1;
      }
  for (int j = 0; j < cy; ++j)
    for (int k = 0; k < cz; ++k) {
      int id = s.node_id[s.corner_index(grid.dims.x, j, k)];
      if (id >= 0) s.tip_nodes.push_back(id);
    }

  out = std::move(s);
  return true;
}

double stable_timestep(const LatticeState& state) {
  std::vector<double> node_k(state.pos.size(), 0.0);
  for (const auto& sp : state.springs) {
    node_k[static_cast<std::size_t>(sp.a)] += sp.k;
    node_k[static_cast<std::size_t>(sp.b)] += sp.k;
  }
  double k_max = 0.0;
  for (double k : node_k) k_max = std::max(k_max, k);
  double m_min = *std::min_element(state.mass.begin(), state.mass.end());
  return 0.1 * std::sqrt(m_min / k_max);
}

double rest_scale(double t, double phase, const MaterialProperties& props) {
  return std::cbrt(1.0 + props.actuation_amplitude *
                             std::sin(kTwoPi * props.actuation_frequency * t + phase));
}

bool step(LatticeState& state, double t, const std::vector<double>& phases,
          const MaterialProperties& props, const SimConfig& cfg, double dt) {
  std::size_t n_nodes = state.pos.size();
  std::vector<std::array<double, 3>> force(n_nodes, {0.0, 0.0, 0.0});
  if (cfg.gravity)
    for (std::size_t n = 0; n < n_nodes; ++n) force[n][2] -= kGravity * state.mass[n];

  for (std::size_t i = 0; i < state.springs.size(); ++i) {
    const auto& sp = state.springs[i];
    const auto& pa = state.pos[static_cast<std::size_t>(sp.a)];
    const auto& pb = state.pos[static_cast<std::size_t>(sp.b)];
    double dx = pb[0] - pa[0];
    double dy = pb[1] - pa[1];
    double dz = pb[2] - pa[2];
    double len = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (len <= 0.0) continue;
    double rest = sp.passive_weight;
    for (int c = state.contrib_offset[i]; c < state.contrib_offset[i + 1]; ++c) {
      const auto& [idx, share] = state.contrib[static_cast<std::size_t>(c)];
      rest += share * rest_scale(t, phases[static_cast<std::size_t>(idx)], props);
    }
    rest *= sp.rest0;
    double f = sp.k * (len - rest) / len;  // pulls the pair together when stretched
    double fx = f * dx;
    double fy = f * dy;
    double fz = f * dz;
    auto& fa = force[static_cast<std::size_t>(sp.a)];
    auto& fb = force[static_cast<std::size_t>(sp.b)];
    fa[0] += fx;
    fa[1] += fy;
    fa[2] += fz;
    fb[0] -= fx;
    fb[1] -= fy;
    fb[2] -= fz;
  }

  bool finite = true;
  for (std::size_t n = 0; n < n_nodes; ++n) {
    if (state.fixed[n]) {
      state.vel[n] = {0.0, 0.0, 0.0};
      continue;
    }
    auto& v = state.vel[n];
    auto& p = state.pos[n];
    double inv_m = 1.0 / state.mass[n];
    for (int a = 0; a < 3; ++a) {
      v[a] += (force[n][a] - state.damping[n] * v[a]) * inv_m * dt;
    }
    if (cfg.constraint == MotionConstraint::kYzPlane) v[0] = 0.0;
    for (int a = 0; a < 3; ++a) {
      p[a] += v[a] * dt;
      finite = finite && std::isfinite(p[a]) && std::isfinite(v[a]);
    }
  }
  return finite;
}

SimOutcome simulate(const VoxelGrid& grid, const MaterialProperties& props,
                    const std::vector<double>& phases, const SimConfig& cfg) {
  LatticeState state;
  std::string error;
  if (!build_lattice(grid, props, cfg, state, &error))
    throw std::invalid_argument("build_lattice: " + error);
  if (static_cast<int>(phases.size()) < state.contractile_count)
    throw std::invalid_argument("need " + std::to_string(state.contractile_count) +
                                " phases, got " + std::to_string(phases.size()));

  auto tip = [&] {
    std::array<double, 3> c{};
    for (int id : state.tip_nodes)
      for (int a = 0; a < 3; ++a)
        c[a] += state.pos[static_cast<std::size_t>(id)][a] /
                static_cast<double>(state.tip_nodes.size());
    return c;
  };

  SimOutcome out;
  out.voxel_count = count_voxels(grid).total;
  out.tip_initial = tip();
  out.tip_final = out.tip_initial;

  double bound = stable_timestep(state);
  double dt = cfg.timestep > 0.0 ? std::min(cfg.timestep, bound) : bound;
  int steps = static_cast<int>(std::ceil(cfg.duration / dt));

  double next_sample = 0.0;
  if (cfg.record_trajectory) {
    out.trajectory.push_back({0.0, out.tip_initial[0], out.tip_initial[1],
                              out.tip_initial[2]});
    next_sample = cfg.trajectory_sample_dt;
  }

  for (int i = 0; i < steps; ++i) {
    if (!step(state, i * dt, phases, props, cfg, dt)) {
      out.diverged = true;
      out.displacement_yz = 0.0;
      return out;
    }
    if (cfg.record_trajectory) {
      double now = (i + 1) * dt;
      if (now >= next_sample) {
        auto c = tip();
        out.trajectory.push_back({now, c[0], c[1], c[2]});
        while (next_sample <= now) next_sample += cfg.trajectory_sample_dt;
      }
    }
  }

  out.tip_final = tip();
  double dy = out.tip_final[1] - out.tip_initial[1];
  double dz = out.tip_final[2] - out.tip_initial[2];
  out.displacement_yz = std::sqrt(dy * dy + dz * dz) / cfg.voxel_edge;
  return out;
}

}  // namespace voxbend
