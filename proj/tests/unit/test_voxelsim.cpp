#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "voxbend/voxelsim.hpp"

using namespace voxbend;

namespace {

constexpr double kPi = 3.14159265358979323846;

MaterialProperties desk_props() {
  MaterialProperties p;
  p.youngs_modulus = 1.0;
  p.density = 1.0;
  return p;
}

SimConfig desk_cfg(double duration = 1.0) {
  SimConfig c;
  c.voxel_edge = 1.0;
  c.duration = duration;
  return c;
}

// Shell-passive grid with an explicit list of interior contractile cells.
VoxelGrid shelled(GridDims d, const std::vector<std::array<int, 3>>& contractile) {
  VoxelGrid g(d);
  for (int x = 0; x < d.x; ++x)
    for (int y = 0; y < d.y; ++y)
      for (int z = 0; z < d.z; ++z)
        if (g.is_enclosure(x, y, z)) g.set(x, y, z, Material::kPassive);
  for (const auto& c : contractile) g.set(c[0], c[1], c[2], Material::kContractile);
  return g;
}

double node_stiffness_max(const LatticeState& s) {
  std::vector<double> k(s.pos.size(), 0.0);
  for (const auto& sp : s.springs) {
    k[static_cast<std::size_t>(sp.a)] += sp.k;
    k[static_cast<std::size_t>(sp.b)] += sp.k;
  }
  return *std::max_element(k.begin(), k.end());
}

double kinetic_energy(const LatticeState& s) {
  double e = 0.0;
  for (std::size_t i = 0; i < s.pos.size(); ++i) {
    const auto& v = s.vel[i];
    e += 0.5 * s.mass[i] * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  }
  return e;
}

}  // namespace

TEST_SUITE("voxelsim") {

TEST_CASE("single voxel lattice combinatorics") {
  VoxelGrid g({1, 1, 1});
  g.set(0, 0, 0, Material::kPassive);
  MaterialProperties props = desk_props();
  props.youngs_modulus = 5.0;
  props.density = 2.0;
  SimConfig cfg = desk_cfg();
  cfg.voxel_edge = 0.5;
  cfg.fix_end = false;

  LatticeState s;
  REQUIRE(build_lattice(g, props, cfg, s));
  CHECK(s.pos.size() == 8);
  CHECK(s.springs.size() == 28);  // 12 edges + 12 face diagonals + 4 body diagonals

  double L = cfg.voxel_edge;
  for (double m : s.mass) CHECK(m == doctest::Approx(props.density * L * L * L / 8).epsilon(1e-15));

  double ke = props.youngs_modulus * L;
  double kd = ke * props.poissons_ratio / (1.0 - props.poissons_ratio);
  int edges = 0, face_diag = 0, body_diag = 0;
  for (const auto& sp : s.springs) {
    if (std::fabs(sp.rest0 - L) < 1e-12) {
      CHECK(sp.k == doctest::Approx(ke).epsilon(1e-12));
      ++edges;
    } else if (std::fabs(sp.rest0 - L * std::sqrt(2.0)) < 1e-12) {
      CHECK(sp.k == doctest::Approx(kd).epsilon(1e-12));
      ++face_diag;
    } else {
      CHECK(sp.rest0 == doctest::Approx(L * std::sqrt(3.0)).epsilon(1e-12));
      CHECK(sp.k == doctest::Approx(kd).epsilon(1e-12));
      ++body_diag;
    }
  }
  CHECK(edges == 12);
  CHECK(face_diag == 12);
  CHECK(body_diag == 4);

  // Stability bound straight from the built lattice.
  double m_min = *std::min_element(s.mass.begin(), s.mass.end());
  CHECK(stable_timestep(s) ==
        doctest::Approx(0.1 * std::sqrt(m_min / node_stiffness_max(s))).epsilon(1e-14));
}

TEST_CASE("shared springs are merged with summed stiffness") {
  VoxelGrid g({2, 1, 1});
  g.set(0, 0, 0, Material::kPassive);
  g.set(1, 0, 0, Material::kPassive);
  MaterialProperties props = desk_props();
  SimConfig cfg = desk_cfg();
  cfg.fix_end = false;

  LatticeState s;
  REQUIRE(build_lattice(g, props, cfg, s));
  CHECK(s.pos.size() == 12);
  // 2 * 28 contributions minus the shared face: 4 edges + 2 diagonals merge.
  CHECK(s.springs.size() == 50);

  double ke = props.youngs_modulus * cfg.voxel_edge;
  double kd = ke * props.poissons_ratio / (1.0 - props.poissons_ratio);
  int doubled_edges = 0, doubled_diags = 0;
  for (const auto& sp : s.springs) {
    if (sp.k == doctest::Approx(2.0 * ke).epsilon(1e-12) &&
        std::fabs(sp.rest0 - 1.0) < 1e-12)
      ++doubled_edges;
    if (sp.k == doctest::Approx(2.0 * kd).epsilon(1e-12) &&
        std::fabs(sp.rest0 - std::sqrt(2.0)) < 1e-12)
      ++doubled_diags;
  }
  CHECK(doubled_edges == 4);  // the shared face's edges
  CHECK(doubled_diags == 2);  // and its two diagonals
}

TEST_CASE("full default grid has 1701 candidate corners") {
  VoxelGrid g = shelled({20, 8, 8}, {});
  for (int x = 1; x < 19; ++x)
    for (int y = 1; y < 7; ++y)
      for (int z = 1; z < 7; ++z) g.set(x, y, z, Material::kPassive);
  LatticeState s;
  REQUIRE(build_lattice(g, desk_props(), desk_cfg(), s));
  CHECK(s.pos.size() == 21u * 9u * 9u);
}

TEST_CASE("rest_scale endpoints") {
  MaterialProperties props;  // A = 0.5, f = 4
  CHECK(rest_scale(0.0, 0.0, props) == 1.0);
  CHECK(rest_scale(0.0, kPi / 2, props) == doctest::Approx(1.1447142425533319).epsilon(1e-12));
  CHECK(rest_scale(0.0, -kPi / 2, props) == doctest::Approx(0.7937005259840998).epsilon(1e-12));
  // Cubing the edge multiplier recovers the +-50% volume swing.
  double vol = std::pow(rest_scale(0.0, kPi / 2, props), 3.0);
  CHECK(vol == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("untouched passive body stays in equilibrium") {
  VoxelGrid g = shelled({5, 3, 3}, {});
  MaterialProperties props = desk_props();
  SimConfig cfg = desk_cfg();
  LatticeState s;
  REQUIRE(build_lattice(g, props, cfg, s));
  auto initial = s.pos;
  double dt = stable_timestep(s);
  for (int i = 0; i < 200; ++i)
    REQUIRE(step(s, i * dt, {}, props, cfg, dt));
  for (std::size_t n = 0; n < s.pos.size(); ++n)
    for (int a = 0; a < 3; ++a)
      CHECK(std::fabs(s.pos[n][a] - initial[n][a]) <= 1e-12);
}

TEST_CASE("fixed end never moves under actuation") {
  VoxelGrid g = shelled({6, 4, 4}, {{2, 1, 1}, {3, 2, 2}, {4, 1, 2}});
  MaterialProperties props = desk_props();
  SimConfig cfg = desk_cfg(2.0);
  LatticeState s;
  REQUIRE(build_lattice(g, props, cfg, s));
  std::vector<std::array<double, 3>> anchored;
  std::vector<std::size_t> fixed_ids;
  for (std::size_t n = 0; n < s.pos.size(); ++n)
    if (s.fixed[n]) {
      fixed_ids.push_back(n);
      anchored.push_back(s.pos[n]);
    }
  REQUIRE(fixed_ids.size() == 5u * 5u);  // whole x = 0 corner face of a 4x4 section

  std::vector<double> phases = {0.0, 1.5, 3.0};
  double dt = stable_timestep(s);
  int steps = static_cast<int>(std::ceil(cfg.duration / dt));
  for (int i = 0; i < steps; ++i)
    REQUIRE(step(s, i * dt, phases, props, cfg, dt));
  for (std::size_t i = 0; i < fixed_ids.size(); ++i)
    for (int a = 0; a < 3; ++a)
      CHECK(std::fabs(s.pos[fixed_ids[i]][a] - anchored[i][a]) <= 1e-12);
}

TEST_CASE("two-node oscillator matches the analytic frequency") {
  // Hand-built lattice: masses 1 and 3 joined by one spring k = 7 stretched
  // 20% past rest; no damping, nothing fixed.
  LatticeState s;
  s.voxel_dims = {1, 1, 1};
  s.edge_length = 1.0;
  s.pos = {{0, 0, 0}, {1.2, 0, 0}};
  s.vel = {{0, 0, 0}, {0, 0, 0}};
  s.mass = {1.0, 3.0};
  s.damping = {0.0, 0.0};
  s.fixed = {0, 0};
  s.springs.push_back({0, 1, 7.0, 1.0, 1.0});
  s.contrib_offset = {0, 0};
  s.contractile_count = 0;

  MaterialProperties props = desk_props();
  SimConfig cfg = desk_cfg();
  double bound = stable_timestep(s);
  CHECK(bound == doctest::Approx(0.1 * std::sqrt(1.0 / 7.0)).epsilon(1e-14));
  double dt = bound / 10.0;

  // Reduced mass 3/4 -> f = sqrt(k/mu)/2pi.
  const double f_analytic = 0.4862263826299997;
  double prev = s.pos[1][0] - s.pos[0][0] - 1.0;
  double first_cross = -1.0, last_cross = -1.0;
  int crossings = 0;
  int steps = static_cast<int>(std::ceil(10.0 / f_analytic / dt));
  for (int i = 0; i < steps; ++i) {
    REQUIRE(step(s, i * dt, {}, props, cfg, dt));
    double cur = s.pos[1][0] - s.pos[0][0] - 1.0;
    if ((prev > 0) != (cur > 0)) {
      double t_cross = i * dt + dt * prev / (prev - cur);
      if (first_cross < 0) first_cross = t_cross;
      last_cross = t_cross;
      ++crossings;
    }
    prev = cur;
  }
  REQUIRE(crossings > 4);
  double f_measured = (crossings - 1) / (2.0 * (last_cross - first_cross));
  CHECK(std::fabs(f_measured - f_analytic) / f_analytic < 0.01);
}

TEST_CASE("free contractile voxel conserves its centroid") {
  VoxelGrid g({1, 1, 1});
  g.set(0, 0, 0, Material::kContractile);
  MaterialProperties props = desk_props();
  SimConfig cfg = desk_cfg();
  cfg.fix_end = false;

  LatticeState s;
  REQUIRE(build_lattice(g, props, cfg, s));
  REQUIRE(s.contractile_count == 1);

  auto centroid = [&] {
    std::array<double, 3> c{};
    for (const auto& p : s.pos)
      for (int a = 0; a < 3; ++a) c[a] += p[a] / static_cast<double>(s.pos.size());
    return c;
  };
  auto c0 = centroid();
  double dt = stable_timestep(s);
  double period = 1.0 / props.actuation_frequency;
  int steps = static_cast<int>(std::ceil(period / dt));
  std::vector<double> phases = {0.7};
  for (int i = 0; i < steps; ++i)
    REQUIRE(step(s, i * dt, phases, props, cfg, dt));
  auto c1 = centroid();
  for (int a = 0; a < 3; ++a)
    CHECK(std::fabs(c1[a] - c0[a]) <= 1e-9 * cfg.voxel_edge);
}

TEST_CASE("all-passive morphology does not displace") {
  VoxelGrid g = shelled({5, 3, 3}, {});
  SimOutcome out = simulate(g, desk_props(), {}, desk_cfg(2.0));
  CHECK_FALSE(out.diverged);
  CHECK(out.displacement_yz <= 1e-6);
  CHECK(out.voxel_count == count_voxels(g).total);
}

TEST_CASE("y-mirrored morphology and phases displace identically") {
  GridDims d{6, 4, 4};
  std::vector<std::array<int, 3>> cells = {{1, 1, 1}, {2, 1, 2}, {3, 2, 1}, {4, 2, 2}};
  std::vector<double> phases = {0.3, 1.2, 2.5, 4.0};  // x-major order of `cells`

  std::vector<std::array<int, 3>> mirrored;
  std::map<std::array<int, 3>, double> phase_of;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::array<int, 3> m = {cells[i][0], d.y - 1 - cells[i][1], cells[i][2]};
    mirrored.push_back(m);
    phase_of[m] = phases[i];
  }
  VoxelGrid a = shelled(d, cells);
  VoxelGrid b = shelled(d, mirrored);
  std::vector<double> phases_b;
  for (const auto& c : contractile_cells(b)) {
    REQUIRE(phase_of.count(c) == 1);
    phases_b.push_back(phase_of[c]);
  }

  SimOutcome oa = simulate(a, desk_props(), phases, desk_cfg());
  SimOutcome ob = simulate(b, desk_props(), phases_b, desk_cfg());
  REQUIRE_FALSE(oa.diverged);
  REQUIRE_FALSE(ob.diverged);
  CHECK(std::fabs(oa.displacement_yz - ob.displacement_yz) <= 1e-6);
  CHECK(oa.displacement_yz > 0.0);  // asymmetric actuation must bend the tube
}

TEST_CASE("damping dissipates total energy") {
  VoxelGrid g = shelled({4, 3, 3}, {});
  MaterialProperties props = desk_props();
  SimConfig cfg = desk_cfg();
  cfg.fix_end = false;
  LatticeState s;
  REQUIRE(build_lattice(g, props, cfg, s));
  // Kick the nodes with a smooth shear profile.
  for (std::size_t n = 0; n < s.pos.size(); ++n)
    s.vel[n] = {0.0, 0.05 * std::sin(s.pos[n][0]), 0.05 * std::cos(s.pos[n][2])};

  auto total_energy = [&] {
    double e = kinetic_energy(s);
    for (const auto& sp : s.springs) {
      double dx = s.pos[static_cast<std::size_t>(sp.b)][0] - s.pos[static_cast<std::size_t>(sp.a)][0];
      double dy = s.pos[static_cast<std::size_t>(sp.b)][1] - s.pos[static_cast<std::size_t>(sp.a)][1];
      double dz = s.pos[static_cast<std::size_t>(sp.b)][2] - s.pos[static_cast<std::size_t>(sp.a)][2];
      double stretch = std::sqrt(dx * dx + dy * dy + dz * dz) - sp.rest0;
      e += 0.5 * sp.k * stretch * stretch;
    }
    return e;
  };

  double dt = stable_timestep(s);
  double e0 = total_energy();
  double prev = e0;
  for (int window = 0; window < 20; ++window) {
    for (int i = 0; i < 100; ++i)
      REQUIRE(step(s, (window * 100 + i) * dt, {}, props, cfg, dt));
    double cur = total_energy();
    CHECK(cur <= prev + 1e-6 * e0);  // slack for the symplectic energy wobble
    prev = cur;
  }
  CHECK(prev < 0.5 * e0);
}

TEST_CASE("simulation outcome is deterministic") {
  VoxelGrid g = shelled({6, 4, 4}, {{2, 1, 1}, {3, 2, 2}});
  std::vector<double> phases = {0.4, 2.2};
  SimConfig cfg = desk_cfg();
  cfg.record_trajectory = true;
  SimOutcome a = simulate(g, desk_props(), phases, cfg);
  SimOutcome b = simulate(g, desk_props(), phases, cfg);
  CHECK(a.tip_final == b.tip_final);
  CHECK(a.displacement_yz == b.displacement_yz);
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  CHECK(!a.trajectory.empty());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) CHECK(a.trajectory[i] == b.trajectory[i]);
  for (std::size_t i = 1; i < a.trajectory.size(); ++i)
    CHECK(a.trajectory[i][0] > a.trajectory[i - 1][0]);
}

TEST_CASE("oversized explicit timestep diverges at the step level") {
  LatticeState s;
  s.voxel_dims = {1, 1, 1};
  s.edge_length = 1.0;
  s.pos = {{0, 0, 0}, {1.5, 0, 0}};
  s.vel = {{0, 0, 0}, {0, 0, 0}};
  s.mass = {1.0, 1.0};
  s.damping = {0.0, 0.0};
  s.fixed = {0, 0};
  s.springs.push_back({0, 1, 7.0, 1.0, 1.0});
  s.contrib_offset = {0, 0};
  s.contractile_count = 0;

  MaterialProperties props = desk_props();
  SimConfig cfg = desk_cfg();
  double dt = stable_timestep(s) * 100.0;
  bool diverged = false;
  for (int i = 0; i < 10000 && !diverged; ++i) diverged = !step(s, i * dt, {}, props, cfg, dt);
  CHECK(diverged);
}

TEST_CASE("simulate clamps explicit timesteps to the stability bound") {
  VoxelGrid g = shelled({5, 3, 3}, {{2, 1, 1}});
  SimConfig cfg = desk_cfg();
  cfg.timestep = 1e9;  // absurd override: must be clamped, not obeyed
  SimOutcome out = simulate(g, desk_props(), {0.0}, cfg);
  CHECK_FALSE(out.diverged);
}

TEST_CASE("yz-plane constraint freezes x coordinates") {
  VoxelGrid g = shelled({6, 4, 4}, {{2, 1, 1}, {3, 2, 2}});
  MaterialProperties props = desk_props();
  SimConfig cfg = desk_cfg();
  cfg.constraint = MotionConstraint::kYzPlane;
  LatticeState s;
  REQUIRE(build_lattice(g, props, cfg, s));
  std::vector<double> x0;
  for (const auto& p : s.pos) x0.push_back(p[0]);
  std::vector<double> phases = {0.4, 2.2};
  double dt = stable_timestep(s);
  for (int i = 0; i < 500; ++i) REQUIRE(step(s, i * dt, phases, props, cfg, dt));
  for (std::size_t n = 0; n < s.pos.size(); ++n)
    CHECK(s.pos[n][0] == x0[n]);
}

TEST_CASE("empty grids are rejected") {
  VoxelGrid g({4, 3, 3});
  LatticeState s;
  std::string error;
  CHECK_FALSE(build_lattice(g, desk_props(), desk_cfg(), s, &error));
  CHECK(!error.empty());
}

TEST_CASE("missing phases are a contract violation") {
  VoxelGrid g = shelled({5, 3, 3}, {{1, 1, 1}, {2, 1, 1}});
  CHECK_THROWS(simulate(g, desk_props(), {0.1}, desk_cfg()));
}

TEST_CASE("material validation") {
  MaterialProperties p;
  CHECK(p.valid());
  p.poissons_ratio = 0.5;
  CHECK_FALSE(p.valid());
  p = MaterialProperties{};
  p.youngs_modulus = 0.0;
  CHECK_FALSE(p.valid());
  p = MaterialProperties{};
  p.actuation_amplitude = 1.0;
  CHECK_FALSE(p.valid());
}

}  // TEST_SUITE
