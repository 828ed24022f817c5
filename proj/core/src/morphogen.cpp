#include "voxbend/morphogen.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "voxbend/csv.hpp"

namespace voxbend {

namespace {

constexpr char kBinaryMagic[4] = {'V', 'O', 'X', 'B'};

Material material_from_field(double v, double m) {
  if (std::fabs(v) < 0.5) return Material::kEmpty;
  return std::fabs(m) < 0.5 ? Material::kPassive : Material::kContractile;
}

bool enclosure_intact(const VoxelGrid& g, std::string* error) {
  for (int x = 0; x < g.dims.x; ++x)
    for (int y = 0; y < g.dims.y; ++y)
      for (int z = 0; z < g.dims.z; ++z)
        if (g.is_enclosure(x, y, z) && g.at(x, y, z) != Material::kPassive) {
          if (error)
            *error = "enclosure cell (" + std::to_string(x) + "," + std::to_string(y) +
                     "," + std::to_string(z) + ") is not passive";
          return false;
        }
  return true;
}

void prune_disconnected(VoxelGrid& g) {
  std::vector<std::uint8_t> reached(g.cells.size(), 0);
  std::vector<std::array<int, 3>> stack;
  for (int x = 0; x < g.dims.x; ++x)
    for (int y = 0; y < g.dims.y; ++y)
      for (int z = 0; z < g.dims.z; ++z)
        if (g.is_enclosure(x, y, z) && g.present(x, y, z)) {
          reached[g.index(x, y, z)] = 1;
          stack.push_back({x, y, z});
        }
  constexpr int kStep[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                               {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
  while (!stack.empty()) {
    auto [x, y, z] = stack.back();
    stack.pop_back();
    for (const auto& s : kStep) {
      int nx = x + s[0];
      int ny = y + s[1];
      int nz = z + s[2];
      if (nx < 0 || ny < 0 || nz < 0 || nx >= g.dims.x || ny >= g.dims.y ||
          nz >= g.dims.z)
        continue;
      std::size_t at = g.index(nx, ny, nz);
      if (reached[at] || !g.present(nx, ny, nz)) continue;
      reached[at] = 1;
      stack.push_back({nx, ny, nz});
    }
  }
  for (std::size_t i = 0; i < g.cells.size(); ++i)
    if (!reached[i]) g.cells[i] = Material::kEmpty;
}

}  // namespace

int passive_enclosure_count(GridDims dims) {
  if (dims.x < 3 || dims.y < 3 || dims.z < 3) return -1;
  return dims.x * dims.y * dims.z - (dims.x - 2) * (dims.y - 2) * (dims.z - 2);
}

VoxelGrid generate(GridDims dims, const MorphogenConfig& cfg, const FieldQuery& query) {
  VoxelGrid g(dims);
  for (int x = 0; x < dims.x; ++x)
    for (int y = 0; y < dims.y; ++y)
      for (int z = 0; z < dims.z; ++z) {
        if (g.is_enclosure(x, y, z)) {
          g.set(x, y, z, Material::kPassive);
          continue;
        }
        auto [v, m] = query(normalized_coordinate(x, dims.x),
                            normalized_coordinate(y, dims.y),
                            normalized_coordinate(z, dims.z));
        Material mat = material_from_field(v, m);
        if (cfg.forbid_interior_passive && mat == Material::kPassive)
          mat = Material::kEmpty;
        g.set(x, y, z, mat);
      }
  if (cfg.prune_floating) prune_disconnected(g);
  return g;
}

VoxelGrid generate_from_cppn(const Genome& cppn, GridDims dims,
                             const MorphogenConfig& cfg) {
  CppnEvaluator eval(cppn);
  return generate(dims, cfg, [&](double nx, double ny, double nz) {
    auto out = eval.evaluate({nx, ny, nz});
    return std::array<double, 2>{out[0], out[1]};
  });
}

VoxelGrid generate_from_substrate(const SubstrateNetwork& net, GridDims dims,
                                  const MorphogenConfig& cfg) {
  return generate(dims, cfg, [&](double nx, double ny, double nz) {
    return query_substrate(net, {nx, ny, nz});
  });
}

VoxelCounts count_voxels(const VoxelGrid& grid) {
  VoxelCounts c;
  for (Material m : grid.cells) {
    if (m == Material::kEmpty) continue;
    ++c.total;
    if (m == Material::kPassive)
      ++c.passive;
    else
      ++c.contractile;
  }
  return c;
}

std::vector<std::array<int, 3>> contractile_cells(const VoxelGrid& grid) {
  std::vector<std::array<int, 3>> cells;
  for (int x = 0; x < grid.dims.x; ++x)
    for (int y = 0; y < grid.dims.y; ++y)
      for (int z = 0; z < grid.dims.z; ++z)
        if (grid.at(x, y, z) == Material::kContractile) cells.push_back({x, y, z});
  return cells;
}

std::string grid_to_text(const VoxelGrid& grid) {
  std::string out = "voxels " + std::to_string(grid.dims.x) + " " +
                    std::to_string(grid.dims.y) + " " + std::to_string(grid.dims.z) +
                    "\n";
  out += "legend 0=empty 1=passive 3=contractile\n";
  for (int x = 0; x < grid.dims.x; ++x)
    for (int y = 0; y < grid.dims.y; ++y) {
      for (int z = 0; z < grid.dims.z; ++z)
        out += static_cast<char>('0' + static_cast<int>(grid.at(x, y, z)));
      out += "\n";
    }
  return out;
}

bool grid_from_text(const std::string& text, VoxelGrid& out, std::string* error) {
  auto fail = [&](const std::string& why) {
    if (error) *error = why;
    return false;
  };
  std::istringstream in(text);
  std::string tag;
  GridDims d;
  if (!(in >> tag >> d.x >> d.y >> d.z) || tag != "voxels")
    return fail("missing voxels header");
  if (d.x < 3 || d.y < 3 || d.z < 3) return fail("grid needs at least 3 cells per axis");
  std::string legend;
  if (!(in >> tag) || tag != "legend") return fail("missing legend");
  std::getline(in, legend);
  VoxelGrid g(d);
  for (int x = 0; x < d.x; ++x)
    for (int y = 0; y < d.y; ++y) {
      std::string row;
      if (!(in >> row) || static_cast<int>(row.size()) != d.z)
        return fail("bad row length at x=" + std::to_string(x) +
                    " y=" + std::to_string(y));
      for (int z = 0; z < d.z; ++z) {
        char c = row[static_cast<std::size_t>(z)];
        if (c == '0')
          g.set(x, y, z, Material::kEmpty);
        else if (c == '1')
          g.set(x, y, z, Material::kPassive);
        else if (c == '3')
          g.set(x, y, z, Material::kContractile);
        else
          return fail(std::string("unknown material code '") + c + "'");
      }
    }
  if (!enclosure_intact(g, error)) return false;
  out = std::move(g);
  return true;
}

std::vector<std::uint8_t> grid_to_binary(const VoxelGrid& grid) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(16 + grid.cells.size());
  for (char c : kBinaryMagic) bytes.push_back(static_cast<std::uint8_t>(c));
  auto push_u32 = [&](std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8)
      bytes.push_back(static_cast<std::uint8_t>((v >> shift) & 0xff));
  };
  push_u32(static_cast<std::uint32_t>(grid.dims.x));
  push_u32(static_cast<std::uint32_t>(grid.dims.y));
  push_u32(static_cast<std::uint32_t>(grid.dims.z));
  for (Material m : grid.cells) bytes.push_back(static_cast<std::uint8_t>(m));
  return bytes;
}

bool grid_from_binary(const std::vector<std::uint8_t>& bytes, VoxelGrid& out,
                      std::string* error) {
  auto fail = [&](const std::string& why) {
    if (error) *error = why;
    return false;
  };
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kBinaryMagic, 4) != 0)
    return fail("not a voxel binary");
  auto read_u32 = [&](std::size_t at) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes[at + k]) << (8 * k);
    return v;
  };
  GridDims d;
  d.x = static_cast<int>(read_u32(4));
  d.y = static_cast<int>(read_u32(8));
  d.z = static_cast<int>(read_u32(12));
  if (d.x < 3 || d.y < 3 || d.z < 3) return fail("grid needs at least 3 cells per axis");
  std::size_t cells = static_cast<std::size_t>(d.x) * d.y * d.z;
  if (bytes.size() != 16 + cells) return fail("voxel payload size mismatch");
  VoxelGrid g(d);
  for (std::size_t i = 0; i < cells; ++i) {
    std::uint8_t code = bytes[16 + i];
    if (code != 0 && code != 1 && code != 3)
      return fail("unknown material code " + std::to_string(code));
    g.cells[i] = static_cast<Material>(code);
  }
  if (!enclosure_intact(g, error)) return false;
  out = std::move(g);
  return true;
}

bool save_grid(const VoxelGrid& grid, const std::string& path, std::string* error) {
  return write_text_file(path, grid_to_text(grid), error);
}

bool load_grid(const std::string& path, VoxelGrid& out, std::string* error) {
  std::string text;
  if (!read_text_file(path, text, error)) return false;
  if (text.size() >= sizeof(kBinaryMagic) &&
      std::equal(std::begin(kBinaryMagic), std::end(kBinaryMagic), text.begin()))
    return grid_from_binary(std::vector<std::uint8_t>(text.begin(), text.end()), out, error);
  return grid_from_text(text, out, error);
}

std::string grid_to_obj(const VoxelGrid& grid) {
  std::string out = "# voxel surface " + std::to_string(grid.dims.x) + "x" +
                    std::to_string(grid.dims.y) + "x" + std::to_string(grid.dims.z) +
                    "\n";
  int next_vertex = 1;
  auto emit_face = [&](std::array<int, 3> a, std::array<int, 3> b, std::array<int, 3> c,
                       std::array<int, 3> d) {
    for (const auto& p : {a, b, c, d})
      out += "v " + std::to_string(p[0]) + " " + std::to_string(p[1]) + " " +
             std::to_string(p[2]) + "\n";
    out += "f " + std::to_string(next_vertex) + " " + std::to_string(next_vertex + 1) +
           " " + std::to_string(next_vertex + 2) + " " + std::to_string(next_vertex + 3) +
           "\n";
    next_vertex += 4;
  };
  auto empty_at = [&](int x, int y, int z) {
    if (x < 0 || y < 0 || z < 0 || x >= grid.dims.x || y >= grid.dims.y ||
        z >= grid.dims.z)
      return true;
    return !grid.present(x, y, z);
  };
  for (int x = 0; x < grid.dims.x; ++x)
    for (int y = 0; y < grid.dims.y; ++y)
      for (int z = 0; z < grid.dims.z; ++z) {
        if (!grid.present(x, y, z)) continue;
        if (empty_at(x - 1, y, z))
          emit_face({x, y, z}, {x, y, z + 1}, {x, y + 1, z + 1}, {x, y + 1, z});
        if (empty_at(x + 1, y, z))
          emit_face({x + 1, y, z}, {x + 1, y + 1, z}, {x + 1, y + 1, z + 1},
                    {x + 1, y, z + 1});
        if (empty_at(x, y - 1, z))
          emit_face({x, y, z}, {x + 1, y, z}, {x + 1, y, z + 1}, {x, y, z + 1});
        if (empty_at(x, y + 1, z))
          emit_face({x, y + 1, z}, {x, y + 1, z + 1}, {x + 1, y + 1, z + 1},
                    {x + 1, y + 1, z});
        if (empty_at(x, y, z - 1))
          emit_face({x, y, z}, {x, y + 1, z}, {x + 1, y + 1, z}, {x + 1, y, z});
        if (empty_at(x, y, z + 1))
          emit_face({x, y, z + 1}, {x + 1, y, z + 1}, {x + 1, y + 1, z + 1},
                    {x, y + 1, z + 1});
      }
  return out;
}

}  // namespace voxbend
