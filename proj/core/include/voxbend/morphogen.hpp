#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "voxbend/cppn.hpp"
#include "voxbend/hyperneat.hpp"

namespace voxbend {

// Material codes are stable in every serialized artifact.
enum class Material : std::uint8_t { kEmpty = 0, kPassive = 1, kContractile = 3 };

struct GridDims {
  int x = 20;
  int y = 8;
  int z = 8;
  bool operator==(const GridDims&) const = default;
};

// Dense x-major lattice of material codes: cell (x,y,z) lives at index
// x*Y*Z + y*Z + z. The one-voxel boundary shell is the passive enclosure;
// the interior (X-2)(Y-2)(Z-2) box is the designable region.
struct VoxelGrid {
  GridDims dims;
  std::vector<Material> cells;

  VoxelGrid() = default;
  explicit VoxelGrid(GridDims d)
      : dims(d), cells(static_cast<std::size_t>(d.x) * d.y * d.z, Material::kEmpty) {}

  std::size_t index(int x, int y, int z) const {
    return (static_cast<std::size_t>(x) * dims.y + y) * dims.z + z;
  }
  Material at(int x, int y, int z) const { return cells[index(x, y, z)]; }
  void set(int x, int y, int z, Material m) { cells[index(x, y, z)] = m; }
  bool is_enclosure(int x, int y, int z) const {
    return x == 0 || y == 0 || z == 0 || x == dims.x - 1 || y == dims.y - 1 ||
           z == dims.z - 1;
  }
  bool present(int x, int y, int z) const { return at(x, y, z) != Material::kEmpty; }
};

struct VoxelCounts {
  int total = 0;
  int passive = 0;
  int contractile = 0;
};

struct MorphogenConfig {
  bool prune_floating = true;          // drop interior blobs not 6-connected to the shell
  bool forbid_interior_passive = false;  // interior Passive cells become Empty
};

// Voxel count of the full one-voxel boundary shell: X*Y*Z - (X-2)(Y-2)(Z-2).
// Any dimension < 3 leaves no interior and is rejected (returns -1).
int passive_enclosure_count(GridDims dims);

// Generator-agnostic morphogenesis: the query maps normalized cell-center
// coordinates to (v, m); a cell is present iff |v| >= 0.5, and a present cell
// is Passive iff |m| < 0.5, else Contractile. Boundary cells are forced
// present Passive.
using FieldQuery =
    std::function<std::array<double, 2>(double nx, double ny, double nz)>;
VoxelGrid generate(GridDims dims, const MorphogenConfig& cfg, const FieldQuery& query);

// CPPN path: 3 coordinate inputs + bias, outputs (v, m).
VoxelGrid generate_from_cppn(const Genome& cppn, GridDims dims, const MorphogenConfig& cfg);
// HyperNEAT path: substrate queried per cell.
VoxelGrid generate_from_substrate(const SubstrateNetwork& net, GridDims dims,
                                  const MorphogenConfig& cfg);

VoxelCounts count_voxels(const VoxelGrid& grid);

// Contractile cells in x-major scan order; controllers index phases by
// position in this list.
std::vector<std::array<int, 3>> contractile_cells(const VoxelGrid& grid);

// Text form: header with dims and the material legend, then one line of Z
// codes per (x, y) row. The importer validates the enclosure invariant.
std::string grid_to_text(const VoxelGrid& grid);
bool grid_from_text(const std::string& text, VoxelGrid& out, std::string* error = nullptr);

// Compact binary form: magic, dims, then X*Y*Z raw codes.
std::vector<std::uint8_t> grid_to_binary(const VoxelGrid& grid);
bool grid_from_binary(const std::vector<std::uint8_t>& bytes, VoxelGrid& out,
                      std::string* error = nullptr);

bool save_grid(const VoxelGrid& grid, const std::string& path, std::string* error = nullptr);
bool load_grid(const std::string& path, VoxelGrid& out, std::string* error = nullptr);

// Wavefront OBJ surface dump: one cube face per present-voxel face exposed to
// empty space.
std::string grid_to_obj(const VoxelGrid& grid);

}  // namespace voxbend
