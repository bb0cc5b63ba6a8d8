#ifndef MIRAGE_PLY_HPP
#define MIRAGE_PLY_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mirage {

struct PlyMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> triangles;
};

/// ASCII PLY with x/y/z vertex properties and polygonal faces (triangulated
/// fan-wise on load). Throws ParseError / IoError.
PlyMesh load_ply(const std::string& path);

/// Writes ASCII PLY with double precision vertex coordinates so posed-mesh
/// snapshots round-trip exactly.
void save_ply(const std::string& path, std::span<const Eigen::Vector3d> vertices,
              std::span<const std::array<int, 3>> triangles);

} // namespace mirage

#endif
