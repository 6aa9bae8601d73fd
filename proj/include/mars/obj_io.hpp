#pragma once

#include <string>

#include "mars/tri_mesh.hpp"

namespace mars {

// Icosahedron subdivided until the mean edge length is at most
// `target_edge_length`, vertices normalized onto the sphere.
TriMesh generate_sphere(const Vec3& center, double radius,
                        double target_edge_length);

// Wavefront OBJ, triangles only (v/f records, 1-based indices). The loaded
// mesh is validated; unreferenced vertices are dropped. Throws MeshError
// with a descriptive message for malformed or non-manifold input.
TriMesh read_obj(const std::string& path);

// Writes the compacted mesh with 17 significant digits so that
// write -> read round-trips exactly.
void write_obj(const TriMesh& mesh, const std::string& path);

}  // namespace mars
