#include "mars/obj_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace mars {

namespace {

struct IndexedTriangle {
  std::array<int, 3> v;
};

// Midpoint cache for one subdivision pass.
TriMesh subdivide_once(const TriMesh& mesh) {
  TriMesh out;
  for (int v = 0; v < mesh.vertex_capacity(); ++v)
    out.add_vertex(mesh.position(v));
  std::unordered_map<std::uint64_t, int> midpoint;
  auto mid = [&](int a, int b) {
    const VertexPair e(a, b);
    auto it = midpoint.find(e.key());
    if (it != midpoint.end()) return it->second;
    const int id =
        out.add_vertex(0.5 * (mesh.position(a) + mesh.position(b)));
    midpoint.emplace(e.key(), id);
    return id;
  };
  for (int t = 0; t < mesh.triangle_capacity(); ++t) {
    if (!mesh.triangle_alive(t)) continue;
    const auto [a, b, c] = mesh.triangle(t);
    const int ab = mid(a, b);
    const int bc = mid(b, c);
    const int ca = mid(c, a);
    out.add_triangle(a, ab, ca);
    out.add_triangle(ab, b, bc);
    out.add_triangle(ca, bc, c);
    out.add_triangle(ab, bc, ca);
  }
  return out;
}

double mean_edge_length(const TriMesh& mesh) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const VertexPair& e : mesh.edges()) {
    sum += mesh.edge_length(e);
    ++count;
  }
  return count ? sum / count : 0.0;
}

}  // namespace

TriMesh generate_sphere(const Vec3& center, double radius,
                        double target_edge_length) {
  if (radius <= 0.0) throw MeshError("generate_sphere: radius must be > 0");
  if (target_edge_length <= 0.0)
    throw MeshError("generate_sphere: target edge length must be > 0");

  // Icosahedron on the unit sphere, oriented outward.
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const std::array<Vec3, 12> corners = {
      Vec3(-1, phi, 0), Vec3(1, phi, 0),   Vec3(-1, -phi, 0),
      Vec3(1, -phi, 0), Vec3(0, -1, phi),  Vec3(0, 1, phi),
      Vec3(0, -1, -phi), Vec3(0, 1, -phi), Vec3(phi, 0, -1),
      Vec3(phi, 0, 1),  Vec3(-phi, 0, -1), Vec3(-phi, 0, 1)};
  const std::array<IndexedTriangle, 20> faces = {{
      {{0, 11, 5}},  {{0, 5, 1}},   {{0, 1, 7}},   {{0, 7, 10}},
      {{0, 10, 11}}, {{1, 5, 9}},   {{5, 11, 4}},  {{11, 10, 2}},
      {{10, 7, 6}},  {{7, 1, 8}},   {{3, 9, 4}},   {{3, 4, 2}},
      {{3, 2, 6}},   {{3, 6, 8}},   {{3, 8, 9}},   {{4, 9, 5}},
      {{2, 4, 11}},  {{6, 2, 10}},  {{8, 6, 7}},   {{9, 8, 1}},
  }};

  TriMesh mesh;
  for (const Vec3& c : corners) mesh.add_vertex(c.normalized());
  for (const auto& f : faces) mesh.add_triangle(f.v[0], f.v[1], f.v[2]);

  auto scaled_mean = [&](const TriMesh& m) {
    return radius * mean_edge_length(m);
  };
  while (scaled_mean(mesh) > target_edge_length) {
    mesh = subdivide_once(mesh);
    for (int v = 0; v < mesh.vertex_capacity(); ++v)
      mesh.set_position(v, mesh.position(v).normalized());
  }
  for (int v = 0; v < mesh.vertex_capacity(); ++v)
    mesh.set_position(v, center + radius * mesh.position(v));
  return mesh;
}

TriMesh read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("read_obj: cannot open " + path);

  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ss >> p.x() >> p.y() >> p.z()))
        throw MeshError("read_obj: malformed vertex at line " +
                        std::to_string(line_no));
      vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> ids;
      std::string token;
      while (ss >> token) {
        // Accept "i", "i/t", "i/t/n", "i//n"; only the vertex index matters.
        const std::size_t slash = token.find('/');
        const std::string head =
            slash == std::string::npos ? token : token.substr(0, slash);
        int idx = 0;
        try {
          idx = std::stoi(head);
        } catch (const std::exception&) {
          throw MeshError("read_obj: malformed face at line " +
                          std::to_string(line_no));
        }
        if (idx < 0)
          throw MeshError("read_obj: negative indices unsupported, line " +
                          std::to_string(line_no));
        ids.push_back(idx);
      }
      if (ids.size() != 3)
        throw MeshError("read_obj: non-triangle face at line " +
                        std::to_string(line_no));
      for (int idx : ids)
        if (idx < 1 || idx > static_cast<int>(vertices.size()))
          throw MeshError("read_obj: face index out of range at line " +
                          std::to_string(line_no));
      faces.push_back({ids[0] - 1, ids[1] - 1, ids[2] - 1});
    }
  }
  if (faces.empty()) throw MeshError("read_obj: no triangles in " + path);

  // Drop unreferenced vertices but keep the file order of the rest, so a
  // write -> read round-trip preserves indices.
  std::vector<char> referenced(vertices.size(), 0);
  for (const auto& f : faces)
    for (int v : f) referenced[v] = 1;
  std::vector<int> remap(vertices.size(), -1);
  TriMesh mesh;
  for (std::size_t v = 0; v < vertices.size(); ++v)
    if (referenced[v]) remap[v] = mesh.add_vertex(vertices[v]);
  for (const auto& f : faces)
    mesh.add_triangle(remap[f[0]], remap[f[1]], remap[f[2]]);

  const auto violations = validate(mesh);
  if (!violations.empty()) {
    const auto& v = violations.front();
    std::string kind;
    switch (v.kind) {
      case MeshViolation::Kind::NonManifoldEdge:
        kind = "non-manifold edge";
        break;
      case MeshViolation::Kind::InconsistentOrientation:
        kind = "inconsistent orientation";
        break;
      case MeshViolation::Kind::DuplicateTriangle:
        kind = "duplicate triangle";
        break;
    }
    throw MeshError("read_obj: invalid mesh (" + kind + " at edge " +
                    std::to_string(v.edge.a) + "-" + std::to_string(v.edge.b) +
                    "), " + std::to_string(violations.size()) +
                    " violation(s) total");
  }
  return mesh;
}

void write_obj(const TriMesh& mesh, const std::string& path) {
  const TriMesh compact = mesh.compacted();
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw MeshError("write_obj: cannot open " + path);
  for (int v = 0; v < compact.vertex_capacity(); ++v) {
    const Vec3& p = compact.position(v);
    std::fprintf(out, "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
  }
  for (int t = 0; t < compact.triangle_capacity(); ++t) {
    const auto& tri = compact.triangle(t);
    std::fprintf(out, "f %d %d %d\n", tri[0] + 1, tri[1] + 1, tri[2] + 1);
  }
  std::fclose(out);
}

}  // namespace mars
