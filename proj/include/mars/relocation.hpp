#pragma once

#include <Eigen/Core>

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "mars/tri_mesh.hpp"

namespace mars {

struct LineSearchParams {
  double c = 1e-4;
  double rho = 0.8;
  int max_backtracks = 60;
};

struct CascadeLimits {
  int max_bfs_rounds = 4;        // mu
  int max_relocation_iters = 10; // nu
  int scatter_trials = 3;        // eta
};

// Interior edges carry the springs; the average of "all" edges is kept as an
// alternative resting-length rule for experimentation.
enum class RestingLengthRule { InteriorEdges, AllEdges };

// Spring system over a mesh (or a patch of one): interior edges with a
// common resting length, plus the free vertices ordered as the unknown
// stacked vector.
struct SpringSystem {
  double resting_length = 0.0;
  std::vector<VertexPair> edges;   // interior edges
  std::vector<int> free_vertices;  // interior vertices, ascending
};

// Mean interior-edge length; nullopt when the mesh has no interior edge.
std::optional<double> resting_length(const TriMesh& mesh);

SpringSystem make_spring_system(
    const TriMesh& mesh, RestingLengthRule rule = RestingLengthRule::InteriorEdges);

// Patch variant: edges/vertices are classified against the patch submesh,
// i.e. an edge is interior iff both its incident triangles are in the patch.
// `patch_triangles` must be sorted.
SpringSystem make_patch_spring_system(
    const TriMesh& mesh, std::span<const int> patch_triangles,
    RestingLengthRule rule = RestingLengthRule::InteriorEdges);

// Hooke force exerted on p_i by the spring towards p_j: attractive beyond
// the resting length, repulsive below it.
inline Vec3 spring_force(const Vec3& p_i, const Vec3& p_j, double resting) {
  const Vec3 d = p_j - p_i;
  const double len = d.norm();
  if (len <= 0.0) throw MeshError("spring_force: coincident endpoints");
  return ((len - resting) / len) * d;
}

// U = 1/2 sum over interior edges of (|p_j - p_i| - R)^2.
double total_energy(const TriMesh& mesh, const SpringSystem& system);

// Stacked 3N gradient over the free vertices; dU/dp_i = -F_i.
Eigen::VectorXd energy_gradient(const TriMesh& mesh,
                                const SpringSystem& system);

struct VremState {
  int iteration = 0;
  double energy_before = 0.0;
  double energy_after = 0.0;
  double grad_norm = 0.0;
  double alpha0 = 0.0;
  double alpha = 0.0;
  int backtracks = 0;
  double max_offset_ratio = 0.0;  // max |dp_i| / l_i before projection
  bool accepted = false;
  bool converged = false;
};

struct VremOptions {
  LineSearchParams line_search;
  int max_iterations = 10;
  // SPL-style initial step, warm-started from the previous accepted step so
  // the backtrack count stays bounded as the gradient vanishes.
  bool warm_start_alpha = true;
};

// Iterate the relocation update on the free vertices of `system` until the
// iteration budget runs out, `stop` returns true, or the forces vanish.
// Projections are anchored at the positions current on entry.
std::vector<VremState> vrem_relax(
    TriMesh& mesh, const SpringSystem& system, const VremOptions& options,
    const std::function<bool(const TriMesh&)>& stop = {});

struct VremRunResult {
  bool success = false;
  int rounds = 0;
  std::vector<int> patch_triangles;  // final patch (sorted)
  std::vector<VremState> states;
};

// Grow a patch around the worst vertex of a violating triangle and relax it
// until the patch is regular; boundary vertices never move and the mesh is
// restored on failure.
VremRunResult vrem_run(TriMesh& mesh, const RegularityParams& params,
                       int seed_triangle, const CascadeLimits& limits,
                       const LineSearchParams& line_search,
                       RestingLengthRule rule = RestingLengthRule::InteriorEdges);

// Vertex of the triangle carrying the largest interior angle (the relocation
// seed).
int largest_angle_vertex(const TriMesh& mesh, int tri);

}  // namespace mars
