#include "mars/relocation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "mars/local_projection.hpp"

namespace mars {

namespace {

std::vector<VertexPair> collect_edges(const TriMesh& mesh,
                                      std::span<const int> tris) {
  std::vector<VertexPair> edges;
  edges.reserve(tris.size() * 3);
  for (int t : tris)
    for (const VertexPair& e : mesh.triangle_edges(t)) edges.push_back(e);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

int patch_incidence(const TriMesh& mesh, const VertexPair& e,
                    std::span<const int> patch) {
  int count = 0;
  for (int t : *mesh.edge_triangles(e))
    if (std::binary_search(patch.begin(), patch.end(), t)) ++count;
  return count;
}

SpringSystem build_system(const TriMesh& mesh, std::span<const int> patch,
                          RestingLengthRule rule) {
  SpringSystem system;
  std::vector<int> boundary_vertices;
  double interior_sum = 0.0;
  double all_sum = 0.0;
  std::size_t all_count = 0;

  const auto edges = collect_edges(mesh, patch);
  for (const VertexPair& e : edges) {
    const double len = mesh.edge_length(e);
    all_sum += len;
    ++all_count;
    if (patch_incidence(mesh, e, patch) >= 2) {
      system.edges.push_back(e);
      interior_sum += len;
    } else {
      boundary_vertices.push_back(e.a);
      boundary_vertices.push_back(e.b);
    }
  }
  std::sort(boundary_vertices.begin(), boundary_vertices.end());
  boundary_vertices.erase(
      std::unique(boundary_vertices.begin(), boundary_vertices.end()),
      boundary_vertices.end());

  std::vector<int> vertices;
  for (int t : patch)
    for (int v : mesh.triangle(t)) vertices.push_back(v);
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()),
                 vertices.end());
  for (int v : vertices)
    if (!std::binary_search(boundary_vertices.begin(), boundary_vertices.end(),
                            v))
      system.free_vertices.push_back(v);

  if (rule == RestingLengthRule::AllEdges) {
    system.resting_length = all_count ? all_sum / all_count : 0.0;
  } else {
    system.resting_length =
        system.edges.empty() ? 0.0 : interior_sum / system.edges.size();
  }
  return system;
}

bool patch_regular(const TriMesh& mesh, std::span<const int> patch,
                   const RegularityParams& params) {
  for (int t : patch) {
    if (!mesh.triangle_alive(t)) return false;
    if (mesh.min_triangle_angle(t) < params.theta) return false;
    for (const VertexPair& e : mesh.triangle_edges(t)) {
      const double len = mesh.edge_length(e);
      if (len > params.h_max || len < params.min_edge()) return false;
    }
  }
  return true;
}

}  // namespace

std::optional<double> resting_length(const TriMesh& mesh) {
  const auto cls = classify(mesh);
  if (cls.interior_edges.empty()) return std::nullopt;
  double sum = 0.0;
  for (const VertexPair& e : cls.interior_edges) sum += mesh.edge_length(e);
  return sum / static_cast<double>(cls.interior_edges.size());
}

SpringSystem make_spring_system(const TriMesh& mesh, RestingLengthRule rule) {
  return build_system(mesh, mesh.triangle_ids(), rule);
}

SpringSystem make_patch_spring_system(const TriMesh& mesh,
                                      std::span<const int> patch_triangles,
                                      RestingLengthRule rule) {
  return build_system(mesh, patch_triangles, rule);
}

double total_energy(const TriMesh& mesh, const SpringSystem& system) {
  double energy = 0.0;
  for (const VertexPair& e : system.edges) {
    const double stretch = mesh.edge_length(e) - system.resting_length;
    energy += stretch * stretch;
  }
  return 0.5 * energy;
}

Eigen::VectorXd energy_gradient(const TriMesh& mesh,
                                const SpringSystem& system) {
  std::unordered_map<int, int> slot;
  slot.reserve(system.free_vertices.size());
  for (std::size_t i = 0; i < system.free_vertices.size(); ++i)
    slot.emplace(system.free_vertices[i], static_cast<int>(i));

  Eigen::VectorXd grad =
      Eigen::VectorXd::Zero(3 * static_cast<Eigen::Index>(
                                    system.free_vertices.size()));
  for (const VertexPair& e : system.edges) {
    const Vec3 pa = mesh.position(e.a);
    const Vec3 pb = mesh.position(e.b);
    const Vec3 f_on_a = spring_force(pa, pb, system.resting_length);
    if (auto it = slot.find(e.a); it != slot.end())
      grad.segment<3>(3 * it->second) -= f_on_a;
    if (auto it = slot.find(e.b); it != slot.end())
      grad.segment<3>(3 * it->second) += f_on_a;  // force on b is opposite
  }
  return grad;
}

int largest_angle_vertex(const TriMesh& mesh, int tri) {
  const auto p = mesh.triangle_points(tri);
  const auto ang = interior_angles(p[0], p[1], p[2]);
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (ang[i] > ang[best]) best = i;
  return mesh.triangle(tri)[best];
}

std::vector<VremState> vrem_relax(
    TriMesh& mesh, const SpringSystem& system, const VremOptions& options,
    const std::function<bool(const TriMesh&)>& stop) {
  std::vector<VremState> states;
  const std::size_t n_free = system.free_vertices.size();
  if (n_free == 0 || system.edges.empty()) return states;

  // Frozen local projections and per-vertex spring/link tables.
  std::vector<LocalProjector> projectors;
  projectors.reserve(n_free);
  std::vector<std::vector<VertexPair>> springs_at(n_free);
  std::vector<std::vector<std::pair<int, int>>> link_segments(n_free);
  std::unordered_map<int, int> slot;
  for (std::size_t i = 0; i < n_free; ++i)
    slot.emplace(system.free_vertices[i], static_cast<int>(i));

  for (std::size_t i = 0; i < n_free; ++i) {
    const int v = system.free_vertices[i];
    auto proj = LocalProjector::build(mesh, v);
    if (!proj) return states;  // degenerate ring; caller escalates
    projectors.push_back(std::move(*proj));

    const StarLink sl = star_link(mesh, v);
    for (std::size_t k = 0; k + 1 < sl.link.size(); ++k)
      link_segments[i].emplace_back(sl.link[k], sl.link[k + 1]);
    if (sl.closed && sl.link.size() > 1)
      link_segments[i].emplace_back(sl.link.back(), sl.link.front());
  }
  for (const VertexPair& e : system.edges) {
    if (auto it = slot.find(e.a); it != slot.end())
      springs_at[it->second].push_back(e);
    if (auto it = slot.find(e.b); it != slot.end())
      springs_at[it->second].push_back(e);
  }

  const LineSearchParams& ls = options.line_search;
  double energy = total_energy(mesh, system);
  double prev_alpha = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    VremState state;
    state.iteration = iter;
    state.energy_before = energy;

    std::vector<Vec3> force(n_free);
    double grad_sq = 0.0;
    double max_force = 0.0;
    for (std::size_t i = 0; i < n_free; ++i) {
      const int v = system.free_vertices[i];
      Vec3 f = Vec3::Zero();
      for (const VertexPair& e : springs_at[i])
        f += spring_force(mesh.position(v), mesh.position(e.other(v)),
                          system.resting_length);
      force[i] = f;
      grad_sq += f.squaredNorm();
      max_force = std::max(max_force, f.norm());
    }
    state.grad_norm = std::sqrt(grad_sq);

    if (max_force <= 0.0) {
      state.converged = true;
      state.energy_after = energy;
      states.push_back(state);
      break;
    }

    std::vector<double> link_dist(n_free);
    double alpha0 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_free; ++i) {
      const int v = system.free_vertices[i];
      double l = std::numeric_limits<double>::infinity();
      for (const auto& [sa, sb] : link_segments[i])
        l = std::min(l, point_segment_distance(mesh.position(v),
                                               mesh.position(sa),
                                               mesh.position(sb)));
      link_dist[i] = l;
      const double fn = force[i].norm();
      if (fn > 0.0) alpha0 = std::min(alpha0, 2.0 * l / (5.0 * fn));
    }
    if (options.warm_start_alpha)
      alpha0 = std::min(alpha0, prev_alpha / ls.rho);
    state.alpha0 = alpha0;

    // Trial positions at a given step length; fails if any free vertex
    // leaves its projection neighborhood.
    auto trial = [&](double alpha,
                     std::vector<Vec3>& out) -> bool {
      out.resize(n_free);
      for (std::size_t i = 0; i < n_free; ++i) {
        const int v = system.free_vertices[i];
        const auto p =
            projectors[i].project(mesh.position(v) + alpha * force[i]);
        if (!p) return false;
        out[i] = *p;
      }
      return true;
    };

    // The direction d is defined by the projected step at alpha0; shrink
    // alpha0 if floating error pushed a trial point off the star.
    std::vector<Vec3> step0;
    int guard = 0;
    while (!trial(alpha0, step0)) {
      alpha0 *= 0.5;
      if (++guard > 60) break;
    }
    if (guard > 60) {
      states.push_back(state);
      break;
    }
    state.alpha0 = alpha0;

    double grad_dot_d = 0.0;
    for (std::size_t i = 0; i < n_free; ++i) {
      const int v = system.free_vertices[i];
      const Vec3 d = (step0[i] - mesh.position(v)) / alpha0;
      grad_dot_d -= force[i].dot(d);
    }
    if (grad_dot_d >= 0.0) {
      // The projected direction no longer descends: the constrained
      // minimum is reached up to roundoff.
      state.converged = true;
      state.energy_after = energy;
      states.push_back(state);
      break;
    }

    double alpha = alpha0;
    std::vector<Vec3> candidate = step0;
    bool accepted = false;
    double cand_energy = 0.0;
    for (int bt = 0; bt <= ls.max_backtracks; ++bt) {
      bool ok = (bt == 0) ? true : trial(alpha, candidate);
      if (ok) {
        cand_energy = 0.0;
        auto pos = [&](int v) -> Vec3 {
          auto it = slot.find(v);
          return it == slot.end() ? mesh.position(v) : candidate[it->second];
        };
        for (const VertexPair& e : system.edges) {
          const double stretch =
              (pos(e.a) - pos(e.b)).norm() - system.resting_length;
          cand_energy += 0.5 * stretch * stretch;
        }
        if (cand_energy <= energy + ls.c * alpha * grad_dot_d) {
          accepted = true;
          state.backtracks = bt;
          break;
        }
      }
      alpha *= ls.rho;
    }
    state.alpha = alpha;

    if (!accepted) {
      states.push_back(state);
      break;
    }

    double max_ratio = 0.0;
    for (std::size_t i = 0; i < n_free; ++i)
      if (link_dist[i] > 0.0)
        max_ratio =
            std::max(max_ratio, alpha * force[i].norm() / link_dist[i]);
    state.max_offset_ratio = max_ratio;

    for (std::size_t i = 0; i < n_free; ++i)
      mesh.set_position(system.free_vertices[i], candidate[i]);
    energy = cand_energy;
    prev_alpha = alpha;
    state.energy_after = energy;
    state.accepted = true;
    states.push_back(state);

    if (stop && stop(mesh)) break;
  }
  return states;
}

namespace {

double patch_min_angle(const TriMesh& mesh, std::span<const int> patch) {
  double worst = kPi;
  for (int t : patch) worst = std::min(worst, mesh.min_triangle_angle(t));
  return worst;
}

}  // namespace

VremRunResult vrem_run(TriMesh& mesh, const RegularityParams& params,
                       int seed_triangle, const CascadeLimits& limits,
                       const LineSearchParams& line_search,
                       RestingLengthRule rule) {
  VremRunResult result;
  if (!mesh.triangle_alive(seed_triangle))
    throw MeshError("vrem_run: seed triangle not in mesh");

  std::vector<int> seeds = {largest_angle_vertex(mesh, seed_triangle)};
  std::unordered_map<int, Vec3> saved;

  // Keep iterating a little past bare admissibility; patches left exactly
  // at theta are re-violated by the very next advection step.
  const double target_angle = std::min(1.2 * params.theta, kPi / 3.0);

  for (int round = 1; round <= limits.max_bfs_rounds; ++round) {
    result.rounds = round;
    const Patch patch = bfs_expand(mesh, seeds);
    seeds = patch.vertices;
    if (patch.triangles.empty()) break;

    SpringSystem system = make_patch_spring_system(mesh, patch.triangles, rule);
    if (!system.free_vertices.empty() && !system.edges.empty() &&
        system.resting_length > 0.0) {
      for (int v : system.free_vertices)
        saved.emplace(v, mesh.position(v));

      // Track the best regular iterate; relaxation may pass through and
      // leave the admissible set again.
      std::vector<Vec3> best_positions;
      double best_angle = -1.0;
      auto consider = [&](const TriMesh& m) {
        if (!patch_regular(m, patch.triangles, params)) return false;
        const double angle = patch_min_angle(m, patch.triangles);
        if (angle > best_angle) {
          best_angle = angle;
          best_positions.clear();
          for (int v : system.free_vertices)
            best_positions.push_back(m.position(v));
        }
        return angle >= target_angle;
      };
      consider(mesh);

      VremOptions options;
      options.line_search = line_search;
      options.max_iterations = limits.max_relocation_iters;
      auto states = vrem_relax(mesh, system, options, consider);
      result.states.insert(result.states.end(), states.begin(), states.end());

      if (best_angle >= 0.0) {
        for (std::size_t i = 0; i < system.free_vertices.size(); ++i)
          mesh.set_position(system.free_vertices[i], best_positions[i]);
      }
    }

    if (patch_regular(mesh, patch.triangles, params)) {
      result.success = true;
      result.patch_triangles = patch.triangles;
      return result;
    }
  }

  for (const auto& [v, p] : saved) mesh.set_position(v, p);
  return result;
}

}  // namespace mars
