#include "mars/stepper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <queue>

#include "mars/adjustments.hpp"
#include "mars/obj_io.hpp"

namespace mars {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Keep the boundary endpoint if exactly one is on the boundary; otherwise
// the lower index. Returns the preferred keep first.
std::array<int, 2> collapse_keep_order(const TriMesh& mesh,
                                       const VertexPair& e) {
  auto on_boundary = [&](int v) {
    for (int t : mesh.triangles_at(v))
      for (const VertexPair& te : mesh.triangle_edges(t))
        if (te.contains(v) && mesh.edge_triangles(te)->size() == 1)
          return true;
    return false;
  };
  const bool ba = on_boundary(e.a);
  const bool bb = on_boundary(e.b);
  if (ba != bb) return ba ? std::array<int, 2>{e.a, e.b}
                          : std::array<int, 2>{e.b, e.a};
  return {e.a, e.b};
}

bool triangle_violates(const TriMesh& mesh, int t,
                       const RegularityParams& params) {
  if (mesh.min_triangle_angle(t) < params.theta) return true;
  for (const VertexPair& e : mesh.triangle_edges(t)) {
    const double len = mesh.edge_length(e);
    if (len < params.min_edge() || len > params.h_max) return true;
  }
  return false;
}

}  // namespace

std::vector<Vec3> advect(TriMesh& mesh, const VelocityField& field, double t,
                         double dt) {
  std::vector<Vec3> preimage(mesh.vertex_capacity(), Vec3::Zero());
  for (int v = 0; v < mesh.vertex_capacity(); ++v) {
    if (!mesh.vertex_alive(v)) continue;
    preimage[v] = mesh.position(v);
    mesh.set_position(v, rk4_step(field, preimage[v], t, dt));
  }
  return preimage;
}

int augment_long_edges(TriMesh& mesh, std::vector<Vec3>& preimage,
                       const VelocityField& field, double t, double dt,
                       const RegularityParams& params, int max_sweeps,
                       CostLedger* ledger) {
  int total_splits = 0;
  for (int sweep = 0;; ++sweep) {
    std::vector<VertexPair> long_edges;
    for (int tri = 0; tri < mesh.triangle_capacity(); ++tri) {
      if (!mesh.triangle_alive(tri)) continue;
      for (const VertexPair& e : mesh.triangle_edges(tri))
        if (mesh.edge_length(e) > params.h_max) long_edges.push_back(e);
    }
    std::sort(long_edges.begin(), long_edges.end());
    long_edges.erase(std::unique(long_edges.begin(), long_edges.end()),
                     long_edges.end());
    if (long_edges.empty()) return total_splits;
    if (sweep >= max_sweeps)
      throw MeshError(
          "augment_long_edges: sweep limit exceeded; time step too large");

    for (const VertexPair& e : long_edges) {
      if (!mesh.has_edge(e)) continue;
      const double len = mesh.edge_length(e);
      if (len <= params.h_max) continue;
      const int n_sub = static_cast<int>(std::ceil(len / params.h_max));

      const auto started = Clock::now();
      const Vec3 pre_a = preimage[e.a];
      const Vec3 pre_b = preimage[e.b];
      std::vector<Vec3> pre_points;
      std::vector<Vec3> advected;
      for (int i = 1; i < n_sub; ++i) {
        const double s = static_cast<double>(i) / n_sub;
        pre_points.push_back((1.0 - s) * pre_a + s * pre_b);
        advected.push_back(rk4_step(field, pre_points.back(), t, dt));
      }
      const SplitResult split = edge_split_at(mesh, e, advected);
      if (static_cast<int>(preimage.size()) < mesh.vertex_capacity())
        preimage.resize(mesh.vertex_capacity(), Vec3::Zero());
      for (std::size_t i = 0; i < split.new_vertices.size(); ++i)
        preimage[split.new_vertices[i]] = pre_points[i];
      ++total_splits;
      if (ledger)
        ledger->record(Tier::Elementary,
                       static_cast<int>(split.new_triangles.size()),
                       elapsed(started));
    }
  }
}

int collapse_short_edges(TriMesh& mesh, const RegularityParams& params,
                         std::vector<VertexPair>* unresolved,
                         CostLedger* ledger) {
  const double min_len = params.min_edge();
  using Entry = std::pair<double, VertexPair>;
  auto cmp = [](const Entry& x, const Entry& y) {
    if (x.first != y.first) return x.first > y.first;
    return y.second < x.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);

  for (const VertexPair& e : mesh.edges()) {
    const double len = mesh.edge_length(e);
    if (len < min_len) queue.push({len, e});
  }

  int collapses = 0;
  while (!queue.empty()) {
    const auto [len, e] = queue.top();
    queue.pop();
    if (!mesh.has_edge(e)) continue;
    const double current = mesh.edge_length(e);
    if (current >= min_len || current != len) continue;

    const auto started = Clock::now();
    const auto keeps = collapse_keep_order(mesh, e);
    CollapseResult result;
    for (int keep : keeps) {
      result = edge_collapse(mesh, e, keep, params.h_max);
      if (result.ok) break;
    }
    if (!result.ok) {
      if (unresolved) unresolved->push_back(e);
      continue;
    }
    ++collapses;
    if (ledger)
      ledger->record(Tier::Elementary,
                     result.removed_triangles + result.rehomed_triangles,
                     elapsed(started));

    // Re-homed edges around the kept vertex are new; queue any short ones.
    for (int t : mesh.triangles_at(result.kept_vertex)) {
      for (const VertexPair& te : mesh.triangle_edges(t)) {
        if (!te.contains(result.kept_vertex)) continue;
        const double tlen = mesh.edge_length(te);
        if (tlen < min_len) queue.push({tlen, te});
      }
    }
  }
  if (unresolved) {
    std::sort(unresolved->begin(), unresolved->end());
    unresolved->erase(std::unique(unresolved->begin(), unresolved->end()),
                      unresolved->end());
  }
  return collapses;
}

CascadeOutcome enforce_theta(TriMesh& mesh, const StepConfig& config,
                             Rng& rng, CostLedger* ledger) {
  const RegularityParams& params = config.regularity;
  CascadeOutcome outcome;

  using Entry = std::pair<double, int>;  // (min angle, triangle)
  auto cmp = [](const Entry& x, const Entry& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second > y.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> queue(cmp);

  auto push_if_violating = [&](int t) {
    if (mesh.triangle_alive(t) && triangle_violates(mesh, t, params))
      queue.push({mesh.min_triangle_angle(t), t});
  };
  auto push_with_neighbors = [&](int t) {
    if (!mesh.triangle_alive(t)) return;
    push_if_violating(t);
    for (const VertexPair& e : mesh.triangle_edges(t))
      for (int s : *mesh.edge_triangles(e)) push_if_violating(s);
  };

  int initial = 0;
  for (int t = 0; t < mesh.triangle_capacity(); ++t) {
    if (!mesh.triangle_alive(t)) continue;
    if (triangle_violates(mesh, t, params)) {
      queue.push({mesh.min_triangle_angle(t), t});
      ++initial;
    }
  }

  // Triangles that defeat all three tiers are parked and retried in waves:
  // earlier fixes reshape their neighborhoods and every wave re-rolls the
  // regeneration scatter. The step fails only after several waves in a row
  // make no progress at all.
  std::vector<int> deferred;
  int ops_this_wave = 0;
  int fruitless_waves = 0;
  int waves = 0;

  long long budget = 2000 + 200LL * initial;
  while (true) {
    if (queue.empty()) {
      std::sort(deferred.begin(), deferred.end());
      deferred.erase(std::unique(deferred.begin(), deferred.end()),
                     deferred.end());
      std::vector<int> still;
      for (int t : deferred)
        if (mesh.triangle_alive(t) && triangle_violates(mesh, t, params))
          still.push_back(t);
      if (still.empty()) break;
      fruitless_waves = ops_this_wave == 0 ? fruitless_waves + 1 : 0;
      if (fruitless_waves > 12 || ++waves > 80) {
        const Patch patch = bfs_expand(
            mesh, std::vector<int>{largest_angle_vertex(mesh, still.front())});
        const auto dump_path =
            std::filesystem::temp_directory_path() / "failed_patch.obj";
        write_obj(extract_submesh(mesh, patch.triangles), dump_path.string());
        throw MeshError(
            "enforce_theta: unresolved violation; patch written to " +
            dump_path.string());
      }
      for (int t : still) queue.push({mesh.min_triangle_angle(t), t});
      deferred.clear();
      ops_this_wave = 0;
    }

    const auto [angle, tri] = queue.top();
    queue.pop();
    if (!mesh.triangle_alive(tri) || !triangle_violates(mesh, tri, params))
      continue;
    if (--budget < 0)
      throw MeshError("enforce_theta: cascade failed to terminate");

    // Elementary tier: collapse a residual tiny edge, else flip the edge at
    // the smallest angle.
    bool resolved = false;
    {
      const auto started = Clock::now();
      for (const VertexPair& e : mesh.triangle_edges(tri)) {
        if (mesh.edge_length(e) >= params.min_edge()) continue;
        const auto keeps = collapse_keep_order(mesh, e);
        for (int keep : keeps) {
          const CollapseResult res =
              edge_collapse(mesh, e, keep, params.h_max);
          if (res.ok) {
            ++outcome.collapses;
            if (ledger)
              ledger->record(Tier::Elementary,
                             res.removed_triangles + res.rehomed_triangles,
                             elapsed(started));
            for (int t : mesh.triangles_at(res.kept_vertex))
              push_with_neighbors(t);
            resolved = true;
            break;
          }
        }
        if (resolved) break;
      }
      if (!resolved && mesh.min_triangle_angle(tri) < params.theta) {
        const FlipResult flip = edge_flip(mesh, tri);
        if (flip.decision.applicable) {
          ++outcome.flips;
          if (ledger)
            ledger->record(Tier::Elementary, 2, elapsed(started));
          push_with_neighbors(flip.new_triangles[0]);
          push_with_neighbors(flip.new_triangles[1]);
          resolved = true;
        } else if (ledger) {
          ledger->add_time(Tier::Elementary, elapsed(started));
        }
      }
    }
    if (resolved) {
      ++ops_this_wave;
      continue;
    }

    {
      const auto started = Clock::now();
      const VremRunResult res = vrem_run(mesh, params, tri, config.limits,
                                         config.line_search);
      if (res.success) {
        ++outcome.relocations;
        ++ops_this_wave;
        if (ledger)
          ledger->record(Tier::Relocation,
                         static_cast<int>(res.patch_triangles.size()),
                         elapsed(started));
        for (int t : res.patch_triangles) push_with_neighbors(t);
        continue;
      }
      if (ledger) ledger->add_time(Tier::Relocation, elapsed(started));
    }

    {
      const auto started = Clock::now();
      const LtrResult res =
          ltr_run(mesh, params, tri, config.limits, config.line_search, rng);
      if (res.success) {
        ++outcome.regenerations;
        ++ops_this_wave;
        if (ledger)
          ledger->record(Tier::Regeneration,
                         static_cast<int>(res.new_triangles.size()),
                         elapsed(started));
        for (int t : res.new_triangles) push_with_neighbors(t);
        continue;
      }
      if (ledger) ledger->add_time(Tier::Regeneration, elapsed(started));
    }

    // Last resort for slivers that defeat every tier (sharply folded rims):
    // remove the triangle outright by collapsing one of its edges, shortest
    // first, widening to the surrounding ring if its own edges are pinned.
    // The collapse guards keep the complex valid and both edge-length
    // bounds intact, and no marker moves.
    {
      const auto started = Clock::now();
      std::vector<VertexPair> edges(mesh.triangle_edges(tri).begin(),
                                    mesh.triangle_edges(tri).end());
      for (int v : mesh.triangle(tri))
        for (int t : mesh.triangles_at(v))
          for (const VertexPair& e : mesh.triangle_edges(t))
            edges.push_back(e);
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
      std::stable_sort(edges.begin(), edges.end(),
                       [&](const VertexPair& x, const VertexPair& y) {
                         return mesh.edge_length(x) < mesh.edge_length(y);
                       });
      bool removed = false;
      for (const VertexPair& e : edges) {
        if (!mesh.has_edge(e)) continue;
        for (int keep : collapse_keep_order(mesh, e)) {
          const CollapseResult res = edge_collapse(mesh, e, keep, params.h_max);
          if (res.ok) {
            ++outcome.collapses;
            ++ops_this_wave;
            if (ledger)
              ledger->record(Tier::Elementary,
                             res.removed_triangles + res.rehomed_triangles,
                             elapsed(started));
            for (int t : mesh.triangles_at(res.kept_vertex))
              push_with_neighbors(t);
            push_with_neighbors(tri);  // may still violate; requeue it
            removed = true;
            break;
          }
        }
        if (removed) break;
        if (!mesh.triangle_alive(tri) || !triangle_violates(mesh, tri, params))
          break;
      }
      if (removed) continue;
    }

    deferred.push_back(tri);
  }
  return outcome;
}

Simulation::Simulation(TriMesh mesh, VelocityField field, StepConfig config,
                       std::uint64_t seed)
    : mesh_(std::move(mesh)),
      field_(std::move(field)),
      config_(config),
      rng_(seed),
      seed_(seed) {}

StepReport Simulation::step(double t, double dt) {
  StepReport report;
  report.step = steps_taken_++;
  report.t_begin = t;
  report.t_end = t + dt;

  if (dt != 0.0) {
    std::vector<Vec3> preimage = advect(mesh_, field_, t, dt);
    report.splits =
        augment_long_edges(mesh_, preimage, field_, t, dt, config_.regularity,
                           config_.max_augment_sweeps, &ledger_);
    report.collapses =
        collapse_short_edges(mesh_, config_.regularity, nullptr, &ledger_);
    const CascadeOutcome cascade =
        enforce_theta(mesh_, config_, rng_, &ledger_);
    report.flips = cascade.flips;
    report.collapses += cascade.collapses;
    report.relocations = cascade.relocations;
    report.regenerations = cascade.regenerations;
  }

  const QualityReport quality =
      check_regularity(mesh_, config_.regularity);
  report.vertices = mesh_.vertex_count();
  report.triangles = mesh_.triangle_count();
  report.edges = mesh_.edge_count();
  report.euler = mesh_.euler_characteristic();
  report.min_edge = quality.min_edge;
  report.max_edge = quality.max_edge;
  report.min_angle = quality.min_angle;
  report.regular = quality.regular();
  return report;
}

std::vector<StepReport> Simulation::run(double t0, double t_end, double dt) {
  if (dt <= 0.0) throw MeshError("Simulation::run: dt must be positive");
  std::vector<StepReport> reports;
  const double span = t_end - t0;
  const int n_steps =
      std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
  for (int i = 0; i < n_steps; ++i) {
    const double t = t0 + i * dt;
    const double k = std::min(dt, t_end - t);
    reports.push_back(step(t, k));
  }
  return reports;
}

}  // namespace mars
