#pragma once

#include <cstdint>
#include <vector>

#include "mars/flows.hpp"
#include "mars/metrics.hpp"
#include "mars/regeneration.hpp"
#include "mars/relocation.hpp"
#include "mars/rng.hpp"
#include "mars/tri_mesh.hpp"

namespace mars {

struct StepConfig {
  RegularityParams regularity;
  CascadeLimits limits;
  LineSearchParams line_search;
  int max_augment_sweeps = 10;
};

// Per-step record: mesh size, quality bounds, and how many violations each
// cascade tier resolved.
struct StepReport {
  int step = 0;
  double t_begin = 0.0;
  double t_end = 0.0;
  int vertices = 0;
  int triangles = 0;
  std::int64_t edges = 0;
  int euler = 0;
  double min_edge = 0.0;
  double max_edge = 0.0;
  double min_angle = 0.0;
  int splits = 0;
  int collapses = 0;
  int flips = 0;
  int relocations = 0;
  int regenerations = 0;
  bool regular = false;
};

// Trace every vertex forward through the discrete flow map; connectivity is
// untouched. Returns the pre-step positions indexed by vertex id.
std::vector<Vec3> advect(TriMesh& mesh, const VelocityField& field, double t,
                         double dt);

// While any edge exceeds h_max, subdivide its preimage segment into
// ceil(len/h_max) equidistant subedges, advect the new markers, and
// re-triangulate; repeats until clean. Throws when max_sweeps is exceeded
// (the time step is too large for the flow).
int augment_long_edges(TriMesh& mesh, std::vector<Vec3>& preimage,
                       const VelocityField& field, double t, double dt,
                       const RegularityParams& params, int max_sweeps,
                       CostLedger* ledger = nullptr);

// Collapse edges shorter than r_tiny*h_max, shortest first, preferring to
// keep boundary vertices. Edges whose every collapse is illegal are left
// for the cascade and reported through `unresolved`.
int collapse_short_edges(TriMesh& mesh, const RegularityParams& params,
                         std::vector<VertexPair>* unresolved = nullptr,
                         CostLedger* ledger = nullptr);

struct CascadeOutcome {
  int flips = 0;
  int collapses = 0;
  int relocations = 0;
  int regenerations = 0;
};

// Resolve every remaining violation, worst triangle first, through the
// flip -> relocation -> regeneration cascade. Throws MeshError with the
// offending patch written to an OBJ file when all tiers fail.
CascadeOutcome enforce_theta(TriMesh& mesh, const StepConfig& config,
                             Rng& rng, CostLedger* ledger = nullptr);

// One tracked body advanced by the mapping-and-adjusting loop.
class Simulation {
 public:
  Simulation(TriMesh mesh, VelocityField field, StepConfig config,
             std::uint64_t seed);

  StepReport step(double t, double dt);

  // Uniform time steps from t0 to t_end; the final step is shortened to
  // land exactly on t_end.
  std::vector<StepReport> run(double t0, double t_end, double dt);

  const TriMesh& mesh() const { return mesh_; }
  TriMesh& mesh() { return mesh_; }
  const CostLedger& ledger() const { return ledger_; }
  std::uint64_t seed() const { return seed_; }

 private:
  TriMesh mesh_;
  VelocityField field_;
  StepConfig config_;
  Rng rng_;
  CostLedger ledger_;
  std::uint64_t seed_;
  int steps_taken_ = 0;
};

}  // namespace mars
