#pragma once

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mars/tri_mesh.hpp"

namespace mars {

// Adjustment tiers in increasing cost and generality: elementary edge
// operations, spring relocation, local regeneration.
enum class Tier { Elementary, Relocation, Regeneration };

inline const char* tier_name(Tier tier) {
  switch (tier) {
    case Tier::Elementary:
      return "ema";
    case Tier::Relocation:
      return "vrem";
    default:
      return "ltr";
  }
}

// Per-tier tallies of resolved violations, adjusted triangles, and wall
// time. Shares are percentages over the nonzero totals.
class CostLedger {
 public:
  void record(Tier tier, int triangles, double seconds) {
    const int i = static_cast<int>(tier);
    events_[i] += 1;
    triangles_[i] += triangles;
    seconds_[i] += seconds;
  }
  void add_time(Tier tier, double seconds) {
    seconds_[static_cast<int>(tier)] += seconds;
  }

  long long events(Tier t) const { return events_[static_cast<int>(t)]; }
  long long triangles(Tier t) const { return triangles_[static_cast<int>(t)]; }
  double seconds(Tier t) const { return seconds_[static_cast<int>(t)]; }

  double event_share(Tier t) const { return share(events_, t); }
  double triangle_share(Tier t) const { return share(triangles_, t); }
  double time_share(Tier t) const { return share(seconds_, t); }

  void merge(const CostLedger& other) {
    for (int i = 0; i < 3; ++i) {
      events_[i] += other.events_[i];
      triangles_[i] += other.triangles_[i];
      seconds_[i] += other.seconds_[i];
    }
  }

 private:
  template <class A>
  double share(const A& values, Tier t) const {
    double total = 0.0;
    for (int i = 0; i < 3; ++i) total += static_cast<double>(values[i]);
    if (total <= 0.0) return 0.0;
    return 100.0 * static_cast<double>(values[static_cast<int>(t)]) / total;
  }

  std::array<long long, 3> events_{0, 0, 0};
  std::array<long long, 3> triangles_{0, 0, 0};
  std::array<double, 3> seconds_{0.0, 0.0, 0.0};
};

// Mean absolute radial deviation of the markers from the exact sphere, and
// its area-scaled geometric counterpart.
struct ErrorRecord {
  double e1 = 0.0;
  double eg = 0.0;
  int markers = 0;
  double radius = 0.0;
  Vec3 center = Vec3::Zero();
};

double geometric_error(double e1, double radius);

ErrorRecord radial_error(const TriMesh& mesh, const Vec3& center,
                         double radius);

// Observed orders log2(E_coarse / E_fine) for a grid-halving sequence of
// (h, error) pairs; nullopt when the h sequence does not halve. A zero fine
// error yields an unset (nullopt) entry.
std::optional<std::vector<std::optional<double>>> convergence_orders(
    std::span<const std::pair<double, double>> h_and_error);

struct QualityStats {
  double min_angle = kPi;
  double mean_angle = 0.0;
  double min_edge = 0.0;
  double max_edge = 0.0;
  double mean_edge = 0.0;
  std::array<int, 18> angle_histogram{};  // 10-degree bins
};

QualityStats quality_stats(const TriMesh& mesh);

}  // namespace mars
