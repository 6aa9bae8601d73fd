#include "mars/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace mars {

double geometric_error(double e1, double radius) {
  return 4.0 * kPi * radius * radius * e1;
}

ErrorRecord radial_error(const TriMesh& mesh, const Vec3& center,
                         double radius) {
  ErrorRecord record;
  record.center = center;
  record.radius = radius;
  double sum = 0.0;
  for (int v = 0; v < mesh.vertex_capacity(); ++v) {
    if (!mesh.vertex_alive(v)) continue;
    sum += std::abs((mesh.position(v) - center).norm() - radius);
    ++record.markers;
  }
  if (record.markers == 0) throw MeshError("radial_error: empty mesh");
  record.e1 = sum / record.markers;
  record.eg = geometric_error(record.e1, radius);
  return record;
}

std::optional<std::vector<std::optional<double>>> convergence_orders(
    std::span<const std::pair<double, double>> h_and_error) {
  if (h_and_error.size() < 2) return std::nullopt;
  std::vector<std::optional<double>> orders;
  for (std::size_t i = 1; i < h_and_error.size(); ++i) {
    const auto [h_coarse, e_coarse] = h_and_error[i - 1];
    const auto [h_fine, e_fine] = h_and_error[i];
    if (std::abs(h_fine * 2.0 - h_coarse) > 1e-12 * h_coarse)
      return std::nullopt;
    if (e_fine == 0.0)
      orders.push_back(std::nullopt);
    else
      orders.push_back(std::log2(e_coarse / e_fine));
  }
  return orders;
}

QualityStats quality_stats(const TriMesh& mesh) {
  QualityStats stats;
  stats.min_edge = std::numeric_limits<double>::infinity();
  double angle_sum = 0.0;
  long long angle_count = 0;
  for (int t = 0; t < mesh.triangle_capacity(); ++t) {
    if (!mesh.triangle_alive(t)) continue;
    const auto p = mesh.triangle_points(t);
    for (double a : interior_angles(p[0], p[1], p[2])) {
      stats.min_angle = std::min(stats.min_angle, a);
      angle_sum += a;
      ++angle_count;
      const int bin = std::clamp(
          static_cast<int>(a / kPi * 18.0), 0, 17);
      ++stats.angle_histogram[bin];
    }
  }
  if (angle_count) stats.mean_angle = angle_sum / angle_count;

  double edge_sum = 0.0;
  long long edge_count = 0;
  for (const VertexPair& e : mesh.edges()) {
    const double len = mesh.edge_length(e);
    stats.min_edge = std::min(stats.min_edge, len);
    stats.max_edge = std::max(stats.max_edge, len);
    edge_sum += len;
    ++edge_count;
  }
  if (edge_count) stats.mean_edge = edge_sum / edge_count;
  return stats;
}

}  // namespace mars
