#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace risk_sieve {

using Point2 = Eigen::Vector2d;

/// Arc-length-parametrized 2D polyline. Vertex 0 is the owning agent's
/// current position. A single-vertex path is the degenerate "point path"
/// produced by cutting at horizon zero; distance operations treat it as a
/// point.
class PolylinePath {
 public:
  PolylinePath() = default;
  explicit PolylinePath(std::vector<Point2> vertices);

  const std::vector<Point2>& vertices() const { return vertices_; }
  const std::vector<double>& cumulative_arclen() const { return arclen_; }
  std::size_t size() const { return vertices_.size(); }
  double total_length() const { return arclen_.empty() ? 0.0 : arclen_.back(); }
  bool is_point() const { return vertices_.size() == 1; }

 private:
  std::vector<Point2> vertices_;
  std::vector<double> arclen_;
};

struct Crossing {
  Point2 point;
  double arclen_ego;
  double arclen_other;
};

// Intersection / degeneracy tolerance, meter scale in double precision.
inline constexpr double kGeomTol = 1e-9;

/// Position at arc length m; m outside [0, total length] clamps to the ends.
Point2 point_at(const PolylinePath& path, double m);

/// Exact minimum Euclidean distance between two polylines, closed-form per
/// segment pair. Zero if they intersect.
double min_path_distance(const PolylinePath& a, const PolylinePath& b);

/// Prefix of the path from arc length 0 to min(horizon, total length).
/// horizon = 0 yields the single-vertex point path.
PolylinePath cut_path(const PolylinePath& path, double horizon);

/// Suffix of the path from arc length m to the end; the first vertex of the
/// result is point_at(path, m).
PolylinePath suffix_from(const PolylinePath& path, double m);

/// First transversal crossing in ego arc-length order, or nullopt. Parallel
/// overlaps do not count as crossings.
std::optional<Crossing> find_crossing(const PolylinePath& ego,
                                      const PolylinePath& other);

/// Arc length of the point on the path, if the point lies on it within tol.
std::optional<double> locate_on_path(const PolylinePath& path, const Point2& p,
                                     double tol = 1e-6);

// Closed-form primitives, exposed for oracle tests.
double point_segment_distance(const Point2& p, const Point2& a, const Point2& b);
double segment_segment_distance(const Point2& a0, const Point2& a1,
                                const Point2& b0, const Point2& b1);

}  // namespace risk_sieve
