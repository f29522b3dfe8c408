#include "risk_sieve/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace risk_sieve {

namespace {

double cross2(const Point2& a, const Point2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

}  // namespace

PolylinePath::PolylinePath(std::vector<Point2> vertices)
    : vertices_(std::move(vertices)) {
  if (vertices_.empty()) {
    throw std::invalid_argument("polyline needs at least one vertex");
  }
  arclen_.reserve(vertices_.size());
  arclen_.push_back(0.0);
  for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
    if (!vertices_[i].allFinite()) {
      throw std::invalid_argument("polyline vertex is not finite");
    }
    const double seg = (vertices_[i + 1] - vertices_[i]).norm();
    if (seg <= kGeomTol) {
      throw std::invalid_argument("polyline has a zero-length segment");
    }
    arclen_.push_back(arclen_.back() + seg);
  }
  if (!vertices_.back().allFinite()) {
    throw std::invalid_argument("polyline vertex is not finite");
  }
}

Point2 point_at(const PolylinePath& path, double m) {
  const auto& vs = path.vertices();
  const auto& al = path.cumulative_arclen();
  if (vs.size() == 1 || m <= 0.0) return vs.front();
  if (m >= al.back()) return vs.back();
  // first arclen entry > m; segment index is one before it
  const auto it = std::upper_bound(al.begin(), al.end(), m);
  const std::size_t i = static_cast<std::size_t>(it - al.begin()) - 1;
  const double t = (m - al[i]) / (al[i + 1] - al[i]);
  return vs[i] + t * (vs[i + 1] - vs[i]);
}

double point_segment_distance(const Point2& p, const Point2& a,
                              const Point2& b) {
  const Point2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Closest-point pair between two segments via clamped projection
// (Ericson, Real-Time Collision Detection, 5.1.9). Proper intersections
// return exactly zero.
double segment_segment_distance(const Point2& a0, const Point2& a1,
                                const Point2& b0, const Point2& b1) {
  const Point2 d1 = a1 - a0;
  const Point2 d2 = b1 - b0;
  const Point2 r = a0 - b0;
  {
    const double denom = cross2(d1, d2);
    if (std::abs(denom) > kGeomTol) {
      const double t = cross2(b0 - a0, d2) / denom;
      const double u = cross2(b0 - a0, d1) / denom;
      if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) return 0.0;
    }
  }
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);

  double s = 0.0, t = 0.0;
  if (a <= kGeomTol * kGeomTol && e <= kGeomTol * kGeomTol) {
    return r.norm();
  }
  if (a <= kGeomTol * kGeomTol) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kGeomTol * kGeomTol) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      if (denom > 0.0) {
        s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      }
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((a0 + s * d1) - (b0 + t * d2)).norm();
}

namespace {

// canonical argument order so the evaluation sequence (and therefore the
// result bits) cannot depend on which path is passed first
bool path_precedes(const PolylinePath& a, const PolylinePath& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  for (std::size_t i = 0; i < va.size(); ++i) {
    if (va[i].x() != vb[i].x()) return va[i].x() < vb[i].x();
    if (va[i].y() != vb[i].y()) return va[i].y() < vb[i].y();
  }
  return true;
}

}  // namespace

double min_path_distance(const PolylinePath& a, const PolylinePath& b) {
  if (!path_precedes(a, b)) return min_path_distance(b, a);
  const auto& va = a.vertices();
  const auto& vb = b.vertices();
  double best = std::numeric_limits<double>::infinity();
  if (a.is_point() && b.is_point()) {
    return (va[0] - vb[0]).norm();
  }
  if (a.is_point()) {
    for (std::size_t j = 0; j + 1 < vb.size(); ++j) {
      best = std::min(best, point_segment_distance(va[0], vb[j], vb[j + 1]));
    }
    return best;
  }
  if (b.is_point()) {
    for (std::size_t i = 0; i + 1 < va.size(); ++i) {
      best = std::min(best, point_segment_distance(vb[0], va[i], va[i + 1]));
    }
    return best;
  }
  for (std::size_t i = 0; i + 1 < va.size(); ++i) {
    for (std::size_t j = 0; j + 1 < vb.size(); ++j) {
      best = std::min(
          best, segment_segment_distance(va[i], va[i + 1], vb[j], vb[j + 1]));
      if (best == 0.0) return 0.0;
    }
  }
  return best;
}

PolylinePath cut_path(const PolylinePath& path, double horizon) {
  if (horizon < 0.0) {
    throw std::invalid_argument("cut_path horizon must be >= 0");
  }
  const auto& vs = path.vertices();
  const auto& al = path.cumulative_arclen();
  if (horizon <= kGeomTol) {
    return PolylinePath({vs.front()});
  }
  if (horizon >= path.total_length() - kGeomTol) {
    return path;
  }
  std::vector<Point2> out;
  for (std::size_t i = 0; i < vs.size() && al[i] < horizon - kGeomTol; ++i) {
    out.push_back(vs[i]);
  }
  out.push_back(point_at(path, horizon));
  return PolylinePath(std::move(out));
}

PolylinePath suffix_from(const PolylinePath& path, double m) {
  const auto& vs = path.vertices();
  const auto& al = path.cumulative_arclen();
  if (m <= kGeomTol) return path;
  if (m >= path.total_length() - kGeomTol) {
    return PolylinePath({vs.back()});
  }
  std::vector<Point2> out;
  out.push_back(point_at(path, m));
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (al[i] > m + kGeomTol) out.push_back(vs[i]);
  }
  return PolylinePath(std::move(out));
}

std::optional<Crossing> find_crossing(const PolylinePath& ego,
                                      const PolylinePath& other) {
  const auto& ve = ego.vertices();
  const auto& vo = other.vertices();
  const auto& ale = ego.cumulative_arclen();
  const auto& alo = other.cumulative_arclen();
  if (ego.is_point() || other.is_point()) return std::nullopt;

  for (std::size_t i = 0; i + 1 < ve.size(); ++i) {
    const Point2 d1 = ve[i + 1] - ve[i];
    const double len1 = d1.norm();
    std::optional<Crossing> best;
    for (std::size_t j = 0; j + 1 < vo.size(); ++j) {
      const Point2 d2 = vo[j + 1] - vo[j];
      const double denom = cross2(d1, d2);
      if (std::abs(denom) <= kGeomTol) continue;  // parallel or collinear
      const Point2 delta = vo[j] - ve[i];
      const double t = cross2(delta, d2) / denom;
      const double u = cross2(delta, d1) / denom;
      const double slack_t = kGeomTol / std::max(len1, kGeomTol);
      const double slack_u = kGeomTol / std::max(d2.norm(), kGeomTol);
      if (t < -slack_t || t > 1.0 + slack_t) continue;
      if (u < -slack_u || u > 1.0 + slack_u) continue;
      const double tc = std::clamp(t, 0.0, 1.0);
      const double uc = std::clamp(u, 0.0, 1.0);
      Crossing c;
      c.point = ve[i] + tc * d1;
      c.arclen_ego = ale[i] + tc * len1;
      c.arclen_other = alo[j] + uc * d2.norm();
      if (!best || c.arclen_ego < best->arclen_ego) best = c;
    }
    if (best) return best;  // earliest ego segment wins
  }
  return std::nullopt;
}

std::optional<double> locate_on_path(const PolylinePath& path, const Point2& p,
                                     double tol) {
  const auto& vs = path.vertices();
  const auto& al = path.cumulative_arclen();
  if (path.is_point()) {
    if ((p - vs[0]).norm() <= tol) return 0.0;
    return std::nullopt;
  }
  double best = std::numeric_limits<double>::infinity();
  double best_arclen = 0.0;
  for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
    const Point2 ab = vs[i + 1] - vs[i];
    const double len2 = ab.squaredNorm();
    const double t = std::clamp((p - vs[i]).dot(ab) / len2, 0.0, 1.0);
    const double d = (p - (vs[i] + t * ab)).norm();
    if (d < best) {
      best = d;
      best_arclen = al[i] + t * std::sqrt(len2);
    }
  }
  if (best <= tol) return best_arclen;
  return std::nullopt;
}

}  // namespace risk_sieve
