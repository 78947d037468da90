#include "brepair/set_semantics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace brepair {

namespace {

constexpr int kSamples = 128;
constexpr double kNeighbourhood = 10.0;

bool in_face(const Body& body, int face_id, const Point3& p, double tol) {
  return std::abs(signed_distance(body.face(face_id).surface, p)) <= tol &&
         classify_point_on_face(body, face_id, p, tol) != FacePointState::outside;
}

// Parameter where the predicate flips between `in` and `out`.
template <class Pred>
double boundary_param(double in, double out, Pred&& pred) {
  for (int i = 0; i < 50; ++i) {
    const double mid = 0.5 * (in + out);
    (pred(mid) ? in : out) = mid;
  }
  return in;
}

// Sub-range of the curve inside the ball, assuming the ball holds one arc.
std::optional<std::pair<double, double>> range_in_ball(const Curve& c, const Ball& ball) {
  const CurveProjection cp = closest_param_on_curve(c, ball.center);
  if (cp.distance > ball.radius) return std::nullopt;
  const auto inside = [&](double t) { return (eval_curve(c, t) - ball.center).norm() <= ball.radius; };
  const double lo = inside(c.t_start()) ? c.t_start() : boundary_param(cp.t, c.t_start(), inside);
  const double hi = inside(c.t_end()) ? c.t_end() : boundary_param(cp.t, c.t_end(), inside);
  return std::pair{lo, hi};
}

}  // namespace

EdgeFaceSet intersect_curve_face(const Curve& full, const Body& body, int face_id, double tol,
                                 const std::optional<Ball>& within) {
  EdgeFaceSet out;
  Curve curve = full;
  if (within) {
    const auto r = range_in_ball(full, *within);
    if (!r) return out;
    curve = full.with_range(r->first, r->second);
  }
  const double t0 = curve.t_start(), t1 = curve.t_end();
  const auto in = [&](double t) { return in_face(body, face_id, eval_curve(curve, t), tol); };

  // runs of consecutive samples in the face become spans
  std::vector<bool> flags(kSamples + 1);
  for (int i = 0; i <= kSamples; ++i) flags[i] = in(t0 + (t1 - t0) * i / kSamples);
  for (int i = 0; i <= kSamples;) {
    if (!flags[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < kSamples && flags[j + 1]) ++j;
    if (j > i) {
      const double a = t0 + (t1 - t0) * i / kSamples, b = t0 + (t1 - t0) * j / kSamples;
      const double lo = i == 0 ? a : boundary_param(a, a - (t1 - t0) / kSamples, in);
      const double hi = j == kSamples ? b : boundary_param(b, b + (t1 - t0) / kSamples, in);
      // a transversal crossing also leaves a run inside the tolerance band,
      // but its ends sit on the band's edge
      const Surface& surf = body.face(face_id).surface;
      double drift = std::max(std::abs(signed_distance(surf, eval_curve(curve, lo))),
                              std::abs(signed_distance(surf, eval_curve(curve, hi))));
      for (int k = i; k <= j; ++k)
        drift = std::max(drift, std::abs(signed_distance(surf, eval_curve(curve, t0 + (t1 - t0) * k / kSamples))));
      if (drift < 0.5 * tol && curve_length(curve.with_range(lo, hi)) > tol)
        out.spans.emplace_back(lo, hi);
    }
    i = j + 1;
  }
  const auto covered = [&](double t) {
    return std::any_of(out.spans.begin(), out.spans.end(), [&](const auto& s) {
      return (eval_curve(curve, std::clamp(t, s.first, s.second)) - eval_curve(curve, t)).norm() <= tol;
    });
  };
  std::vector<CurveSurfaceHit> hits;
  try {
    hits = curve_surface(curve, body.face(face_id).surface);
  } catch (const IntersectError&) {
    // curve inside the surface: spans already describe it
  }
  for (const auto& h : hits) {
    if (covered(h.t) || classify_point_on_face(body, face_id, h.p, tol) == FacePointState::outside) continue;
    const bool seen = std::any_of(out.points.begin(), out.points.end(),
                                  [&](const Point3& q) { return (q - h.p).norm() <= tol; });
    if (seen) continue;
    out.points.push_back(h.p);
  }
  if (within)
    std::erase_if(out.points, [&](const Point3& q) { return (q - within->center).norm() > within->radius; });
  return out;
}

EdgeFaceSet topological_intersect_edge_face(const Body& edge_body, int edge_id, const Body& face_body,
                                            int face_id, double tol) {
  return intersect_curve_face(edge_body.edge(edge_id).curve, face_body, face_id, tol);
}

bool check_rule1(const Body& b, int edge_id, int face_id, double tol) {
  if (!is_member(b, {EntityType::edge, edge_id}, {EntityType::face, face_id}))
    throw std::invalid_argument("edge is not a boundary edge of the face");
  const Curve& c = b.edge(edge_id).curve;
  const EdgeFaceSet s = topological_intersect_edge_face(b, edge_id, b, face_id, tol);
  if (s.spans.size() != 1 || !s.points.empty()) return false;
  const auto [lo, hi] = s.spans.front();
  return (eval_curve(c, lo) - curve_start(c)).norm() <= tol && (eval_curve(c, hi) - curve_end(c)).norm() <= tol;
}

namespace {

bool only_point(const EdgeFaceSet& s, const Point3& v, double tol) {
  return s.spans.empty() && s.points.size() == 1 && (s.points.front() - v).norm() <= tol;
}

}  // namespace

bool check_rule2(const Body& edge_body, int edge_id, const Body& face_body, int face_id, const Point3& v,
                 double tol) {
  const Curve& c = edge_body.edge(edge_id).curve;
  const EdgeFaceSet whole = intersect_curve_face(c, face_body, face_id, tol);
  const bool found = std::any_of(whole.points.begin(), whole.points.end(),
                                 [&](const Point3& q) { return (q - v).norm() <= tol; });
  if (!found) throw std::invalid_argument("vertex is not an intersection point of the edge and face");
  return only_point(intersect_curve_face(c, face_body, face_id, tol, Ball{v, kNeighbourhood * tol}), v, tol);
}

bool check_lemma1(const Body& b1, int e1, int f1, const Body& b2, int e2, int f2, const Point3& v0,
                  double tol) {
  if (!is_member(b1, {EntityType::edge, e1}, {EntityType::face, f1}) ||
      !is_member(b2, {EntityType::edge, e2}, {EntityType::face, f2}))
    throw std::invalid_argument("edges must bound their faces");
  const Curve& c1 = b1.edge(e1).curve;
  const Curve& c2 = b2.edge(e2).curve;
  if (closest_param_on_curve(c1, v0).distance > tol || closest_param_on_curve(c2, v0).distance > tol)
    throw std::invalid_argument("v0 must lie on both edges");
  const Ball near{v0, kNeighbourhood * tol};
  return only_point(intersect_curve_face(c2, b1, f1, tol, near), v0, tol) &&
         only_point(intersect_curve_face(c1, b2, f2, tol, near), v0, tol);
}

}  // namespace brepair
