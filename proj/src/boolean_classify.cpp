#include "brepair/boolean.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace brepair {

std::string to_string(FaceSide s) {
  switch (s) {
    case FaceSide::outside: return "outside";
    case FaceSide::inside: return "inside";
    case FaceSide::on_same: return "on_same";
    case FaceSide::on_opposite: return "on_opposite";
  }
  return "?";
}

namespace {

struct Sample {
  Point3 p;
  Vec3 outward;
};

const Vec3 kRays[] = {
    Vec3(0.5773, 0.6142, 0.5381), Vec3(-0.7071, 0.1729, 0.6857), Vec3(0.2113, -0.8467, 0.4881),
    Vec3(-0.3127, -0.4211, -0.8514), Vec3(0.8830, -0.3541, -0.3083), Vec3(0.1030, 0.9733, -0.2052),
    Vec3(-0.6321, -0.7049, 0.3218), Vec3(0.4415, 0.2672, -0.8566)};

Box3 body_box(const Body& b) {
  Box3 box;
  for (const auto& [id, f] : b.faces()) box.extend(face_bounds(b, id));
  return box;
}

double dist_to_polys(const std::vector<std::vector<Point2>>& polys, const Point2& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& poly : polys)
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
      const Point2 ab = poly[i] - poly[j];
      const double len2 = ab.squaredNorm();
      const double s = len2 > 0 ? std::clamp((q - poly[j]).dot(ab) / len2, 0.0, 1.0) : 0.0;
      best = std::min(best, (poly[j] + s * ab - q).norm());
    }
  return best;
}

Sample at(const Face& f, const Point2& uv) {
  const Point3 p = eval_surface(f.surface, uv.x(), uv.y());
  Vec3 n = surface_normal_at(f.surface, p);
  if (f.reversed) n = -n;
  return {p, n};
}

// Candidate points inside the face, farthest from its param loops first.
std::vector<Sample> interior_samples(const Body& b, int face_id, std::size_t count) {
  const Face& f = b.face(face_id);
  const FaceDomain& d = *b.domain(face_id);
  std::vector<std::pair<double, Point2>> found;
  for (int n : {32, 256}) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Point2 uv(d.bounds.u0 + (i + 0.5) / n * (d.bounds.u1 - d.bounds.u0),
                        d.bounds.v0 + (j + 0.5) / n * (d.bounds.v1 - d.bounds.v0));
        if (param_point_in_domain(d, uv)) found.emplace_back(dist_to_polys(d.loops, uv), uv);
      }
    if (!found.empty()) break;
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  std::vector<Sample> out;
  for (std::size_t i = 0; i < found.size() && out.size() < count; ++i) out.push_back(at(f, found[i].second));
  if (out.empty() && !d.loops.empty()) {
    Point2 c = Point2::Zero();
    for (const auto& q : d.loops.front()) c += q;
    out.push_back(at(f, c / static_cast<double>(d.loops.front().size())));
  }
  return out;
}

struct Contact {
  int face = 0;
  FacePointState state = FacePointState::outside;
};

// Face of `body` the point lies on, preferring one that holds it in its
// interior over one where it meets an edge.
Contact face_under(const Body& body, const Point3& p, double tol) {
  Contact best;
  for (const auto& [id, f] : body.faces()) {
    if (std::abs(signed_distance(f.surface, p)) > tol) continue;
    const FacePointState st = classify_point_on_face(body, id, p, tol);
    if (st == FacePointState::inside) return {id, st};
    if (st == FacePointState::boundary && !best.face) best = {id, st};
  }
  return best;
}

// Crossing parity along one ray; nullopt when the ray grazes an edge,
// lies in a surface or hits the point itself.
std::optional<bool> ray_parity(const Body& body, const Point3& p, const Vec3& dir, double length,
                               double tol) {
  const Curve ray = Curve::segment(p, p + length * dir);
  int crossings = 0;
  for (const auto& [id, f] : body.faces()) {
    std::vector<CurveSurfaceHit> hits;
    try {
      hits = curve_surface(ray, f.surface);
    } catch (const IntersectError&) {
      return std::nullopt;
    }
    for (const auto& h : hits) {
      if (h.tangential) continue;
      if ((h.p - p).norm() <= tol) return std::nullopt;
      switch (classify_point_on_face(body, id, h.p, tol)) {
        case FacePointState::inside: ++crossings; break;
        case FacePointState::boundary: return std::nullopt;
        case FacePointState::outside: break;
      }
    }
  }
  return crossings % 2 == 1;
}

FaceSide classify_by_rays(const Body& body, const Point3& p, double tol, bool check_on,
                          int* counted = nullptr) {
  if (check_on && face_under(body, p, tol).face) return FaceSide::on_same;
  const Box3 box = body_box(body);
  const double length = 2.0 * (box.diagonal().norm() + (p - box.center()).norm());
  int votes = 0, inside = 0;
  for (const Vec3& r : kRays) {
    const auto parity = ray_parity(body, p, r.normalized(), length, tol);
    if (!parity) continue;
    ++votes;
    inside += *parity;
    if (votes == 3) break;
  }
  if (counted) *counted = votes;
  return 2 * inside > votes ? FaceSide::inside : FaceSide::outside;
}

}  // namespace

FaceSide classify_point_in_body(const Body& body, const Point3& p, double tol) {
  return classify_by_rays(body, p, tol, true);
}

namespace {

// Side of a fragment relative to the other body. Samples on an edge of the
// other body, on a crossing surface, or with no usable ray are ambiguous;
// up to eight are tried before defaulting to outside.
FaceSide side_of(const Body& fragments, int face_id, const Body& other, double tol, bool& ambiguous) {
  ambiguous = false;
  for (const Sample& s : interior_samples(fragments, face_id, 8)) {
    const Contact c = face_under(other, s.p, tol);
    if (c.face) {
      const Face& of = other.face(c.face);
      Vec3 n = surface_normal_at(of.surface, s.p);
      if (of.reversed) n = -n;
      const double align = n.dot(s.outward);
      if (c.state == FacePointState::inside && std::abs(align) >= 0.5)
        return align > 0 ? FaceSide::on_same : FaceSide::on_opposite;
      continue;
    }
    int votes = 0;
    const FaceSide side = classify_by_rays(other, s.p, tol, false, &votes);
    if (votes > 0) return side;
  }
  ambiguous = true;
  return FaceSide::outside;
}

bool keeps(BooleanOp op, bool first, FaceSide s) {
  switch (op) {
    case BooleanOp::unite:
      return s == FaceSide::outside || (first && s == FaceSide::on_same);
    case BooleanOp::intersect:
      return s == FaceSide::inside || (first && s == FaceSide::on_same);
    case BooleanOp::subtract:
      if (first) return s == FaceSide::outside || s == FaceSide::on_opposite;
      return s == FaceSide::inside;
  }
  return false;
}

}  // namespace

Classification stage_classify(const Body& a, const Body& b, BooleanOp op, double t0) {
  Classification c;
  for (const auto& [id, f] : a.faces()) {
    bool unsure = false;
    const FaceSide s = side_of(a, id, b, t0, unsure);
    if (unsure) c.ambiguous.push_back(id);
    c.side_a[id] = s;
    if (keeps(op, true, s)) c.keep_a.push_back(id);
  }
  for (const auto& [id, f] : b.faces()) {
    bool unsure = false;
    const FaceSide s = side_of(b, id, a, t0, unsure);
    if (unsure) c.ambiguous.push_back(id);
    c.side_b[id] = s;
    if (keeps(op, false, s)) {
      c.keep_b.push_back(id);
      if (op == BooleanOp::subtract) c.flip.push_back(id);
    }
  }
  return c;
}

}  // namespace brepair
