#pragma once

#include "brepair/intersect.hpp"
#include "brepair/topology.hpp"

#include <optional>
#include <vector>

namespace brepair {

/// Edge-face intersection as point sets: isolated points plus parameter
/// spans of the curve lying in the face.
struct EdgeFaceSet {
  std::vector<Point3> points;
  std::vector<std::pair<double, double>> spans;
  bool empty() const { return points.empty() && spans.empty(); }
};

struct Ball {
  Point3 center = Point3::Zero();
  double radius = 0.0;
};

/// Part of `curve` inside the trimmed face, optionally restricted to a ball.
EdgeFaceSet intersect_curve_face(const Curve& curve, const Body& body, int face_id, double tol,
                                 const std::optional<Ball>& within = std::nullopt);
EdgeFaceSet topological_intersect_edge_face(const Body& edge_body, int edge_id, const Body& face_body,
                                            int face_id, double tol);

/// A boundary edge of a face meets it in the whole edge. Requires membership.
bool check_rule1(const Body& b, int edge_id, int face_id, double tol);
/// A vertex found by intersecting an edge and a face is, within a ball of
/// radius 10 * tol around it, the whole intersection.
bool check_rule2(const Body& edge_body, int edge_id, const Body& face_body, int face_id, const Point3& v,
                 double tol);
/// For e1 in f1, e2 in f2 meeting only at v0: near v0 both f1 with e2 and
/// e1 with f2 reduce to {v0}.
bool check_lemma1(const Body& b1, int e1, int f1, const Body& b2, int e2, int f2, const Point3& v0,
                  double tol);

}  // namespace brepair
