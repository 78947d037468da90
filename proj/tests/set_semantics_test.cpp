#include "brepair/primitives.hpp"
#include "brepair/set_semantics.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <set>

namespace brepair {
namespace {

constexpr double kTol = 1e-6;

Body box(const Point3& corner, const Vec3& dims, int id_base = 1, const Vec3& axis = Vec3::UnitZ()) {
  return build_primitive({PrimitiveKind::box, Frame::from_axis(corner, axis), {dims.x(), dims.y(), dims.z()}}, 0,
                         id_base);
}

// Face holding `p` in its interior.
int face_at(const Body& b, const Point3& p) {
  for (const auto& [id, f] : b.faces())
    if (std::abs(signed_distance(f.surface, p)) < 1e-9 && classify_point_on_face(b, id, p, 1e-9) == FacePointState::inside)
      return id;
  return 0;
}

int edge_between(const Body& b, const Point3& p, const Point3& q) {
  for (const auto& [id, e] : b.edges()) {
    const Point3 s = edge_start_point(e), t = edge_end_point(e);
    if (((s - p).norm() < 1e-9 && (t - q).norm() < 1e-9) || ((s - q).norm() < 1e-9 && (t - p).norm() < 1e-9))
      return id;
  }
  return 0;
}

std::vector<std::pair<int, int>> memberships(const Body& b) {
  std::vector<std::pair<int, int>> out;
  for (const auto& [fid, f] : b.faces())
    for (const Loop& l : f.loops)
      for (const Coedge& c : l.coedges) out.emplace_back(c.edge, fid);
  return out;
}

TEST(RuleOne, EveryBoundaryEdgeOfPlanarFacesSurvivesWhole) {
  const std::vector<Body> bodies{
      box({0, 0, 0}, {1, 1, 1}), box({0.3, -0.2, 0.1}, {2, 0.5, 1}, 1, Vec3(0.2, 0.3, 1)),
      build_primitive({PrimitiveKind::regular_prism, Frame{}, {2, 1}, 6})};
  int checked = 0;
  for (const Body& b : bodies)
    for (const auto& [e, f] : memberships(b)) {
      EXPECT_TRUE(check_rule1(b, e, f, kTol)) << "edge " << e << " face " << f;
      ++checked;
    }
  EXPECT_GE(checked, 10);
}

TEST(RuleOne, CurvedFacesIncludingSeams) {
  const std::vector<Body> bodies{build_primitive({PrimitiveKind::cylinder, Frame{}, {1, 2}}),
                                 build_primitive({PrimitiveKind::cone, Frame{}, {1, 1.5}})};
  for (const Body& b : bodies)
    for (const auto& [e, f] : memberships(b)) EXPECT_TRUE(check_rule1(b, e, f, kTol)) << "edge " << e << " face " << f;
}

TEST(RuleOne, SharedEdgeBelongsToBothFaces) {
  const Body b = box({0, 0, 0}, {1, 1, 1});
  const int e = edge_between(b, {0, 0, 1}, {1, 0, 1});
  const int top = face_at(b, {0.5, 0.5, 1}), front = face_at(b, {0.5, 0, 0.5});
  ASSERT_TRUE(e && top && front);
  EXPECT_TRUE(check_rule1(b, e, top, kTol));
  EXPECT_TRUE(check_rule1(b, e, front, kTol));
}

TEST(RuleOne, NonMemberIsRejected) {
  const Body b = box({0, 0, 0}, {1, 1, 1});
  EXPECT_THROW(check_rule1(b, edge_between(b, {0, 0, 0}, {1, 0, 0}), face_at(b, {0.5, 0.5, 1}), kTol),
               std::invalid_argument);
}

// Vertical edges of a small box piercing the top face of the unit box.
TEST(RuleTwo, PiercingEdgesReduceToTheirCrossingPoint) {
  const Body a = box({0, 0, 0}, {1, 1, 1});
  const int top = face_at(a, {0.5, 0.5, 1});
  int checked = 0;
  for (int k = 0; k < 10; ++k) {
    const Point3 corner(0.1 + 0.05 * k, 0.2 + 0.03 * k, 0.4);
    const Body b = box(corner, {0.25, 0.3, 1.2}, 10001);
    const Point3 oracle(corner.x(), corner.y(), 1.0);
    const int e = edge_between(b, corner, corner + Vec3(0, 0, 1.2));
    ASSERT_TRUE(e);
    const EdgeFaceSet s = topological_intersect_edge_face(b, e, a, top, kTol);
    ASSERT_EQ(s.points.size(), 1u);
    EXPECT_TRUE(s.spans.empty());
    EXPECT_LT((s.points.front() - oracle).norm(), 1e-12);
    EXPECT_TRUE(check_rule2(b, e, a, top, s.points.front(), kTol));
    ++checked;
  }
  EXPECT_EQ(checked, 10);
}

TEST(RuleTwo, TiltedAndBoundaryCrossings) {
  const Body a = box({0, 0, 0}, {1, 1, 1});
  const int top = face_at(a, {0.5, 0.5, 1});
  // line from p along d meets z = 1 at p + (1 - p.z) / d.z * d
  const std::vector<std::pair<Point3, Vec3>> lines{
      {{0.5, 0.5, 0.5}, {0.3, 0.1, 1}}, {{0.2, 0.7, 0.2}, {-0.1, 0.05, 1}}, {{0.5, 0.2, 0.9}, {1, 0.2, 0.4}},
      {{1.0, 0.5, 0.5}, {0, 0, 1}},     {{0.0, 0.0, 0.5}, {0, 0, 1}},       {{0.9, 0.9, 0.0}, {-0.5, -0.4, 1}}};
  for (const auto& [p, d] : lines) {
    Body b(2, 10001);
    const Point3 q = p + 2.0 * d.normalized();
    const int v0 = b.add_vertex(p), v1 = b.add_vertex(q);
    const int e = b.add_edge(Curve::segment(p, q), v0, v1);
    const Point3 oracle = p + (1 - p.z()) / d.z() * d;
    const EdgeFaceSet s = topological_intersect_edge_face(b, e, a, top, kTol);
    ASSERT_EQ(s.points.size(), 1u) << p.transpose();
    EXPECT_LT((s.points.front() - oracle).norm(), 1e-9);
    EXPECT_TRUE(check_rule2(b, e, a, top, oracle, kTol));
  }
}

TEST(RuleTwo, EdgeLyingInTheFaceIsNotAPointIntersection) {
  const Body a = box({0, 0, 0}, {1, 1, 1});
  const int top = face_at(a, {0.5, 0.5, 1});
  Body b(2, 10001);
  const Point3 p(0.2, 0.5, 1), q(0.8, 0.5, 1);
  const int e = b.add_edge(Curve::segment(p, q), b.add_vertex(p), b.add_vertex(q));
  const EdgeFaceSet s = topological_intersect_edge_face(b, e, a, top, kTol);
  EXPECT_TRUE(s.points.empty());
  ASSERT_EQ(s.spans.size(), 1u);
  EXPECT_THROW(check_rule2(b, e, a, top, {0.5, 0.5, 1}, kTol), std::invalid_argument);
}

// Front-top edge of the unit box crossed by the bottom-left edge of a box
// resting on it: e1 in the front face, e2 in the left face of the other box.
TEST(LemmaOne, CrossingBoundaryEdgesMeetOnlyAtTheirVertex) {
  const Body a = box({0, 0, 0}, {1, 1, 1});
  const int e1 = edge_between(a, {0, 0, 1}, {1, 0, 1});
  const int f1 = face_at(a, {0.5, 0, 0.5});
  int checked = 0;
  for (int k = 0; k < 10; ++k) {
    const double x = 0.1 + 0.08 * k, y = 0.15 + 0.07 * k;
    const Body b = box({x, -y, 1}, {1, 1, 1}, 10001);
    const int e2 = edge_between(b, {x, -y, 1}, {x, 1 - y, 1});
    const int f2 = face_at(b, {x, 0.5 - y, 1.5});
    ASSERT_TRUE(e1 && f1 && e2 && f2);
    EXPECT_TRUE(check_lemma1(a, e1, f1, b, e2, f2, {x, 0, 1}, kTol)) << k;
    ++checked;
  }
  EXPECT_EQ(checked, 10);
}

TEST(LemmaOne, FailsWhenTheOtherEdgeLiesInTheFace) {
  const Body a = box({0, 0, 0}, {1, 1, 1});
  const Body b = box({0.4, -0.5, 1}, {1, 1, 1}, 10001);
  const int e1 = edge_between(a, {0, 0, 1}, {1, 0, 1});
  const int top = face_at(a, {0.5, 0.5, 1});
  const int e2 = edge_between(b, {0.4, -0.5, 1}, {0.4, 0.5, 1});
  const int f2 = face_at(b, {0.4, 0, 1.5});
  // e2 runs across the top face of a, so near v0 the top face meets a segment
  EXPECT_FALSE(check_lemma1(a, e1, top, b, e2, f2, {0.4, 0, 1}, kTol));
}

// Endpoint sets of all face-pair intersections, rounded for comparison.
std::set<std::array<long long, 3>> endpoints(const Body& a, const Body& b) {
  std::set<std::array<long long, 3>> out;
  const auto key = [](const Point3& p) {
    return std::array<long long, 3>{std::llround(p.x() * 1e9), std::llround(p.y() * 1e9), std::llround(p.z() * 1e9)};
  };
  for (const auto& [fa, x] : a.faces())
    for (const auto& [fb, y] : b.faces())
      for (const auto& e : topological_intersect_faces(a, fa, b, fb).edges) {
        out.insert(key(curve_start(e.curve)));
        out.insert(key(curve_end(e.curve)));
      }
  return out;
}

TEST(SetLaws, FaceIntersectionIsCommutative) {
  const Body a = box({0, 0, 0}, {1, 1, 1});
  for (int k = 0; k < 5; ++k) {
    const Body b = box({0.5 - 0.1 * k, 0.3 + 0.05 * k, 0.25 + 0.1 * k}, {1, 1, 1}, 10001, Vec3(0.1 * k, 0.05, 1));
    const auto ab = endpoints(a, b), ba = endpoints(b, a);
    EXPECT_FALSE(ab.empty());
    EXPECT_EQ(ab, ba) << k;
  }
}

}  // namespace
}  // namespace brepair
