#include "brepair/boolean.hpp"
#include "brepair/model_json.hpp"
#include "brepair/primitives.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace brepair {
namespace {

constexpr double kT0 = 1e-6;

Body cube(const Point3& corner, double size, int body_id, int id_base) {
  return build_primitive({PrimitiveKind::box, Frame::from_axis(corner, Vec3::UnitZ()), {size, size, size}}, body_id,
                         id_base);
}

// A point well inside a fragment, from its parameter domain.
Point3 interior_point(const Body& b, int face_id) {
  const FaceDomain& d = *b.domain(face_id);
  const int n = 64;
  double best = -1;
  Point2 pick = Point2::Zero();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Point2 uv(d.bounds.u0 + (i + 0.5) / n * (d.bounds.u1 - d.bounds.u0),
                      d.bounds.v0 + (j + 0.5) / n * (d.bounds.v1 - d.bounds.v0));
      if (!param_point_in_domain(d, uv)) continue;
      // distance to the nearest neighbour grid point outside, as a margin
      double margin = 1e9;
      for (int di = -3; di <= 3; ++di)
        for (int dj = -3; dj <= 3; ++dj) {
          const Point2 q = uv + Point2(di * (d.bounds.u1 - d.bounds.u0) / n, dj * (d.bounds.v1 - d.bounds.v0) / n);
          if (!param_point_in_domain(d, q)) margin = std::min(margin, std::hypot(di, dj));
        }
      if (margin > best) {
        best = margin;
        pick = uv;
      }
    }
  return eval_surface(b.face(face_id).surface, pick.x(), pick.y());
}

bool strictly_inside_box(const Point3& p, const Point3& lo, double size) {
  return (p.array() > lo.array() + 1e-9).all() && (p.array() < lo.array() + size - 1e-9).all();
}

PipelineRun run(const Body& a, const Body& b, BooleanOp op) { return run_pipeline(a, b, op, {kT0}); }

TEST(Intersect, DisjointBodiesGiveAnEmptyGraph) {
  const PipelineRun r = run(cube({0, 0, 0}, 1, 1, 1), cube({3, 0, 0}, 1, 2, 10001), BooleanOp::subtract);
  EXPECT_TRUE(r.graph.edges().empty());
  ASSERT_TRUE(r.merge);
  EXPECT_EQ(r.merge->body.faces().size(), 6u);
  EXPECT_TRUE(validate(r.merge->body).empty());
}

TEST(Intersect, OverlappingCubesMeetInOneClosedLoop) {
  const PipelineRun r = run(cube({0, 0, 0}, 1, 1, 1), cube({0.5, 0.5, 0.5}, 1, 2, 10001), BooleanOp::unite);
  EXPECT_EQ(r.graph.component_count(), 1);
  EXPECT_GE(r.graph.edges().size(), 4u);
  for (const auto& [id, e] : r.graph.edges()) EXPECT_EQ(r.graph.end_connection_state(id), EndConnection::both_ends);
}

TEST(Imprint, SegmentAcrossACubeFaceSplitsItInTwo) {
  const Body a = cube({0, 0, 0}, 1, 1, 1);
  const Body b = build_primitive({PrimitiveKind::box, Frame::from_axis({0.5, -1, 0.5}, Vec3::UnitZ()), {1, 3, 1}}, 2,
                                 10001);
  const PipelineRun r = run(a, b, BooleanOp::unite);
  ASSERT_TRUE(r.imprint) << r.error;
  int top = 0;
  for (const auto& [id, f] : a.faces())
    if (std::abs(signed_distance(f.surface, {0.5, 0.5, 1})) < 1e-12) top = id;
  const auto& parent = r.imprint->parent;
  const auto pieces = std::count_if(parent.begin(), parent.end(), [&](const auto& kv) {
    return kv.second == top && r.imprint->a.faces().count(kv.first);
  });
  EXPECT_EQ(pieces, 2);
}

// Axis-aligned cubes: each fragment's side is decided by box inequalities.
TEST(Classify, OverlappingCubesUnionKeepsTheOutsideFragments) {
  const Point3 lo_a(0, 0, 0), lo_b(0.5, 0.5, 0.5);
  const Body a = cube(lo_a, 1, 1, 1), b = cube(lo_b, 1, 2, 10001);
  const PipelineRun r = run(a, b, BooleanOp::unite);
  ASSERT_TRUE(r.merge) << r.error;
  std::size_t expected = 0;
  for (const auto& [id, f] : r.imprint->a.faces()) {
    const bool outside = !strictly_inside_box(interior_point(r.imprint->a, id), lo_b, 1);
    expected += outside;
    EXPECT_EQ(std::count(r.classification->keep_a.begin(), r.classification->keep_a.end(), id), outside ? 1 : 0);
  }
  for (const auto& [id, f] : r.imprint->b.faces()) {
    const bool outside = !strictly_inside_box(interior_point(r.imprint->b, id), lo_a, 1);
    expected += outside;
    EXPECT_EQ(std::count(r.classification->keep_b.begin(), r.classification->keep_b.end(), id), outside ? 1 : 0);
  }
  EXPECT_EQ(expected, 12u);
  EXPECT_EQ(r.merge->body.faces().size(), 12u);
  EXPECT_TRUE(r.merge->non_manifold_edges.empty());
  EXPECT_TRUE(r.merge->open_edges.empty());
  EXPECT_EQ(euler_characteristic(euler_counts(r.merge->body)), 2);
}

TEST(Classify, IntersectionAndSubtractionOfOverlappingCubes) {
  const Body a = cube({0, 0, 0}, 1, 1, 1), b = cube({0.5, 0.5, 0.5}, 1, 2, 10001);
  for (BooleanOp op : {BooleanOp::intersect, BooleanOp::subtract}) {
    const PipelineRun r = run(a, b, op);
    ASSERT_TRUE(r.merge) << r.error;
    // the overlap is a half cube: 3 + 3 faces; the difference keeps 6 of a and 3 of b
    EXPECT_EQ(r.merge->body.faces().size(), op == BooleanOp::intersect ? 6u : 9u) << to_string(op);
    EXPECT_TRUE(r.merge->non_manifold_edges.empty());
    EXPECT_TRUE(r.merge->open_edges.empty());
    EXPECT_EQ(euler_characteristic(euler_counts(r.merge->body)), 2);
  }
}

TEST(Classify, PointInBody) {
  const Body a = cube({0, 0, 0}, 1, 1, 1);
  EXPECT_EQ(classify_point_in_body(a, {0.5, 0.5, 0.5}, kT0), FaceSide::inside);
  EXPECT_EQ(classify_point_in_body(a, {1.5, 0.5, 0.5}, kT0), FaceSide::outside);
  EXPECT_EQ(classify_point_in_body(a, {0.5, 0.5, 1.0}, kT0), FaceSide::on_same);
}

TEST(Merge, CubeFacesVerbatimGiveTheCube) {
  const Body a = cube({0, 0, 0}, 1, 1, 1);
  Classification c;
  for (const auto& [id, f] : a.faces()) c.keep_a.push_back(id);
  const MergeResult m = stage_merge(a, Body(2, 10001), c);
  const EulerCounts n = euler_counts(m.body);
  EXPECT_EQ(n.vertices, 8);
  EXPECT_EQ(n.edges, 12);
  EXPECT_EQ(n.faces, 6);
  EXPECT_TRUE(validate(m.body).empty());
}

TEST(Symmetry, UnionAndIntersectionDoNotDependOnOperandOrder) {
  const Body a = cube({0, 0, 0}, 1, 1, 1), b = cube({0.5, 0.3, 0.6}, 1, 2, 10001);
  const Body a2 = cube({0, 0, 0}, 1, 2, 10001), b2 = cube({0.5, 0.3, 0.6}, 1, 1, 1);
  for (BooleanOp op : {BooleanOp::unite, BooleanOp::intersect}) {
    const PipelineRun x = run(a, b, op), y = run(b2, a2, op);
    ASSERT_TRUE(x.merge && y.merge);
    const EulerCounts cx = euler_counts(x.merge->body), cy = euler_counts(y.merge->body);
    EXPECT_EQ(cx.vertices, cy.vertices);
    EXPECT_EQ(cx.edges, cy.edges);
    EXPECT_EQ(cx.faces, cy.faces);
    std::vector<Point3> px, py;
    for (const auto& [id, v] : x.merge->body.vertices()) px.push_back(v.position);
    for (const auto& [id, v] : y.merge->body.vertices()) py.push_back(v.position);
    for (const Point3& p : px) {
      double best = 1e9;
      for (const Point3& q : py) best = std::min(best, (p - q).norm());
      EXPECT_LT(best, 1e-9);
    }
  }
}

TEST(ModelJson, RoundTripKeepsTopologyAndGeometry) {
  const Body a = build_primitive({PrimitiveKind::torus, Frame{}, {2, 0.5}}, 1, 1);
  const Body b = build_primitive({PrimitiveKind::regular_prism, Frame{}, {2, 1}, 6}, 2, 10001);
  const std::string text = model_to_json({&a, &b});
  const std::vector<Body> back = model_from_json(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(model_to_json({&back[0], &back[1]}), text);
  EXPECT_TRUE(validate(back[1]).empty());
  EXPECT_EQ(back[1].faces().size(), 8u);
}

TEST(ModelJson, ResultBodyRoundTripsWithParamLoops) {
  const PipelineRun r = run(cube({0, 0, 0}, 1, 1, 1), cube({0.5, 0.5, 0.5}, 1, 2, 10001), BooleanOp::unite);
  ASSERT_TRUE(r.merge);
  const std::string text = model_to_json({&r.merge->body});
  EXPECT_EQ(model_to_json({&model_from_json(text)[0]}), text);
}

}  // namespace
}  // namespace brepair
