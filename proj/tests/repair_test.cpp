#include "brepair/boolean.hpp"
#include "brepair/primitives.hpp"
#include "brepair/repair.hpp"
#include "brepair/scenarios.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace brepair {
namespace {

constexpr double kT0 = 1e-6;

struct TwoCubes {
  Body a = build_primitive({PrimitiveKind::box, Frame{}, {1, 1, 1}}, 1, 1);
  Frame frame = Frame::from_axis({0.5, -0.5, 0.5}, Vec3::UnitZ(), Vec3(std::cos(0.3), std::sin(0.3), 0));
  Body b = build_primitive({PrimitiveKind::box, frame, {1, 1, 1}}, 2, 10001);

  // The left face of b crosses the top-front edge (s, 0, 1) of a.
  Point3 crossing() const {
    const double s = frame.x.dot(frame.origin - Vec3(0, 0, 1)) / frame.x.x();
    return {s, 0, 1};
  }
  IntersectionGraph graph(double jitter) const {
    PerturbationSpec p;
    p.seed = 7;
    p.vertex_jitter = jitter;
    return stage_intersect(a, b, {kT0, &p, true}).graph;
  }
};

double nearest(const IntersectionGraph& g, const Point3& p) {
  double best = INFINITY;
  for (const auto& [id, v] : g.vertices()) best = std::min(best, (v.position - p).norm());
  return best;
}

TEST(Disconnection, TwoCubeFixtureRecoversTheLinePlaneCrossing) {
  const TwoCubes f;
  IntersectionGraph g = f.graph(1.5e-6);
  ASSERT_GT(g.component_count(), 1);
  const double before = nearest(g, f.crossing());
  EXPECT_GT(before, 0.0);

  const auto records = repair_pass(g, BodySet{&f.a, &f.b}, {kT0});
  ASSERT_FALSE(records.empty());
  for (const auto& r : records) {
    EXPECT_EQ(r.kind, DefectKind::disconnection);
    EXPECT_EQ(r.action, RepairAction::merged);
    EXPECT_TRUE(r.all_passed());
  }
  EXPECT_EQ(g.component_count(), 1);
  const double after = nearest(g, f.crossing());
  EXPECT_LT(after, 1e-9);
  EXPECT_LT(after, 0.01 * 1.5e-6);
  EXPECT_LT(after, before);
  EXPECT_TRUE(g.check_invariants().empty());
}

TEST(Disconnection, ExactGraphHasNoDefects) {
  const TwoCubes f;
  IntersectionGraph g = f.graph(0.0);
  const std::string sig = graph_signature(g);
  EXPECT_TRUE(repair_pass(g, BodySet{&f.a, &f.b}, {kT0}).empty());
  EXPECT_EQ(graph_signature(g), sig);
}

TEST(Disconnection, SecondPassFindsNothing) {
  const TwoCubes f;
  IntersectionGraph g = f.graph(1.5e-6);
  repair_pass(g, BodySet{&f.a, &f.b}, {kT0});
  EXPECT_TRUE(repair_pass(g, BodySet{&f.a, &f.b}, {kT0}).empty());
}

TEST(Disconnection, EdgesWithoutACommonFaceAreNotJudged) {
  const TwoCubes f;
  IntersectionGraph g;
  const auto add = [&](Point3 p, Point3 q, int fa, int fb) {
    IntersectionEdge e;
    e.curve = Curve::segment(p, q);
    e.source_faces = {fa, fb};
    e.tolerance = kT0;
    return g.add_edge(e);
  };
  const int fa = f.a.faces().begin()->first, fb = f.b.faces().begin()->first;
  const int e1 = add({0, 0, 0}, {0.5, 0, 0}, fa, fb);
  const int e2 = add({0.5, 1.5e-6, 0}, {0.5, 0.5, 0}, std::next(f.a.faces().begin())->first,
                     std::next(f.b.faces().begin())->first);
  std::vector<CriterionCheck> transcript;
  EXPECT_FALSE(judge_disconnection(e1, e2, g, BodySet{&f.a, &f.b}, kT0, &transcript));
  ASSERT_GE(transcript.size(), 2u);
  EXPECT_TRUE(transcript[0].passed);
  EXPECT_FALSE(transcript[1].passed);
}

PipelineRun unrepaired(const Scenario& s) {
  const auto [a, b] = build_scenario_bodies(s);
  return run_pipeline(a, b, s.op, {s.t0, &s.perturbation, false});
}

TEST(ShortEdge, TangentContactEdgesCollapseToTheirTouchPoints) {
  const Scenario s = scenario_ex3();
  const auto [a, b] = build_scenario_bodies(s);
  IntersectionGraph g = stage_intersect(a, b, {s.t0, &s.perturbation, true}).graph;
  const BodySet bodies{&a, &b};
  int witnesses = 0;
  for (const auto& [id, e] : g.edges())
    if (const auto w = judge_short_edge(id, g, bodies, s.t0)) {
      ++witnesses;
      // the touch points lie on the cylinder side at the cone's base rim
      EXPECT_LE(curve_length(e.curve), e.tolerance);
      EXPECT_LT((w->v0 - eval_curve(e.curve, 0.5 * (e.curve.t_start() + e.curve.t_end()))).norm(), e.tolerance);
    }
  EXPECT_EQ(witnesses, 2);
  const auto records = repair_pass(g, bodies, {s.t0});
  EXPECT_EQ(records.size(), 2u);
  for (const auto& r : records) EXPECT_EQ(r.action, RepairAction::collapsed);
  for (const auto& [id, e] : g.edges()) EXPECT_FALSE(judge_short_edge(id, g, bodies, s.t0));
}

TEST(ShortEdge, GrooveEdgesConnectedAtBothEndsAreKept) {
  const Scenario s = scenario_ex4();
  const auto [a, b] = build_scenario_bodies(s);
  IntersectionGraph g = stage_intersect(a, b, {s.t0, &s.perturbation, true}).graph;
  for (const auto& [id, e] : g.edges()) {
    std::vector<CriterionCheck> transcript;
    EXPECT_FALSE(judge_short_edge(id, g, BodySet{&a, &b}, s.t0, &transcript));
  }
  EXPECT_TRUE(repair_pass(g, BodySet{&a, &b}, {s.t0}).empty());
}

// Isolated segment of given length inside the top face of a, away from any
// boundary edge.
std::vector<CriterionCheck> judge_interior_segment(double length) {
  const TwoCubes f;
  IntersectionGraph g;
  IntersectionEdge e;
  e.curve = Curve::segment({0.5, 0.5, 1}, {0.5 + length, 0.5, 1});
  int top = 0;
  for (const auto& [id, face] : f.a.faces())
    if (std::abs(signed_distance(face.surface, {0.5, 0.5, 1})) < 1e-12) top = id;
  e.source_faces = {top, f.b.faces().begin()->first};
  e.tolerance = kT0;
  const int id = g.add_edge(e);
  std::vector<CriterionCheck> transcript;
  EXPECT_FALSE(judge_short_edge(id, g, BodySet{&f.a, &f.b}, kT0, &transcript));
  return transcript;
}

TEST(ShortEdge, InteriorEndpointsFailTheBoundaryCriterion) {
  const auto tr = judge_interior_segment(0.5 * kT0);
  ASSERT_GE(tr.size(), 3u);
  EXPECT_TRUE(tr[0].passed);
  EXPECT_TRUE(tr[1].passed);
  EXPECT_FALSE(tr[2].passed);
}

TEST(ShortEdge, LengthJustAboveToleranceFailsTheLengthCriterion) {
  const auto tr = judge_interior_segment(1.01 * kT0);
  ASSERT_GE(tr.size(), 1u);
  EXPECT_NEAR(tr[0].measured, 1.01 * kT0, 1e-15);
  EXPECT_FALSE(tr[0].passed);
}

// Curve in the front face y = 0 of a unit box running through its corner
// (1, 0, 1); the trim vertices miss the corner by delta along the two edges.
struct CornerFixture {
  Body body0 = build_primitive({PrimitiveKind::box, Frame{}, {1, 1, 1}}, 1, 1);
  int front = 0, top_edge = 0, right_edge = 0, bottom_edge = 0;
  Curve e0 = Curve::segment({0.5, 0, 1.5}, {1.5, 0, 0.5});

  CornerFixture() {
    for (const auto& [id, f] : body0.faces())
      if (std::abs(signed_distance(f.surface, {0.5, 0, 0.5})) < 1e-12) front = id;
    for (const auto& [id, e] : body0.edges()) {
      const Point3 m = 0.5 * (edge_start_point(e) + edge_end_point(e));
      if ((m - Point3(0.5, 0, 1)).norm() < 1e-12) top_edge = id;
      if ((m - Point3(1, 0, 0.5)).norm() < 1e-12) right_edge = id;
      if ((m - Point3(0.5, 0, 0)).norm() < 1e-12) bottom_edge = id;
    }
  }
  // Other body: a box whose face plane holds the corner and the curve,
  // shifted along its normal by `offset`.
  std::pair<Body, int> other(double offset) const {
    const Vec3 n = Vec3(1, 0, 1).normalized();
    Body b = build_primitive({PrimitiveKind::box, Frame::from_axis(Point3(1, 0, 1) + offset * n, n), {1, 1, 1}}, 2,
                             10001);
    for (const auto& [id, f] : b.faces())
      if (std::abs(signed_distance(f.surface, Point3(1, 0, 1) + offset * n)) < 1e-12 &&
          std::abs(signed_distance(f.surface, Point3(0, 0, 2) + offset * n)) < 1e-12)
        return {b, id};
    return {b, 0};
  }
  std::vector<TrimVertex> trims(double delta, int edge2) const {
    return {{{1 - delta, 0, 1}, 0, front, top_edge}, {{1, 0, 1 - delta}, 0, front, edge2}};
  }
};

TEST(VertexDeviation, NearCornerTrimVerticesAreReplacedByTheCorner) {
  const CornerFixture f;
  const auto [b1, f1] = f.other(0.0);
  ASSERT_TRUE(f.front && f.top_edge && f.right_edge && f1);
  auto v = f.trims(3e-7, f.right_edge);
  DefectRecord r;
  EXPECT_TRUE(judge_fix_vertex_deviation(f.e0, kT0, f.body0, f.front, b1, f1, 0, 1, v, &r));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_LT((v[0].position - Point3(1, 0, 1)).norm(), 1e-15);
  EXPECT_EQ(r.action, RepairAction::substituted);
  EXPECT_TRUE(r.all_passed());
}

TEST(VertexDeviation, EdgesWithoutACommonVertexAreLeftAlone) {
  const CornerFixture f;
  const auto [b1, f1] = f.other(0.0);
  auto v = f.trims(3e-7, f.bottom_edge);
  EXPECT_FALSE(judge_fix_vertex_deviation(f.e0, kT0, f.body0, f.front, b1, f1, 0, 1, v));
  EXPECT_EQ(v.size(), 2u);
}

TEST(VertexDeviation, CornerOffTheOtherFaceIsLeftAlone) {
  const CornerFixture f;
  const auto [b1, f1] = f.other(10 * kT0);
  ASSERT_TRUE(f1);
  auto v = f.trims(3e-7, f.right_edge);
  DefectRecord r;
  EXPECT_FALSE(judge_fix_vertex_deviation(f.e0, kT0, f.body0, f.front, b1, f1, 0, 1, v, &r));
  ASSERT_EQ(r.criteria.size(), 4u);
  // implicit residual of the shifted plane at the corner is the shift itself
  EXPECT_NEAR(r.criteria[3].measured, 10 * kT0, 1e-15);
  EXPECT_EQ(v.size(), 2u);
}

TEST(VertexDeviation, DistantTrimVerticesAreLeftAlone) {
  const CornerFixture f;
  const auto [b1, f1] = f.other(0.0);
  auto v = f.trims(2 * kT0, f.right_edge);
  EXPECT_FALSE(judge_fix_vertex_deviation(f.e0, kT0, f.body0, f.front, b1, f1, 0, 1, v));
}

TEST(RepairPass, ScenarioRepairsHaveTheExpectedKinds) {
  const std::map<std::string, DefectKind> kind{{"ex1", DefectKind::vertex_deviation},
                                               {"ex2", DefectKind::disconnection},
                                               {"ex3", DefectKind::short_edge}};
  for (const auto& [name, k] : kind) {
    const Scenario s = *find_scenario(name);
    const auto [a, b] = build_scenario_bodies(s);
    const PipelineRun run = run_pipeline(a, b, s.op, {s.t0, &s.perturbation, true});
    ASSERT_FALSE(run.repairs.empty()) << name;
    for (const auto& r : run.repairs) {
      EXPECT_EQ(r.kind, k) << name;
      EXPECT_NE(r.action, RepairAction::none) << name;
      EXPECT_TRUE(r.all_passed()) << name;
    }
    IntersectionGraph g = run.graph;
    EXPECT_TRUE(repair_pass(g, BodySet{&a, &b}, {s.t0}).empty()) << name;
  }
}

TEST(RepairPass, UnrepairedRunsKeepTheirDefects) {
  EXPECT_GT(unrepaired(scenario_ex1()).graph.edges().size(), 12u);
  EXPECT_EQ(unrepaired(scenario_ex2()).graph.component_count(), 3);
}

}  // namespace
}  // namespace brepair
