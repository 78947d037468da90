#include "brepair/igraph.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

namespace brepair {
namespace {

IntersectionEdge seg(const Point3& a, const Point3& b, double tol = 1e-6) {
  IntersectionEdge e;
  e.curve = Curve::segment(a, b);
  e.source_faces = {1, 2};
  e.tolerance = tol;
  return e;
}

// Component count by depth-first search over the edge list alone.
int oracle_components(const IntersectionGraph& g) {
  std::map<int, std::vector<int>> adj;
  for (const auto& [id, e] : g.edges()) {
    adj[e.start_vertex].push_back(e.end_vertex);
    adj[e.end_vertex].push_back(e.start_vertex);
  }
  std::set<int> seen;
  int n = 0;
  for (const auto& [v, _] : adj) {
    if (seen.count(v)) continue;
    ++n;
    std::vector<int> stack{v};
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      if (!seen.insert(x).second) continue;
      for (int y : adj[x]) stack.push_back(y);
    }
  }
  return n;
}

TEST(Graph, SingleEdgeReferencesItself) {
  IntersectionGraph g;
  const int e = g.add_edge(seg({0, 0, 0}, {1, 0, 0}));
  EXPECT_EQ(g.predecessor(e), e);
  EXPECT_EQ(g.successor(e), e);
  EXPECT_EQ(g.end_connection_state(e), EndConnection::isolated);
  EXPECT_EQ(g.component_count(), 1);
}

TEST(Graph, HeadToTailChain) {
  IntersectionGraph g;
  const int e1 = g.add_edge(seg({0, 0, 0}, {1, 0, 0}));
  const int e2 = g.add_edge(seg({1, 0, 0}, {1, 1, 0}));
  EXPECT_EQ(g.predecessor(e2), e1);
  EXPECT_EQ(g.successor(e1), e2);
  EXPECT_EQ(g.predecessor(e1), e1);
  EXPECT_EQ(g.successor(e2), e2);
  EXPECT_EQ(g.end_connection_state(e1), EndConnection::one_end);
}

TEST(Graph, FourEdgesShareOneVertex) {
  IntersectionGraph g;
  std::vector<int> ids;
  for (const Point3& d : {Point3(1, 0, 0), Point3(0, 1, 0), Point3(-1, 0, 0), Point3(0, -1, 0)})
    ids.push_back(g.add_edge(seg({0, 0, 0}, d)));
  const auto& v = g.vertex(g.edge(ids[0]).start_vertex);
  EXPECT_EQ(v.ring.size(), 4u);
  EXPECT_TRUE(g.check_invariants().empty());
  for (int e : ids) EXPECT_NE(g.predecessor(e), e);
}

TEST(Graph, EndpointWithinToleranceJoinsVertex) {
  IntersectionGraph g;
  g.add_edge(seg({0, 0, 0}, {1, 0, 0}));
  g.add_edge(seg({1 + 5e-7, 0, 0}, {2, 0, 0}));
  g.add_edge(seg({2 + 5e-6, 0, 0}, {3, 0, 0}));
  EXPECT_EQ(g.component_count(), 2);
}

TEST(Graph, ShortOpenEdgeDoesNotCloseOnItself) {
  IntersectionGraph g;
  const int e = g.add_edge(seg({0, 0, 0}, {1e-7, 0, 0}));
  EXPECT_NE(g.edge(e).start_vertex, g.edge(e).end_vertex);
}

TEST(Graph, RemoveEdgeCases) {
  IntersectionGraph g;
  const int only = g.add_edge(seg({0, 0, 0}, {1, 0, 0}));
  g.remove_edge(only);
  EXPECT_TRUE(g.edges().empty());
  EXPECT_TRUE(g.vertices().empty());

  IntersectionGraph chain;
  chain.add_edge(seg({0, 0, 0}, {1, 0, 0}));
  const int mid = chain.add_edge(seg({1, 0, 0}, {2, 0, 0}));
  chain.add_edge(seg({2, 0, 0}, {3, 0, 0}));
  chain.remove_edge(mid);
  EXPECT_EQ(chain.component_count(), 2);

  IntersectionGraph tri;
  const int a = tri.add_edge(seg({0, 0, 0}, {1, 0, 0}));
  tri.add_edge(seg({1, 0, 0}, {0, 1, 0}));
  tri.add_edge(seg({0, 1, 0}, {0, 0, 0}));
  tri.remove_edge(a);
  EXPECT_EQ(tri.component_count(), 1);
  EXPECT_THROW(tri.remove_edge(a), GraphError);
}

TEST(Graph, DuplicateIdRejected) {
  IntersectionGraph g;
  auto e = seg({0, 0, 0}, {1, 0, 0});
  e.id = 5;
  g.add_edge(e);
  EXPECT_THROW(g.add_edge(e), GraphError);
}

TEST(Graph, MergeVertices) {
  IntersectionGraph g;
  const int e1 = g.add_edge(seg({0, 0, 0}, {1, 0, 0}));
  const int e2 = g.add_edge(seg({1.1, 0, 0}, {2, 0, 0}));
  EXPECT_EQ(g.component_count(), 2);
  g.merge_vertices(g.edge(e1).end_vertex, g.edge(e2).start_vertex, {1.05, 0, 0});
  EXPECT_EQ(g.component_count(), 1);
  EXPECT_EQ(g.successor(e1), e2);
  EXPECT_TRUE(g.check_invariants().empty());
  // degenerate: both ends of an open edge
  EXPECT_THROW(g.merge_vertices(g.edge(e1).start_vertex, g.edge(e1).end_vertex, {0, 0, 0}),
               GraphError);
}

TEST(Graph, FullCircleClosesOnOneVertexAndMergeIsIdempotent) {
  IntersectionGraph g;
  IntersectionEdge e;
  e.curve = Curve::circle(Frame{}, 1.0);
  e.tolerance = 1e-6;
  const int id = g.add_edge(e);
  const int v = g.edge(id).start_vertex;
  EXPECT_EQ(v, g.edge(id).end_vertex);
  EXPECT_EQ(g.end_connection_state(id), EndConnection::both_ends);
  const std::string before = graph_signature(g);
  EXPECT_EQ(g.merge_vertices(v, v, g.vertex(v).position), v);
  EXPECT_EQ(graph_signature(g), before);
}

TEST(Graph, IsolatedPointsSurviveRemoval) {
  IntersectionGraph g;
  const int p = g.add_point({1, 0, 0}, 1e-6);
  const int e = g.add_edge(seg({0, 0, 0}, {1, 0, 0}));
  EXPECT_EQ(g.edge(e).end_vertex, p);
  g.remove_edge(e);
  EXPECT_TRUE(g.has_vertex(p));
  EXPECT_EQ(g.isolated_points(), std::vector<int>{p});
  EXPECT_EQ(g.component_count(), 0);
}

TEST(GraphExport, DotJsonSvg) {
  IntersectionGraph g;
  g.add_edge(seg({0, 0, 0}, {1, 0, 0}));
  g.add_edge(seg({5, 0, 0}, {6, 0, 0}));
  const std::string dot = to_dot(g);
  EXPECT_NE(dot.find("v1@(0,0,0)"), std::string::npos);
  EXPECT_NE(dot.find("src_faces=\"1,2\""), std::string::npos);
  EXPECT_NE(to_json(g).find("\"source_faces\""), std::string::npos);
  const std::string svg = to_svg(g);
  EXPECT_NE(svg.find("#d62728"), std::string::npos);
  EXPECT_NE(svg.find("#1f77b4"), std::string::npos);
  EXPECT_NE(to_svg(IntersectionGraph{}).find("<svg"), std::string::npos);
}

TEST(GraphProperty, RandomMutationsKeepInvariants) {
  std::mt19937 rng(4242);
  std::uniform_int_distribution<int> coord(0, 4);
  std::uniform_int_distribution<int> op(0, 9);
  auto lattice = [&] {
    // jitter below the edge tolerance so nearby ends still meet
    std::uniform_real_distribution<double> j(-2e-7, 2e-7);
    return Point3(coord(rng) + j(rng), coord(rng) + j(rng), 0);
  };
  auto pick = [&](const auto& m) {
    auto it = m.begin();
    std::advance(it, std::uniform_int_distribution<int>(0, static_cast<int>(m.size()) - 1)(rng));
    return it->first;
  };
  IntersectionGraph g;
  int mutations = 0, round_trips = 0;
  while (mutations < 1500) {
    const int o = op(rng);
    if (o < 5 || g.edges().empty()) {
      Point3 a = lattice(), b = lattice();
      if ((a - b).norm() < 0.5) continue;
      g.add_edge(seg(a, b));
    } else if (o < 7) {
      g.remove_edge(pick(g.edges()));
    } else if (o < 8) {
      const int v1 = pick(g.vertices()), v2 = pick(g.vertices());
      try {
        g.merge_vertices(v1, v2, g.vertex(v1).position);
      } catch (const GraphError&) {
        continue;
      }
    } else if (o < 9) {
      g.add_point(lattice(), 1e-6);
    } else {
      const std::string before = graph_signature(g);
      Point3 a = lattice(), b = lattice();
      if ((a - b).norm() < 0.5) continue;
      const int id = g.add_edge(seg(a, b));
      g.remove_edge(id);
      EXPECT_EQ(graph_signature(g), before);
      ++round_trips;
    }
    ++mutations;
    const auto bad = g.check_invariants();
    ASSERT_TRUE(bad.empty()) << bad.front();
    ASSERT_EQ(g.component_count(), oracle_components(g));
  }
  EXPECT_GT(round_trips, 50);
}

}  // namespace
}  // namespace brepair
