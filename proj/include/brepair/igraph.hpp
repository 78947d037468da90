#pragma once

#include "brepair/geometry.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace brepair {

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntersectionEdge {
  int id = 0;
  Curve curve;
  int start_vertex = 0;
  int end_vertex = 0;
  /// (face of the first body, face of the second body)
  std::pair<int, int> source_faces{0, 0};
  double tolerance = 0.0;
  std::pair<int, int> origin_body_pair{0, 0};
};

struct RingEntry {
  int edge = 0;
  bool at_end = false;
  bool operator==(const RingEntry&) const = default;
};

struct GraphVertex {
  int id = 0;
  Point3 position = Point3::Zero();
  /// Circular list of incident edge ends, in insertion order.
  std::vector<RingEntry> ring;
  /// Largest tolerance of anything merged into this vertex.
  double tolerance = 0.0;
  /// Kept when its ring empties (tangential contacts, collapsed edges).
  bool isolated_point = false;
};

enum class EndConnection { both_ends, one_end, isolated };
std::string to_string(EndConnection c);

struct GraphComponent {
  std::vector<int> edges;
  std::vector<int> vertices;
};

class IntersectionGraph {
 public:
  /// Inserts an edge; its vertex fields are ignored and assigned here. Each
  /// endpoint joins the nearest vertex within max(edge tolerance, vertex
  /// tolerance), except that an open curve's end never joins its own start.
  /// An id of 0 is replaced by a fresh one.
  int add_edge(IntersectionEdge e);
  /// Isolated intersection point; joins a vertex within tolerance if any.
  int add_point(const Point3& p, double tolerance);
  /// Removes the edge. Vertices left with empty rings are deleted unless
  /// `keep_vertices` or they are isolated points.
  void remove_edge(int id, bool keep_vertices = false);
  /// Fuses v2 into v1 at `position`; returns the surviving id. Merging a
  /// vertex with itself only moves it.
  int merge_vertices(int v1, int v2, const Point3& position);
  void set_position(int v, const Point3& position);

  const std::map<int, GraphVertex>& vertices() const { return vertices_; }
  const std::map<int, IntersectionEdge>& edges() const { return edges_; }
  const GraphVertex& vertex(int id) const;
  const IntersectionEdge& edge(int id) const;
  bool has_edge(int id) const { return edges_.count(id) > 0; }
  bool has_vertex(int id) const { return vertices_.count(id) > 0; }

  /// Edge preceding `e` at its start vertex, or `e` itself when nothing else
  /// meets that end.
  int predecessor(int e) const;
  /// Edge following `e` at its end vertex, or `e` itself.
  int successor(int e) const;
  EndConnection end_connection_state(int e) const;
  bool end_connected(int e, bool at_end) const;

  /// Components of edges joined at shared vertices, ordered by smallest edge
  /// id. Vertices without edges form no component.
  std::vector<GraphComponent> connectivity() const;
  int component_count() const { return static_cast<int>(connectivity().size()); }
  std::vector<int> isolated_points() const;

  /// Ring consistency and predecessor/successor legality; empty when sound.
  std::vector<std::string> check_invariants() const;

 private:
  int find_vertex_near(const Point3& p, double tol, int exclude) const;
  int new_vertex(const Point3& p, double tol);
  void attach(int v, RingEntry entry, double tol);
  int neighbour_in_ring(int v, RingEntry self) const;

  std::map<int, GraphVertex> vertices_;
  std::map<int, IntersectionEdge> edges_;
  int next_vertex_id_ = 1;
  int next_edge_id_ = 1;
};

/// Positional view of a graph for isomorphism checks: sorted vertex
/// positions and sorted edge endpoint pairs, both rounded to `quantum`.
std::string graph_signature(const IntersectionGraph& g, double quantum = 1e-9);

std::string to_dot(const IntersectionGraph& g);
std::string to_json(const IntersectionGraph& g);
/// Orthographic projection along `view`; components in distinct colours.
std::string to_svg(const IntersectionGraph& g, const Vec3& view = Vec3::UnitZ());

}  // namespace brepair
