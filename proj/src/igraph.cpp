#include "brepair/igraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace brepair {

std::string to_string(EndConnection c) {
  switch (c) {
    case EndConnection::both_ends: return "both-ends";
    case EndConnection::one_end: return "one-end";
    case EndConnection::isolated: return "isolated";
  }
  return "?";
}

const GraphVertex& IntersectionGraph::vertex(int id) const {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) throw GraphError("missing vertex " + std::to_string(id));
  return it->second;
}

const IntersectionEdge& IntersectionGraph::edge(int id) const {
  auto it = edges_.find(id);
  if (it == edges_.end()) throw GraphError("missing edge " + std::to_string(id));
  return it->second;
}

int IntersectionGraph::find_vertex_near(const Point3& p, double tol, int exclude) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [id, v] : vertices_) {
    if (id == exclude) continue;
    const double d = (v.position - p).norm();
    if (d <= std::max(tol, v.tolerance) && d < best_d) {
      best = id;
      best_d = d;
    }
  }
  return best;
}

int IntersectionGraph::new_vertex(const Point3& p, double tol) {
  const int id = next_vertex_id_++;
  vertices_[id] = GraphVertex{id, p, {}, tol, false};
  return id;
}

void IntersectionGraph::attach(int v, RingEntry entry, double tol) {
  GraphVertex& gv = vertices_.at(v);
  gv.ring.push_back(entry);
  gv.tolerance = std::max(gv.tolerance, tol);
}

int IntersectionGraph::add_edge(IntersectionEdge e) {
  if (e.id == 0) {
    while (edges_.count(next_edge_id_)) ++next_edge_id_;
    e.id = next_edge_id_++;
  } else if (edges_.count(e.id)) {
    throw GraphError("duplicate edge id " + std::to_string(e.id));
  }
  next_edge_id_ = std::max(next_edge_id_, e.id + 1);
  const double tol = e.tolerance;
  const Point3 ps = curve_start(e.curve);
  const Point3 pe = curve_end(e.curve);
  int vs = find_vertex_near(ps, tol, 0);
  if (vs == 0) vs = new_vertex(ps, tol);
  int ve = vs;
  if (!e.curve.closed()) {
    ve = find_vertex_near(pe, tol, vs);
    if (ve == 0) ve = new_vertex(pe, tol);
  }
  e.start_vertex = vs;
  e.end_vertex = ve;
  const int id = e.id;
  edges_.emplace(id, std::move(e));
  attach(vs, {id, false}, tol);
  attach(ve, {id, true}, tol);
  return id;
}

int IntersectionGraph::add_point(const Point3& p, double tolerance) {
  int v = find_vertex_near(p, tolerance, 0);
  if (v == 0) v = new_vertex(p, tolerance);
  GraphVertex& gv = vertices_.at(v);
  gv.tolerance = std::max(gv.tolerance, tolerance);
  gv.isolated_point = true;
  return v;
}

void IntersectionGraph::remove_edge(int id, bool keep_vertices) {
  const IntersectionEdge e = edge(id);
  for (int v : {e.start_vertex, e.end_vertex}) {
    auto it = vertices_.find(v);
    if (it == vertices_.end()) continue;
    auto& ring = it->second.ring;
    ring.erase(std::remove_if(ring.begin(), ring.end(),
                              [&](const RingEntry& r) { return r.edge == id; }),
               ring.end());
    if (ring.empty()) {
      if (keep_vertices) it->second.isolated_point = true;
      if (!it->second.isolated_point) vertices_.erase(it);
    }
  }
  edges_.erase(id);
}

int IntersectionGraph::merge_vertices(int v1, int v2, const Point3& position) {
  vertex(v1);
  if (v1 == v2) {
    set_position(v1, position);
    return v1;
  }
  vertex(v2);
  for (const auto& [id, e] : edges_)
    if (!e.curve.closed() && ((e.start_vertex == v1 && e.end_vertex == v2) ||
                              (e.start_vertex == v2 && e.end_vertex == v1)))
      throw GraphError("degenerate edge " + std::to_string(id));
  GraphVertex& keep = vertices_.at(v1);
  GraphVertex gone = vertices_.at(v2);
  for (const RingEntry& r : gone.ring) {
    IntersectionEdge& e = edges_.at(r.edge);
    (r.at_end ? e.end_vertex : e.start_vertex) = v1;
    keep.ring.push_back(r);
  }
  keep.tolerance = std::max(keep.tolerance, gone.tolerance);
  keep.isolated_point = keep.isolated_point || gone.isolated_point;
  keep.position = position;
  vertices_.erase(v2);
  return v1;
}

void IntersectionGraph::set_position(int v, const Point3& position) {
  vertex(v);
  vertices_.at(v).position = position;
}

int IntersectionGraph::neighbour_in_ring(int v, RingEntry self) const {
  const auto& ring = vertex(v).ring;
  const auto it = std::find(ring.begin(), ring.end(), self);
  if (it == ring.end()) throw GraphError("ring does not contain edge end");
  const std::size_t i = static_cast<std::size_t>(it - ring.begin());
  for (std::size_t k = 1; k < ring.size(); ++k) {
    const RingEntry& r = ring[(i + k) % ring.size()];
    if (r.edge != self.edge) return r.edge;
  }
  return self.edge;
}

int IntersectionGraph::predecessor(int e) const {
  return neighbour_in_ring(edge(e).start_vertex, {e, false});
}

int IntersectionGraph::successor(int e) const {
  return neighbour_in_ring(edge(e).end_vertex, {e, true});
}

bool IntersectionGraph::end_connected(int e, bool at_end) const {
  const IntersectionEdge& ie = edge(e);
  const RingEntry self{e, at_end};
  for (const RingEntry& r : vertex(at_end ? ie.end_vertex : ie.start_vertex).ring)
    if (!(r == self)) return true;
  return false;
}

EndConnection IntersectionGraph::end_connection_state(int e) const {
  const int n = end_connected(e, false) + end_connected(e, true);
  return n == 2 ? EndConnection::both_ends : n == 1 ? EndConnection::one_end
                                                    : EndConnection::isolated;
}

std::vector<GraphComponent> IntersectionGraph::connectivity() const {
  std::map<int, int> parent;
  for (const auto& [id, v] : vertices_) parent[id] = id;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [id, e] : edges_) parent[find(e.start_vertex)] = find(e.end_vertex);
  std::map<int, GraphComponent> by_root;
  for (const auto& [id, e] : edges_) by_root[find(e.start_vertex)].edges.push_back(id);
  for (const auto& [id, v] : vertices_) {
    auto it = by_root.find(find(id));
    if (it != by_root.end()) it->second.vertices.push_back(id);
  }
  std::vector<GraphComponent> out;
  for (auto& [root, c] : by_root) out.push_back(std::move(c));
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.edges.front() < b.edges.front(); });
  return out;
}

std::vector<int> IntersectionGraph::isolated_points() const {
  std::vector<int> out;
  for (const auto& [id, v] : vertices_)
    if (v.ring.empty()) out.push_back(id);
  return out;
}

std::vector<std::string> IntersectionGraph::check_invariants() const {
  std::vector<std::string> bad;
  auto say = [&](const std::string& s) { bad.push_back(s); };
  for (const auto& [vid, v] : vertices_) {
    std::set<std::pair<int, bool>> seen;
    for (const RingEntry& r : v.ring) {
      if (!seen.insert({r.edge, r.at_end}).second)
        say("vertex " + std::to_string(vid) + ": duplicate ring entry");
      auto it = edges_.find(r.edge);
      if (it == edges_.end()) {
        say("vertex " + std::to_string(vid) + ": ring names missing edge");
        continue;
      }
      if ((r.at_end ? it->second.end_vertex : it->second.start_vertex) != vid)
        say("vertex " + std::to_string(vid) + ": ring entry not reciprocated");
    }
    if (v.ring.empty() && !v.isolated_point)
      say("vertex " + std::to_string(vid) + ": empty ring on a non-point vertex");
  }
  for (const auto& [eid, e] : edges_) {
    for (bool at_end : {false, true}) {
      const int vid = at_end ? e.end_vertex : e.start_vertex;
      auto it = vertices_.find(vid);
      if (it == vertices_.end()) {
        say("edge " + std::to_string(eid) + ": missing vertex");
        continue;
      }
      const auto& ring = it->second.ring;
      if (std::count(ring.begin(), ring.end(), RingEntry{eid, at_end}) != 1)
        say("edge " + std::to_string(eid) + ": end not in ring exactly once");
      const int n = at_end ? successor(eid) : predecessor(eid);
      const bool others = std::any_of(ring.begin(), ring.end(),
                                      [&](const RingEntry& r) { return r.edge != eid; });
      if ((n == eid) == others)
        say("edge " + std::to_string(eid) + ": self-reference convention violated");
      if (n != eid && std::none_of(ring.begin(), ring.end(),
                                   [&](const RingEntry& r) { return r.edge == n; }))
        say("edge " + std::to_string(eid) + ": neighbour not incident");
    }
  }
  return bad;
}

std::string graph_signature(const IntersectionGraph& g, double quantum) {
  auto key = [&](const Point3& p) {
    std::ostringstream os;
    for (int i = 0; i < 3; ++i) os << std::llround(p[i] / quantum) << ',';
    return os.str();
  };
  std::vector<std::string> vs, es;
  for (const auto& [id, v] : g.vertices())
    vs.push_back(key(v.position) + "#" + std::to_string(v.ring.size()));
  for (const auto& [id, e] : g.edges()) {
    auto a = key(g.vertex(e.start_vertex).position);
    auto b = key(g.vertex(e.end_vertex).position);
    if (b < a) std::swap(a, b);
    es.push_back(a + "|" + b + "|" + std::to_string(e.source_faces.first) + "," +
                 std::to_string(e.source_faces.second));
  }
  std::sort(vs.begin(), vs.end());
  std::sort(es.begin(), es.end());
  std::ostringstream os;
  for (const auto& s : vs) os << s << ';';
  os << '/';
  for (const auto& s : es) os << s << ';';
  return os.str();
}

}  // namespace brepair
