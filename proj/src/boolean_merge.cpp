#include "brepair/boolean.hpp"

#include <algorithm>
#include <set>

namespace brepair {

namespace {

constexpr double kSamePoint = 1e-9;

Point3 curve_mid(const Curve& c) { return eval_curve(c, 0.5 * (c.t_start() + c.t_end())); }

class Merger {
 public:
  Merger(int id, double edge_gap) : body_(id, 1), edge_gap_(edge_gap) {}

  void add_face(const Body& src, int face_id, bool flip) {
    const Face& f = src.face(face_id);
    std::vector<Loop> loops;
    for (const Loop& l : f.loops) {
      Loop out;
      for (const Coedge& c : l.coedges) out.coedges.push_back(map_coedge(src, c));
      if (flip) {
        std::reverse(out.coedges.begin(), out.coedges.end());
        for (Coedge& c : out.coedges) c.forward = !c.forward;
      }
      loops.push_back(std::move(out));
    }
    const int nid = body_.add_face(f.surface, std::move(loops), f.reversed != flip);
    body_.face_mut(nid).param_loops = src.domain(face_id)->loops;
  }

  Body& body() { return body_; }

 private:
  int vertex(const Vertex& v) {
    for (const auto& [id, w] : body_.vertices())
      if ((w.position - v.position).norm() <= kSamePoint) {
        body_.vertex_mut(id).local_tolerance = std::max(w.local_tolerance, v.local_tolerance);
        return id;
      }
    return body_.add_vertex(v.position, v.local_tolerance);
  }

  // Edges from the two operands are matched by end vertices and midpoint.
  Coedge map_coedge(const Body& src, const Coedge& c) {
    const Edge& e = src.edge(c.edge);
    const int v0 = vertex(src.vertex(e.start_vertex));
    const int v1 = vertex(src.vertex(e.end_vertex));
    const Point3 mid = curve_mid(e.curve);
    for (const auto& [id, m] : body_.edges()) {
      if (std::minmax(m.start_vertex, m.end_vertex) != std::minmax(v0, v1)) continue;
      if (m.seam != e.seam || (curve_mid(m.curve) - mid).norm() > edge_gap_) continue;
      // same direction when the start points agree (ties on closed edges go by tangent)
      bool same = m.start_vertex == v0 && m.end_vertex == v1;
      if (v0 == v1) {
        const Vec3 ta = curve_derivative(e.curve, e.curve.t_start()) * (e.reversed ? -1 : 1);
        const Vec3 tb = curve_derivative(m.curve, m.curve.t_start()) * (m.reversed ? -1 : 1);
        same = ta.dot(tb) > 0;
      }
      return {id, same ? c.forward : !c.forward, c.seam_side};
    }
    const int id = body_.add_edge(e.curve, v0, v1, e.reversed, e.seam);
    return {id, c.forward, c.seam_side};
  }

  Body body_;
  double edge_gap_;
};

}  // namespace

MergeResult stage_merge(const Body& a, const Body& b, const Classification& c, double t0) {
  Merger m(a.id(), 10 * t0);
  for (int id : c.keep_a) m.add_face(a, id, false);
  for (int id : c.keep_b)
    m.add_face(b, id, std::find(c.flip.begin(), c.flip.end(), id) != c.flip.end());
  MergeResult r;
  r.body = std::move(m.body());
  std::map<int, int> uses;
  for (const auto& [fid, f] : r.body.faces())
    for (const Loop& l : f.loops)
      for (const Coedge& co : l.coedges) ++uses[co.edge];
  for (const auto& [eid, n] : uses) {
    if (n > 2) r.non_manifold_edges.push_back(eid);
    if (n == 1) r.open_edges.push_back(eid);
  }
  return r;
}

}  // namespace brepair
