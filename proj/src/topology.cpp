#include "brepair/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace brepair {

Body::Body(int id, int id_base) : id_(id), next_id_(id_base) {}

void Body::invalidate() const {
  std::lock_guard lock(*cache_mutex_);
  domain_cache_.clear();
}

int Body::add_vertex(const Point3& position, double local_tolerance) {
  const int id = next_id_++;
  vertices_[id] = Vertex{id, position, local_tolerance};
  return id;
}

int Body::add_edge(const Curve& curve, int start_vertex, int end_vertex,
                   bool reversed, SeamKind seam) {
  if (!has_vertex(start_vertex) || !has_vertex(end_vertex))
    throw TopologyError("integrity error: edge references a missing vertex");
  const int id = next_id_++;
  edges_[id] = Edge{id, curve, start_vertex, end_vertex, reversed, seam};
  invalidate();
  return id;
}

int Body::add_face(const Surface& surface, std::vector<Loop> loops,
                   bool reversed) {
  for (const auto& l : loops)
    for (const auto& c : l.coedges)
      if (!has_edge(c.edge))
        throw TopologyError("integrity error: loop references a missing edge");
  const int id = next_id_++;
  faces_[id] = Face{id, surface, std::move(loops), reversed, {}};
  return id;
}

void Body::insert(const Vertex& v) {
  vertices_[v.id] = v;
  next_id_ = std::max(next_id_, v.id + 1);
}

void Body::insert(const Edge& e) {
  edges_[e.id] = e;
  next_id_ = std::max(next_id_, e.id + 1);
  invalidate();
}

void Body::insert(const Face& f) {
  faces_[f.id] = f;
  next_id_ = std::max(next_id_, f.id + 1);
  invalidate();
}

void Body::remove_face(int id) {
  faces_.erase(id);
  invalidate();
}

const Vertex& Body::vertex(int id) const {
  auto it = vertices_.find(id);
  if (it == vertices_.end())
    throw TopologyError("integrity error: missing vertex " + std::to_string(id));
  return it->second;
}

const Edge& Body::edge(int id) const {
  auto it = edges_.find(id);
  if (it == edges_.end())
    throw TopologyError("integrity error: missing edge " + std::to_string(id));
  return it->second;
}

const Face& Body::face(int id) const {
  auto it = faces_.find(id);
  if (it == faces_.end())
    throw TopologyError("integrity error: missing face " + std::to_string(id));
  return it->second;
}

Vertex& Body::vertex_mut(int id) {
  invalidate();
  return const_cast<Vertex&>(vertex(id));
}

Face& Body::face_mut(int id) {
  invalidate();
  return const_cast<Face&>(face(id));
}

std::vector<int> Body::faces_of_edge(int edge_id) const {
  std::vector<int> out;
  for (const auto& [fid, f] : faces_)
    for (const auto& l : f.loops)
      for (const auto& c : l.coedges)
        if (c.edge == edge_id && (out.empty() || out.back() != fid)) out.push_back(fid);
  return out;
}

std::map<int, std::vector<int>> Body::adjacency() const {
  std::map<int, std::vector<int>> adj;
  for (const auto& [eid, e] : edges_) adj[eid];
  for (const auto& [fid, f] : faces_)
    for (const auto& l : f.loops)
      for (const auto& c : l.coedges) {
        auto& v = adj[c.edge];
        if (std::find(v.begin(), v.end(), fid) == v.end()) v.push_back(fid);
      }
  return adj;
}

std::shared_ptr<const FaceDomain> Body::domain(int face_id) const {
  {
    std::lock_guard lock(*cache_mutex_);
    auto it = domain_cache_.find(face_id);
    if (it != domain_cache_.end()) return it->second;
  }
  auto d = std::make_shared<const FaceDomain>(build_face_domain(*this, face(face_id)));
  std::lock_guard lock(*cache_mutex_);
  domain_cache_[face_id] = d;
  return d;
}

Point3 edge_start_point(const Edge& e) {
  return e.reversed ? curve_end(e.curve) : curve_start(e.curve);
}

Point3 edge_end_point(const Edge& e) {
  return e.reversed ? curve_start(e.curve) : curve_end(e.curve);
}

Point3 coedge_start_point(const Body& b, const Coedge& c) {
  const Edge& e = b.edge(c.edge);
  return c.forward ? edge_start_point(e) : edge_end_point(e);
}

Point3 coedge_end_point(const Body& b, const Coedge& c) {
  const Edge& e = b.edge(c.edge);
  return c.forward ? edge_end_point(e) : edge_start_point(e);
}

namespace {

int sample_count(const Curve& c) {
  switch (c.kind()) {
    case CurveKind::line: return 2;
    case CurveKind::circle:
    case CurveKind::ellipse:
      return std::max(9, static_cast<int>(64 * (c.t_end() - c.t_start()) / kTwoPi) + 1);
    case CurveKind::polyline:
      return static_cast<int>(std::get<curves::Polyline>(c.geometry()).points.size()) * 2 + 1;
    case CurveKind::bspline: {
      const auto& b = std::get<curves::BSpline>(c.geometry());
      return 16 * static_cast<int>(b.control.size()) + 1;
    }
  }
  return 33;
}

// Traversal direction of a coedge over its curve parameter.
bool coedge_runs_forward(const Edge& e, const Coedge& c) { return c.forward != e.reversed; }

}  // namespace

namespace {

void set_bounds(FaceDomain& d) {
  d.bounds = d.box;
  bool any = false;
  for (const auto& poly : d.loops)
    for (const auto& q : poly) {
      if (!any) d.bounds = {q.x(), q.x(), q.y(), q.y()};
      any = true;
      d.bounds.u0 = std::min(d.bounds.u0, q.x());
      d.bounds.u1 = std::max(d.bounds.u1, q.x());
      d.bounds.v0 = std::min(d.bounds.v0, q.y());
      d.bounds.v1 = std::max(d.bounds.v1, q.y());
    }
}

}  // namespace

FaceDomain build_face_domain(const Body& b, const Face& f) {
  FaceDomain d;
  const Surface& s = f.surface;
  d.u_periodic = s.u_periodic();
  d.v_periodic = s.v_periodic();
  d.box = s.domain();
  d.u_period = d.u_periodic ? d.box.u1 - d.box.u0 : 0.0;
  d.v_period = d.v_periodic ? d.box.v1 - d.box.v0 : 0.0;
  if (!f.param_loops.empty()) {
    d.loops = f.param_loops;
    set_bounds(d);
    return d;
  }
  for (const auto& loop : f.loops) {
    std::vector<Point2> poly;
    std::optional<Point2> hint;
    for (const auto& c : loop.coedges) {
      const Edge& e = b.edge(c.edge);
      auto ts = sample_params(e.curve, sample_count(e.curve));
      if (!coedge_runs_forward(e, c)) std::reverse(ts.begin(), ts.end());
      for (double t : ts) {
        Point2 uv = surface_params(s, eval_curve(e.curve, t), hint);
        if (e.seam == SeamKind::u_seam && c.seam_side != 0)
          uv.x() = c.seam_side < 0 ? d.box.u0 : d.box.u1;
        if (e.seam == SeamKind::v_seam && c.seam_side != 0)
          uv.y() = c.seam_side < 0 ? d.box.v0 : d.box.v1;
        if (poly.empty() || (poly.back() - uv).norm() > 1e-12) poly.push_back(uv);
        hint = uv;
      }
    }
    if (poly.size() > 1 && (poly.front() - poly.back()).norm() < 1e-12) poly.pop_back();
    // bring the loop into the fundamental domain
    if (!poly.empty()) {
      Point2 c = Point2::Zero();
      for (const auto& q : poly) c += q;
      c /= static_cast<double>(poly.size());
      Point2 shift = Point2::Zero();
      if (d.u_periodic) shift.x() = -std::floor((c.x() - d.box.u0) / d.u_period) * d.u_period;
      if (d.v_periodic) shift.y() = -std::floor((c.y() - d.box.v0) / d.v_period) * d.v_period;
      for (auto& q : poly) q += shift;
    }
    d.loops.push_back(std::move(poly));
  }
  set_bounds(d);
  return d;
}

namespace {

bool even_odd(const std::vector<std::vector<Point2>>& loops, const Point2& p) {
  bool inside = false;
  for (const auto& poly : loops) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Point2& a = poly[i];
      const Point2& c = poly[j];
      if ((a.y() > p.y()) != (c.y() > p.y())) {
        const double x = a.x() + (p.y() - a.y()) * (c.x() - a.x()) / (c.y() - a.y());
        if (p.x() < x) inside = !inside;
      }
    }
  }
  return inside;
}

}  // namespace

bool param_point_in_domain(const FaceDomain& d, const Point2& uv) {
  std::vector<double> us{uv.x()}, vs{uv.y()};
  if (d.u_periodic) us = {uv.x(), uv.x() + d.u_period, uv.x() - d.u_period};
  if (d.v_periodic) vs = {uv.y(), uv.y() + d.v_period, uv.y() - d.v_period};
  for (double u : us)
    for (double v : vs)
      if (even_odd(d.loops, {u, v})) return true;
  return false;
}

double distance_to_face_boundary(const Body& b, int face_id, const Point3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& l : b.face(face_id).loops)
    for (const auto& c : l.coedges) {
      const Edge& e = b.edge(c.edge);
      if (e.seam != SeamKind::none) continue;
      best = std::min(best, closest_param_on_curve(e.curve, p).distance);
    }
  return best;
}

std::string to_string(FacePointState s) {
  switch (s) {
    case FacePointState::outside: return "outside";
    case FacePointState::boundary: return "boundary";
    case FacePointState::inside: return "inside";
  }
  return "?";
}

FacePointState classify_point_on_face(const Body& b, int face_id, const Point3& p,
                                      double tol) {
  if (distance_to_face_boundary(b, face_id, p) <= tol) return FacePointState::boundary;
  const Face& f = b.face(face_id);
  const Point2 uv = surface_params(f.surface, p);
  return param_point_in_domain(*b.domain(face_id), uv) ? FacePointState::inside
                                                       : FacePointState::outside;
}

std::vector<std::string> validate(const Body& b, bool require_manifold) {
  std::vector<std::string> problems;
  auto report = [&](auto&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    problems.push_back(os.str());
  };
  for (const auto& [id, v] : b.vertices())
    if (!v.position.allFinite() || v.local_tolerance < 0)
      report("vertex ", id, ": non-finite position or negative tolerance");
  for (const auto& [id, e] : b.edges()) {
    if (!b.has_vertex(e.start_vertex) || !b.has_vertex(e.end_vertex)) {
      report("edge ", id, ": dangling vertex reference");
      continue;
    }
    const Vertex& vs = b.vertex(e.start_vertex);
    const Vertex& ve = b.vertex(e.end_vertex);
    if ((edge_start_point(e) - vs.position).norm() > std::max(vs.local_tolerance, 1e-9))
      report("edge ", id, ": start does not match vertex ", vs.id);
    if ((edge_end_point(e) - ve.position).norm() > std::max(ve.local_tolerance, 1e-9))
      report("edge ", id, ": end does not match vertex ", ve.id);
    if (e.start_vertex == e.end_vertex && !e.curve.closed() &&
        (edge_start_point(e) - edge_end_point(e)).norm() > 1e-9)
      report("edge ", id, ": open curve with identical end vertices");
  }
  std::map<int, int> uses;
  for (const auto& [fid, f] : b.faces()) {
    if (f.loops.empty()) report("face ", fid, ": no loops");
    for (const auto& l : f.loops) {
      for (std::size_t i = 0; i < l.coedges.size(); ++i) {
        const Coedge& c = l.coedges[i];
        if (!b.has_edge(c.edge)) {
          report("face ", fid, ": dangling edge reference ", c.edge);
          continue;
        }
        ++uses[c.edge];
        const Edge& e = b.edge(c.edge);
        const Coedge& n = l.coedges[(i + 1) % l.coedges.size()];
        if (!b.has_edge(n.edge)) continue;
        const Edge& ne = b.edge(n.edge);
        const int end = c.forward ? e.end_vertex : e.start_vertex;
        const int next_start = n.forward ? ne.start_vertex : ne.end_vertex;
        if (end != next_start) report("face ", fid, ": loop broken after edge ", c.edge);
        const double tol = std::max(1e-7, e.curve.fitting_error());
        for (double t : sample_params(e.curve, 32))
          if (std::abs(signed_distance(f.surface, eval_curve(e.curve, t))) > tol) {
            report("face ", fid, ": edge ", c.edge, " leaves the surface");
            break;
          }
      }
    }
  }
  if (require_manifold)
    for (const auto& [eid, e] : b.edges())
      if (uses[eid] != 2) report("edge ", eid, ": used by ", uses[eid], " coedges");
  return problems;
}

std::set<EntityRef> sub_entities(const Body& b, EntityRef a) {
  std::set<EntityRef> out{a};
  auto add_edge = [&](int eid) {
    const Edge& e = b.edge(eid);
    out.insert({EntityType::edge, eid});
    b.vertex(e.start_vertex);
    b.vertex(e.end_vertex);
    out.insert({EntityType::vertex, e.start_vertex});
    out.insert({EntityType::vertex, e.end_vertex});
  };
  switch (a.type) {
    case EntityType::vertex: b.vertex(a.id); break;
    case EntityType::edge: add_edge(a.id); break;
    case EntityType::face:
      for (const auto& l : b.face(a.id).loops)
        for (const auto& c : l.coedges) add_edge(c.edge);
      break;
  }
  return out;
}

bool is_member(const Body& b, EntityRef a, EntityRef of) {
  return sub_entities(b, of).count(a) > 0;
}

EulerCounts euler_counts(const Body& b) {
  EulerCounts c;
  c.vertices = static_cast<int>(b.vertices().size());
  c.edges = static_cast<int>(b.edges().size());
  c.faces = static_cast<int>(b.faces().size());
  for (const auto& [id, f] : b.faces()) c.loops += static_cast<int>(f.loops.size());
  return c;
}

int euler_characteristic(const EulerCounts& c) {
  return c.vertices - c.edges + 2 * c.faces - c.loops;
}

}  // namespace brepair
