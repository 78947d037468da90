#include "brepair/repair.hpp"

#include "brepair/intersect.hpp"
#include "brepair/tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <map>
#include <set>

#include "json.hpp"

namespace brepair {

std::string to_string(DefectKind k) {
  switch (k) {
    case DefectKind::disconnection: return "disconnection";
    case DefectKind::short_edge: return "short-edge";
    case DefectKind::vertex_deviation: return "vertex-deviation";
  }
  return "?";
}

std::string to_string(RepairAction a) {
  switch (a) {
    case RepairAction::merged: return "merged";
    case RepairAction::collapsed: return "collapsed";
    case RepairAction::substituted: return "substituted";
    case RepairAction::none: return "none";
  }
  return "?";
}

bool DefectRecord::all_passed() const {
  return !criteria.empty() &&
         std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.passed; });
}

const Body& BodySet::body_of_face(int face_id) const {
  for (const Body* b : bodies_)
    if (b->has_face(face_id)) return *b;
  throw TopologyError("no body owns face " + std::to_string(face_id));
}

namespace {

double distance_to_edge(const Body& b, int edge_id, const Point3& p) {
  return closest_param_on_curve(b.edge(edge_id).curve, p).distance;
}

std::vector<int> face_edge_ids(const Body& b, int face_id) {
  std::set<int> ids;
  for (const Loop& l : b.face(face_id).loops)
    for (const Coedge& c : l.coedges) ids.insert(c.edge);
  return {ids.begin(), ids.end()};
}

// Checks are appended to the transcript as they are evaluated; the first
// failing gate ends the judge.
struct Transcript {
  std::vector<CriterionCheck> checks;
  bool add(int index, std::string what, double measured, double tol, bool passed) {
    checks.push_back({index, std::move(what), passed, measured, tol});
    return passed;
  }
};

}  // namespace

bool judge_fix_vertex_deviation(const Curve& e0, double tolerance, const Body& body0, int f0,
                                const Body& body1, int f1, std::size_t i1, std::size_t i2,
                                std::vector<TrimVertex>& v_array, DefectRecord* record) {
  const TrimVertex v1 = v_array.at(i1), v2 = v_array.at(i2);
  Transcript tr;
  const bool distinct = v1.boundary_edge != v2.boundary_edge && v1.face == f0 && v2.face == f0;
  bool ok = tr.add(1, "curve meets two boundary edges of the face", distinct ? 2 : 1, 2, distinct);
  int v0 = 0;
  if (ok) {
    const Edge& a = body0.edge(v1.boundary_edge);
    const Edge& b = body0.edge(v2.boundary_edge);
    const Point3 mid = 0.5 * (v1.position + v2.position);
    double best = std::numeric_limits<double>::infinity();
    for (int x : {a.start_vertex, a.end_vertex})
      if (x == b.start_vertex || x == b.end_vertex) {
        const double d = (body0.vertex(x).position - mid).norm();
        if (d < best) {
          best = d;
          v0 = x;
        }
      }
    ok = tr.add(2, "boundary edges share a vertex", v0 ? 1 : 0, 1, v0 != 0);
  }
  Point3 p0 = Point3::Zero();
  if (ok) {
    p0 = body0.vertex(v0).position;
    const double d = std::max((v1.position - p0).norm(), (v2.position - p0).norm());
    ok = tr.add(3, "trim vertices near the shared vertex", d, tolerance, d < tolerance);
  }
  if (ok) {
    const double d = std::abs(signed_distance(body1.face(f1).surface, p0));
    ok = tr.add(4, "shared vertex lies on the other face", d, tolerance, d <= tolerance);
  }
  if (record) {
    record->kind = DefectKind::vertex_deviation;
    record->vertices = {v0};
    record->faces = {f0, f1};
    record->edges = {v1.boundary_edge, v2.boundary_edge};
    record->criteria = tr.checks;
    record->before = {v1.position, v2.position};
    record->action = ok ? RepairAction::substituted : RepairAction::none;
    record->after = ok ? std::vector<Point3>{p0} : record->before;
  }
  if (!ok) return false;
  TrimVertex sub{p0, closest_param_on_curve(e0, p0).t, f0, std::min(v1.boundary_edge, v2.boundary_edge),
                 false};
  v_array.erase(v_array.begin() + static_cast<std::ptrdiff_t>(std::max(i1, i2)));
  v_array.erase(v_array.begin() + static_cast<std::ptrdiff_t>(std::min(i1, i2)));
  v_array.push_back(sub);
  return true;
}

std::optional<DisconnectionWitness> judge_disconnection(int e1, int e2, const IntersectionGraph& g,
                                                        const BodySet& bodies, double t0,
                                                        std::vector<CriterionCheck>* transcript) {
  const IntersectionEdge& a = g.edge(e1);
  const IntersectionEdge& b = g.edge(e2);
  Transcript tr;
  auto done = [&](bool ok) {
    if (transcript) *transcript = tr.checks;
    return ok;
  };
  // nearest pair of distinct end vertices
  int v1 = 0, v2 = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int x : {a.start_vertex, a.end_vertex})
    for (int y : {b.start_vertex, b.end_vertex}) {
      if (x == y) continue;
      const double d = (g.vertex(x).position - g.vertex(y).position).norm();
      if (d < best) {
        best = d;
        v1 = x;
        v2 = y;
      }
    }
  const double gate = a.tolerance + b.tolerance;
  if (!tr.add(1, "nearest end vertices within the combined tolerance", best, gate,
              v1 != 0 && best <= gate))
    return done(false), std::nullopt;

  std::set<int> fa{a.source_faces.first, a.source_faces.second};
  std::set<int> fb{b.source_faces.first, b.source_faces.second};
  std::vector<int> common;
  std::set_intersection(fa.begin(), fa.end(), fb.begin(), fb.end(), std::back_inserter(common));
  int f1 = 0, f2 = 0;
  if (common.size() == 1 && fa.size() == 2 && fb.size() == 2) {
    f1 = *fa.begin() == common[0] ? *fa.rbegin() : *fa.begin();
    f2 = *fb.begin() == common[0] ? *fb.rbegin() : *fb.begin();
  }
  if (!tr.add(2, "source faces share exactly one face", static_cast<double>(common.size()), 1,
              f1 != 0 && f2 != 0 && f1 != f2))
    return done(false), std::nullopt;

  const Body& body1 = bodies.body_of_face(f1);
  const Point3 p1 = g.vertex(v1).position, p2 = g.vertex(v2).position;
  int shared = 0;
  double measured = std::numeric_limits<double>::infinity(), tol_used = gate;
  if (body1.has_face(f2)) {
    const auto ea = face_edge_ids(body1, f1), eb = face_edge_ids(body1, f2);
    for (int id : ea) {
      if (!std::binary_search(eb.begin(), eb.end(), id)) continue;
      const double tol = std::max(body_edge_tolerance(body1, id, t0), gate);
      const double d = std::max(distance_to_edge(body1, id, p1), distance_to_edge(body1, id, p2));
      if (d <= tol) {
        shared = id;
        measured = d;
        tol_used = tol;
        break;
      }
      if (d < measured) {
        measured = d;
        tol_used = tol;
      }
    }
  }
  if (!tr.add(3, "both vertices on an edge shared by the differing faces", measured, tol_used,
              shared != 0))
    return done(false), std::nullopt;
  done(true);
  return DisconnectionWitness{e1, e2, v1, v2, common[0], f1, f2, shared, tr.checks};
}

DefectRecord fix_disconnection(const DisconnectionWitness& w, IntersectionGraph& g,
                               const BodySet& bodies) {
  DefectRecord r;
  r.kind = DefectKind::disconnection;
  r.edges = {w.e1, w.e2};
  r.vertices = {w.v1, w.v2};
  r.faces = {w.common_face, w.f1, w.f2};
  r.criteria = w.criteria;
  const Point3 p1 = g.vertex(w.v1).position, p2 = g.vertex(w.v2).position;
  r.before = {p1, p2};
  r.after = r.before;
  const Body& owner = bodies.body_of_face(w.f1);
  const Surface& s0 = bodies.body_of_face(w.common_face).face(w.common_face).surface;
  std::vector<CurveSurfaceHit> hits;
  try {
    hits = curve_surface(owner.edge(w.shared_edge).curve, s0);
  } catch (const IntersectError& e) {
    r.note = e.what();
  }
  if (hits.empty()) {
    if (r.note.empty()) r.note = "re-intersection failed";
    return r;
  }
  const auto best = std::min_element(hits.begin(), hits.end(), [&](const auto& x, const auto& y) {
    return (x.p - p1).norm() + (x.p - p2).norm() < (y.p - p1).norm() + (y.p - p2).norm();
  });
  try {
    g.merge_vertices(std::min(w.v1, w.v2), std::max(w.v1, w.v2), best->p);
  } catch (const GraphError& e) {
    r.note = e.what();
    return r;
  }
  r.action = RepairAction::merged;
  r.after = {best->p};
  return r;
}

std::optional<ShortEdgeWitness> judge_short_edge(int e0, const IntersectionGraph& g,
                                                 const BodySet& bodies, double t0,
                                                 std::vector<CriterionCheck>* transcript) {
  const IntersectionEdge& e = g.edge(e0);
  Transcript tr;
  auto done = [&] {
    if (transcript) *transcript = tr.checks;
  };
  const double len = curve_length(e.curve);
  if (!tr.add(1, "edge length within its tolerance", len, e.tolerance, len <= e.tolerance))
    return done(), std::nullopt;
  const EndConnection state = g.end_connection_state(e0);
  if (!tr.add(2, "not connected at both ends", state == EndConnection::both_ends ? 2 : 1, 1,
              state != EndConnection::both_ends && !e.curve.closed()))
    return done(), std::nullopt;

  const Point3 p1 = g.vertex(e.start_vertex).position, p2 = g.vertex(e.end_vertex).position;
  const int f1 = e.source_faces.first, f2 = e.source_faces.second;
  const Body& b1 = bodies.body_of_face(f1);
  const Body& b2 = bodies.body_of_face(f2);
  auto on_boundary = [&](const Body& b, int face, const Point3& p) {
    for (int id : face_edge_ids(b, face)) {
      if (b.edge(id).seam != SeamKind::none) continue;
      const double tol = std::max(body_edge_tolerance(b, id, t0), e.tolerance);
      if (distance_to_edge(b, id, p) <= tol) return id;
    }
    return 0;
  };
  int be1 = on_boundary(b1, f1, p1), be2 = on_boundary(b2, f2, p2);
  if (!be1 || !be2) {
    be1 = on_boundary(b1, f1, p2);
    be2 = on_boundary(b2, f2, p1);
  }
  if (!tr.add(3, "end vertices on boundary edges of both faces", (be1 != 0) + (be2 != 0), 2,
              be1 && be2))
    return done(), std::nullopt;

  const double gate = body_edge_tolerance(b1, be1, t0) + body_edge_tolerance(b2, be2, t0);
  std::vector<CurveCurveHit> hits;
  try {
    hits = curve_curve(b1.edge(be1).curve, b2.edge(be2).curve, gate);
  } catch (const IntersectError&) {
  }
  double worst = std::numeric_limits<double>::infinity();
  Point3 v0 = Point3::Zero();
  for (const auto& h : hits) {
    const double d = std::max((h.p - p1).norm(), (h.p - p2).norm());
    if (d < worst) {
      worst = d;
      v0 = h.p;
    }
  }
  if (!tr.add(4, "boundary edges meet near both end vertices", worst, gate, worst < gate))
    return done(), std::nullopt;
  done();
  return ShortEdgeWitness{e0, v0, be1, be2, tr.checks};
}

DefectRecord fix_short_edge(const ShortEdgeWitness& w, IntersectionGraph& g) {
  const IntersectionEdge e = g.edge(w.e0);
  DefectRecord r;
  r.kind = DefectKind::short_edge;
  r.edges = {w.e0};
  r.vertices = {e.start_vertex, e.end_vertex};
  r.faces = {e.source_faces.first, e.source_faces.second};
  r.criteria = w.criteria;
  r.before = {g.vertex(e.start_vertex).position, g.vertex(e.end_vertex).position};
  g.remove_edge(w.e0, true);
  g.merge_vertices(std::min(e.start_vertex, e.end_vertex), std::max(e.start_vertex, e.end_vertex),
                   w.v0);
  r.action = RepairAction::collapsed;
  r.after = {w.v0};
  return r;
}

namespace {

// Edge pairs whose end vertices fall in the same or neighbouring hash cells.
std::vector<std::pair<int, int>> candidate_pairs(const IntersectionGraph& g) {
  double cell = 0;
  for (const auto& [id, e] : g.edges()) cell = std::max(cell, 2 * e.tolerance);
  if (cell <= 0) cell = 1e-9;
  std::map<std::array<long long, 3>, std::vector<int>> grid;
  auto key = [&](const Point3& p) {
    return std::array<long long, 3>{std::llround(std::floor(p.x() / cell)),
                                    std::llround(std::floor(p.y() / cell)),
                                    std::llround(std::floor(p.z() / cell))};
  };
  for (const auto& [id, e] : g.edges())
    for (int v : {e.start_vertex, e.end_vertex}) grid[key(g.vertex(v).position)].push_back(id);
  std::set<std::pair<int, int>> out;
  for (const auto& [k, ids] : grid)
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dz = -1; dz <= 1; ++dz) {
          auto it = grid.find({k[0] + dx, k[1] + dy, k[2] + dz});
          if (it == grid.end()) continue;
          for (int a : ids)
            for (int b : it->second)
              if (a < b) out.insert({a, b});
        }
  return {out.begin(), out.end()};
}

bool share_vertex(const IntersectionEdge& a, const IntersectionEdge& b) {
  return a.start_vertex == b.start_vertex || a.start_vertex == b.end_vertex ||
         a.end_vertex == b.start_vertex || a.end_vertex == b.end_vertex;
}

}  // namespace

std::vector<DefectRecord> repair_pass(IntersectionGraph& g, const BodySet& bodies,
                                      const RepairOptions& opts) {
  std::vector<DefectRecord> records;
  std::set<std::pair<int, int>> failed_pairs;
  std::set<int> failed_edges;
  for (int pass = 0; pass < opts.max_passes; ++pass) {
    bool changed = false;
    for (const auto& [e1, e2] : candidate_pairs(g)) {
      if (!g.has_edge(e1) || !g.has_edge(e2) || failed_pairs.count({e1, e2})) continue;
      if (share_vertex(g.edge(e1), g.edge(e2))) continue;
      const auto w = judge_disconnection(e1, e2, g, bodies, opts.t0);
      if (!w) continue;
      records.push_back(fix_disconnection(*w, g, bodies));
      if (records.back().action == RepairAction::none)
        failed_pairs.insert({e1, e2});
      else
        changed = true;
    }
    std::vector<int> ids;
    for (const auto& [id, e] : g.edges()) ids.push_back(id);
    for (int id : ids) {
      if (!g.has_edge(id) || failed_edges.count(id)) continue;
      const auto w = judge_short_edge(id, g, bodies, opts.t0);
      if (!w) continue;
      try {
        records.push_back(fix_short_edge(*w, g));
        changed = true;
      } catch (const GraphError& err) {
        failed_edges.insert(id);
        DefectRecord r;
        r.kind = DefectKind::short_edge;
        r.edges = {id};
        r.criteria = w->criteria;
        r.note = err.what();
        records.push_back(r);
      }
    }
    if (!changed) break;
  }
  return records;
}

std::string defects_to_json(const std::vector<DefectRecord>& records) {
  using nlohmann::json;
  auto pts = [](const std::vector<Point3>& ps) {
    json a = json::array();
    for (const auto& p : ps) a.push_back({p.x(), p.y(), p.z()});
    return a;
  };
  json out = json::array();
  for (const auto& r : records) {
    json crit = json::array();
    for (const auto& c : r.criteria)
      crit.push_back({{"index", c.index},
                      {"description", c.description},
                      {"passed", c.passed},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance}});
    out.push_back({{"kind", to_string(r.kind)},
                   {"action", to_string(r.action)},
                   {"edges", r.edges},
                   {"vertices", r.vertices},
                   {"faces", r.faces},
                   {"criteria", crit},
                   {"before", pts(r.before)},
                   {"after", pts(r.after)},
                   {"note", r.note}});
  }
  return out.dump(2);
}

}  // namespace brepair
