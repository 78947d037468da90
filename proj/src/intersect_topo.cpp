#include "brepair/intersect.hpp"
#include "brepair/repair.hpp"
#include "brepair/tolerance.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace brepair {

namespace {

constexpr double kSameEvent = 1e-9;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<int> boundary_edges(const Body& b, int face_id) {
  std::set<int> ids;
  for (const Loop& l : b.face(face_id).loops)
    for (const Coedge& c : l.coedges)
      if (b.edge(c.edge).seam == SeamKind::none) ids.insert(c.edge);
  return {ids.begin(), ids.end()};
}

// Signed shift in [-1, 1) for a trim vertex, stable under evaluation order.
double shift(const PerturbationSpec& p, std::uint64_t salt, const TrimVertex& v, int fa, int fb) {
  const int lo = std::min(fa, fb), hi = std::max(fa, fb);
  return 2.0 * jitter_unit(p.seed, {static_cast<std::int64_t>(salt), lo, hi, v.face,
                                    v.boundary_edge, std::llround(v.position.x() * 1e6),
                                    std::llround(v.position.y() * 1e6),
                                    std::llround(v.position.z() * 1e6)}) - 1.0;
}

void move_along(const Curve& c, TrimVertex& v, double distance) {
  const double speed = curve_derivative(c, v.t).norm();
  if (speed <= 0) return;
  v.t += distance / speed;
  if (c.closed()) {
    if (v.t >= c.t_end()) v.t -= c.period();
    if (v.t < c.t_start()) v.t += c.period();
  } else {
    v.t = std::clamp(v.t, c.t_start(), c.t_end());
  }
  v.position = eval_curve(c, v.t);
}

struct Trimmer {
  const Body& a;
  int fa;
  const Body& b;
  int fb;
  const TrimOptions& opts;
  FaceIntersection& out;

  bool perturbed() const {
    return opts.perturbation && opts.perturbation->active() &&
           opts.perturbation->selects_faces(fa, fb);
  }

  void collect(const Body& own, int face, const Surface& other, const Curve& c, double tol,
               std::vector<TrimVertex>& events) const {
    for (int eid : boundary_edges(own, face)) {
      const Curve& ec = own.edge(eid).curve;
      std::vector<CurveSurfaceHit> hits;
      try {
        hits = curve_surface(ec, other);
      } catch (const IntersectError&) {
        // boundary edge lies on the other surface: its ends are the candidates
        hits = {{ec.t_start(), curve_start(ec), false}, {ec.t_end(), curve_end(ec), false}};
      }
      for (const auto& h : hits) {
        const CurveProjection proj = closest_param_on_curve(c, h.p);
        if (proj.distance > tol) continue;
        events.push_back({h.p, proj.t, face, eid, h.tangential});
      }
    }
  }

  bool inside_both(const Point3& p, double tol) const {
    return classify_point_on_face(a, fa, p, tol) != FacePointState::outside &&
           classify_point_on_face(b, fb, p, tol) != FacePointState::outside;
  }

  void deviation_hook(const Curve& c, double tol, std::vector<TrimVertex>& ev) const {
    for (bool on_a : {true, false}) {
      const Body& own = on_a ? a : b;
      const Body& oth = on_a ? b : a;
      const int f0 = on_a ? fa : fb, f1 = on_a ? fb : fa;
      bool changed = true;
      while (changed) {
        changed = false;
        for (std::size_t i = 0; i < ev.size() && !changed; ++i)
          for (std::size_t j = i + 1; j < ev.size() && !changed; ++j) {
            if (ev[i].face != f0 || ev[j].face != f0) continue;
            if (ev[i].boundary_edge == ev[j].boundary_edge) continue;
            const double d = (ev[i].position - ev[j].position).norm();
            if (d <= kSameEvent || d > 2 * tol) continue;
            DefectRecord rec;
            if (judge_fix_vertex_deviation(c, tol, own, f0, oth, f1, i, j, ev, &rec)) {
              out.deviations.push_back(std::move(rec));
              changed = true;
            }
          }
      }
    }
  }

  void trim(const Curve& c) {
    const Surface& sa = a.face(fa).surface;
    const Surface& sb = b.face(fb).surface;
    const double tol = feature_tolerance(sa, sb, c, opts.t0);
    std::vector<TrimVertex> ev;
    collect(a, fa, sb, c, tol, ev);
    collect(b, fb, sa, c, tol, ev);
    const PerturbationSpec* pert = perturbed() ? opts.perturbation : nullptr;
    if (pert && pert->param_jitter > 0)
      for (auto& v : ev) move_along(c, v, pert->param_jitter * shift(*pert, 1, v, fa, fb));
    if (opts.fix_vertex_deviation) deviation_hook(c, tol, ev);
    if (pert && pert->vertex_jitter > 0)
      for (auto& v : ev) move_along(c, v, pert->vertex_jitter * shift(*pert, 2, v, fa, fb));

    std::sort(ev.begin(), ev.end(), [](const TrimVertex& x, const TrimVertex& y) {
      return x.t < y.t || (x.t == y.t && x.boundary_edge < y.boundary_edge);
    });
    std::vector<TrimVertex> uniq;
    for (const auto& v : ev)
      if (uniq.empty() || (uniq.back().position - v.position).norm() > kSameEvent)
        uniq.push_back(v);
    if (c.closed() && uniq.size() > 1 &&
        (uniq.back().position - uniq.front().position).norm() <= kSameEvent)
      uniq.pop_back();

    std::vector<bool> used(uniq.size(), false);
    auto emit = [&](double t0, double t1) {
      const Curve piece = c.with_range(t0, t1);
      if (!inside_both(eval_curve(piece, 0.5 * (t0 + t1)), tol)) return false;
      IntersectionEdge e;
      e.curve = piece;
      e.source_faces = {fa, fb};
      e.tolerance = tol;
      e.origin_body_pair = {a.id(), b.id()};
      out.edges.push_back(std::move(e));
      return true;
    };
    const std::size_t n = uniq.size();
    if (c.closed()) {
      if (n == 0) {
        emit(c.t_start(), c.t_end());
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          const double t0 = uniq[i].t;
          const double t1 = i + 1 < n ? uniq[i + 1].t : uniq[0].t + c.period();
          if (emit(t0, t1)) used[i] = used[(i + 1) % n] = true;
        }
      }
    } else {
      std::vector<double> cuts{c.t_start()};
      for (const auto& v : uniq) cuts.push_back(v.t);
      cuts.push_back(c.t_end());
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] <= 0) continue;
        if (emit(cuts[i], cuts[i + 1])) {
          if (i > 0) used[i - 1] = true;
          if (i < n) used[i] = true;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i] && inside_both(uniq[i].position, tol)) add_point(uniq[i].position, tol);
  }

  void add_point(const Point3& p, double tol) {
    for (const auto& [q, t] : out.points)
      if ((q - p).norm() <= std::max(t, tol)) return;
    out.points.emplace_back(p, tol);
  }
};

}  // namespace

bool PerturbationSpec::selects_faces(int f1, int f2) const {
  switch (target) {
    case Target::all: return true;
    case Target::face_pair:
      return (face_pair.first == f1 && face_pair.second == f2) ||
             (face_pair.first == f2 && face_pair.second == f1);
    case Target::edge: return false;
  }
  return false;
}

double jitter_unit(std::uint64_t seed, std::initializer_list<std::int64_t> ids) {
  std::uint64_t h = splitmix(seed);
  for (std::int64_t id : ids) h = splitmix(h ^ static_cast<std::uint64_t>(id));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

Box3 face_bounds(const Body& b, int face_id) {
  const Face& f = b.face(face_id);
  const ParamBox d = b.domain(face_id)->bounds;
  Box3 box;
  constexpr int N = 16;
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j) {
      const Point2 uv(d.u0 + (d.u1 - d.u0) * i / N, d.v0 + (d.v1 - d.v0) * j / N);
      if (param_point_in_domain(*b.domain(face_id), uv) || i % N == 0 || j % N == 0)
        box.extend(eval_surface(f.surface, uv.x(), uv.y()));
    }
  for (const Loop& l : f.loops)
    for (const Coedge& c : l.coedges)
      for (double t : sample_params(b.edge(c.edge).curve, 33))
        box.extend(eval_curve(b.edge(c.edge).curve, t));
  const double margin = 0.02 * box.diagonal().norm() + 1e-9;
  box.min().array() -= margin;
  box.max().array() += margin;
  return box;
}

FaceIntersection topological_intersect_faces(const Body& a, int face_a, const Body& b, int face_b,
                                             const TrimOptions& opts) {
  FaceIntersection out;
  const Box3 ba = face_bounds(a, face_a), bb = face_bounds(b, face_b);
  if (!ba.intersects(bb)) return out;
  SsiOptions so;
  so.region = ba.intersection(bb);
  so.seed_box = a.domain(face_a)->bounds;
  so.seed_box2 = b.domain(face_b)->bounds;
  const GeomIntersectionResult geo =
      surface_surface(a.face(face_a).surface, b.face(face_b).surface, so);
  Trimmer tr{a, face_a, b, face_b, opts, out};
  for (const Curve& c : geo.curves) tr.trim(c);
  for (const Point3& p : geo.points) {
    const double tol = opts.t0 * degree(a.face(face_a).surface) * degree(b.face(face_b).surface);
    if (tr.inside_both(p, tol)) tr.add_point(p, tol);
  }
  return out;
}

IntersectionGraph perturb_graph(const IntersectionGraph& g, const PerturbationSpec& spec) {
  if (spec.vertex_jitter <= 0) return g;
  auto selected = [&](const IntersectionEdge& e) {
    switch (spec.target) {
      case PerturbationSpec::Target::all: return true;
      case PerturbationSpec::Target::face_pair:
        return spec.selects_faces(e.source_faces.first, e.source_faces.second);
      case PerturbationSpec::Target::edge:
        return std::find(spec.edge_ids.begin(), spec.edge_ids.end(), e.id) != spec.edge_ids.end();
    }
    return false;
  };
  // edge ends that retreat from their vertex by the jitter distance
  std::set<std::pair<int, bool>> moved;
  for (const auto& [vid, v] : g.vertices()) {
    if (v.ring.size() < 2) continue;
    // unselected edges hold the vertex; if all are selected a seeded one does
    const bool all = std::all_of(v.ring.begin(), v.ring.end(),
                                 [&](const RingEntry& r) { return selected(g.edge(r.edge)); });
    const auto anchor = all ? static_cast<std::size_t>(jitter_unit(spec.seed, {vid}) *
                                                       static_cast<double>(v.ring.size()))
                            : v.ring.size();
    for (std::size_t i = 0; i < v.ring.size(); ++i) {
      const IntersectionEdge& e = g.edge(v.ring[i].edge);
      if (i != anchor && selected(e) && !e.curve.closed()) moved.insert({e.id, v.ring[i].at_end});
    }
  }
  IntersectionGraph out;
  for (const auto& [id, e] : g.edges()) {
    IntersectionEdge copy = e;
    copy.start_vertex = copy.end_vertex = 0;
    double t0 = e.curve.t_start(), t1 = e.curve.t_end();
    const double len = curve_length(e.curve);
    if (moved.count({id, false}) && len > 4 * spec.vertex_jitter)
      t0 += spec.vertex_jitter / curve_derivative(e.curve, t0).norm();
    if (moved.count({id, true}) && len > 4 * spec.vertex_jitter)
      t1 -= spec.vertex_jitter / curve_derivative(e.curve, t1).norm();
    copy.curve = e.curve.with_range(t0, t1);
    out.add_edge(std::move(copy));
  }
  for (const auto& [vid, v] : g.vertices())
    if (v.isolated_point) out.add_point(v.position, v.tolerance);
  return out;
}

}  // namespace brepair
