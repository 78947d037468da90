#include "imprint_internal.hpp"

#include <algorithm>
#include <numeric>

namespace brepair {

namespace {

using detail::Piece;

constexpr double kSamePoint = 1e-9;
constexpr int kIdBaseA = 20001;
constexpr int kIdBaseB = 40001;

Point3 curve_point(const Curve& c, double frac) {
  return eval_curve(c, c.t_start() + frac * (c.t_end() - c.t_start()));
}

void collect_splits(const Body& body, const IntersectionGraph& g, double t0,
                    detail::EdgeSplits& splits) {
  for (const auto& [eid, e] : body.edges()) {
    const Point3 ps = edge_start_point(e), pe = edge_end_point(e);
    for (const auto& [vid, v] : g.vertices()) {
      if (v.ring.empty()) continue;
      const Point3& p = v.position;
      if ((p - ps).norm() <= kSamePoint || (p - pe).norm() <= kSamePoint) continue;
      const CurveProjection cp = closest_param_on_curve(e.curve, p);
      if (cp.distance <= t0) splits[eid].push_back({cp.t, p});
    }
  }
}

class FragmentBuilder {
 public:
  FragmentBuilder(int id, int id_base) : body_(id, id_base) {}

  int vertex(const Point3& p) {
    for (const auto& [id, v] : body_.vertices())
      if ((v.position - p).norm() <= kSamePoint) return id;
    return body_.add_vertex(p);
  }

  Coedge coedge(const Piece& pc) {
    const int v0 = vertex(pc.p0), v1 = vertex(pc.p1);
    const Point3 mid = curve_point(pc.curve, 0.5);
    const SeamKind seam = pc.kind == Piece::Kind::seam ? seam_kind_.at(pc.source) : SeamKind::none;
    for (int id : by_source_[{static_cast<int>(pc.kind), pc.source}]) {
      const Edge& e = body_.edge(id);
      if (std::minmax(e.start_vertex, e.end_vertex) != std::minmax(v0, v1)) continue;
      if ((curve_point(e.curve, 0.5) - mid).norm() > 1e-7) continue;
      const Point3 q = curve_point(pc.curve, 0.25);
      const bool fwd = (curve_point(e.curve, 0.25) - q).norm() <= (curve_point(e.curve, 0.75) - q).norm();
      return {id, fwd, pc.seam_side};
    }
    // repaired graph vertices may sit off the curve ends by up to the edge tolerance
    widen(v0, (curve_start(pc.curve) - pc.p0).norm());
    widen(v1, (curve_end(pc.curve) - pc.p1).norm());
    const int id = body_.add_edge(pc.curve, v0, v1, false, seam);
    by_source_[{static_cast<int>(pc.kind), pc.source}].push_back(id);
    return {id, true, pc.seam_side};
  }

  void note_seams(const Body& src) {
    for (const auto& [id, e] : src.edges()) seam_kind_[id] = e.seam;
  }

  Body& body() { return body_; }

 private:
  void widen(int v, double gap) {
    double& tol = body_.vertex_mut(v).local_tolerance;
    if (gap > kSamePoint) tol = std::max(tol, 2 * gap);
  }

  Body body_;
  std::map<std::pair<int, int>, std::vector<int>> by_source_;
  std::map<int, SeamKind> seam_kind_;
};

void imprint_body(const Body& src, bool first, const IntersectionGraph& g,
                  const detail::EdgeSplits& splits, const std::map<int, std::vector<double>>& cuts,
                  FragmentBuilder& out, std::map<int, int>& parent) {
  std::map<int, std::vector<Piece>> imprints;
  for (const auto& [id, e] : g.edges()) {
    const int fid = first ? e.source_faces.first : e.source_faces.second;
    auto pieces = detail::imprint_pieces(src, fid, g, id, cuts.at(id));
    imprints[fid].insert(imprints[fid].end(), pieces.begin(), pieces.end());
  }
  out.note_seams(src);
  for (const auto& [fid, f] : src.faces()) {
    std::vector<Piece> pieces = detail::boundary_pieces(src, fid, splits);
    pieces.insert(pieces.end(), imprints[fid].begin(), imprints[fid].end());
    const detail::FaceSplit split = detail::arrange(src, fid, std::move(pieces));
    for (const auto& region : split.regions) {
      std::vector<Loop> loops;
      for (const auto& cycle : region.cycles) {
        Loop loop;
        for (const auto& [pi, fwd] : cycle) {
          const Piece& pc = split.pieces[pi];
          if (pc.kind == Piece::Kind::pole) continue;
          Coedge c = out.coedge(pc);
          if (!fwd) c.forward = !c.forward;
          loop.coedges.push_back(c);
        }
        loops.push_back(std::move(loop));
      }
      const int nid = out.body().add_face(f.surface, std::move(loops), f.reversed);
      out.body().face_mut(nid).param_loops = region.polygons;
      parent[nid] = fid;
    }
  }
}

}  // namespace

ImprintResult stage_imprint(const Body& a, const Body& b, const IntersectionGraph& g,
                            double t0) {
  detail::EdgeSplits sa, sb;
  collect_splits(a, g, t0, sa);
  collect_splits(b, g, t0, sb);
  // an edge cut at a seam of either surface is cut on both sides, so the
  // fragments of a and b still share their imprint edges
  std::map<int, std::vector<double>> cuts;
  for (const auto& [id, e] : g.edges()) {
    auto& c = cuts[id];
    for (double t : detail::seam_cuts(a, e.source_faces.first, g, id, sa)) c.push_back(t);
    for (double t : detail::seam_cuts(b, e.source_faces.second, g, id, sb)) c.push_back(t);
  }
  FragmentBuilder fa(a.id(), kIdBaseA), fb(b.id(), kIdBaseB);
  ImprintResult r;
  imprint_body(a, true, g, sa, cuts, fa, r.parent);
  imprint_body(b, false, g, sb, cuts, fb, r.parent);
  r.a = std::move(fa.body());
  r.b = std::move(fb.body());
  return r;
}

int logical_face_count(const Body& b) {
  std::map<int, int> root;
  for (const auto& [id, f] : b.faces()) root[id] = id;
  auto find = [&](int x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (const auto& [eid, faces] : b.adjacency()) {
    if (b.edge(eid).seam == SeamKind::none) continue;
    for (std::size_t i = 1; i < faces.size(); ++i) root[find(faces[i])] = find(faces[0]);
  }
  int n = 0;
  for (const auto& [id, r] : root) n += find(id) == id;
  return n;
}

}  // namespace brepair
