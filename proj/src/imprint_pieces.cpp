#include "imprint_internal.hpp"

#include <algorithm>
#include <cmath>

namespace brepair::detail {

namespace {

constexpr double kSamePoint = 1e-9;

Point2 unwrap_near(const FaceDomain& d, Point2 uv, const Point2& ref) {
  if (d.u_periodic) uv.x() += std::round((ref.x() - uv.x()) / d.u_period) * d.u_period;
  if (d.v_periodic) uv.y() += std::round((ref.y() - uv.y()) / d.v_period) * d.v_period;
  return uv;
}

int sample_count(const Curve& c) {
  if (c.kind() == CurveKind::line) return 2;
  if (c.kind() == CurveKind::polyline)
    return std::max(64, 2 * static_cast<int>(std::get<curves::Polyline>(c.geometry()).points.size()));
  return 64;
}

// Index of the periodic cell holding x.
long cell(double x, double lo, double period) {
  return static_cast<long>(std::floor((x - lo) / period));
}

int seam_edge(const Body& b, int face_id, SeamKind kind) {
  for (const Loop& l : b.face(face_id).loops)
    for (const Coedge& c : l.coedges)
      if (b.edge(c.edge).seam == kind) return c.edge;
  return 0;
}

bool runs_forward(const Edge& e, const Coedge& c) { return c.forward != e.reversed; }

}  // namespace

Point2 uv_near(const Surface& s, const FaceDomain& d, const Point3& p, std::optional<Point2> ref) {
  Point2 uv = surface_params(s, p, ref);
  return ref ? unwrap_near(d, uv, *ref) : uv;
}

namespace {

std::vector<Point2> sample_uv(const Surface& s, const FaceDomain& d, const IntersectionGraph& g,
                              const IntersectionEdge& ge, const std::vector<double>& ts) {
  const Point3 pstart = g.vertex(ge.start_vertex).position;
  const Point3 pend = g.vertex(ge.end_vertex).position;
  std::vector<Point2> uvs;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const Point3 p = i == 0 ? pstart : i + 1 == ts.size() ? pend : eval_curve(ge.curve, ts[i]);
    uvs.push_back(uv_near(s, d, p, uvs.empty() ? std::nullopt : std::optional(uvs.back())));
  }
  return uvs;
}

}  // namespace

std::vector<double> seam_cuts(const Body& b, int face_id, const IntersectionGraph& g, int gid,
                              EdgeSplits& splits) {
  const Surface& s = b.face(face_id).surface;
  const FaceDomain& d = *b.domain(face_id);
  const IntersectionEdge& ge = g.edge(gid);
  const Curve& c = ge.curve;
  const Point3 pstart = g.vertex(ge.start_vertex).position;
  const Point3 pend = g.vertex(ge.end_vertex).position;
  const std::vector<double> ts = sample_params(c, sample_count(c));
  const std::vector<Point2> uvs = sample_uv(s, d, g, ge, ts);
  std::vector<double> cuts;
  for (int axis = 0; axis < 2; ++axis) {
    const bool periodic = axis == 0 ? d.u_periodic : d.v_periodic;
    if (!periodic) continue;
    const double lo = axis == 0 ? d.box.u0 : d.box.v0;
    const double per = axis == 0 ? d.u_period : d.v_period;
    const int se = seam_edge(b, face_id, axis == 0 ? SeamKind::u_seam : SeamKind::v_seam);
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
      const long k0 = cell(uvs[i][axis], lo, per), k1 = cell(uvs[i + 1][axis], lo, per);
      for (long k = std::min(k0, k1) + 1; k <= std::max(k0, k1); ++k) {
        const double w = lo + static_cast<double>(k) * per;
        double ta = ts[i], tb = ts[i + 1];
        const double fa = uvs[i][axis] - w;
        for (int it = 0; it < 60; ++it) {
          const double tm = 0.5 * (ta + tb);
          const double fm = uv_near(s, d, eval_curve(c, tm), uvs[i])[axis] - w;
          if ((fm < 0) == (fa < 0)) ta = tm;
          else tb = tm;
        }
        const double t = 0.5 * (ta + tb);
        const Point3 p = eval_curve(c, t);
        if ((p - pstart).norm() <= kSamePoint || (p - pend).norm() <= kSamePoint) continue;
        cuts.push_back(t);
        if (se) splits[se].push_back({closest_param_on_curve(b.edge(se).curve, p).t, p});
      }
    }
  }
  return cuts;
}

std::vector<Piece> imprint_pieces(const Body& b, int face_id, const IntersectionGraph& g, int gid,
                                  std::vector<double> cuts) {
  const Surface& s = b.face(face_id).surface;
  const FaceDomain& d = *b.domain(face_id);
  const IntersectionEdge& ge = g.edge(gid);
  const Curve& c = ge.curve;
  const Point3 pstart = g.vertex(ge.start_vertex).position;
  const Point3 pend = g.vertex(ge.end_vertex).position;
  const std::vector<double> ts = sample_params(c, sample_count(c));
  const std::vector<Point2> uvs = sample_uv(s, d, g, ge, ts);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> bounds{c.t_start()};
  for (double t : cuts)
    if (t - bounds.back() > 1e-12) bounds.push_back(t);
  bounds.push_back(c.t_end());
  std::vector<Piece> out;
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    const double ta = bounds[k], tb = bounds[k + 1];
    if (!(tb > ta)) continue;
    Piece pc;
    pc.kind = Piece::Kind::imprint;
    pc.source = gid;
    pc.curve = c.with_range(ta, tb);
    pc.p0 = k == 0 ? pstart : eval_curve(c, ta);
    pc.p1 = k + 2 == bounds.size() ? pend : eval_curve(c, tb);
    // unwrapped polyline: endpoints plus the interior samples
    std::size_t ref = 0;
    while (ref + 1 < ts.size() && ts[ref + 1] <= ta) ++ref;
    std::vector<Point2> poly{k == 0 ? uvs.front() : uv_near(s, d, pc.p0, uvs[ref])};
    for (std::size_t i = 0; i < ts.size(); ++i)
      if (ts[i] > ta && ts[i] < tb) poly.push_back(unwrap_near(d, uvs[i], poly.back()));
    poly.push_back(unwrap_near(d, uv_near(s, d, pc.p1, poly.back()), poly.back()));
    // shift into the fundamental domain by the midpoint
    const Point2 mid = poly[poly.size() / 2] * 0.5 + poly[(poly.size() - 1) / 2] * 0.5;
    Point2 shift = Point2::Zero();
    if (d.u_periodic) shift.x() = -cell(mid.x(), d.box.u0, d.u_period) * d.u_period;
    if (d.v_periodic) shift.y() = -cell(mid.y(), d.box.v0, d.v_period) * d.v_period;
    for (auto& q : poly) q += shift;
    pc.uv = std::move(poly);
    out.push_back(std::move(pc));
  }
  return out;
}

std::vector<Piece> boundary_pieces(const Body& b, int face_id, const EdgeSplits& splits) {
  const Face& f = b.face(face_id);
  const Surface& s = f.surface;
  const FaceDomain& d = *b.domain(face_id);
  std::vector<Piece> out;
  for (const Loop& loop : f.loops) {
    std::vector<Piece> lp;
    std::optional<Point2> hint;
    for (const Coedge& co : loop.coedges) {
      const Edge& e = b.edge(co.edge);
      const bool fwd = runs_forward(e, co);
      const Point3 ps = b.vertex(e.reversed ? e.end_vertex : e.start_vertex).position;
      const Point3 pe = b.vertex(e.reversed ? e.start_vertex : e.end_vertex).position;
      // cut params along the curve, with their positions
      std::vector<std::pair<double, Point3>> cuts{{e.curve.t_start(), ps}};
      if (auto it = splits.find(e.id); it != splits.end())
        for (const auto& [t, p] : it->second)
          if ((p - ps).norm() > kSamePoint && (p - pe).norm() > kSamePoint) cuts.push_back({t, p});
      cuts.push_back({e.curve.t_end(), pe});
      std::sort(cuts.begin() + 1, cuts.end() - 1,
                [](const auto& x, const auto& y) { return x.first < y.first; });
      cuts.erase(std::unique(cuts.begin() + 1, cuts.end() - 1,
                             [](const auto& x, const auto& y) {
                               return (x.second - y.second).norm() <= kSamePoint;
                             }),
                 cuts.end() - 1);
      std::vector<Piece> ep;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        Piece pc;
        pc.kind = e.seam == SeamKind::none ? Piece::Kind::boundary : Piece::Kind::seam;
        pc.source = e.id;
        pc.seam_side = co.seam_side;
        pc.curve = e.curve.with_range(cuts[k].first, cuts[k + 1].first);
        pc.p0 = cuts[k].second;
        pc.p1 = cuts[k + 1].second;
        if (!fwd) {
          pc.curve = pc.curve.reversed_copy();
          std::swap(pc.p0, pc.p1);
        }
        ep.push_back(std::move(pc));
      }
      if (!fwd) std::reverse(ep.begin(), ep.end());
      for (Piece& pc : ep) {
        const auto ts = sample_params(pc.curve, std::max(2, sample_count(pc.curve) / 2));
        for (std::size_t i = 0; i < ts.size(); ++i) {
          const Point3 p = i == 0 ? pc.p0 : i + 1 == ts.size() ? pc.p1 : eval_curve(pc.curve, ts[i]);
          Point2 uv = uv_near(s, d, p, hint);
          if (e.seam == SeamKind::u_seam && co.seam_side != 0)
            uv.x() = co.seam_side < 0 ? d.box.u0 : d.box.u1;
          if (e.seam == SeamKind::v_seam && co.seam_side != 0)
            uv.y() = co.seam_side < 0 ? d.box.v0 : d.box.v1;
          pc.uv.push_back(uv);
          hint = uv;
        }
        lp.push_back(std::move(pc));
      }
    }
    // same whole-loop shift as the face domain
    Point2 c = Point2::Zero();
    std::size_t n = 0;
    for (const auto& pc : lp)
      for (const auto& q : pc.uv) {
        c += q;
        ++n;
      }
    if (n) c /= static_cast<double>(n);
    Point2 shift = Point2::Zero();
    if (d.u_periodic) shift.x() = -cell(c.x(), d.box.u0, d.u_period) * d.u_period;
    if (d.v_periodic) shift.y() = -cell(c.y(), d.box.v0, d.v_period) * d.v_period;
    for (auto& pc : lp)
      for (auto& q : pc.uv) q += shift;
    // close param gaps where the loop passes through a pole or apex
    for (std::size_t i = 0; i < lp.size(); ++i) {
      out.push_back(lp[i]);
      const Piece& next = lp[(i + 1) % lp.size()];
      if ((lp[i].uv.back() - next.uv.front()).norm() > 1e-8) {
        Piece pole;
        pole.kind = Piece::Kind::pole;
        pole.p0 = lp[i].p1;
        pole.p1 = next.p0;
        pole.uv = {lp[i].uv.back(), next.uv.front()};
        out.push_back(std::move(pole));
      }
    }
  }
  return out;
}

}  // namespace brepair::detail
