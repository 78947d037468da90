#include "imprint_internal.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace brepair::detail {

namespace {

constexpr double kSameUv = 1e-8;

double signed_area(const std::vector<Point2>& poly) {
  double a = 0;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
    a += (poly[j].x() - poly[i].x()) * (poly[j].y() + poly[i].y());
  return 0.5 * a;
}

bool contains(const std::vector<Point2>& poly, const Point2& p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2& a = poly[i];
    const Point2& c = poly[j];
    if ((a.y() > p.y()) != (c.y() > p.y()) &&
        p.x() < a.x() + (p.y() - a.y()) * (c.x() - a.x()) / (c.y() - a.y()))
      in = !in;
  }
  return in;
}

// Resamples a piece from its curve, with extra samples next to both ends,
// and blends the end offsets in so the polyline meets its nodes exactly.
// Vertices can sit off the curve ends by up to the edge tolerance.
void conform(Piece& pc, const Surface& s, const FaceDomain& d) {
  if (pc.kind == Piece::Kind::pole) return;
  const Curve& c = pc.curve;
  const std::size_t n = std::max<std::size_t>(pc.uv.size(), 3);
  std::vector<double> fracs{0.0, 1e-4};
  for (std::size_t i = 1; i + 1 < n; ++i) fracs.push_back(static_cast<double>(i) / static_cast<double>(n - 1));
  fracs.push_back(1.0 - 1e-4);
  fracs.push_back(1.0);
  std::vector<Point2> raw;
  Point2 hint = pc.uv.front();
  for (double f : fracs) {
    hint = uv_near(s, d, eval_curve(c, c.t_start() + f * (c.t_end() - c.t_start())), hint);
    raw.push_back(hint);
  }
  const Point2 d0 = pc.uv.front() - raw.front(), d1 = pc.uv.back() - raw.back();
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] += (1.0 - fracs[i]) * d0 + fracs[i] * d1;
  pc.uv = std::move(raw);
}

std::vector<Point2> from_end(const std::vector<Point2>& uv, bool forward) {
  return forward ? uv : std::vector<Point2>(uv.rbegin(), uv.rend());
}

// Where the polyline first leaves the disk of radius r around its start.
Point2 at_radius(const std::vector<Point2>& uv, double r) {
  const Point2& o = uv.front();
  for (std::size_t k = 1; k < uv.size(); ++k) {
    const double d1 = (uv[k] - o).norm();
    if (d1 < r) continue;
    const double d0 = (uv[k - 1] - o).norm();
    const double s = d1 > d0 ? (r - d0) / (d1 - d0) : 1.0;
    return uv[k - 1] + s * (uv[k] - uv[k - 1]);
  }
  return uv.back();
}

double reach(const std::vector<Point2>& uv) {
  double r = 0;
  for (const auto& q : uv) r = std::max(r, (q - uv.front()).norm());
  return r;
}

}  // namespace

FaceSplit arrange(const Body& b, int face_id, std::vector<Piece> pieces) {
  const Surface& s = b.face(face_id).surface;
  const FaceDomain& d = *b.domain(face_id);
  FaceSplit out;
  std::vector<Point2> nodes;
  auto node_of = [&](const Point2& uv) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if ((nodes[i] - uv).norm() <= kSameUv) return static_cast<int>(i);
    nodes.push_back(uv);
    return static_cast<int>(nodes.size() - 1);
  };
  std::vector<std::array<int, 2>> ends;
  for (auto& pc : pieces) {
    const int a = node_of(pc.uv.front()), b = node_of(pc.uv.back());
    // snap the polyline ends onto the shared node positions
    pc.uv.front() = nodes[a];
    pc.uv.back() = nodes[b];
    conform(pc, s, d);
    if (a == b && (pc.uv.size() <= 2 || signed_area(pc.uv) == 0)) continue;  // degenerate loop
    out.pieces.push_back(pc);
    ends.push_back({a, b});
  }
  const std::size_t np = out.pieces.size();
  std::vector<int> degree(nodes.size(), 0);
  for (const auto& e : ends) {
    ++degree[e[0]];
    ++degree[e[1]];
  }
  for (std::size_t i = 0; i < np; ++i)
    for (int k : {0, 1})
      if (degree[ends[i][k]] < 2)
        throw ImprintError(face_id, "open imprint region on face " + std::to_string(face_id));

  // half-edge h = 2 * piece + (0 forward, 1 backward)
  auto origin = [&](int h) { return ends[h / 2][h % 2]; };
  std::vector<std::vector<int>> around(nodes.size());
  for (int h = 0; h < static_cast<int>(2 * np); ++h) around[origin(h)].push_back(h);
  // Half-edges around a node are compared where they cross a common circle,
  // which keeps the order of non-crossing pieces at any radius. Nearly
  // coincident pieces with the same far end go by the sign of the area
  // between them, so both ends agree; exact duplicates by a mirrored key.
  std::vector<std::vector<Point2>> outgoing(2 * np);
  for (int h = 0; h < static_cast<int>(2 * np); ++h) outgoing[h] = from_end(out.pieces[h / 2].uv, h % 2 == 0);
  const auto before = [&](int x, int y) {
    const auto& px = outgoing[x];
    const auto& py = outgoing[y];
    const Point2& o = px.front();
    const double r = 0.5 * std::min(reach(px), reach(py));
    const Point2 qx = at_radius(px, r) - o, qy = at_radius(py, r) - o;
    const double ax = std::atan2(qx.y(), qx.x()), ay = std::atan2(qy.y(), qy.x());
    if (std::abs(ax - ay) > 1e-3 || origin(x ^ 1) != origin(y ^ 1)) {
      if (ax != ay) return ax < ay;
    } else {
      std::vector<Point2> ring(px.begin(), px.end() - 1);
      ring.insert(ring.end(), outgoing[y ^ 1].begin(), outgoing[y ^ 1].end() - 1);
      const double area = signed_area(ring);
      if (area != 0) return area > 0;
    }
    const auto key = [&](int h) { return origin(h) < origin(h ^ 1) ? h / 2 : -(h / 2); };
    return key(x) < key(y);
  };
  for (auto& list : around)
    for (std::size_t i = 1; i < list.size(); ++i)
      for (std::size_t j = i; j > 0 && before(list[j], list[j - 1]); --j) std::swap(list[j], list[j - 1]);
  auto next = [&](int h) {
    const int twin = h ^ 1;
    const auto& list = around[origin(twin)];
    const auto it = std::find(list.begin(), list.end(), twin);
    const std::size_t i = static_cast<std::size_t>(it - list.begin());
    return list[(i + list.size() - 1) % list.size()];
  };

  struct Cycle {
    std::vector<std::pair<int, bool>> steps;
    std::vector<Point2> poly;
    double area;
  };
  std::vector<Cycle> cycles;
  std::vector<bool> seen(2 * np, false);
  for (int h0 = 0; h0 < static_cast<int>(2 * np); ++h0) {
    if (seen[h0]) continue;
    Cycle c;
    for (int h = h0; !seen[h]; h = next(h)) {
      seen[h] = true;
      const bool fwd = h % 2 == 0;
      c.steps.emplace_back(h / 2, fwd);
      const auto& uv = out.pieces[h / 2].uv;
      if (fwd) c.poly.insert(c.poly.end(), uv.begin(), uv.end() - 1);
      else c.poly.insert(c.poly.end(), uv.rbegin(), uv.rend() - 1);
    }
    c.area = signed_area(c.poly);
    cycles.push_back(std::move(c));
  }

  std::vector<int> outer;
  for (std::size_t i = 0; i < cycles.size(); ++i)
    if (cycles[i].area > 0) {
      outer.push_back(static_cast<int>(i));
      out.regions.push_back({{cycles[i].steps}, {cycles[i].poly}});
    }
  // holes go to the smallest enclosing region they share no piece with
  for (const auto& c : cycles) {
    if (c.area > 0) continue;
    std::vector<int> mine;
    for (const auto& st : c.steps) mine.push_back(st.first);
    std::sort(mine.begin(), mine.end());
    const auto& pc = out.pieces[c.steps.front().first];
    const Point2 probe = pc.uv[pc.uv.size() / 2] * 0.5 + pc.uv[(pc.uv.size() - 1) / 2] * 0.5;
    int best = -1;
    for (std::size_t r = 0; r < outer.size(); ++r) {
      const Cycle& o = cycles[outer[r]];
      const bool touches = std::any_of(o.steps.begin(), o.steps.end(), [&](const auto& st) {
        return std::binary_search(mine.begin(), mine.end(), st.first);
      });
      if (touches || !contains(o.poly, probe)) continue;
      if (best < 0 || o.area < cycles[outer[best]].area) best = static_cast<int>(r);
    }
    if (best >= 0) {
      out.regions[best].cycles.push_back(c.steps);
      out.regions[best].polygons.push_back(c.poly);
    }
  }
  return out;
}

}  // namespace brepair::detail
