#include "brepair/primitives.hpp"

#include <cmath>
#include <map>

namespace brepair {

std::string to_string(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::box: return "box";
    case PrimitiveKind::regular_prism: return "regular_prism";
    case PrimitiveKind::cylinder: return "cylinder";
    case PrimitiveKind::cone: return "cone";
    case PrimitiveKind::torus: return "torus";
    case PrimitiveKind::sphere: return "sphere";
  }
  return "?";
}

PrimitiveKind primitive_kind_from_string(const std::string& s) {
  for (auto k : {PrimitiveKind::box, PrimitiveKind::regular_prism, PrimitiveKind::cylinder,
                 PrimitiveKind::cone, PrimitiveKind::torus, PrimitiveKind::sphere})
    if (to_string(k) == s) return k;
  throw GeometryError("unknown primitive kind: " + s);
}

Body make_polyhedron(const std::vector<Point3>& points,
                     const std::vector<std::vector<int>>& faces, int body_id,
                     int id_base) {
  Body b(body_id, id_base);
  std::vector<int> vid;
  for (const auto& p : points) vid.push_back(b.add_vertex(p));
  std::map<std::pair<int, int>, int> edge_of;
  for (const auto& ring : faces) {
    Loop loop;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const int a = ring[i], c = ring[(i + 1) % n];
      const auto key = std::minmax(a, c);
      auto it = edge_of.find(key);
      if (it == edge_of.end())
        it = edge_of.emplace(key, b.add_edge(Curve::segment(points[a], points[c]),
                                             vid[a], vid[c])).first;
      loop.coedges.push_back({it->second, b.edge(it->second).start_vertex == vid[a], 0});
    }
    const Point3& o = points[ring[0]];
    Vec3 normal = Vec3::Zero();
    for (std::size_t i = 0; i < n; ++i)
      normal += (points[ring[i]] - o).cross(points[ring[(i + 1) % n]] - o);
    Frame f = Frame::from_axis(o, normal.normalized(), points[ring[1]] - o);
    b.add_face(Surface::plane(f), {loop});
  }
  return b;
}

namespace {

void require_dims(const PrimitiveSpec& s, std::size_t n) {
  if (s.dims.size() < n) throw GeometryError("invalid dimensions for " + to_string(s.kind));
  for (std::size_t i = 0; i < n; ++i)
    if (!(s.dims[i] > 0)) throw GeometryError("invalid dimensions for " + to_string(s.kind));
}

Frame shifted(const Frame& f, const Vec3& offset, bool flip) {
  Frame g = f;
  g.origin += offset;
  if (flip) {
    g.y = -g.y;
    g.z = -g.z;
  }
  return g;
}

Body make_box(const PrimitiveSpec& s, int body_id, int id_base) {
  require_dims(s, 3);
  const double dx = s.dims[0], dy = s.dims[1], dz = s.dims[2];
  std::vector<Point3> p;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i)
        p.push_back(s.frame.to_world(Vec3(i * dx, j * dy, k * dz)));
  // index = i + 2 j + 4 k
  return make_polyhedron(p,
                         {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                          {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}},
                         body_id, id_base);
}

Body make_prism(const PrimitiveSpec& s, int body_id, int id_base) {
  require_dims(s, 2);
  if (s.sides < 3) throw GeometryError("invalid dimensions for regular_prism");
  const int n = s.sides;
  const double r = s.dims[0], h = s.dims[1];
  std::vector<Point3> p;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < n; ++i) {
      const double a = kTwoPi * i / n;
      p.push_back(s.frame.to_world(Vec3(r * std::cos(a), r * std::sin(a), (k - 0.5) * h)));
    }
  std::vector<std::vector<int>> faces;
  std::vector<int> bottom, top;
  for (int i = 0; i < n; ++i) {
    bottom.push_back(n - 1 - i);
    top.push_back(n + i);
    faces.push_back({i, (i + 1) % n, n + (i + 1) % n, n + i});
  }
  faces.push_back(bottom);
  faces.push_back(top);
  return make_polyhedron(p, faces, body_id, id_base);
}

Body make_cylinder(const PrimitiveSpec& s, int body_id, int id_base) {
  require_dims(s, 2);
  const double r = s.dims[0], h = s.dims[1];
  const Frame& f = s.frame;
  Body b(body_id, id_base);
  const int vb = b.add_vertex(f.to_world(Vec3(r, 0, 0)));
  const int vt = b.add_vertex(f.to_world(Vec3(r, 0, h)));
  const int eb = b.add_edge(Curve::circle(f, r), vb, vb);
  const int et = b.add_edge(Curve::circle(shifted(f, h * f.z, false), r), vt, vt);
  const int es = b.add_edge(Curve::segment(b.vertex(vb).position, b.vertex(vt).position),
                            vb, vt, false, SeamKind::u_seam);
  b.add_face(Surface::cylinder(f, r),
             {Loop{{{eb, true, 0}, {es, true, 1}, {et, false, 0}, {es, false, -1}}}});
  b.add_face(Surface::plane(shifted(f, Vec3::Zero(), true)), {Loop{{{eb, false, 0}}}});
  b.add_face(Surface::plane(shifted(f, h * f.z, false)), {Loop{{{et, true, 0}}}});
  return b;
}

Body make_cone(const PrimitiveSpec& s, int body_id, int id_base) {
  require_dims(s, 2);
  const double r = s.dims[0], h = s.dims[1];
  const Frame& f = s.frame;
  Body b(body_id, id_base);
  const int vb = b.add_vertex(f.to_world(Vec3(r, 0, 0)));
  const int va = b.add_vertex(f.to_world(Vec3(0, 0, h)));
  const int eb = b.add_edge(Curve::circle(f, r), vb, vb);
  const int es = b.add_edge(Curve::segment(b.vertex(vb).position, b.vertex(va).position),
                            vb, va, false, SeamKind::u_seam);
  b.add_face(Surface::cone(f, r, std::atan2(r, h)),
             {Loop{{{eb, true, 0}, {es, true, 1}, {es, false, -1}}}});
  b.add_face(Surface::plane(shifted(f, Vec3::Zero(), true)), {Loop{{{eb, false, 0}}}});
  return b;
}

Body make_torus(const PrimitiveSpec& s, int body_id, int id_base) {
  require_dims(s, 2);
  const double R = s.dims[0], r = s.dims[1];
  const Frame& f = s.frame;
  const Surface surf = Surface::torus(f, R, r);
  Body b(body_id, id_base);
  const int v = b.add_vertex(f.to_world(Vec3(R + r, 0, 0)));
  Frame meridian{f.origin + R * f.x, f.x, f.z, -f.y};
  const int em = b.add_edge(Curve::circle(meridian, r), v, v, false, SeamKind::u_seam);
  const int el = b.add_edge(Curve::circle(f, R + r), v, v, false, SeamKind::v_seam);
  b.add_face(surf, {Loop{{{el, true, -1}, {em, true, 1}, {el, false, 1}, {em, false, -1}}}});
  return b;
}

Body make_sphere(const PrimitiveSpec& s, int body_id, int id_base) {
  require_dims(s, 1);
  const double r = s.dims[0];
  const Frame& f = s.frame;
  Body b(body_id, id_base);
  const int vs = b.add_vertex(f.to_world(Vec3(0, 0, -r)));
  const int vn = b.add_vertex(f.to_world(Vec3(0, 0, r)));
  Frame meridian{f.origin, f.x, f.z, -f.y};
  const int e = b.add_edge(Curve::circle(meridian, r, -kPi / 2, kPi / 2), vs, vn, false,
                           SeamKind::u_seam);
  b.add_face(Surface::sphere(f, r), {Loop{{{e, true, -1}, {e, false, 1}}}});
  return b;
}

}  // namespace

Body build_primitive(const PrimitiveSpec& spec, int body_id, int id_base) {
  switch (spec.kind) {
    case PrimitiveKind::box: return make_box(spec, body_id, id_base);
    case PrimitiveKind::regular_prism: return make_prism(spec, body_id, id_base);
    case PrimitiveKind::cylinder: return make_cylinder(spec, body_id, id_base);
    case PrimitiveKind::cone: return make_cone(spec, body_id, id_base);
    case PrimitiveKind::torus: return make_torus(spec, body_id, id_base);
    case PrimitiveKind::sphere: return make_sphere(spec, body_id, id_base);
  }
  throw GeometryError("unknown primitive kind");
}

}  // namespace brepair
