#include "brepair/model_json.hpp"

#include "util.hpp"
#include "json.hpp"

namespace brepair {

using nlohmann::json;

namespace {

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
Vec3 vec(const json& j) { return Vec3(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()); }

json points(const std::vector<Point3>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back(vec(p));
  return a;
}
std::vector<Point3> points(const json& j) {
  std::vector<Point3> out;
  for (const auto& p : j) out.push_back(vec(p));
  return out;
}

json frame(const Frame& f) { return {{"origin", vec(f.origin)}, {"x", vec(f.x)}, {"y", vec(f.y)}, {"z", vec(f.z)}}; }
Frame frame(const json& j) {
  Frame f;
  f.origin = vec(j.at("origin"));
  f.x = vec(j.at("x"));
  f.y = vec(j.at("y"));
  f.z = vec(j.at("z"));
  return f;
}

json curve(const Curve& c) {
  json j = std::visit(
      Overloaded{
          [](const curves::Line& g) -> json {
            return {{"kind", "line"}, {"origin", vec(g.origin)}, {"direction", vec(g.direction)}};
          },
          [](const curves::Circle& g) -> json {
            return {{"kind", "circle"}, {"frame", frame(g.frame)}, {"radius", g.radius}};
          },
          [](const curves::Ellipse& g) -> json {
            return {{"kind", "ellipse"}, {"frame", frame(g.frame)}, {"major", g.major}, {"minor", g.minor}};
          },
          [](const curves::Polyline& g) -> json {
            return {{"kind", "polyline"}, {"points", points(g.points)}, {"tangents", points(g.tangents)},
                    {"params", g.params}, {"closed", g.closed}};
          },
          [](const curves::BSpline& g) -> json {
            return {{"kind", "bspline"}, {"degree", g.degree}, {"knots", g.knots}, {"control", points(g.control)}};
          }},
      c.geometry());
  j["range"] = {c.t_start(), c.t_end()};
  j["fitting_error"] = c.fitting_error();
  return j;
}

Curve curve(const json& j) {
  const std::string kind = j.at("kind");
  Curve::Geometry g;
  if (kind == "line") g = curves::Line{vec(j.at("origin")), vec(j.at("direction"))};
  else if (kind == "circle") g = curves::Circle{frame(j.at("frame")), j.at("radius").get<double>()};
  else if (kind == "ellipse")
    g = curves::Ellipse{frame(j.at("frame")), j.at("major").get<double>(), j.at("minor").get<double>()};
  else if (kind == "polyline")
    g = curves::Polyline{points(j.at("points")), points(j.at("tangents")),
                         j.at("params").get<std::vector<double>>(), j.at("closed").get<bool>()};
  else if (kind == "bspline")
    g = curves::BSpline{j.at("degree").get<int>(), j.at("knots").get<std::vector<double>>(),
                        points(j.at("control"))};
  else throw GeometryError("unknown curve kind: " + kind);
  return Curve(g, j.at("range").at(0).get<double>(), j.at("range").at(1).get<double>(),
               j.value("fitting_error", 0.0));
}

json surface(const Surface& s) {
  json j = std::visit(
      Overloaded{
          [](const surfaces::Plane& g) -> json { return {{"kind", "plane"}, {"frame", frame(g.frame)}}; },
          [](const surfaces::Cylinder& g) -> json {
            return {{"kind", "cylinder"}, {"frame", frame(g.frame)}, {"radius", g.radius}};
          },
          [](const surfaces::Cone& g) -> json {
            return {{"kind", "cone"}, {"frame", frame(g.frame)}, {"radius", g.radius}, {"half_angle", g.half_angle}};
          },
          [](const surfaces::Sphere& g) -> json {
            return {{"kind", "sphere"}, {"frame", frame(g.frame)}, {"radius", g.radius}};
          },
          [](const surfaces::Torus& g) -> json {
            return {{"kind", "torus"}, {"frame", frame(g.frame)}, {"major", g.major}, {"minor", g.minor}};
          },
          [](const surfaces::BSpline& g) -> json {
            return {{"kind", "bspline"}, {"degree_u", g.degree_u}, {"degree_v", g.degree_v},
                    {"knots_u", g.knots_u}, {"knots_v", g.knots_v}, {"count_u", g.count_u},
                    {"count_v", g.count_v}, {"control", points(g.control)}};
          }},
      s.geometry());
  j["fitting_error"] = s.fitting_error();
  return j;
}

Surface surface(const json& j) {
  const std::string kind = j.at("kind");
  Surface::Geometry g;
  if (kind == "plane") g = surfaces::Plane{frame(j.at("frame"))};
  else if (kind == "cylinder") g = surfaces::Cylinder{frame(j.at("frame")), j.at("radius").get<double>()};
  else if (kind == "cone")
    g = surfaces::Cone{frame(j.at("frame")), j.at("radius").get<double>(), j.at("half_angle").get<double>()};
  else if (kind == "sphere") g = surfaces::Sphere{frame(j.at("frame")), j.at("radius").get<double>()};
  else if (kind == "torus")
    g = surfaces::Torus{frame(j.at("frame")), j.at("major").get<double>(), j.at("minor").get<double>()};
  else if (kind == "bspline")
    g = surfaces::BSpline{j.at("degree_u").get<int>(), j.at("degree_v").get<int>(),
                          j.at("knots_u").get<std::vector<double>>(), j.at("knots_v").get<std::vector<double>>(),
                          j.at("count_u").get<int>(), j.at("count_v").get<int>(), points(j.at("control"))};
  else throw GeometryError("unknown surface kind: " + kind);
  return Surface(g, j.value("fitting_error", 0.0));
}

const char* seam_name(SeamKind s) {
  return s == SeamKind::u_seam ? "u" : s == SeamKind::v_seam ? "v" : "none";
}
SeamKind seam_from(const std::string& s) {
  return s == "u" ? SeamKind::u_seam : s == "v" ? SeamKind::v_seam : SeamKind::none;
}

json body(const Body& b) {
  json faces = json::array(), edges = json::array(), vertices = json::array();
  for (const auto& [id, v] : b.vertices())
    vertices.push_back({{"id", id}, {"position", vec(v.position)}, {"tolerance", v.local_tolerance}});
  for (const auto& [id, e] : b.edges())
    edges.push_back({{"id", id}, {"curve", curve(e.curve)}, {"vertices", {e.start_vertex, e.end_vertex}},
                     {"reversed", e.reversed}, {"seam", seam_name(e.seam)}});
  for (const auto& [id, f] : b.faces()) {
    json loops = json::array();
    for (const Loop& l : f.loops) {
      json uses = json::array();
      for (const Coedge& c : l.coedges) {
        json u = {{"edge", c.edge}, {"sense", c.forward ? 1 : -1}};
        if (c.seam_side) u["seam_side"] = c.seam_side;
        uses.push_back(u);
      }
      loops.push_back(uses);
    }
    json jf = {{"id", id}, {"surface", surface(f.surface)}, {"loops", loops}, {"reversed", f.reversed}};
    if (!f.param_loops.empty()) {
      json pl = json::array();
      for (const auto& poly : f.param_loops) {
        json a = json::array();
        for (const auto& q : poly) a.push_back({q.x(), q.y()});
        pl.push_back(a);
      }
      jf["param_loops"] = pl;
    }
    faces.push_back(jf);
  }
  return {{"id", b.id()}, {"faces", faces}, {"edges", edges}, {"vertices", vertices}};
}

Body body(const json& j) {
  Body b(j.value("id", 0));
  for (const auto& v : j.at("vertices"))
    b.insert(Vertex{v.at("id"), vec(v.at("position")), v.value("tolerance", 0.0)});
  for (const auto& e : j.at("edges"))
    b.insert(Edge{e.at("id"), curve(e.at("curve")), e.at("vertices").at(0), e.at("vertices").at(1),
                  e.value("reversed", false), seam_from(e.value("seam", "none"))});
  for (const auto& f : j.at("faces")) {
    Face face;
    face.id = f.at("id");
    face.surface = surface(f.at("surface"));
    face.reversed = f.value("reversed", false);
    for (const auto& l : f.at("loops")) {
      Loop loop;
      for (const auto& u : l)
        loop.coedges.push_back({u.at("edge").get<int>(), u.at("sense").get<int>() > 0, u.value("seam_side", 0)});
      face.loops.push_back(loop);
    }
    if (f.contains("param_loops"))
      for (const auto& poly : f.at("param_loops")) {
        std::vector<Point2> pts;
        for (const auto& q : poly) pts.emplace_back(q.at(0).get<double>(), q.at(1).get<double>());
        face.param_loops.push_back(pts);
      }
    b.insert(face);
  }
  return b;
}

}  // namespace

std::string model_to_json(const std::vector<const Body*>& bodies) {
  json a = json::array();
  for (const Body* b : bodies) a.push_back(body(*b));
  return json{{"bodies", a}}.dump(1);
}

std::vector<Body> model_from_json(const std::string& text) {
  std::vector<Body> out;
  const json j = json::parse(text);
  for (const auto& b : j.at("bodies")) out.push_back(body(b));
  return out;
}

std::string primitive_to_json(const PrimitiveSpec& s) {
  return json{{"kind", to_string(s.kind)}, {"frame", frame(s.frame)}, {"dims", s.dims}, {"sides", s.sides}}.dump();
}

PrimitiveSpec primitive_from_json(const std::string& text) {
  const json j = json::parse(text);
  PrimitiveSpec s;
  s.kind = primitive_kind_from_string(j.at("kind"));
  if (j.contains("frame")) s.frame = frame(j.at("frame"));
  s.dims = j.at("dims").get<std::vector<double>>();
  s.sides = j.value("sides", 6);
  return s;
}

}  // namespace brepair
