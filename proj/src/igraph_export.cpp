#include "brepair/igraph.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace brepair {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string point_label(const Point3& p) {
  return "(" + num(p.x()) + "," + num(p.y()) + "," + num(p.z()) + ")";
}

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"};

}  // namespace

std::string to_dot(const IntersectionGraph& g) {
  std::ostringstream os;
  os << "graph intersection {\n";
  for (const auto& [id, v] : g.vertices())
    os << "  v" << id << " [label=\"v" << id << "@" << point_label(v.position) << "\"];\n";
  for (const auto& [id, e] : g.edges())
    os << "  v" << e.start_vertex << " -- v" << e.end_vertex << " [label=\"e" << id
       << "\", src_faces=\"" << e.source_faces.first << "," << e.source_faces.second
       << "\", tol=\"" << num(e.tolerance) << "\", length=\"" << num(curve_length(e.curve))
       << "\"];\n";
  os << "}\n";
  return os.str();
}

std::string to_json(const IntersectionGraph& g) {
  using nlohmann::json;
  json vs = json::array(), es = json::array();
  for (const auto& [id, v] : g.vertices()) {
    json ring = json::array();
    for (const auto& r : v.ring) ring.push_back({{"edge", r.edge}, {"end", r.at_end ? "end" : "start"}});
    vs.push_back({{"id", id},
                  {"position", {v.position.x(), v.position.y(), v.position.z()}},
                  {"tolerance", v.tolerance},
                  {"isolated_point", v.isolated_point},
                  {"ring", ring}});
  }
  for (const auto& [id, e] : g.edges())
    es.push_back({{"id", id},
                  {"start_vertex", e.start_vertex},
                  {"end_vertex", e.end_vertex},
                  {"source_faces", {e.source_faces.first, e.source_faces.second}},
                  {"origin_body_pair", {e.origin_body_pair.first, e.origin_body_pair.second}},
                  {"tolerance", e.tolerance},
                  {"curve_kind", to_string(e.curve.kind())},
                  {"length", curve_length(e.curve)}});
  return json{{"vertices", vs}, {"edges", es}}.dump(2);
}

std::string to_svg(const IntersectionGraph& g, const Vec3& view) {
  const Frame f = Frame::from_axis(Point3::Zero(), view.normalized(),
                                   std::abs(view.normalized().x()) < 0.9 ? Vec3::UnitX()
                                                                          : Vec3::UnitY());
  struct Path {
    std::vector<Point2> pts;
    int colour;
  };
  std::vector<Path> paths;
  std::vector<std::pair<Point2, int>> dots;
  const auto comps = g.connectivity();
  std::map<int, int> colour_of;
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (int e : comps[c].edges) colour_of[e] = static_cast<int>(c);
  auto project = [&](const Point3& p) {
    const Vec3 l = f.to_local(p);
    return Point2(l.x(), -l.y());
  };
  for (const auto& [id, e] : g.edges()) {
    Path path{{}, colour_of[id]};
    for (double t : sample_params(e.curve, 64)) path.pts.push_back(project(eval_curve(e.curve, t)));
    paths.push_back(std::move(path));
  }
  for (const auto& [id, v] : g.vertices())
    dots.emplace_back(project(v.position), v.ring.empty() ? -1 : colour_of[v.ring.front().edge]);
  Eigen::AlignedBox2d box;
  for (const auto& p : paths)
    for (const auto& q : p.pts) box.extend(q);
  for (const auto& d : dots) box.extend(d.first);
  if (box.isEmpty()) box.extend(Point2(0, 0));
  const double span = std::max(box.sizes().maxCoeff(), 1e-9);
  const double scale = 560.0 / span;
  auto px = [&](const Point2& q) {
    const Point2 r = (q - box.min()) * scale + Point2(20, 20);
    return num(r.x()) + "," + num(r.y());
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"620\">\n";
  for (const auto& p : paths) {
    os << "  <polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << kPalette[p.colour % 10]
       << "\" points=\"";
    for (const auto& q : p.pts) os << px(q) << ' ';
    os << "\"/>\n";
  }
  // edges too short to see at this scale are listed by length
  Eigen::AlignedBox3d extent;
  for (const auto& [id, v] : g.vertices()) extent.extend(v.position);
  int line = 0;
  for (const auto& [id, e] : g.edges()) {
    const double len = curve_length(e.curve);
    if (len >= 0.05 * extent.diagonal().norm()) continue;
    os << "  <text class=\"short-edge\" x=\"20\" y=\"" << 590 - 14 * line++
       << "\" font-size=\"11\">short edge e" << id << " length " << num(len) << "</text>\n";
  }
  for (const auto& [q, c] : dots)
    os << "  <circle r=\"3\" fill=\"" << (c < 0 ? "#000000" : kPalette[c % 10]) << "\" cx=\""
       << num((q - box.min()).x() * scale + 20) << "\" cy=\""
       << num((q - box.min()).y() * scale + 20) << "\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace brepair
