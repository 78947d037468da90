#include "brepair/scenarios.hpp"

#include "brepair/model_json.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>

namespace brepair {

namespace {

constexpr int kIdBaseB = 10001;

PrimitiveSpec prism(const Point3& centre) {
  PrimitiveSpec s;
  s.kind = PrimitiveKind::regular_prism;
  s.frame.origin = centre;
  s.dims = {2.0, 1.0};
  s.sides = 6;
  return s;
}

PrimitiveSpec torus() {
  PrimitiveSpec s;
  s.kind = PrimitiveKind::torus;
  s.dims = {2.0, 0.5};
  return s;
}

}  // namespace

std::pair<Body, Body> build_scenario_bodies(const Scenario& s) {
  return {build_primitive(s.body_a, 1, 1), build_primitive(s.body_b, 2, kIdBaseB)};
}

Scenario scenario_ex1() {
  Scenario s;
  s.name = "ex1";
  s.description = "hexagonal prism and torus sharing centre and axis; prism vertices on the torus";
  s.body_a = prism(Point3::Zero());
  s.body_b = torus();
  s.op = BooleanOp::unite;
  s.perturbation.seed = 1;
  s.perturbation.param_jitter = 5e-6;
  s.expected = {{"unrepaired.graph.edges", ">", 12},
                {"unrepaired.failed", "==", 1},
                {"repaired.graph.edges", "==", 12},
                {"repaired.repairs.vertex_deviation", ">", 0},
                {"repaired.repairs.disconnection", "==", 0},
                {"repaired.repairs.short_edge", "==", 0},
                {"repaired.result.non_manifold_edges", "==", 0}};
  return s;
}

Scenario scenario_ex2() {
  Scenario s;
  s.name = "ex2";
  s.description = "prism moved outward so the torus tube passes through it";
  s.body_a = prism(Point3(1.0, 0, 0));
  s.body_b = torus();
  s.op = BooleanOp::subtract;
  s.perturbation.seed = 2;
  s.perturbation.vertex_jitter = 2e-5;
  s.perturbation.target = PerturbationSpec::Target::edge;
  // the tube-section pieces on the two side faces nearest the torus axis
  s.perturbation.edge_ids = {4, 5};
  s.expected = {{"unrepaired.graph.components", "==", 3},
                {"repaired.graph.components", "==", 1},
                {"repaired.repairs.disconnection", ">", 0},
                {"repaired.imprint.logical_faces_b", "==", 3},
                {"unrepaired.failed", "==", 1},
                {"repaired.result.faces_from_b", ">", 0}};
  return s;
}

Scenario scenario_ex3() {
  Scenario s;
  s.name = "ex3";
  s.description = "cylinder tilted about a bottom diameter against a cone on the same base";
  const double theta = 0.02;
  s.body_a.kind = PrimitiveKind::cylinder;
  s.body_a.frame = Frame::from_axis(Point3::Zero(), Vec3(0, -std::sin(theta), std::cos(theta)),
                                    Vec3::UnitX());
  s.body_a.dims = {1.0, 2.0};
  s.body_b.kind = PrimitiveKind::cone;
  s.body_b.dims = {1.0, 1.5};
  s.op = BooleanOp::subtract;
  s.perturbation.seed = 3;
  s.perturbation.vertex_jitter = 1.5e-6;
  // cylinder side against the cone's base disk, tangent at (+-1, 0, 0)
  s.perturbation.target = PerturbationSpec::Target::face_pair;
  s.perturbation.face_pair = {6, kIdBaseB + 5};
  s.expected = {{"repaired.repairs.short_edge", "==", 2},
                {"unrepaired.graph.edges", "==", 4},
                {"repaired.graph.edges", "==", 2},
                {"repaired.result.non_manifold_edges", "==", 0},
                {"unrepaired.result.non_manifold_edges", "==", 2}};
  return s;
}

Scenario scenario_ex4() {
  Scenario s;
  s.name = "ex4";
  s.description = "horizontal column sunk a shallow depth into a cylinder's top face";
  const double rc = 0.2, delta = 5e-4;
  s.body_a.kind = PrimitiveKind::cylinder;
  s.body_a.dims = {1.0, 1.0};
  s.body_b.kind = PrimitiveKind::cylinder;
  s.body_b.frame = Frame::from_axis(Point3(-1.5, 0, 1.0 + rc - delta), Vec3::UnitX(), Vec3::UnitY());
  s.body_b.dims = {rc, 3.0};
  s.op = BooleanOp::unite;
  s.expected = {{"repaired.repairs.total", "==", 0},
                {"repaired.graph.short_connected_edges", "==", 2},
                {"repaired.result.short_edges", ">=", 2},
                {"repaired.result.faces_from_b", ">", 0},
                {"repaired.result.non_manifold_edges", "==", 0}};
  return s;
}

std::vector<std::string> scenario_names() { return {"ex1", "ex2", "ex3", "ex4"}; }

std::optional<Scenario> find_scenario(const std::string& name) {
  if (name == "ex1") return scenario_ex1();
  if (name == "ex2") return scenario_ex2();
  if (name == "ex3") return scenario_ex3();
  if (name == "ex4") return scenario_ex4();
  return std::nullopt;
}

Scenario unperturbed(Scenario s) {
  s.perturbation.vertex_jitter = 0;
  s.perturbation.param_jitter = 0;
  return s;
}

std::optional<bool> check_expectation(const Expectation& e,
                                      const std::map<std::string, double>& metrics) {
  const auto it = metrics.find(e.key);
  if (it == metrics.end()) return std::nullopt;
  const double v = it->second;
  if (e.op == "==") return v == e.value;
  if (e.op == "!=") return v != e.value;
  if (e.op == "<") return v < e.value;
  if (e.op == "<=") return v <= e.value;
  if (e.op == ">") return v > e.value;
  if (e.op == ">=") return v >= e.value;
  throw std::invalid_argument("unknown expectation operator: " + e.op);
}

namespace {

using nlohmann::json;

const char* target_name(PerturbationSpec::Target t) {
  switch (t) {
    case PerturbationSpec::Target::all: return "all";
    case PerturbationSpec::Target::face_pair: return "face_pair";
    case PerturbationSpec::Target::edge: return "edge";
  }
  return "all";
}

PerturbationSpec::Target target_from(const std::string& s) {
  if (s == "face_pair") return PerturbationSpec::Target::face_pair;
  if (s == "edge") return PerturbationSpec::Target::edge;
  if (s == "all") return PerturbationSpec::Target::all;
  throw std::invalid_argument("unknown perturbation target: " + s);
}

Box3 graph_box(const IntersectionGraph& g) {
  Box3 box;
  for (const auto& [id, v] : g.vertices()) box.extend(v.position);
  return box;
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  const PerturbationSpec& p = s.perturbation;
  json expected = json::array();
  for (const auto& e : s.expected) expected.push_back({{"key", e.key}, {"op", e.op}, {"value", e.value}});
  json j = {{"name", s.name},
            {"description", s.description},
            {"op", to_string(s.op)},
            {"t0", s.t0},
            {"body_a", json::parse(primitive_to_json(s.body_a))},
            {"body_b", json::parse(primitive_to_json(s.body_b))},
            {"perturbation",
             {{"seed", p.seed},
              {"vertex_jitter", p.vertex_jitter},
              {"param_jitter", p.param_jitter},
              {"target", target_name(p.target)},
              {"face_pair", {p.face_pair.first, p.face_pair.second}},
              {"edge_ids", p.edge_ids}}},
            {"expected", expected}};
  return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
  const json j = json::parse(text);
  Scenario s;
  s.name = j.at("name");
  s.description = j.value("description", "");
  s.op = boolean_op_from_string(j.at("op"));
  s.t0 = j.value("t0", 1e-6);
  s.body_a = primitive_from_json(j.at("body_a").dump());
  s.body_b = primitive_from_json(j.at("body_b").dump());
  if (j.contains("perturbation")) {
    const json& p = j.at("perturbation");
    s.perturbation.seed = p.value("seed", std::uint64_t{0});
    s.perturbation.vertex_jitter = p.value("vertex_jitter", 0.0);
    s.perturbation.param_jitter = p.value("param_jitter", 0.0);
    s.perturbation.target = target_from(p.value("target", "all"));
    if (p.contains("face_pair"))
      s.perturbation.face_pair = {p.at("face_pair").at(0).get<int>(), p.at("face_pair").at(1).get<int>()};
    s.perturbation.edge_ids = p.value("edge_ids", std::vector<int>{});
  }
  if (j.contains("expected"))
    for (const auto& e : j.at("expected"))
      s.expected.push_back({e.at("key"), e.at("op"), e.at("value").get<double>()});
  return s;
}

std::map<std::string, double> run_metrics(const PipelineRun& r) {
  std::map<std::string, double> m;
  const IntersectionGraph& g = r.graph;
  m["failed"] = r.failed_stage.empty() ? 0 : 1;
  m["graph.edges_before_repair"] = static_cast<double>(r.intersect.graph.edges().size());
  m["graph.components_before_repair"] = r.intersect.graph.component_count();
  m["graph.edges"] = static_cast<double>(g.edges().size());
  m["graph.components"] = g.component_count();
  m["graph.isolated_points"] = static_cast<double>(g.isolated_points().size());
  // "short" is relative to the extent of the graph
  const double short_len = 0.05 * graph_box(g).diagonal().norm();
  int short_connected = 0;
  for (const auto& [id, e] : g.edges())
    if (curve_length(e.curve) < short_len && g.end_connection_state(id) == EndConnection::both_ends)
      ++short_connected;
  m["graph.short_connected_edges"] = short_connected;

  std::map<DefectKind, int> kinds;
  for (const auto& rec : r.repairs) ++kinds[rec.kind];
  m["repairs.total"] = static_cast<double>(r.repairs.size());
  m["repairs.vertex_deviation"] = kinds[DefectKind::vertex_deviation];
  m["repairs.disconnection"] = kinds[DefectKind::disconnection];
  m["repairs.short_edge"] = kinds[DefectKind::short_edge];
  if (!r.imprint) return m;

  m["imprint.faces_a"] = static_cast<double>(r.imprint->a.faces().size());
  m["imprint.faces_b"] = static_cast<double>(r.imprint->b.faces().size());
  m["imprint.logical_faces_a"] = logical_face_count(r.imprint->a);
  m["imprint.logical_faces_b"] = logical_face_count(r.imprint->b);
  if (!r.classification) return m;
  m["classify.ambiguous"] = static_cast<double>(r.classification->ambiguous.size());
  if (!r.merge) return m;

  const Body& body = r.merge->body;
  m["result.faces"] = static_cast<double>(body.faces().size());
  m["result.faces_from_a"] = static_cast<double>(r.classification->keep_a.size());
  m["result.faces_from_b"] = static_cast<double>(r.classification->keep_b.size());
  m["result.edges"] = static_cast<double>(body.edges().size());
  m["result.vertices"] = static_cast<double>(body.vertices().size());
  m["result.non_manifold_edges"] = static_cast<double>(r.merge->non_manifold_edges.size());
  m["result.open_edges"] = static_cast<double>(r.merge->open_edges.size());
  m["result.manifold"] = r.merge->non_manifold_edges.empty() && r.merge->open_edges.empty();
  m["result.euler"] = euler_characteristic(euler_counts(body));
  int short_edges = 0;
  for (const auto& [id, e] : body.edges())
    if (curve_length(e.curve) < short_len) ++short_edges;
  m["result.short_edges"] = short_edges;
  return m;
}

ScenarioRun run_scenario(const Scenario& s, RunMode mode) {
  ScenarioRun out;
  const auto [a, b] = build_scenario_bodies(s);
  const auto start = std::chrono::steady_clock::now();
  const auto record = [&](bool repair, std::optional<PipelineRun>& slot) {
    slot = run_pipeline(a, b, s.op, {s.t0, &s.perturbation, repair});
    const std::string prefix = repair ? "repaired." : "unrepaired.";
    for (const auto& [k, v] : run_metrics(*slot)) out.metrics[prefix + k] = v;
  };
  if (mode != RunMode::repair_only) record(false, out.unrepaired);
  if (mode != RunMode::no_repair) record(true, out.repaired);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace brepair
