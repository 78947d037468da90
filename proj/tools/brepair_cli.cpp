// Batch driver: runs scenarios through the boolean pipeline with and without
// graph repair and writes reports, graph exports and result models.

#include "brepair/model_json.hpp"
#include "brepair/scenarios.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace brepair;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::optional<double> t0;
  std::optional<std::uint64_t> seed;
  std::string config;
  bool no_repair = false;
  bool repair_only = false;
  std::string out = "out";
  std::vector<std::string> formats;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text, std::vector<std::string>& written) {
  std::ofstream out(path);
  if (!out || !(out << text)) throw std::runtime_error("cannot write " + path.string());
  written.push_back(path.string());
}

// A built-in name, or a scenario JSON file. Flags override the file.
Scenario resolve(const Options& o) {
  std::optional<Scenario> s = find_scenario(o.input);
  if (!s) {
    if (!fs::exists(o.input)) throw UsageError("unknown scenario: " + o.input);
    try {
      s = scenario_from_json(read_file(o.input));
    } catch (const std::exception& e) {
      throw UsageError(o.input + ": " + e.what());
    }
  }
  if (!o.config.empty()) {
    const json cfg = json::parse(read_file(o.config));
    if (cfg.contains("global_tolerance")) s->t0 = cfg.at("global_tolerance").get<double>();
  }
  if (o.t0) s->t0 = *o.t0;
  if (o.seed) s->perturbation.seed = *o.seed;
  if (!(s->t0 > 0)) throw UsageError("t0 must be positive");
  return *s;
}

json points(const std::vector<Point3>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back({p.x(), p.y(), p.z()});
  return a;
}

json defect_json(const DefectRecord& r) {
  json criteria = json::array();
  for (const auto& c : r.criteria)
    criteria.push_back({{"index", c.index},
                        {"description", c.description},
                        {"passed", c.passed},
                        {"measured", c.measured},
                        {"tolerance", c.tolerance}});
  return {{"kind", to_string(r.kind)}, {"action", to_string(r.action)}, {"edges", r.edges},
          {"vertices", r.vertices},    {"faces", r.faces},                {"criteria", criteria},
          {"before", points(r.before)}, {"after", points(r.after)},       {"note", r.note}};
}

json run_json(const PipelineRun& r, const std::map<std::string, double>& metrics) {
  json defects = json::array();
  for (const auto& d : r.repairs) defects.push_back(defect_json(d));
  json j = {{"failed_stage", r.failed_stage}, {"error", r.error}, {"metrics", metrics},
            {"defects", defects}, {"graph", json::parse(to_json(r.graph))}};
  if (r.classification) {
    json sides = json::object();
    for (const auto& [id, s] : r.classification->side_a) sides[std::to_string(id)] = to_string(s);
    for (const auto& [id, s] : r.classification->side_b) sides[std::to_string(id)] = to_string(s);
    j["classification"] = {{"sides", sides}, {"ambiguous", r.classification->ambiguous}};
  }
  if (r.merge)
    j["merge"] = {{"non_manifold_edges", r.merge->non_manifold_edges},
                  {"open_edges", r.merge->open_edges}};
  return j;
}

// Metrics of one run without the mode prefix.
std::map<std::string, double> unprefixed(const std::map<std::string, double>& all, const std::string& prefix) {
  std::map<std::string, double> m;
  for (const auto& [k, v] : all)
    if (k.rfind(prefix, 0) == 0) m[k.substr(prefix.size())] = v;
  return m;
}

void print_summary(const std::string& label, const PipelineRun& r) {
  std::cout << label << ": graph " << r.graph.edges().size() << " edges, "
            << r.graph.component_count() << " components";
  if (!r.failed_stage.empty()) std::cout << ", FAILED in " << r.failed_stage << ": " << r.error;
  std::cout << "\n";
  if (r.repairs.empty()) return;
  std::map<std::string, std::pair<int, double>> table;
  for (const auto& d : r.repairs) {
    auto& [count, worst] = table[to_string(d.kind)];
    ++count;
    for (std::size_t i = 0; i < std::min(d.before.size(), d.after.size()); ++i)
      worst = std::max(worst, (d.after[i] - d.before[i]).norm());
  }
  std::printf("  %-18s %6s %16s\n", "kind", "count", "max correction");
  for (const auto& [kind, row] : table) std::printf("  %-18s %6d %16.3e\n", kind.c_str(), row.first, row.second);
}

bool wants(const Options& o, const std::string& fmt) {
  return o.formats.empty() || std::find(o.formats.begin(), o.formats.end(), fmt) != o.formats.end();
}

void export_graph(const Options& o, const fs::path& stem, const IntersectionGraph& g,
                  std::vector<std::string>& written) {
  if (wants(o, "dot")) write_file(stem.string() + ".dot", to_dot(g), written);
  if (wants(o, "svg")) write_file(stem.string() + ".svg", to_svg(g), written);
}

int cmd_run(const Options& o) {
  const Scenario s = resolve(o);
  const RunMode mode = o.no_repair ? RunMode::no_repair : o.repair_only ? RunMode::repair_only : RunMode::both;
  const ScenarioRun run = run_scenario(s, mode);
  const fs::path dir = fs::path(o.out) / s.name;
  fs::create_directories(dir);

  std::vector<std::string> written;
  json runs = json::object();
  const auto emit = [&](const std::string& label, const std::optional<PipelineRun>& r) {
    if (!r) return;
    print_summary(label, *r);
    runs[label] = run_json(*r, unprefixed(run.metrics, label + "."));
    if (label == "unrepaired") export_graph(o, dir / "graph_unrepaired", r->intersect.graph, written);
    else {
      export_graph(o, dir / "graph_before_repair", r->intersect.graph, written);
      export_graph(o, dir / "graph_repaired", r->graph, written);
    }
    if (r->merge && wants(o, "json"))
      write_file(dir / ("result_" + label + ".json"), model_to_json({&r->merge->body}), written);
  };
  emit("unrepaired", run.unrepaired);
  emit("repaired", run.repaired);

  // A run that fails is an error unless the scenario expects that outcome.
  std::set<std::string> failure_expected;
  json expectations = json::array();
  bool all_pass = true;
  for (const auto& e : s.expected) {
    const std::size_t dot = e.key.find('.');
    if (dot != std::string::npos && e.key.substr(dot + 1) == "failed") failure_expected.insert(e.key.substr(0, dot));
    const auto ok = check_expectation(e, run.metrics);
    const auto it = run.metrics.find(e.key);
    const std::string status = !ok ? "skipped" : *ok ? "pass" : "fail";
    all_pass = all_pass && ok.value_or(true);
    expectations.push_back({{"key", e.key}, {"op", e.op}, {"value", e.value},
                            {"actual", it == run.metrics.end() ? json() : json(it->second)},
                            {"status", status}});
    std::cout << "  [" << status << "] " << e.key << " " << e.op << " " << e.value;
    if (it != run.metrics.end()) std::cout << " (actual " << it->second << ")";
    std::cout << "\n";
  }
  std::string failed_stage;
  for (const auto& [label, r] : {std::pair{"unrepaired", &run.unrepaired}, std::pair{"repaired", &run.repaired}})
    if (*r && !(*r)->failed_stage.empty() && !failure_expected.count(label))
      failed_stage = std::string(label) + ":" + (*r)->failed_stage;
  const int code = !failed_stage.empty() || !all_pass ? 1 : 0;

  json report = {{"schema", 1},
                 {"scenario", s.name},
                 {"description", s.description},
                 {"op", to_string(s.op)},
                 {"t0", s.t0},
                 {"seed", s.perturbation.seed},
                 {"runs", runs},
                 {"expectations", expectations},
                 {"failed_stage", failed_stage},
                 {"exit_code", code},
                 {"seconds", run.seconds}};
  written.push_back((dir / "report.json").string());
  report["artifacts"] = written;
  std::vector<std::string> ignored;
  write_file(dir / "report.json", report.dump(2), ignored);
  std::cout << "report: " << (dir / "report.json").string() << "\n";
  if (!failed_stage.empty()) std::cerr << "pipeline failed in " << failed_stage << "\n";
  return code;
}

int cmd_graph(const Options& o) {
  std::pair<Body, Body> bodies{Body(1), Body(2)};
  Scenario s;
  if (find_scenario(o.input)) {
    s = resolve(o);
    bodies = build_scenario_bodies(s);
  } else {
    if (!fs::exists(o.input)) throw UsageError("unknown scenario or model: " + o.input);
    const json j = json::parse(read_file(o.input));
    if (j.contains("bodies")) {
      std::vector<Body> model = model_from_json(j.dump());
      if (model.size() != 2) throw UsageError("model file must hold exactly two bodies");
      bodies = {std::move(model[0]), std::move(model[1])};
      s.name = fs::path(o.input).stem().string();
      s.t0 = o.t0.value_or(1e-6);
    } else {
      s = resolve(o);
      bodies = build_scenario_bodies(s);
    }
  }
  const fs::path dir = fs::path(o.out) / s.name;
  fs::create_directories(dir);
  std::vector<std::string> written;
  const auto& [a, b] = bodies;
  if (!o.repair_only)
    export_graph(o, dir / "graph_unrepaired", stage_intersect(a, b, {s.t0, &s.perturbation, false}).graph,
                 written);
  if (!o.no_repair) {
    IntersectionGraph g = stage_intersect(a, b, {s.t0, &s.perturbation, true}).graph;
    repair_pass(g, BodySet{&a, &b}, {s.t0});
    export_graph(o, dir / "graph_repaired", g, written);
  }
  for (const auto& f : written) std::cout << f << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boolean pipeline with intersection graph repair"};
  app.require_subcommand(1);
  Options o;
  const auto common = [&o](CLI::App* c) {
    c->add_option("scenario", o.input, "Built-in scenario (ex1..ex4) or JSON file")->required();
    c->add_option("--t0", o.t0, "Global tolerance");
    c->add_option("--seed", o.seed, "Perturbation seed");
    c->add_option("--config", o.config, "JSON config file (key global_tolerance)");
    auto* nr = c->add_flag("--no-repair", o.no_repair, "Only the repair-disabled run");
    c->add_flag("--repair-only", o.repair_only, "Only the repaired run")->excludes(nr);
    c->add_option("--out", o.out, "Output directory");
    c->add_option("--format", o.formats, "Outputs to write: json, dot, svg (default all)")
        ->check(CLI::IsMember({"json", "dot", "svg"}));
  };
  CLI::App* run = app.add_subcommand("run", "Run a scenario and write its report");
  CLI::App* graph = app.add_subcommand("graph", "Export the intersection graph as DOT and SVG");
  CLI::App* list = app.add_subcommand("list", "List built-in scenarios");
  common(run);
  common(graph);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (list->parsed()) {
      for (const auto& n : scenario_names()) std::cout << n << "  " << find_scenario(n)->description << "\n";
      return 0;
    }
    return run->parsed() ? cmd_run(o) : cmd_graph(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
