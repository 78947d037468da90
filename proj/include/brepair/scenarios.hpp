#pragma once

#include "brepair/boolean.hpp"
#include "brepair/intersect.hpp"
#include "brepair/primitives.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace brepair {

/// A machine-checkable claim about a run report metric, e.g.
/// {"repaired.edges", "==", 12}.
struct Expectation {
  std::string key;
  std::string op;
  double value = 0.0;
};

struct Scenario {
  std::string name;
  std::string description;
  PrimitiveSpec body_a;
  PrimitiveSpec body_b;
  BooleanOp op = BooleanOp::unite;
  PerturbationSpec perturbation;
  double t0 = 1e-6;
  std::vector<Expectation> expected;
};

/// Bodies with disjoint id ranges (a from 1, b from 10001).
std::pair<Body, Body> build_scenario_bodies(const Scenario& s);

Scenario scenario_ex1();
Scenario scenario_ex2();
Scenario scenario_ex3();
Scenario scenario_ex4();

/// Built-in scenario by name, or nothing.
std::optional<Scenario> find_scenario(const std::string& name);
std::vector<std::string> scenario_names();

/// Same scenario with all jitter removed.
Scenario unperturbed(Scenario s);

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& s);

/// nullopt when the metric is absent from the report (expectation skipped).
std::optional<bool> check_expectation(const Expectation& e,
                                      const std::map<std::string, double>& metrics);

enum class RunMode { both, repair_only, no_repair };

struct ScenarioRun {
  std::optional<PipelineRun> unrepaired;
  std::optional<PipelineRun> repaired;
  /// Flat metrics keyed "unrepaired.<name>" / "repaired.<name>".
  std::map<std::string, double> metrics;
  double seconds = 0.0;
};

/// Runs the pipeline once per requested mode and collects metrics.
ScenarioRun run_scenario(const Scenario& s, RunMode mode = RunMode::both);

/// Metrics of one pipeline run: graph.*, repairs.*, imprint.*, result.*.
std::map<std::string, double> run_metrics(const PipelineRun& r);

}  // namespace brepair
