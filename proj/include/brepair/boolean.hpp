#pragma once

#include "brepair/igraph.hpp"
#include "brepair/intersect.hpp"
#include "brepair/repair.hpp"
#include "brepair/topology.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace brepair {

enum class BooleanOp { unite, subtract, intersect };

std::string to_string(BooleanOp op);
BooleanOp boolean_op_from_string(const std::string& s);

struct IntersectOptions {
  double t0 = 1e-6;
  const PerturbationSpec* perturbation = nullptr;
  bool fix_vertex_deviation = true;
};

struct IntersectStage {
  IntersectionGraph graph;
  /// Inline trim-vertex substitutions.
  std::vector<DefectRecord> deviations;
  /// Face pairs skipped because their surfaces coincide.
  std::vector<std::pair<int, int>> overlaps;
};

/// Intersects every face pair and assembles one graph. Edge-targeted
/// perturbations are applied to the assembled graph.
IntersectStage stage_intersect(const Body& a, const Body& b, const IntersectOptions& opts = {});

class ImprintError : public std::runtime_error {
 public:
  ImprintError(int face, const std::string& what) : std::runtime_error(what), face_(face) {}
  int face() const { return face_; }

 private:
  int face_;
};

struct ImprintResult {
  Body a, b;
  /// Fragment face id -> original face id.
  std::map<int, int> parent;
};

/// Splits the faces of both bodies along the graph edges lying on them.
ImprintResult stage_imprint(const Body& a, const Body& b, const IntersectionGraph& g,
                            double t0 = 1e-6);

enum class FaceSide { outside, inside, on_same, on_opposite };
std::string to_string(FaceSide s);

struct Classification {
  std::map<int, FaceSide> side_a, side_b;
  /// Kept fragments; faces of b listed in `flip` enter the result reversed.
  std::vector<int> keep_a, keep_b, flip;
  /// Fragments with no unambiguous sample (sub-tolerance slivers); they
  /// default to outside.
  std::vector<int> ambiguous;
};

/// Side of a point relative to a closed body: majority of three ray parities.
FaceSide classify_point_in_body(const Body& body, const Point3& p, double tol);

Classification stage_classify(const Body& a, const Body& b, BooleanOp op, double t0 = 1e-6);

struct MergeResult {
  Body body;
  /// Result edges used by more than two faces.
  std::vector<int> non_manifold_edges;
  /// Boundary edges of an unclosed shell.
  std::vector<int> open_edges;
};

MergeResult stage_merge(const Body& a, const Body& b, const Classification& c, double t0 = 1e-6);

/// Faces that remain after uniting fragments split only by seams.
int logical_face_count(const Body& b);

struct PipelineOptions {
  double t0 = 1e-6;
  const PerturbationSpec* perturbation = nullptr;
  bool repair = true;
};

/// Everything one boolean run produced. Later stages are empty when an
/// earlier one failed; `failed_stage` then names it.
struct PipelineRun {
  IntersectStage intersect;
  /// Graph handed to imprint (repaired unless repair is off).
  IntersectionGraph graph;
  /// Inline deviations first, then the repair pass records.
  std::vector<DefectRecord> repairs;
  std::optional<ImprintResult> imprint;
  std::optional<Classification> classification;
  std::optional<MergeResult> merge;
  std::string failed_stage;
  std::string error;
};

PipelineRun run_pipeline(const Body& a, const Body& b, BooleanOp op, const PipelineOptions& opts = {});

}  // namespace brepair
