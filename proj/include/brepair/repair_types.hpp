#pragma once

#include "brepair/geometry.hpp"

#include <string>
#include <vector>

namespace brepair {

enum class DefectKind { disconnection, short_edge, vertex_deviation };
enum class RepairAction { merged, collapsed, substituted, none };

std::string to_string(DefectKind k);
std::string to_string(RepairAction a);

/// One gate of a judge: what was measured against which tolerance.
struct CriterionCheck {
  int index = 0;
  std::string description;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

struct DefectRecord {
  DefectKind kind = DefectKind::disconnection;
  /// Graph edges, graph vertices and faces involved.
  std::vector<int> edges;
  std::vector<int> vertices;
  std::vector<int> faces;
  std::vector<CriterionCheck> criteria;
  RepairAction action = RepairAction::none;
  std::vector<Point3> before;
  std::vector<Point3> after;
  std::string note;

  bool all_passed() const;
};

/// A candidate split point on an intersection curve found while trimming
/// against a face boundary.
struct TrimVertex {
  Point3 position = Point3::Zero();
  double t = 0.0;
  /// Face and boundary edge that produced it (0 for curve ends).
  int face = 0;
  int boundary_edge = 0;
  bool tangential = false;
};

}  // namespace brepair
