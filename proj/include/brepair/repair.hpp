#pragma once

#include "brepair/igraph.hpp"
#include "brepair/repair_types.hpp"
#include "brepair/topology.hpp"

#include <optional>
#include <string>
#include <vector>

namespace brepair {

/// Bodies that own the faces referenced by a graph. Face and edge ids are
/// unique across the set.
class BodySet {
 public:
  BodySet() = default;
  BodySet(std::initializer_list<const Body*> bodies) : bodies_(bodies) {}
  void add(const Body* b) { bodies_.push_back(b); }

  const Body& body_of_face(int face_id) const;
  const std::vector<const Body*>& bodies() const { return bodies_; }

 private:
  std::vector<const Body*> bodies_;
};

struct DisconnectionWitness {
  int e1 = 0, e2 = 0;
  int v1 = 0, v2 = 0;
  int common_face = 0;
  /// The faces of e1 and e2 that differ, and their shared body edge.
  int f1 = 0, f2 = 0;
  int shared_edge = 0;
  std::vector<CriterionCheck> criteria;
};

std::optional<DisconnectionWitness> judge_disconnection(int e1, int e2, const IntersectionGraph& g,
                                                        const BodySet& bodies, double t0,
                                                        std::vector<CriterionCheck>* transcript = nullptr);

/// Re-intersects the shared edge with the common face's surface and merges
/// both vertices at the best point.
DefectRecord fix_disconnection(const DisconnectionWitness& w, IntersectionGraph& g,
                               const BodySet& bodies);

struct ShortEdgeWitness {
  int e0 = 0;
  Point3 v0 = Point3::Zero();
  int boundary1 = 0, boundary2 = 0;
  std::vector<CriterionCheck> criteria;
};

std::optional<ShortEdgeWitness> judge_short_edge(int e0, const IntersectionGraph& g,
                                                 const BodySet& bodies, double t0,
                                                 std::vector<CriterionCheck>* transcript = nullptr);

/// Collapses the edge into a single vertex at the witness position.
DefectRecord fix_short_edge(const ShortEdgeWitness& w, IntersectionGraph& g);

/// Inline trim-vertex check. v_array[i1] and v_array[i2] came from distinct
/// boundary edges of face f0; when those edges meet at a vertex within
/// `tolerance` of both that also lies on f1's surface, the pair is replaced by
/// that vertex.
bool judge_fix_vertex_deviation(const Curve& e0, double tolerance, const Body& body0, int f0,
                                const Body& body1, int f1, std::size_t i1, std::size_t i2,
                                std::vector<TrimVertex>& v_array, DefectRecord* record = nullptr);

struct RepairOptions {
  double t0 = 1e-6;
  int max_passes = 32;
};

/// Disconnection then short-edge repair, repeated until nothing changes.
std::vector<DefectRecord> repair_pass(IntersectionGraph& g, const BodySet& bodies,
                                      const RepairOptions& opts = {});

std::string defects_to_json(const std::vector<DefectRecord>& records);

}  // namespace brepair
