#pragma once

#include "brepair/geometry.hpp"
#include "brepair/igraph.hpp"
#include "brepair/repair_types.hpp"
#include "brepair/topology.hpp"

#include <Eigen/Geometry>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace brepair {

using Box3 = Eigen::AlignedBox3d;

class IntersectError : public std::runtime_error {
 public:
  enum class Kind { overlap, no_convergence };
  IntersectError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct GeomIntersectionResult {
  std::vector<Curve> curves;
  std::vector<Point3> points;
  double est_error = 0.0;
};

struct SsiOptions {
  /// Region that bounds unbounded carriers and the marching search.
  std::optional<Box3> region;
  /// Param boxes of the two surfaces to seed marching over.
  std::optional<ParamBox> seed_box;
  std::optional<ParamBox> seed_box2;
  int seed_lattice = 64;
};

/// Geometric intersection of two untrimmed surfaces. Closed forms for
/// plane-plane, plane-quadric and coaxial surfaces of revolution; marching
/// otherwise.
GeomIntersectionResult surface_surface(const Surface& s1, const Surface& s2,
                                       const SsiOptions& opts = {});

struct CurveSurfaceHit {
  double t = 0.0;
  Point3 p = Point3::Zero();
  bool tangential = false;
};

/// Transversal crossings and tangential touches of a curve with a surface,
/// in increasing parameter order.
std::vector<CurveSurfaceHit> curve_surface(const Curve& c, const Surface& s);

struct CurveCurveHit {
  double t1 = 0.0;
  double t2 = 0.0;
  Point3 p = Point3::Zero();
  double gap = 0.0;
};

/// Common points of two curves. With `gap_tolerance` > 0, closest-approach
/// pairs within that gap are also returned (p is their midpoint).
std::vector<CurveCurveHit> curve_curve(const Curve& c1, const Curve& c2,
                                       double gap_tolerance = 0.0);

struct PerturbationSpec {
  std::uint64_t seed = 0;
  /// Displacement applied to trim vertices along the intersection curve.
  double vertex_jitter = 0.0;
  /// Positional error injected into inverse parameter lookups of trim
  /// vertices.
  double param_jitter = 0.0;
  enum class Target { all, face_pair, edge } target = Target::all;
  /// Face pair for Target::face_pair (either order).
  std::pair<int, int> face_pair{0, 0};
  /// Graph edge ids for Target::edge.
  std::vector<int> edge_ids;

  bool active() const { return vertex_jitter > 0 || param_jitter > 0; }
  bool selects_faces(int f1, int f2) const;
};

/// Deterministic value in [0, 1) from a seed and stable ids.
double jitter_unit(std::uint64_t seed, std::initializer_list<std::int64_t> ids);

struct TrimOptions {
  double t0 = 1e-6;
  /// Runs the inline vertex-deviation judge while trimming.
  bool fix_vertex_deviation = true;
  const PerturbationSpec* perturbation = nullptr;
};

struct FaceIntersection {
  std::vector<IntersectionEdge> edges;
  /// Isolated contact points inside both faces, with their tolerance.
  std::vector<std::pair<Point3, double>> points;
  std::vector<DefectRecord> deviations;
};

/// Boundary-trimmed intersection of two faces.
FaceIntersection topological_intersect_faces(const Body& a, int face_a, const Body& b,
                                             int face_b, const TrimOptions& opts = {});

/// Bounding box of a trimmed face, from its param domain.
Box3 face_bounds(const Body& b, int face_id);

/// Jitters the selected graph vertices. A vertex shared by several edges is
/// split so each incident edge end gets its own displaced copy.
IntersectionGraph perturb_graph(const IntersectionGraph& g, const PerturbationSpec& spec);

}  // namespace brepair
