#pragma once

#include "brepair/geometry.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace brepair {

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vertex {
  int id = 0;
  Point3 position = Point3::Zero();
  double local_tolerance = 0.0;
};

/// Which periodic coordinate a seam edge holds constant.
enum class SeamKind { none, u_seam, v_seam };

struct Edge {
  int id = 0;
  Curve curve;
  int start_vertex = 0;
  int end_vertex = 0;
  /// Reversed edges run from curve end to curve start.
  bool reversed = false;
  SeamKind seam = SeamKind::none;
};

struct Coedge {
  int edge = 0;
  bool forward = true;
  /// For seam coedges: which copy of the seam in the fundamental domain this
  /// use lies on (-1 low side, +1 high side).
  int seam_side = 0;
};

struct Loop {
  std::vector<Coedge> coedges;
};

struct Face {
  int id = 0;
  Surface surface;
  /// loops[0] is the outer loop. Faces cut by a seam carry the seam coedges
  /// twice, once per side.
  std::vector<Loop> loops;
  /// Outward normal is the negated surface normal.
  bool reversed = false;
  /// Param-domain polygons supplied by the builder (imprint fragments). When
  /// empty they are derived from the loops.
  std::vector<std::vector<Point2>> param_loops;
};

/// Closed polygons of a face's loops in the surface parameter domain.
struct FaceDomain {
  std::vector<std::vector<Point2>> loops;
  bool u_periodic = false;
  bool v_periodic = false;
  double u_period = 0.0;
  double v_period = 0.0;
  ParamBox box{0, 0, 0, 0};
  /// Extent of the loops; the surface domain when there are none.
  ParamBox bounds{0, 0, 0, 0};
};

enum class EntityType { vertex, edge, face };

struct EntityRef {
  EntityType type = EntityType::vertex;
  int id = 0;
  auto operator<=>(const EntityRef&) const = default;
};

class Body {
 public:
  /// Entity ids start at `id_base` so several bodies can coexist in one run
  /// without id clashes.
  explicit Body(int id = 0, int id_base = 1);

  int id() const { return id_; }

  int add_vertex(const Point3& position, double local_tolerance = 0.0);
  int add_edge(const Curve& curve, int start_vertex, int end_vertex,
               bool reversed = false, SeamKind seam = SeamKind::none);
  int add_face(const Surface& surface, std::vector<Loop> loops,
               bool reversed = false);
  /// Inserts entities with caller-chosen ids (used by loaders).
  void insert(const Vertex& v);
  void insert(const Edge& e);
  void insert(const Face& f);
  void remove_face(int id);

  const std::map<int, Vertex>& vertices() const { return vertices_; }
  const std::map<int, Edge>& edges() const { return edges_; }
  const std::map<int, Face>& faces() const { return faces_; }

  const Vertex& vertex(int id) const;
  const Edge& edge(int id) const;
  const Face& face(int id) const;
  Vertex& vertex_mut(int id);
  Face& face_mut(int id);

  bool has_vertex(int id) const { return vertices_.count(id) > 0; }
  bool has_edge(int id) const { return edges_.count(id) > 0; }
  bool has_face(int id) const { return faces_.count(id) > 0; }

  /// Faces whose loops use the edge. A seam edge lists its face once.
  std::vector<int> faces_of_edge(int edge_id) const;
  /// Edge -> faces adjacency, rebuilt from loops.
  std::map<int, std::vector<int>> adjacency() const;

  /// Param-domain polygons, cached per face.
  std::shared_ptr<const FaceDomain> domain(int face_id) const;

 private:
  void invalidate() const;

  int id_ = 0;
  int next_id_ = 1;
  std::map<int, Vertex> vertices_;
  std::map<int, Edge> edges_;
  std::map<int, Face> faces_;
  mutable std::map<int, std::shared_ptr<const FaceDomain>> domain_cache_;
  mutable std::shared_ptr<std::mutex> cache_mutex_ = std::make_shared<std::mutex>();
};

Point3 edge_start_point(const Edge& e);
Point3 edge_end_point(const Edge& e);
/// Point at the start of the coedge in loop direction.
Point3 coedge_start_point(const Body& b, const Coedge& c);
Point3 coedge_end_point(const Body& b, const Coedge& c);

FaceDomain build_face_domain(const Body& b, const Face& f);

enum class FacePointState { outside, boundary, inside };
std::string to_string(FacePointState s);

/// Locates a point (assumed on or near the face's surface) relative to the
/// trimmed face. Points within `tol` of a non-seam boundary edge are
/// `boundary`.
FacePointState classify_point_on_face(const Body& b, int face_id,
                                      const Point3& p, double tol);
/// Same test in the face's parameter domain, skipping the boundary check.
bool param_point_in_domain(const FaceDomain& d, const Point2& uv);
/// Smallest distance from p to any non-seam boundary edge of the face.
double distance_to_face_boundary(const Body& b, int face_id, const Point3& p);

/// Integrity and manifold checks; returns human-readable problems.
std::vector<std::string> validate(const Body& b, bool require_manifold = true);

std::set<EntityRef> sub_entities(const Body& b, EntityRef a);
bool is_member(const Body& b, EntityRef a, EntityRef of);

struct EulerCounts {
  int vertices = 0;
  int edges = 0;
  int faces = 0;
  int loops = 0;
};
EulerCounts euler_counts(const Body& b);
/// V - E + F - (L - F) for a single-shell body; equals 2 - 2 * genus.
int euler_characteristic(const EulerCounts& c);

}  // namespace brepair
