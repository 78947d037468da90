#pragma once

#include "brepair/boolean.hpp"

#include <map>
#include <vector>

namespace brepair::detail {

/// A boundary or imprint curve piece of one face in its param domain.
struct Piece {
  enum class Kind { boundary, seam, imprint, pole } kind = Kind::boundary;
  /// Body edge id (boundary, seam) or graph edge id (imprint).
  int source = 0;
  /// Source curve restricted to the piece, running from p0 to p1.
  Curve curve;
  Point3 p0 = Point3::Zero(), p1 = Point3::Zero();
  std::vector<Point2> uv;
  int seam_side = 0;
};

/// One region of a split face: outer cycle first, then holes. Entries are
/// (piece index, traversed forward).
struct Region {
  std::vector<std::vector<std::pair<int, bool>>> cycles;
  std::vector<std::vector<Point2>> polygons;
};

struct FaceSplit {
  std::vector<Piece> pieces;
  std::vector<Region> regions;
};

/// Splits points on body edges, keyed by edge id: (curve param, position).
using EdgeSplits = std::map<int, std::vector<std::pair<double, Point3>>>;

/// Curve params where a graph edge crosses the face's seams. The crossings
/// are also added to `splits` of the seam edges.
std::vector<double> seam_cuts(const Body& b, int face_id, const IntersectionGraph& g, int graph_edge,
                              EdgeSplits& splits);

/// A graph edge lying on a face, cut at `cuts` into pieces inside the
/// fundamental param domain.
std::vector<Piece> imprint_pieces(const Body& b, int face_id, const IntersectionGraph& g,
                                  int graph_edge, std::vector<double> cuts);

/// Boundary loops of a face cut at the split points.
std::vector<Piece> boundary_pieces(const Body& b, int face_id, const EdgeSplits& splits);

/// Regions of the planar arrangement of the pieces. Throws ImprintError for
/// imprint chains with a free end.
FaceSplit arrange(const Body& b, int face_id, std::vector<Piece> pieces);

/// Surface params of p on the periodic branch nearest `ref`.
Point2 uv_near(const Surface& s, const FaceDomain& d, const Point3& p, std::optional<Point2> ref);

}  // namespace brepair::detail
