#pragma once

#include "brepair/topology.hpp"

#include <string>
#include <vector>

namespace brepair {

enum class PrimitiveKind { box, regular_prism, cylinder, cone, torus, sphere };

std::string to_string(PrimitiveKind k);
PrimitiveKind primitive_kind_from_string(const std::string& s);

/// Placement and dimensions. `dims` per kind:
///   box            {dx, dy, dz}, frame origin at the min corner
///   regular_prism  {circumradius, height}, centered on the frame, `sides` sides
///   cylinder       {radius, height}, frame origin at the base center
///   cone           {base_radius, height}, apex on +z
///   torus          {major, minor}
///   sphere         {radius}
struct PrimitiveSpec {
  PrimitiveKind kind = PrimitiveKind::box;
  Frame frame;
  std::vector<double> dims;
  int sides = 6;
};

/// Builds a closed manifold body. Entity ids start at `id_base`.
Body build_primitive(const PrimitiveSpec& spec, int body_id = 0, int id_base = 1);

/// Closed polyhedron from corner points and outward (counter-clockwise) faces.
Body make_polyhedron(const std::vector<Point3>& points,
                     const std::vector<std::vector<int>>& faces, int body_id,
                     int id_base);

}  // namespace brepair
