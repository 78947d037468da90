#include "brepair/boolean.hpp"

namespace brepair {

std::string to_string(BooleanOp op) {
  switch (op) {
    case BooleanOp::unite: return "union";
    case BooleanOp::subtract: return "subtract";
    case BooleanOp::intersect: return "intersect";
  }
  return "?";
}

BooleanOp boolean_op_from_string(const std::string& s) {
  if (s == "union") return BooleanOp::unite;
  if (s == "subtract") return BooleanOp::subtract;
  if (s == "intersect") return BooleanOp::intersect;
  throw std::invalid_argument("unknown boolean operator: " + s);
}

IntersectStage stage_intersect(const Body& a, const Body& b, const IntersectOptions& opts) {
  IntersectStage out;
  TrimOptions trim{opts.t0, opts.fix_vertex_deviation, opts.perturbation};
  for (const auto& [fa, face_a] : a.faces())
    for (const auto& [fb, face_b] : b.faces()) {
      FaceIntersection fi;
      try {
        fi = topological_intersect_faces(a, fa, b, fb, trim);
      } catch (const IntersectError& e) {
        if (e.kind() != IntersectError::Kind::overlap) throw;
        out.overlaps.emplace_back(fa, fb);
        continue;
      }
      for (auto& e : fi.edges) out.graph.add_edge(std::move(e));
      for (const auto& [p, tol] : fi.points) out.graph.add_point(p, tol);
      for (auto& d : fi.deviations) out.deviations.push_back(std::move(d));
    }
  if (opts.perturbation && opts.perturbation->target == PerturbationSpec::Target::edge)
    out.graph = perturb_graph(out.graph, *opts.perturbation);
  return out;
}

}  // namespace brepair
