#include "brepair/tolerance.hpp"

#include <algorithm>
#include <mutex>

namespace brepair {

double k_factor(const Surface& f1, const Surface& f2, const Curve& e0, double t0) {
  if (!(t0 > 0)) throw std::invalid_argument("t0 must be positive");
  return std::max({1.0, f1.fitting_error() / t0, f2.fitting_error() / t0,
                   e0.fitting_error() / t0});
}

int intersection_curve_degree(const Surface& f1, const Surface& f2, const Curve& e0) {
  if (e0.kind() == CurveKind::polyline) return std::max(degree(f1), degree(f2));
  return degree(e0);
}

ToleranceBreakdown tolerance_breakdown(const Surface& f1, const Surface& f2,
                                       const Curve& e0, double t0) {
  ToleranceBreakdown b;
  b.k = k_factor(f1, f2, e0, t0);
  b.degree_f1 = degree(f1);
  b.degree_f2 = degree(f2);
  b.degree_e0 = intersection_curve_degree(f1, f2, e0);
  b.t0 = t0;
  // integer degree product first so swapping the faces is bit-identical
  b.value = b.k * (b.degree_f1 * b.degree_f2 * b.degree_e0) * t0;
  return b;
}

double feature_tolerance(const Surface& f1, const Surface& f2, const Curve& e0,
                         double t0) {
  return tolerance_breakdown(f1, f2, e0, t0).value;
}

ToleranceContext::ToleranceContext(double t0) : t0_(t0) {
  if (!(t0 > 0)) throw std::invalid_argument("t0 must be positive");
}

double ToleranceContext::edge_tolerance(int edge_id, const Surface& f1,
                                        const Surface& f2, const Curve& e0) {
  if (auto c = cached(edge_id)) return *c;
  const double t = feature_tolerance(f1, f2, e0, t0_);
  std::unique_lock lock(mutex_);
  return cache_.emplace(edge_id, t).first->second;
}

std::optional<double> ToleranceContext::cached(int edge_id) const {
  std::shared_lock lock(mutex_);
  auto it = cache_.find(edge_id);
  if (it == cache_.end()) return std::nullopt;
  return it->second;
}

void ToleranceContext::forget(int edge_id) {
  std::unique_lock lock(mutex_);
  cache_.erase(edge_id);
}

double body_edge_tolerance(const Body& b, int edge_id, double t0) {
  const auto faces = b.faces_of_edge(edge_id);
  const Curve& c = b.edge(edge_id).curve;
  if (faces.empty()) return feature_tolerance(Surface{}, Surface{}, c, t0);
  const Surface& s1 = b.face(faces.front()).surface;
  const Surface& s2 = b.face(faces.size() > 1 ? faces[1] : faces.front()).surface;
  return feature_tolerance(s1, s2, c, t0);
}

}  // namespace brepair
