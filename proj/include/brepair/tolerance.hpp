#pragma once

#include "brepair/geometry.hpp"
#include "brepair/topology.hpp"

#include <map>
#include <shared_mutex>

namespace brepair {

inline constexpr double kDefaultT0 = 1e-6;

/// k = max(1, t_f1 / t0, t_f2 / t0, t_e0 / t0), from the carriers' fitting
/// errors.
double k_factor(const Surface& f1, const Surface& f2, const Curve& e0, double t0);

/// Degree used for an intersection curve. Sampled curves have no clean
/// degree and inherit the larger degree of the two surfaces they lie on.
int intersection_curve_degree(const Surface& f1, const Surface& f2, const Curve& e0);

struct ToleranceBreakdown {
  double k = 1.0;
  int degree_f1 = 1;
  int degree_f2 = 1;
  int degree_e0 = 1;
  double t0 = kDefaultT0;
  double value = kDefaultT0;
};

/// t = k * d(f1) * d(f2) * d(e0) * t0
ToleranceBreakdown tolerance_breakdown(const Surface& f1, const Surface& f2,
                                       const Curve& e0, double t0);
double feature_tolerance(const Surface& f1, const Surface& f2, const Curve& e0,
                         double t0);

/// Global tolerance plus a per-edge cache. Reads may run concurrently.
class ToleranceContext {
 public:
  explicit ToleranceContext(double t0 = kDefaultT0);

  double t0() const { return t0_; }

  /// Cached by edge id; the first computation for an id wins.
  double edge_tolerance(int edge_id, const Surface& f1, const Surface& f2,
                        const Curve& e0);
  std::optional<double> cached(int edge_id) const;
  void forget(int edge_id);

 private:
  double t0_;
  mutable std::shared_mutex mutex_;
  std::map<int, double> cache_;
};

/// Tolerance of a body edge: the same formula over the faces that share it.
/// Edges bounding a single face (seams) use that face twice.
double body_edge_tolerance(const Body& b, int edge_id, double t0);

}  // namespace brepair
