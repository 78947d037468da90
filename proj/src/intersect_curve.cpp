#include "intersect_internal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace brepair {

namespace {

int sample_count_for(const Curve& c) {
  switch (c.kind()) {
    case CurveKind::polyline:
      return std::max(256, 8 * static_cast<int>(
                                   std::get<curves::Polyline>(c.geometry()).points.size()));
    case CurveKind::bspline:
      return std::max(256, 32 * static_cast<int>(
                                    std::get<curves::BSpline>(c.geometry()).control.size()));
    default: return 256;
  }
}

template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > 0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double curve_scale(const Curve& c) {
  double s = 0;
  for (double t : sample_params(c, 9)) s = std::max(s, eval_curve(c, t).norm());
  return 1 + s;
}

}  // namespace

std::vector<CurveSurfaceHit> curve_surface(const Curve& c, const Surface& s) {
  const int n = sample_count_for(c);
  const auto ts = sample_params(c, n);
  const double scale = curve_scale(c);
  const double eps = 1e-10 * scale;
  auto f = [&](double t) { return signed_distance(s, eval_curve(c, t)); };
  auto g = [&](double t) {
    const Point3 p = eval_curve(c, t);
    return signed_distance_gradient(s, p).dot(curve_derivative(c, t));
  };
  std::vector<double> fv(ts.size());
  bool all_on = true;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    fv[i] = f(ts[i]);
    all_on = all_on && std::abs(fv[i]) <= eps;
  }
  if (all_on) throw IntersectError(IntersectError::Kind::overlap, "overlap: curve lies on surface");

  std::vector<CurveSurfaceHit> hits;
  auto add = [&](double t, bool tangential) {
    const Point3 p = eval_curve(c, t);
    for (const auto& h : hits)
      if ((h.p - p).norm() < 1e-9 * scale) return;
    hits.push_back({t, p, tangential});
  };
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (std::abs(fv[i]) <= eps) {
      // sampled zero: polish on the derivative if it is a touch
      const bool touch = (i == 0 || fv[i - 1] * fv[i] >= 0) && (i + 1 == ts.size() || fv[i + 1] * fv[i] >= 0);
      add(ts[i], touch && std::abs(g(ts[i])) < 1e-6);
      continue;
    }
    if (i + 1 < ts.size() && std::abs(fv[i + 1]) > eps && (fv[i] < 0) != (fv[i + 1] < 0))
      add(bisect(f, ts[i], ts[i + 1]), false);
  }
  // touches: sign changes of the derivative where |f| dips
  std::vector<double> gv(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) gv[i] = g(ts[i]);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if ((gv[i] < 0) == (gv[i + 1] < 0) || gv[i] == 0) continue;
    // f has an extremum; only a minimum of |f| can touch
    const double t = bisect(g, ts[i], ts[i + 1]);
    const double ft = f(t);
    if (std::abs(ft) <= eps && std::abs(ft) <= std::min(std::abs(fv[i]), std::abs(fv[i + 1])))
      add(t, true);
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
  return hits;
}

std::vector<CurveCurveHit> curve_curve(const Curve& c1, const Curve& c2, double gap_tolerance) {
  const int n = sample_count_for(c1);
  const auto ts = sample_params(c1, n);
  const double scale = std::max(curve_scale(c1), curve_scale(c2));
  const double exact = 1e-9 * scale;
  std::vector<CurveProjection> pr(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) pr[i] = closest_param_on_curve(c2, eval_curve(c1, ts[i]));
  int run = 0;
  for (const auto& p : pr) {
    run = p.distance <= exact ? run + 1 : 0;
    if (run >= 3) throw IntersectError(IntersectError::Kind::overlap, "overlap: curves coincide");
  }
  const double accept = std::max(gap_tolerance, exact);
  auto clamp_t = [](const Curve& c, double t) { return std::clamp(t, c.t_start(), c.t_end()); };
  std::vector<CurveCurveHit> hits;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const bool left = i == 0 || pr[i].distance <= pr[i - 1].distance;
    const bool right = i + 1 == ts.size() || pr[i].distance <= pr[i + 1].distance;
    if (!left || !right) continue;
    // Levenberg-Marquardt on |c1(t1) - c2(t2)|^2
    double t1 = ts[i], t2 = pr[i].t, lambda = 1e-6;
    Vec3 F = eval_curve(c1, t1) - eval_curve(c2, t2);
    for (int it = 0; it < 200; ++it) {
      Eigen::Matrix<double, 3, 2> J;
      J.col(0) = curve_derivative(c1, t1);
      J.col(1) = -curve_derivative(c2, t2);
      Eigen::Matrix2d H = J.transpose() * J;
      H.diagonal() *= 1 + lambda;
      const Eigen::Vector2d d = -H.ldlt().solve(J.transpose() * F);
      if (!d.allFinite()) break;
      const double n1 = clamp_t(c1, t1 + d(0)), n2 = clamp_t(c2, t2 + d(1));
      const Vec3 Fn = eval_curve(c1, n1) - eval_curve(c2, n2);
      if (Fn.norm() < F.norm()) {
        const bool tiny = std::abs(n1 - t1) + std::abs(n2 - t2) < 1e-15;
        t1 = n1;
        t2 = n2;
        F = Fn;
        lambda = std::max(lambda * 0.1, 1e-12);
        if (tiny) break;
      } else {
        lambda *= 10;
        if (lambda > 1e12) break;
      }
    }
    const double gap = F.norm();
    if (gap > accept) continue;
    const Point3 p = 0.5 * (eval_curve(c1, t1) + eval_curve(c2, t2));
    bool dup = false;
    for (const auto& h : hits)
      if ((h.p - p).norm() < std::max(exact, 0.5 * accept)) dup = true;
    if (!dup) hits.push_back({t1, t2, p, gap});
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.t1 < b.t1; });
  return hits;
}

}  // namespace brepair
