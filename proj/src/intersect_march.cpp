#include "intersect_internal.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace brepair::detail {

namespace {

constexpr double kTurnPerStep = 0.02;  // radians

struct Marcher {
  const Surface& a;
  const Surface& b;
  Box3 region;
  double hmin, hmax;

  // Newton onto both surfaces; with `plane` also onto (p - o).n = offset.
  std::optional<Point3> project(Point3 p, const Vec3* n = nullptr, const Point3* o = nullptr,
                                double offset = 0.0) const {
    for (int it = 0; it < 40; ++it) {
      const double fa = signed_distance(a, p), fb = signed_distance(b, p);
      const Vec3 ga = signed_distance_gradient(a, p), gb = signed_distance_gradient(b, p);
      Vec3 step;
      double res;
      if (n) {
        const double fc = (p - *o).dot(*n) - offset;
        Eigen::Matrix3d J;
        J.row(0) = ga;
        J.row(1) = gb;
        J.row(2) = *n;
        Eigen::FullPivLU<Eigen::Matrix3d> lu(J);
        if (lu.rank() < 3) return std::nullopt;
        step = -lu.solve(Vec3(fa, fb, fc));
        res = std::max({std::abs(fa), std::abs(fb), std::abs(fc)});
      } else {
        Eigen::Matrix<double, 2, 3> J;
        J.row(0) = ga;
        J.row(1) = gb;
        const Eigen::Matrix2d JJ = J * J.transpose();
        if (std::abs(JJ.determinant()) < 1e-20) return std::nullopt;
        step = -J.transpose() * JJ.inverse() * Eigen::Vector2d(fa, fb);
        res = std::max(std::abs(fa), std::abs(fb));
      }
      p += step;
      if (!p.allFinite()) return std::nullopt;
      if (res < 1e-14 && step.norm() < 1e-14) return p;
      if (it > 3 && step.norm() < 1e-15) return p;
    }
    const double fa = signed_distance(a, p), fb = signed_distance(b, p);
    if (std::max(std::abs(fa), std::abs(fb)) < 1e-12) return p;
    return std::nullopt;
  }

  std::optional<Vec3> tangent(const Point3& p) const {
    const Vec3 t = signed_distance_gradient(a, p).cross(signed_distance_gradient(b, p));
    if (t.norm() < 1e-9) return std::nullopt;
    return t.normalized();
  }

  bool inside(const Point3& p) const { return region.contains(p); }

  struct Run {
    std::vector<Point3> pts;
    std::vector<Vec3> tans;
    bool closed = false;
  };

  Run run(const Point3& seed, double dir) const {
    Run r;
    auto t0 = tangent(seed);
    if (!t0) return r;
    r.pts.push_back(seed);
    r.tans.push_back(dir * *t0);
    double h = 4 * hmin, travelled = 0;
    for (int step = 0; step < 200000; ++step) {
      const Point3 p = r.pts.back();
      const Vec3 T = r.tans.back();
      std::optional<Point3> q;
      std::optional<Vec3> Tq;
      double turn = 0;
      while (true) {
        q = project(p + h * T, &T, &p, h);
        if (q) Tq = tangent(*q);
        if (q && Tq) {
          if (Tq->dot(T) < 0) *Tq = -*Tq;
          turn = std::acos(std::clamp(Tq->dot(T), -1.0, 1.0));
          if (turn <= 2 * kTurnPerStep || h <= hmin) break;
        }
        h *= 0.5;
        if (h < 1e-4 * hmin) {
          if (!q || !Tq) return r;  // tangential contact or singular point: stop here
          break;
        }
      }
      travelled += h;
      // closing back onto the seed
      if (r.pts.size() > 3 && travelled > 3 * h) {
        const Vec3 pq = *q - p;
        const double s = std::clamp((seed - p).dot(pq) / pq.squaredNorm(), 0.0, 1.0);
        if ((p + s * pq - seed).norm() < 0.25 * h) {
          if ((p - seed).norm() < 0.2 * h) {
            r.pts.pop_back();
            r.tans.pop_back();
          }
          r.closed = true;
          return r;
        }
      }
      r.pts.push_back(*q);
      r.tans.push_back(*Tq);
      if (!inside(*q)) return r;
      const double kappa = turn / h;
      h = std::clamp(kappa > 0 ? kTurnPerStep / kappa : hmax, hmin, hmax);
    }
    throw IntersectError(IntersectError::Kind::no_convergence,
                         "no convergence: marching exceeded its step budget");
  }

  std::optional<Curve> trace(const Point3& seed) const {
    Run f = run(seed, 1.0);
    if (f.pts.empty()) return std::nullopt;
    std::vector<Point3> pts;
    std::vector<Vec3> tans;
    if (!f.closed) {
      Run bk = run(seed, -1.0);
      for (std::size_t i = bk.pts.size(); i-- > 1;) {
        pts.push_back(bk.pts[i]);
        tans.push_back(-bk.tans[i]);
      }
    }
    pts.insert(pts.end(), f.pts.begin(), f.pts.end());
    tans.insert(tans.end(), f.tans.begin(), f.tans.end());
    if (pts.size() < (f.closed ? 3u : 2u)) return std::nullopt;
    return refine(pts, tans, f.closed);
  }

  // Splits spans whose Hermite midpoint strays from the surfaces.
  Curve refine(std::vector<Point3> pts, std::vector<Vec3> tans, bool closed) const {
    const double target = 1e-11 * region.diagonal().norm();
    for (int pass = 0; pass < 6; ++pass) {
      const Curve c = Curve::polyline(pts, tans, closed);
      const auto& pl = std::get<curves::Polyline>(c.geometry());
      std::vector<Point3> np;
      std::vector<Vec3> nt;
      bool split = false;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        np.push_back(pts[i]);
        nt.push_back(tans[i]);
        if (i + 1 == pts.size() && !closed) break;
        const double tm = 0.5 * (pl.params[i] + pl.params[i + 1]);
        const Point3 mid = eval_curve(c, tm);
        if (std::max(std::abs(signed_distance(a, mid)), std::abs(signed_distance(b, mid))) <= target)
          continue;
        auto q = project(mid);
        if (!q) continue;
        auto tq = tangent(*q);
        if (!tq) continue;
        np.push_back(*q);
        nt.push_back(tq->dot(tans[i]) < 0 ? Vec3(-*tq) : *tq);
        split = true;
      }
      pts = std::move(np);
      tans = std::move(nt);
      if (!split) break;
    }
    return Curve::polyline(pts, tans, closed);
  }
};

ParamBox seed_box_for(const Surface& s, const Box3& region) {
  ParamBox box = s.domain();
  double lo_u = std::numeric_limits<double>::infinity(), hi_u = -lo_u, lo_v = lo_u, hi_v = -lo_u;
  for (int k = 0; k < 8; ++k) {
    const Point3 c = region.corner(static_cast<Box3::CornerType>(k));
    const Point2 uv = surface_params(s, c);
    lo_u = std::min(lo_u, uv.x());
    hi_u = std::max(hi_u, uv.x());
    lo_v = std::min(lo_v, uv.y());
    hi_v = std::max(hi_v, uv.y());
  }
  if (!s.u_periodic()) {
    box.u0 = std::max(box.u0, lo_u);
    box.u1 = std::min(box.u1, hi_u);
  }
  if (!s.v_periodic()) {
    box.v0 = std::max(box.v0, lo_v);
    box.v1 = std::min(box.v1, hi_v);
  }
  return box;
}

double distance_to_polyline(const Point3& p, const std::vector<Point3>& pts, bool closed) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i + (closed ? 0 : 1) < n; ++i) {
    const Point3& a = pts[i];
    const Point3& c = pts[(i + 1) % n];
    const Vec3 d = c - a;
    const double s = d.squaredNorm() > 0 ? std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0) : 0;
    best = std::min(best, (a + s * d - p).norm());
  }
  return best;
}

}  // namespace

GeomIntersectionResult march(const Surface& s1, const Surface& s2, const Box3& region,
                             const SsiOptions& opts) {
  const double diag = std::max(region.diagonal().norm(), 1e-9);
  Marcher m{s1, s2, region, 1e-3 * diag, 1e-1 * diag};
  std::vector<Point3> seeds;
  const int N = std::max(4, opts.seed_lattice);
  int valid = 0, near_zero = 0;
  auto lattice = [&](const Surface& on, const Surface& other, const ParamBox& box) {
    std::vector<double> g((N + 1) * (N + 1), std::numeric_limits<double>::quiet_NaN());
    auto uv = [&](int i, int j) {
      return Point2(box.u0 + (box.u1 - box.u0) * i / N, box.v0 + (box.v1 - box.v0) * j / N);
    };
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= N; ++j) {
        const Point2 q = uv(i, j);
        const Point3 p = eval_surface(on, q.x(), q.y());
        if (!region.contains(p)) continue;
        const double d = signed_distance(other, p);
        g[i * (N + 1) + j] = d;
        ++valid;
        if (std::abs(d) < 1e-10) ++near_zero;
      }
    auto edge = [&](int i0, int j0, int i1, int j1) {
      const double g0 = g[i0 * (N + 1) + j0], g1 = g[i1 * (N + 1) + j1];
      if (std::isnan(g0) || std::isnan(g1) || g0 * g1 > 0 || (g0 == 0 && g1 == 0)) return;
      Point2 lo = uv(i0, j0), hi = uv(i1, j1);
      double glo = g0;
      for (int k = 0; k < 60; ++k) {
        const Point2 mid = 0.5 * (lo + hi);
        const double gm = signed_distance(other, eval_surface(on, mid.x(), mid.y()));
        if ((gm < 0) == (glo < 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      const Point2 mid = 0.5 * (lo + hi);
      if (auto p = m.project(eval_surface(on, mid.x(), mid.y())); p && region.contains(*p))
        seeds.push_back(*p);
    };
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= N; ++j) {
        if (i < N) edge(i, j, i + 1, j);
        if (j < N) edge(i, j, i, j + 1);
      }
  };
  lattice(s1, s2, opts.seed_box ? *opts.seed_box : seed_box_for(s1, region));
  lattice(s2, s1, opts.seed_box2 ? *opts.seed_box2 : seed_box_for(s2, region));
  if (valid > 0 && near_zero == valid) throw IntersectError(IntersectError::Kind::overlap, "overlap: coincident surfaces");

  GeomIntersectionResult r;
  std::vector<std::pair<std::vector<Point3>, bool>> traced;
  for (const Point3& seed : seeds) {
    bool known = false;
    for (const auto& [pts, closed] : traced)
      if (distance_to_polyline(seed, pts, closed) < 0.5 * m.hmin) {
        known = true;
        break;
      }
    if (known) continue;
    auto c = m.trace(seed);
    if (!c) continue;
    const auto& pl = std::get<curves::Polyline>(c->geometry());
    traced.emplace_back(pl.points, pl.closed);
    r.curves.push_back(*c);
  }
  // chord-midpoint deviation of the sampled curves
  double worst = 0;
  for (const auto& c : r.curves) {
    const auto& pl = std::get<curves::Polyline>(c.geometry());
    for (std::size_t i = 0; i + 1 < pl.params.size(); ++i) {
      const Point3 p = eval_curve(c, 0.5 * (pl.params[i] + pl.params[i + 1]));
      worst = std::max({worst, std::abs(signed_distance(s1, p)), std::abs(signed_distance(s2, p))});
    }
  }
  r.est_error = worst;
  for (auto& c : r.curves) {
    const auto& pl = std::get<curves::Polyline>(c.geometry());
    c = Curve::polyline(pl.points, pl.tangents, pl.closed, worst);
  }
  return r;
}

}  // namespace brepair::detail
