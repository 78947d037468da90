#include "brepair/intersect.hpp"
#include "intersect_internal.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace brepair {

namespace {

constexpr double kParallel = 1e-12;

struct Quadric {
  // q(p) = d^T A d + 2 b.d + f with d = p - origin
  Eigen::Matrix3d A;
  Vec3 b;
  double f;
  Point3 origin;
};

std::optional<Quadric> quadric_of(const Surface& s) {
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  switch (s.kind()) {
    case SurfaceKind::sphere: {
      const auto& g = std::get<surfaces::Sphere>(s.geometry());
      return Quadric{I, Vec3::Zero(), -g.radius * g.radius, g.frame.origin};
    }
    case SurfaceKind::cylinder: {
      const auto& g = std::get<surfaces::Cylinder>(s.geometry());
      return Quadric{I - g.frame.z * g.frame.z.transpose(), Vec3::Zero(),
                     -g.radius * g.radius, g.frame.origin};
    }
    case SurfaceKind::cone: {
      const auto& g = std::get<surfaces::Cone>(s.geometry());
      const double tau = std::tan(g.half_angle);
      return Quadric{I - (1 + tau * tau) * g.frame.z * g.frame.z.transpose(),
                     g.radius * tau * g.frame.z, -g.radius * g.radius, g.frame.origin};
    }
    default: return std::nullopt;
  }
}

// Axis of a surface of revolution (sphere: none, any axis through the center).
struct Axis {
  Point3 origin;
  Vec3 dir;
};

std::optional<Axis> axis_of(const Surface& s) {
  return std::visit(
      Overloaded{[](const surfaces::Cylinder& g) -> std::optional<Axis> {
                   return Axis{g.frame.origin, g.frame.z};
                 },
                 [](const surfaces::Cone& g) -> std::optional<Axis> {
                   return Axis{g.frame.origin, g.frame.z};
                 },
                 [](const surfaces::Torus& g) -> std::optional<Axis> {
                   return Axis{g.frame.origin, g.frame.z};
                 },
                 [](const auto&) -> std::optional<Axis> { return std::nullopt; }},
      s.geometry());
}

bool on_axis(const Axis& ax, const Point3& p) {
  const Vec3 d = p - ax.origin;
  return (d - d.dot(ax.dir) * ax.dir).norm() <= 1e-12 * (1 + d.norm());
}

// Meridian profile in the (rho, h) half-plane of a shared axis.
struct Profile {
  bool is_circle = false;
  Point2 point;  // line point or circle center
  Point2 dir;    // line direction
  double radius = 0.0;
  // cone: only rho >= 0 and the nappe on the near side of the apex
  std::optional<double> h_limit;
  double h_limit_sign = 0.0;
};

std::optional<Profile> profile_of(const Surface& s, const Axis& ax) {
  auto h_of = [&](const Point3& p) { return (p - ax.origin).dot(ax.dir); };
  switch (s.kind()) {
    case SurfaceKind::plane: {
      const auto& g = std::get<surfaces::Plane>(s.geometry());
      if (std::abs(std::abs(g.frame.z.dot(ax.dir)) - 1) > kParallel) return std::nullopt;
      return Profile{false, {0, h_of(g.frame.origin)}, {1, 0}, 0, {}, 0};
    }
    case SurfaceKind::sphere: {
      const auto& g = std::get<surfaces::Sphere>(s.geometry());
      if (!on_axis(ax, g.frame.origin)) return std::nullopt;
      return Profile{true, {0, h_of(g.frame.origin)}, {0, 0}, g.radius, {}, 0};
    }
    default: break;
  }
  const auto own = axis_of(s);
  if (!own || std::abs(std::abs(own->dir.dot(ax.dir)) - 1) > kParallel ||
      !on_axis(ax, own->origin))
    return std::nullopt;
  const double sgn = own->dir.dot(ax.dir) > 0 ? 1.0 : -1.0;
  const double h0 = h_of(own->origin);
  switch (s.kind()) {
    case SurfaceKind::cylinder: {
      const auto& g = std::get<surfaces::Cylinder>(s.geometry());
      return Profile{false, {g.radius, 0}, {0, 1}, 0, {}, 0};
    }
    case SurfaceKind::cone: {
      const auto& g = std::get<surfaces::Cone>(s.geometry());
      const double tau = std::tan(g.half_angle);
      Profile p{false, {g.radius, h0}, Point2(-tau * sgn, 1).normalized(), 0, {}, 0};
      p.h_limit = h0 + sgn * g.radius / tau;
      p.h_limit_sign = sgn;
      return p;
    }
    case SurfaceKind::torus: {
      const auto& g = std::get<surfaces::Torus>(s.geometry());
      return Profile{true, {g.major, h0}, {0, 0}, g.minor, {}, 0};
    }
    default: return std::nullopt;
  }
}

[[noreturn]] void overlap(const std::string& what) {
  throw IntersectError(IntersectError::Kind::overlap, "overlap: " + what);
}

std::vector<Point2> intersect_profiles(const Profile& a, const Profile& b, double scale) {
  const double eps = 1e-12 * scale;
  std::vector<Point2> out;
  auto line_line = [&](const Profile& l1, const Profile& l2) {
    const double cr = l1.dir.x() * l2.dir.y() - l1.dir.y() * l2.dir.x();
    const Point2 w = l2.point - l1.point;
    if (std::abs(cr) < kParallel) {
      if (std::abs(w.x() * l1.dir.y() - w.y() * l1.dir.x()) < eps) overlap("coincident profiles");
      return;
    }
    const double s = (w.x() * l2.dir.y() - w.y() * l2.dir.x()) / cr;
    out.push_back(l1.point + s * l1.dir);
  };
  auto line_circle = [&](const Profile& l, const Profile& c) {
    const Point2 w = l.point - c.point;
    const double bq = w.dot(l.dir);
    const double disc = bq * bq - (w.squaredNorm() - c.radius * c.radius);
    if (disc < -eps * c.radius) return;
    if (disc <= eps * c.radius) {
      out.push_back(l.point - bq * l.dir);
      return;
    }
    const double r = std::sqrt(disc);
    out.push_back(l.point + (-bq - r) * l.dir);
    out.push_back(l.point + (-bq + r) * l.dir);
  };
  auto circle_circle = [&](const Profile& c1, const Profile& c2) {
    const Point2 w = c2.point - c1.point;
    const double d = w.norm();
    if (d < eps) {
      if (std::abs(c1.radius - c2.radius) < eps) overlap("coincident profiles");
      return;
    }
    if (d > c1.radius + c2.radius + eps || d < std::abs(c1.radius - c2.radius) - eps) return;
    const double x = (d * d + c1.radius * c1.radius - c2.radius * c2.radius) / (2 * d);
    const double y2 = c1.radius * c1.radius - x * x;
    const Point2 ex = w / d, ey(-ex.y(), ex.x());
    if (y2 <= eps * c1.radius) {
      out.push_back(c1.point + x * ex);
      return;
    }
    const double y = std::sqrt(y2);
    out.push_back(c1.point + x * ex + y * ey);
    out.push_back(c1.point + x * ex - y * ey);
  };
  if (!a.is_circle && !b.is_circle) line_line(a, b);
  else if (!a.is_circle) line_circle(a, b);
  else if (!b.is_circle) line_circle(b, a);
  else circle_circle(a, b);
  auto valid = [&](const Profile& p, const Point2& q) {
    if (!p.h_limit) return true;
    return p.h_limit_sign * (*p.h_limit - q.y()) >= -eps;
  };
  std::vector<Point2> kept;
  for (const auto& q : out)
    if (q.x() >= -eps && valid(a, q) && valid(b, q)) kept.push_back({std::max(q.x(), 0.0), q.y()});
  return kept;
}

std::optional<GeomIntersectionResult> coaxial(const Surface& s1, const Surface& s2) {
  std::optional<Axis> ax = axis_of(s1);
  if (!ax) ax = axis_of(s2);
  if (!ax) {
    // plane/sphere pairs: the axis is the plane normal through the center
    const Surface* sph = s1.kind() == SurfaceKind::sphere ? &s1 : &s2;
    const Surface* other = sph == &s1 ? &s2 : &s1;
    if (sph->kind() != SurfaceKind::sphere) return std::nullopt;
    const Point3 c = std::get<surfaces::Sphere>(sph->geometry()).frame.origin;
    if (other->kind() == SurfaceKind::plane)
      ax = Axis{c, std::get<surfaces::Plane>(other->geometry()).frame.z};
    else if (other->kind() == SurfaceKind::sphere) {
      const Point3 c2 = std::get<surfaces::Sphere>(other->geometry()).frame.origin;
      if ((c2 - c).norm() < 1e-15) {
        if (std::abs(signed_distance(*other, eval_surface(*sph, 0, 0))) < 1e-12)
          overlap("coincident spheres");
        return GeomIntersectionResult{};
      }
      ax = Axis{c, (c2 - c).normalized()};
    } else {
      return std::nullopt;
    }
  }
  const auto p1 = profile_of(s1, *ax);
  const auto p2 = profile_of(s2, *ax);
  if (!p1 || !p2) return std::nullopt;
  const double scale = 1 + std::max({p1->point.norm(), p2->point.norm(), p1->radius, p2->radius});
  GeomIntersectionResult r;
  const Frame base = Frame::from_axis(ax->origin, ax->dir,
                                      std::abs(ax->dir.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY());
  for (const Point2& q : intersect_profiles(*p1, *p2, scale)) {
    Frame f = base;
    f.origin = ax->origin + q.y() * ax->dir;
    if (q.x() <= 1e-12 * scale)
      r.points.push_back(f.origin);
    else
      r.curves.push_back(Curve::circle(f, q.x()));
  }
  return r;
}

std::optional<std::pair<double, double>> clip_line(const Point3& o, const Vec3& d, const Box3& box) {
  double lo = -std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < 1e-300) {
      if (o[i] < box.min()[i] || o[i] > box.max()[i]) return std::nullopt;
      continue;
    }
    double a = (box.min()[i] - o[i]) / d[i], b = (box.max()[i] - o[i]) / d[i];
    if (a > b) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  }
  if (!(hi > lo)) return std::nullopt;
  return std::make_pair(lo, hi);
}

void push_line(GeomIntersectionResult& r, const Point3& o, const Vec3& d, const Box3& box) {
  if (auto range = clip_line(o, d, box))
    r.curves.push_back(Curve::line(o, d, range->first, range->second));
}

GeomIntersectionResult plane_plane(const surfaces::Plane& a, const surfaces::Plane& b,
                                   const Box3& region) {
  const Vec3 d = a.frame.z.cross(b.frame.z);
  const double da = a.frame.z.dot(a.frame.origin), db = b.frame.z.dot(b.frame.origin);
  GeomIntersectionResult r;
  if (d.norm() < kParallel) {
    if (std::abs(a.frame.z.dot(b.frame.origin - a.frame.origin)) < 1e-12) overlap("coincident planes");
    return r;
  }
  // point on both planes closest to the origin
  Eigen::Matrix3d m;
  m.row(0) = a.frame.z;
  m.row(1) = b.frame.z;
  m.row(2) = d;
  const Point3 o = m.fullPivLu().solve(Vec3(da, db, d.dot(region.center())));
  push_line(r, o, d.normalized(), region);
  return r;
}

std::optional<GeomIntersectionResult> plane_quadric(const surfaces::Plane& pl, const Surface& q,
                                                    const Box3& region) {
  const auto qf = quadric_of(q);
  if (!qf) return std::nullopt;
  GeomIntersectionResult r;
  const Vec3 n = pl.frame.z;
  if (q.kind() == SurfaceKind::cylinder) {
    const auto& c = std::get<surfaces::Cylinder>(q.geometry());
    if (std::abs(n.dot(c.frame.z)) < kParallel) {
      const double d = n.dot(c.frame.origin - pl.frame.origin);
      const Point3 foot = c.frame.origin - d * n;
      const Vec3 w = n.cross(c.frame.z).normalized();
      const double eps = 1e-12 * (1 + c.radius);
      if (std::abs(d) > c.radius + eps) return r;
      if (std::abs(d) >= c.radius - eps) {
        push_line(r, foot, c.frame.z, region);
        return r;
      }
      const double s = std::sqrt(c.radius * c.radius - d * d);
      push_line(r, foot + s * w, c.frame.z, region);
      push_line(r, foot - s * w, c.frame.z, region);
      return r;
    }
  }
  Eigen::Matrix<double, 3, 2> M;
  M.col(0) = pl.frame.x;
  M.col(1) = pl.frame.y;
  const Vec3 w = pl.frame.origin - qf->origin;
  const Eigen::Matrix2d A2 = M.transpose() * qf->A * M;
  const Eigen::Vector2d b2 = M.transpose() * (qf->A * w + qf->b);
  const double f2 = w.dot(qf->A * w) + 2 * qf->b.dot(w) + qf->f;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(A2);
  const Eigen::Vector2d lam = es.eigenvalues();
  if (!(lam(0) * lam(1) > 1e-12 * lam.cwiseAbs().maxCoeff() * lam.cwiseAbs().maxCoeff()))
    return std::nullopt;  // parabola or hyperbola: leave to marching
  const Eigen::Vector2d c = -A2.ldlt().solve(b2);
  const double F = f2 + b2.dot(c);
  const Point3 center = pl.frame.origin + M * c;
  const double a0 = -F / lam(0), a1 = -F / lam(1);
  const double scale = 1 + std::abs(f2);
  if (std::abs(F) <= 1e-12 * scale) {
    if (std::abs(signed_distance(q, center)) < 1e-9) r.points.push_back(center);
    return r;
  }
  if (a0 < 0 || a1 < 0) return r;
  // larger semi-axis belongs to the smaller eigenvalue
  const int major = a0 >= a1 ? 0 : 1;
  const double ra = std::sqrt(std::max(a0, a1)), rb = std::sqrt(std::min(a0, a1));
  const Vec3 x = (M * es.eigenvectors().col(major)).normalized();
  Frame f{center, x, n.cross(x), n};
  Curve curve = ra - rb <= 1e-14 * ra ? Curve::circle(f, ra) : Curve::ellipse(f, ra, rb);
  // a cone quadric has two nappes; keep the ellipse only if it is on ours
  if (std::abs(signed_distance(q, eval_curve(curve, 0.3))) > 1e-9 * (1 + ra)) return r;
  r.curves.push_back(curve);
  return r;
}

Box3 default_region(const Surface& s1, const Surface& s2) {
  auto bounded = [](const Surface& s) -> std::optional<Box3> {
    return std::visit(
        Overloaded{[](const surfaces::Sphere& g) -> std::optional<Box3> {
                     const Vec3 e = Vec3::Constant(g.radius);
                     return Box3(g.frame.origin - e, g.frame.origin + e);
                   },
                   [](const surfaces::Torus& g) -> std::optional<Box3> {
                     const Vec3 e = Vec3::Constant(g.major + g.minor);
                     return Box3(g.frame.origin - e, g.frame.origin + e);
                   },
                   [](const auto&) -> std::optional<Box3> { return std::nullopt; }},
        s.geometry());
  };
  auto a = bounded(s1), b = bounded(s2);
  if (a && b) return a->intersection(*b);
  if (a) return *a;
  if (b) return *b;
  return Box3(Vec3::Constant(-10), Vec3::Constant(10));
}

double residual_estimate(const GeomIntersectionResult& r, const Surface& s1, const Surface& s2) {
  double worst = 0;
  for (const auto& c : r.curves) {
    int n = 128;
    if (c.kind() == CurveKind::polyline)
      n = 4 * static_cast<int>(std::get<curves::Polyline>(c.geometry()).points.size()) + 1;
    for (double t : sample_params(c, n)) {
      const Point3 p = eval_curve(c, t);
      worst = std::max({worst, std::abs(signed_distance(s1, p)), std::abs(signed_distance(s2, p))});
    }
  }
  for (const auto& p : r.points)
    worst = std::max({worst, std::abs(signed_distance(s1, p)), std::abs(signed_distance(s2, p))});
  return 2 * worst + 1e-15;
}

}  // namespace

GeomIntersectionResult surface_surface(const Surface& s1, const Surface& s2,
                                       const SsiOptions& opts) {
  const Box3 region = opts.region ? *opts.region : default_region(s1, s2);
  std::optional<GeomIntersectionResult> r;
  const bool p1 = s1.kind() == SurfaceKind::plane, p2 = s2.kind() == SurfaceKind::plane;
  if (p1 && p2) {
    r = plane_plane(std::get<surfaces::Plane>(s1.geometry()),
                    std::get<surfaces::Plane>(s2.geometry()), region);
  } else {
    r = coaxial(s1, s2);
    if (!r && p1) r = plane_quadric(std::get<surfaces::Plane>(s1.geometry()), s2, region);
    if (!r && p2) r = plane_quadric(std::get<surfaces::Plane>(s2.geometry()), s1, region);
  }
  if (!r) r = detail::march(s1, s2, region, opts);
  r->est_error = std::max(r->est_error, residual_estimate(*r, s1, s2));
  return *r;
}

}  // namespace brepair
