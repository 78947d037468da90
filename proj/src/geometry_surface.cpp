#include "brepair/geometry.hpp"
#include "util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace brepair {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cox-de Boor basis, no derivatives; partials are taken by differences.
std::vector<double> basis(const std::vector<double>& knots, int degree,
                          int count, double t, int& span) {
  const int n = count - 1;
  if (t >= knots[n + 1]) {
    span = n;
  } else if (t <= knots[degree]) {
    span = degree;
  } else {
    auto it = std::upper_bound(knots.begin() + degree, knots.begin() + n + 2, t);
    span = static_cast<int>(it - knots.begin()) - 1;
  }
  std::vector<double> N(degree + 1, 0.0), left(degree + 1), right(degree + 1);
  N[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = t - knots[span + 1 - j];
    right[j] = knots[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double tmp = denom == 0.0 ? 0.0 : N[r] / denom;
      N[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    N[j] = saved;
  }
  return N;
}

Point3 bspline_surface_point(const surfaces::BSpline& b, double u, double v) {
  int su = 0, sv = 0;
  const auto Nu = basis(b.knots_u, b.degree_u, b.count_u, u, su);
  const auto Nv = basis(b.knots_v, b.degree_v, b.count_v, v, sv);
  Point3 p = Point3::Zero();
  for (int i = 0; i <= b.degree_u; ++i)
    for (int j = 0; j <= b.degree_v; ++j)
      p += Nu[i] * Nv[j] *
           b.control[(su - b.degree_u + i) * b.count_v + (sv - b.degree_v + j)];
  return p;
}

ParamBox bspline_box(const surfaces::BSpline& b) {
  return {b.knots_u[b.degree_u], b.knots_u[b.count_u], b.knots_v[b.degree_v],
          b.knots_v[b.count_v]};
}

double wrap_near(double angle, double ref) {
  return angle + kTwoPi * std::round((ref - angle) / kTwoPi);
}

Point2 bspline_project(const surfaces::BSpline& b, const Surface& s,
                       const Point3& p) {
  const ParamBox box = bspline_box(b);
  Point2 best(box.u0, box.v0);
  double best_d = kInf;
  constexpr int kGrid = 24;
  for (int i = 0; i <= kGrid; ++i) {
    for (int j = 0; j <= kGrid; ++j) {
      const double u = box.u0 + (box.u1 - box.u0) * i / kGrid;
      const double v = box.v0 + (box.v1 - box.v0) * j / kGrid;
      const double d = (bspline_surface_point(b, u, v) - p).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = {u, v};
      }
    }
  }
  for (int it = 0; it < 50; ++it) {
    const auto [su, sv] = surface_partials(s, best.x(), best.y());
    const Vec3 r = bspline_surface_point(b, best.x(), best.y()) - p;
    Eigen::Matrix2d J;
    J << su.dot(su), su.dot(sv), su.dot(sv), sv.dot(sv);
    const Eigen::Vector2d g(r.dot(su), r.dot(sv));
    const Eigen::Vector2d step = J.ldlt().solve(g);
    Point2 next = best - step;
    next.x() = std::clamp(next.x(), box.u0, box.u1);
    next.y() = std::clamp(next.y(), box.v0, box.v1);
    const double moved = (next - best).norm();
    best = next;
    if (moved < 1e-13) break;
  }
  return best;
}

}  // namespace

std::string to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::plane: return "plane";
    case SurfaceKind::cylinder: return "cylinder";
    case SurfaceKind::cone: return "cone";
    case SurfaceKind::sphere: return "sphere";
    case SurfaceKind::torus: return "torus";
    case SurfaceKind::bspline: return "bspline";
  }
  throw GeometryError("unknown geometry kind");
}

Surface::Surface(Geometry geometry, double fitting_error)
    : geometry_(std::move(geometry)), fitting_error_(fitting_error) {
  if (fitting_error_ < 0) throw GeometryError("negative fitting error");
  std::visit(Overloaded{
                 [](const surfaces::Plane&) {},
                 [](const surfaces::Cylinder& c) {
                   if (!(c.radius > 0))
                     throw GeometryError("cylinder radius must be positive");
                 },
                 [](const surfaces::Cone& c) {
                   if (!(c.radius > 0) || !(c.half_angle > 0) ||
                       !(c.half_angle < kPi / 2))
                     throw GeometryError("cone half-angle must be in (0, pi/2)");
                 },
                 [](const surfaces::Sphere& s) {
                   if (!(s.radius > 0))
                     throw GeometryError("sphere radius must be positive");
                 },
                 [](const surfaces::Torus& t) {
                   if (!(t.major > t.minor && t.minor > 0))
                     throw GeometryError("torus requires R > r > 0");
                 },
                 [](const surfaces::BSpline& b) {
                   if (b.count_u * b.count_v !=
                           static_cast<int>(b.control.size()) ||
                       static_cast<int>(b.knots_u.size()) !=
                           b.count_u + b.degree_u + 1 ||
                       static_cast<int>(b.knots_v.size()) !=
                           b.count_v + b.degree_v + 1)
                     throw GeometryError("bspline surface size mismatch");
                 }},
             geometry_);
}

Surface Surface::plane(const Frame& f) { return Surface(surfaces::Plane{f}); }
Surface Surface::cylinder(const Frame& f, double r) {
  return Surface(surfaces::Cylinder{f, r});
}
Surface Surface::cone(const Frame& f, double r, double half_angle) {
  return Surface(surfaces::Cone{f, r, half_angle});
}
Surface Surface::sphere(const Frame& f, double r) {
  return Surface(surfaces::Sphere{f, r});
}
Surface Surface::torus(const Frame& f, double major, double minor) {
  return Surface(surfaces::Torus{f, major, minor});
}

SurfaceKind Surface::kind() const {
  if (geometry_.valueless_by_exception())
    throw GeometryError("unknown geometry kind");
  return static_cast<SurfaceKind>(geometry_.index());
}

bool Surface::u_periodic() const {
  const auto k = kind();
  return k == SurfaceKind::cylinder || k == SurfaceKind::cone ||
         k == SurfaceKind::sphere || k == SurfaceKind::torus;
}

bool Surface::v_periodic() const { return kind() == SurfaceKind::torus; }

ParamBox Surface::domain() const {
  return std::visit(
      Overloaded{
          [](const surfaces::Plane&) -> ParamBox {
            return {-kInf, kInf, -kInf, kInf};
          },
          [](const surfaces::Cylinder&) -> ParamBox {
            return {0, kTwoPi, -kInf, kInf};
          },
          [](const surfaces::Cone& c) -> ParamBox {
            return {0, kTwoPi, -kInf, c.radius / std::tan(c.half_angle)};
          },
          [](const surfaces::Sphere&) -> ParamBox {
            return {0, kTwoPi, -kPi / 2, kPi / 2};
          },
          [](const surfaces::Torus&) -> ParamBox {
            return {0, kTwoPi, 0, kTwoPi};
          },
          [](const surfaces::BSpline& b) -> ParamBox { return bspline_box(b); }},
      geometry_);
}

Point3 eval_surface(const Surface& s, double u, double v) {
  return std::visit(
      Overloaded{
          [&](const surfaces::Plane& p) -> Point3 {
            return p.frame.origin + u * p.frame.x + v * p.frame.y;
          },
          [&](const surfaces::Cylinder& c) -> Point3 {
            return c.frame.to_world(
                {c.radius * std::cos(u), c.radius * std::sin(u), v});
          },
          [&](const surfaces::Cone& c) -> Point3 {
            const double r = c.radius - v * std::tan(c.half_angle);
            return c.frame.to_world({r * std::cos(u), r * std::sin(u), v});
          },
          [&](const surfaces::Sphere& sp) -> Point3 {
            return sp.frame.to_world({sp.radius * std::cos(v) * std::cos(u),
                                      sp.radius * std::cos(v) * std::sin(u),
                                      sp.radius * std::sin(v)});
          },
          [&](const surfaces::Torus& t) -> Point3 {
            const double rho = t.major + t.minor * std::cos(v);
            return t.frame.to_world({rho * std::cos(u), rho * std::sin(u),
                                     t.minor * std::sin(v)});
          },
          [&](const surfaces::BSpline& b) -> Point3 {
            return bspline_surface_point(b, u, v);
          }},
      s.geometry());
}

std::pair<Vec3, Vec3> surface_partials(const Surface& s, double u, double v) {
  auto rot = [](const Frame& f, const Vec3& l) -> Vec3 {
    return l.x() * f.x + l.y() * f.y + l.z() * f.z;
  };
  return std::visit(
      Overloaded{
          [&](const surfaces::Plane& p) -> std::pair<Vec3, Vec3> {
            return {p.frame.x, p.frame.y};
          },
          [&](const surfaces::Cylinder& c) -> std::pair<Vec3, Vec3> {
            return {rot(c.frame, {-c.radius * std::sin(u),
                                  c.radius * std::cos(u), 0}),
                    c.frame.z};
          },
          [&](const surfaces::Cone& c) -> std::pair<Vec3, Vec3> {
            const double ta = std::tan(c.half_angle);
            const double r = c.radius - v * ta;
            return {rot(c.frame, {-r * std::sin(u), r * std::cos(u), 0}),
                    rot(c.frame, {-ta * std::cos(u), -ta * std::sin(u), 1})};
          },
          [&](const surfaces::Sphere& sp) -> std::pair<Vec3, Vec3> {
            const double r = sp.radius;
            return {rot(sp.frame, {-r * std::cos(v) * std::sin(u),
                                   r * std::cos(v) * std::cos(u), 0}),
                    rot(sp.frame, {-r * std::sin(v) * std::cos(u),
                                   -r * std::sin(v) * std::sin(u),
                                   r * std::cos(v)})};
          },
          [&](const surfaces::Torus& t) -> std::pair<Vec3, Vec3> {
            const double rho = t.major + t.minor * std::cos(v);
            return {rot(t.frame, {-rho * std::sin(u), rho * std::cos(u), 0}),
                    rot(t.frame, {-t.minor * std::sin(v) * std::cos(u),
                                  -t.minor * std::sin(v) * std::sin(u),
                                  t.minor * std::cos(v)})};
          },
          [&](const surfaces::BSpline& b) -> std::pair<Vec3, Vec3> {
            const ParamBox box = bspline_box(b);
            const double hu = 1e-6 * (box.u1 - box.u0);
            const double hv = 1e-6 * (box.v1 - box.v0);
            const double u0 = std::clamp(u - hu, box.u0, box.u1);
            const double u1 = std::clamp(u + hu, box.u0, box.u1);
            const double v0 = std::clamp(v - hv, box.v0, box.v1);
            const double v1 = std::clamp(v + hv, box.v0, box.v1);
            return {(bspline_surface_point(b, u1, v) -
                     bspline_surface_point(b, u0, v)) /
                        (u1 - u0),
                    (bspline_surface_point(b, u, v1) -
                     bspline_surface_point(b, u, v0)) /
                        (v1 - v0)};
          }},
      s.geometry());
}

double signed_distance(const Surface& s, const Point3& p) {
  return std::visit(
      Overloaded{
          [&](const surfaces::Plane& pl) -> double {
            return (p - pl.frame.origin).dot(pl.frame.z);
          },
          [&](const surfaces::Cylinder& c) -> double {
            const Vec3 l = c.frame.to_local(p);
            return std::hypot(l.x(), l.y()) - c.radius;
          },
          [&](const surfaces::Cone& c) -> double {
            const Vec3 l = c.frame.to_local(p);
            const double rho = std::hypot(l.x(), l.y());
            return (rho - c.radius) * std::cos(c.half_angle) +
                   l.z() * std::sin(c.half_angle);
          },
          [&](const surfaces::Sphere& sp) -> double {
            return (p - sp.frame.origin).norm() - sp.radius;
          },
          [&](const surfaces::Torus& t) -> double {
            const Vec3 l = t.frame.to_local(p);
            const double rho = std::hypot(l.x(), l.y());
            return std::hypot(rho - t.major, l.z()) - t.minor;
          },
          [&](const surfaces::BSpline& b) -> double {
            const Point2 uv = bspline_project(b, s, p);
            const Point3 q = bspline_surface_point(b, uv.x(), uv.y());
            const auto [su, sv] = surface_partials(s, uv.x(), uv.y());
            const Vec3 n = su.cross(sv).normalized();
            const double d = (p - q).norm();
            return (p - q).dot(n) >= 0 ? d : -d;
          }},
      s.geometry());
}

Vec3 signed_distance_gradient(const Surface& s, const Point3& p) {
  auto radial = [](const Frame& f, const Vec3& l) -> Vec3 {
    const double rho = std::hypot(l.x(), l.y());
    if (rho < 1e-300) return f.x;
    return (l.x() * f.x + l.y() * f.y) / rho;
  };
  return std::visit(
      Overloaded{
          [&](const surfaces::Plane& pl) -> Vec3 { return pl.frame.z; },
          [&](const surfaces::Cylinder& c) -> Vec3 {
            return radial(c.frame, c.frame.to_local(p));
          },
          [&](const surfaces::Cone& c) -> Vec3 {
            return std::cos(c.half_angle) * radial(c.frame, c.frame.to_local(p)) +
                   std::sin(c.half_angle) * c.frame.z;
          },
          [&](const surfaces::Sphere& sp) -> Vec3 {
            const Vec3 d = p - sp.frame.origin;
            return d.norm() > 0 ? Vec3(d.normalized()) : sp.frame.z;
          },
          [&](const surfaces::Torus& t) -> Vec3 {
            const Vec3 l = t.frame.to_local(p);
            const Vec3 rad = radial(t.frame, l);
            const double rho = std::hypot(l.x(), l.y());
            const Point3 center = t.frame.origin + t.major * rad;
            const Vec3 d = p - center;
            (void)rho;
            return d.norm() > 0 ? Vec3(d.normalized()) : rad;
          },
          [&](const surfaces::BSpline& b) -> Vec3 {
            const Point2 uv = bspline_project(b, s, p);
            const auto [su, sv] = surface_partials(s, uv.x(), uv.y());
            return su.cross(sv).normalized();
          }},
      s.geometry());
}

Vec3 surface_normal_at(const Surface& s, const Point3& p) {
  return signed_distance_gradient(s, p);
}

namespace {
constexpr double kPoleU = std::numeric_limits<double>::quiet_NaN();
}

Point2 surface_params(const Surface& s, const Point3& p,
                      std::optional<Point2> hint) {
  Point2 uv = std::visit(
      Overloaded{
          [&](const surfaces::Plane& pl) -> Point2 {
            const Vec3 l = pl.frame.to_local(p);
            return {l.x(), l.y()};
          },
          [&](const surfaces::Cylinder& c) -> Point2 {
            const Vec3 l = c.frame.to_local(p);
            return {std::atan2(l.y(), l.x()), l.z()};
          },
          [&](const surfaces::Cone& c) -> Point2 {
            const Vec3 l = c.frame.to_local(p);
            const double rho = std::hypot(l.x(), l.y());
            const double sa = std::sin(c.half_angle), ca = std::cos(c.half_angle);
            // foot of the perpendicular on the generator through (radius, 0)
            const double along = -(rho - c.radius) * sa + l.z() * ca;
            const double u = rho < 1e-12 * c.radius ? kPoleU : std::atan2(l.y(), l.x());
            return {u, along * ca};
          },
          [&](const surfaces::Sphere& sp) -> Point2 {
            const Vec3 l = sp.frame.to_local(p);
            const double n = l.norm();
            const double u = std::hypot(l.x(), l.y()) < 1e-12 * sp.radius
                                 ? kPoleU
                                 : std::atan2(l.y(), l.x());
            return {u, n > 0 ? std::asin(std::clamp(l.z() / n, -1.0, 1.0)) : 0.0};
          },
          [&](const surfaces::Torus& t) -> Point2 {
            const Vec3 l = t.frame.to_local(p);
            const double rho = std::hypot(l.x(), l.y());
            return {std::atan2(l.y(), l.x()), std::atan2(l.z(), rho - t.major)};
          },
          [&](const surfaces::BSpline& b) -> Point2 {
            return bspline_project(b, s, p);
          }},
      s.geometry());
  auto to_period = [](double a) { return a < 0 ? a + kTwoPi : a; };
  // u is undefined at a pole; follow the hint so param paths stay continuous
  if (std::isnan(uv.x())) uv.x() = hint ? hint->x() : 0.0;
  if (s.u_periodic())
    uv.x() = hint ? wrap_near(uv.x(), hint->x()) : to_period(uv.x());
  if (s.v_periodic())
    uv.y() = hint ? wrap_near(uv.y(), hint->y()) : to_period(uv.y());
  return uv;
}

bool point_on_surface(const Surface& s, const Point3& p, double tol) {
  return std::abs(signed_distance(s, p)) <= tol;
}

int degree(const Surface& s) {
  switch (s.kind()) {
    case SurfaceKind::plane: return 1;
    case SurfaceKind::cylinder:
    case SurfaceKind::cone:
    case SurfaceKind::sphere: return 2;
    case SurfaceKind::torus: return 4;
    case SurfaceKind::bspline: {
      const auto& b = std::get<surfaces::BSpline>(s.geometry());
      return std::max(b.degree_u, b.degree_v);
    }
  }
  throw GeometryError("unknown geometry kind");
}

}  // namespace brepair
