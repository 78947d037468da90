#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace brepair {

using Point3 = Eigen::Vector3d;
using Vec3 = Eigen::Vector3d;
using Point2 = Eigen::Vector2d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Right-handed orthonormal frame. `z` is the axis of revolution for
/// surfaces of revolution and the normal for planes and planar curves.
struct Frame {
  Point3 origin = Point3::Zero();
  Vec3 x = Vec3::UnitX();
  Vec3 y = Vec3::UnitY();
  Vec3 z = Vec3::UnitZ();

  /// Builds a frame from an axis and a hint for the x direction. The hint is
  /// projected onto the plane orthogonal to the axis.
  static Frame from_axis(const Point3& origin, const Vec3& axis,
                         const Vec3& x_hint = Vec3::UnitX());

  Vec3 to_local(const Point3& p) const;
  Point3 to_world(const Vec3& local) const;
};

// ----------------------------------------------------------------------------
// Curves
// ----------------------------------------------------------------------------

namespace curves {

/// origin + t * direction, `direction` unit length so t is arc length.
struct Line {
  Point3 origin;
  Vec3 direction;
};

/// center + r (cos t x + sin t y)
struct Circle {
  Frame frame;
  double radius = 1.0;
};

/// center + a cos t x + b sin t y
struct Ellipse {
  Frame frame;
  double major = 1.0;
  double minor = 1.0;
};

/// Sampled curve, parameterized by cumulative chord length. When tangents are
/// present the segments are cubic Hermite interpolants, otherwise linear.
/// A closed polyline has no repeated end point; the closing segment runs from
/// the last point back to the first and `params` has one extra entry.
struct Polyline {
  std::vector<Point3> points;
  std::vector<Vec3> tangents;
  std::vector<double> params;
  bool closed = false;
};

/// Clamped non-rational B-spline.
struct BSpline {
  int degree = 3;
  std::vector<double> knots;
  std::vector<Point3> control;
};

}  // namespace curves

enum class CurveKind { line, circle, ellipse, polyline, bspline };

std::string to_string(CurveKind kind);

class Curve {
 public:
  using Geometry = std::variant<curves::Line, curves::Circle, curves::Ellipse,
                                curves::Polyline, curves::BSpline>;

  Curve() = default;
  Curve(Geometry geometry, double t_start, double t_end,
        double fitting_error = 0.0);

  static Curve line(const Point3& origin, const Vec3& direction,
                    double t_start, double t_end);
  static Curve segment(const Point3& a, const Point3& b);
  static Curve circle(const Frame& frame, double radius, double t_start = 0.0,
                      double t_end = kTwoPi);
  static Curve ellipse(const Frame& frame, double major, double minor,
                       double t_start = 0.0, double t_end = kTwoPi);
  static Curve polyline(std::vector<Point3> points, std::vector<Vec3> tangents,
                        bool closed, double fitting_error = 0.0);
  static Curve bspline(int degree, std::vector<double> knots,
                       std::vector<Point3> control, double fitting_error = 0.0);

  CurveKind kind() const;
  const Geometry& geometry() const { return geometry_; }

  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  double fitting_error() const { return fitting_error_; }

  /// Carrier is periodic (circle, ellipse, closed polyline).
  bool periodic() const;
  double period() const;
  /// Range covers one full period.
  bool closed() const;

  /// Same carrier over a sub-range. Periodic carriers accept ranges that wrap
  /// past the fundamental period.
  Curve with_range(double t_start, double t_end) const;
  Curve reversed_copy() const;

 private:
  Geometry geometry_ = curves::Line{Point3::Zero(), Vec3::UnitX()};
  double t_start_ = 0.0;
  double t_end_ = 1.0;
  double fitting_error_ = 0.0;
};

Point3 eval_curve(const Curve& c, double t);
Vec3 curve_derivative(const Curve& c, double t);
Point3 curve_start(const Curve& c);
Point3 curve_end(const Curve& c);
double curve_length(const Curve& c, int samples = 256);

struct CurveProjection {
  double t = 0.0;
  double distance = 0.0;
};

/// Clamped closest point. Dense seeding (64 per span) plus Newton refinement.
CurveProjection closest_param_on_curve(const Curve& c, const Point3& p);

/// Evenly spaced parameter samples over the curve range (inclusive ends).
std::vector<double> sample_params(const Curve& c, int count);

// ----------------------------------------------------------------------------
// Surfaces
// ----------------------------------------------------------------------------

namespace surfaces {

/// origin + u x + v y
struct Plane {
  Frame frame;
};

/// origin + r (cos u x + sin u y) + v z
struct Cylinder {
  Frame frame;
  double radius = 1.0;
};

/// origin + (radius - v tan(half_angle)) (cos u x + sin u y) + v z.
/// Single nappe: the apex sits at v = radius / tan(half_angle).
struct Cone {
  Frame frame;
  double radius = 1.0;
  double half_angle = kPi / 4;
};

/// center + r (cos v cos u x + cos v sin u y + sin v z)
struct Sphere {
  Frame frame;
  double radius = 1.0;
};

/// center + (R + r cos v)(cos u x + sin u y) + r sin v z
struct Torus {
  Frame frame;
  double major = 2.0;
  double minor = 0.5;
};

/// Clamped tensor-product B-spline, control grid indexed [i * nv + j].
struct BSpline {
  int degree_u = 3;
  int degree_v = 3;
  std::vector<double> knots_u;
  std::vector<double> knots_v;
  int count_u = 0;
  int count_v = 0;
  std::vector<Point3> control;
};

}  // namespace surfaces

enum class SurfaceKind { plane, cylinder, cone, sphere, torus, bspline };

std::string to_string(SurfaceKind kind);

struct ParamBox {
  double u0, u1, v0, v1;
};

class Surface {
 public:
  using Geometry =
      std::variant<surfaces::Plane, surfaces::Cylinder, surfaces::Cone,
                   surfaces::Sphere, surfaces::Torus, surfaces::BSpline>;

  Surface() = default;
  explicit Surface(Geometry geometry, double fitting_error = 0.0);

  static Surface plane(const Frame& frame);
  static Surface cylinder(const Frame& frame, double radius);
  static Surface cone(const Frame& frame, double radius, double half_angle);
  static Surface sphere(const Frame& frame, double radius);
  static Surface torus(const Frame& frame, double major, double minor);

  SurfaceKind kind() const;
  const Geometry& geometry() const { return geometry_; }
  double fitting_error() const { return fitting_error_; }

  bool u_periodic() const;
  bool v_periodic() const;
  /// Natural parameter domain; planes report an unbounded box.
  ParamBox domain() const;

 private:
  Geometry geometry_ = surfaces::Plane{};
  double fitting_error_ = 0.0;
};

Point3 eval_surface(const Surface& s, double u, double v);
/// Partial derivatives (dS/du, dS/dv).
std::pair<Vec3, Vec3> surface_partials(const Surface& s, double u, double v);
/// Outward unit normal at a point near the surface.
Vec3 surface_normal_at(const Surface& s, const Point3& p);

/// Signed distance to the untrimmed surface (positive on the normal side).
double signed_distance(const Surface& s, const Point3& p);
Vec3 signed_distance_gradient(const Surface& s, const Point3& p);

/// Parameters of the closest surface point. `u_hint`/`v_hint` choose the
/// branch on periodic directions (result lies within half a period).
Point2 surface_params(const Surface& s, const Point3& p,
                      std::optional<Point2> hint = std::nullopt);

/// True iff the distance from p to the untrimmed surface is at most tol.
bool point_on_surface(const Surface& s, const Point3& p, double tol);

// ----------------------------------------------------------------------------
// Degree
// ----------------------------------------------------------------------------

/// Algebraic degree of the implicit form (analytic kinds) or polynomial degree
/// (splines). Polylines report 1.
int degree(const Curve& c);
int degree(const Surface& s);

}  // namespace brepair
