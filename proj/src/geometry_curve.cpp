#include "brepair/geometry.hpp"
#include "util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace brepair {

namespace {

// --- B-spline helpers -------------------------------------------------------

int find_span(const std::vector<double>& knots, int degree, int n_ctrl,
              double t) {
  const int n = n_ctrl - 1;
  if (t >= knots[n + 1]) return n;
  if (t <= knots[degree]) return degree;
  auto it = std::upper_bound(knots.begin() + degree, knots.begin() + n + 2, t);
  return static_cast<int>(it - knots.begin()) - 1;
}

Point3 de_boor(const std::vector<double>& knots,
               const std::vector<Point3>& ctrl, int degree, double t) {
  const int n_ctrl = static_cast<int>(ctrl.size());
  const int k = find_span(knots, degree, n_ctrl, t);
  std::vector<Point3> d(degree + 1);
  for (int j = 0; j <= degree; ++j) d[j] = ctrl[j + k - degree];
  for (int r = 1; r <= degree; ++r) {
    for (int j = degree; j >= r; --j) {
      const int i = j + k - degree;
      const double denom = knots[i + degree - r + 1] - knots[i];
      const double alpha = denom == 0.0 ? 0.0 : (t - knots[i]) / denom;
      d[j] = (1.0 - alpha) * d[j - 1] + alpha * d[j];
    }
  }
  return d[degree];
}

curves::BSpline derivative_spline(const curves::BSpline& b) {
  curves::BSpline d;
  d.degree = b.degree - 1;
  const int n = static_cast<int>(b.control.size());
  for (int i = 0; i + 1 < n; ++i) {
    const double denom = b.knots[i + b.degree + 1] - b.knots[i + 1];
    d.control.push_back(denom == 0.0 ? Vec3::Zero().eval()
                                     : Vec3(b.degree * (b.control[i + 1] -
                                                        b.control[i]) /
                                            denom));
  }
  d.knots.assign(b.knots.begin() + 1, b.knots.end() - 1);
  return d;
}

// --- Polyline helpers -------------------------------------------------------

double polyline_total(const curves::Polyline& pl) { return pl.params.back(); }

double wrap_polyline_param(const curves::Polyline& pl, double t) {
  if (!pl.closed) return t;
  const double total = polyline_total(pl);
  double w = std::fmod(t, total);
  if (w < 0) w += total;
  return w;
}

std::size_t polyline_segment(const curves::Polyline& pl, double t) {
  const std::size_t segs = pl.params.size() - 1;
  auto it = std::upper_bound(pl.params.begin(), pl.params.end(), t);
  std::size_t i = it == pl.params.begin()
                      ? 0
                      : static_cast<std::size_t>(it - pl.params.begin()) - 1;
  return std::min(i, segs - 1);
}

const Point3& poly_point(const curves::Polyline& pl, std::size_t i) {
  return pl.points[i % pl.points.size()];
}
const Vec3& poly_tangent(const curves::Polyline& pl, std::size_t i) {
  return pl.tangents[i % pl.tangents.size()];
}

Point3 polyline_eval(const curves::Polyline& pl, double t, bool derivative) {
  t = wrap_polyline_param(pl, t);
  const std::size_t i = polyline_segment(pl, t);
  const double h = pl.params[i + 1] - pl.params[i];
  const Point3& p0 = poly_point(pl, i);
  const Point3& p1 = poly_point(pl, i + 1);
  const double s = h > 0 ? (t - pl.params[i]) / h : 0.0;
  if (pl.tangents.empty()) {
    if (derivative) return h > 0 ? Vec3((p1 - p0) / h) : Vec3::Zero().eval();
    return p0 + s * (p1 - p0);
  }
  const Vec3 m0 = h * poly_tangent(pl, i);
  const Vec3 m1 = h * poly_tangent(pl, i + 1);
  if (derivative) {
    const double s2 = s * s;
    const Vec3 d = (6 * s2 - 6 * s) * p0 + (3 * s2 - 4 * s + 1) * m0 +
                   (-6 * s2 + 6 * s) * p1 + (3 * s2 - 2 * s) * m1;
    return h > 0 ? Vec3(d / h) : Vec3::Zero().eval();
  }
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * m0 +
         (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * m1;
}

Point3 carrier_point(const Curve::Geometry& g, double t) {
  return std::visit(
      Overloaded{
          [&](const curves::Line& l) -> Point3 {
            return l.origin + t * l.direction;
          },
          [&](const curves::Circle& c) -> Point3 {
            return c.frame.origin +
                   c.radius * (std::cos(t) * c.frame.x + std::sin(t) * c.frame.y);
          },
          [&](const curves::Ellipse& e) -> Point3 {
            return e.frame.origin + e.major * std::cos(t) * e.frame.x +
                   e.minor * std::sin(t) * e.frame.y;
          },
          [&](const curves::Polyline& pl) -> Point3 {
            return polyline_eval(pl, t, false);
          },
          [&](const curves::BSpline& b) -> Point3 {
            return de_boor(b.knots, b.control, b.degree, t);
          }},
      g);
}

Vec3 carrier_derivative(const Curve::Geometry& g, double t) {
  return std::visit(
      Overloaded{
          [&](const curves::Line& l) -> Vec3 { return l.direction; },
          [&](const curves::Circle& c) -> Vec3 {
            return c.radius *
                   (-std::sin(t) * c.frame.x + std::cos(t) * c.frame.y);
          },
          [&](const curves::Ellipse& e) -> Vec3 {
            return -e.major * std::sin(t) * e.frame.x +
                   e.minor * std::cos(t) * e.frame.y;
          },
          [&](const curves::Polyline& pl) -> Vec3 {
            return polyline_eval(pl, t, true);
          },
          [&](const curves::BSpline& b) -> Vec3 {
            if (b.degree == 0) return Vec3::Zero();
            const auto d = derivative_spline(b);
            if (d.degree == 0) {
              const int k = find_span(d.knots, 0,
                                      static_cast<int>(d.control.size()), t);
              return d.control[k];
            }
            return de_boor(d.knots, d.control, d.degree, t);
          }},
      g);
}

double range_slack(const Curve& c) {
  return 1e-9 * std::max(1.0, std::abs(c.t_end() - c.t_start()));
}

}  // namespace

// ----------------------------------------------------------------------------

Frame Frame::from_axis(const Point3& origin, const Vec3& axis,
                       const Vec3& x_hint) {
  Frame f;
  f.origin = origin;
  f.z = axis.normalized();
  Vec3 x = x_hint - x_hint.dot(f.z) * f.z;
  if (x.norm() < 1e-9) {
    const Vec3 alt = std::abs(f.z.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    x = alt - alt.dot(f.z) * f.z;
  }
  f.x = x.normalized();
  f.y = f.z.cross(f.x);
  return f;
}

Vec3 Frame::to_local(const Point3& p) const {
  const Vec3 d = p - origin;
  return {d.dot(x), d.dot(y), d.dot(z)};
}

Point3 Frame::to_world(const Vec3& l) const {
  return origin + l.x() * x + l.y() * y + l.z() * z;
}

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::line: return "line";
    case CurveKind::circle: return "circle";
    case CurveKind::ellipse: return "ellipse";
    case CurveKind::polyline: return "polyline";
    case CurveKind::bspline: return "bspline";
  }
  throw GeometryError("unknown geometry kind");
}

Curve::Curve(Geometry geometry, double t_start, double t_end,
             double fitting_error)
    : geometry_(std::move(geometry)),
      t_start_(t_start),
      t_end_(t_end),
      fitting_error_(fitting_error) {
  if (!(t_end_ >= t_start_)) throw GeometryError("curve range is empty");
  if (fitting_error_ < 0) throw GeometryError("negative fitting error");
  const auto k = kind();
  if (fitting_error_ > 0 && k != CurveKind::bspline &&
      k != CurveKind::polyline)
    throw GeometryError("fitting error only applies to fitted curves");
}

Curve Curve::line(const Point3& origin, const Vec3& direction, double t_start,
                  double t_end) {
  return Curve(curves::Line{origin, direction.normalized()}, t_start, t_end);
}

Curve Curve::segment(const Point3& a, const Point3& b) {
  const double len = (b - a).norm();
  if (len == 0.0) throw GeometryError("degenerate segment");
  return line(a, (b - a) / len, 0.0, len);
}

Curve Curve::circle(const Frame& frame, double radius, double t_start,
                    double t_end) {
  if (!(radius > 0)) throw GeometryError("circle radius must be positive");
  return Curve(curves::Circle{frame, radius}, t_start, t_end);
}

Curve Curve::ellipse(const Frame& frame, double major, double minor,
                     double t_start, double t_end) {
  if (!(major > 0 && minor > 0))
    throw GeometryError("ellipse axes must be positive");
  return Curve(curves::Ellipse{frame, major, minor}, t_start, t_end);
}

Curve Curve::polyline(std::vector<Point3> points, std::vector<Vec3> tangents,
                      bool closed, double fitting_error) {
  if (points.size() < 2) throw GeometryError("polyline needs two points");
  if (!tangents.empty() && tangents.size() != points.size())
    throw GeometryError("polyline tangent count mismatch");
  curves::Polyline pl;
  pl.closed = closed;
  pl.params.push_back(0.0);
  const std::size_t n = points.size();
  const std::size_t segs = closed ? n : n - 1;
  for (std::size_t i = 0; i < segs; ++i)
    pl.params.push_back(pl.params.back() +
                        (points[(i + 1) % n] - points[i]).norm());
  for (auto& t : tangents) t.normalize();
  pl.points = std::move(points);
  pl.tangents = std::move(tangents);
  const double total = pl.params.back();
  return Curve(std::move(pl), 0.0, total, fitting_error);
}

Curve Curve::bspline(int degree, std::vector<double> knots,
                     std::vector<Point3> control, double fitting_error) {
  if (degree < 1) throw GeometryError("bspline degree must be >= 1");
  if (knots.size() != control.size() + degree + 1)
    throw GeometryError("bspline knot count mismatch");
  const double a = knots[degree];
  const double b = knots[control.size()];
  return Curve(curves::BSpline{degree, std::move(knots), std::move(control)},
               a, b, fitting_error);
}

CurveKind Curve::kind() const {
  if (geometry_.valueless_by_exception())
    throw GeometryError("unknown geometry kind");
  return static_cast<CurveKind>(geometry_.index());
}

bool Curve::periodic() const {
  switch (kind()) {
    case CurveKind::circle:
    case CurveKind::ellipse: return true;
    case CurveKind::polyline:
      return std::get<curves::Polyline>(geometry_).closed;
    default: return false;
  }
}

double Curve::period() const {
  if (!periodic()) return 0.0;
  if (kind() == CurveKind::polyline)
    return polyline_total(std::get<curves::Polyline>(geometry_));
  return kTwoPi;
}

bool Curve::closed() const {
  return periodic() && (t_end_ - t_start_) >= period() * (1.0 - 1e-12);
}

Curve Curve::with_range(double t_start, double t_end) const {
  Curve c = *this;
  if (!(t_end >= t_start)) throw GeometryError("curve range is empty");
  c.t_start_ = t_start;
  c.t_end_ = t_end;
  return c;
}

Curve Curve::reversed_copy() const {
  Curve c = *this;
  std::visit(
      Overloaded{
          [&](curves::Line& l) {
            l.direction = -l.direction;
            c.t_start_ = -t_end_;
            c.t_end_ = -t_start_;
          },
          [&](curves::Circle& ci) {
            ci.frame.y = -ci.frame.y;
            ci.frame.z = -ci.frame.z;
            c.t_start_ = -t_end_;
            c.t_end_ = -t_start_;
          },
          [&](curves::Ellipse& e) {
            e.frame.y = -e.frame.y;
            e.frame.z = -e.frame.z;
            c.t_start_ = -t_end_;
            c.t_end_ = -t_start_;
          },
          [&](curves::Polyline& pl) {
            const double total = polyline_total(pl);
            if (pl.closed) {
              // new point j is old point (n - j) mod n, so old param s maps
              // to total - s
              std::vector<Point3> pts;
              std::vector<Vec3> tans;
              const std::size_t n = pl.points.size();
              for (std::size_t j = 0; j < n; ++j) {
                pts.push_back(pl.points[(n - j) % n]);
                if (!pl.tangents.empty())
                  tans.push_back(-pl.tangents[(n - j) % n]);
              }
              pl.points = std::move(pts);
              pl.tangents = std::move(tans);
              std::vector<double> params{0.0};
              for (std::size_t j = 0; j < n; ++j)
                params.push_back(params.back() +
                                 (pl.points[(j + 1) % n] - pl.points[j]).norm());
              pl.params = std::move(params);
            } else {
              std::reverse(pl.points.begin(), pl.points.end());
              std::reverse(pl.tangents.begin(), pl.tangents.end());
              for (auto& t : pl.tangents) t = -t;
              std::vector<double> params;
              for (auto it = pl.params.rbegin(); it != pl.params.rend(); ++it)
                params.push_back(total - *it);
              pl.params = std::move(params);
            }
            c.t_start_ = total - t_end_;
            c.t_end_ = total - t_start_;
          },
          [&](curves::BSpline& b) {
            const double a = b.knots.front(), z = b.knots.back();
            std::reverse(b.control.begin(), b.control.end());
            std::vector<double> k;
            for (auto it = b.knots.rbegin(); it != b.knots.rend(); ++it)
              k.push_back(a + z - *it);
            b.knots = std::move(k);
            c.t_start_ = a + z - t_end_;
            c.t_end_ = a + z - t_start_;
          }},
      c.geometry_);
  return c;
}

Point3 eval_curve(const Curve& c, double t) {
  const double slack = range_slack(c);
  if (t < c.t_start() - slack || t > c.t_end() + slack)
    throw GeometryError("parameter outside curve range");
  if (c.kind() == CurveKind::bspline || (c.kind() == CurveKind::polyline &&
                                         !c.periodic()))
    t = std::clamp(t, c.t_start(), c.t_end());
  return carrier_point(c.geometry(), t);
}

Vec3 curve_derivative(const Curve& c, double t) {
  const double slack = range_slack(c);
  if (t < c.t_start() - slack || t > c.t_end() + slack)
    throw GeometryError("parameter outside curve range");
  if (c.kind() == CurveKind::bspline || (c.kind() == CurveKind::polyline &&
                                         !c.periodic()))
    t = std::clamp(t, c.t_start(), c.t_end());
  return carrier_derivative(c.geometry(), t);
}

Point3 curve_start(const Curve& c) { return eval_curve(c, c.t_start()); }
Point3 curve_end(const Curve& c) { return eval_curve(c, c.t_end()); }

std::vector<double> sample_params(const Curve& c, int count) {
  std::vector<double> ts;
  ts.reserve(count + 1);
  const double a = c.t_start(), b = c.t_end();
  for (int i = 0; i <= count; ++i) ts.push_back(a + (b - a) * i / count);
  return ts;
}

double curve_length(const Curve& c, int samples) {
  // Simpson on |C'| over each sample interval.
  const auto ts = sample_params(c, samples);
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double a = ts[i], b = ts[i + 1], m = 0.5 * (a + b);
    len += (b - a) / 6.0 *
           (curve_derivative(c, a).norm() + 4 * curve_derivative(c, m).norm() +
            curve_derivative(c, b).norm());
  }
  return len;
}

namespace {

struct Span {
  double a, b;
};

std::vector<Span> curve_spans(const Curve& c) {
  std::vector<Span> spans;
  const double a = c.t_start(), b = c.t_end();
  if (c.kind() == CurveKind::bspline) {
    const auto& bs = std::get<curves::BSpline>(c.geometry());
    double prev = a;
    for (double k : bs.knots) {
      if (k > prev && k < b) {
        spans.push_back({prev, k});
        prev = k;
      }
    }
    spans.push_back({prev, b});
  } else {
    spans.push_back({a, b});
  }
  return spans;
}

double refine_closest(const Curve& c, const Point3& p, double t) {
  const double a = c.t_start(), b = c.t_end();
  const double h = 1e-6 * std::max(1.0, b - a);
  for (int it = 0; it < 50; ++it) {
    const Vec3 r = carrier_point(c.geometry(), t) - p;
    const Vec3 d1 = carrier_derivative(c.geometry(), t);
    const Vec3 d2 = (carrier_derivative(c.geometry(), t + h) -
                     carrier_derivative(c.geometry(), t - h)) /
                    (2 * h);
    const double f = r.dot(d1);
    double fp = d1.squaredNorm() + r.dot(d2);
    if (fp <= 0) fp = d1.squaredNorm();
    if (fp == 0) break;
    const double step = f / fp;
    const double next = std::clamp(t - step, a, b);
    const double moved = std::abs(next - t);
    t = next;
    if (moved < 1e-12) break;
  }
  return t;
}

CurveProjection closest_on_polyline(const Curve& c, const Point3& p) {
  const auto& pl = std::get<curves::Polyline>(c.geometry());
  const double a = c.t_start(), b = c.t_end();
  // chord projection per covered segment, then Newton on the best few
  std::vector<std::pair<double, double>> cands;  // (dist, t)
  const double total = polyline_total(pl);
  const double base = pl.closed ? std::floor(a / total) * total : 0.0;
  const std::size_t segs = pl.params.size() - 1;
  for (int wrap = 0; wrap < (pl.closed ? 3 : 1); ++wrap) {
    const double off = base + wrap * total;
    for (std::size_t i = 0; i < segs; ++i) {
      const double s0 = pl.params[i] + off, s1 = pl.params[i + 1] + off;
      if (s1 < a || s0 > b) continue;
      const Point3& p0 = poly_point(pl, i);
      const Point3& p1 = poly_point(pl, i + 1);
      const Vec3 d = p1 - p0;
      const double dd = d.squaredNorm();
      double s = dd > 0 ? std::clamp((p - p0).dot(d) / dd, 0.0, 1.0) : 0.0;
      double t = std::clamp(s0 + s * (s1 - s0), a, b);
      cands.push_back({(carrier_point(c.geometry(), t) - p).norm(), t});
    }
  }
  std::sort(cands.begin(), cands.end());
  CurveProjection best{a, std::numeric_limits<double>::infinity()};
  for (std::size_t k = 0; k < std::min<std::size_t>(4, cands.size()); ++k) {
    const double t = refine_closest(c, p, cands[k].second);
    const double dist = (carrier_point(c.geometry(), t) - p).norm();
    if (dist < best.distance) best = {t, dist};
  }
  return best;
}

}  // namespace

CurveProjection closest_param_on_curve(const Curve& c, const Point3& p) {
  if (c.kind() == CurveKind::polyline) return closest_on_polyline(c, p);
  constexpr int kSeeds = 64;
  std::vector<std::pair<double, double>> samples;  // (t, dist)
  for (const auto& span : curve_spans(c)) {
    for (int i = 0; i <= kSeeds; ++i) {
      const double t = span.a + (span.b - span.a) * i / kSeeds;
      samples.push_back({t, (carrier_point(c.geometry(), t) - p).norm()});
    }
  }
  std::vector<std::pair<double, double>> minima;  // (dist, t)
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const bool left = i == 0 || samples[i].second <= samples[i - 1].second;
    const bool right =
        i + 1 == samples.size() || samples[i].second <= samples[i + 1].second;
    if (left && right) minima.push_back({samples[i].second, samples[i].first});
  }
  std::sort(minima.begin(), minima.end());
  CurveProjection best{c.t_start(), std::numeric_limits<double>::infinity()};
  for (std::size_t k = 0; k < std::min<std::size_t>(4, minima.size()); ++k) {
    const double t = refine_closest(c, p, minima[k].second);
    const double dist = (carrier_point(c.geometry(), t) - p).norm();
    if (dist < best.distance) best = {t, dist};
  }
  return best;
}

int degree(const Curve& c) {
  switch (c.kind()) {
    case CurveKind::line: return 1;
    case CurveKind::circle:
    case CurveKind::ellipse: return 2;
    case CurveKind::polyline: return 1;
    case CurveKind::bspline:
      return std::get<curves::BSpline>(c.geometry()).degree;
  }
  throw GeometryError("unknown geometry kind");
}

}  // namespace brepair
