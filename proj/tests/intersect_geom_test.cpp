#include "brepair/intersect.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace brepair {
namespace {

Surface plane_xy(double z = 0) {
  return Surface::plane(Frame::from_axis({0, 0, z}, {0, 0, 1}));
}

void expect_on_both(const GeomIntersectionResult& r, const Surface& a, const Surface& b) {
  for (const auto& c : r.curves)
    for (double t : sample_params(c, 32)) {
      const Point3 p = eval_curve(c, t);
      EXPECT_LE(std::abs(signed_distance(a, p)), r.est_error);
      EXPECT_LE(std::abs(signed_distance(b, p)), r.est_error);
    }
}

TEST(SurfaceSurface, OrthogonalPlanesGiveALine) {
  const Surface a = plane_xy();
  const Surface b = Surface::plane(Frame::from_axis({0, 0, 0}, {1, 0, 0}));
  const auto r = surface_surface(a, b);
  ASSERT_EQ(r.curves.size(), 1u);
  EXPECT_EQ(r.curves[0].kind(), CurveKind::line);
  expect_on_both(r, a, b);
}

TEST(SurfaceSurface, PlaneThroughSphereCenterGivesUnitCircle) {
  const Surface s = Surface::sphere(Frame{}, 1.0);
  const auto r = surface_surface(plane_xy(), s);
  ASSERT_EQ(r.curves.size(), 1u);
  ASSERT_EQ(r.curves[0].kind(), CurveKind::circle);
  EXPECT_NEAR(std::get<curves::Circle>(r.curves[0].geometry()).radius, 1.0, 1e-15);
}

TEST(SurfaceSurface, PlaneTangentToTorusTubeTop) {
  const Surface torus = Surface::torus(Frame{}, 2.0, 0.5);
  const auto r = surface_surface(torus, plane_xy(0.5));
  ASSERT_EQ(r.curves.size(), 1u);
  const auto& c = std::get<curves::Circle>(r.curves[0].geometry());
  // elimination oracle: with z fixed the quartic in rho has a double root
  const double z = 0.5, R = 2, rr = 0.5;
  double best_rho = 0, best = 1e300;
  for (int i = 0; i <= 2000000; ++i) {
    const double rho = 1.0 + 2.0 * i / 2000000;
    const double k = rho * rho + z * z + R * R - rr * rr;
    const double q = std::abs(k * k - 4 * R * R * rho * rho);
    if (q < best) {
      best = q;
      best_rho = rho;
    }
  }
  EXPECT_NEAR(c.radius, best_rho, 1e-6);
  EXPECT_NEAR(c.frame.origin.z(), 0.5, 1e-15);
}

TEST(SurfaceSurface, ObliquePlaneCylinderEllipse) {
  const Surface cyl = Surface::cylinder(Frame{}, 1.0);
  const Surface pl = Surface::plane(Frame::from_axis({0, 0, 0}, {0, std::sin(0.3), std::cos(0.3)}));
  const auto r = surface_surface(pl, cyl);
  ASSERT_EQ(r.curves.size(), 1u);
  ASSERT_EQ(r.curves[0].kind(), CurveKind::ellipse);
  const auto& e = std::get<curves::Ellipse>(r.curves[0].geometry());
  EXPECT_NEAR(e.major, 1 / std::cos(0.3), 1e-12);
  EXPECT_NEAR(e.minor, 1.0, 1e-12);
  expect_on_both(r, pl, cyl);
}

TEST(SurfaceSurface, ParallelPlaneCylinder) {
  const Surface cyl = Surface::cylinder(Frame{}, 1.0);
  const Box3 box(Vec3::Constant(-3), Vec3::Constant(3));
  auto count = [&](double x) {
    return surface_surface(Surface::plane(Frame::from_axis({x, 0, 0}, {1, 0, 0})), cyl,
                           {box, {}, {}, 64})
        .curves.size();
  };
  EXPECT_EQ(count(0.5), 2u);
  EXPECT_EQ(count(1.0), 1u);
  EXPECT_EQ(count(1.5), 0u);
}

TEST(SurfaceSurface, CoincidentPlanesOverlap) {
  try {
    surface_surface(plane_xy(), plane_xy());
    FAIL();
  } catch (const IntersectError& e) {
    EXPECT_EQ(e.kind(), IntersectError::Kind::overlap);
  }
}

TEST(SurfaceSurface, MarchedSpiricSection) {
  const Surface torus = Surface::torus(Frame{}, 2.0, 0.5);
  const Surface pl = Surface::plane(Frame::from_axis({0, std::sqrt(3.0), 0}, {0, 1, 0}));
  const auto r = surface_surface(pl, torus);
  ASSERT_EQ(r.curves.size(), 1u);
  EXPECT_EQ(r.curves[0].kind(), CurveKind::polyline);
  EXPECT_TRUE(r.curves[0].closed());
  EXPECT_LT(r.est_error, 1e-8);
  expect_on_both(r, pl, torus);
}

TEST(SurfaceSurface, MarchedPerpendicularCylinders) {
  const Surface a = Surface::cylinder(Frame{}, 1.0);
  const Surface b = Surface::cylinder(Frame::from_axis({0, 0, 0}, {1, 0, 0}, {0, 1, 0}), 0.5);
  const auto r = surface_surface(a, b, {Box3(Vec3::Constant(-2), Vec3::Constant(2)), {}, {}, 64});
  EXPECT_EQ(r.curves.size(), 2u);
  expect_on_both(r, a, b);
}

TEST(CurveSurface, LineThroughSphere) {
  const auto hits = curve_surface(Curve::segment({0, 0, -2}, {0, 0, 2}), Surface::sphere(Frame{}, 1));
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_NEAR((hits[0].p - Point3(0, 0, -1)).norm(), 0, 1e-12);
  EXPECT_NEAR((hits[1].p - Point3(0, 0, 1)).norm(), 0, 1e-12);
}

TEST(CurveSurface, AxisAgainstPlane) {
  const auto hits = curve_surface(Curve::line({0, 0, 0}, {1, 0, 0}, -5, 5),
                                  Surface::plane(Frame::from_axis({0.5, 0, 0}, {1, 0, 0})));
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_NEAR(hits[0].p.x(), 0.5, 1e-12);
}

TEST(CurveSurface, OuterEquatorLiesOnTorus) {
  const Surface torus = Surface::torus(Frame{}, 2.0, 0.5);
  const Curve eq = Curve::circle(Frame{}, 2.5);
  for (double t : sample_params(eq, 64)) {
    const Point3 p = eval_curve(eq, t);
    const double k = p.squaredNorm() + 4 - 0.25;
    EXPECT_NEAR(k * k - 16 * (p.x() * p.x() + p.y() * p.y()), 0, 1e-10);
  }
  EXPECT_THROW(curve_surface(eq, torus), IntersectError);
}

TEST(CurveSurface, TangentLineTouchesTorusOnce) {
  const Surface torus = Surface::torus(Frame{}, 2.0, 0.5);
  const auto hits = curve_surface(Curve::line({2.5, 0, -1}, {0, 0, 1}, 0, 2), torus);
  ASSERT_EQ(hits.size(), 1u);
  // quartic along the line reduces to z^2 = 0: double root at z = 0
  EXPECT_NEAR((hits[0].p - Point3(2.5, 0, 0)).norm(), 0, 1e-7);
  EXPECT_TRUE(hits[0].tangential);
}

TEST(CurveSurface, MoreAccurateThanMarchedSurfaceIntersection) {
  const Surface torus = Surface::torus(Frame{}, 2.0, 0.5);
  const Surface pl = Surface::plane(Frame::from_axis({0, std::sqrt(3.0), 0}, {0, 1, 0}));
  const double ssi = surface_surface(pl, torus).est_error;
  const auto hits = curve_surface(Curve::line({-3, std::sqrt(3.0), 0.1}, {1, 0, 0}, 0, 6), torus);
  ASSERT_EQ(hits.size(), 2u);
  for (const auto& h : hits) {
    EXPECT_LE(std::abs(signed_distance(torus, h.p)), 1e-9);
    EXPECT_LE(std::abs(signed_distance(torus, h.p)), ssi);
  }
}

TEST(CurveCurve, CrossingAndParallelLines) {
  const auto x = curve_curve(Curve::segment({-1, 0, 0}, {1, 0, 0}), Curve::segment({0, -1, 0}, {0, 1, 0}));
  ASSERT_EQ(x.size(), 1u);
  EXPECT_NEAR(x[0].p.norm(), 0, 1e-12);
  EXPECT_TRUE(curve_curve(Curve::segment({0, 0, 0}, {1, 0, 0}),
                          Curve::segment({0, 1, 0}, {1, 1, 0})).empty());
}

TEST(CurveCurve, TwoUnitCircles) {
  Frame f2;
  f2.origin = {1, 0, 0};
  const auto hits = curve_curve(Curve::circle(Frame{}, 1), Curve::circle(f2, 1));
  ASSERT_EQ(hits.size(), 2u);
  // algebraic oracle: subtracting the circle equations gives x = 1/2
  const double y = std::sqrt(1 - 0.25);
  for (const auto& h : hits) {
    EXPECT_NEAR(h.p.x(), 0.5, 1e-10);
    EXPECT_NEAR(std::abs(h.p.y()), y, 1e-10);
  }
  EXPECT_GT(hits[0].p.y() * hits[1].p.y(), -1.0);
}

TEST(CurveCurve, GapVariantAndOverlap) {
  const Curve a = Curve::segment({-1, 0, 0}, {1, 0, 0});
  const Curve b = Curve::segment({0, -1, 1e-6}, {0, 1, 1e-6});
  EXPECT_TRUE(curve_curve(a, b).empty());
  const auto near = curve_curve(a, b, 1e-5);
  ASSERT_EQ(near.size(), 1u);
  EXPECT_NEAR(near[0].gap, 1e-6, 1e-12);
  EXPECT_THROW(curve_curve(a, Curve::segment({-0.5, 0, 0}, {0.5, 0, 0})), IntersectError);
}

}  // namespace
}  // namespace brepair
