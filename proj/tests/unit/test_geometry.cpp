#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hmslope/geometry.hpp"
#include "hmslope/measure_exact.hpp"

using namespace hmslope;

namespace {

const Point I(0.0, 1.0);

BoundaryArc upper_half() { return BoundaryArc(Point(-1.0, 0.0), Point(1.0, 0.0)); }

}  // namespace

TEST(HalfLine, DistanceExamples) {
    EXPECT_DOUBLE_EQ(dist_to_halfline(Point(0, 0), HalfLine{1.0 + I}), 1.0);
    EXPECT_DOUBLE_EQ(dist_to_halfline(Point(2, 1), HalfLine{1.0 + I}), 1.0);
    EXPECT_DOUBLE_EQ(dist_to_halfline(Point(3, 4), HalfLine{Point(0, 0)}), 5.0);
}

TEST(HalfLine, NearestPointExamples) {
    EXPECT_EQ(nearest_point_on_halfline(Point(0, 0), HalfLine{1.0 + I}), I);
    EXPECT_EQ(nearest_point_on_halfline(Point(2, 1), HalfLine{1.0 + I}), 1.0 + I);
    EXPECT_EQ(nearest_point_on_halfline(Point(-5, 0.3), HalfLine{Point(1, 0)}), Point(-5, 0));
}

TEST(HalfLine, DistanceMatchesNearestPoint) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const Point p(u(gen), u(gen));
        const HalfLine h{Point(u(gen), u(gen))};
        EXPECT_NEAR(dist_to_halfline(p, h), std::abs(p - nearest_point_on_halfline(p, h)), 1e-12);
        const HorizontalSegment s{u(gen), -std::abs(u(gen)), std::abs(u(gen))};
        EXPECT_NEAR(dist_to_segment(p, s), std::abs(p - nearest_point_on_segment(p, s)), 1e-12);
    }
}

TEST(RectWitness, ContainsAndBorder) {
    const RectWitness r(Point(0, 0), 1, 1, 2);
    EXPECT_TRUE(r.contains(Point(0, 0)));
    EXPECT_FALSE(r.contains(Point(1, 0)));
    const auto [top, bottom] = RectWitness(I, 2, 1, 4).horizontal_border();
    EXPECT_DOUBLE_EQ(top.y, 3.0);
    EXPECT_DOUBLE_EQ(bottom.y, 0.0);
    EXPECT_DOUBLE_EQ(top.x_lo, -2.0);
    EXPECT_DOUBLE_EQ(top.x_hi, 2.0);
    EXPECT_DOUBLE_EQ(bottom.x_lo, -2.0);
    EXPECT_DOUBLE_EQ(bottom.x_hi, 2.0);
    EXPECT_THROW(RectWitness(Point(0, 0), 0, 1, 1), GeometryError);
}

TEST(SlopeOf, Examples) {
    EXPECT_DOUBLE_EQ(slope_of(Point(1, 0), Point(0, 0)), 0.0);
    EXPECT_DOUBLE_EQ(slope_of(Point(1, 0), Point(0.9, 0)), 0.0);
    // 1 - 0.1i sits outside the closed disk and is rejected; tangential
    // approach along the circle gives the pi/2 limit instead.
    EXPECT_THROW(slope_of(Point(1, 0), Point(1, -0.1)), GeometryError);
    for (double eps : {1e-2, 1e-4, 1e-6})
        EXPECT_NEAR(slope_of(Point(1, 0), std::polar(1.0, -eps)), kPi / 2 - eps / 2, 1e-9);
}

TEST(SlopeOf, Rejects) {
    EXPECT_THROW(slope_of(Point(2, 0), Point(0, 0)), GeometryError);
    EXPECT_THROW(slope_of(Point(1, 0), Point(1, 0)), GeometryError);
}

TEST(BoundaryArc, LengthAndComplement) {
    EXPECT_NEAR(upper_half().length(), kPi, 1e-15);
    const BoundaryArc quarter(I, Point(1, 0));
    EXPECT_NEAR(quarter.length(), kPi / 2, 1e-15);
    EXPECT_NEAR(quarter.complement().length(), 1.5 * kPi, 1e-15);
    EXPECT_THROW(BoundaryArc(Point(1, 0), Point(1, 0)), GeometryError);
    EXPECT_THROW(BoundaryArc(Point(0.5, 0), Point(1, 0)), GeometryError);
}

TEST(LevelSet, HalfIsDiameter) {
    const LevelArc l = level_set_arc(0.5, upper_half());
    EXPECT_TRUE(l.is_segment);
    for (Point p : l.sample(9)) EXPECT_NEAR(p.imag(), 0.0, 1e-15);
    const LevelArc v = level_set_arc(0.5, BoundaryArc(-I, I));
    EXPECT_TRUE(v.is_segment);
    for (Point p : v.sample(9)) EXPECT_NEAR(p.real(), 0.0, 1e-15);
}

TEST(LevelSet, QuarterBulgesAwayFromArc) {
    const BoundaryArc arc = upper_half();
    const LevelArc l = level_set_arc(0.25, arc);
    EXPECT_FALSE(l.is_segment);
    const auto pts = l.sample(3);
    ASSERT_EQ(pts.size(), 3u);
    for (Point p : pts) {
        EXPECT_LT(p.imag(), 0.0);
        EXPECT_NEAR(disk_arc_measure(p, arc), 0.25, 1e-9);
    }
}

TEST(LevelSet, EndpointsAndMeetingAngle) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
    for (int i = 0; i < 50; ++i) {
        const Point chi = std::polar(1.0, ang(gen));
        const Point xi = std::polar(1.0, ang(gen));
        if (std::abs(chi - xi) < 1e-3) continue;
        const BoundaryArc arc(chi, xi);
        for (double k : {0.1, 0.25, 0.5, 0.75, 0.9}) {
            const LevelArc l = level_set_arc(k, arc);
            EXPECT_NEAR(std::abs(l.chi - chi), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(l.xi - xi), 0.0, 1e-12);
            EXPECT_NEAR(l.meeting_angle_at_xi(), k * kPi, 1e-9);
            EXPECT_NEAR(l.meeting_angle_at_chi(), k * kPi, 1e-9);
            EXPECT_NEAR(std::abs(l.tangent_at_xi() - tangent_ray(k, arc).direction()), 0.0, 1e-12);
            for (Point p : l.sample(7)) EXPECT_NEAR(disk_arc_measure(p, arc), k, 1e-9);
        }
    }
}

TEST(TangentRay, SlopeExamples) {
    const BoundaryArc arc = upper_half();
    const TangentRay half = tangent_ray(0.5, arc);
    EXPECT_NEAR(std::abs(half.direction() - Point(-1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(slope_of(Point(1, 0), half.at(0.5)), 0.0, 1e-15);
    const TangentRay q = tangent_ray(0.25, arc);
    const TangentRay tq = tangent_ray(0.75, arc);
    for (double s : {0.1, 0.5, 1.0}) {
        EXPECT_NEAR(slope_of(Point(1, 0), q.at(s * q.exit_parameter())), kPi / 4, 1e-12);
        EXPECT_NEAR(slope_of(Point(1, 0), tq.at(s * tq.exit_parameter())), -kPi / 4, 1e-12);
    }
}

TEST(TangentRay, SlopeIdentityOnRandomArcs) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
    std::uniform_real_distribution<double> level(0.01, 0.99);
    std::uniform_real_distribution<double> frac(0.01, 0.99);
    for (int i = 0; i < 200; ++i) {
        const Point chi = std::polar(1.0, ang(gen));
        const Point xi = std::polar(1.0, ang(gen));
        if (std::abs(chi - xi) < 1e-3) continue;
        const double k = level(gen);
        const TangentRay ray = tangent_ray(k, BoundaryArc(chi, xi));
        const Point p = ray.at(frac(gen) * ray.exit_parameter());
        EXPECT_LE(std::abs(p), 1.0 + 1e-12);
        EXPECT_NEAR(slope_of(xi, p), kPi * (0.5 - k), 1e-12);
    }
}

TEST(TangentRay, RejectsLevelOutsideUnitInterval) {
    EXPECT_THROW(tangent_ray(0.0, upper_half()), GeometryError);
    EXPECT_THROW(level_set_arc(1.0, upper_half()), GeometryError);
}

TEST(Mobius, Examples) {
    const auto id = mobius_to_zero(Point(0, 0));
    EXPECT_EQ(id(Point(0.3, 0.2)), Point(0.3, 0.2));
    const auto t = mobius_to_zero(Point(0.5, 0));
    EXPECT_NEAR(std::abs(t(Point(0.5, 0))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(t(Point(1, 0)) - Point(1, 0)), 0.0, 1e-15);
    EXPECT_THROW(mobius_to_zero(Point(1, 0)), GeometryError);
}

TEST(Mobius, PreservesCircle) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
    std::uniform_real_distribution<double> rad(0.0, 0.99);
    for (int i = 0; i < 200; ++i) {
        const auto t = mobius_to_zero(std::polar(rad(gen), ang(gen)));
        EXPECT_NEAR(std::abs(t(std::polar(1.0, ang(gen)))), 1.0, 1e-12);
    }
}

TEST(SlopeInterval, Validates) {
    EXPECT_NO_THROW(SlopeInterval(-kPi / 2, kPi / 2));
    EXPECT_THROW(SlopeInterval(0.2, 0.1), GeometryError);
    EXPECT_THROW(SlopeInterval(-2.0, 0.0), GeometryError);
    EXPECT_TRUE(SlopeInterval(0.1, 0.1).is_singleton(0.0));
}

TEST(CheckedPoint, RejectsNonFinite) {
    EXPECT_THROW(checked_point(Point(NAN, 0)), GeometryError);
    EXPECT_THROW(checked_point(Point(0, INFINITY)), GeometryError);
}
