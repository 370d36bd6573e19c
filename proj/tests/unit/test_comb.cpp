#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hmslope/comb.hpp"

using namespace hmslope;

namespace {

const Point I(0.0, 1.0);

SequencePlan six_n(int pairs) { return plan_forward(-kPi / 4, kPi / 6, 6.0, pairs); }

SequencePlan six_n_explicit() {
    const std::vector<double> w{10, 20, 30, 40};
    return assign_widths(six_n(2), w);
}

SequencePlan six_n_wide(int pairs) {
    std::vector<double> w;
    for (int i = 0; i < 2 * pairs; ++i) w.push_back(100.0 * std::pow(7.0, i));
    return assign_widths(six_n(pairs), w);
}

SequencePlan backward_six(int pairs) { return plan_backward(-kPi / 4, kPi / 6, 1.0 / 3.0, pairs); }

SequencePlan with_growing_widths(SequencePlan plan, double base) {
    std::vector<double> w;
    for (int i = 0; i < plan.blocks(); ++i) w.push_back(base * (i + 1));
    return assign_widths(plan, w);
}

}  // namespace

TEST(PlanForward, SixToTheN) {
    const SequencePlan p = six_n(4);
    EXPECT_DOUBLE_EQ(p.limit_high, 0.75);
    EXPECT_NEAR(p.limit_low, 1.0 / 3.0, 1e-15);
    for (int n = 1; n <= 4; ++n) {
        EXPECT_NEAR(p.r[n - 1], std::pow(6.0, n), 1e-12 * std::pow(6.0, n));
        EXPECT_NEAR(p.rho[n - 1], 3.0 * std::pow(6.0, n), 1e-12 * std::pow(6.0, n));
    }
}

TEST(PlanForward, RatioIdentities) {
    const SequencePlan p = six_n(6);
    for (int n = 1; n <= 6; ++n) {
        const double r = p.r[n - 1], rho = p.rho[n - 1];
        EXPECT_NEAR(rho / (rho + r), 0.75, 1e-14);
        EXPECT_LT(std::abs(r * p.limit_high - (1 - p.limit_high) * rho), 1e-12 * r);
        if (n >= 2) {
            const double prev = p.rho[n - 2];
            EXPECT_NEAR(prev / (prev + r), 1.0 / 3.0, 1e-14);
            EXPECT_LT(std::abs(r * p.limit_low - (1 - p.limit_low) * prev), 1e-12 * r);
        }
    }
}

TEST(PlanForward, Rejects) {
    EXPECT_THROW(plan_forward(0.1, 0.1, 6, 4), PlanError);
    EXPECT_THROW(plan_forward(0.2, 0.1, 6, 4), PlanError);
    EXPECT_THROW(plan_forward(-kPi / 2, 0.1, 6, 4), PlanError);
    EXPECT_THROW(plan_forward(-0.1, 0.1, 0.0, 4), PlanError);
    EXPECT_THROW(plan_forward(-0.1, 0.1, 1.0, 0), PlanError);
}

TEST(PlanForward, RandomAnglesSatisfyRecurrences) {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> ang(-1.5, 1.5);
    for (int i = 0; i < 100; ++i) {
        double a = ang(gen), b = ang(gen);
        if (std::abs(a - b) < 1e-3) continue;
        if (a > b) std::swap(a, b);
        const SequencePlan p = plan_forward(a, b, 1.0, 5);
        EXPECT_NO_THROW(validate_plan(p));
        for (int n = 1; n < 5; ++n) {
            EXPECT_GT(p.r[n], p.r[n - 1]);
            EXPECT_GT(p.rho[n], p.rho[n - 1]);
        }
    }
}

TEST(PlanBackward, SixToTheMinusN) {
    const SequencePlan p = backward_six(5);
    EXPECT_EQ(p.direction, Direction::Backward);
    for (int n = 1; n <= 5; ++n) {
        EXPECT_NEAR(p.r[n - 1], std::pow(6.0, -(n - 1)) / 3.0, 1e-15);
        EXPECT_NEAR(p.rho[n - 1], std::pow(6.0, -n), 1e-15);
        EXPECT_NEAR(p.rho[n - 1] / (p.rho[n - 1] + p.r[n - 1]), 1.0 / 3.0, 1e-14);
        if (n >= 2) EXPECT_NEAR(p.rho[n - 2] / (p.rho[n - 2] + p.r[n - 1]), 0.75, 1e-14);
    }
    EXPECT_THROW(plan_backward(-kPi / 4, kPi / 6, 0.0, 3), PlanError);
    EXPECT_THROW(plan_backward(-kPi / 4, kPi / 6, -1.0, 3), PlanError);
    EXPECT_THROW(plan_backward(0.2, 0.2, 1.0, 3), PlanError);
}

TEST(PlanSpecial, FullInterval) {
    const SequencePlan p = plan_backward_special({SpecialMode::FullInterval, 0.0, 0}, 1.0, 3);
    // By hand: rho1 = 1/1, r2 = 1/2, rho2 = (1/2)/2, r3 = (1/4)/3, rho3 = (1/12)/3.
    const std::vector<double> r{1.0, 0.5, 1.0 / 12}, rho{1.0, 0.25, 1.0 / 36};
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(p.r[i], r[i], 1e-15);
        EXPECT_NEAR(p.rho[i], rho[i], 1e-15);
    }
    EXPECT_EQ(p.limit_high, 1.0);
    EXPECT_EQ(p.limit_low, 0.0);
}

TEST(PlanSpecial, B2ZeroRatioTendsToZero) {
    const SequencePlan p = plan_backward_special({SpecialMode::B2Zero, 0.75, 3}, 1.0, 8);
    for (int n = 1; n <= 8; ++n) {
        const double r = p.r[n - 1], rho = p.rho[n - 1];
        EXPECT_NEAR(rho / (rho + r), 1.0 / (n + 3 + 1), 1e-14);
        if (n >= 2) EXPECT_NEAR(p.rho[n - 2] / (p.rho[n - 2] + r), 0.75, 1e-14);
    }
}

TEST(PlanSpecial, B1OneRatioTendsToOne) {
    const SequencePlan p = plan_backward_special({SpecialMode::B1One, 1.0 / 3.0, 5}, 1.0, 8);
    for (int n = 2; n <= 8; ++n) {
        const double prev = p.rho[n - 2], r = p.r[n - 1];
        EXPECT_NEAR(prev / (prev + r), (n + 5.0) / (n + 6.0), 1e-14);
        EXPECT_NEAR(p.rho[n - 1] / (p.rho[n - 1] + r), 1.0 / 3.0, 1e-14);
    }
}

TEST(PlanSpecial, RejectsSmallM) {
    EXPECT_THROW(plan_backward_special({SpecialMode::B2Zero, 0.25, 0}, 1.0, 3), PlanError);
    EXPECT_NO_THROW(plan_backward_special({SpecialMode::B2Zero, 0.25, 3}, 1.0, 3));
    EXPECT_THROW(plan_backward_special({SpecialMode::B1One, 0.75, 0}, 1.0, 3), PlanError);
    EXPECT_THROW(plan_backward_special({SpecialMode::None, 0.5, 0}, 1.0, 3), PlanError);
}

TEST(PlanSpecial, VerbatimReading) {
    // Without the rho_{n-1} factor r_n is constant in B2Zero mode.
    EXPECT_THROW(plan_backward_special({SpecialMode::B2Zero, 0.75, 3}, 1.0, 4, RecurrenceReading::Verbatim),
                 PlanError);
    const SequencePlan v =
        plan_backward_special({SpecialMode::B1One, 1.0 / 3.0, 5}, 1.0, 4, RecurrenceReading::Verbatim);
    EXPECT_NEAR(v.r[1], 1.0 / 7.0, 1e-15);
    EXPECT_NEAR(v.r[2], 1.0 / 8.0, 1e-15);
    const SequencePlan c = plan_backward_special({SpecialMode::B1One, 1.0 / 3.0, 5}, 1.0, 4);
    EXPECT_NE(v.r[2], c.r[2]);
}

TEST(PlanValidation, DetectsTampering) {
    SequencePlan p = six_n(3);
    p.r[1] *= 1.0 + 1e-9;
    EXPECT_THROW(validate_plan(p), PlanError);
    SequencePlan q = six_n(3);
    q.rho.pop_back();
    EXPECT_THROW(validate_plan(q), PlanError);
}

TEST(PlanExtend, KeepsPrefix) {
    const SequencePlan p = six_n(3);
    const SequencePlan e = extend_plan(p, 2);
    EXPECT_EQ(e.pairs(), 5);
    EXPECT_FALSE(e.has_widths());
    for (int i = 0; i < 3; ++i) EXPECT_EQ(e.r[i], p.r[i]);
}

TEST(Widths, PrefixSums) {
    SequencePlan p = six_n(2);
    const std::vector<double> w{10, 20, 30, 40};
    p = assign_widths(p, w);
    EXPECT_EQ(p.u, (std::vector<double>{10, 30, 60, 100}));
    const std::vector<double> bad{10, 10, 30, 40};
    EXPECT_THROW(assign_widths(six_n(2), bad), PlanError);
    const std::vector<double> short_list{10, 20, 30};
    EXPECT_THROW(assign_widths(six_n(2), short_list), PlanError);
}

TEST(Midpoints, Examples) {
    SequencePlan p;
    p.u = {10, 30, 60};
    EXPECT_EQ(midpoints(p), (std::vector<double>{5, 20, 45}));
    p.direction = Direction::Backward;
    EXPECT_EQ(midpoints(p), (std::vector<double>{-5, -20, -45}));
    EXPECT_TRUE(midpoints(SequencePlan{}).empty());
}

TEST(BuildComb, AnchorsAndMembership) {
    const CombDomain d = build_comb(six_n_explicit());
    ASSERT_EQ(d.teeth().size(), 4u);
    EXPECT_NEAR(std::abs(d.tooth(1).line.anchor - (10.0 + 6.0 * I)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(d.tooth(2).line.anchor - (30.0 - 18.0 * I)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(d.tooth(3).line.anchor - (60.0 + 36.0 * I)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(d.tooth(4).line.anchor - (100.0 - 108.0 * I)), 0.0, 1e-12);
    EXPECT_EQ(d.tooth(1).label, ToothLabel::Upper);
    EXPECT_EQ(d.tooth(2).label, ToothLabel::Lower);
    EXPECT_TRUE(d.contains(Point(0, 0)));
    EXPECT_FALSE(d.contains(10.0 + 6.0 * I));
    EXPECT_THROW(build_comb(six_n(2)), BuildError);
}

TEST(BuildComb, ConvexInPositiveDirection) {
    const CombDomain d = build_comb(six_n_explicit());
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> x(-500, 500), y(-200, 200);
    for (int i = 0; i < 200; ++i) {
        const Point z(x(gen), y(gen));
        if (!d.contains(z)) continue;
        for (double t : {1.0, 10.0, 100.0}) EXPECT_TRUE(d.contains(z + t));
    }
    // The complement is closed under leftward translation.
    for (const auto& t : d.teeth())
        for (double s : {0.0, 1.0, 10.0, 1000.0}) EXPECT_FALSE(d.contains(t.line.anchor - s));
}

TEST(BuildComb, BackwardSigns) {
    const SequencePlan p = with_growing_widths(backward_six(2), 1.0);
    const CombDomain mirrored = build_comb(p);
    EXPECT_EQ(mirrored.tooth(1).line.anchor, Point(-p.u[0], p.r[0]));
    EXPECT_EQ(mirrored.tooth(2).line.anchor, Point(-p.u[1], -p.rho[0]));
    EXPECT_EQ(mirrored.tooth(2).label, ToothLabel::Lower);
    const CombDomain verbatim = build_comb(p, BackwardToothSign::Verbatim);
    EXPECT_EQ(verbatim.tooth(2).line.anchor, Point(-p.u[1], p.rho[0]));
    EXPECT_EQ(verbatim.tooth(2).label, ToothLabel::Upper);
}

TEST(Witness, SixToTheNHeights) {
    const SequencePlan p = six_n_explicit();
    const RectWitness w1 = witness_rect(p, 1);
    EXPECT_EQ(w1.center(), Point(5, 0));
    EXPECT_DOUBLE_EQ(w1.d1(), 6);
    EXPECT_DOUBLE_EQ(w1.d2(), 18);
    EXPECT_DOUBLE_EQ(w1.u(), 10);
    const RectWitness w2 = witness_rect(p, 2);
    EXPECT_EQ(w2.center(), Point(20, 0));
    EXPECT_DOUBLE_EQ(w2.d1(), 36);
    EXPECT_DOUBLE_EQ(w2.d2(), 18);
    EXPECT_DOUBLE_EQ(w2.u(), 20);
    EXPECT_NEAR(witness_target(p, 1), 0.75, 1e-15);
    EXPECT_NEAR(witness_target(p, 2), 1.0 / 3.0, 1e-15);
    const CombDomain d = build_comb(p);
    EXPECT_TRUE(verify_witness(d.boundary(), w1));
    EXPECT_TRUE(verify_witness(d.boundary(), w2));
}

TEST(Witness, EveryForwardWitnessFits) {
    const SequencePlan p = six_n_wide(4);
    const CombDomain d = build_comb(p);
    const auto [lo, hi] = witness_range(p);
    EXPECT_EQ(lo, 1);
    EXPECT_EQ(hi, 7);
    for (int n = lo; n <= hi; ++n) EXPECT_TRUE(verify_witness(d.boundary(), witness_rect(p, n))) << n;
    EXPECT_THROW(witness_rect(p, 8), BuildError);
}

TEST(Witness, EveryBackwardWitnessFits) {
    const SequencePlan p = with_growing_widths(backward_six(4), 1.0);
    const CombDomain d = build_comb(p);
    const auto [lo, hi] = witness_range(p);
    EXPECT_EQ(lo, 3);
    EXPECT_EQ(hi, 9);
    for (int n = lo; n <= hi; ++n) EXPECT_TRUE(verify_witness(d.boundary(), witness_rect(p, n))) << n;
    EXPECT_NEAR(witness_target(p, 3), 1.0 / 3.0, 1e-14);
    EXPECT_NEAR(witness_target(p, 4), 0.75, 1e-14);
    EXPECT_NEAR(backward_terminal_point(p), -(p.u.back() + p.u_prime.back()), 1e-12);
}

TEST(Witness, FailsWhenToothIntrudes) {
    const SequencePlan p = six_n_explicit();
    const CombDomain d = build_comb(p);
    EXPECT_FALSE(verify_witness(d.boundary(), RectWitness(Point(5, 0), 40, 18, 10)));
    EXPECT_FALSE(verify_witness(d.boundary(), RectWitness(Point(5, 0), 5, 18, 10)));
}

TEST(Surgery, ExtendAndDeleteExamples) {
    const SequencePlan p = six_n_explicit();
    const CombDomain d = build_comb(p);
    const SurgeryVariant ext = surgery(d, SurgeryKind::Extend, 1);
    const Point probe = p.u[0] + 5.0 + 6.0 * I;
    EXPECT_TRUE(d.contains(probe));
    EXPECT_FALSE(ext.contains(probe));
    const SurgeryVariant del = surgery(d, SurgeryKind::Delete, 1);
    EXPECT_FALSE(d.contains(10.0 + 6.0 * I));
    EXPECT_TRUE(del.contains(10.0 + 6.0 * I));
    EXPECT_EQ(ext.bound(), BoundSide::Upper);
    EXPECT_EQ(del.bound(), BoundSide::Lower);
    EXPECT_EQ(surgery_on_tooth(d, SurgeryKind::Extend, 2).bound(), BoundSide::Lower);
    EXPECT_EQ(surgery_on_tooth(d, SurgeryKind::Delete, 2).bound(), BoundSide::Upper);
    EXPECT_THROW(surgery(d, SurgeryKind::Extend, 3), BuildError);
    EXPECT_THROW(surgery_on_tooth(d, SurgeryKind::Extend, 4), BuildError);
}

TEST(Surgery, Inclusions) {
    const CombDomain d = build_comb(six_n_explicit());
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> back(0.0, 200.0);
    std::uniform_real_distribution<double> x(-200, 200), y(-150, 150);
    for (int tooth = 1; tooth <= 3; ++tooth) {
        const SurgeryVariant ext = surgery_on_tooth(d, SurgeryKind::Extend, tooth);
        const SurgeryVariant del = surgery_on_tooth(d, SurgeryKind::Delete, tooth);
        auto on = [&](const CombBoundary& b, std::mt19937_64& g) {
            const BoundaryFeature& f = b.feature(std::uniform_int_distribution<int>(
                0, static_cast<int>(b.features().size()) - 1)(g));
            const double hi = f.seg.x_hi;
            const double lo = std::max(f.seg.x_lo, hi - 200.0);
            return Point(lo + (hi - lo) * std::uniform_real_distribution<double>(0, 1)(g), f.seg.y);
        };
        for (int i = 0; i < 100; ++i) {
            // Omega1 is inside Omega which is inside Omega2.
            const Point z(x(gen), y(gen));
            if (ext.contains(z)) EXPECT_TRUE(d.contains(z));
            if (d.contains(z)) EXPECT_TRUE(del.contains(z));
            const Point b2 = on(del.boundary(), gen);
            EXPECT_FALSE(d.contains(b2));
            const Point b0 = on(d.boundary(), gen);
            EXPECT_FALSE(ext.contains(b0));
            // Omega1 keeps positive-direction convexity.
            if (ext.contains(z)) EXPECT_TRUE(ext.contains(z + back(gen)));
        }
    }
}

TEST(Surgery, BackwardExtendRunsRight) {
    const SequencePlan p = with_growing_widths(backward_six(2), 1.0);
    const CombDomain d = build_comb(p);
    const SurgeryVariant first = surgery_on_tooth(d, SurgeryKind::Extend, 1);
    const BoundaryFeature& seg = first.boundary().features().back();
    EXPECT_TRUE(seg.extension);
    EXPECT_DOUBLE_EQ(seg.seg.x_lo, -p.u[0]);
    EXPECT_DOUBLE_EQ(seg.seg.x_hi, 0.0);
    const BoundaryFeature& seg3 = surgery_on_tooth(d, SurgeryKind::Extend, 3).boundary().features().back();
    EXPECT_DOUBLE_EQ(seg3.seg.x_hi, -p.u[1]);
}

TEST(BoundaryDistance, MatchesBruteForce) {
    const CombDomain d = build_comb(six_n_wide(3));
    auto brute = [&](Point p) {
        double best = INFINITY;
        for (const auto& t : d.teeth()) best = std::min(best, dist_to_halfline(p, t.line));
        return best;
    };
    EXPECT_DOUBLE_EQ(boundary_distance(d, Point(0, 0)).distance, brute(Point(0, 0)));
    EXPECT_DOUBLE_EQ(boundary_distance(d, Point(0, 0)).distance, 6.0);
    const Point far(1e9, 0);
    double tip = INFINITY;
    for (const auto& t : d.teeth()) tip = std::min(tip, std::abs(far - t.line.anchor));
    EXPECT_DOUBLE_EQ(boundary_distance(d, far).distance, tip);
    const Point on = d.tooth(2).line.anchor - 3.0;
    EXPECT_EQ(boundary_distance(d, on).distance, 0.0);
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> x(-1e5, 1e6), y(-5e3, 5e3);
    for (int i = 0; i < 500; ++i) {
        const Point p(x(gen), y(gen));
        const BoundaryHit h = boundary_distance(d, p);
        EXPECT_NEAR(h.distance, brute(p), 1e-9 * (1 + h.distance));
        EXPECT_NEAR(std::abs(h.point - p), h.distance, 1e-9 * (1 + h.distance));
    }
}

TEST(BoundaryDistance, ScaledBoundary) {
    const CombDomain d = build_comb(six_n_explicit());
    const CombBoundary s = d.boundary().scaled(0.5);
    EXPECT_DOUBLE_EQ(s.nearest(Point(0, 0)).distance, 3.0);
    EXPECT_THROW(d.boundary().scaled(0.0), BuildError);
}

TEST(PseudoStrip, Geometry) {
    const CombBoundary b = CombBoundary::pseudo_strip(Point(0, 0), 1, 3, 8);
    EXPECT_DOUBLE_EQ(b.nearest(Point(0, 0)).distance, 1.0);
    EXPECT_TRUE(b.on_boundary(Point(4, 1)));
    EXPECT_FALSE(b.on_boundary(Point(4.5, 1)));
    EXPECT_TRUE(b.on_boundary(Point(-1e6, -3)));
    EXPECT_THROW(CombBoundary::pseudo_strip(Point(0, 0), 0, 3, 8), BuildError);
}

TEST(ClassifyHit, Examples) {
    EXPECT_EQ(classify_hit(10.0 + 6.0 * I, 0.0), ToothLabel::Upper);
    EXPECT_EQ(classify_hit(30.0 - 18.0 * I, 0.0), ToothLabel::Lower);
    const SequencePlan p = with_growing_widths(backward_six(2), 1.0);
    EXPECT_EQ(classify_hit(Point(-p.u[1], p.rho[0]), 0.0), ToothLabel::Upper);
    EXPECT_THROW(classify_hit(Point(5, 0), 0.0), ClassificationError);
}

TEST(Names, ToString) {
    EXPECT_EQ(to_string(Direction::Forward), "forward");
    EXPECT_EQ(to_string(ToothLabel::Lower), "lower");
    EXPECT_EQ(to_string(SpecialMode::FullInterval), "full-interval");
}
