#include "hmslope/comb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hmslope {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kResidualTol = 1e-12;

void require_interior_angle(double theta, const char* name) {
    if (!(theta > -kPi / 2.0 && theta < kPi / 2.0))
        throw PlanError(std::string(name) + " must lie strictly inside (-pi/2, pi/2)");
}

void require_basics(double r1, int pairs) {
    if (!(r1 > 0.0) || !std::isfinite(r1)) throw PlanError("r1 must be positive");
    if (pairs < 1) throw PlanError("need at least one tooth pair");
}

double limit_from_angle(double theta) { return 0.5 - theta / kPi; }

// r_n = same(n) * rho_n for every n >= 1, and for n >= 2 either
// r_n = prev(n) * rho_{n-1} or (verbatim special modes) r_n = prev(n).
struct Recurrence {
    double (*same)(const SequencePlan&, int);
    double (*prev)(const SequencePlan&, int);
    bool prev_is_constant;
};

double forward_same(const SequencePlan& p, int) { return (1.0 - p.limit_high) / p.limit_high; }
double forward_prev(const SequencePlan& p, int) { return (1.0 - p.limit_low) / p.limit_low; }
double backward_same(const SequencePlan& p, int) { return (1.0 - p.limit_low) / p.limit_low; }
double backward_prev(const SequencePlan& p, int) { return (1.0 - p.limit_high) / p.limit_high; }
double b2zero_same(const SequencePlan& p, int n) { return static_cast<double>(n + p.m); }
double b1one_prev(const SequencePlan& p, int n) { return 1.0 / (n + p.m); }
double full_same(const SequencePlan&, int n) { return static_cast<double>(n); }
double full_prev(const SequencePlan&, int n) { return 1.0 / n; }

Recurrence recurrence_for(const SequencePlan& p) {
    const bool verbatim = p.reading == RecurrenceReading::Verbatim;
    if (p.direction == Direction::Forward) return {forward_same, forward_prev, false};
    switch (p.special) {
        case SpecialMode::None: return {backward_same, backward_prev, false};
        case SpecialMode::B2Zero: return {b2zero_same, backward_prev, verbatim};
        case SpecialMode::B1One: return {backward_same, b1one_prev, verbatim};
        case SpecialMode::FullInterval: return {full_same, full_prev, false};
    }
    throw PlanError("unknown special mode");
}

SequencePlan generate(SequencePlan plan, double r1, int pairs) {
    const Recurrence rec = recurrence_for(plan);
    plan.r.assign(static_cast<std::size_t>(pairs), 0.0);
    plan.rho.assign(static_cast<std::size_t>(pairs), 0.0);
    plan.r[0] = r1;
    for (int n = 1; n <= pairs; ++n) {
        const auto i = static_cast<std::size_t>(n - 1);
        if (n >= 2) {
            const double c = rec.prev(plan, n);
            plan.r[i] = rec.prev_is_constant ? c : c * plan.rho[i - 1];
        }
        plan.rho[i] = plan.r[i] / rec.same(plan, n);
    }
    validate_plan(plan);
    return plan;
}

}  // namespace

double SequencePlan::theta1() const { return kPi * (0.5 - limit_high); }
double SequencePlan::theta2() const { return kPi * (0.5 - limit_low); }

SequencePlan plan_forward(double theta1, double theta2, double r1, int pairs) {
    require_interior_angle(theta1, "theta1");
    require_interior_angle(theta2, "theta2");
    if (!(theta1 < theta2)) throw PlanError("forward plans need theta1 < theta2");
    require_basics(r1, pairs);
    SequencePlan plan;
    plan.direction = Direction::Forward;
    plan.limit_high = limit_from_angle(theta1);
    plan.limit_low = limit_from_angle(theta2);
    return generate(std::move(plan), r1, pairs);
}

SequencePlan plan_backward(double theta1, double theta2, double r1, int pairs) {
    require_interior_angle(theta1, "theta1");
    require_interior_angle(theta2, "theta2");
    if (!(theta1 < theta2))
        throw PlanError("backward recurrences need theta1 < theta2 (equal angles give constant heights)");
    require_basics(r1, pairs);
    SequencePlan plan;
    plan.direction = Direction::Backward;
    plan.limit_high = limit_from_angle(theta1);
    plan.limit_low = limit_from_angle(theta2);
    return generate(std::move(plan), r1, pairs);
}

SequencePlan plan_backward_special(const SpecialSpec& spec, double r1, int pairs, RecurrenceReading reading) {
    require_basics(r1, pairs);
    SequencePlan plan;
    plan.direction = Direction::Backward;
    plan.special = spec.mode;
    plan.m = spec.m;
    plan.reading = reading;
    switch (spec.mode) {
        case SpecialMode::None:
            throw PlanError("plan_backward_special needs a special mode");
        case SpecialMode::FullInterval:
            plan.limit_high = 1.0;
            plan.limit_low = 0.0;
            plan.m = 0;
            break;
        case SpecialMode::B2Zero: {
            if (!(spec.b > 0.0 && spec.b < 1.0)) throw PlanError("b1 must lie in (0,1)");
            if (spec.m < 0) throw PlanError("m must be nonnegative");
            // Both sequences decrease iff n + m > (1 - b1)/b1 for every n >= 1.
            if (!(1.0 + spec.m > (1.0 - spec.b) / spec.b))
                throw PlanError("m too small: need 1 + m > (1 - b1)/b1");
            plan.limit_high = spec.b;
            plan.limit_low = 0.0;
            break;
        }
        case SpecialMode::B1One: {
            if (!(spec.b > 0.0 && spec.b < 1.0)) throw PlanError("b2 must lie in (0,1)");
            if (spec.m < 0) throw PlanError("m must be nonnegative");
            if (!(1.0 / (1.0 + spec.m) < (1.0 - spec.b) / spec.b))
                throw PlanError("m too small: need 1/(1 + m) < (1 - b2)/b2");
            plan.limit_high = 1.0;
            plan.limit_low = spec.b;
            break;
        }
    }
    return generate(std::move(plan), r1, pairs);
}

void validate_plan(const SequencePlan& plan) {
    const int pairs = plan.pairs();
    if (pairs < 1 || plan.rho.size() != plan.r.size()) throw PlanError("plan needs matching r and rho lists");
    const Recurrence rec = recurrence_for(plan);
    for (int n = 1; n <= pairs; ++n) {
        const auto i = static_cast<std::size_t>(n - 1);
        const double r = plan.r[i];
        if (!(r > 0.0) || !(plan.rho[i] > 0.0) || !std::isfinite(r) || !std::isfinite(plan.rho[i]))
            throw PlanError("tooth heights must be positive and finite");
        if (std::abs(r - rec.same(plan, n) * plan.rho[i]) > kResidualTol * r)
            throw PlanError("r_n and rho_n violate the same-index recurrence at n = " + std::to_string(n));
        if (n >= 2) {
            const double c = rec.prev(plan, n);
            const double expect = rec.prev_is_constant ? c : c * plan.rho[i - 1];
            if (std::abs(r - expect) > kResidualTol * r)
                throw PlanError("r_n violates the previous-index recurrence at n = " + std::to_string(n));
        }
    }
    const bool increasing = plan.direction == Direction::Forward;
    for (std::size_t i = 1; i < plan.r.size(); ++i) {
        const bool ok = increasing ? (plan.r[i] > plan.r[i - 1] && plan.rho[i] > plan.rho[i - 1])
                                   : (plan.r[i] < plan.r[i - 1] && plan.rho[i] < plan.rho[i - 1]);
        if (!ok)
            throw PlanError(std::string("tooth heights must be strictly ") +
                            (increasing ? "increasing" : "decreasing"));
    }
    if (plan.has_widths()) {
        if (plan.u_prime.size() != static_cast<std::size_t>(plan.blocks()) || plan.u.size() != plan.u_prime.size())
            throw PlanError("plan needs one width per block");
        double sum = 0.0;
        for (std::size_t i = 0; i < plan.u_prime.size(); ++i) {
            if (!(plan.u_prime[i] > 0.0)) throw PlanError("widths must be positive");
            if (i > 0 && !(plan.u_prime[i] > plan.u_prime[i - 1]))
                throw PlanError("widths u'_n must be strictly increasing");
            sum += plan.u_prime[i];
            if (std::abs(plan.u[i] - sum) > kResidualTol * sum) throw PlanError("u_n must be partial sums of u'_n");
        }
    }
}

SequencePlan extend_plan(const SequencePlan& plan, int extra) {
    if (extra < 0) throw PlanError("cannot remove pairs");
    if (plan.r.empty()) throw PlanError("plan has no heights");
    SequencePlan base = plan;
    base.r.clear();
    base.rho.clear();
    base.u_prime.clear();
    base.u.clear();
    return generate(std::move(base), plan.r.front(), plan.pairs() + extra);
}

SequencePlan assign_widths(SequencePlan plan, std::span<const double> widths) {
    if (widths.size() != static_cast<std::size_t>(plan.blocks()))
        throw PlanError("expected " + std::to_string(plan.blocks()) + " widths, got " +
                        std::to_string(widths.size()));
    plan.u_prime.assign(widths.begin(), widths.end());
    plan.u.resize(plan.u_prime.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < plan.u_prime.size(); ++i) {
        sum += plan.u_prime[i];
        plan.u[i] = sum;
    }
    validate_plan(plan);
    return plan;
}

CombBoundary::CombBoundary(std::vector<BoundaryFeature> features) : features_(std::move(features)) {
    packed_.reserve(features_.size());
    for (const auto& f : features_) packed_.push_back({f.seg.y, f.seg.x_lo, f.seg.x_hi});
}

BoundaryHit CombBoundary::nearest(Point p) const {
    const double px = p.real();
    const double py = p.imag();
    double best = kInf;
    int best_i = -1;
    double best_x = 0.0;
    for (std::size_t i = 0; i < packed_.size(); ++i) {
        const Packed& f = packed_[i];
        const double cx = px < f.x_lo ? f.x_lo : (px > f.x_hi ? f.x_hi : px);
        const double dx = px - cx;
        const double dy = py - f.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best) {
            best = d2;
            best_i = static_cast<int>(i);
            best_x = cx;
        }
    }
    if (best_i < 0) return {kInf, p, -1};
    return {std::sqrt(best), Point(best_x, packed_[static_cast<std::size_t>(best_i)].y), best_i};
}

bool CombBoundary::on_boundary(Point p) const {
    for (const auto& f : packed_)
        if (p.imag() == f.y && p.real() >= f.x_lo && p.real() <= f.x_hi) return true;
    return false;
}

CombBoundary CombBoundary::scaled(double factor) const {
    if (!(factor > 0.0)) throw BuildError("scale factor must be positive");
    std::vector<BoundaryFeature> out = features_;
    for (auto& f : out) {
        f.seg.y *= factor;
        f.seg.x_lo *= factor;
        f.seg.x_hi *= factor;
    }
    return CombBoundary(std::move(out));
}

CombBoundary CombBoundary::pseudo_strip(Point center, double d1, double d2, double width) {
    if (!(d1 > 0.0 && d2 > 0.0 && width > 0.0)) throw BuildError("pseudo-strip dimensions must be positive");
    const double tip = center.real() + width / 2.0;
    return CombBoundary({{{center.imag() + d1, -kInf, tip}, 1, false},
                         {{center.imag() - d2, -kInf, tip}, 2, false}});
}

CombDomain::CombDomain(std::vector<Tooth> teeth, Direction direction, int truncation_count)
    : teeth_(std::move(teeth)), direction_(direction), truncation_count_(truncation_count) {
    std::vector<BoundaryFeature> features;
    features.reserve(teeth_.size());
    for (const auto& t : teeth_) {
        checked_point(t.line.anchor);
        features.push_back({{t.line.anchor.imag(), -kInf, t.line.anchor.real()}, t.n, false});
    }
    boundary_ = CombBoundary(std::move(features));
}

const Tooth& CombDomain::tooth(int n) const {
    for (const auto& t : teeth_)
        if (t.n == n) return t;
    throw BuildError("no tooth with index " + std::to_string(n));
}

CombDomain build_comb(const SequencePlan& plan, BackwardToothSign sign) {
    if (!plan.has_widths()) throw BuildError("plan has no widths assigned");
    validate_plan(plan);
    std::vector<Tooth> teeth;
    const int pairs = plan.pairs();
    for (int k = 1; k <= pairs; ++k) {
        const auto kk = static_cast<std::size_t>(k - 1);
        const double u_odd = plan.u[static_cast<std::size_t>(2 * k - 2)];
        const double u_even = plan.u[static_cast<std::size_t>(2 * k - 1)];
        if (plan.direction == Direction::Forward) {
            teeth.push_back({{Point(u_odd, plan.r[kk])}, ToothLabel::Upper, 2 * k - 1});
            teeth.push_back({{Point(u_even, -plan.rho[kk])}, ToothLabel::Lower, 2 * k});
        } else {
            teeth.push_back({{Point(-u_odd, plan.r[kk])}, ToothLabel::Upper, 2 * k - 1});
            const double h = sign == BackwardToothSign::Mirrored ? -plan.rho[kk] : plan.rho[kk];
            teeth.push_back({{Point(-u_even, h)}, classify_hit(Point(0.0, h), 0.0), 2 * k});
        }
    }
    return CombDomain(std::move(teeth), plan.direction, pairs);
}

std::vector<double> midpoints(const SequencePlan& plan) {
    std::vector<double> x;
    x.reserve(plan.u.size());
    const double s = plan.direction == Direction::Forward ? 1.0 : -1.0;
    double prev = 0.0;
    for (double un : plan.u) {
        x.push_back(s * (un + prev) / 2.0);
        prev = un;
    }
    return x;
}

double backward_terminal_point(const SequencePlan& plan) {
    if (plan.direction != Direction::Backward || !plan.has_widths())
        throw BuildError("terminal point needs a backward plan with widths");
    return -(plan.u.back() + plan.u_prime.back());
}

std::pair<int, int> witness_range(const SequencePlan& plan) {
    if (plan.direction == Direction::Forward) return {1, plan.blocks() - 1};
    return {3, plan.blocks() + 1};
}

std::pair<double, double> witness_heights(const SequencePlan& plan, int n) {
    const int lo = plan.direction == Direction::Forward ? 1 : 3;
    const int hi = plan.direction == Direction::Forward ? plan.blocks() - 1 : plan.blocks() + 1;
    if (n < lo || n > hi)
        throw BuildError("witness index " + std::to_string(n) + " outside [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
    auto r = [&](int k) { return plan.r[static_cast<std::size_t>(k - 1)]; };
    auto rho = [&](int k) { return plan.rho[static_cast<std::size_t>(k - 1)]; };
    const int k = (n + 1) / 2;
    const bool odd = n % 2 == 1;
    if (plan.direction == Direction::Forward) return odd ? std::pair{r(k), rho(k)} : std::pair{r(k + 1), rho(k)};
    return odd ? std::pair{r(k - 1), rho(k - 1)} : std::pair{r(k), rho(k - 1)};
}

RectWitness witness_rect(const SequencePlan& plan, int n) {
    if (!plan.has_widths()) throw BuildError("plan has no widths assigned");
    const auto [d1, d2] = witness_heights(plan, n);
    if (plan.direction == Direction::Backward && n == plan.blocks() + 1)
        return RectWitness(Point(backward_terminal_point(plan), 0.0), d1, d2, 2.0 * plan.u_prime.back());
    const double x = midpoints(plan)[static_cast<std::size_t>(n - 1)];
    return RectWitness(Point(x, 0.0), d1, d2, plan.u_prime[static_cast<std::size_t>(n - 1)]);
}

double witness_target(const SequencePlan& plan, int n) {
    const auto [d1, d2] = witness_heights(plan, n);
    return d2 / (d1 + d2);
}

bool verify_witness(const CombBoundary& boundary, const RectWitness& rect, double rel_tol) {
    const auto [top, bottom] = rect.horizontal_border();
    const double scale = std::max({std::abs(top.x_lo), std::abs(top.x_hi), std::abs(top.y), std::abs(bottom.y)});
    const double tol = rel_tol * scale;
    auto covered = [&](const HorizontalSegment& edge) {
        for (const auto& f : boundary.features())
            if (std::abs(f.seg.y - edge.y) <= tol && f.seg.x_lo <= edge.x_lo + tol && f.seg.x_hi >= edge.x_hi - tol)
                return true;
        return false;
    };
    for (const auto& f : boundary.features()) {
        const bool between = f.seg.y > bottom.y + tol && f.seg.y < top.y - tol;
        const bool overlaps = f.seg.x_lo < top.x_hi - tol && f.seg.x_hi > top.x_lo + tol;
        if (between && overlaps) return false;
    }
    return covered(top) && covered(bottom);
}

SurgeryVariant::SurgeryVariant(const CombDomain& base, SurgeryKind kind, int tooth_n)
    : kind_(kind), tooth_(tooth_n) {
    const Tooth& t = base.tooth(tooth_n);
    label_ = t.label;
    std::vector<BoundaryFeature> features = base.boundary().features();
    if (kind == SurgeryKind::Delete) {
        std::erase_if(features, [&](const BoundaryFeature& f) { return f.tooth == tooth_n && !f.extension; });
    } else {
        double x_end = 0.0;
        if (base.direction() == Direction::Forward) {
            if (tooth_n >= static_cast<int>(base.teeth().size()))
                throw BuildError("cannot extend the last forward tooth: no next anchor");
            x_end = base.tooth(tooth_n + 1).line.anchor.real();
        } else {
            x_end = tooth_n == 1 ? 0.0 : base.tooth(tooth_n - 1).line.anchor.real();
        }
        features.push_back({{t.line.anchor.imag(), t.line.anchor.real(), x_end}, tooth_n, true});
    }
    boundary_ = CombBoundary(std::move(features));
}

BoundSide SurgeryVariant::bound() const {
    const bool upper = label_ == ToothLabel::Upper;
    if (kind_ == SurgeryKind::Extend) return upper ? BoundSide::Upper : BoundSide::Lower;
    return upper ? BoundSide::Lower : BoundSide::Upper;
}

SurgeryVariant surgery(const CombDomain& domain, SurgeryKind kind, int k) {
    if (k < 1 || k > domain.truncation_count()) throw BuildError("surgery pair index out of range");
    return SurgeryVariant(domain, kind, 2 * k - 1);
}

SurgeryVariant surgery_on_tooth(const CombDomain& domain, SurgeryKind kind, int tooth_n) {
    if (tooth_n < 1 || tooth_n > static_cast<int>(domain.teeth().size()))
        throw BuildError("surgery tooth index out of range");
    return SurgeryVariant(domain, kind, tooth_n);
}

ToothLabel classify_hit(Point hit, double ref_im) {
    if (hit.imag() > ref_im) return ToothLabel::Upper;
    if (hit.imag() < ref_im) return ToothLabel::Lower;
    throw ClassificationError("boundary hit at exactly the reference height");
}

std::string to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

std::string to_string(SpecialMode m) {
    switch (m) {
        case SpecialMode::None: return "none";
        case SpecialMode::B2Zero: return "b2-zero";
        case SpecialMode::B1One: return "b1-one";
        case SpecialMode::FullInterval: return "full-interval";
    }
    return "unknown";
}

std::string to_string(ToothLabel l) { return l == ToothLabel::Upper ? "upper" : "lower"; }

}  // namespace hmslope
