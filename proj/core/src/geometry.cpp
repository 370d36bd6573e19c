#include "hmslope/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hmslope {

namespace {

constexpr double kUnitTol = 1e-12;

double wrap_two_pi(double angle) {
    double a = std::fmod(angle, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a;
}

void require_unimodular(Point p, const char* name) {
    if (std::abs(std::abs(p) - 1.0) > kUnitTol)
        throw GeometryError(std::string(name) + " must lie on the unit circle");
}

void require_level(double k) {
    if (!(k > 0.0 && k < 1.0)) throw GeometryError("level k must lie in (0,1)");
}

}  // namespace

Point checked_point(Point p) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
        throw GeometryError("point has a non-finite component");
    return p;
}

double dist_to_halfline(Point p, const HalfLine& h) {
    return std::abs(p - nearest_point_on_halfline(p, h));
}

Point nearest_point_on_halfline(Point p, const HalfLine& h) {
    return {std::min(p.real(), h.anchor.real()), h.anchor.imag()};
}

double dist_to_segment(Point p, const HorizontalSegment& s) {
    return std::abs(p - nearest_point_on_segment(p, s));
}

Point nearest_point_on_segment(Point p, const HorizontalSegment& s) {
    return {std::clamp(p.real(), s.x_lo, s.x_hi), s.y};
}

RectWitness::RectWitness(Point center, double d1, double d2, double u)
    : center_(checked_point(center)), d1_(d1), d2_(d2), u_(u) {
    if (!(d1 > 0.0 && d2 > 0.0 && u > 0.0))
        throw GeometryError("rectangle dimensions must be positive");
}

bool RectWitness::contains(Point p) const {
    return std::abs(p.real() - center_.real()) < u_ / 2.0 && p.imag() > center_.imag() - d2_ &&
           p.imag() < center_.imag() + d1_;
}

std::pair<HorizontalSegment, HorizontalSegment> RectWitness::horizontal_border() const {
    const double lo = center_.real() - u_ / 2.0;
    const double hi = center_.real() + u_ / 2.0;
    return {{center_.imag() + d1_, lo, hi}, {center_.imag() - d2_, lo, hi}};
}

double slope_of(Point xi, Point zeta) {
    require_unimodular(xi, "xi");
    if (std::abs(zeta) > 1.0 + kUnitTol) throw GeometryError("zeta lies outside the closed disk");
    const Point offset = 1.0 - std::conj(xi) * zeta;
    if (offset == 0.0) throw GeometryError("slope undefined at zeta == xi");
    return std::arg(offset);
}

BoundaryArc::BoundaryArc(Point chi, Point xi) : chi_(chi), xi_(xi) {
    require_unimodular(chi, "chi");
    require_unimodular(xi, "xi");
    if (std::abs(chi - xi) <= kUnitTol) throw GeometryError("arc endpoints must differ");
}

double BoundaryArc::length() const { return wrap_two_pi(std::arg(chi_) - std::arg(xi_)); }

Point TangentRay::direction() const {
    const double phi = kPi * (0.5 - k);
    return -xi * std::polar(1.0, phi);
}

Point TangentRay::at(double s) const { return xi + s * direction(); }

double TangentRay::exit_parameter() const { return 2.0 * std::cos(kPi * (0.5 - k)); }

TangentRay tangent_ray(double k, const BoundaryArc& arc) {
    require_level(k);
    return {arc.xi(), k};
}

LevelArc level_set_arc(double k, const BoundaryArc& arc) {
    require_level(k);
    LevelArc out;
    out.k = k;
    out.chi = arc.chi();
    out.xi = arc.xi();

    const Point tau = tangent_ray(k, arc).direction();
    const Point normal = Point(0.0, 1.0) * tau;
    const Point chord = out.xi - out.chi;
    const double den = std::real(std::conj(normal) * chord);
    if (std::abs(den) <= 1e-14 * std::abs(chord)) {
        out.is_segment = true;
        return out;
    }
    const double lambda = -std::norm(chord) / (2.0 * den);
    out.center = out.xi + lambda * normal;
    out.radius = std::abs(lambda);

    const double a_xi = std::arg(out.xi - out.center);
    const double a_chi = std::arg(out.chi - out.center);
    // Travel direction at xi for increasing angle is i*(xi - c); pick the
    // sweep that leaves xi along tau.
    const double orient = std::real(std::conj(tau) * (Point(0.0, 1.0) * (out.xi - out.center)));
    out.sweep_start = a_xi;
    out.sweep = orient > 0.0 ? wrap_two_pi(a_chi - a_xi) : -wrap_two_pi(a_xi - a_chi);
    return out;
}

std::vector<Point> LevelArc::sample(int count) const {
    std::vector<Point> pts;
    pts.reserve(count > 0 ? static_cast<std::size_t>(count) : 0);
    for (int j = 1; j <= count; ++j) {
        const double f = static_cast<double>(j) / (count + 1);
        if (is_segment)
            pts.push_back(xi + f * (chi - xi));
        else
            pts.push_back(center + std::polar(radius, sweep_start + f * sweep));
    }
    return pts;
}

Point LevelArc::tangent_at_xi() const {
    if (is_segment) return (chi - xi) / std::abs(chi - xi);
    const double s = sweep > 0.0 ? 1.0 : -1.0;
    return s * Point(0.0, 1.0) * (xi - center) / radius;
}

Point LevelArc::tangent_at_chi() const {
    if (is_segment) return (xi - chi) / std::abs(xi - chi);
    const double s = sweep > 0.0 ? 1.0 : -1.0;
    return -s * Point(0.0, 1.0) * (chi - center) / radius;
}

double LevelArc::meeting_angle_at_xi() const {
    // The complementary arc leaves xi clockwise, along -i*xi.
    return std::abs(std::arg(tangent_at_xi() / (Point(0.0, -1.0) * xi)));
}

double LevelArc::meeting_angle_at_chi() const {
    // The complementary arc arrives at chi from the counterclockwise side, i*chi.
    return std::abs(std::arg(tangent_at_chi() / (Point(0.0, 1.0) * chi)));
}

DiskAutomorphism::DiskAutomorphism(Point a) : a_(checked_point(a)) {
    if (std::abs(a) >= 1.0) throw GeometryError("automorphism center must lie in the open disk");
}

Point DiskAutomorphism::operator()(Point z) const { return (z - a_) / (1.0 - std::conj(a_) * z); }

BoundaryArc DiskAutomorphism::operator()(const BoundaryArc& arc) const {
    // Renormalize: the image lies on the circle up to rounding.
    auto on_circle = [this](Point z) {
        const Point w = (*this)(z);
        return w / std::abs(w);
    };
    return BoundaryArc(on_circle(arc.chi()), on_circle(arc.xi()));
}

DiskAutomorphism mobius_to_zero(Point a) { return DiskAutomorphism(a); }

SlopeInterval::SlopeInterval(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo <= hi)) throw GeometryError("slope interval requires lo <= hi");
    if (lo < -kPi / 2.0 - 1e-12 || hi > kPi / 2.0 + 1e-12)
        throw GeometryError("slope interval must lie in [-pi/2, pi/2]");
}

}  // namespace hmslope
