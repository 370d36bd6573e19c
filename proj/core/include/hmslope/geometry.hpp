#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hmslope {

using Point = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

class GeometryError : public std::domain_error {
public:
    explicit GeometryError(const std::string& what) : std::domain_error(what) {}
};

/// Throws GeometryError if either component is NaN or infinite.
Point checked_point(Point p);

/// Leftward horizontal ray {anchor + t : t <= 0}. Closed, contains its anchor.
struct HalfLine {
    Point anchor;
};

double dist_to_halfline(Point p, const HalfLine& h);
Point nearest_point_on_halfline(Point p, const HalfLine& h);

/// Closed horizontal segment {x + i*y : x_lo <= x <= x_hi}.
struct HorizontalSegment {
    double y = 0.0;
    double x_lo = 0.0;
    double x_hi = 0.0;
};

double dist_to_segment(Point p, const HorizontalSegment& s);
Point nearest_point_on_segment(Point p, const HorizontalSegment& s);

/// Open rectangle A(w, d1, d2, u): |x - Re w| < u/2, Im w - d2 < y < Im w + d1.
class RectWitness {
public:
    RectWitness(Point center, double d1, double d2, double u);

    Point center() const { return center_; }
    double d1() const { return d1_; }
    double d2() const { return d2_; }
    double u() const { return u_; }

    bool contains(Point p) const;
    /// Upper then lower border; both open in x (endpoints excluded).
    std::pair<HorizontalSegment, HorizontalSegment> horizontal_border() const;

private:
    Point center_;
    double d1_;
    double d2_;
    double u_;
};

inline bool rect_contains(const RectWitness& r, Point p) { return r.contains(p); }
inline std::pair<HorizontalSegment, HorizontalSegment> rect_horizontal_border(const RectWitness& r) {
    return r.horizontal_border();
}

/// arg(1 - conj(xi) * zeta) on the principal branch. xi must be unimodular and
/// zeta in the closed disk, zeta != xi.
double slope_of(Point xi, Point zeta);

/// Arc of the unit circle running clockwise from chi to xi.
class BoundaryArc {
public:
    enum class Orientation { ClockwiseFromChiToXi };

    BoundaryArc(Point chi, Point xi);

    Point chi() const { return chi_; }
    Point xi() const { return xi_; }
    Orientation orientation() const { return Orientation::ClockwiseFromChiToXi; }

    /// Angular length in (0, 2*pi).
    double length() const;
    /// The rest of the circle: clockwise from xi to chi.
    BoundaryArc complement() const { return BoundaryArc(xi_, chi_); }

private:
    Point chi_;
    Point xi_;
};

/// Level set {zeta in D : omega(zeta, arc, D) = k}. A circular arc through chi
/// and xi, or the chord itself when the circle degenerates to a line.
struct LevelArc {
    double k = 0.5;
    Point chi;
    Point xi;
    bool is_segment = false;  // infinite radius
    Point center;             // meaningful only when !is_segment
    double radius = 0.0;      // meaningful only when !is_segment
    double sweep_start = 0.0; // angle of xi about center
    double sweep = 0.0;       // signed sweep from xi to chi through the disk

    /// Points strictly between the endpoints, evenly spaced in parameter.
    std::vector<Point> sample(int count) const;
    /// Unit tangent at xi pointing into the disk.
    Point tangent_at_xi() const;
    /// Unit tangent at chi pointing into the disk.
    Point tangent_at_chi() const;
    /// Angle between the arc and the unit circle at xi, measured on the side
    /// of the complementary arc. Equals k*pi.
    double meeting_angle_at_xi() const;
    double meeting_angle_at_chi() const;
};

LevelArc level_set_arc(double k, const BoundaryArc& arc);

/// Ray from xi tangent to the level arc L_k at xi.
struct TangentRay {
    Point xi;
    double k = 0.5;

    /// Unit direction into the disk.
    Point direction() const;
    /// xi + s * direction(), s >= 0.
    Point at(double s) const;
    /// Parameter where the ray leaves the closed disk again (chord length).
    double exit_parameter() const;
};

TangentRay tangent_ray(double k, const BoundaryArc& arc);

/// Disk automorphism T(z) = (z - a) / (1 - conj(a) z) with T(a) = 0.
class DiskAutomorphism {
public:
    explicit DiskAutomorphism(Point a);

    Point a() const { return a_; }
    Point operator()(Point z) const;
    BoundaryArc operator()(const BoundaryArc& arc) const;

private:
    Point a_;
};

DiskAutomorphism mobius_to_zero(Point a);

/// Closed angular interval [lo, hi] inside [-pi/2, pi/2].
struct SlopeInterval {
    double lo = 0.0;
    double hi = 0.0;

    SlopeInterval() = default;
    SlopeInterval(double lo, double hi);

    double width() const { return hi - lo; }
    bool is_singleton(double tol) const { return width() <= tol; }
};

}  // namespace hmslope
