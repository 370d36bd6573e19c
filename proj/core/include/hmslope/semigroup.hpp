#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hmslope/comb.hpp"
#include "hmslope/geometry.hpp"

namespace hmslope {

class ModelError : public std::domain_error {
public:
    explicit ModelError(const std::string& what) : std::domain_error(what) {}
};

enum class SemigroupClass { Hyperbolic, ParabolicPositiveStep, ParabolicZeroStep };

/// Boundary fixed point type by angular derivative: (0,1], (1,inf), inf.
enum class FixedPointClass { Attractive, Repulsive, SuperRepulsive };

FixedPointClass classify_fixed_point(double angular_derivative);

struct StripDomain {
    double d = 1.0;
};
struct HalfPlaneDomain {};
struct CombDescription {
    SequencePlan plan;
};
using DomainDescription = std::variant<StripDomain, HalfPlaneDomain, CombDescription>;

SemigroupClass classify_domain(const DomainDescription& domain);

/// Parses "strip:<d>", "halfplane" or "comb". Comb descriptions carry an
/// empty plan.
DomainDescription parse_domain_description(const std::string& text);

/// Closed-form Koenigs map of the strip |Im w| < d or the upper half-plane.
class KoenigsModel {
public:
    enum class Variant { Strip, UpperHalfPlane };

    static KoenigsModel strip(double d);
    static KoenigsModel upper_half_plane();

    Variant variant() const { return variant_; }
    double d() const { return d_; }
    std::string name() const;

    bool in_domain(Point w) const;
    Point forward(Point z) const;
    Point inverse(Point w) const;

    /// Denjoy-Wolff point and the backward limit point.
    Point xi() const;
    Point chi() const;
    /// Infimum of {t : h(z) + t in the domain}.
    double T() const { return -std::numeric_limits<double>::infinity(); }

    /// 1 - conj(b) * inverse(w) for b = xi() or chi(), computed without
    /// cancellation near the boundary point.
    Point boundary_offset(Point w, Point b) const;

private:
    KoenigsModel(Variant v, double d) : variant_(v), d_(d) {}
    Variant variant_;
    double d_;
};

inline Point koenigs_forward(const KoenigsModel& m, Point z) { return m.forward(z); }
inline Point koenigs_inverse(const KoenigsModel& m, Point w) { return m.inverse(w); }

struct TrajectorySample {
    double t = 0.0;
    Point point;
    Point offset_xi;   // 1 - conj(xi) * point
    Point offset_chi;  // 1 - conj(chi) * point
};

struct Trajectory {
    KoenigsModel model;
    Point z;
    double T = 0.0;
    std::vector<TrajectorySample> samples;
};

/// gamma_z(t) = h^{-1}(h(z) + t) at each t; t must be strictly increasing.
Trajectory trajectory(const KoenigsModel& model, Point z, const std::vector<double>& t_values);

/// n + 1 evenly spaced times from t_min to t_max.
std::vector<double> linspace(double t_min, double t_max, int n);

/// Extrema of the slope over the last 20% of samples (largest t).
SlopeInterval slope_plus(const Trajectory& traj, Point xi);
/// Extrema of the slope over the first 20% of samples (smallest t).
SlopeInterval slope_minus(const Trajectory& traj, Point chi);

/// Slope of sample i with respect to b, using the stable offsets when b is
/// one of the model's limit points.
double sample_slope(const Trajectory& traj, std::size_t i, Point b);

/// Forward slope of strip trajectories through h(z) = i*y0.
inline double strip_slope_limit(double d, double y0) { return -kPi * y0 / (2.0 * d); }

std::string to_string(SemigroupClass c);
std::string to_string(FixedPointClass c);

}  // namespace hmslope
