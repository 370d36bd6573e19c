#include "hmslope/semigroup.hpp"

#include <cmath>

namespace hmslope {

namespace {

// 1 - tanh(x) without cancellation for large Re x.
Point one_minus_tanh(Point x) {
    if (x.real() >= 0.0) {
        const Point e = std::exp(-2.0 * x);
        return 2.0 * e / (1.0 + e);
    }
    return 2.0 / (1.0 + std::exp(2.0 * x));
}

constexpr std::size_t kMinTail = 3;

std::size_t tail_count(std::size_t n) {
    const std::size_t tail = n / 5;
    if (tail < kMinTail) throw ModelError("too few trajectory samples for a tail window");
    return tail;
}

}  // namespace

FixedPointClass classify_fixed_point(double angular_derivative) {
    if (std::isinf(angular_derivative) && angular_derivative > 0.0) return FixedPointClass::SuperRepulsive;
    if (!(angular_derivative > 0.0)) throw ModelError("angular derivative must be positive");
    return angular_derivative <= 1.0 ? FixedPointClass::Attractive : FixedPointClass::Repulsive;
}

SemigroupClass classify_domain(const DomainDescription& domain) {
    struct Visitor {
        SemigroupClass operator()(const StripDomain& s) const {
            if (!(s.d > 0.0)) throw ModelError("strip half-width must be positive");
            return SemigroupClass::Hyperbolic;
        }
        SemigroupClass operator()(const HalfPlaneDomain&) const { return SemigroupClass::ParabolicPositiveStep; }
        // Forward combs have teeth unbounded above and below; backward combs
        // contain a right half-plane. Neither fits in a horizontal half-plane.
        SemigroupClass operator()(const CombDescription&) const { return SemigroupClass::ParabolicZeroStep; }
    };
    return std::visit(Visitor{}, domain);
}

DomainDescription parse_domain_description(const std::string& text) {
    if (text == "halfplane") return HalfPlaneDomain{};
    if (text == "comb") return CombDescription{};
    if (text.rfind("strip:", 0) == 0) {
        std::size_t used = 0;
        double d = 0.0;
        try {
            d = std::stod(text.substr(6), &used);
        } catch (const std::exception&) {
            throw ModelError("bad strip width in '" + text + "'");
        }
        if (used != text.size() - 6 || !(d > 0.0)) throw ModelError("bad strip width in '" + text + "'");
        return StripDomain{d};
    }
    throw ModelError("unrecognized domain description '" + text + "'");
}

KoenigsModel KoenigsModel::strip(double d) {
    if (!(d > 0.0) || !std::isfinite(d)) throw ModelError("strip half-width must be positive");
    return KoenigsModel(Variant::Strip, d);
}

KoenigsModel KoenigsModel::upper_half_plane() { return KoenigsModel(Variant::UpperHalfPlane, 0.0); }

std::string KoenigsModel::name() const { return variant_ == Variant::Strip ? "strip" : "halfplane"; }

bool KoenigsModel::in_domain(Point w) const {
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
    return variant_ == Variant::Strip ? std::abs(w.imag()) < d_ : w.imag() > 0.0;
}

Point KoenigsModel::forward(Point z) const {
    checked_point(z);
    if (!(std::abs(z) < 1.0)) throw ModelError("Koenigs map needs |z| < 1");
    if (variant_ == Variant::Strip) return (2.0 * d_ / kPi) * std::log((1.0 + z) / (1.0 - z));
    return Point(0.0, 1.0) * (1.0 - z) / (1.0 + z);
}

Point KoenigsModel::inverse(Point w) const {
    if (!in_domain(w)) throw ModelError("point outside the model domain");
    if (variant_ == Variant::Strip) return std::tanh(kPi * w / (4.0 * d_));
    const Point i(0.0, 1.0);
    return (i - w) / (i + w);
}

Point KoenigsModel::xi() const { return variant_ == Variant::Strip ? Point(1.0, 0.0) : Point(-1.0, 0.0); }
Point KoenigsModel::chi() const { return variant_ == Variant::Strip ? Point(-1.0, 0.0) : Point(-1.0, 0.0); }

Point KoenigsModel::boundary_offset(Point w, Point b) const {
    if (!in_domain(w)) throw ModelError("point outside the model domain");
    if (variant_ == Variant::Strip) {
        const Point x = kPi * w / (4.0 * d_);
        if (b == Point(1.0, 0.0)) return one_minus_tanh(x);
        if (b == Point(-1.0, 0.0)) return one_minus_tanh(-x);
    } else if (b == Point(-1.0, 0.0)) {
        const Point i(0.0, 1.0);
        return 2.0 * i / (i + w);
    }
    return 1.0 - std::conj(b) * inverse(w);
}

Trajectory trajectory(const KoenigsModel& model, Point z, const std::vector<double>& t_values) {
    const Point hz = model.forward(z);
    Trajectory traj{model, z, model.T(), {}};
    traj.samples.reserve(t_values.size());
    for (std::size_t i = 0; i < t_values.size(); ++i) {
        const double t = t_values[i];
        if (!std::isfinite(t) || !(t > traj.T)) throw ModelError("trajectory time outside (T, inf)");
        if (i > 0 && !(t > t_values[i - 1])) throw ModelError("trajectory times must be strictly increasing");
        const Point w = hz + t;
        traj.samples.push_back({t, model.inverse(w), model.boundary_offset(w, model.xi()),
                                model.boundary_offset(w, model.chi())});
    }
    return traj;
}

std::vector<double> linspace(double t_min, double t_max, int n) {
    if (n < 1 || !(t_max > t_min)) throw ModelError("linspace needs n >= 1 and t_max > t_min");
    std::vector<double> t(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) t[static_cast<std::size_t>(i)] = t_min + (t_max - t_min) * i / n;
    return t;
}

double sample_slope(const Trajectory& traj, std::size_t i, Point b) {
    const TrajectorySample& s = traj.samples.at(i);
    if (b == traj.model.xi()) return std::arg(s.offset_xi);
    if (b == traj.model.chi()) return std::arg(s.offset_chi);
    return slope_of(b, s.point);
}

namespace {

SlopeInterval extrema(const Trajectory& traj, std::size_t first, std::size_t last, Point b) {
    double lo = kPi;
    double hi = -kPi;
    for (std::size_t i = first; i < last; ++i) {
        const double s = sample_slope(traj, i, b);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return SlopeInterval(lo, hi);
}

}  // namespace

SlopeInterval slope_plus(const Trajectory& traj, Point xi) {
    const std::size_t n = traj.samples.size();
    return extrema(traj, n - tail_count(n), n, xi);
}

SlopeInterval slope_minus(const Trajectory& traj, Point chi) {
    return extrema(traj, 0, tail_count(traj.samples.size()), chi);
}

std::string to_string(SemigroupClass c) {
    switch (c) {
        case SemigroupClass::Hyperbolic: return "hyperbolic";
        case SemigroupClass::ParabolicPositiveStep: return "parabolic-positive-step";
        case SemigroupClass::ParabolicZeroStep: return "parabolic-zero-step";
    }
    return "unknown";
}

std::string to_string(FixedPointClass c) {
    switch (c) {
        case FixedPointClass::Attractive: return "attractive";
        case FixedPointClass::Repulsive: return "repulsive";
        case FixedPointClass::SuperRepulsive: return "super-repulsive";
    }
    return "unknown";
}

}  // namespace hmslope
