#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmslope/geometry.hpp"

namespace hmslope {

class PlanError : public std::runtime_error {
public:
    explicit PlanError(const std::string& what) : std::runtime_error(what) {}
};

class BuildError : public std::runtime_error {
public:
    explicit BuildError(const std::string& what) : std::runtime_error(what) {}
};

class ClassificationError : public std::runtime_error {
public:
    explicit ClassificationError(const std::string& what) : std::runtime_error(what) {}
};

enum class Direction { Forward, Backward };
enum class SpecialMode { None, B2Zero, B1One, FullInterval };
enum class ToothLabel { Upper, Lower };

/// How to read the n >= 2 recurrences of the special backward modes. The
/// printed forms omit the rho_{n-1} factor; Corrected restores it.
enum class RecurrenceReading { Corrected, Verbatim };

/// Sign of the second tooth family of a backward comb. Verbatim keeps the
/// printed +i*rho_k; Mirrored uses -i*rho_k like the forward comb.
enum class BackwardToothSign { Mirrored, Verbatim };

/// Tooth heights, block widths and the limits they are designed to produce.
/// limit_high/limit_low are (a1, a2) for forward plans, (b1, b2) backward.
struct SequencePlan {
    Direction direction = Direction::Forward;
    double limit_high = 0.5;
    double limit_low = 0.5;
    SpecialMode special = SpecialMode::None;
    int m = 0;
    RecurrenceReading reading = RecurrenceReading::Corrected;
    std::vector<double> r;
    std::vector<double> rho;
    std::vector<double> u_prime;
    std::vector<double> u;

    int pairs() const { return static_cast<int>(r.size()); }
    int blocks() const { return 2 * pairs(); }
    bool has_widths() const { return !u_prime.empty(); }
    /// Angles pi*(1/2 - limit) in the order (theta1, theta2).
    double theta1() const;
    double theta2() const;
};

SequencePlan plan_forward(double theta1, double theta2, double r1, int pairs);
SequencePlan plan_backward(double theta1, double theta2, double r1, int pairs);

struct SpecialSpec {
    SpecialMode mode = SpecialMode::FullInterval;
    double b = 0.5;  // b1 for B2Zero, b2 for B1One; unused for FullInterval
    int m = 0;
};

SequencePlan plan_backward_special(const SpecialSpec& spec, double r1, int pairs,
                                   RecurrenceReading reading = RecurrenceReading::Corrected);

/// Recurrence residuals and monotonicity. Throws PlanError on violation.
void validate_plan(const SequencePlan& plan);

/// Same plan regenerated with `extra` more tooth pairs; widths are dropped.
SequencePlan extend_plan(const SequencePlan& plan, int extra);

/// Explicit width schedule: widths must be positive and strictly increasing,
/// one per block (2 * pairs).
SequencePlan assign_widths(SequencePlan plan, std::span<const double> widths);

struct Tooth {
    HalfLine line;
    ToothLabel label = ToothLabel::Upper;
    int n = 1;  // anchor abscissa is +-u_n
};

/// A closed horizontal piece of boundary; rays have x_lo = -inf.
struct BoundaryFeature {
    HorizontalSegment seg;
    int tooth = 0;           // 1-based tooth index it belongs to
    bool extension = false;  // surgery segment rather than the tooth itself
};

struct BoundaryHit {
    double distance = 0.0;
    Point point;
    int feature = -1;
};

/// Flat list of horizontal boundary pieces. Everything the walk-on-spheres
/// engine needs from a domain.
class CombBoundary {
public:
    CombBoundary() = default;
    explicit CombBoundary(std::vector<BoundaryFeature> features);

    const std::vector<BoundaryFeature>& features() const { return features_; }
    const BoundaryFeature& feature(int i) const { return features_.at(static_cast<std::size_t>(i)); }

    BoundaryHit nearest(Point p) const;
    bool on_boundary(Point p) const;
    /// Image under z -> factor * z.
    CombBoundary scaled(double factor) const;

    static CombBoundary pseudo_strip(Point center, double d1, double d2, double width);

private:
    struct Packed {
        double y, x_lo, x_hi;
    };
    std::vector<BoundaryFeature> features_;
    std::vector<Packed> packed_;
};

class CombDomain {
public:
    CombDomain(std::vector<Tooth> teeth, Direction direction, int truncation_count);

    const std::vector<Tooth>& teeth() const { return teeth_; }
    const Tooth& tooth(int n) const;
    Direction direction() const { return direction_; }
    int truncation_count() const { return truncation_count_; }
    const CombBoundary& boundary() const { return boundary_; }

    bool contains(Point p) const { return !boundary_.on_boundary(p); }

private:
    std::vector<Tooth> teeth_;
    Direction direction_;
    int truncation_count_;
    CombBoundary boundary_;
};

CombDomain build_comb(const SequencePlan& plan, BackwardToothSign sign = BackwardToothSign::Mirrored);

/// Midpoints x_n = +-(u_n + u_{n-1})/2, u_0 = 0, for n = 1..2N.
std::vector<double> midpoints(const SequencePlan& plan);

/// Sample point in the half-infinite channel left of the last backward tooth.
double backward_terminal_point(const SequencePlan& plan);

/// Inclusive range of block indices whose witness rectangle exists:
/// forward [1, 2N-1], backward [3, 2N+1] (2N+1 is the terminal channel).
std::pair<int, int> witness_range(const SequencePlan& plan);

/// Heights (d1, d2) of witness n; needs no widths.
std::pair<double, double> witness_heights(const SequencePlan& plan, int n);

/// Rectangle certifying the strip approximation at x_n. Backward witnesses
/// assume the mirrored tooth sign.
RectWitness witness_rect(const SequencePlan& plan, int n);

/// Exact strip value d2/(d1+d2) of witness_rect(plan, n).
double witness_target(const SequencePlan& plan, int n);

/// rect inside the domain and both horizontal borders on the boundary.
bool verify_witness(const CombBoundary& boundary, const RectWitness& rect, double rel_tol = 1e-12);

enum class SurgeryKind {
    Extend,  // Omega_1: remove the segment continuing the tooth to the next anchor
    Delete   // Omega_2: add the whole tooth back to the domain
};

/// Direction in which the variant bounds omega^+ of the base domain.
enum class BoundSide { Upper, Lower };

class SurgeryVariant {
public:
    SurgeryVariant(const CombDomain& base, SurgeryKind kind, int tooth_n);

    SurgeryKind kind() const { return kind_; }
    int tooth() const { return tooth_; }
    ToothLabel label() const { return label_; }
    const CombBoundary& boundary() const { return boundary_; }
    bool contains(Point p) const { return !boundary_.on_boundary(p); }
    /// Upper: omega^+(base) <= omega^+(variant). Lower: the reverse.
    BoundSide bound() const;

private:
    SurgeryKind kind_;
    int tooth_;
    ToothLabel label_;
    CombBoundary boundary_;
};

/// Surgery on the upper tooth of pair k (tooth index 2k-1).
SurgeryVariant surgery(const CombDomain& domain, SurgeryKind kind, int k);
SurgeryVariant surgery_on_tooth(const CombDomain& domain, SurgeryKind kind, int tooth_n);

inline BoundaryHit boundary_distance(const CombDomain& d, Point p) { return d.boundary().nearest(p); }
inline BoundaryHit boundary_distance(const SurgeryVariant& s, Point p) { return s.boundary().nearest(p); }

/// Upper iff Im(hit) > ref_im. Throws ClassificationError on a tie.
ToothLabel classify_hit(Point hit, double ref_im);

std::string to_string(Direction d);
std::string to_string(SpecialMode m);
std::string to_string(ToothLabel l);

}  // namespace hmslope
