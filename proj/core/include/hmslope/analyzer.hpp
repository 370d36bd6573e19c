#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmslope/comb.hpp"
#include "hmslope/geometry.hpp"
#include "hmslope/wos.hpp"

namespace hmslope {

class AnalysisError : public std::runtime_error {
public:
    explicit AnalysisError(const std::string& what) : std::runtime_error(what) {}
};

class CalibrationError : public std::runtime_error {
public:
    CalibrationError(const std::string& what, int block) : std::runtime_error(what), block_(block) {}
    int block() const { return block_; }

private:
    int block_;
};

/// [pi(1/2 - a1), pi(1/2 - a2)]. Requires 0 <= a2 <= a1 <= 1.
SlopeInterval slope_interval_from_limits(double a1, double a2);

enum class AnchorClass { None, High, Low };

struct ProfilePoint {
    double t = 0.0;
    MeasureEstimate estimate;
    int anchor = 0;  // block index n when t is a midpoint, else 0
    AnchorClass cls = AnchorClass::None;
};

/// Entries ordered by |t| increasing, i.e. along the limit direction.
struct OmegaProfile {
    Direction direction = Direction::Forward;
    std::vector<ProfilePoint> entries;

    void validate() const;
};

struct LimitPair {
    double limsup_hat = 0.0;
    double liminf_hat = 0.0;
    double band_high = 0.0;  // 3 sigma of the estimate chosen for limsup_hat
    double band_low = 0.0;
    bool collapsed = false;  // noise put liminf above limsup; both set to their mean
};

struct TailScheme {
    int per_class = 2;  // trailing anchors of each class that enter the extrema
};

/// Extrema over the trailing anchors of each class. Needs at least four
/// anchors with both classes present.
LimitPair tail_extrema(const OmegaProfile& profile, const TailScheme& scheme = {});

enum class CalibrationMethod {
    /// Two-sided bound valid for every domain containing the rectangle with
    /// its horizontal border on the boundary: top(A) <= omega <= 1 - bottom(A).
    RectangleBounds,
    /// Walk-on-spheres estimate in a two-tooth pseudo-strip.
    PseudoStrip
};

struct CalibrationOptions {
    CalibrationMethod method = CalibrationMethod::RectangleBounds;
    WosParams params;  // PseudoStrip only
    double s_min = 0.5;  // search range for width / (d1 + d2)
    double s_max = 64.0;
    int bisections = 8;
    double max_tolerance = 1.0;  // tolerance for block n is min(1/n, max_tolerance)
    double growth = 1e-3;        // minimum relative increase between consecutive widths
};

struct CalibrationProbe {
    int block = 0;
    int config = 0;
    double d1 = 0.0;
    double d2 = 0.0;
    double width = 0.0;
    double target = 0.0;
    double value_lo = 0.0;  // bound or estimate - 3 sigma
    double value_hi = 0.0;
    std::optional<MeasureEstimate> estimate;
    bool passed = false;
};

struct CalibrationResult {
    SequencePlan plan;
    std::vector<double> raw_widths;
    std::vector<CalibrationProbe> transcript;
};

CalibrationMethod parse_calibration_method(const std::string& s);
std::string to_string(CalibrationMethod m);

/// Per block, the two pseudo-strip test configurations are the witness
/// heights of blocks n and n+1 (clamped to the witness range).
std::vector<std::pair<double, double>> calibration_configs(const SequencePlan& plan, int block);

CalibrationResult calibrate_widths(const SequencePlan& plan, const CalibrationOptions& options);

enum class CheckStatus { Pass, Fail, Inconclusive };

struct AnchorCheck {
    int n = 0;
    double x = 0.0;
    AnchorClass cls = AnchorClass::None;
    double target = 0.0;
    double local_scale = 1.0;
    std::uint64_t seed = 0;
    std::optional<MeasureEstimate> estimate;
    std::string error;
    double threshold = 0.0;
    CheckStatus status = CheckStatus::Fail;
};

struct SurgeryEstimate {
    SurgeryKind kind = SurgeryKind::Extend;
    BoundSide bound = BoundSide::Upper;
    std::uint64_t seed = 0;
    std::optional<MeasureEstimate> estimate;
    std::string error;
};

struct InBetweenCheck {
    int block = 0;
    int tooth = 0;
    double x = 0.0;
    double band_lo = 0.0;
    double band_hi = 0.0;
    std::uint64_t seed = 0;
    std::optional<MeasureEstimate> estimate;
    std::vector<SurgeryEstimate> variants;
    std::string error;
    bool in_band = false;
    bool ordered = false;
    CheckStatus status = CheckStatus::Fail;
};

struct VerifyOptions {
    WosParams params;
    double anchor_tolerance = 0.05;
    double interval_tolerance = 0.05 * kPi;
    int in_between_per_block = 3;
    bool in_between = true;
    TailScheme tail;
    BackwardToothSign sign = BackwardToothSign::Mirrored;
};

/// Interval tolerance used when none is given: 0.05 pi, or 0.15 pi for the
/// special backward modes whose limits are only approached.
double default_interval_tolerance(const SequencePlan& plan);

struct VerificationReport {
    SequencePlan plan;
    VerifyOptions options;
    std::vector<AnchorCheck> anchors;
    std::vector<InBetweenCheck> in_between;
    std::optional<LimitPair> limits;
    std::optional<SlopeInterval> interval;
    SlopeInterval expected_interval;
    CheckStatus interval_status = CheckStatus::Fail;
    std::vector<std::string> failures;
    CheckStatus status = CheckStatus::Fail;
    double elapsed_seconds = 0.0;
};

VerificationReport verify_construction(const SequencePlan& plan, const VerifyOptions& options);

/// Anchor indices checked by verify_construction: forward 1..2N-2, backward
/// 3..2N+1.
std::pair<int, int> verification_range(const SequencePlan& plan);

AnchorClass anchor_class(const SequencePlan& plan, int n);

/// Local scale min(d1, d2) of witness n.
double anchor_scale(const SequencePlan& plan, int n);

std::string to_string(CheckStatus s);
std::string to_string(AnchorClass c);

}  // namespace hmslope
