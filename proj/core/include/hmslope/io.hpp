#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hmslope/analyzer.hpp"
#include "hmslope/comb.hpp"
#include "hmslope/semigroup.hpp"
#include "hmslope/wos.hpp"

namespace hmslope {

class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kSchemaVersion = 1;

std::string tool_version();

/// Echoed into every artifact. Keys keep their insertion order.
struct RunInfo {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config;
};

std::string plan_to_json(const SequencePlan& plan, const RunInfo& info);
/// Rebuilds and revalidates the plan. Throws FormatError on schema problems,
/// PlanError when the numbers violate the recurrences.
SequencePlan plan_from_json(const std::string& text);

std::string domain_to_json(const CombDomain& domain, const RunInfo& info);

std::string estimate_to_json(const MeasureEstimate& e);

/// Columns: t, mean, stderr, walkers, lost (then seed, valid, error).
std::string profile_to_csv(const std::vector<ProfileEntry>& profile, const RunInfo& info);
std::string profile_to_json(const std::vector<ProfileEntry>& profile, const RunInfo& info);

/// Columns: t, re, im, slope (slope with respect to the Denjoy-Wolff point).
std::string trajectory_to_csv(const Trajectory& traj, const RunInfo& info);

std::string report_to_json(const VerificationReport& report, const RunInfo& info);
std::string report_to_text(const VerificationReport& report);
/// Anchor and in-between estimates as a profile table.
std::string report_to_csv(const VerificationReport& report, const RunInfo& info);

std::string calibration_to_csv(const CalibrationResult& result, const RunInfo& info);

struct SvgOptions {
    bool log_height = true;
    int width = 960;
    int height = 480;
};

/// Teeth of the first blocks, anchor points and estimate bars when a report
/// is given.
std::string comb_to_svg(const CombDomain& domain, const VerificationReport* report, const SvgOptions& opts = {});

}  // namespace hmslope
