#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hmslope/comb.hpp"

namespace hmslope {

class WosError : public std::runtime_error {
public:
    explicit WosError(const std::string& what) : std::runtime_error(what) {}
};

/// Lengths (epsilon_shell, radius_cap) are in units of the local scale passed
/// to the estimator.
struct WosParams {
    double epsilon_shell = 1e-6;
    std::int64_t max_steps = 100000;
    std::int64_t walkers = 100000;
    std::uint64_t seed = 42;
    std::optional<double> radius_cap;  // empty = unbounded
    bool rescale = true;
    double max_lost_fraction = 1e-3;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct MeasureEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t walkers_used = 0;
    std::int64_t upper_hits = 0;
    std::int64_t lost = 0;
    std::int64_t total_steps = 0;
    bool valid = false;
    std::chrono::duration<double> elapsed{0.0};

    std::int64_t walkers_requested() const { return walkers_used + lost; }
    double lost_fraction() const;

    /// Ignores elapsed time.
    bool operator==(const MeasureEstimate& o) const;
};

/// Probability that a walk started at `point` is absorbed on the part of the
/// boundary strictly above `ref_im`.
MeasureEstimate estimate_upper_measure(const CombBoundary& boundary, Point point, double ref_im,
                                       const WosParams& params, double local_scale = 1.0);

inline MeasureEstimate estimate_upper_measure(const CombDomain& d, Point point, double ref_im,
                                              const WosParams& params, double local_scale = 1.0) {
    return estimate_upper_measure(d.boundary(), point, ref_im, params, local_scale);
}

inline MeasureEstimate estimate_upper_measure(const SurgeryVariant& s, Point point, double ref_im,
                                              const WosParams& params, double local_scale = 1.0) {
    return estimate_upper_measure(s.boundary(), point, ref_im, params, local_scale);
}

struct ProfileEntry {
    double t = 0.0;
    std::uint64_t seed = 0;
    std::optional<MeasureEstimate> estimate;
    std::string error;
};

/// Seed used for profile point `index`.
std::uint64_t point_seed(std::uint64_t seed, std::size_t index);

/// Estimates at the real points t (reference height 0). `local_scales` is
/// either empty (scale 1) or one entry per t. Failures are recorded per entry.
std::vector<ProfileEntry> estimate_profile(const CombBoundary& boundary, std::span<const double> t_values,
                                           const WosParams& params, std::span<const double> local_scales = {});

}  // namespace hmslope
