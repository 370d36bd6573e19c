#include "hmslope/wos.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "hmslope/rng.hpp"

namespace hmslope {

namespace {

constexpr double kEscapeModulus = 1e150;

struct Tally {
    std::int64_t upper = 0;
    std::int64_t absorbed = 0;
    std::int64_t lost = 0;
    std::int64_t steps = 0;
};

struct WalkSetup {
    const CombBoundary* boundary;
    Point start;
    double ref_im;
    double eps;
    double cap;  // <= 0: unbounded
    std::int64_t max_steps;
    std::uint64_t seed;
};

void run_walkers(const WalkSetup& s, std::int64_t first, std::int64_t last, Tally& out) {
    Tally t;
    for (std::int64_t w = first; w < last; ++w) {
        rng::Xoshiro256ss gen(rng::derive_seed(s.seed, static_cast<std::uint64_t>(w)));
        Point p = s.start;
        bool done = false;
        std::int64_t step = 0;
        for (; step < s.max_steps; ++step) {
            const BoundaryHit hit = s.boundary->nearest(p);
            if (hit.distance <= s.eps) {
                const double y = hit.point.imag();
                if (y == s.ref_im) throw ClassificationError("walk absorbed at the reference height");
                if (y > s.ref_im) ++t.upper;
                ++t.absorbed;
                done = true;
                break;
            }
            double r = hit.distance;
            if (s.cap > 0.0 && r > s.cap) r = s.cap;
            const double angle = 2.0 * kPi * gen.uniform();
            p += Point(r * std::cos(angle), r * std::sin(angle));
            if (std::abs(p.real()) > kEscapeModulus || std::abs(p.imag()) > kEscapeModulus) break;
        }
        t.steps += step;
        if (!done) ++t.lost;
    }
    out = t;
}

}  // namespace

void WosParams::validate() const {
    if (!(epsilon_shell > 0.0)) throw WosError("epsilon_shell must be positive");
    if (walkers < 1) throw WosError("need at least one walker");
    if (max_steps < 1) throw WosError("max_steps must be positive");
    if (radius_cap && !(*radius_cap > 0.0)) throw WosError("radius cap must be positive");
    if (!(max_lost_fraction >= 0.0 && max_lost_fraction <= 1.0)) throw WosError("max_lost_fraction must be in [0,1]");
    if (threads < 0) throw WosError("threads must be nonnegative");
}

double MeasureEstimate::lost_fraction() const {
    const auto n = walkers_requested();
    return n == 0 ? 0.0 : static_cast<double>(lost) / static_cast<double>(n);
}

bool MeasureEstimate::operator==(const MeasureEstimate& o) const {
    return mean == o.mean && std_error == o.std_error && walkers_used == o.walkers_used &&
           upper_hits == o.upper_hits && lost == o.lost && total_steps == o.total_steps && valid == o.valid;
}

MeasureEstimate estimate_upper_measure(const CombBoundary& boundary, Point point, double ref_im,
                                       const WosParams& params, double local_scale) {
    params.validate();
    checked_point(point);
    if (!(local_scale > 0.0) || !std::isfinite(local_scale)) throw WosError("local scale must be positive");
    const auto t0 = std::chrono::steady_clock::now();

    CombBoundary scaled;
    WalkSetup s{&boundary, point, ref_im, params.epsilon_shell * local_scale,
                params.radius_cap ? *params.radius_cap * local_scale : 0.0, params.max_steps, params.seed};
    if (params.rescale && local_scale != 1.0) {
        scaled = boundary.scaled(1.0 / local_scale);
        s.boundary = &scaled;
        s.start = point / local_scale;
        s.ref_im = ref_im / local_scale;
        s.eps = params.epsilon_shell;
        s.cap = params.radius_cap ? *params.radius_cap : 0.0;
    }
    if (!(s.boundary->nearest(s.start).distance > s.eps))
        throw WosError("start point lies within the absorption shell");

    int threads = params.threads > 0 ? params.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = static_cast<int>(std::clamp<std::int64_t>(threads, 1, params.walkers));
    std::vector<Tally> tallies(static_cast<std::size_t>(threads));
    const std::int64_t chunk = (params.walkers + threads - 1) / threads;
    if (threads == 1) {
        run_walkers(s, 0, params.walkers, tallies[0]);
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (int i = 0; i < threads; ++i) {
            const std::int64_t first = i * chunk;
            const std::int64_t last = std::min(params.walkers, first + chunk);
            pool.emplace_back([&, i, first, last] {
                try {
                    if (first < last) run_walkers(s, first, last, tallies[static_cast<std::size_t>(i)]);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    Tally total;
    for (const auto& t : tallies) {
        total.upper += t.upper;
        total.absorbed += t.absorbed;
        total.lost += t.lost;
        total.steps += t.steps;
    }
    if (total.absorbed == 0)
        throw WosError("all " + std::to_string(params.walkers) + " walkers lost (max_steps " +
                       std::to_string(params.max_steps) + ")");

    MeasureEstimate e;
    e.walkers_used = total.absorbed;
    e.upper_hits = total.upper;
    e.lost = total.lost;
    e.total_steps = total.steps;
    e.mean = static_cast<double>(total.upper) / static_cast<double>(total.absorbed);
    e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(total.absorbed));
    e.valid = e.lost_fraction() < params.max_lost_fraction || total.lost == 0;
    e.elapsed = std::chrono::steady_clock::now() - t0;
    return e;
}

std::uint64_t point_seed(std::uint64_t seed, std::size_t index) {
    return rng::derive_seed(seed ^ 0x5EED0F5EED0F5EEDULL, index);
}

std::vector<ProfileEntry> estimate_profile(const CombBoundary& boundary, std::span<const double> t_values,
                                           const WosParams& params, std::span<const double> local_scales) {
    if (!local_scales.empty() && local_scales.size() != t_values.size())
        throw WosError("need one local scale per profile point");
    std::vector<ProfileEntry> out;
    out.reserve(t_values.size());
    for (std::size_t i = 0; i < t_values.size(); ++i) {
        ProfileEntry entry;
        entry.t = t_values[i];
        entry.seed = point_seed(params.seed, i);
        WosParams p = params;
        p.seed = entry.seed;
        try {
            entry.estimate =
                estimate_upper_measure(boundary, Point(entry.t, 0.0), 0.0, p, local_scales.empty() ? 1.0 : local_scales[i]);
        } catch (const std::exception& ex) {
            entry.error = ex.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace hmslope
