#include "hmslope/analyzer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "hmslope/measure_exact.hpp"

namespace hmslope {

namespace {

constexpr std::uint64_t kInBetweenStream = 10000;
constexpr std::uint64_t kCalibrationStream = 100000;

CheckStatus combine(CheckStatus a, CheckStatus b) {
    if (a == CheckStatus::Fail || b == CheckStatus::Fail) return CheckStatus::Fail;
    if (a == CheckStatus::Inconclusive || b == CheckStatus::Inconclusive) return CheckStatus::Inconclusive;
    return CheckStatus::Pass;
}

std::optional<MeasureEstimate> try_estimate(const CombBoundary& b, double x, const WosParams& p, double scale,
                                            std::string& error) {
    try {
        MeasureEstimate e = estimate_upper_measure(b, Point(x, 0.0), 0.0, p, scale);
        if (!e.valid)
            error = "lost fraction " + std::to_string(e.lost_fraction()) + " above threshold";
        return e;
    } catch (const std::exception& ex) {
        error = ex.what();
        return std::nullopt;
    }
}

// Worst-case 3 sigma of a Bernoulli tally; used to decide whether a check can
// resolve its tolerance at all.
double resolution(const MeasureEstimate& e) {
    return 1.5 / std::sqrt(static_cast<double>(std::max<std::int64_t>(e.walkers_used, 1)));
}

}  // namespace

SlopeInterval slope_interval_from_limits(double a1, double a2) {
    if (!(a1 >= 0.0 && a1 <= 1.0 && a2 >= 0.0 && a2 <= 1.0)) throw AnalysisError("limits must lie in [0,1]");
    if (a2 > a1) throw AnalysisError("limits out of order: a2 > a1");
    return SlopeInterval(kPi * (0.5 - a1), kPi * (0.5 - a2));
}

void OmegaProfile::validate() const {
    for (std::size_t i = 1; i < entries.size(); ++i) {
        const bool ok = direction == Direction::Forward ? entries[i].t > entries[i - 1].t
                                                        : entries[i].t < entries[i - 1].t;
        if (!ok) throw AnalysisError("profile times must be strictly monotone in the limit direction");
    }
    for (const auto& e : entries)
        if (!e.estimate.valid) throw AnalysisError("profile contains an invalid estimate");
}

LimitPair tail_extrema(const OmegaProfile& profile, const TailScheme& scheme) {
    profile.validate();
    if (scheme.per_class < 1) throw AnalysisError("tail window needs at least one anchor per class");
    std::vector<const ProfilePoint*> high, low;
    for (const auto& e : profile.entries) {
        if (e.cls == AnchorClass::High) high.push_back(&e);
        if (e.cls == AnchorClass::Low) low.push_back(&e);
    }
    if (high.size() + low.size() < 4 || high.empty() || low.empty())
        throw AnalysisError("need at least four anchors covering both classes");
    LimitPair out;
    const auto take = [&](const std::vector<const ProfilePoint*>& v) {
        const std::size_t n = std::min<std::size_t>(v.size(), static_cast<std::size_t>(scheme.per_class));
        return std::vector<const ProfilePoint*>(v.end() - static_cast<std::ptrdiff_t>(n), v.end());
    };
    const auto hi_tail = take(high);
    const auto lo_tail = take(low);
    const auto hi_it = std::max_element(hi_tail.begin(), hi_tail.end(), [](auto a, auto b) {
        return a->estimate.mean < b->estimate.mean;
    });
    const auto lo_it = std::min_element(lo_tail.begin(), lo_tail.end(), [](auto a, auto b) {
        return a->estimate.mean < b->estimate.mean;
    });
    out.limsup_hat = (*hi_it)->estimate.mean;
    out.band_high = 3.0 * (*hi_it)->estimate.std_error;
    out.liminf_hat = (*lo_it)->estimate.mean;
    out.band_low = 3.0 * (*lo_it)->estimate.std_error;
    if (out.liminf_hat > out.limsup_hat) {
        if (out.liminf_hat - out.limsup_hat > out.band_high + out.band_low)
            throw AnalysisError("liminf estimate exceeds limsup estimate beyond the Monte Carlo band");
        const double mid = 0.5 * (out.liminf_hat + out.limsup_hat);
        out.limsup_hat = out.liminf_hat = mid;
        out.collapsed = true;
    }
    return out;
}

std::vector<std::pair<double, double>> calibration_configs(const SequencePlan& plan, int block) {
    if (block < 1 || block > plan.blocks()) throw CalibrationError("block index out of range", block);
    const SequencePlan ext = extend_plan(plan, 1);
    const int lo = plan.direction == Direction::Forward ? 1 : 3;
    std::vector<std::pair<double, double>> out;
    const int first = std::max(block, lo);
    out.push_back(witness_heights(ext, first));
    if (block + 1 > first) out.push_back(witness_heights(ext, block + 1));
    return out;
}

CalibrationResult calibrate_widths(const SequencePlan& plan, const CalibrationOptions& options) {
    if (!(options.s_min > 0.0 && options.s_max >= options.s_min)) throw CalibrationError("bad search range", 0);
    if (!(options.max_tolerance > 0.0)) throw CalibrationError("tolerance must be positive", 0);
    if (options.method == CalibrationMethod::PseudoStrip) options.params.validate();
    CalibrationResult result;
    result.plan = plan;
    result.plan.u_prime.clear();
    result.plan.u.clear();
    std::vector<double> widths;
    for (int n = 1; n <= plan.blocks(); ++n) {
        const double tol = std::min(1.0 / n, options.max_tolerance);
        const auto configs = calibration_configs(plan, n);
        double h_ref = 0.0;
        for (const auto& [d1, d2] : configs) h_ref = std::max(h_ref, d1 + d2);

        auto passes = [&](double s) {
            bool all = true;
            for (std::size_t c = 0; c < configs.size(); ++c) {
                const auto [d1, d2] = configs[c];
                const double h = d1 + d2;
                const double width = s * h_ref;
                CalibrationProbe probe;
                probe.block = n;
                probe.config = static_cast<int>(c);
                probe.d1 = d1;
                probe.d2 = d2;
                probe.width = width;
                probe.target = d2 / h;
                if (options.method == CalibrationMethod::RectangleBounds) {
                    const RectangleMeasures m = rectangle_center_measures(d1 / h, d2 / h, width / h);
                    probe.value_lo = m.top;
                    probe.value_hi = 1.0 - m.bottom;
                    probe.passed = probe.target - probe.value_lo < tol && probe.value_hi - probe.target < tol;
                } else {
                    WosParams p = options.params;
                    p.seed = point_seed(options.params.seed,
                                        kCalibrationStream + 10 * static_cast<std::uint64_t>(n) + c);
                    // Measured in units of d1 + d2; the value is scale invariant.
                    const CombBoundary strip =
                        CombBoundary::pseudo_strip(Point(0.0, 0.0), d1 / h, d2 / h, width / h);
                    const MeasureEstimate e =
                        estimate_upper_measure(strip, Point(0.0, 0.0), 0.0, p, std::min(d1, d2) / h);
                    probe.estimate = e;
                    probe.value_lo = e.mean - 3.0 * e.std_error;
                    probe.value_hi = e.mean + 3.0 * e.std_error;
                    probe.passed = e.valid && std::abs(e.mean - probe.target) + 3.0 * e.std_error < tol;
                }
                all = all && probe.passed;
                result.transcript.push_back(probe);
            }
            return all;
        };

        double s_pass = options.s_min;
        double s_fail = 0.0;
        if (!passes(s_pass)) {
            s_fail = s_pass;
            for (;;) {
                s_pass = 2.0 * s_fail;
                if (s_pass > options.s_max)
                    throw CalibrationError("no width up to " + std::to_string(options.s_max) +
                                               " x (d1 + d2) meets tolerance " + std::to_string(tol) +
                                               " at block " + std::to_string(n),
                                           n);
                if (passes(s_pass)) break;
                s_fail = s_pass;
            }
            for (int i = 0; i < options.bisections; ++i) {
                const double mid = 0.5 * (s_fail + s_pass);
                if (passes(mid))
                    s_pass = mid;
                else
                    s_fail = mid;
            }
        }
        const double raw = s_pass * h_ref;
        result.raw_widths.push_back(raw);
        const double floor = widths.empty() ? 0.0 : widths.back() * (1.0 + options.growth);
        widths.push_back(std::max(raw, floor));
    }
    result.plan = assign_widths(result.plan, widths);
    return result;
}

CalibrationMethod parse_calibration_method(const std::string& s) {
    if (s == "rectangle-bounds") return CalibrationMethod::RectangleBounds;
    if (s == "pseudo-strip") return CalibrationMethod::PseudoStrip;
    throw CalibrationError("unknown calibration method '" + s + "'", 0);
}

std::string to_string(CalibrationMethod m) {
    return m == CalibrationMethod::RectangleBounds ? "rectangle-bounds" : "pseudo-strip";
}

double default_interval_tolerance(const SequencePlan& plan) {
    return plan.special == SpecialMode::None ? 0.05 * kPi : 0.15 * kPi;
}

std::pair<int, int> verification_range(const SequencePlan& plan) {
    if (plan.direction == Direction::Forward) return {1, plan.blocks() - 2};
    return {3, plan.blocks() + 1};
}

AnchorClass anchor_class(const SequencePlan& plan, int n) {
    const bool odd = n % 2 == 1;
    if (plan.direction == Direction::Forward) return odd ? AnchorClass::High : AnchorClass::Low;
    return odd ? AnchorClass::Low : AnchorClass::High;
}

double anchor_scale(const SequencePlan& plan, int n) {
    const auto [d1, d2] = witness_heights(plan, n);
    return std::min(d1, d2);
}

VerificationReport verify_construction(const SequencePlan& plan, const VerifyOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    options.params.validate();
    VerificationReport rep;
    rep.plan = plan;
    rep.options = options;
    rep.expected_interval = SlopeInterval(kPi * (0.5 - plan.limit_high), kPi * (0.5 - plan.limit_low));
    const CombDomain domain = build_comb(plan, options.sign);
    const auto [first, last] = verification_range(plan);
    if (last < first) throw AnalysisError("plan too short: no anchors to verify");

    for (int n = first; n <= last; ++n) {
        AnchorCheck a;
        a.n = n;
        a.x = witness_rect(plan, n).center().real();
        a.cls = anchor_class(plan, n);
        a.target = witness_target(plan, n);
        a.local_scale = anchor_scale(plan, n);
        a.seed = point_seed(options.params.seed, static_cast<std::uint64_t>(n));
        WosParams p = options.params;
        p.seed = a.seed;
        a.estimate = try_estimate(domain.boundary(), a.x, p, a.local_scale, a.error);
        if (a.estimate && a.error.empty()) {
            const double three_sigma = 3.0 * a.estimate->std_error;
            a.threshold = std::max(options.anchor_tolerance, three_sigma);
            if (resolution(*a.estimate) > options.anchor_tolerance)
                a.status = CheckStatus::Inconclusive;
            else
                a.status = std::abs(a.estimate->mean - a.target) > a.threshold ? CheckStatus::Fail : CheckStatus::Pass;
        }
        if (a.status == CheckStatus::Fail)
            rep.failures.push_back("anchor n=" + std::to_string(n) +
                                   (a.error.empty() ? std::string(" outside tolerance") : ": " + a.error));
        rep.status = n == first ? a.status : combine(rep.status, a.status);
        rep.anchors.push_back(std::move(a));
    }

    if (options.in_between && options.in_between_per_block > 0) {
        std::uint64_t stream = kInBetweenStream;
        for (std::size_t i = 0; i + 1 < rep.anchors.size(); ++i) {
            const AnchorCheck& left = rep.anchors[i];
            const AnchorCheck& right = rep.anchors[i + 1];
            const int n = left.n;
            const double scale = std::min(left.local_scale, right.local_scale);
            const double slack = 1.0 / n;
            std::vector<SurgeryVariant> variants;
            variants.push_back(surgery_on_tooth(domain, SurgeryKind::Extend, n));
            variants.push_back(surgery_on_tooth(domain, SurgeryKind::Delete, n));
            for (int j = 1; j <= options.in_between_per_block; ++j) {
                InBetweenCheck c;
                c.block = n;
                c.tooth = n;
                c.x = left.x + (right.x - left.x) * j / (options.in_between_per_block + 1);
                c.seed = point_seed(options.params.seed, stream++);
                WosParams p = options.params;
                p.seed = c.seed;
                c.estimate = try_estimate(domain.boundary(), c.x, p, scale, c.error);
                for (const auto& v : variants) {
                    SurgeryEstimate se;
                    se.kind = v.kind();
                    se.bound = v.bound();
                    se.seed = point_seed(options.params.seed, stream++);
                    WosParams pv = options.params;
                    pv.seed = se.seed;
                    se.estimate = try_estimate(v.boundary(), c.x, pv, scale, se.error);
                    if (!se.error.empty() && c.error.empty()) c.error = "surgery variant: " + se.error;
                    c.variants.push_back(std::move(se));
                }
                if (c.estimate && c.error.empty()) {
                    const MeasureEstimate& e = *c.estimate;
                    c.band_lo = std::min(left.target, right.target) - slack - 3.0 * e.std_error;
                    c.band_hi = std::max(left.target, right.target) + slack + 3.0 * e.std_error;
                    c.in_band = e.mean >= c.band_lo && e.mean <= c.band_hi;
                    c.ordered = true;
                    for (const auto& se : c.variants) {
                        const double sc = 3.0 * std::hypot(e.std_error, se.estimate->std_error);
                        if (se.bound == BoundSide::Upper)
                            c.ordered = c.ordered && e.mean <= se.estimate->mean + sc;
                        else
                            c.ordered = c.ordered && se.estimate->mean - sc <= e.mean;
                    }
                    if (resolution(e) > options.anchor_tolerance)
                        c.status = CheckStatus::Inconclusive;
                    else
                        c.status = c.in_band && c.ordered ? CheckStatus::Pass : CheckStatus::Fail;
                }
                if (c.status == CheckStatus::Fail)
                    rep.failures.push_back("in-between x=" + std::to_string(c.x) + " block " + std::to_string(n) +
                                           (c.error.empty() ? (c.in_band ? " sandwich order violated"
                                                                          : " outside band")
                                                            : ": " + c.error));
                rep.status = combine(rep.status, c.status);
                rep.in_between.push_back(std::move(c));
            }
        }
    }

    OmegaProfile profile;
    profile.direction = plan.direction;
    for (const auto& a : rep.anchors)
        if (a.estimate && a.error.empty()) profile.entries.push_back({a.x, *a.estimate, a.n, a.cls});
    try {
        rep.limits = tail_extrema(profile, options.tail);
        rep.interval = slope_interval_from_limits(rep.limits->limsup_hat, rep.limits->liminf_hat);
        const double dlo = std::abs(rep.interval->lo - rep.expected_interval.lo);
        const double dhi = std::abs(rep.interval->hi - rep.expected_interval.hi);
        double noise = kPi * std::max(rep.limits->band_high, rep.limits->band_low);
        for (const auto& e : profile.entries) noise = std::max(noise, kPi * resolution(e.estimate));
        if (std::max(dlo, dhi) <= options.interval_tolerance)
            rep.interval_status = noise > options.interval_tolerance ? CheckStatus::Inconclusive : CheckStatus::Pass;
        else if (std::max(dlo, dhi) <= noise)
            rep.interval_status = CheckStatus::Inconclusive;
        else
            rep.interval_status = CheckStatus::Fail;
    } catch (const std::exception& ex) {
        rep.interval_status = CheckStatus::Fail;
        rep.failures.push_back(std::string("slope interval: ") + ex.what());
    }
    if (rep.interval_status == CheckStatus::Fail && rep.interval)
        rep.failures.push_back("slope interval outside tolerance of the expected interval");
    rep.status = combine(rep.status, rep.interval_status);
    rep.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Inconclusive: return "inconclusive";
    }
    return "unknown";
}

std::string to_string(AnchorClass c) {
    switch (c) {
        case AnchorClass::None: return "none";
        case AnchorClass::High: return "high";
        case AnchorClass::Low: return "low";
    }
    return "unknown";
}

}  // namespace hmslope
