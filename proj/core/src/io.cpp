#include "hmslope/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hmslope/rng.hpp"
#include "json.hpp"

namespace hmslope {

using json = nlohmann::ordered_json;

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json header(const std::string& kind, const RunInfo& info) {
    json h;
    h["schema"] = "hmslope." + kind;
    h["schema_version"] = kSchemaVersion;
    h["tool_version"] = tool_version();
    h["rng"] = std::string(rng::kAlgorithm);
    h["seed"] = info.seed;
    h["command"] = info.command;
    json cfg = json::object();
    for (const auto& [k, v] : info.config) cfg[k] = v;
    h["config"] = cfg;
    return h;
}

std::string csv_header(const std::string& kind, const RunInfo& info) {
    std::ostringstream out;
    out << "# hmslope " << tool_version() << "\n";
    out << "# schema hmslope." << kind << "/" << kSchemaVersion << "\n";
    out << "# command " << info.command << "\n";
    out << "# rng " << rng::kAlgorithm << "\n";
    out << "# seed " << info.seed << "\n";
    for (const auto& [k, v] : info.config) out << "# config " << k << "=" << v << "\n";
    return out.str();
}

std::string to_string(RecurrenceReading r) { return r == RecurrenceReading::Corrected ? "corrected" : "verbatim"; }

Direction direction_from(const std::string& s) {
    if (s == "forward") return Direction::Forward;
    if (s == "backward") return Direction::Backward;
    throw FormatError("unknown direction '" + s + "'");
}

SpecialMode special_from(const std::string& s) {
    for (SpecialMode m : {SpecialMode::None, SpecialMode::B2Zero, SpecialMode::B1One, SpecialMode::FullInterval})
        if (to_string(m) == s) return m;
    throw FormatError("unknown special mode '" + s + "'");
}

RecurrenceReading reading_from(const std::string& s) {
    if (s == "corrected") return RecurrenceReading::Corrected;
    if (s == "verbatim") return RecurrenceReading::Verbatim;
    throw FormatError("unknown recurrence reading '" + s + "'");
}

json plan_body(const SequencePlan& plan) {
    json j;
    j["direction"] = to_string(plan.direction);
    j["special"] = to_string(plan.special);
    j["m"] = plan.m;
    j["reading"] = to_string(plan.reading);
    j["limits"] = {{"high", plan.limit_high}, {"low", plan.limit_low}};
    j["theta_over_pi"] = {plan.theta1() / kPi, plan.theta2() / kPi};
    j["r"] = plan.r;
    j["rho"] = plan.rho;
    j["u_prime"] = plan.u_prime;
    j["u"] = plan.u;
    j["x"] = plan.has_widths() ? json(midpoints(plan)) : json::array();
    return j;
}

json estimate_json(const MeasureEstimate& e) {
    json j;
    j["mean"] = e.mean;
    j["stderr"] = e.std_error;
    j["walkers"] = e.walkers_used;
    j["upper_hits"] = e.upper_hits;
    j["lost"] = e.lost;
    j["lost_fraction"] = e.lost_fraction();
    j["steps"] = e.total_steps;
    j["valid"] = e.valid;
    return j;
}

json opt_estimate(const std::optional<MeasureEstimate>& e) { return e ? estimate_json(*e) : json(nullptr); }

json wos_json(const WosParams& p) {
    json j;
    j["epsilon_shell"] = p.epsilon_shell;
    j["max_steps"] = p.max_steps;
    j["walkers"] = p.walkers;
    j["seed"] = p.seed;
    j["radius_cap"] = p.radius_cap ? json(*p.radius_cap) : json("unbounded");
    j["rescale"] = p.rescale;
    j["max_lost_fraction"] = p.max_lost_fraction;
    return j;
}

json interval_json(const SlopeInterval& s) {
    return {{"lo", s.lo}, {"hi", s.hi}, {"lo_over_pi", s.lo / kPi}, {"hi_over_pi", s.hi / kPi}};
}

const char* kind_name(SurgeryKind k) { return k == SurgeryKind::Extend ? "extend" : "delete"; }
const char* bound_name(BoundSide b) { return b == BoundSide::Upper ? "upper" : "lower"; }

}  // namespace

std::string tool_version() { return HMSLOPE_VERSION; }

std::string plan_to_json(const SequencePlan& plan, const RunInfo& info) {
    json j = header("plan", info);
    j["plan"] = plan_body(plan);
    return j.dump(2) + "\n";
}

SequencePlan plan_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& ex) {
        throw FormatError(std::string("plan file is not valid JSON: ") + ex.what());
    }
    try {
        if (j.value("schema", "") != "hmslope.plan") throw FormatError("not a plan file (schema field)");
        if (j.value("schema_version", 0) != kSchemaVersion)
            throw FormatError("unsupported plan schema version " + std::to_string(j.value("schema_version", 0)));
        const json& p = j.at("plan");
        SequencePlan plan;
        plan.direction = direction_from(p.at("direction").get<std::string>());
        plan.special = special_from(p.at("special").get<std::string>());
        plan.m = p.at("m").get<int>();
        plan.reading = reading_from(p.at("reading").get<std::string>());
        plan.limit_high = p.at("limits").at("high").get<double>();
        plan.limit_low = p.at("limits").at("low").get<double>();
        plan.r = p.at("r").get<std::vector<double>>();
        plan.rho = p.at("rho").get<std::vector<double>>();
        const auto widths = p.at("u_prime").get<std::vector<double>>();
        validate_plan(plan);
        if (widths.empty()) return plan;
        plan = assign_widths(plan, widths);
        const auto u = p.at("u").get<std::vector<double>>();
        if (u.size() != plan.u.size()) throw FormatError("u and u_prime lengths differ");
        for (std::size_t i = 0; i < u.size(); ++i)
            if (std::abs(u[i] - plan.u[i]) > 1e-12 * plan.u[i]) throw FormatError("u is not the prefix sum of u_prime");
        return plan;
    } catch (const json::exception& ex) {
        throw FormatError(std::string("malformed plan file: ") + ex.what());
    }
}

std::string domain_to_json(const CombDomain& domain, const RunInfo& info) {
    json j = header("domain", info);
    json d;
    d["direction"] = to_string(domain.direction());
    d["truncation_count"] = domain.truncation_count();
    json teeth = json::array();
    for (const auto& t : domain.teeth())
        teeth.push_back({{"n", t.n}, {"re", t.line.anchor.real()}, {"im", t.line.anchor.imag()},
                         {"label", to_string(t.label)}});
    d["teeth"] = teeth;
    j["domain"] = d;
    return j.dump(2) + "\n";
}

std::string estimate_to_json(const MeasureEstimate& e) { return estimate_json(e).dump(2) + "\n"; }

std::string profile_to_csv(const std::vector<ProfileEntry>& profile, const RunInfo& info) {
    std::ostringstream out;
    out << csv_header("profile", info);
    out << "t,mean,stderr,walkers,lost,seed,valid,error\n";
    for (const auto& e : profile) {
        out << num(e.t) << ",";
        if (e.estimate)
            out << num(e.estimate->mean) << "," << num(e.estimate->std_error) << "," << e.estimate->walkers_used
                << "," << e.estimate->lost;
        else
            out << ",,,";
        out << "," << e.seed << "," << (e.estimate && e.estimate->valid ? 1 : 0) << ",";
        std::string err = e.error;
        std::replace(err.begin(), err.end(), ',', ';');
        out << err << "\n";
    }
    return out.str();
}

std::string profile_to_json(const std::vector<ProfileEntry>& profile, const RunInfo& info) {
    json j = header("profile", info);
    json rows = json::array();
    for (const auto& e : profile) {
        json r;
        r["t"] = e.t;
        r["seed"] = e.seed;
        r["estimate"] = opt_estimate(e.estimate);
        r["error"] = e.error;
        rows.push_back(r);
    }
    j["profile"] = rows;
    return j.dump(2) + "\n";
}

std::string trajectory_to_csv(const Trajectory& traj, const RunInfo& info) {
    std::ostringstream out;
    out << csv_header("trajectory", info);
    out << "t,re,im,slope\n";
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i];
        out << num(s.t) << "," << num(s.point.real()) << "," << num(s.point.imag()) << ","
            << num(sample_slope(traj, i, traj.model.xi())) << "\n";
    }
    return out.str();
}

std::string report_to_json(const VerificationReport& rep, const RunInfo& info) {
    json j = header("report", info);
    j["plan"] = plan_body(rep.plan);
    j["wos"] = wos_json(rep.options.params);
    j["verify"] = {{"anchor_tolerance", rep.options.anchor_tolerance},
                   {"interval_tolerance", rep.options.interval_tolerance},
                   {"in_between_per_block", rep.options.in_between ? rep.options.in_between_per_block : 0},
                   {"tail_per_class", rep.options.tail.per_class},
                   {"backward_tooth_sign",
                    rep.options.sign == BackwardToothSign::Mirrored ? "mirrored" : "verbatim"}};
    json anchors = json::array();
    for (const auto& a : rep.anchors) {
        json r;
        r["n"] = a.n;
        r["x"] = a.x;
        r["class"] = to_string(a.cls);
        r["target"] = a.target;
        r["local_scale"] = a.local_scale;
        r["seed"] = a.seed;
        r["estimate"] = opt_estimate(a.estimate);
        r["threshold"] = a.threshold;
        r["status"] = to_string(a.status);
        r["error"] = a.error;
        anchors.push_back(r);
    }
    j["anchors"] = anchors;
    json between = json::array();
    for (const auto& c : rep.in_between) {
        json r;
        r["block"] = c.block;
        r["tooth"] = c.tooth;
        r["x"] = c.x;
        r["seed"] = c.seed;
        r["estimate"] = opt_estimate(c.estimate);
        r["band"] = {c.band_lo, c.band_hi};
        json vars = json::array();
        for (const auto& v : c.variants)
            vars.push_back({{"kind", kind_name(v.kind)}, {"bound", bound_name(v.bound)}, {"seed", v.seed},
                            {"estimate", opt_estimate(v.estimate)}, {"error", v.error}});
        r["surgery"] = vars;
        r["in_band"] = c.in_band;
        r["ordered"] = c.ordered;
        r["status"] = to_string(c.status);
        r["error"] = c.error;
        between.push_back(r);
    }
    j["in_between"] = between;
    if (rep.limits)
        j["limits"] = {{"limsup", rep.limits->limsup_hat}, {"liminf", rep.limits->liminf_hat},
                       {"band_high", rep.limits->band_high}, {"band_low", rep.limits->band_low},
                       {"collapsed", rep.limits->collapsed}};
    else
        j["limits"] = nullptr;
    j["interval"] = rep.interval ? interval_json(*rep.interval) : json(nullptr);
    j["expected_interval"] = interval_json(rep.expected_interval);
    j["interval_status"] = to_string(rep.interval_status);
    j["failures"] = rep.failures;
    j["status"] = to_string(rep.status);
    return j.dump(2) + "\n";
}

std::string report_to_text(const VerificationReport& rep) {
    std::ostringstream out;
    char buf[256];
    out << "verification of " << to_string(rep.plan.direction) << " plan";
    if (rep.plan.special != SpecialMode::None) out << " (" << to_string(rep.plan.special) << ")";
    out << ", " << rep.plan.pairs() << " pairs, " << rep.options.params.walkers << " walkers/point, seed "
        << rep.options.params.seed << "\n\n";
    out << "anchors\n";
    out << "   n            x   class   target     mean   stderr  status\n";
    for (const auto& a : rep.anchors) {
        std::snprintf(buf, sizeof buf, "%4d %12.6g %7s %8.4f %8.4f %8.4f  %s", a.n, a.x, to_string(a.cls).c_str(),
                      a.target, a.estimate ? a.estimate->mean : NAN, a.estimate ? a.estimate->std_error : NAN,
                      to_string(a.status).c_str());
        out << buf;
        if (!a.error.empty()) out << "  (" << a.error << ")";
        out << "\n";
    }
    if (!rep.in_between.empty()) {
        out << "\nin-between samples (band, sandwich)\n";
        out << "block            x     mean        band lo   band hi   extend   delete  status\n";
        for (const auto& c : rep.in_between) {
            auto var = [&](SurgeryKind k) -> double {
                for (const auto& v : c.variants)
                    if (v.kind == k && v.estimate) return v.estimate->mean;
                return NAN;
            };
            std::snprintf(buf, sizeof buf, "%5d %12.6g %8.4f    %9.4f %9.4f %8.4f %8.4f  %s", c.block, c.x,
                          c.estimate ? c.estimate->mean : NAN, c.band_lo, c.band_hi, var(SurgeryKind::Extend),
                          var(SurgeryKind::Delete), to_string(c.status).c_str());
            out << buf;
            if (!c.error.empty()) out << "  (" << c.error << ")";
            out << "\n";
        }
    }
    out << "\n";
    if (rep.limits) {
        std::snprintf(buf, sizeof buf, "limsup ~ %.4f (+-%.4f), liminf ~ %.4f (+-%.4f)%s\n", rep.limits->limsup_hat,
                      rep.limits->band_high, rep.limits->liminf_hat, rep.limits->band_low,
                      rep.limits->collapsed ? " [collapsed]" : "");
        out << buf;
    }
    if (rep.interval) {
        std::snprintf(buf, sizeof buf, "slope interval [%.4f pi, %.4f pi], expected [%.4f pi, %.4f pi]: %s\n",
                      rep.interval->lo / kPi, rep.interval->hi / kPi, rep.expected_interval.lo / kPi,
                      rep.expected_interval.hi / kPi, to_string(rep.interval_status).c_str());
        out << buf;
    }
    for (const auto& f : rep.failures) out << "failure: " << f << "\n";
    out << "status: " << to_string(rep.status) << "\n";
    return out.str();
}

std::string report_to_csv(const VerificationReport& rep, const RunInfo& info) {
    std::ostringstream out;
    out << csv_header("report-profile", info);
    out << "t,mean,stderr,walkers,lost,kind,n,target\n";
    struct Row {
        double t;
        const MeasureEstimate* e;
        std::string kind;
        int n;
        double target;
    };
    std::vector<Row> rows;
    for (const auto& a : rep.anchors)
        if (a.estimate) rows.push_back({a.x, &*a.estimate, "anchor", a.n, a.target});
    for (const auto& c : rep.in_between)
        if (c.estimate) rows.push_back({c.x, &*c.estimate, "between", c.block, NAN});
    const bool fwd = rep.plan.direction == Direction::Forward;
    std::stable_sort(rows.begin(), rows.end(), [fwd](const Row& a, const Row& b) { return fwd ? a.t < b.t : a.t > b.t; });
    for (const auto& r : rows)
        out << num(r.t) << "," << num(r.e->mean) << "," << num(r.e->std_error) << "," << r.e->walkers_used << ","
            << r.e->lost << "," << r.kind << "," << r.n << "," << (std::isnan(r.target) ? "" : num(r.target)) << "\n";
    return out.str();
}

std::string calibration_to_csv(const CalibrationResult& result, const RunInfo& info) {
    std::ostringstream out;
    out << csv_header("calibration", info);
    out << "block,config,d1,d2,width,target,value_lo,value_hi,passed\n";
    for (const auto& p : result.transcript)
        out << p.block << "," << p.config << "," << num(p.d1) << "," << num(p.d2) << "," << num(p.width) << ","
            << num(p.target) << "," << num(p.value_lo) << "," << num(p.value_hi) << "," << (p.passed ? 1 : 0)
            << "\n";
    return out.str();
}

std::string comb_to_svg(const CombDomain& domain, const VerificationReport* report, const SvgOptions& opts) {
    const auto& teeth = domain.teeth();
    if (teeth.empty()) throw FormatError("nothing to draw");
    double x_min = 0.0, x_max = 0.0, y_abs = 0.0, y_small = std::numeric_limits<double>::infinity();
    for (const auto& t : teeth) {
        x_min = std::min(x_min, t.line.anchor.real());
        x_max = std::max(x_max, t.line.anchor.real());
        y_abs = std::max(y_abs, std::abs(t.line.anchor.imag()));
        y_small = std::min(y_small, std::abs(t.line.anchor.imag()));
    }
    const double pad = 0.05 * (x_max - x_min);
    x_min -= pad;
    x_max += pad;
    auto fy = [&](double y) {
        if (!opts.log_height) return y / y_abs;
        const double s = std::log10(1.0 + std::abs(y) / y_small) / std::log10(1.0 + y_abs / y_small);
        return y < 0 ? -s : s;
    };
    const double margin = 20.0;
    const double w = opts.width, h = opts.height;
    auto px = [&](double x) { return margin + (x - x_min) / (x_max - x_min) * (w - 2 * margin); };
    auto py = [&](double y) { return h / 2.0 - fy(y) * (h / 2.0 - margin); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\"" << opts.height
        << "\" viewBox=\"0 0 " << opts.width << " " << opts.height << "\">\n";
    out << "<!-- hmslope " << tool_version() << ", schema hmslope.svg/" << kSchemaVersion
        << (opts.log_height ? ", log-scaled heights" : "") << " -->\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << num(margin) << "\" y1=\"" << num(h / 2) << "\" x2=\"" << num(w - margin) << "\" y2=\""
        << num(h / 2) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    for (const auto& t : teeth) {
        const char* color = t.label == ToothLabel::Upper ? "#c0392b" : "#2c3e80";
        out << "<line x1=\"" << num(margin) << "\" y1=\"" << num(py(t.line.anchor.imag())) << "\" x2=\""
            << num(px(t.line.anchor.real())) << "\" y2=\"" << num(py(t.line.anchor.imag())) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"><title>tooth " << t.n << "</title></line>\n";
    }
    if (report) {
        for (const auto& a : report->anchors) {
            if (a.x < x_min || a.x > x_max) continue;
            out << "<circle cx=\"" << num(px(a.x)) << "\" cy=\"" << num(h / 2) << "\" r=\"3\" fill=\"black\"/>\n";
            if (a.estimate) {
                const double bar = a.estimate->mean * 60.0;
                out << "<rect x=\"" << num(px(a.x) - 3) << "\" y=\"" << num(h / 2 - bar) << "\" width=\"6\" height=\""
                    << num(bar) << "\" fill=\"#27ae60\" opacity=\"0.7\"><title>n=" << a.n << " mean "
                    << num(a.estimate->mean) << " target " << num(a.target) << "</title></rect>\n";
            }
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace hmslope
