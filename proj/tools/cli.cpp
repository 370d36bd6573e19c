#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "CLI11.hpp"
#include "hmslope/analyzer.hpp"
#include "hmslope/comb.hpp"
#include "hmslope/io.hpp"
#include "hmslope/measure_exact.hpp"
#include "hmslope/semigroup.hpp"
#include "hmslope/wos.hpp"

namespace hmslope::cli {

namespace {

class IoFailure : public std::runtime_error {
public:
    explicit IoFailure(const std::string& what) : std::runtime_error(what) {}
};

class UsageFailure : public std::runtime_error {
public:
    explicit UsageFailure(const std::string& what) : std::runtime_error(what) {}
};

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoFailure("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoFailure("cannot write " + path);
    f << content;
    if (!f) throw IoFailure("error while writing " + path);
}

struct WosArgs {
    std::int64_t walkers = 100000;
    std::uint64_t seed = 42;
    double epsilon = 1e-6;
    std::int64_t max_steps = 100000;
    std::string radius_cap = "unbounded";
    bool no_rescale = false;
    double max_lost = 1e-3;
    int threads = 0;

    void add_to(CLI::App* app) {
        app->add_option("--walkers", walkers, "walkers per point")->capture_default_str();
        app->add_option("--seed", seed, "base seed")->capture_default_str();
        app->add_option("--epsilon", epsilon, "absorption shell in local-scale units")->capture_default_str();
        app->add_option("--max-steps", max_steps, "step budget per walk")->capture_default_str();
        app->add_option("--radius-cap", radius_cap, "jump radius cap in local-scale units or 'unbounded'")
            ->capture_default_str();
        app->add_flag("--no-rescale", no_rescale, "measure in original coordinates");
        app->add_option("--max-lost", max_lost, "largest lost fraction of a valid estimate")->capture_default_str();
        app->add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();
    }

    WosParams params() const {
        WosParams p;
        p.walkers = walkers;
        p.seed = seed;
        p.epsilon_shell = epsilon;
        p.max_steps = max_steps;
        if (radius_cap != "unbounded") {
            try {
                p.radius_cap = std::stod(radius_cap);
            } catch (const std::exception&) {
                throw UsageFailure("--radius-cap must be a number or 'unbounded'");
            }
        }
        p.rescale = !no_rescale;
        p.max_lost_fraction = max_lost;
        p.threads = threads;
        p.validate();
        return p;
    }
};

RunInfo run_info(const CLI::App* sub, std::uint64_t seed) {
    RunInfo info;
    info.command = sub->get_name();
    info.seed = seed;
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->get_name() == "--help") continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
        } else {
            value = opt->get_default_str();
        }
        if (opt->get_type_size() == 0 && value.empty()) value = opt->count() > 0 ? "true" : "false";
        if (value.empty()) value = "default";
        info.config.emplace_back(opt->get_name(), value);
    }
    return info;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageFailure("bad number '" + item + "' in list");
        }
    }
    return out;
}

SequencePlan load_plan(const std::string& path) { return plan_from_json(read_file(path)); }

BackwardToothSign parse_sign(const std::string& s) {
    if (s == "mirrored") return BackwardToothSign::Mirrored;
    if (s == "verbatim") return BackwardToothSign::Verbatim;
    throw UsageFailure("--sign must be mirrored or verbatim");
}

void print_plan_table(const SequencePlan& plan, std::ostream& out) {
    out << std::setw(4) << "n" << std::setw(16) << "r_n" << std::setw(16) << "rho_n" << std::setw(16) << "u'_n"
        << std::setw(16) << "u_n" << std::setw(16) << "x_n" << "\n";
    const auto x = plan.has_widths() ? midpoints(plan) : std::vector<double>{};
    const int rows = std::max(plan.pairs(), plan.blocks());
    for (int n = 1; n <= rows; ++n) {
        const auto i = static_cast<std::size_t>(n - 1);
        out << std::setw(4) << n;
        auto cell = [&](const std::vector<double>& v) {
            if (i < v.size())
                out << std::setw(16) << std::setprecision(8) << v[i];
            else
                out << std::setw(16) << "-";
        };
        cell(plan.r);
        cell(plan.rho);
        cell(plan.u_prime);
        cell(plan.u);
        cell(x);
        out << "\n";
    }
}

}  // namespace

double parse_angle(const std::string& text) {
    static const std::regex re(R"(^\s*([+-]?)\s*((?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)?(?:\s*/\s*(\d+(?:\.\d*)?))?\s*\*?\s*pi\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw std::invalid_argument("angle '" + text + "' is not of the form <num>pi");
    double v = m[2].matched ? std::stod(m[2].str()) : 1.0;
    if (m[3].matched) {
        const double q = std::stod(m[3].str());
        if (q == 0.0) throw std::invalid_argument("zero denominator in angle '" + text + "'");
        v /= q;
    }
    if (m[1].str() == "-") v = -v;
    return v * kPi;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Comb domains, harmonic measure and trajectory slopes"};
    app.set_version_flag("--version", tool_version());
    app.set_config("--config", "", "INI config file; sections name subcommands");
    app.require_subcommand(1);

    // plan
    CLI::App* plan_cmd = app.add_subcommand("plan", "plan tooth heights and block widths");
    bool fwd = false, bwd = false, full = false, verbatim = false, no_widths = false;
    std::string theta1_s, theta2_s, widths_s, out_plan, calib_csv, method_s = "rectangle-bounds";
    std::optional<double> b2zero_b1, b1one_b2;
    double r1 = 1.0, max_tol = 1.0;
    int pairs = 4, m_param = 0;
    WosArgs plan_wos;
    plan_wos.walkers = 20000;
    auto* dir = plan_cmd->add_option_group("direction");
    dir->add_flag("--forward", fwd, "increasing teeth, slope+ construction");
    dir->add_flag("--backward", bwd, "decreasing teeth, slope- construction");
    dir->require_option(1);
    plan_cmd->add_option("--theta1", theta1_s, "lower slope endpoint, e.g. -0.25pi");
    plan_cmd->add_option("--theta2", theta2_s, "upper slope endpoint, e.g. 1/6pi");
    plan_cmd->add_flag("--full-interval", full, "backward plan with slope set [-pi/2, pi/2]");
    plan_cmd->add_option("--b2-zero", b2zero_b1, "backward plan with b2 = 0; value is b1");
    plan_cmd->add_option("--b1-one", b1one_b2, "backward plan with b1 = 1; value is b2");
    plan_cmd->add_option("--m", m_param, "offset m of the special recurrences")->capture_default_str();
    plan_cmd->add_flag("--verbatim-recurrence", verbatim, "special recurrences without the rho_{n-1} factor");
    plan_cmd->add_option("--r1", r1, "first upper tooth height")->capture_default_str();
    plan_cmd->add_option("--n", pairs, "tooth pairs")->capture_default_str();
    plan_cmd->add_option("--widths", widths_s, "explicit comma-separated block widths (2n values)");
    plan_cmd->add_flag("--no-widths", no_widths, "heights only");
    plan_cmd->add_option("--calibration", method_s, "rectangle-bounds or pseudo-strip")->capture_default_str();
    plan_cmd->add_option("--max-tolerance", max_tol, "cap on the per-block tolerance 1/n")->capture_default_str();
    plan_cmd->add_option("--calibration-csv", calib_csv, "write the calibration transcript");
    plan_cmd->add_option("-o,--output", out_plan, "plan JSON path (stdout if omitted)");
    plan_wos.add_to(plan_cmd);

    // build
    CLI::App* build_cmd = app.add_subcommand("build", "build the comb domain of a plan");
    std::string build_plan, build_out, build_svg, sign_s = "mirrored";
    build_cmd->add_option("--plan", build_plan, "plan JSON")->required();
    build_cmd->add_option("--sign", sign_s, "backward tooth sign: mirrored or verbatim")->capture_default_str();
    build_cmd->add_option("-o,--output", build_out, "domain JSON path (stdout if omitted)");
    build_cmd->add_option("--svg", build_svg, "SVG rendering path");

    // measure
    CLI::App* measure_cmd = app.add_subcommand("measure", "estimate the upper harmonic measure at one point");
    std::string measure_plan, measure_out, surgery_s, measure_sign = "mirrored";
    std::vector<double> pseudo;
    double mx = 0.0, my = 0.0, ref_im = 0.0, scale = 1.0;
    int surgery_tooth = 0;
    WosArgs measure_wos;
    measure_cmd->add_option("--plan", measure_plan, "plan JSON");
    measure_cmd->add_option("--pseudo-strip", pseudo, "d1 d2 u: two-tooth strip around the origin")->expected(3);
    measure_cmd->add_option("--x", mx, "point real part")->capture_default_str();
    measure_cmd->add_option("--y", my, "point imaginary part")->capture_default_str();
    measure_cmd->add_option("--ref-im", ref_im, "height splitting upper and lower boundary")->capture_default_str();
    measure_cmd->add_option("--scale", scale, "local length scale")->capture_default_str();
    measure_cmd->add_option("--surgery", surgery_s, "extend or delete");
    measure_cmd->add_option("--tooth", surgery_tooth, "tooth index for --surgery");
    measure_cmd->add_option("--sign", measure_sign, "backward tooth sign")->capture_default_str();
    measure_cmd->add_option("-o,--output", measure_out, "estimate JSON path (stdout if omitted)");
    measure_wos.add_to(measure_cmd);

    // profile
    CLI::App* profile_cmd = app.add_subcommand("profile", "estimates along the real axis");
    std::string profile_plan, profile_csv, profile_json, t_list, profile_sign = "mirrored";
    std::vector<double> t_range;
    bool at_anchors = false;
    WosArgs profile_wos;
    profile_cmd->add_option("--plan", profile_plan, "plan JSON")->required();
    profile_cmd->add_option("--t", t_list, "comma-separated sample points");
    profile_cmd->add_option("--t-range", t_range, "t_min t_max count")->expected(3);
    profile_cmd->add_flag("--anchors", at_anchors, "sample at the verification anchors with their local scales");
    profile_cmd->add_option("--sign", profile_sign, "backward tooth sign")->capture_default_str();
    profile_cmd->add_option("--csv", profile_csv, "CSV output path (stdout if neither output given)");
    profile_cmd->add_option("--json", profile_json, "JSON output path");
    profile_wos.add_to(profile_cmd);

    // verify
    CLI::App* verify_cmd = app.add_subcommand("verify", "check anchors, sandwich bounds and the slope interval");
    std::string verify_plan, prefix, verify_sign = "mirrored";
    double anchor_tol = 0.05;
    std::optional<double> interval_tol_pi;
    int per_block = 3, tail = 2;
    WosArgs verify_wos;
    verify_cmd->add_option("--plan", verify_plan, "plan JSON")->required();
    verify_cmd->add_option("--anchor-tol", anchor_tol, "anchor tolerance")->capture_default_str();
    verify_cmd->add_option("--interval-tol", interval_tol_pi, "interval tolerance in units of pi");
    verify_cmd->add_option("--in-between", per_block, "in-between samples per block")->capture_default_str();
    verify_cmd->add_option("--tail", tail, "trailing anchors per class for the extrema")->capture_default_str();
    verify_cmd->add_option("--sign", verify_sign, "backward tooth sign")->capture_default_str();
    verify_cmd->add_option("--out", prefix, "output prefix for .json .txt .svg .csv")->capture_default_str();
    verify_wos.add_to(verify_cmd);

    // model
    CLI::App* model_cmd = app.add_subcommand("model", "closed-form trajectories and slopes");
    std::string model_name, model_csv;
    double d = 1.0, x0 = 0.0, y0 = 0.0, tmax = 100.0, tmin = 0.0;
    int samples = 2000;
    model_cmd->add_option("model", model_name, "strip or halfplane")->required();
    model_cmd->add_option("--d", d, "strip half-width")->capture_default_str();
    model_cmd->add_option("--x0", x0, "Re h(z)")->capture_default_str();
    model_cmd->add_option("--y0", y0, "Im h(z)")->capture_default_str();
    model_cmd->add_option("--tmin", tmin, "first time")->capture_default_str();
    model_cmd->add_option("--tmax", tmax, "last time")->capture_default_str();
    model_cmd->add_option("--samples", samples, "time steps")->capture_default_str();
    model_cmd->add_option("--csv", model_csv, "trajectory CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << tool_version() << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (plan_cmd->parsed()) {
            SequencePlan plan;
            const int specials = int(full) + int(b2zero_b1.has_value()) + int(b1one_b2.has_value());
            if (specials > 1) throw UsageFailure("choose at most one special mode");
            if (specials == 1) {
                if (!bwd) throw UsageFailure("special modes are backward plans");
                SpecialSpec spec;
                spec.mode = full ? SpecialMode::FullInterval
                                 : (b2zero_b1 ? SpecialMode::B2Zero : SpecialMode::B1One);
                spec.b = b2zero_b1 ? *b2zero_b1 : (b1one_b2 ? *b1one_b2 : 0.5);
                spec.m = m_param;
                plan = plan_backward_special(spec, r1, pairs,
                                             verbatim ? RecurrenceReading::Verbatim : RecurrenceReading::Corrected);
            } else {
                if (theta1_s.empty() || theta2_s.empty()) throw UsageFailure("--theta1 and --theta2 are required");
                double t1 = 0.0, t2 = 0.0;
                try {
                    t1 = parse_angle(theta1_s);
                    t2 = parse_angle(theta2_s);
                } catch (const std::invalid_argument& e) {
                    throw UsageFailure(e.what());
                }
                plan = fwd ? plan_forward(t1, t2, r1, pairs) : plan_backward(t1, t2, r1, pairs);
            }
            RunInfo info = run_info(plan_cmd, plan_wos.seed);
            if (!widths_s.empty()) {
                const auto w = parse_list(widths_s);
                plan = assign_widths(plan, w);
            } else if (!no_widths) {
                CalibrationOptions co;
                co.method = parse_calibration_method(method_s);
                co.params = plan_wos.params();
                co.max_tolerance = max_tol;
                CalibrationResult cr = calibrate_widths(plan, co);
                plan = cr.plan;
                if (!calib_csv.empty()) write_file(calib_csv, calibration_to_csv(cr, info));
            }
            const std::string text = plan_to_json(plan, info);
            if (out_plan.empty())
                out << text;
            else
                write_file(out_plan, text);
            print_plan_table(plan, out_plan.empty() ? err : out);
            return kOk;
        }

        if (build_cmd->parsed()) {
            const SequencePlan plan = load_plan(build_plan);
            const CombDomain dom = build_comb(plan, parse_sign(sign_s));
            const RunInfo info = run_info(build_cmd, 0);
            const std::string text = domain_to_json(dom, info);
            if (build_out.empty())
                out << text;
            else
                write_file(build_out, text);
            if (!build_svg.empty()) write_file(build_svg, comb_to_svg(dom, nullptr));
            return kOk;
        }

        if (measure_cmd->parsed()) {
            const WosParams p = measure_wos.params();
            CombBoundary boundary;
            if (!pseudo.empty()) {
                boundary = CombBoundary::pseudo_strip(Point(0.0, 0.0), pseudo[0], pseudo[1], pseudo[2]);
            } else if (!measure_plan.empty()) {
                const CombDomain dom = build_comb(load_plan(measure_plan), parse_sign(measure_sign));
                if (surgery_s.empty()) {
                    boundary = dom.boundary();
                } else {
                    SurgeryKind kind;
                    if (surgery_s == "extend")
                        kind = SurgeryKind::Extend;
                    else if (surgery_s == "delete")
                        kind = SurgeryKind::Delete;
                    else
                        throw UsageFailure("--surgery must be extend or delete");
                    boundary = surgery_on_tooth(dom, kind, surgery_tooth).boundary();
                }
            } else {
                throw UsageFailure("give --plan or --pseudo-strip");
            }
            const MeasureEstimate e = estimate_upper_measure(boundary, Point(mx, my), ref_im, p, scale);
            const std::string text = estimate_to_json(e);
            if (measure_out.empty())
                out << text;
            else
                write_file(measure_out, text);
            return e.valid ? kOk : kCheckFailed;
        }

        if (profile_cmd->parsed()) {
            const SequencePlan plan = load_plan(profile_plan);
            const CombDomain dom = build_comb(plan, parse_sign(profile_sign));
            std::vector<double> ts, scales;
            if (at_anchors) {
                const auto [lo, hi] = verification_range(plan);
                for (int n = lo; n <= hi; ++n) {
                    ts.push_back(witness_rect(plan, n).center().real());
                    scales.push_back(anchor_scale(plan, n));
                }
            } else if (!t_list.empty()) {
                ts = parse_list(t_list);
            } else if (!t_range.empty()) {
                const int count = static_cast<int>(t_range[2]);
                if (count < 1) throw UsageFailure("--t-range count must be positive");
                for (int i = 0; i < count; ++i)
                    ts.push_back(count == 1 ? t_range[0] : t_range[0] + (t_range[1] - t_range[0]) * i / (count - 1));
            }
            const auto prof = estimate_profile(dom.boundary(), ts, profile_wos.params(), scales);
            const RunInfo info = run_info(profile_cmd, profile_wos.seed);
            if (!profile_csv.empty()) write_file(profile_csv, profile_to_csv(prof, info));
            if (!profile_json.empty()) write_file(profile_json, profile_to_json(prof, info));
            if (profile_csv.empty() && profile_json.empty()) out << profile_to_csv(prof, info);
            for (const auto& e : prof)
                if (!e.estimate || !e.estimate->valid) return kCheckFailed;
            return kOk;
        }

        if (verify_cmd->parsed()) {
            const SequencePlan plan = load_plan(verify_plan);
            VerifyOptions vo;
            vo.params = verify_wos.params();
            vo.anchor_tolerance = anchor_tol;
            vo.interval_tolerance = interval_tol_pi ? *interval_tol_pi * kPi : default_interval_tolerance(plan);
            vo.in_between_per_block = per_block;
            vo.in_between = per_block > 0;
            vo.tail.per_class = tail;
            vo.sign = parse_sign(verify_sign);
            const VerificationReport rep = verify_construction(plan, vo);
            const RunInfo info = run_info(verify_cmd, verify_wos.seed);
            const std::string text = report_to_text(rep);
            out << text;
            if (!prefix.empty()) {
                write_file(prefix + ".json", report_to_json(rep, info));
                write_file(prefix + ".txt", text);
                write_file(prefix + ".csv", report_to_csv(rep, info));
                write_file(prefix + ".svg", comb_to_svg(build_comb(plan, vo.sign), &rep));
            }
            return rep.status == CheckStatus::Pass ? kOk : kCheckFailed;
        }

        if (model_cmd->parsed()) {
            KoenigsModel model = KoenigsModel::upper_half_plane();
            if (model_name == "strip")
                model = KoenigsModel::strip(d);
            else if (model_name != "halfplane")
                throw UsageFailure("unknown model '" + model_name + "' (strip or halfplane)");
            // Half-plane runs default to h(z) = i.
            const Point w0(x0, model_name == "halfplane" && y0 == 0.0 ? 1.0 : y0);
            const Point z = model.inverse(w0);
            const Trajectory traj = trajectory(model, z, linspace(tmin, tmax, samples));
            const SlopeInterval sp = slope_plus(traj, model.xi());
            out << std::setprecision(12);
            out << "model " << model.name() << ", class " << to_string(classify_domain(
                model_name == "strip" ? DomainDescription{StripDomain{d}} : DomainDescription{HalfPlaneDomain{}}))
                << "\n";
            out << "slope+ tail window [" << sp.lo << ", " << sp.hi << "] = [" << sp.lo / kPi << " pi, "
                << sp.hi / kPi << " pi]\n";
            if (model_name == "strip") {
                const double omega = strip_upper_measure({d - y0, d + y0});
                const double predicted = kPi * (0.5 - omega);
                const double measured = 0.5 * (sp.lo + sp.hi);
                out << "cross-check: measured " << measured << ", pi(1/2 - omega) = " << predicted
                    << " with omega = " << omega << ", |diff| = " << std::abs(measured - predicted) << "\n";
            }
            if (!model_csv.empty()) write_file(model_csv, trajectory_to_csv(traj, run_info(model_cmd, 0)));
            return kOk;
        }
    } catch (const IoFailure& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const UsageFailure& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const PlanError& e) {
        err << "plan error: " << e.what() << "\n";
        return kUsage;
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << "\n";
        return kUsage;
    } catch (const CalibrationError& e) {
        err << "calibration error: " << e.what() << "\n";
        return kCheckFailed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kCheckFailed;
    }
    return kUsage;
}

}  // namespace hmslope::cli
