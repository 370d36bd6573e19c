#include <gtest/gtest.h>

#include <string>

#include "hmslope/io.hpp"
#include "json.hpp"

using namespace hmslope;
using json = nlohmann::ordered_json;

namespace {

RunInfo info() {
    RunInfo r;
    r.command = "test";
    r.seed = 7;
    r.config = {{"--walkers", "100"}, {"--alpha", "x"}};
    return r;
}

SequencePlan plan_with_widths() {
    const std::vector<double> w{10, 20, 30, 40};
    return assign_widths(plan_forward(-kPi / 4, kPi / 6, 6.0, 2), w);
}

}  // namespace

TEST(PlanJson, RoundTrip) {
    const SequencePlan p = plan_with_widths();
    const std::string text = plan_to_json(p, info());
    const SequencePlan q = plan_from_json(text);
    EXPECT_EQ(q.direction, p.direction);
    EXPECT_EQ(q.r, p.r);
    EXPECT_EQ(q.rho, p.rho);
    EXPECT_EQ(q.u_prime, p.u_prime);
    EXPECT_EQ(q.u, p.u);
    EXPECT_EQ(q.limit_high, p.limit_high);
    EXPECT_EQ(plan_to_json(q, info()), text);
}

TEST(PlanJson, SpecialAndWidthless) {
    const SequencePlan p =
        plan_backward_special({SpecialMode::B1One, 1.0 / 3.0, 5}, 1.0, 3, RecurrenceReading::Verbatim);
    const SequencePlan q = plan_from_json(plan_to_json(p, info()));
    EXPECT_EQ(q.special, SpecialMode::B1One);
    EXPECT_EQ(q.m, 5);
    EXPECT_EQ(q.reading, RecurrenceReading::Verbatim);
    EXPECT_FALSE(q.has_widths());
    EXPECT_EQ(q.r, p.r);
}

TEST(PlanJson, HeaderEchoesRun) {
    const json j = json::parse(plan_to_json(plan_with_widths(), info()));
    EXPECT_EQ(j["schema"], "hmslope.plan");
    EXPECT_EQ(j["schema_version"], kSchemaVersion);
    EXPECT_EQ(j["tool_version"], tool_version());
    EXPECT_EQ(j["seed"], 7);
    EXPECT_EQ(j["command"], "test");
    EXPECT_EQ(j["config"]["--walkers"], "100");
    // Insertion order is kept.
    EXPECT_EQ(j["config"].begin().key(), "--walkers");
}

TEST(PlanJson, Rejects) {
    EXPECT_THROW(plan_from_json("{not json"), FormatError);
    EXPECT_THROW(plan_from_json(R"({"schema":"hmslope.report","schema_version":1})"), FormatError);
    json j = json::parse(plan_to_json(plan_with_widths(), info()));
    j["schema_version"] = 99;
    EXPECT_THROW(plan_from_json(j.dump()), FormatError);
    j = json::parse(plan_to_json(plan_with_widths(), info()));
    j["plan"].erase("rho");
    EXPECT_THROW(plan_from_json(j.dump()), FormatError);
    j = json::parse(plan_to_json(plan_with_widths(), info()));
    j["plan"]["direction"] = "sideways";
    EXPECT_THROW(plan_from_json(j.dump()), FormatError);
    j = json::parse(plan_to_json(plan_with_widths(), info()));
    j["plan"]["u"][1] = 31.0;
    EXPECT_THROW(plan_from_json(j.dump()), FormatError);
    j = json::parse(plan_to_json(plan_with_widths(), info()));
    j["plan"]["r"][1] = 37.0;
    EXPECT_THROW(plan_from_json(j.dump()), PlanError);
}

TEST(DomainJson, ListsTeeth) {
    const json j = json::parse(domain_to_json(build_comb(plan_with_widths()), info()));
    ASSERT_EQ(j["domain"]["teeth"].size(), 4u);
    EXPECT_EQ(j["domain"]["teeth"][1]["re"], 30.0);
    EXPECT_EQ(j["domain"]["teeth"][1]["im"], -18.0);
    EXPECT_EQ(j["domain"]["teeth"][1]["label"], "lower");
}

TEST(ProfileCsv, HeaderAndColumns) {
    const CombBoundary strip = CombBoundary::pseudo_strip(Point(0, 0), 1, 3, 64);
    WosParams p;
    p.walkers = 500;
    const std::vector<double> t{0.0, 0.5};
    const auto prof = estimate_profile(strip, t, p);
    const std::string csv = profile_to_csv(prof, info());
    EXPECT_NE(csv.find("# hmslope " + tool_version()), std::string::npos);
    EXPECT_NE(csv.find("# seed 7"), std::string::npos);
    EXPECT_NE(csv.find("# config --walkers=100"), std::string::npos);
    EXPECT_NE(csv.find("\nt,mean,stderr,walkers,lost,seed,valid,error\n"), std::string::npos);
    EXPECT_EQ(csv, profile_to_csv(prof, info()));
    const json j = json::parse(profile_to_json(prof, info()));
    EXPECT_EQ(j["profile"].size(), 2u);
    EXPECT_EQ(j["profile"][0]["estimate"]["walkers"], prof[0].estimate->walkers_used);
}

TEST(TrajectoryCsv, Columns) {
    const KoenigsModel m = KoenigsModel::strip(1.0);
    const std::string csv = trajectory_to_csv(trajectory(m, Point(0, 0), linspace(0, 1, 4)), info());
    EXPECT_NE(csv.find("\nt,re,im,slope\n"), std::string::npos);
    std::size_t rows = 0;
    for (char c : csv) rows += c == '\n';
    EXPECT_GE(rows, 6u);
}

TEST(Report, AllFormatsDeterministic) {
    CalibrationOptions co;
    co.max_tolerance = 0.02;
    const SequencePlan plan = calibrate_widths(plan_forward(-kPi / 4, kPi / 6, 6.0, 3), co).plan;
    VerifyOptions vo;
    vo.params.walkers = 500;
    vo.in_between_per_block = 1;
    const VerificationReport a = verify_construction(plan, vo);
    const VerificationReport b = verify_construction(plan, vo);
    EXPECT_EQ(report_to_json(a, info()), report_to_json(b, info()));
    EXPECT_EQ(report_to_csv(a, info()), report_to_csv(b, info()));
    EXPECT_EQ(report_to_text(a), report_to_text(b));
    EXPECT_EQ(comb_to_svg(build_comb(plan), &a), comb_to_svg(build_comb(plan), &b));
    const json j = json::parse(report_to_json(a, info()));
    EXPECT_EQ(j["schema"], "hmslope.report");
    EXPECT_EQ(j["anchors"].size(), a.anchors.size());
    EXPECT_EQ(j["anchors"][0]["seed"], a.anchors[0].seed);
    EXPECT_NE(report_to_text(a).find("status:"), std::string::npos);
    const std::string svg = comb_to_svg(build_comb(plan), &a);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Calibration, TranscriptCsv) {
    CalibrationOptions co;
    co.max_tolerance = 0.1;
    const CalibrationResult res = calibrate_widths(plan_forward(-kPi / 4, kPi / 6, 6.0, 2), co);
    const std::string csv = calibration_to_csv(res, info());
    std::size_t rows = 0;
    for (char c : csv) rows += c == '\n';
    EXPECT_GT(rows, res.transcript.size());
}
