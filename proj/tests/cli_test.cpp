#include <doctest.h>

#include <cmath>

#include "kcbs/cli.hpp"

using namespace kcbs::cli;

namespace {

const double kRt5 = std::sqrt(5.0);
const json kAxis = json::parse(R"({"state": {"re": [0, 0, 1], "im": [0, 0, 0]}, "pentagram": "regular"})");
const json kCoherent = json::parse(R"({"state": {"re": [0.7071067811865476, 0, 0], "im": [0, 0.7071067811865476, 0]}})");

Options float_mode() {
    Options o;
    o.mode = "float";
    return o;
}

}  // namespace

TEST_CASE("eval") {
    const auto a = cmd_eval(kAxis, {});
    CHECK(a.exit_code == kOk);
    CHECK(a.report["k"].get<double>() == doctest::Approx(kRt5));
    CHECK(a.report["verdict"] == "violates");
    const auto c = cmd_eval(kCoherent, {});
    CHECK(c.report["k"].get<double>() == doctest::Approx((5 - kRt5) / 2));
    CHECK(c.report["verdict"] == "classical-compatible");

    // Output state and pentagram are accepted back unchanged.
    const auto again = cmd_eval({{"state", a.report["state"]}, {"pentagram", a.report["pentagram"]}}, {});
    CHECK(again.report == a.report);

    const json first = json::parse(R"({"state": {"re": [0, 0, 1], "im": [0, 0, 0]},
                                       "pentagram": {"l1": [0, 0, 1], "t": [0.3, 1.0, 2.0]}})");
    const auto legs = cmd_eval(first, {}).report["leg_overlaps"];
    CHECK(legs[0] == 1.0);
    CHECK(legs[1] == 0.0);
    CHECK(legs[4] == 0.0);
}

TEST_CASE("certify exit codes") {
    const auto axis = cmd_certify(kAxis, {});
    CHECK(axis.exit_code == kInfeasible);
    CHECK(axis.report["verdict"] == "infeasible");
    CHECK(axis.report["violated"]["coeffs"]["1"] == 3);
    CHECK(cmd_certify(kAxis, float_mode()).exit_code == kInfeasible);

    const auto coh = cmd_certify(kCoherent, {});
    CHECK(coh.exit_code == kOk);
    CHECK(coh.report.contains("witness"));

    const json joint = json::parse(R"({"structure": {"n": 5, "contexts": [[0,1],[1,2],[2,3],[3,4],[4,0]]},
                                       "joint": {"n": 5, "weights": {"+-+--": "1"}}})");
    const auto pm = cmd_certify(joint, {});
    CHECK(pm.exit_code == kOk);
    // The witness is accepted back as a joint.
    CHECK(cmd_certify({{"structure", joint["structure"]}, {"joint", pm.report["witness"]}}, {}).exit_code == kOk);

    json border = {{"n", 5}, {"contexts", {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}}}};
    for (int c = 0; c < 5; ++c) border["tables"][std::to_string(c)] = {{"--", 0}, {"-+", 0.4}, {"+-", 0.4}, {"++", 0.2}};
    CHECK(cmd_certify(border, float_mode()).exit_code == kIndeterminate);

    // Emitted models are accepted back.
    CHECK(cmd_certify(axis.report["model"], {}).exit_code == kInfeasible);

    border["tables"]["2"] = {{"--", 0}, {"-+", 0.3}, {"+-", 0.4}, {"++", 0.3}};
    const auto bad = cmd_certify(border, {});
    CHECK(bad.exit_code == kBadInput);
    CHECK(bad.report["contexts"].size() == 2);
    CHECK(cmd_certify(json::parse(R"({"tables": 1})"), {}).exit_code == kBadInput);
}

TEST_CASE("cone") {
    const auto chsh = cmd_cone("chsh", {});
    CHECK(chsh.exit_code == kOk);
    CHECK(chsh.report["counts"]["nontrivial"] == 8);
    const auto pair = cmd_cone("pair", {});
    CHECK(pair.report["counts"]["trivial"] == 4);
    CHECK(pair.report["counts"]["nontrivial"] == 0);
    CHECK(cmd_cone(json{{"n", 21}, {"contexts", {{0, 20}}}}, {}).exit_code == kBadInput);
    CHECK(cmd_cone("nonsense", {}).exit_code == kBadInput);

    Options csv;
    csv.format = "csv";
    CHECK_FALSE(cmd_cone("chsh", csv).csv.empty());
}

TEST_CASE("expect") {
    const auto ray = cmd_cone("pentagram5", {}).report["rays"];
    json pent;
    for (const auto& r : ray)
        if (r["coeffs"].value("1", 0) == 3 && r["class"] == "nontrivial") pent = r;
    REQUIRE(!pent.is_null());
    const auto model = cmd_certify(kAxis, {}).report["model"];
    const auto e = cmd_expect({{"ray", pent}, {"model", model}}, {});
    CHECK(e.exit_code == kOk);
    CHECK(e.report["violated"] == true);
}

TEST_CASE("search") {
    CHECK(cmd_search(kCoherent, {}).exit_code == kBadInput);
    Options o;
    o.seed = 5;
    json in = kCoherent;
    in["config"] = {{"restarts", 4}};
    const auto r = cmd_search(in, o);
    CHECK(r.exit_code == kOk);
    CHECK(r.report["violated"] == false);

    Options csv = o;
    csv.format = "csv";
    const auto grid = cmd_search({{"grid", {0.0, 1.0}}, {"config", {{"restarts", 4}}}}, csv);
    CHECK(grid.exit_code == kOk);
    CHECK(grid.csv.rfind("c,k,violated", 0) == 0);
}

TEST_CASE("biphoton") {
    const auto plan = cmd_biphoton("plan", {{"true_rate", 1 / kRt5}}, {});
    CHECK(plan.exit_code == kOk);
    CHECK(plan.report["trials"] == 287);
    CHECK(cmd_biphoton("plan", {{"true_rate", 1.5}}, {}).exit_code == kBadInput);
    CHECK(cmd_biphoton("plan", {{"true_rate", 0.4}}, {}).exit_code != kOk);
    CHECK(cmd_biphoton("simulate", {{"rate", 0.5}, {"trials", 10}}, {}).exit_code == kBadInput);

    Options o;
    o.seed = 3;
    o.format = "csv";
    const auto sw = cmd_biphoton("sweep", {{"angles", {0.0, 0.5}}, {"trials", 100}}, o);
    CHECK(sw.exit_code == kOk);
    CHECK(sw.csv.rfind("angle,predicted_rate,simulated_estimate,ci_lower,ci_upper", 0) == 0);
    CHECK(cmd_biphoton("dance", json::object(), o).exit_code == kBadInput);
}

TEST_CASE("formatting and input loading") {
    CHECK(std::stod(format_double(0.1)) == 0.1);
    CHECK(load_input(R"({"a": 1})")["a"] == 1);
}
