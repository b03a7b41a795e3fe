// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "cchan/cli.hpp"
#include "test_support.hpp"

#include <filesystem>
#include <fstream>

using namespace cchan;
using cchan::testing::Rng;

namespace {

json coupling(const std::string& type, const char* key = nullptr, double value = 0.0) {
    json j = {{"form", "coupling"}, {"type", type}};
    if (key) j[key] = value;
    return j;
}

json system(int n, const json& bc, double q = 0.0) {
    return {{"n", n}, {"points", json::array({{{"q", q}, {"bc", bc}}})}};
}

json strip_time(json report) {
    report.erase("wall_time_s");
    return report;
}

}  // namespace

TEST_CASE("exit codes") {
    CHECK(exit_code_for(ErrorKind::ParseError) == 2);
    CHECK(exit_code_for(ErrorKind::NotSelfAdjoint) == 3);
    CHECK(exit_code_for(ErrorKind::RankDeficient) == 3);
    CHECK(exit_code_for(ErrorKind::NotUnitary) == 3);
    CHECK(exit_code_for(ErrorKind::NotReducible) == 4);
    CHECK(exit_code_for(ErrorKind::NotRegular) == 5);
    CHECK(exit_code_for(ErrorKind::OnEssentialSpectrum) == 5);
}

TEST_CASE("validate: Dirichlet on both sides") {
    const json cfg = system(1, {{"form", "ab"}, {"A", {{1, 0}, {0, 1}}}, {"B", {{0, 0}, {0, 0}}}});
    const RunReport rr = run_command("validate", cfg, {});
    CHECK(rr.exit_code == 0);
    CHECK(rr.report["schema"] == "1");
    CHECK(rr.report["task"] == "validate");
    CHECK(rr.report.contains("wall_time_s"));
    const json& p = rr.report["results"]["points"][0];
    CHECK(p["valid"] == true);
    CHECK(p["connecting"] == false);
}

TEST_CASE("validate: delta coupling") {
    const RunReport rr = run_command("validate", system(2, coupling("delta", "alpha", 1.5)), {});
    CHECK(rr.exit_code == 0);
    const json& p = rr.report["results"]["points"][0];
    CHECK(p["valid"] == true);
    CHECK(p["connecting"] == false);
    CHECK(p["continuity"] == json::array({"Continuous"}));
}

TEST_CASE("validate: malformed and invalid input") {
    const json odd = system(1, {{"form", "u"}, {"U", {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}});
    const RunReport r1 = run_command("validate", odd, {});
    CHECK(r1.exit_code == 2);
    CHECK(r1.report["results"]["error"] == "ParseError");

    const json not_sa = system(1, {{"form", "ab"}, {"A", {{1, 0}, {0, 1}}}, {"B", {{0, 1}, {0, 0}}}});
    const RunReport r2 = run_command("validate", not_sa, {});
    CHECK(r2.exit_code == 3);
    CHECK(r2.report["results"]["points"][0]["error"] == "NotSelfAdjoint");

    const json bad_transfer = system(
        1, {{"form", "transfer"}, {"C11", {{2}}}, {"C12", {{0}}}, {"C21", {{0}}}, {"C22", {{1}}}});
    const RunReport r3 = run_command("validate", bad_transfer, {});
    CHECK(r3.exit_code == 3);
    CHECK(r3.report["results"]["points"][0]["relation"] == 3);

    CHECK(run_command("validate", json{{"points", json::array()}}, {}).exit_code == 2);
    CHECK(run_command("validate", system(1, {{"form", "spline"}}), {}).exit_code == 2);
}

TEST_CASE("convert reports all forms of one subspace") {
    const RunReport rr = run_command("convert", system(1, coupling("delta", "alpha", 2.0)), {});
    CHECK(rr.exit_code == 0);
    const json& p = rr.report["results"]["points"][0];
    CHECK(p["max_subspace_distance"].get<double>() < 1e-12);
    REQUIRE_FALSE(p["transfer"].is_null());
    const BoundaryCondition t = bc_from_json(p["transfer"], 1);
    const auto tf = std::get<TransferForm>(t.form());
    CHECK(std::abs(tf.C12()(0, 0) - 2.0) < 1e-12);

    const RunReport r2 = run_command("convert", system(2, coupling("delta", "alpha", 2.0)), {});
    CHECK(r2.report["results"]["points"][0]["transfer"].is_null());
}

TEST_CASE("reduce: delta coupling on three channels") {
    const RunReport rr = run_command("reduce", system(3, coupling("delta", "alpha", 1.2)), {});
    CHECK(rr.exit_code == 0);
    const json& res = rr.report["results"];
    CHECK(res["reducible"] == true);
    int deltas = 0, dirichlet = 0;
    for (const json& s : res["scalar_conditions"]) {
        if (s["kind"] == "delta") {
            ++deltas;
            CHECK(s["strength"].get<double>() == doctest::Approx(0.4).epsilon(1e-10));
        }
        if (s["kind"] == "dirichlet") ++dirichlet;
    }
    CHECK(deltas == 1);
    CHECK(dirichlet == 2);
    CHECK(res["reduction"]["channels"].size() == 3);
}

TEST_CASE("reduce: matrix delta strengths") {
    const json bc = {{"form", "coupling"}, {"type", "matrix_delta"}, {"strength", {{1.5, 1.0}, {1.0, 1.5}}}};
    const RunReport rr = run_command("reduce", system(2, bc), {});
    CHECK(rr.exit_code == 0);
    std::vector<double> strengths;
    for (const json& s : rr.report["results"]["scalar_conditions"]) {
        REQUIRE(s["kind"] == "delta");
        strengths.push_back(s["strength"].get<double>());
    }
    std::sort(strengths.begin(), strengths.end());
    REQUIRE(strengths.size() == 2);
    CHECK(strengths[0] == doctest::Approx(0.5));
    CHECK(strengths[1] == doctest::Approx(2.5));
}

TEST_CASE("reduce: non-normal block names the witness") {
    const double c = std::cos(1.0), s = std::sin(1.0);
    const json u = {{{c, 0}, 0, 0, {0, s}}, {0, 1, 0, 0}, {0, 0, 1, 0}, {{0, s}, 0, 0, {c, 0}}};
    const RunReport rr = run_command("reduce", system(2, {{"form", "u"}, {"U", u}}), {});
    CHECK(rr.exit_code == 4);
    CHECK(rr.report["results"]["reducible"] == false);
    CHECK(rr.report["results"]["witness"].get<std::string>().find("U12") != std::string::npos);
}

TEST_CASE("spectrum: Kirchhoff comb") {
    json cfg = system(2, coupling("kirchhoff"));
    cfg["period"] = kPi;
    CliOptions opt;
    opt.emax = 20.0;
    const RunReport rr = run_command("spectrum", cfg, opt);
    CHECK(rr.exit_code == 0);
    const json& sp = rr.report["results"]["spectrum"];
    REQUIRE(sp["bands"].size() == 1);
    CHECK(std::abs(sp["bands"][0]["lo"].get<double>()) < 1e-9);
    CHECK(sp["bands"][0]["hi"].get<double>() == 20.0);
    REQUIRE(sp["eigenvalues"].size() == 4);
    for (int m = 1; m <= 4; ++m) {
        const json& ev = sp["eigenvalues"][static_cast<std::size_t>(m - 1)];
        CHECK(ev["E"].get<double>() == doctest::Approx(m * m));
        CHECK(ev["multiplicity"] == 1);
        CHECK(ev["embedded"] == true);
    }
    CHECK(sp["gap_count"] == 0);

    CHECK(run_command("spectrum", system(2, coupling("kirchhoff")), opt).exit_code == 2);
}

TEST_CASE("spectrum: non-reducible cell falls back to the Floquet scan") {
    Rng rng(3);
    const Matrix u = cchan::testing::random_unitary(rng, 4);
    json cfg = system(2, {{"form", "u"}, {"U", matrix_to_json(u)}});
    cfg["period"] = 1.0;
    cfg["task"] = {{"emax", 5.0}, {"grid_points", 200}};
    const RunReport rr = run_command("spectrum", cfg, {});
    CHECK(rr.exit_code == 0);
    CHECK(rr.report["results"]["method"] == "floquet_scan");
    CHECK_FALSE(rr.report["warnings"].empty());
}

TEST_CASE("resolvent: bound state and singular zeta") {
    json cfg = system(1, coupling("delta", "alpha", -2.0));
    cfg["task"] = {{"window", {-5.0, 0.0}}};
    const RunReport rr = run_command("resolvent", cfg, {});
    CHECK(rr.exit_code == 0);
    REQUIRE(rr.report["results"]["bound_states"].size() == 1);
    CHECK(rr.report["results"]["bound_states"][0]["E"].get<double>() ==
          doctest::Approx(-1.0).epsilon(1e-10));

    cfg["task"] = {{"zeta", -1.0}};
    const RunReport sing = run_command("resolvent", cfg, {});
    CHECK(sing.exit_code == 5);
    CHECK(sing.report["results"]["nearest_bound_state"].get<double>() ==
          doctest::Approx(-1.0).epsilon(1e-10));

    cfg["task"] = {{"zeta", 2.0}};
    CHECK(run_command("resolvent", cfg, {}).exit_code == 5);
}

TEST_CASE("resolvent: free kernel diagonal") {
    const json free_bc = {{"form", "transfer"}, {"C11", {{1, 0}, {0, 1}}}, {"C12", {{0, 0}, {0, 0}}},
                          {"C21", {{0, 0}, {0, 0}}}, {"C22", {{1, 0}, {0, 1}}}};
    json cfg = system(2, free_bc);
    cfg["task"] = {{"zeta", {-1.0, 0.0}}, {"kernel", {{"lo", -1.0}, {"hi", 1.5}, {"points", 6}}}};
    const RunReport rr = run_command("resolvent", cfg, {});
    CHECK(rr.exit_code == 0);
    const json& diag = rr.report["results"]["kernel_diagonal"];
    CHECK(diag.size() == 5);  // x = 0 is an interaction point
    for (const json& d : diag) {
        const Matrix g = matrix_from_json(d["G"], "G");
        CHECK((g - 0.5 * identity(2)).norm() < 1e-14);
    }
}

TEST_CASE("CSV side files") {
    const auto dir = std::filesystem::temp_directory_path() / "cchan_test_cli_csv";
    std::filesystem::remove_all(dir);
    json cfg = system(1, coupling("delta", "alpha", 1.0));
    cfg["period"] = kPi;
    cfg["task"] = {{"floquet_dump", {{"k_points", 5}, {"theta_points", 4}}}};
    CliOptions opt;
    opt.emax = 30.0;
    opt.out_dir = dir.string();
    const RunReport rr = run_command("spectrum", cfg, opt);
    CHECK(rr.exit_code == 0);
    for (const char* name : {"bands.csv", "gaps.csv", "floquet.csv"}) {
        std::ifstream in(dir / name);
        REQUIRE(in.good());
        std::string header;
        std::getline(in, header);
        CHECK_FALSE(header.empty());
    }
    std::ifstream bands(dir / "bands.csv");
    std::string line;
    std::getline(bands, line);
    std::getline(bands, line);
    // Seventeen significant digits.
    CHECK(line.find("0.25") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("determinism and configuration round trip") {
    Rng rng(10);
    json cfg = {{"n", 2},
                {"points", json::array({{{"q", 0.0}, {"bc", coupling("delta_prime", "beta", 0.7)}},
                                        {{"q", 2.0}, {"bc", {{"form", "u"}, {"U", matrix_to_json(cchan::testing::random_unitary(rng, 4))}}}}})},
                {"task", {{"zeta", {-0.5, 0.5}}}}};
    const RunReport a = run_command("resolvent", cfg, {});
    const RunReport b = run_command("resolvent", cfg, {});
    CHECK(strip_time(a.report).dump() == strip_time(b.report).dump());

    const SystemConfig parsed = parse_config(cfg);
    const SystemConfig again = parse_config(config_to_json(parsed));
    REQUIRE(again.points.size() == parsed.points.size());
    for (std::size_t i = 0; i < parsed.points.size(); ++i) {
        CHECK(again.points[i].q == parsed.points[i].q);
        CHECK(again.points[i].bc.same_as(parsed.points[i].bc));
    }

    const RunReport r1 = run_command("reduce", system(3, coupling("delta", "alpha", 1.0)), {});
    const RunReport r2 = run_command("reduce", system(3, coupling("delta", "alpha", 1.0)), {});
    CHECK(strip_time(r1.report).dump() == strip_time(r2.report).dump());
}

TEST_CASE("matrix serialization round trip") {
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix m = cchan::testing::random_complex(rng, 3, 3);
        const Matrix back = matrix_from_json(json::parse(matrix_to_json(m).dump()), "m");
        CHECK((back - m).norm() <= 1e-15 * m.norm());
    }
    for (const json& bad : {json::parse("[[1, 2], [3]]"), json::parse("[[1, \"x\"]]"), json::parse("[]")}) {
        try {
            (void)matrix_from_json(bad, "bc.U");
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ParseError);
            CHECK(std::string(e.what()).find("bc.U") != std::string::npos);
        }
    }
}

TEST_CASE("load_json_file reports the syntax error position") {
    const auto path = std::filesystem::temp_directory_path() / "cchan_test_bad.json";
    std::ofstream(path) << "{\n  \"n\": 1,\n  \"points\": [\n}\n";
    try {
        (void)load_json_file(path.string());
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    std::filesystem::remove(path);
    CHECK_THROWS_AS((void)load_json_file("/nonexistent/cchan.json"), Error);
}
