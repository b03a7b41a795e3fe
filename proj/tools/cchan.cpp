// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

// cchan: validate, convert, reduce and analyse matrix point interactions.
//
//   cchan [--tol-scale s] [--emax E] [--out-dir dir] [--seed n] <command> config.json
//
// The JSON report goes to stdout (and to <out-dir>/report.json when an output
// directory is given). Exit codes: 0 ok, 2 parse error, 3 invalid boundary
// condition, 4 not reducible, 5 numeric failure.

#include "cchan/cli.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Matrix point interactions on coupled channels"};
    app.require_subcommand(1);

    cchan::CliOptions opt;
    double emax = 0.0;
    app.add_option("--tol-scale", opt.tol_scale, "Scale factor for all validation tolerances")
        ->check(CLI::PositiveNumber);
    auto* emax_opt = app.add_option("--emax", emax, "Upper energy for spectra");
    app.add_option("--out-dir", opt.out_dir, "Directory for CSV side files and report.json");
    app.add_option("--seed", opt.seed, "Seed for randomized diagonalization");

    std::string config_path;
    const char* commands[][2] = {
        {"validate", "Check every boundary condition and classify it"},
        {"convert", "Print every condition in all four forms"},
        {"reduce", "Decouple the system into scalar channels"},
        {"spectrum", "Band spectrum of the periodic system"},
        {"resolvent", "Green kernel and bound states"},
    };
    for (const auto& c : commands) {
        app.add_subcommand(c[0], c[1])->add_option("config", config_path, "JSON configuration")
            ->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cchan::kExitParse;
    }
    if (*emax_opt) opt.emax = emax;

    const std::string command = app.get_subcommands().front()->get_name();
    cchan::RunReport rr;
    try {
        rr = cchan::run_command(command, cchan::load_json_file(config_path), opt);
    } catch (const cchan::Error& e) {
        rr.exit_code = cchan::exit_code_for(e.kind());
        rr.report = {{"schema", cchan::kSchemaVersion},
                     {"task", command},
                     {"results", {{"error", std::string(cchan::to_string(e.kind()))},
                                  {"message", e.what()}}}};
    }

    const std::string text = rr.report.dump(2);
    std::cout << text << "\n";
    if (!opt.out_dir.empty()) {
        std::filesystem::create_directories(opt.out_dir);
        std::ofstream(std::filesystem::path(opt.out_dir) / "report.json") << text << "\n";
    }
    return rr.exit_code;
}
