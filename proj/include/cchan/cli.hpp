// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

// Command implementations behind the `cchan` executable. Each command takes
// a parsed JSON configuration and returns a report plus a process exit code.
//
// Configuration:
//   {"n": 2,
//    "points": [{"q": 0.0, "bc": {...}}, ...],
//    "period": 3.14159,            (spectrum)
//    "task": {...}}                (command specific, see README)

#pragma once

#include "cchan/reduction.hpp"
#include "cchan/serialize.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cchan {

inline constexpr const char* kSchemaVersion = "1";

enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 2,
    kExitInvalidBc = 3,
    kExitNotReducible = 4,
    kExitNumeric = 5,
};

[[nodiscard]] int exit_code_for(ErrorKind kind) noexcept;

struct CliOptions {
    double tol_scale = 1.0;
    std::optional<double> emax;
    /// Directory for CSV side files; empty disables them.
    std::string out_dir;
    std::uint64_t seed = 20240601;
};

struct SystemConfig {
    int n = 1;
    std::vector<InteractionPoint> points;
    std::optional<double> period;
    json task = json::object();
};

/// Throws ParseError for structural problems and the validators' errors for
/// invalid conditions.
[[nodiscard]] SystemConfig parse_config(const json& config, const Tolerances& tol = {});

/// Reads and parses a JSON file; syntax errors become ParseError with the
/// parser's line and column.
[[nodiscard]] json load_json_file(const std::string& path);

/// Inputs echo: reparses to an equal system.
[[nodiscard]] json config_to_json(const SystemConfig& config);

struct RunReport {
    int exit_code = kExitOk;
    json report;
};

[[nodiscard]] RunReport cmd_validate(const json& config, const CliOptions& opt);
[[nodiscard]] RunReport cmd_convert(const json& config, const CliOptions& opt);
[[nodiscard]] RunReport cmd_reduce(const json& config, const CliOptions& opt);
[[nodiscard]] RunReport cmd_spectrum(const json& config, const CliOptions& opt);
[[nodiscard]] RunReport cmd_resolvent(const json& config, const CliOptions& opt);

/// Dispatches by name and converts escaping errors into an error report.
[[nodiscard]] RunReport run_command(const std::string& name, const json& config,
                                    const CliOptions& opt);

}  // namespace cchan
