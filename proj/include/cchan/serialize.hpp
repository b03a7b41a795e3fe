// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

// JSON encoding of matrices, boundary conditions and reduction results.
// Complex matrices are row-major arrays of rows, each entry a [re, im] pair.

#pragma once

#include "cchan/bc_core.hpp"
#include "cchan/reduction.hpp"

#include "json.hpp"

#include <string>

namespace cchan {

using json = nlohmann::json;

[[nodiscard]] json matrix_to_json(const Matrix& m);
/// Throws ParseError naming `field` on malformed input.
[[nodiscard]] Matrix matrix_from_json(const json& j, const std::string& field);

/// {"form": "ab" | "u" | "lm" | "transfer", "n": ..., matrices...}
[[nodiscard]] json bc_to_json(const BoundaryCondition& bc);

/// Accepts every form written by bc_to_json plus
/// {"form": "coupling", "type": "delta" | "delta_prime_s" | "delta_p" |
///  "delta_prime" | "kirchhoff", "alpha" | "beta": x} and
/// {"form": "coupling", "type": "matrix_delta", "strength": matrix}.
/// `n` is the expected channel count (needed for couplings; checked for the
/// matrix forms). Structural problems throw ParseError; invalid data throws
/// the validator's error.
[[nodiscard]] BoundaryCondition bc_from_json(const json& j, int n, const Tolerances& tol = {});

[[nodiscard]] json reduction_to_json(const ReductionResult& r);

}  // namespace cchan
