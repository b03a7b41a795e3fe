// Copyright 2026 The cchan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cchan {

enum class ErrorKind {
    ShapeMismatch,
    NotSelfAdjoint,
    RankDeficient,
    NotUnitary,
    NotConnecting,
    DegenerateSubspace,
    InvalidSystem,
    NotSimultaneouslyDiagonalizable,
    NotReducible,
    OnEssentialSpectrum,
    NotRegular,
    WindowTooCoarse,
    ParseError,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-readable kind. `index` identifies the
/// violated relation (validators) or the offending item, -1 when unused.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, int index = -1)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what),
          kind_(kind),
          index_(index) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] int index() const noexcept { return index_; }

private:
    ErrorKind kind_;
    int index_;
};

}  // namespace cchan
