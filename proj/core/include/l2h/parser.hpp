// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>

#include "l2h/ast.hpp"
#include "l2h/lexer.hpp"

namespace l2h {

/// Parses a token stream into a program AST. Reports syntax errors,
/// duplicate definitions and unknown transition targets as diagnostics
/// with positions; returns std::nullopt if any error was reported.
std::optional<Program> parse_program(const std::vector<Token>& tokens, Diagnostics& diags);

/// tokenize + parse_program in one step.
std::optional<Program> parse_text(std::string_view text, Diagnostics& diags);

}  // namespace l2h
