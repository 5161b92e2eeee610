// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "l2h/ast.hpp"

namespace l2h {

/// Renders an AST back to concrete syntax. Output re-parses to a
/// structurally equal AST (round-trip property).
std::string pretty_print(const Program& program);
std::string pretty_print(const NodeDecl& node);
std::string print_expr(const Expr& expr);

}  // namespace l2h
