// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "l2h/ast.hpp"
#include "l2h/check.hpp"

namespace l2h {

/// Equation forms after normalization.
enum class NormEqKind {
    Memory,  // x = pre y, y a variable
    Call,    // targets = f(args) [every cond-var], args free of pre/->/calls
    Simple,  // x = e, e free of pre/->/calls
};

NormEqKind classify_equation(const Equation& eq);

/// Rewrites an automaton-free node into normalized equations: memories are
/// explicit `x = pre y` definitions, every `->` becomes an instance of the
/// builtin arrow node, node calls sit alone on their equation with a unique
/// instance id, and `every` conditions are plain boolean variables. Fresh
/// names use the reserved "__<node>_<kind>_<n>" scheme.
NodeDecl normalize_node(const NodeDecl& node, Diagnostics& diags);

/// normalize_node over every node of the program.
Program normalize_program(const Program& program, Diagnostics& diags);

/// Post-pass lint: checks the three normal-form invariants on every
/// equation. A violation is a compiler bug, not a user error.
bool verify_normal_form(const NodeDecl& node, std::string* why = nullptr);

/// Warns when a memory may be read before any arrow guards its first value.
void lint_uninitialized_memories(const NodeDecl& node, Diagnostics& diags);

}  // namespace l2h
