// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>

#include "l2h/ast.hpp"

namespace l2h {

/// Which variable reads to collect.
enum class ReadMode {
    All,            // every read, including under `pre`
    Instantaneous,  // only reads whose value is needed this instant
};

/// Free variables of an expression. Clock variables of `when`/`merge` count
/// as instantaneous reads; operands of `pre` do not.
void collect_free_vars(const Expr& expr, ReadMode mode, std::set<std::string>& out);
std::set<std::string> free_vars(const Expr& expr, ReadMode mode = ReadMode::All);

/// Variables an automaton defines: the union of its states' equation targets
/// (and nested automata writes), state locals excluded.
std::set<std::string> automaton_writes(const AutomatonDecl& aut);

}  // namespace l2h
