// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "l2h/ast.hpp"
#include "l2h/check.hpp"

namespace l2h {

/// Read/write variable sets of one automaton state, relative to the host
/// scope. A variable both read and written by the state equations appears
/// in both read_eqs and write_eqs; state locals appear in none.
struct StateVarSets {
    std::set<std::string> read_eqs;
    std::set<std::string> write_eqs;
    std::set<std::string> read_unless;
    std::set<std::string> read_until;
};

StateVarSets collect_var_sets(const StateDecl& state, const NodeDecl& host);

/// The dedicated rejection of `unless` guards that read variables the
/// automaton itself defines (directly or through `pre`). Such guards would
/// make the putative state observable; after expansion they would surface
/// as a causality cycle, this check reports them up front with a precise
/// diagnostic. Returns false and reports if any guard is rejected.
bool check_unless_memories(const AutomatonDecl& aut, const NodeDecl& host, Diagnostics& diags);

/// Everything generated for one automaton.
struct GeneratedAutomaton {
    EnumDecl clock_type;                    // one constructor per state
    std::vector<std::string> state_ctors;   // constructor per state, decl order
    std::vector<NodeDecl> unless_nodes;     // one per state
    std::vector<NodeDecl> handler_nodes;    // one per state
    std::vector<std::string> write_union;   // merged write tuple, decl order
};

struct ExpandResult {
    Program program;
    std::vector<std::string> generated_nodes;  // unless and handler nodes, in emission order
};

/// Compiles away every automaton: per state one strong-transition node and
/// one handler node, an enum clock type per automaton, and the host rewired
/// to drive them through two merges (putative and actual state). Innermost
/// automata are expanded first. Returns the automaton-free program; the
/// result still has to be re-checked (types and clocks) by the caller.
std::optional<ExpandResult> expand_all(const Program& program, const CheckInfo& info,
                                       Diagnostics& diags);

}  // namespace l2h
