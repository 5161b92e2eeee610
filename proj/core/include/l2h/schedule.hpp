// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "l2h/ast.hpp"

namespace l2h {

/// A schedulable unit: a whole equation, or one component of a tuple
/// equation whose right-hand side splits componentwise (tuple literals,
/// conditionals, merges). Calls and arrows are atomic.
struct SchedUnit {
    std::size_t eq_index = 0;
    int component = -1;  // -1: whole equation
    std::vector<std::string> targets;
    std::set<std::string> reads;  // instantaneous reads only
};

/// Total evaluation order over the units of one node.
struct Schedule {
    std::vector<SchedUnit> order;
};

/// Splits a tuple equation componentwise where possible. Returns the
/// projected expression for `component`, or nullopt when the right-hand
/// side is atomic (node call, arrow over tuples).
std::optional<Expr> project_component(const Expr& rhs, std::size_t component);

/// Orders the equations of an automaton-free node so that every
/// instantaneous data dependency is respected; reads under `pre` impose
/// no ordering. On a dependency cycle, reports a causality diagnostic
/// listing the variables on the cycle.
std::optional<Schedule> schedule_node(const NodeDecl& node, Diagnostics& diags);

}  // namespace l2h
