// SPDX-License-Identifier: Apache-2.0
#include "l2h/schedule.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <queue>

#include "l2h/vars.hpp"

namespace l2h {

std::optional<Expr> project_component(const Expr& rhs, std::size_t component) {
    if (rhs.is<TupleExpr>()) {
        const auto& n = rhs.as<TupleExpr>();
        if (component >= n.elems.size()) return std::nullopt;
        Expr out = n.elems[component].clone();
        return out;
    }
    if (rhs.is<IteExpr>()) {
        const auto& n = rhs.as<IteExpr>();
        auto t = project_component(*n.then_branch, component);
        auto e = project_component(*n.else_branch, component);
        if (!t || !e) return std::nullopt;
        Expr out(IteExpr{box(n.cond->clone()), box(std::move(*t)), box(std::move(*e))}, rhs.loc);
        out.type = rhs.type.element(component);
        out.clock = rhs.clock;
        return out;
    }
    if (rhs.is<MergeExpr>()) {
        const auto& n = rhs.as<MergeExpr>();
        MergeExpr m{n.clock_var, {}};
        for (const auto& [ctor, branch] : n.branches) {
            auto b = project_component(branch, component);
            if (!b) return std::nullopt;
            m.branches.emplace_back(ctor, std::move(*b));
        }
        Expr out(std::move(m), rhs.loc);
        out.type = rhs.type.element(component);
        out.clock = rhs.clock;
        return out;
    }
    if (rhs.is<WhenExpr>()) {
        const auto& n = rhs.as<WhenExpr>();
        auto op = project_component(*n.operand, component);
        if (!op) return std::nullopt;
        Expr out(WhenExpr{box(std::move(*op)), n.ctor, n.clock_var}, rhs.loc);
        out.type = rhs.type.element(component);
        out.clock = rhs.clock;
        return out;
    }
    return std::nullopt;
}

namespace {

std::vector<SchedUnit> build_units(const NodeDecl& node) {
    std::vector<SchedUnit> units;
    for (std::size_t i = 0; i < node.equations.size(); ++i) {
        const Equation& eq = node.equations[i];
        bool split = false;
        if (eq.targets.size() > 1) {
            split = project_component(eq.rhs, 0).has_value();
        }
        // The equation's clock drivers are read to decide activity even when
        // the right-hand side does not mention them (constant branches).
        std::set<std::string> clock_reads;
        for (const auto& sample : eq.rhs.clock.samples) clock_reads.insert(sample.clock_var);
        if (!split) {
            SchedUnit unit;
            unit.eq_index = i;
            unit.targets = eq.targets;
            unit.reads = free_vars(eq.rhs, ReadMode::Instantaneous);
            unit.reads.insert(clock_reads.begin(), clock_reads.end());
            units.push_back(std::move(unit));
            continue;
        }
        for (std::size_t c = 0; c < eq.targets.size(); ++c) {
            SchedUnit unit;
            unit.eq_index = i;
            unit.component = static_cast<int>(c);
            unit.targets = {eq.targets[c]};
            auto projected = project_component(eq.rhs, c);
            assert(projected);
            unit.reads = free_vars(*projected, ReadMode::Instantaneous);
            unit.reads.insert(clock_reads.begin(), clock_reads.end());
            units.push_back(std::move(unit));
        }
    }
    return units;
}

// Tarjan SCC over the unit dependency graph, used only to report cycles.
struct SccFinder {
    const std::vector<std::vector<std::size_t>>& succ;
    std::vector<int> index, low;
    std::vector<bool> on_stack;
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> sccs;
    int counter = 0;

    explicit SccFinder(const std::vector<std::vector<std::size_t>>& s)
        : succ(s), index(s.size(), -1), low(s.size(), 0), on_stack(s.size(), false) {}

    void strongconnect(std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (std::size_t w : succ[v]) {
            if (index[w] < 0) {
                strongconnect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> scc;
            while (true) {
                std::size_t w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                scc.push_back(w);
                if (w == v) break;
            }
            sccs.push_back(std::move(scc));
        }
    }

    void run() {
        for (std::size_t v = 0; v < succ.size(); ++v) {
            if (index[v] < 0) strongconnect(v);
        }
    }
};

}  // namespace

std::optional<Schedule> schedule_node(const NodeDecl& node, Diagnostics& diags) {
    assert(node.automata.empty() && "schedule_node requires an automaton-free node");
    std::vector<SchedUnit> units = build_units(node);

    std::map<std::string, std::size_t> definer;
    for (std::size_t u = 0; u < units.size(); ++u) {
        for (const auto& t : units[u].targets) definer[t] = u;
    }

    std::vector<std::vector<std::size_t>> succ(units.size());
    std::vector<std::size_t> pending(units.size(), 0);
    for (std::size_t u = 0; u < units.size(); ++u) {
        std::set<std::size_t> preds;
        for (const auto& read : units[u].reads) {
            auto it = definer.find(read);
            if (it != definer.end()) preds.insert(it->second);
        }
        for (std::size_t p : preds) {
            succ[p].push_back(u);
            ++pending[u];
        }
    }

    // Kahn's algorithm; ties broken by source order for determinism.
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t u = 0; u < units.size(); ++u) {
        if (pending[u] == 0) ready.push(u);
    }
    Schedule schedule;
    std::vector<bool> done(units.size(), false);
    while (!ready.empty()) {
        const std::size_t u = ready.top();
        ready.pop();
        done[u] = true;
        schedule.order.push_back(units[u]);
        for (std::size_t w : succ[u]) {
            if (--pending[w] == 0) ready.push(w);
        }
    }
    if (schedule.order.size() == units.size()) return schedule;

    // Report the first dependency cycle in source order.
    SccFinder finder(succ);
    finder.run();
    std::vector<std::size_t> cycle;
    for (const auto& scc : finder.sccs) {
        bool cyclic = scc.size() > 1;
        if (scc.size() == 1) {
            const std::size_t v = scc.front();
            cyclic = std::find(succ[v].begin(), succ[v].end(), v) != succ[v].end();
        }
        if (!cyclic) continue;
        if (cycle.empty() || *std::min_element(scc.begin(), scc.end()) <
                                 *std::min_element(cycle.begin(), cycle.end())) {
            cycle = scc;
        }
    }
    assert(!cycle.empty());
    std::set<std::string> cycle_vars;
    SourceLoc loc = node.loc;
    std::size_t first = units.size();
    for (std::size_t u : cycle) {
        for (const auto& t : units[u].targets) cycle_vars.insert(t);
        if (u < first) {
            first = u;
            loc = node.equations[units[u].eq_index].loc;
        }
    }
    std::string names;
    for (const auto& v : cycle_vars) {
        if (!names.empty()) names += ", ";
        names += v;
    }
    diags.error(DiagCode::Causality, loc,
                "causality cycle in node '" + node.name + "' between variables: " + names);
    return std::nullopt;
}

}  // namespace l2h
