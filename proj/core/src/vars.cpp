// SPDX-License-Identifier: Apache-2.0
#include "l2h/vars.hpp"

namespace l2h {

void collect_free_vars(const Expr& expr, ReadMode mode, std::set<std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, VarExpr>) {
                out.insert(n.name);
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                if (n.op == UnaryOp::Pre && mode == ReadMode::Instantaneous) return;
                collect_free_vars(*n.operand, mode, out);
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                collect_free_vars(*n.lhs, mode, out);
                collect_free_vars(*n.rhs, mode, out);
            } else if constexpr (std::is_same_v<T, IteExpr>) {
                collect_free_vars(*n.cond, mode, out);
                collect_free_vars(*n.then_branch, mode, out);
                collect_free_vars(*n.else_branch, mode, out);
            } else if constexpr (std::is_same_v<T, ArrowExpr>) {
                collect_free_vars(*n.init, mode, out);
                collect_free_vars(*n.rest, mode, out);
            } else if constexpr (std::is_same_v<T, CallExpr>) {
                for (const auto& a : n.args) collect_free_vars(a, mode, out);
                if (n.every) collect_free_vars(*n.every, mode, out);
            } else if constexpr (std::is_same_v<T, WhenExpr>) {
                collect_free_vars(*n.operand, mode, out);
                out.insert(n.clock_var);
            } else if constexpr (std::is_same_v<T, MergeExpr>) {
                out.insert(n.clock_var);
                for (const auto& [ctor, branch] : n.branches) {
                    collect_free_vars(branch, mode, out);
                }
            } else if constexpr (std::is_same_v<T, TupleExpr>) {
                for (const auto& e : n.elems) collect_free_vars(e, mode, out);
            }
        },
        expr.node);
}

std::set<std::string> free_vars(const Expr& expr, ReadMode mode) {
    std::set<std::string> out;
    collect_free_vars(expr, mode, out);
    return out;
}

std::set<std::string> automaton_writes(const AutomatonDecl& aut) {
    std::set<std::string> out;
    for (const auto& state : aut.states) {
        std::set<std::string> local_names;
        for (const auto& v : state.locals) local_names.insert(v.name);
        auto add = [&](const std::string& name) {
            if (!local_names.count(name)) out.insert(name);
        };
        for (const auto& eq : state.equations) {
            for (const auto& t : eq.targets) add(t);
        }
        for (const auto& nested : state.automata) {
            for (const auto& w : automaton_writes(nested)) add(w);
        }
    }
    return out;
}

}  // namespace l2h
