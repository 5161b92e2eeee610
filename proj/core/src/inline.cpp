// SPDX-License-Identifier: Apache-2.0
#include "l2h/inline.hpp"

#include <cassert>
#include <functional>
#include <map>

#include "l2h/schedule.hpp"
#include "l2h/vars.hpp"

namespace l2h {

namespace {

class Inliner {
public:
    Inliner(const Program& program, const std::set<std::string>& callees, Diagnostics& diags)
        : program_(program), callees_(callees), diags_(diags) {}

    std::optional<Program> run() {
        Program out;
        out.type_decls = program_.type_decls;
        for (const auto& node : program_.nodes) {
            if (callees_.count(node.name)) continue;  // unfolded at call sites
            NodeDecl rewritten = node.clone();
            std::vector<Equation> eqs;
            for (auto& eq : rewritten.equations) {
                if (!ok_) return std::nullopt;
                Expr rhs = inline_expr(eq.rhs, nullptr);
                eqs.emplace_back(eq.targets, std::move(rhs), eq.loc);
            }
            rewritten.equations = std::move(eqs);
            out.nodes.push_back(std::move(rewritten));
        }
        if (!ok_) return std::nullopt;
        return out;
    }

private:
    const Program& program_;
    const std::set<std::string>& callees_;
    Diagnostics& diags_;
    bool ok_ = true;

    // One expansion context per inlined call site.
    struct Site {
        const NodeDecl* callee;
        std::map<std::string, const Expr*> inputs;  // formal -> argument
        const Expr* reset = nullptr;                // host-side every condition
        std::map<std::string, Expr> defs;           // memoized per variable
        std::vector<std::string> in_flight;         // cycle guard
    };

    void fail(SourceLoc loc, const std::string& message) {
        if (ok_) diags_.error(DiagCode::Internal, loc, message);
        ok_ = false;
    }

    // Clock drivers are names, not expressions, so a sampled flow inside the
    // callee cannot be moved to the call site.
    void check_driver(Site* site, const std::string& clock_var, SourceLoc loc) {
        if (!site) return;
        if (site->callee->find_var(clock_var)) {
            fail(loc, "cannot inline '" + site->callee->name + "': clock variable '" + clock_var +
                          "' is local to the callee");
        }
    }

    /// Defining expression of a callee variable, inputs substituted and
    /// local definitions unfolded.
    Expr define(Site& site, const std::string& name, SourceLoc loc) {
        auto input = site.inputs.find(name);
        if (input != site.inputs.end()) return inline_expr(*input->second, nullptr);
        auto memo = site.defs.find(name);
        if (memo != site.defs.end()) return memo->second.clone();
        for (const auto& active : site.in_flight) {
            if (active == name) {
                fail(loc, "cyclic definition while inlining '" + site.callee->name + "'");
                return make_bool(false, loc);
            }
        }
        site.in_flight.push_back(name);
        Expr result = make_bool(false, loc);
        bool found = false;
        for (const auto& eq : site.callee->equations) {
            for (std::size_t c = 0; c < eq.targets.size(); ++c) {
                if (eq.targets[c] != name) continue;
                found = true;
                if (eq.targets.size() == 1) {
                    result = inline_expr(eq.rhs, &site);
                } else {
                    auto projected = project_component(eq.rhs, c);
                    if (!projected) {
                        fail(eq.loc, "cannot split tuple equation while inlining '" +
                                         site.callee->name + "'");
                    } else {
                        result = inline_expr(*projected, &site);
                    }
                }
            }
        }
        if (!found) fail(loc, "no definition for '" + name + "' while inlining");
        site.in_flight.pop_back();
        site.defs.emplace(name, result.clone());
        return result;
    }

    /// Unfolds a call to an inlinable node into per-output expressions.
    Expr expand_call(const Expr& e, Site* outer) {
        const auto& call = e.as<CallExpr>();
        const NodeDecl* callee = program_.find_node(call.callee);
        assert(callee);
        Site site;
        site.callee = callee;
        for (std::size_t j = 0; j < call.args.size(); ++j) {
            site.inputs[callee->inputs[j].name] = &call.args[j];
        }
        // Rebind arguments through the outer context so nested expansions
        // substitute transitively.
        std::vector<Expr> bound_args;
        bound_args.reserve(call.args.size());
        for (std::size_t j = 0; j < call.args.size(); ++j) {
            bound_args.push_back(inline_expr(call.args[j], outer));
        }
        for (std::size_t j = 0; j < call.args.size(); ++j) {
            site.inputs[callee->inputs[j].name] = &bound_args[j];
        }
        std::optional<Expr> reset;
        if (call.every) {
            reset = inline_expr(*call.every, outer);
            site.reset = &*reset;
        }
        std::vector<Expr> outs;
        for (const auto& o : callee->outputs) outs.push_back(define(site, o.name, e.loc));
        if (outs.size() == 1) return std::move(outs.front());
        Expr tuple = make_tuple(std::move(outs), e.loc);
        return tuple;
    }

    Expr inline_expr(const Expr& e, Site* site) {
        Expr out = std::visit(
            [&](const auto& n) -> Expr {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, VarExpr>) {
                    if (site) return define(*site, n.name, e.loc);
                    return e.clone();
                } else if constexpr (std::is_same_v<T, BoolLitExpr> ||
                                     std::is_same_v<T, IntLitExpr> ||
                                     std::is_same_v<T, RealLitExpr> ||
                                     std::is_same_v<T, EnumLitExpr>) {
                    return e.clone();
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    return Expr(UnaryExpr{n.op, box(inline_expr(*n.operand, site))}, e.loc);
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    return Expr(BinaryExpr{n.op, box(inline_expr(*n.lhs, site)),
                                           box(inline_expr(*n.rhs, site))},
                                e.loc);
                } else if constexpr (std::is_same_v<T, IteExpr>) {
                    return Expr(IteExpr{box(inline_expr(*n.cond, site)),
                                        box(inline_expr(*n.then_branch, site)),
                                        box(inline_expr(*n.else_branch, site))},
                                e.loc);
                } else if constexpr (std::is_same_v<T, ArrowExpr>) {
                    Expr init = inline_expr(*n.init, site);
                    Expr rest = inline_expr(*n.rest, site);
                    if (site && site->reset) {
                        // Reset recovery in plain operators: at the first
                        // instant and whenever the host condition holds, the
                        // arrow yields its left value again.
                        Expr guard(ArrowExpr{box(make_bool(true, e.loc)),
                                             box(site->reset->clone())},
                                   e.loc);
                        return Expr(IteExpr{box(std::move(guard)), box(std::move(init)),
                                            box(std::move(rest))},
                                    e.loc);
                    }
                    return Expr(ArrowExpr{box(std::move(init)), box(std::move(rest))}, e.loc);
                } else if constexpr (std::is_same_v<T, CallExpr>) {
                    if (callees_.count(n.callee)) return expand_call(e, site);
                    CallExpr call;
                    call.callee = n.callee;
                    call.uid = n.uid;
                    for (const auto& a : n.args) call.args.push_back(inline_expr(a, site));
                    std::optional<Expr> every;
                    if (n.every) every = inline_expr(*n.every, site);
                    if (site && site->reset) {
                        // The host reset clears the whole inlined instance,
                        // nested calls included.
                        Expr combined = every
                                            ? Expr(BinaryExpr{BinaryOp::Or,
                                                              box(site->reset->clone()),
                                                              box(std::move(*every))},
                                                   e.loc)
                                            : site->reset->clone();
                        call.every = box(std::move(combined));
                    } else if (every) {
                        call.every = box(std::move(*every));
                    }
                    return Expr(std::move(call), e.loc);
                } else if constexpr (std::is_same_v<T, WhenExpr>) {
                    check_driver(site, n.clock_var, e.loc);
                    return Expr(WhenExpr{box(inline_expr(*n.operand, site)), n.ctor, n.clock_var},
                                e.loc);
                } else if constexpr (std::is_same_v<T, MergeExpr>) {
                    check_driver(site, n.clock_var, e.loc);
                    MergeExpr m{n.clock_var, {}};
                    for (const auto& [ctor, b] : n.branches) {
                        m.branches.emplace_back(ctor, inline_expr(b, site));
                    }
                    return Expr(std::move(m), e.loc);
                } else {
                    static_assert(std::is_same_v<T, TupleExpr>);
                    TupleExpr t;
                    for (const auto& el : n.elems) t.elems.push_back(inline_expr(el, site));
                    return Expr(std::move(t), e.loc);
                }
            },
            e.node);
        out.loc = e.loc;
        return out;
    }
};

}  // namespace

std::optional<Program> inline_calls(const Program& program, const std::set<std::string>& callees,
                                    Diagnostics& diags) {
    return Inliner(program, callees, diags).run();
}

}  // namespace l2h
