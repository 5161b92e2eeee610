// SPDX-License-Identifier: Apache-2.0
#include "l2h/normalize.hpp"

#include <cassert>
#include <functional>
#include <map>

#include "l2h/schedule.hpp"
#include "l2h/vars.hpp"

namespace l2h {

namespace {

TypeExprRef type_to_ref(const Type& t) {
    switch (t.kind) {
        case Type::Kind::Bool: return {TypeExprRef::Kind::Bool, ""};
        case Type::Kind::Int: return {TypeExprRef::Kind::Int, ""};
        case Type::Kind::Real: return {TypeExprRef::Kind::Real, ""};
        case Type::Kind::Enum: return {TypeExprRef::Kind::Named, t.enum_name};
        default: break;
    }
    assert(false && "fresh variables must be scalar");
    return {TypeExprRef::Kind::Bool, ""};
}

class Normalizer {
public:
    explicit Normalizer(const NodeDecl& node) : source_(node) {}

    NodeDecl run() {
        NodeDecl out;
        out.name = source_.name;
        out.is_function = source_.is_function;
        out.inputs = source_.inputs;
        out.outputs = source_.outputs;
        out.locals = source_.locals;
        out.loc = source_.loc;
        out_ = &out;
        std::set<std::string> output_names;
        for (const auto& o : source_.outputs) output_names.insert(o.name);

        for (const auto& eq : source_.equations) {
            // `x = pre y` is already a memory definition unless x is an
            // output; outputs stay out of the state tuple, so the memory
            // moves to a fresh local and x copies it.
            if (eq.targets.size() == 1 && eq.rhs.is<UnaryExpr>() &&
                eq.rhs.as<UnaryExpr>().op == UnaryOp::Pre &&
                eq.rhs.as<UnaryExpr>().operand->is<VarExpr>() &&
                !output_names.count(eq.targets[0])) {
                const std::string& src = eq.rhs.as<UnaryExpr>().operand->as<VarExpr>().name;
                Expr rhs(UnaryExpr{UnaryOp::Pre, box(make_var(src, eq.loc))}, eq.loc);
                rhs.type = eq.rhs.type;
                rhs.clock = eq.rhs.clock;
                emit({eq.targets, std::move(rhs), eq.loc});
                if (!mem_for_.count(src)) mem_for_[src] = eq.targets[0];
                continue;
            }
            if (eq.rhs.is<CallExpr>() || eq.rhs.is<ArrowExpr>()) {
                emit_call_equation(eq.targets, eq.rhs, eq.loc);
                continue;
            }
            Expr rhs = normalize_expr(eq.rhs);
            if (eq.targets.size() == 1) {
                emit({eq.targets, std::move(rhs), eq.loc});
                continue;
            }
            for (std::size_t c = 0; c < eq.targets.size(); ++c) {
                auto component = project_component(rhs, c);
                assert(component && "normalized tuple expression must project");
                emit({{eq.targets[c]}, std::move(*component), eq.loc});
            }
        }
        out.equations = std::move(equations_);
        return out;
    }

private:
    const NodeDecl& source_;
    NodeDecl* out_ = nullptr;
    std::vector<Equation> equations_;
    std::map<std::string, int> kind_counters_;
    std::map<std::string, int> callee_counters_;
    std::map<std::string, std::string> mem_for_;  // source var -> memory var

    void emit(Equation eq) { equations_.push_back(std::move(eq)); }

    std::string fresh_name(const std::string& kind) {
        const int n = ++kind_counters_[kind];
        return std::string(kReservedPrefix) + source_.name + "_" + kind + "_" + std::to_string(n);
    }

    std::string fresh_var(const std::string& kind, const Type& type, const Clock& clock,
                          SourceLoc loc) {
        std::string name = fresh_name(kind);
        VarDecl decl{name, type_to_ref(type), false, loc};
        out_->locals.push_back(decl);
        (void)clock;
        return name;
    }

    std::string next_uid(const std::string& callee) {
        return callee + "_" + std::to_string(++callee_counters_[callee]);
    }

    Expr var_ref(const std::string& name, const Type& type, const Clock& clock, SourceLoc loc) {
        Expr e = make_var(name, loc);
        e.type = type;
        e.clock = clock;
        return e;
    }

    /// Emits `name = expr` for a fresh local and returns a reference to it.
    Expr materialize(Expr expr, const std::string& kind) {
        const Type type = expr.type;
        const Clock clock = expr.clock;
        const SourceLoc loc = expr.loc;
        assert(type.is_scalar());
        std::string name = fresh_var(kind, type, clock, loc);
        emit({{name}, std::move(expr), loc});
        return var_ref(name, type, clock, loc);
    }

    /// Component expressions of a normalized tuple-typed expression.
    std::vector<Expr> components(Expr expr) {
        const std::size_t arity = expr.type.arity();
        if (arity == 1) {
            std::vector<Expr> out;
            out.push_back(std::move(expr));
            return out;
        }
        std::vector<Expr> out;
        for (std::size_t c = 0; c < arity; ++c) {
            auto projected = project_component(expr, c);
            assert(projected && "normalized tuple expression must project");
            out.push_back(std::move(*projected));
        }
        return out;
    }

    /// Memory definition for `pre <component>`; the operand is materialized
    /// to a variable first. Repeated `pre x` over the same variable reuses
    /// one memory.
    Expr make_memory(Expr operand) {
        if (!operand.is<VarExpr>()) operand = materialize(std::move(operand), "mem_src");
        const std::string src = operand.as<VarExpr>().name;
        const Type type = operand.type;
        const Clock clock = operand.clock;
        const SourceLoc loc = operand.loc;
        auto it = mem_for_.find(src);
        if (it != mem_for_.end()) return var_ref(it->second, type, clock, loc);
        std::string name = fresh_var("mem", type, clock, loc);
        Expr rhs(UnaryExpr{UnaryOp::Pre, box(std::move(operand))}, loc);
        rhs.type = type;
        rhs.clock = clock;
        emit({{name}, std::move(rhs), loc});
        mem_for_[src] = name;
        return var_ref(name, type, clock, loc);
    }

    /// Emits a call equation (node call or arrow instance) onto `targets`.
    void emit_call_equation(const std::vector<std::string>& targets, const Expr& rhs,
                            SourceLoc loc) {
        if (rhs.is<ArrowExpr>()) {
            const auto& n = rhs.as<ArrowExpr>();
            CallExpr call;
            call.callee = kArrowNode;
            call.uid = next_uid(kArrowNode);
            for (auto& part : components(normalize_expr(*n.init))) {
                call.args.push_back(std::move(part));
            }
            for (auto& part : components(normalize_expr(*n.rest))) {
                call.args.push_back(std::move(part));
            }
            Expr e(std::move(call), loc);
            e.type = rhs.type;
            e.clock = rhs.clock;
            emit({targets, std::move(e), loc});
            return;
        }
        const auto& n = rhs.as<CallExpr>();
        CallExpr call;
        call.callee = n.callee;
        call.uid = n.uid.empty() ? next_uid(n.callee) : n.uid;
        for (const auto& arg : n.args) call.args.push_back(normalize_expr(arg));
        if (n.every) {
            Expr cond = normalize_expr(*n.every);
            if (!cond.is<VarExpr>()) cond = materialize(std::move(cond), "cond");
            call.every = box(std::move(cond));
        }
        Expr e(std::move(call), loc);
        e.type = rhs.type;
        e.clock = rhs.clock;
        emit({targets, std::move(e), loc});
    }

    /// Fresh targets for a call or arrow that occurs inside a larger
    /// expression; returns the reference (a variable or tuple of variables).
    Expr extract_call(const Expr& rhs, const std::string& kind) {
        const std::size_t arity = rhs.type.arity();
        std::vector<std::string> targets;
        std::vector<Expr> refs;
        for (std::size_t c = 0; c < arity; ++c) {
            const Type t = rhs.type.element(c);
            std::string name = fresh_var(kind, t, rhs.clock, rhs.loc);
            refs.push_back(var_ref(name, t, rhs.clock, rhs.loc));
            targets.push_back(std::move(name));
        }
        emit_call_equation(targets, rhs, rhs.loc);
        if (arity == 1) return std::move(refs.front());
        Expr tuple = make_tuple(std::move(refs), rhs.loc);
        tuple.type = rhs.type;
        tuple.clock = rhs.clock;
        return tuple;
    }

    /// Rewrites an expression so it contains no pre, no arrow and no call;
    /// the extracted constructs become fresh equations.
    Expr normalize_expr(const Expr& e) {
        Expr out = std::visit(
            [&](const auto& n) -> Expr {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, BoolLitExpr> || std::is_same_v<T, IntLitExpr> ||
                              std::is_same_v<T, RealLitExpr> || std::is_same_v<T, VarExpr> ||
                              std::is_same_v<T, EnumLitExpr>) {
                    return e.clone();
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    if (n.op == UnaryOp::Pre) {
                        Expr operand = normalize_expr(*n.operand);
                        if (operand.type.arity() == 1) return make_memory(std::move(operand));
                        std::vector<Expr> mems;
                        Type type = operand.type;
                        Clock clock = operand.clock;
                        for (auto& part : components(std::move(operand))) {
                            mems.push_back(make_memory(std::move(part)));
                        }
                        Expr tuple = make_tuple(std::move(mems), e.loc);
                        tuple.type = type;
                        tuple.clock = clock;
                        return tuple;
                    }
                    Expr result(UnaryExpr{n.op, box(normalize_expr(*n.operand))}, e.loc);
                    return result;
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    return Expr(BinaryExpr{n.op, box(normalize_expr(*n.lhs)),
                                           box(normalize_expr(*n.rhs))},
                                e.loc);
                } else if constexpr (std::is_same_v<T, IteExpr>) {
                    return Expr(IteExpr{box(normalize_expr(*n.cond)),
                                        box(normalize_expr(*n.then_branch)),
                                        box(normalize_expr(*n.else_branch))},
                                e.loc);
                } else if constexpr (std::is_same_v<T, ArrowExpr>) {
                    return extract_call(e, "arrow");
                } else if constexpr (std::is_same_v<T, CallExpr>) {
                    return extract_call(e, "call");
                } else if constexpr (std::is_same_v<T, WhenExpr>) {
                    return Expr(WhenExpr{box(normalize_expr(*n.operand)), n.ctor, n.clock_var},
                                e.loc);
                } else if constexpr (std::is_same_v<T, MergeExpr>) {
                    MergeExpr m{n.clock_var, {}};
                    for (const auto& [ctor, branch] : n.branches) {
                        m.branches.emplace_back(ctor, normalize_expr(branch));
                    }
                    return Expr(std::move(m), e.loc);
                } else {
                    static_assert(std::is_same_v<T, TupleExpr>);
                    TupleExpr t;
                    for (const auto& el : n.elems) t.elems.push_back(normalize_expr(el));
                    return Expr(std::move(t), e.loc);
                }
            },
            e.node);
        out.type = e.type;
        out.clock = e.clock;
        out.loc = e.loc;
        return out;
    }
};

bool expr_is_simple(const Expr& e) {
    bool simple = true;
    std::function<void(const Expr&)> walk = [&](const Expr& x) {
        if (!simple) return;
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, UnaryExpr>) {
                    if (n.op == UnaryOp::Pre) {
                        simple = false;
                        return;
                    }
                    walk(*n.operand);
                } else if constexpr (std::is_same_v<T, ArrowExpr> || std::is_same_v<T, CallExpr>) {
                    simple = false;
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    walk(*n.lhs);
                    walk(*n.rhs);
                } else if constexpr (std::is_same_v<T, IteExpr>) {
                    walk(*n.cond);
                    walk(*n.then_branch);
                    walk(*n.else_branch);
                } else if constexpr (std::is_same_v<T, WhenExpr>) {
                    walk(*n.operand);
                } else if constexpr (std::is_same_v<T, MergeExpr>) {
                    for (const auto& [c, b] : n.branches) walk(b);
                } else if constexpr (std::is_same_v<T, TupleExpr>) {
                    for (const auto& el : n.elems) walk(el);
                }
            },
            x.node);
    };
    walk(e);
    return simple;
}

}  // namespace

NormEqKind classify_equation(const Equation& eq) {
    if (eq.targets.size() == 1 && eq.rhs.is<UnaryExpr>() &&
        eq.rhs.as<UnaryExpr>().op == UnaryOp::Pre &&
        eq.rhs.as<UnaryExpr>().operand->is<VarExpr>()) {
        return NormEqKind::Memory;
    }
    if (eq.rhs.is<CallExpr>()) return NormEqKind::Call;
    return NormEqKind::Simple;
}

NodeDecl normalize_node(const NodeDecl& node, Diagnostics& diags) {
    assert(node.automata.empty() && "normalize_node requires an automaton-free node");
    (void)diags;
    return Normalizer(node).run();
}

Program normalize_program(const Program& program, Diagnostics& diags) {
    Program out;
    out.type_decls = program.type_decls;
    for (const auto& node : program.nodes) out.nodes.push_back(normalize_node(node, diags));
    return out;
}

bool verify_normal_form(const NodeDecl& node, std::string* why) {
    auto fail = [&](const std::string& message) {
        if (why) *why = "node '" + node.name + "': " + message;
        return false;
    };
    for (const auto& eq : node.equations) {
        switch (classify_equation(eq)) {
            case NormEqKind::Memory:
                break;
            case NormEqKind::Call: {
                const auto& call = eq.rhs.as<CallExpr>();
                if (call.uid.empty()) return fail("call to '" + call.callee + "' has no uid");
                for (const auto& arg : call.args) {
                    if (!expr_is_simple(arg)) {
                        return fail("call argument of '" + call.callee + "' is not simple");
                    }
                }
                if (call.every && !call.every->is<VarExpr>()) {
                    return fail("every condition of '" + call.callee + "' is not a variable");
                }
                break;
            }
            case NormEqKind::Simple:
                if (eq.targets.size() != 1) return fail("tuple equation is not a call");
                if (!expr_is_simple(eq.rhs)) {
                    return fail("equation for '" + eq.targets[0] + "' contains pre, -> or a call");
                }
                break;
        }
    }
    // Call instance ids are unique within the node.
    std::set<std::string> uids;
    for (const auto& eq : node.equations) {
        if (classify_equation(eq) != NormEqKind::Call) continue;
        if (!uids.insert(eq.rhs.as<CallExpr>().uid).second) {
            return fail("duplicate call uid " + eq.rhs.as<CallExpr>().uid);
        }
    }
    return true;
}

void lint_uninitialized_memories(const NodeDecl& node, Diagnostics& diags) {
    // A memory read is harmless when its first-instant value cannot be
    // observed: the read sits under the second operand of an arrow, or it
    // only feeds variables that are themselves observed behind an arrow.
    // Greatest fixpoint over that one rule; outputs and memory sources are
    // always observable.
    std::set<std::string> memories;
    for (const auto& eq : node.equations) {
        if (classify_equation(eq) == NormEqKind::Memory) memories.insert(eq.targets[0]);
    }
    if (memories.empty()) return;

    std::set<std::string> observed;  // variables whose instant-0 value escapes
    for (const auto& v : node.outputs) observed.insert(v.name);

    // read sites: variable -> set of target groups it feeds outside an
    // arrow's second operand.
    std::map<std::string, std::vector<const Equation*>> plain_uses;
    auto note_uses = [&](const Expr& e, const Equation& eq) {
        for (const auto& v : free_vars(e)) plain_uses[v].push_back(&eq);
    };
    for (const auto& eq : node.equations) {
        switch (classify_equation(eq)) {
            case NormEqKind::Memory:
                // The next-value read happens after the instant; never an
                // instant-0 observation.
                break;
            case NormEqKind::Call: {
                const auto& call = eq.rhs.as<CallExpr>();
                const bool is_arrow = call.callee == kArrowNode;
                const std::size_t half = call.args.size() / 2;
                for (std::size_t i = 0; i < call.args.size(); ++i) {
                    if (is_arrow && i >= half) continue;  // guarded position
                    note_uses(call.args[i], eq);
                }
                if (call.every) note_uses(*call.every, eq);
                break;
            }
            case NormEqKind::Simple:
                note_uses(eq.rhs, eq);
                break;
        }
    }

    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [var, uses] : plain_uses) {
            if (observed.count(var)) continue;
            for (const Equation* eq : uses) {
                bool escapes = false;
                for (const auto& target : eq->targets) {
                    escapes = escapes || observed.count(target);
                }
                if (escapes) {
                    observed.insert(var);
                    changed = true;
                    break;
                }
            }
        }
    }
    for (const auto& m : memories) {
        if (observed.count(m)) {
            diags.warning(DiagCode::Type, node.loc,
                          "memory '" + m + "' in node '" + node.name +
                              "' may be read before initialization");
        }
    }
}

}  // namespace l2h
