// SPDX-License-Identifier: Apache-2.0
#include "l2h/horn.hpp"

#include <cassert>
#include <functional>
#include <set>
#include <sstream>

#include "l2h/normalize.hpp"

namespace l2h {

Sort Sort::of(const Type& t) {
    switch (t.kind) {
        case Type::Kind::Bool: return {Kind::Bool, ""};
        case Type::Kind::Int: return {Kind::Int, ""};
        case Type::Kind::Real: return {Kind::Real, ""};
        case Type::Kind::Enum: return {Kind::Enum, t.enum_name};
        default: break;
    }
    assert(false && "tuple types have no sort");
    return {};
}

std::string Sort::smt() const {
    switch (kind) {
        case Kind::Bool: return "Bool";
        case Kind::Int: return "Int";
        case Kind::Real: return "Real";
        case Kind::Enum: return enum_name;
    }
    return "Bool";
}

Term t_var(std::string name) {
    Term t;
    t.kind = Term::Kind::Var;
    t.symbol = std::move(name);
    return t;
}
Term t_bool(bool value) {
    Term t;
    t.kind = Term::Kind::BoolLit;
    t.bool_value = value;
    return t;
}
Term t_int(std::int64_t value) {
    Term t;
    t.kind = Term::Kind::IntLit;
    t.int_value = value;
    return t;
}
Term t_enum(std::string ctor) {
    Term t;
    t.kind = Term::Kind::EnumLit;
    t.symbol = std::move(ctor);
    return t;
}
Term t_app(std::string op, std::vector<Term> args) {
    Term t;
    t.kind = Term::Kind::App;
    t.symbol = std::move(op);
    t.args = std::move(args);
    return t;
}
Term t_eq(Term a, Term b) {
    std::vector<Term> args;
    args.push_back(std::move(a));
    args.push_back(std::move(b));
    return t_app("=", std::move(args));
}
Term t_not(Term a) {
    std::vector<Term> args;
    args.push_back(std::move(a));
    return t_app("not", std::move(args));
}
Term t_imp(Term a, Term b) {
    std::vector<Term> args;
    args.push_back(std::move(a));
    args.push_back(std::move(b));
    return t_app("=>", std::move(args));
}
Term t_ite(Term c, Term a, Term b) {
    std::vector<Term> args;
    args.push_back(std::move(c));
    args.push_back(std::move(a));
    args.push_back(std::move(b));
    return t_app("ite", std::move(args));
}
Term t_and(std::vector<Term> conjuncts) {
    if (conjuncts.empty()) return t_bool(true);
    if (conjuncts.size() == 1) return std::move(conjuncts.front());
    return t_app("and", std::move(conjuncts));
}
Term t_rel(std::string name, std::vector<Term> args, std::string uid) {
    Term t;
    t.kind = Term::Kind::RelApp;
    t.symbol = std::move(name);
    t.args = std::move(args);
    t.uid = std::move(uid);
    return t;
}

std::string Term::print() const {
    switch (kind) {
        case Kind::Var:
        case Kind::EnumLit:
            return symbol;
        case Kind::BoolLit:
            return bool_value ? "true" : "false";
        case Kind::IntLit:
            return int_value < 0 ? "(- " + std::to_string(-int_value) + ")"
                                 : std::to_string(int_value);
        case Kind::RealLit:
            return real_lexeme;
        case Kind::App:
        case Kind::RelApp: {
            std::ostringstream os;
            os << '(' << symbol;
            for (const auto& a : args) os << ' ' << a.print();
            os << ')';
            return os.str();
        }
    }
    return "";
}

const Relation* HornSystem::find_relation(const std::string& name) const {
    for (const auto& r : relations) {
        if (r.name == name) return &r;
    }
    return nullptr;
}

const NodeEncoding* HornSystem::encoding_of_rel(const std::string& rel) const {
    for (const auto& [node, enc] : nodes) {
        if (enc.step_rel == rel || (!enc.reset_rel.empty() && enc.reset_rel == rel)) return &enc;
    }
    return nullptr;
}

std::string horn_var(const std::string& node, const std::string& name) {
    return node + "." + name;
}

namespace {

constexpr const char* kArrowResetRel = "arrow_reset";

class HornBuilder {
public:
    HornBuilder(const Program& program, const CheckInfo& info, const StateModel& model,
                const HornOptions& options, Diagnostics& diags)
        : program_(program), info_(info), model_(model), options_(options), diags_(diags) {}

    std::optional<HornSystem> run() {
        for (const auto& decl : program_.type_decls) system_.sorts.push_back(decl);

        if (program_has_arrow()) emit_arrow_reset();
        for (const auto& node : program_.nodes) emit_node(node);
        if (!options_.main.empty()) {
            if (!emit_collecting_semantics()) return std::nullopt;
        }
        if (diags_.has_errors()) return std::nullopt;
        return std::move(system_);
    }

private:
    const Program& program_;
    const CheckInfo& info_;
    const StateModel& model_;
    const HornOptions& options_;
    Diagnostics& diags_;
    HornSystem system_;

    // -- helpers ---------------------------------------------------------------

    bool program_has_arrow() const {
        for (const auto& node : program_.nodes) {
            for (const auto& eq : node.equations) {
                if (classify_equation(eq) == NormEqKind::Call &&
                    eq.rhs.as<CallExpr>().callee == kArrowNode) {
                    return true;
                }
            }
        }
        return false;
    }

    void declare_var(const std::string& name, Sort sort) {
        for (const auto& v : system_.variables) {
            if (v.name == name) return;
        }
        system_.variables.push_back({name, sort});
    }

    void emit_arrow_reset() {
        const std::string c = horn_var(kArrowNode, "init_c");
        const std::string x = horn_var(kArrowNode, "init_x");
        declare_var(c, {Sort::Kind::Bool, ""});
        declare_var(x, {Sort::Kind::Bool, ""});
        system_.relations.push_back(
            {kArrowResetRel, {{Sort::Kind::Bool, ""}, {Sort::Kind::Bool, ""}}});
        std::vector<Term> head_args;
        head_args.push_back(t_var(c));
        head_args.push_back(t_var(x));
        system_.rules.push_back(
            {t_eq(t_var(x), t_bool(true)), t_rel(kArrowResetRel, std::move(head_args))});
        NodeEncoding enc;
        enc.node = kArrowNode;
        enc.reset_rel = kArrowResetRel;
        enc.reset_rule = static_cast<int>(system_.rules.size()) - 1;
        enc.flat.push_back({"init", Type::boolean(), true});
        system_.nodes[kArrowNode] = std::move(enc);
    }

    // -- per-node emission -------------------------------------------------------

    struct NodeCtx {
        const NodeDecl* node;
        std::set<std::string> memories;  // locals absorbed into the state tuple
    };

    std::string state_var(const NodeCtx& ctx, const std::string& qualified, const char* label) {
        return horn_var(ctx.node->name, qualified + "_" + label);
    }

    Term var_read(const NodeCtx& ctx, const std::string& name) {
        // Reads of a memory variable refer to the current state slot.
        if (ctx.memories.count(name)) return t_var(state_var(ctx, name, "c"));
        return t_var(horn_var(ctx.node->name, name));
    }

    Term encode_expr(const Expr& e, const NodeCtx& ctx) {
        return std::visit(
            [&](const auto& n) -> Term {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, BoolLitExpr>) {
                    return t_bool(n.value);
                } else if constexpr (std::is_same_v<T, IntLitExpr>) {
                    return t_int(n.value);
                } else if constexpr (std::is_same_v<T, RealLitExpr>) {
                    Term t;
                    t.kind = Term::Kind::RealLit;
                    t.real_lexeme = n.lexeme.empty() ? std::to_string(n.value) : n.lexeme;
                    return t;
                } else if constexpr (std::is_same_v<T, VarExpr>) {
                    return var_read(ctx, n.name);
                } else if constexpr (std::is_same_v<T, EnumLitExpr>) {
                    return t_enum(n.ctor);
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    assert(n.op != UnaryOp::Pre && "pre in a normalized expression");
                    if (n.op == UnaryOp::Not) return t_not(encode_expr(*n.operand, ctx));
                    std::vector<Term> args;
                    args.push_back(encode_expr(*n.operand, ctx));
                    return t_app("-", std::move(args));
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    Term lhs = encode_expr(*n.lhs, ctx);
                    Term rhs = encode_expr(*n.rhs, ctx);
                    auto bin = [&](const char* op) {
                        std::vector<Term> args;
                        args.push_back(std::move(lhs));
                        args.push_back(std::move(rhs));
                        return t_app(op, std::move(args));
                    };
                    switch (n.op) {
                        case BinaryOp::Add: return bin("+");
                        case BinaryOp::Sub: return bin("-");
                        case BinaryOp::Mul: return bin("*");
                        case BinaryOp::Div: return bin("/");
                        case BinaryOp::And: return bin("and");
                        case BinaryOp::Or: return bin("or");
                        case BinaryOp::Xor: return bin("xor");
                        case BinaryOp::Eq: return bin("=");
                        case BinaryOp::Neq: return t_not(bin("="));
                        case BinaryOp::Lt: return bin("<");
                        case BinaryOp::Le: return bin("<=");
                        case BinaryOp::Gt: return bin(">");
                        case BinaryOp::Ge: return bin(">=");
                    }
                    return t_bool(false);
                } else if constexpr (std::is_same_v<T, IteExpr>) {
                    return t_ite(encode_expr(*n.cond, ctx), encode_expr(*n.then_branch, ctx),
                                 encode_expr(*n.else_branch, ctx));
                } else if constexpr (std::is_same_v<T, WhenExpr>) {
                    // Sampling is a clock artifact; erased in the encoding.
                    return encode_expr(*n.operand, ctx);
                } else if constexpr (std::is_same_v<T, MergeExpr>) {
                    // Nested merges select through an ite chain; top-level
                    // merges become implications in encode_equation.
                    Term driver = var_read(ctx, n.clock_var);
                    Term acc = encode_expr(n.branches.back().second, ctx);
                    for (std::size_t i = n.branches.size() - 1; i-- > 0;) {
                        acc = t_ite(t_eq(driver, t_enum(n.branches[i].first)),
                                    encode_expr(n.branches[i].second, ctx), std::move(acc));
                    }
                    return acc;
                } else {
                    assert(false && "tuple in a normalized scalar expression");
                    return t_bool(false);
                }
            },
            e.node);
    }

    /// Guard term for a sampled clock, or nullopt on the base clock.
    std::optional<Term> clock_guard(const Clock& clock, const NodeCtx& ctx) {
        if (clock.is_base()) return std::nullopt;
        std::vector<Term> tests;
        for (const auto& sample : clock.samples) {
            tests.push_back(t_eq(var_read(ctx, sample.clock_var), t_enum(sample.ctor)));
        }
        return t_and(std::move(tests));
    }

    /// Conjuncts for one equation, clock guards included. Equations on a
    /// sampled clock freeze the state slots they own at inactive instants.
    void encode_equation(const Equation& eq, const NodeCtx& ctx, std::vector<Term>& out) {
        const auto guard = clock_guard(eq.rhs.clock, ctx);
        switch (classify_equation(eq)) {
            case NormEqKind::Memory: {
                const std::string& m = eq.targets[0];
                const auto& src = *eq.rhs.as<UnaryExpr>().operand;
                Term active = t_eq(t_var(state_var(ctx, m, "x")), encode_expr(src, ctx));
                if (!guard) {
                    out.push_back(std::move(active));
                    return;
                }
                out.push_back(t_imp(*guard, std::move(active)));
                out.push_back(t_imp(
                    t_not(*guard),
                    t_eq(t_var(state_var(ctx, m, "x")), t_var(state_var(ctx, m, "c")))));
                return;
            }
            case NormEqKind::Simple: {
                const Term target = t_var(horn_var(ctx.node->name, eq.targets[0]));
                if (eq.rhs.is<MergeExpr>()) {
                    const auto& merge = eq.rhs.as<MergeExpr>();
                    Term driver = var_read(ctx, merge.clock_var);
                    std::vector<Term> cases;
                    for (const auto& [ctor, branch] : merge.branches) {
                        cases.push_back(t_imp(t_eq(driver, t_enum(ctor)),
                                              t_eq(target, encode_expr(branch, ctx))));
                    }
                    Term merged = t_and(std::move(cases));
                    out.push_back(guard ? t_imp(*guard, std::move(merged)) : std::move(merged));
                    return;
                }
                Term body = t_eq(target, encode_expr(eq.rhs, ctx));
                out.push_back(guard ? t_imp(*guard, std::move(body)) : std::move(body));
                return;
            }
            case NormEqKind::Call:
                encode_call(eq, ctx, guard, out);
                return;
        }
    }

    void encode_call(const Equation& eq, const NodeCtx& ctx, const std::optional<Term>& guard,
                     std::vector<Term>& out) {
        const auto& call = eq.rhs.as<CallExpr>();
        std::optional<Term> reset_cond;
        if (call.every) reset_cond = encode_expr(*call.every, ctx);

        std::vector<Term> active;
        std::vector<Term> frozen;

        if (call.callee == kArrowNode) {
            // The polymorphic arrow cannot be a monomorphic relation; its
            // step is inlined as the case split on its init memory.
            const std::string init = call.uid + ".init";
            const Term init_c = t_var(state_var(ctx, init, "c"));
            const Term init_i = t_var(state_var(ctx, init, "i"));
            const Term init_x = t_var(state_var(ctx, init, "x"));
            active.push_back(
                t_eq(init_i, reset_cond ? t_ite(*reset_cond, t_bool(true), init_c) : init_c));
            active.push_back(t_eq(init_x, t_bool(false)));
            const std::size_t k = call.args.size() / 2;
            std::vector<Term> first, rest;
            for (std::size_t j = 0; j < k; ++j) {
                const Term target = t_var(horn_var(ctx.node->name, eq.targets[j]));
                first.push_back(t_eq(target, encode_expr(call.args[j], ctx)));
                rest.push_back(t_eq(target, encode_expr(call.args[j + k], ctx)));
            }
            active.push_back(t_imp(t_eq(init_i, t_bool(true)), t_and(std::move(first))));
            active.push_back(t_imp(t_eq(init_i, t_bool(false)), t_and(std::move(rest))));
            frozen.push_back(t_eq(init_x, init_c));
        } else {
            const NodeDecl* callee = program_.find_node(call.callee);
            assert(callee);
            const std::string rel = callee->is_function ? callee->name : callee->name + "_step";
            const FlatState callee_flat = model_.flatten(call.callee);
            std::vector<Term> rel_args;
            for (const auto& arg : call.args) rel_args.push_back(encode_expr(arg, ctx));
            for (const auto& target : eq.targets) {
                rel_args.push_back(t_var(horn_var(ctx.node->name, target)));
            }
            // Intermediate state: reset image under the every condition,
            // otherwise the current state.
            for (const auto& entry : callee_flat) {
                const std::string q = call.uid + "." + entry.qualified;
                const Term s_c = t_var(state_var(ctx, q, "c"));
                const Term s_i = t_var(state_var(ctx, q, "i"));
                if (entry.is_arrow_init && reset_cond) {
                    active.push_back(t_eq(s_i, t_ite(*reset_cond, t_bool(true), s_c)));
                } else {
                    active.push_back(t_eq(s_i, s_c));
                }
            }
            for (const auto& entry : callee_flat) {
                rel_args.push_back(t_var(state_var(ctx, call.uid + "." + entry.qualified, "i")));
            }
            for (const auto& entry : callee_flat) {
                rel_args.push_back(t_var(state_var(ctx, call.uid + "." + entry.qualified, "x")));
            }
            active.push_back(t_rel(rel, std::move(rel_args), call.uid));
            for (const auto& entry : callee_flat) {
                const std::string q = call.uid + "." + entry.qualified;
                frozen.push_back(
                    t_eq(t_var(state_var(ctx, q, "x")), t_var(state_var(ctx, q, "c"))));
            }
        }

        if (!guard) {
            for (auto& term : active) out.push_back(std::move(term));
            return;
        }
        out.push_back(t_imp(*guard, t_and(std::move(active))));
        if (!frozen.empty()) {
            out.push_back(t_imp(t_not(*guard), t_and(std::move(frozen))));
        }
    }

    void emit_node(const NodeDecl& node) {
        NodeCtx ctx{&node, {}};
        for (const auto& eq : node.equations) {
            if (classify_equation(eq) == NormEqKind::Memory) ctx.memories.insert(eq.targets[0]);
        }

        NodeEncoding enc;
        enc.node = node.name;
        enc.is_function = node.is_function;
        enc.flat = model_.flatten(node.name);
        enc.step_rel = node.is_function ? node.name : node.name + "_step";

        Relation step{enc.step_rel, {}};
        std::vector<Term> head_args;
        auto add_plain = [&](const VarDecl& v, std::vector<std::string>* names) {
            auto type = resolve_type_ref(v.type, info_);
            assert(type);
            step.args.push_back(Sort::of(*type));
            const std::string var = horn_var(node.name, v.name);
            declare_var(var, Sort::of(*type));
            head_args.push_back(t_var(var));
            if (names) names->push_back(v.name);
        };
        for (const auto& v : node.inputs) add_plain(v, &enc.inputs);
        for (const auto& v : node.outputs) add_plain(v, &enc.outputs);
        for (const char* label : {"c", "x"}) {
            for (const auto& entry : enc.flat) {
                const std::string var = horn_var(node.name, entry.qualified + "_" + label);
                step.args.push_back(Sort::of(entry.type));
                declare_var(var, Sort::of(entry.type));
                head_args.push_back(t_var(var));
            }
        }
        // Non-memory locals and intermediate labels of callee state slots
        // are free rule variables.
        for (const auto& v : node.locals) {
            if (ctx.memories.count(v.name)) continue;
            auto type = resolve_type_ref(v.type, info_);
            assert(type);
            declare_var(horn_var(node.name, v.name), Sort::of(*type));
        }
        for (const auto& entry : enc.flat) {
            if (entry.qualified.find('.') == std::string::npos) continue;  // own memory
            declare_var(horn_var(node.name, entry.qualified + "_i"), Sort::of(entry.type));
        }

        std::vector<Term> conjuncts;
        for (const auto& eq : node.equations) encode_equation(eq, ctx, conjuncts);

        system_.relations.push_back(step);
        system_.rules.push_back({t_and(std::move(conjuncts)), t_rel(enc.step_rel, head_args)});
        enc.step_rule = static_cast<int>(system_.rules.size()) - 1;

        if (!enc.flat.empty()) {
            enc.reset_rel = node.name + "_reset";
            Relation reset{enc.reset_rel, {}};
            std::vector<Term> reset_head;
            for (const char* label : {"c", "x"}) {
                for (const auto& entry : enc.flat) {
                    reset.args.push_back(Sort::of(entry.type));
                    reset_head.push_back(t_var(horn_var(node.name, entry.qualified + "_" + label)));
                }
            }
            std::vector<Term> body = reset_body(node, ctx);
            system_.relations.push_back(reset);
            system_.rules.push_back(
                {t_and(std::move(body)), t_rel(enc.reset_rel, std::move(reset_head))});
            enc.reset_rule = static_cast<int>(system_.rules.size()) - 1;
        }
        system_.nodes[node.name] = std::move(enc);
    }

    /// Reset body: own memories unchanged, arrow instances re-initialized,
    /// stateful callees reset through their own relation.
    std::vector<Term> reset_body(const NodeDecl& node, const NodeCtx& ctx) {
        std::vector<Term> body;
        const StateTree& tree = model_.tree(node.name);
        for (const auto& mem : tree.mems) {
            body.push_back(t_eq(t_var(state_var(ctx, mem.name, "x")),
                                t_var(state_var(ctx, mem.name, "c"))));
        }
        for (const auto& inst : tree.insts) {
            if (inst.callee == kArrowNode) {
                body.push_back(t_eq(t_var(state_var(ctx, inst.uid + ".init", "x")), t_bool(true)));
                continue;
            }
            std::vector<Term> args;
            for (const char* label : {"c", "x"}) {
                for (const auto& entry : StateModel::flatten(*inst.child)) {
                    args.push_back(t_var(
                        state_var(ctx, inst.uid + "." + entry.qualified, label)));
                }
            }
            body.push_back(t_rel(inst.callee + "_reset", std::move(args), inst.uid));
        }
        return body;
    }

    bool emit_collecting_semantics() {
        const NodeDecl* main = program_.find_node(options_.main);
        if (!main) {
            diags_.error(DiagCode::MainNode, {},
                         "main node '" + options_.main + "' does not exist");
            return false;
        }
        const NodeEncoding& enc = system_.nodes.at(main->name);
        if (enc.flat.empty()) {
            if (options_.prove_output) {
                diags_.error(DiagCode::MainNode, main->loc,
                             "main node '" + main->name + "' has no state");
                return false;
            }
            return true;  // nothing to collect
        }
        std::string reach = "Reach";
        while (system_.find_relation(reach) || program_.find_node(reach)) {
            reach = main->name + "_" + reach;
        }
        system_.reach_rel = reach;
        Relation rel{reach, {}};
        for (const auto& entry : enc.flat) rel.args.push_back(Sort::of(entry.type));
        system_.relations.push_back(rel);

        auto flat_vars = [&](const char* label) {
            std::vector<Term> vars;
            for (const auto& entry : enc.flat) {
                vars.push_back(t_var(horn_var(main->name, entry.qualified + "_" + label)));
            }
            return vars;
        };
        std::vector<Term> reset_args = flat_vars("c");
        for (auto& v : flat_vars("x")) reset_args.push_back(std::move(v));
        system_.rules.push_back(
            {t_rel(enc.reset_rel, std::move(reset_args)), t_rel(reach, flat_vars("x"))});

        std::vector<Term> step_args;
        for (const auto& name : enc.inputs) step_args.push_back(t_var(horn_var(main->name, name)));
        for (const auto& name : enc.outputs) step_args.push_back(t_var(horn_var(main->name, name)));
        for (auto& v : flat_vars("c")) step_args.push_back(std::move(v));
        for (auto& v : flat_vars("x")) step_args.push_back(std::move(v));
        Term step_app = t_rel(enc.step_rel, step_args);

        std::vector<Term> body;
        body.push_back(step_app);
        body.push_back(t_rel(reach, flat_vars("c")));
        system_.rules.push_back({t_and(std::move(body)), t_rel(reach, flat_vars("x"))});

        if (options_.prove_output) {
            const std::string& output = *options_.prove_output;
            bool found = false;
            for (const auto& v : main->outputs) {
                if (v.name == output) {
                    auto type = resolve_type_ref(v.type, info_);
                    found = type && type->kind == Type::Kind::Bool;
                }
            }
            if (!found) {
                diags_.error(DiagCode::MainNode, main->loc,
                             "property output '" + output + "' is not a bool output of '" +
                                 main->name + "'");
                return false;
            }
            std::string err = "ERR";
            while (system_.find_relation(err) || program_.find_node(err)) {
                err = main->name + "_" + err;
            }
            system_.relations.push_back({err, {}});
            std::vector<Term> err_body;
            err_body.push_back(t_rel(reach, flat_vars("c")));
            std::vector<Term> step_args2;
            for (const auto& name : enc.inputs) {
                step_args2.push_back(t_var(horn_var(main->name, name)));
            }
            for (const auto& name : enc.outputs) {
                step_args2.push_back(t_var(horn_var(main->name, name)));
            }
            for (auto& v : flat_vars("c")) step_args2.push_back(std::move(v));
            for (auto& v : flat_vars("x")) step_args2.push_back(std::move(v));
            err_body.push_back(t_rel(enc.step_rel, std::move(step_args2)));
            err_body.push_back(t_not(t_var(horn_var(main->name, output))));
            system_.rules.push_back({t_and(std::move(err_body)), t_rel(err, {})});
            system_.queries.push_back(err);
        }
        return true;
    }
};

}  // namespace

std::optional<HornSystem> build_horn(const Program& program, const CheckInfo& info,
                                     const StateModel& model, const HornOptions& options,
                                     Diagnostics& diags) {
    return HornBuilder(program, info, model, options, diags).run();
}

std::string write_smtlib(const HornSystem& system) {
    std::ostringstream os;
    os << "(set-logic HORN)\n";
    for (const auto& decl : system.sorts) {
        os << "(declare-datatypes () ((" << decl.name;
        for (const auto& c : decl.ctors) os << ' ' << c;
        os << ")))\n";
    }
    for (const auto& rel : system.relations) {
        os << "(declare-rel " << rel.name << " (";
        for (std::size_t i = 0; i < rel.args.size(); ++i) {
            if (i) os << ' ';
            os << rel.args[i].smt();
        }
        os << "))\n";
    }
    for (const auto& v : system.variables) {
        os << "(declare-var " << v.name << ' ' << v.sort.smt() << ")\n";
    }
    for (const auto& rule : system.rules) {
        os << "(rule (=> ";
        if (rule.body.kind == Term::Kind::App && rule.body.symbol == "and") {
            os << "(and";
            for (const auto& c : rule.body.args) os << "\n    " << c.print();
            os << ")";
        } else {
            os << rule.body.print();
        }
        os << "\n  " << rule.head.print() << "))\n";
    }
    for (const auto& q : system.queries) os << "(query " << q << ")\n";
    return os.str();
}

}  // namespace l2h
