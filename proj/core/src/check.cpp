// SPDX-License-Identifier: Apache-2.0
#include "l2h/check.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <set>

#include "l2h/vars.hpp"

namespace l2h {

namespace {

// ---------------------------------------------------------------------------
// Clock unification
// ---------------------------------------------------------------------------

struct CkTerm {
    enum class Kind { Var, Base, On };
    Kind kind = Kind::Var;
    int bound = -1;   // Var: index of the bound term, -1 if free
    int parent = -1;  // On
    std::string ctor;
    std::string var;
};

class ClockSolver {
public:
    int fresh() {
        terms_.push_back({});
        return static_cast<int>(terms_.size()) - 1;
    }
    int base() {
        terms_.push_back({CkTerm::Kind::Base, -1, -1, {}, {}});
        return static_cast<int>(terms_.size()) - 1;
    }
    int on(int parent, std::string ctor, std::string var) {
        terms_.push_back({CkTerm::Kind::On, -1, parent, std::move(ctor), std::move(var)});
        return static_cast<int>(terms_.size()) - 1;
    }

    int find(int i) {
        while (terms_[i].kind == CkTerm::Kind::Var && terms_[i].bound >= 0) i = terms_[i].bound;
        return i;
    }

    bool unify(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return true;
        CkTerm& ta = terms_[a];
        CkTerm& tb = terms_[b];
        if (ta.kind == CkTerm::Kind::Var) {
            ta.bound = b;
            return true;
        }
        if (tb.kind == CkTerm::Kind::Var) {
            tb.bound = a;
            return true;
        }
        if (ta.kind == CkTerm::Kind::Base && tb.kind == CkTerm::Kind::Base) return true;
        if (ta.kind == CkTerm::Kind::On && tb.kind == CkTerm::Kind::On) {
            if (ta.ctor != tb.ctor || ta.var != tb.var) return false;
            return unify(terms_[a].parent, terms_[b].parent);
        }
        return false;
    }

    /// Concrete clock; unresolved variables default to the base clock.
    Clock resolve(int i) {
        Clock ck;
        std::function<void(int, int)> walk = [&](int t, int depth) {
            if (depth > 64) return;  // malformed; caught by checks elsewhere
            t = find(t);
            if (terms_[t].kind == CkTerm::Kind::On) {
                walk(terms_[t].parent, depth + 1);
                ck.samples.push_back({terms_[t].ctor, terms_[t].var});
            }
        };
        walk(i, 0);
        return ck;
    }

    std::string describe(int i) { return resolve(i).to_string(); }

private:
    std::vector<CkTerm> terms_;
};

// ---------------------------------------------------------------------------
// Checker
// ---------------------------------------------------------------------------

struct Scope {
    std::vector<std::map<std::string, VarInfo>*> frames;

    VarInfo* lookup(const std::string& name) const {
        for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
            auto found = (*it)->find(name);
            if (found != (*it)->end()) return &found->second;
        }
        return nullptr;
    }
};

class Checker {
public:
    Checker(Program& program, Diagnostics& diags, CheckMode mode)
        : program_(program), diags_(diags), mode_(mode) {}

    std::optional<CheckInfo> run() {
        for (const auto& decl : program_.type_decls) {
            info_.enums[decl.name] = decl.ctors;
            for (const auto& ctor : decl.ctors) info_.ctor_owner[ctor] = decl.name;
        }
        for (const auto& node : program_.nodes) node_table_[node.name] = &node;
        check_recursion();
        for (auto& node : program_.nodes) check_node(node);
        if (diags_.has_errors()) return std::nullopt;
        return std::move(info_);
    }

private:
    Program& program_;
    Diagnostics& diags_;
    CheckMode mode_;
    CheckInfo info_;
    std::map<std::string, const NodeDecl*> node_table_;

    void error(SourceLoc loc, std::string message) {
        diags_.error(DiagCode::Type, loc, std::move(message));
    }

    // -- call graph -----------------------------------------------------------

    void collect_calls(const Expr& e, std::set<std::string>& out) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, CallExpr>) {
                    if (node_table_.count(n.callee)) out.insert(n.callee);
                    for (const auto& a : n.args) collect_calls(a, out);
                    if (n.every) collect_calls(*n.every, out);
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    collect_calls(*n.operand, out);
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    collect_calls(*n.lhs, out);
                    collect_calls(*n.rhs, out);
                } else if constexpr (std::is_same_v<T, IteExpr>) {
                    collect_calls(*n.cond, out);
                    collect_calls(*n.then_branch, out);
                    collect_calls(*n.else_branch, out);
                } else if constexpr (std::is_same_v<T, ArrowExpr>) {
                    collect_calls(*n.init, out);
                    collect_calls(*n.rest, out);
                } else if constexpr (std::is_same_v<T, WhenExpr>) {
                    collect_calls(*n.operand, out);
                } else if constexpr (std::is_same_v<T, MergeExpr>) {
                    for (const auto& [c, b] : n.branches) collect_calls(b, out);
                } else if constexpr (std::is_same_v<T, TupleExpr>) {
                    for (const auto& el : n.elems) collect_calls(el, out);
                }
            },
            e.node);
    }

    std::set<std::string> node_callees(const NodeDecl& node) {
        std::set<std::string> out;
        std::function<void(const std::vector<Equation>&, const std::vector<AutomatonDecl>&)>
            walk = [&](const std::vector<Equation>& eqs, const std::vector<AutomatonDecl>& auts) {
                for (const auto& eq : eqs) collect_calls(eq.rhs, out);
                for (const auto& aut : auts) {
                    for (const auto& state : aut.states) {
                        for (const auto& t : state.strong_transitions) collect_calls(t.guard, out);
                        for (const auto& t : state.weak_transitions) collect_calls(t.guard, out);
                        walk(state.equations, state.automata);
                    }
                }
            };
        walk(node.equations, node.automata);
        return out;
    }

    void check_recursion() {
        std::map<std::string, int> mark;  // 0 unvisited, 1 active, 2 done
        std::function<bool(const NodeDecl&, std::vector<std::string>&)> dfs =
            [&](const NodeDecl& node, std::vector<std::string>& stack) -> bool {
            int& m = mark[node.name];
            if (m == 2) return true;
            if (m == 1) {
                std::string cycle;
                auto it = std::find(stack.begin(), stack.end(), node.name);
                for (; it != stack.end(); ++it) cycle += *it + " -> ";
                cycle += node.name;
                diags_.error(DiagCode::Recursion, node.loc,
                             "recursive node call: " + cycle);
                return false;
            }
            m = 1;
            stack.push_back(node.name);
            for (const auto& callee : node_callees(node)) {
                auto it = node_table_.find(callee);
                if (it != node_table_.end() && !dfs(*it->second, stack)) {
                    stack.pop_back();
                    m = 2;
                    return false;
                }
            }
            stack.pop_back();
            m = 2;
            return true;
        };
        for (const auto& node : program_.nodes) {
            std::vector<std::string> stack;
            if (!dfs(node, stack)) break;
        }
    }

    // -- types ---------------------------------------------------------------

    std::optional<Type> resolve_ref(const TypeExprRef& ref, SourceLoc loc) {
        switch (ref.kind) {
            case TypeExprRef::Kind::Bool: return Type::boolean();
            case TypeExprRef::Kind::Int: return Type::integer();
            case TypeExprRef::Kind::Real: return Type::real();
            case TypeExprRef::Kind::Named:
                if (!info_.enums.count(ref.name)) {
                    error(loc, "unknown type '" + ref.name + "'");
                    return std::nullopt;
                }
                return Type::enumeration(ref.name);
        }
        return std::nullopt;
    }

    bool is_numeric(const Type& t) {
        return t.kind == Type::Kind::Int || t.kind == Type::Kind::Real;
    }

    std::optional<Type> type_expr(Expr& e, const Scope& scope, const NodeDecl& node) {
        auto result = type_expr_impl(e, scope, node);
        if (result) e.type = *result;
        return result;
    }

    std::optional<Type> type_expr_impl(Expr& e, const Scope& scope, const NodeDecl& node) {
        if (e.is<BoolLitExpr>()) return Type::boolean();
        if (e.is<IntLitExpr>()) return Type::integer();
        if (e.is<RealLitExpr>()) return Type::real();
        if (e.is<EnumLitExpr>()) return Type::enumeration(e.as<EnumLitExpr>().enum_type);
        if (e.is<VarExpr>()) {
            const std::string& name = e.as<VarExpr>().name;
            if (const VarInfo* vi = scope.lookup(name)) return vi->type;
            if (auto owner = info_.enum_of_ctor(name)) {
                e.node = EnumLitExpr{name, *owner};
                return Type::enumeration(*owner);
            }
            error(e.loc, "unknown identifier '" + name + "'");
            return std::nullopt;
        }
        if (e.is<UnaryExpr>()) {
            auto& n = e.as<UnaryExpr>();
            auto t = type_expr(*n.operand, scope, node);
            if (!t) return std::nullopt;
            switch (n.op) {
                case UnaryOp::Not:
                    if (t->kind != Type::Kind::Bool) {
                        error(e.loc, "'not' expects bool, found " + t->to_string());
                        return std::nullopt;
                    }
                    return t;
                case UnaryOp::Neg:
                    if (!is_numeric(*t)) {
                        error(e.loc, "unary '-' expects int or real, found " + t->to_string());
                        return std::nullopt;
                    }
                    return t;
                case UnaryOp::Pre:
                    return t;
            }
            return std::nullopt;
        }
        if (e.is<BinaryExpr>()) {
            auto& n = e.as<BinaryExpr>();
            auto lt = type_expr(*n.lhs, scope, node);
            auto rt = type_expr(*n.rhs, scope, node);
            if (!lt || !rt) return std::nullopt;
            switch (n.op) {
                case BinaryOp::Add:
                case BinaryOp::Sub:
                case BinaryOp::Mul:
                    if (!is_numeric(*lt) || !(*lt == *rt)) {
                        error(e.loc, std::string("operator '") + binary_op_symbol(n.op) +
                                         "' expects matching numeric operands, found " +
                                         lt->to_string() + " and " + rt->to_string());
                        return std::nullopt;
                    }
                    return lt;
                case BinaryOp::Div:
                    if (lt->kind != Type::Kind::Real || rt->kind != Type::Kind::Real) {
                        error(e.loc, "'/' is only defined on real operands");
                        return std::nullopt;
                    }
                    return lt;
                case BinaryOp::And:
                case BinaryOp::Or:
                case BinaryOp::Xor:
                    if (lt->kind != Type::Kind::Bool || rt->kind != Type::Kind::Bool) {
                        error(e.loc, std::string("operator '") + binary_op_symbol(n.op) +
                                         "' expects bool operands");
                        return std::nullopt;
                    }
                    return lt;
                case BinaryOp::Eq:
                case BinaryOp::Neq:
                    if (!(*lt == *rt) || !lt->is_scalar()) {
                        error(e.loc, "comparison of mismatched types " + lt->to_string() +
                                         " and " + rt->to_string());
                        return std::nullopt;
                    }
                    return Type::boolean();
                case BinaryOp::Lt:
                case BinaryOp::Le:
                case BinaryOp::Gt:
                case BinaryOp::Ge:
                    if (!is_numeric(*lt) || !(*lt == *rt)) {
                        error(e.loc, "ordering comparison expects matching numeric operands");
                        return std::nullopt;
                    }
                    return Type::boolean();
            }
            return std::nullopt;
        }
        if (e.is<IteExpr>()) {
            auto& n = e.as<IteExpr>();
            auto ct = type_expr(*n.cond, scope, node);
            auto tt = type_expr(*n.then_branch, scope, node);
            auto et = type_expr(*n.else_branch, scope, node);
            if (!ct || !tt || !et) return std::nullopt;
            if (ct->kind != Type::Kind::Bool) {
                error(n.cond->loc, "if condition must be bool, found " + ct->to_string());
                return std::nullopt;
            }
            if (!(*tt == *et)) {
                error(e.loc, "if branches have mismatched types " + tt->to_string() + " and " +
                                 et->to_string());
                return std::nullopt;
            }
            return tt;
        }
        if (e.is<ArrowExpr>()) {
            auto& n = e.as<ArrowExpr>();
            auto lt = type_expr(*n.init, scope, node);
            auto rt = type_expr(*n.rest, scope, node);
            if (!lt || !rt) return std::nullopt;
            if (!(*lt == *rt)) {
                error(e.loc, "'->' operands have mismatched types " + lt->to_string() + " and " +
                                 rt->to_string());
                return std::nullopt;
            }
            return lt;
        }
        if (e.is<WhenExpr>()) {
            auto& n = e.as<WhenExpr>();
            auto t = type_expr(*n.operand, scope, node);
            if (!t) return std::nullopt;
            auto owner = info_.enum_of_ctor(n.ctor);
            if (!owner) {
                error(e.loc, "unknown enum constructor '" + n.ctor + "' in when");
                return std::nullopt;
            }
            const VarInfo* clk = scope.lookup(n.clock_var);
            if (!clk) {
                error(e.loc, "unknown clock variable '" + n.clock_var + "'");
                return std::nullopt;
            }
            if (clk->type.kind != Type::Kind::Enum || clk->type.enum_name != *owner) {
                error(e.loc, "when samples on constructor '" + n.ctor + "' of type " + *owner +
                                 " but clock variable '" + n.clock_var + "' has type " +
                                 clk->type.to_string());
                return std::nullopt;
            }
            return t;
        }
        if (e.is<MergeExpr>()) {
            auto& n = e.as<MergeExpr>();
            const VarInfo* clk = scope.lookup(n.clock_var);
            if (!clk) {
                error(e.loc, "unknown merge clock variable '" + n.clock_var + "'");
                return std::nullopt;
            }
            if (clk->type.kind != Type::Kind::Enum) {
                error(e.loc, "merge clock variable '" + n.clock_var + "' must have enum type");
                return std::nullopt;
            }
            const auto* ctors = info_.ctors_of(clk->type.enum_name);
            assert(ctors);
            std::set<std::string> seen;
            std::optional<Type> branch_type;
            for (auto& [ctor, branch] : n.branches) {
                if (std::find(ctors->begin(), ctors->end(), ctor) == ctors->end()) {
                    error(branch.loc, "merge branch constructor '" + ctor +
                                          "' does not belong to type " + clk->type.enum_name);
                    return std::nullopt;
                }
                if (!seen.insert(ctor).second) {
                    error(branch.loc, "merge lists constructor '" + ctor + "' more than once");
                    return std::nullopt;
                }
                auto bt = type_expr(branch, scope, node);
                if (!bt) return std::nullopt;
                if (branch_type && !(*branch_type == *bt)) {
                    error(branch.loc, "merge branches have mismatched types " +
                                          branch_type->to_string() + " and " + bt->to_string());
                    return std::nullopt;
                }
                branch_type = bt;
            }
            if (seen.size() != ctors->size()) {
                error(e.loc, "merge over '" + n.clock_var + "' must list each constructor of " +
                                 clk->type.enum_name + " exactly once");
                return std::nullopt;
            }
            return branch_type;
        }
        if (e.is<TupleExpr>()) {
            auto& n = e.as<TupleExpr>();
            std::vector<Type> elems;
            for (auto& el : n.elems) {
                auto t = type_expr(el, scope, node);
                if (!t) return std::nullopt;
                if (!t->is_scalar()) {
                    error(el.loc, "nested tuple expressions are not supported");
                    return std::nullopt;
                }
                elems.push_back(*t);
            }
            return Type::tuple(std::move(elems));
        }
        // CallExpr
        auto& n = e.as<CallExpr>();
        if (n.every) {
            // `every C(x)` tests a clock constructor; rewrite to an equality
            // so later stages see a plain boolean condition.
            if (n.every->is<CallExpr>()) {
                auto& ce = n.every->as<CallExpr>();
                auto owner = info_.enum_of_ctor(ce.callee);
                if (owner && ce.args.size() == 1 && ce.args[0].is<VarExpr>() && !ce.every) {
                    Expr lhs = std::move(ce.args[0]);
                    Expr rhs = make_enum(ce.callee, *owner, n.every->loc);
                    *n.every = Expr(BinaryExpr{BinaryOp::Eq, box(std::move(lhs)), box(std::move(rhs))},
                                    n.every->loc);
                }
            }
            auto ct = type_expr(*n.every, scope, node);
            if (!ct) return std::nullopt;
            if (ct->kind != Type::Kind::Bool) {
                error(n.every->loc, "every condition must be bool, found " + ct->to_string());
                return std::nullopt;
            }
            if (node.is_function) {
                error(e.loc, "function '" + node.name + "' cannot reset a node instance");
                return std::nullopt;
            }
        }
        if (n.callee == kArrowNode) {
            if (mode_ == CheckMode::Source) {
                error(e.loc, "'arrow' is compiler-internal and cannot be called directly");
                return std::nullopt;
            }
            // arrow over k-tuples takes 2k arguments.
            if (n.args.empty() || n.args.size() % 2 != 0) {
                error(e.loc, "arrow expects an even argument count");
                return std::nullopt;
            }
            const std::size_t k = n.args.size() / 2;
            std::vector<Type> elems;
            for (std::size_t i = 0; i < k; ++i) {
                auto t1 = type_expr(n.args[i], scope, node);
                auto t2 = type_expr(n.args[i + k], scope, node);
                if (!t1 || !t2) return std::nullopt;
                if (!(*t1 == *t2)) {
                    error(e.loc, "arrow argument types differ: " + t1->to_string() + " vs " +
                                     t2->to_string());
                    return std::nullopt;
                }
                elems.push_back(*t1);
            }
            return k == 1 ? elems[0] : Type::tuple(std::move(elems));
        }
        auto it = node_table_.find(n.callee);
        if (it == node_table_.end()) {
            if (info_.enum_of_ctor(n.callee)) {
                error(e.loc, "enum constructor '" + n.callee + "' used as a node call");
            } else {
                error(e.loc, "unknown node '" + n.callee + "'");
            }
            return std::nullopt;
        }
        const NodeDecl& callee = *it->second;
        if (node.is_function && !callee.is_function) {
            error(e.loc, "function '" + node.name + "' cannot call stateful node '" +
                             callee.name + "'");
            return std::nullopt;
        }
        if (n.args.size() != callee.inputs.size()) {
            error(e.loc, "call to '" + callee.name + "' expects " +
                             std::to_string(callee.inputs.size()) + " arguments, found " +
                             std::to_string(n.args.size()));
            return std::nullopt;
        }
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            auto at = type_expr(n.args[i], scope, node);
            if (!at) return std::nullopt;
            auto expected = resolve_ref(callee.inputs[i].type, e.loc);
            if (!expected) return std::nullopt;
            if (!(*at == *expected)) {
                error(n.args[i].loc, "argument " + std::to_string(i + 1) + " of '" + callee.name +
                                         "' expects " + expected->to_string() + ", found " +
                                         at->to_string());
                return std::nullopt;
            }
        }
        if (callee.outputs.empty()) {
            error(e.loc, "node '" + callee.name + "' has no outputs");
            return std::nullopt;
        }
        std::vector<Type> outs;
        for (const auto& o : callee.outputs) {
            auto t = resolve_ref(o.type, e.loc);
            if (!t) return std::nullopt;
            outs.push_back(*t);
        }
        return outs.size() == 1 ? outs[0] : Type::tuple(std::move(outs));
    }

    // Rejects pre / -> anywhere inside a function body.
    void check_function_purity(const NodeDecl& node, const Expr& e) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, UnaryExpr>) {
                    if (n.op == UnaryOp::Pre) {
                        error(e.loc, "function '" + node.name + "' cannot use 'pre'");
                    }
                    check_function_purity(node, *n.operand);
                } else if constexpr (std::is_same_v<T, ArrowExpr>) {
                    error(e.loc, "function '" + node.name + "' cannot use '->'");
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    check_function_purity(node, *n.lhs);
                    check_function_purity(node, *n.rhs);
                } else if constexpr (std::is_same_v<T, IteExpr>) {
                    check_function_purity(node, *n.cond);
                    check_function_purity(node, *n.then_branch);
                    check_function_purity(node, *n.else_branch);
                } else if constexpr (std::is_same_v<T, CallExpr>) {
                    for (const auto& a : n.args) check_function_purity(node, a);
                } else if constexpr (std::is_same_v<T, WhenExpr>) {
                    check_function_purity(node, *n.operand);
                } else if constexpr (std::is_same_v<T, MergeExpr>) {
                    for (const auto& [c, b] : n.branches) check_function_purity(node, b);
                } else if constexpr (std::is_same_v<T, TupleExpr>) {
                    for (const auto& el : n.elems) check_function_purity(node, el);
                }
            },
            e.node);
    }

    // -- per-node checking -----------------------------------------------------

    void check_equation(Equation& eq, const Scope& scope, const NodeDecl& node,
                        const std::set<std::string>& assignable) {
        for (const auto& target : eq.targets) {
            const VarInfo* vi = scope.lookup(target);
            if (!vi) {
                error(eq.loc, "equation defines undeclared variable '" + target + "'");
                return;
            }
            if (vi->role == VarInfo::Role::Input) {
                error(eq.loc, "equation assigns input '" + target + "'");
                return;
            }
            if (!assignable.count(target)) {
                error(eq.loc, "equation assigns '" + target + "' outside its scope");
                return;
            }
        }
        auto rhs_type = type_expr(eq.rhs, scope, node);
        if (!rhs_type) return;
        if (rhs_type->arity() != eq.targets.size()) {
            error(eq.loc, "equation defines " + std::to_string(eq.targets.size()) +
                              " variables but its expression has arity " +
                              std::to_string(rhs_type->arity()));
            return;
        }
        for (std::size_t i = 0; i < eq.targets.size(); ++i) {
            const VarInfo* vi = scope.lookup(eq.targets[i]);
            const Type& expected = vi->type;
            const Type& actual = rhs_type->element(i);
            if (!(expected == actual)) {
                error(eq.loc, "variable '" + eq.targets[i] + "' has type " + expected.to_string() +
                                  " but is defined with type " + actual.to_string());
            }
        }
        if (node.is_function) check_function_purity(node, eq.rhs);
    }

    bool build_var_map(const std::vector<VarDecl>& decls, VarInfo::Role role,
                       std::map<std::string, VarInfo>& out) {
        bool ok = true;
        for (const auto& v : decls) {
            auto t = resolve_ref(v.type, v.loc);
            if (!t) {
                ok = false;
                continue;
            }
            if (v.is_clock && t->kind != Type::Kind::Enum) {
                error(v.loc, "variable '" + v.name + "' is declared clock but has type " +
                                 t->to_string());
                ok = false;
            }
            out[v.name] = VarInfo{*t, {}, v.is_clock, role};
        }
        return ok;
    }

    void check_state_scope(StateDecl& state, Scope scope, const NodeDecl& node,
                           std::set<std::string> assignable_outer) {
        std::map<std::string, VarInfo> locals;
        if (!build_var_map(state.locals, VarInfo::Role::Local, locals)) return;
        for (const auto& v : state.locals) {
            if (scope.lookup(v.name)) {
                error(v.loc, "state local '" + v.name + "' shadows another declaration");
                return;
            }
        }
        scope.frames.push_back(&locals);
        std::set<std::string> assignable = std::move(assignable_outer);
        for (const auto& v : state.locals) assignable.insert(v.name);

        // Weak guards run with the state in scope; strong guards run before
        // the state is entered and cannot see its locals.
        for (auto& t : state.weak_transitions) {
            auto gt = type_expr(t.guard, scope, node);
            if (gt && gt->kind != Type::Kind::Bool) {
                error(t.loc, "transition guard must be bool, found " + gt->to_string());
            }
        }
        Scope outer = scope;
        outer.frames.pop_back();
        for (auto& t : state.strong_transitions) {
            auto gt = type_expr(t.guard, outer, node);
            if (gt && gt->kind != Type::Kind::Bool) {
                error(t.loc, "transition guard must be bool, found " + gt->to_string());
            }
        }

        std::set<std::string> defined;
        for (auto& eq : state.equations) {
            check_equation(eq, scope, node, assignable);
            for (const auto& t : eq.targets) defined.insert(t);
        }
        for (auto& nested : state.automata) {
            check_automaton(nested, scope, node, assignable);
            for (const auto& w : automaton_writes(nested)) defined.insert(w);
        }
        for (const auto& v : state.locals) {
            if (!defined.count(v.name)) {
                error(v.loc, "state local '" + v.name + "' is never defined");
            }
        }
    }

    void check_automaton(AutomatonDecl& aut, const Scope& scope, const NodeDecl& node,
                         const std::set<std::string>& assignable) {
        if (node.is_function) {
            error(aut.loc, "function '" + node.name + "' cannot contain an automaton");
            return;
        }
        for (auto& state : aut.states) {
            check_state_scope(state, scope, node, assignable);
        }
    }

    void check_node(NodeDecl& node) {
        std::map<std::string, VarInfo> vars;
        bool ok = build_var_map(node.inputs, VarInfo::Role::Input, vars);
        ok &= build_var_map(node.outputs, VarInfo::Role::Output, vars);
        ok &= build_var_map(node.locals, VarInfo::Role::Local, vars);
        if (!ok) return;

        Scope scope;
        scope.frames.push_back(&vars);

        std::set<std::string> assignable;
        for (const auto& v : node.outputs) assignable.insert(v.name);
        for (const auto& v : node.locals) assignable.insert(v.name);

        std::set<std::string> defined;
        for (auto& eq : node.equations) {
            check_equation(eq, scope, node, assignable);
            for (const auto& t : eq.targets) defined.insert(t);
        }
        for (auto& aut : node.automata) {
            check_automaton(aut, scope, node, assignable);
            for (const auto& w : automaton_writes(aut)) defined.insert(w);
        }
        for (const auto& v : node.outputs) {
            if (!defined.count(v.name)) {
                error(v.loc, "output '" + v.name + "' of node '" + node.name + "' is never defined");
            }
        }
        for (const auto& v : node.locals) {
            if (!defined.count(v.name)) {
                error(v.loc, "local '" + v.name + "' of node '" + node.name + "' is never defined");
            }
        }
        if (diags_.has_errors()) return;

        check_clocks(node, vars);
        info_.node_vars[node.name] = std::move(vars);
    }

    // -- clocks ----------------------------------------------------------------
    //
    // Clock inference is local and declaration driven: node interface streams
    // run on the base clock, local clocks are inferred by unification from
    // their defining equations and uses. Equations inside automaton states are
    // clocked after expansion, when they live in their own nodes.

    void clock_error(SourceLoc loc, std::string message) {
        diags_.error(DiagCode::Clock, loc, std::move(message));
    }

    void check_clocks(NodeDecl& node, std::map<std::string, VarInfo>& vars) {
        ClockSolver solver;
        std::map<std::string, int> var_terms;
        for (auto& [name, vi] : vars) {
            var_terms[name] =
                vi.role == VarInfo::Role::Local ? solver.fresh() : solver.base();
        }
        struct Deferred {
            int cond;
            int call;
            SourceLoc loc;
        };
        std::vector<Deferred> deferred;
        std::vector<std::pair<Expr*, int>> annotations;

        std::function<std::optional<int>(Expr&)> infer = [&](Expr& e) -> std::optional<int> {
            auto record = [&](int term) {
                annotations.emplace_back(&e, term);
                return term;
            };
            if (e.is<BoolLitExpr>() || e.is<IntLitExpr>() || e.is<RealLitExpr>() ||
                e.is<EnumLitExpr>()) {
                return record(solver.fresh());
            }
            if (e.is<VarExpr>()) return record(var_terms.at(e.as<VarExpr>().name));
            if (e.is<UnaryExpr>()) {
                auto t = infer(*e.as<UnaryExpr>().operand);
                if (!t) return std::nullopt;
                return record(*t);
            }
            if (e.is<BinaryExpr>()) {
                auto& n = e.as<BinaryExpr>();
                auto lt = infer(*n.lhs);
                auto rt = infer(*n.rhs);
                if (!lt || !rt) return std::nullopt;
                if (!solver.unify(*lt, *rt)) {
                    clock_error(e.loc, "operands of '" + std::string(binary_op_symbol(n.op)) +
                                           "' are on different clocks (" + solver.describe(*lt) +
                                           " vs " + solver.describe(*rt) + ")");
                    return std::nullopt;
                }
                return record(*lt);
            }
            if (e.is<IteExpr>()) {
                auto& n = e.as<IteExpr>();
                auto ct = infer(*n.cond);
                auto tt = infer(*n.then_branch);
                auto et = infer(*n.else_branch);
                if (!ct || !tt || !et) return std::nullopt;
                if (!solver.unify(*ct, *tt) || !solver.unify(*tt, *et)) {
                    clock_error(e.loc, "if branches are on different clocks");
                    return std::nullopt;
                }
                return record(*ct);
            }
            if (e.is<ArrowExpr>()) {
                auto& n = e.as<ArrowExpr>();
                auto lt = infer(*n.init);
                auto rt = infer(*n.rest);
                if (!lt || !rt) return std::nullopt;
                if (!solver.unify(*lt, *rt)) {
                    clock_error(e.loc, "'->' operands are on different clocks");
                    return std::nullopt;
                }
                return record(*lt);
            }
            if (e.is<WhenExpr>()) {
                auto& n = e.as<WhenExpr>();
                auto ot = infer(*n.operand);
                if (!ot) return std::nullopt;
                const VarInfo* clk = vars.count(n.clock_var) ? &vars.at(n.clock_var) : nullptr;
                if (clk && !clk->is_clock_decl) {
                    clock_error(e.loc, "variable '" + n.clock_var +
                                           "' is used as a clock but is not declared 'clock'");
                    return std::nullopt;
                }
                const int clk_term = var_terms.at(n.clock_var);
                if (!solver.unify(*ot, clk_term)) {
                    clock_error(e.loc, "when operand and clock variable '" + n.clock_var +
                                           "' are on different clocks");
                    return std::nullopt;
                }
                return record(solver.on(clk_term, n.ctor, n.clock_var));
            }
            if (e.is<MergeExpr>()) {
                auto& n = e.as<MergeExpr>();
                const VarInfo* clk = vars.count(n.clock_var) ? &vars.at(n.clock_var) : nullptr;
                if (clk && !clk->is_clock_decl) {
                    clock_error(e.loc, "variable '" + n.clock_var +
                                           "' is used as a clock but is not declared 'clock'");
                    return std::nullopt;
                }
                const int clk_term = var_terms.at(n.clock_var);
                for (auto& [ctor, branch] : n.branches) {
                    auto bt = infer(branch);
                    if (!bt) return std::nullopt;
                    const int expected = solver.on(clk_term, ctor, n.clock_var);
                    if (!solver.unify(*bt, expected)) {
                        clock_error(branch.loc,
                                    "merge branch for '" + ctor + "' is not sampled on " + ctor +
                                        "(" + n.clock_var + ") (found " + solver.describe(*bt) +
                                        ")");
                        return std::nullopt;
                    }
                }
                return record(clk_term);
            }
            if (e.is<TupleExpr>()) {
                auto& n = e.as<TupleExpr>();
                const int t = solver.fresh();
                for (auto& el : n.elems) {
                    auto et = infer(el);
                    if (!et) return std::nullopt;
                    if (!solver.unify(t, *et)) {
                        clock_error(el.loc, "tuple components are on different clocks");
                        return std::nullopt;
                    }
                }
                return record(t);
            }
            // CallExpr: all arguments share the call clock; outputs are on it.
            auto& n = e.as<CallExpr>();
            const int call_clock = solver.fresh();
            for (auto& a : n.args) {
                auto at = infer(a);
                if (!at) return std::nullopt;
                if (!solver.unify(call_clock, *at)) {
                    clock_error(a.loc, "arguments of call to '" + n.callee +
                                           "' are on different clocks");
                    return std::nullopt;
                }
            }
            if (n.every) {
                auto ct = infer(*n.every);
                if (!ct) return std::nullopt;
                deferred.push_back({*ct, call_clock, n.every->loc});
            }
            return record(call_clock);
        };

        bool ok = true;
        for (auto& eq : node.equations) {
            auto rt = infer(eq.rhs);
            if (!rt) {
                ok = false;
                break;
            }
            for (const auto& target : eq.targets) {
                if (!solver.unify(var_terms.at(target), *rt)) {
                    clock_error(eq.loc, "variable '" + target + "' is defined on clock " +
                                            solver.describe(*rt) + " but used on clock " +
                                            solver.describe(var_terms.at(target)));
                    ok = false;
                }
            }
        }
        if (!ok) return;

        // The reset condition of `every` may sit on a coarser clock than the
        // call it resets (the call only samples it at active instants).
        for (const auto& d : deferred) {
            const Clock cond = solver.resolve(d.cond);
            const Clock call = solver.resolve(d.call);
            if (!cond.is_prefix_of(call)) {
                clock_error(d.loc, "every condition on clock " + cond.to_string() +
                                       " does not enclose the call clock " + call.to_string());
            }
        }
        for (auto& [expr, term] : annotations) expr->clock = solver.resolve(term);
        for (auto& [name, vi] : vars) vi.clock = solver.resolve(var_terms.at(name));
    }
};

}  // namespace

std::optional<CheckInfo> check_program(Program& program, Diagnostics& diags, CheckMode mode) {
    return Checker(program, diags, mode).run();
}

std::optional<Type> resolve_type_ref(const TypeExprRef& ref, const CheckInfo& info) {
    switch (ref.kind) {
        case TypeExprRef::Kind::Bool: return Type::boolean();
        case TypeExprRef::Kind::Int: return Type::integer();
        case TypeExprRef::Kind::Real: return Type::real();
        case TypeExprRef::Kind::Named:
            if (!info.enums.count(ref.name)) return std::nullopt;
            return Type::enumeration(ref.name);
    }
    return std::nullopt;
}

}  // namespace l2h
