// SPDX-License-Identifier: Apache-2.0
#include "l2h/ast.hpp"

#include <sstream>

namespace l2h {

std::string Type::to_string() const {
    switch (kind) {
        case Kind::Unknown: return "?";
        case Kind::Bool: return "bool";
        case Kind::Int: return "int";
        case Kind::Real: return "real";
        case Kind::Enum: return enum_name;
        case Kind::Tuple: {
            std::ostringstream os;
            os << '(';
            for (std::size_t i = 0; i < elems.size(); ++i) {
                if (i) os << ", ";
                os << elems[i].to_string();
            }
            os << ')';
            return os.str();
        }
    }
    return "?";
}

std::string Clock::to_string() const {
    std::string out = "base";
    for (const auto& s : samples) out += " on " + s.ctor + "(" + s.clock_var + ")";
    return out;
}

const char* binary_op_symbol(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::And: return "and";
        case BinaryOp::Or: return "or";
        case BinaryOp::Xor: return "xor";
        case BinaryOp::Eq: return "=";
        case BinaryOp::Neq: return "<>";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
    }
    return "?";
}

ExprPtr box(Expr expr) { return std::make_unique<Expr>(std::move(expr)); }

namespace {

ExprPtr clone_ptr(const ExprPtr& p) { return p ? box(p->clone()) : nullptr; }

std::vector<Expr> clone_vec(const std::vector<Expr>& v) {
    std::vector<Expr> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(e.clone());
    return out;
}

}  // namespace

Expr Expr::clone() const {
    Expr out;
    out.loc = loc;
    out.type = type;
    out.clock = clock;
    out.node = std::visit(
        [](const auto& n) -> ExprNode {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, BoolLitExpr> || std::is_same_v<T, IntLitExpr> ||
                          std::is_same_v<T, RealLitExpr> || std::is_same_v<T, VarExpr> ||
                          std::is_same_v<T, EnumLitExpr>) {
                return n;
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                return UnaryExpr{n.op, clone_ptr(n.operand)};
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                return BinaryExpr{n.op, clone_ptr(n.lhs), clone_ptr(n.rhs)};
            } else if constexpr (std::is_same_v<T, IteExpr>) {
                return IteExpr{clone_ptr(n.cond), clone_ptr(n.then_branch), clone_ptr(n.else_branch)};
            } else if constexpr (std::is_same_v<T, ArrowExpr>) {
                return ArrowExpr{clone_ptr(n.init), clone_ptr(n.rest)};
            } else if constexpr (std::is_same_v<T, CallExpr>) {
                return CallExpr{n.callee, clone_vec(n.args), clone_ptr(n.every), n.uid};
            } else if constexpr (std::is_same_v<T, WhenExpr>) {
                return WhenExpr{clone_ptr(n.operand), n.ctor, n.clock_var};
            } else if constexpr (std::is_same_v<T, MergeExpr>) {
                MergeExpr m{n.clock_var, {}};
                m.branches.reserve(n.branches.size());
                for (const auto& [c, e] : n.branches) m.branches.emplace_back(c, e.clone());
                return m;
            } else {
                static_assert(std::is_same_v<T, TupleExpr>);
                return TupleExpr{clone_vec(n.elems)};
            }
        },
        node);
    return out;
}

bool expr_equal(const Expr& a, const Expr& b) {
    // A resolved enum constructor prints as a bare identifier, so it compares
    // equal to the unresolved variable form with the same name.
    if (a.is<EnumLitExpr>() && b.is<VarExpr>()) {
        return a.as<EnumLitExpr>().ctor == b.as<VarExpr>().name;
    }
    if (a.is<VarExpr>() && b.is<EnumLitExpr>()) {
        return a.as<VarExpr>().name == b.as<EnumLitExpr>().ctor;
    }
    if (a.node.index() != b.node.index()) return false;
    auto ptr_eq = [](const ExprPtr& x, const ExprPtr& y) {
        if (!x || !y) return !x && !y;
        return expr_equal(*x, *y);
    };
    auto vec_eq = [](const std::vector<Expr>& x, const std::vector<Expr>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!expr_equal(x[i], y[i])) return false;
        }
        return true;
    };
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, BoolLitExpr>) {
                return na.value == nb.value;
            } else if constexpr (std::is_same_v<T, IntLitExpr>) {
                return na.value == nb.value;
            } else if constexpr (std::is_same_v<T, RealLitExpr>) {
                return na.lexeme == nb.lexeme;
            } else if constexpr (std::is_same_v<T, VarExpr>) {
                return na.name == nb.name;
            } else if constexpr (std::is_same_v<T, EnumLitExpr>) {
                return na.ctor == nb.ctor;
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                return na.op == nb.op && ptr_eq(na.operand, nb.operand);
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                return na.op == nb.op && ptr_eq(na.lhs, nb.lhs) && ptr_eq(na.rhs, nb.rhs);
            } else if constexpr (std::is_same_v<T, IteExpr>) {
                return ptr_eq(na.cond, nb.cond) && ptr_eq(na.then_branch, nb.then_branch) &&
                       ptr_eq(na.else_branch, nb.else_branch);
            } else if constexpr (std::is_same_v<T, ArrowExpr>) {
                return ptr_eq(na.init, nb.init) && ptr_eq(na.rest, nb.rest);
            } else if constexpr (std::is_same_v<T, CallExpr>) {
                return na.callee == nb.callee && vec_eq(na.args, nb.args) &&
                       ptr_eq(na.every, nb.every);
            } else if constexpr (std::is_same_v<T, WhenExpr>) {
                return na.ctor == nb.ctor && na.clock_var == nb.clock_var &&
                       ptr_eq(na.operand, nb.operand);
            } else if constexpr (std::is_same_v<T, MergeExpr>) {
                if (na.clock_var != nb.clock_var) return false;
                if (na.branches.size() != nb.branches.size()) return false;
                for (std::size_t i = 0; i < na.branches.size(); ++i) {
                    if (na.branches[i].first != nb.branches[i].first) return false;
                    if (!expr_equal(na.branches[i].second, nb.branches[i].second)) return false;
                }
                return true;
            } else {
                static_assert(std::is_same_v<T, TupleExpr>);
                return vec_eq(na.elems, nb.elems);
            }
        },
        a.node);
}

Expr make_var(std::string name, SourceLoc loc) { return Expr(VarExpr{std::move(name)}, loc); }
Expr make_bool(bool value, SourceLoc loc) { return Expr(BoolLitExpr{value}, loc); }
Expr make_int(std::int64_t value, SourceLoc loc) { return Expr(IntLitExpr{value}, loc); }
Expr make_enum(std::string ctor, std::string enum_type, SourceLoc loc) {
    return Expr(EnumLitExpr{std::move(ctor), std::move(enum_type)}, loc);
}
Expr make_tuple(std::vector<Expr> elems, SourceLoc loc) {
    return Expr(TupleExpr{std::move(elems)}, loc);
}

bool var_decl_equal(const VarDecl& a, const VarDecl& b) {
    return a.name == b.name && a.type == b.type && a.is_clock == b.is_clock;
}

Equation Equation::clone() const { return Equation(targets, rhs.clone(), loc); }

Transition Transition::clone() const {
    Transition t;
    t.guard = guard.clone();
    t.is_restart = is_restart;
    t.target = target;
    t.loc = loc;
    return t;
}

StateDecl StateDecl::clone() const {
    StateDecl s;
    s.name = name;
    s.loc = loc;
    s.locals = locals;
    for (const auto& t : strong_transitions) s.strong_transitions.push_back(t.clone());
    for (const auto& e : equations) s.equations.push_back(e.clone());
    for (const auto& a : automata) s.automata.push_back(a.clone());
    for (const auto& t : weak_transitions) s.weak_transitions.push_back(t.clone());
    return s;
}

AutomatonDecl AutomatonDecl::clone() const {
    AutomatonDecl a;
    a.name = name;
    a.loc = loc;
    for (const auto& s : states) a.states.push_back(s.clone());
    return a;
}

NodeDecl NodeDecl::clone() const {
    NodeDecl n;
    n.name = name;
    n.is_function = is_function;
    n.inputs = inputs;
    n.outputs = outputs;
    n.locals = locals;
    n.loc = loc;
    for (const auto& e : equations) n.equations.push_back(e.clone());
    for (const auto& a : automata) n.automata.push_back(a.clone());
    return n;
}

const VarDecl* NodeDecl::find_var(const std::string& var_name) const {
    for (const auto& v : inputs) {
        if (v.name == var_name) return &v;
    }
    for (const auto& v : outputs) {
        if (v.name == var_name) return &v;
    }
    for (const auto& v : locals) {
        if (v.name == var_name) return &v;
    }
    return nullptr;
}

Program Program::clone() const {
    Program p;
    p.type_decls = type_decls;
    for (const auto& n : nodes) p.nodes.push_back(n.clone());
    return p;
}

const NodeDecl* Program::find_node(const std::string& name) const {
    for (const auto& n : nodes) {
        if (n.name == name) return &n;
    }
    return nullptr;
}

NodeDecl* Program::find_node(const std::string& name) {
    for (auto& n : nodes) {
        if (n.name == name) return &n;
    }
    return nullptr;
}

bool equation_equal(const Equation& a, const Equation& b) {
    return a.targets == b.targets && expr_equal(a.rhs, b.rhs);
}

namespace {

bool transition_equal(const Transition& a, const Transition& b) {
    return a.is_restart == b.is_restart && a.target == b.target && expr_equal(a.guard, b.guard);
}

bool automaton_equal(const AutomatonDecl& a, const AutomatonDecl& b);

bool state_equal(const StateDecl& a, const StateDecl& b) {
    if (a.name != b.name) return false;
    auto trans_vec_eq = [](const std::vector<Transition>& x, const std::vector<Transition>& y) {
        if (x.size() != y.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!transition_equal(x[i], y[i])) return false;
        }
        return true;
    };
    if (!trans_vec_eq(a.strong_transitions, b.strong_transitions)) return false;
    if (!trans_vec_eq(a.weak_transitions, b.weak_transitions)) return false;
    if (a.locals.size() != b.locals.size()) return false;
    for (std::size_t i = 0; i < a.locals.size(); ++i) {
        if (!var_decl_equal(a.locals[i], b.locals[i])) return false;
    }
    if (a.equations.size() != b.equations.size()) return false;
    for (std::size_t i = 0; i < a.equations.size(); ++i) {
        if (!equation_equal(a.equations[i], b.equations[i])) return false;
    }
    if (a.automata.size() != b.automata.size()) return false;
    for (std::size_t i = 0; i < a.automata.size(); ++i) {
        if (!automaton_equal(a.automata[i], b.automata[i])) return false;
    }
    return true;
}

bool automaton_equal(const AutomatonDecl& a, const AutomatonDecl& b) {
    if (a.name != b.name || a.states.size() != b.states.size()) return false;
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        if (!state_equal(a.states[i], b.states[i])) return false;
    }
    return true;
}

bool var_vec_equal(const std::vector<VarDecl>& a, const std::vector<VarDecl>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!var_decl_equal(a[i], b[i])) return false;
    }
    return true;
}

}  // namespace

bool node_equal(const NodeDecl& a, const NodeDecl& b) {
    if (a.name != b.name || a.is_function != b.is_function) return false;
    if (!var_vec_equal(a.inputs, b.inputs) || !var_vec_equal(a.outputs, b.outputs) ||
        !var_vec_equal(a.locals, b.locals)) {
        return false;
    }
    if (a.equations.size() != b.equations.size()) return false;
    for (std::size_t i = 0; i < a.equations.size(); ++i) {
        if (!equation_equal(a.equations[i], b.equations[i])) return false;
    }
    if (a.automata.size() != b.automata.size()) return false;
    for (std::size_t i = 0; i < a.automata.size(); ++i) {
        if (!automaton_equal(a.automata[i], b.automata[i])) return false;
    }
    return true;
}

bool program_equal(const Program& a, const Program& b) {
    if (a.type_decls.size() != b.type_decls.size()) return false;
    for (std::size_t i = 0; i < a.type_decls.size(); ++i) {
        if (a.type_decls[i].name != b.type_decls[i].name) return false;
        if (a.type_decls[i].ctors != b.type_decls[i].ctors) return false;
    }
    if (a.nodes.size() != b.nodes.size()) return false;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        if (!node_equal(a.nodes[i], b.nodes[i])) return false;
    }
    return true;
}

}  // namespace l2h
