// SPDX-License-Identifier: Apache-2.0
#include "l2h/printer.hpp"

#include <sstream>

namespace l2h {

namespace {

// Binding strength mirroring the parser, loosest first:
//   1 ->   2 when   3 or/xor   4 and   5 not   6 comparisons
//   7 + -  8 * /    9 unary    10 atoms
int binary_prec(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or:
        case BinaryOp::Xor: return 3;
        case BinaryOp::And: return 4;
        case BinaryOp::Eq:
        case BinaryOp::Neq:
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return 6;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 7;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 8;
    }
    return 10;
}

class ExprPrinter {
public:
    // `required` is the minimum binding strength acceptable without
    // parentheses; `tail` is true when no token of an enclosing expression
    // follows, which lets if/merge print bare.
    void print(std::ostream& os, const Expr& e, int required, bool tail) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, BoolLitExpr>) {
                    os << (n.value ? "true" : "false");
                } else if constexpr (std::is_same_v<T, IntLitExpr>) {
                    os << n.value;
                } else if constexpr (std::is_same_v<T, RealLitExpr>) {
                    os << (n.lexeme.empty() ? std::to_string(n.value) : n.lexeme);
                } else if constexpr (std::is_same_v<T, VarExpr>) {
                    os << n.name;
                } else if constexpr (std::is_same_v<T, EnumLitExpr>) {
                    os << n.ctor;
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    print_unary(os, n, required, tail);
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    print_binary(os, n, required, tail);
                } else if constexpr (std::is_same_v<T, IteExpr>) {
                    const bool parens = !tail;
                    if (parens) os << '(';
                    os << "if ";
                    print(os, *n.cond, 1, false);
                    os << " then ";
                    print(os, *n.then_branch, 1, false);
                    os << " else ";
                    print(os, *n.else_branch, 1, true);
                    if (parens) os << ')';
                } else if constexpr (std::is_same_v<T, ArrowExpr>) {
                    const bool parens = required > 1;
                    if (parens) os << '(';
                    print(os, *n.init, 2, false);
                    os << " -> ";
                    print(os, *n.rest, 1, parens || tail);
                    if (parens) os << ')';
                } else if constexpr (std::is_same_v<T, CallExpr>) {
                    os << n.callee << '(';
                    for (std::size_t i = 0; i < n.args.size(); ++i) {
                        if (i) os << ", ";
                        print(os, n.args[i], 1, true);
                    }
                    os << ')';
                    if (n.every) {
                        os << " every ";
                        print(os, *n.every, 9, false);
                    }
                } else if constexpr (std::is_same_v<T, WhenExpr>) {
                    const bool parens = required > 2;
                    if (parens) os << '(';
                    print(os, *n.operand, 2, false);
                    os << " when " << n.ctor << '(' << n.clock_var << ')';
                    if (parens) os << ')';
                } else if constexpr (std::is_same_v<T, MergeExpr>) {
                    const bool parens = !tail;
                    if (parens) os << '(';
                    os << "merge " << n.clock_var;
                    for (const auto& [ctor, branch] : n.branches) {
                        os << " (" << ctor << " -> ";
                        print(os, branch, 1, true);
                        os << ')';
                    }
                    if (parens) os << ')';
                } else {
                    static_assert(std::is_same_v<T, TupleExpr>);
                    os << '(';
                    for (std::size_t i = 0; i < n.elems.size(); ++i) {
                        if (i) os << ", ";
                        print(os, n.elems[i], 1, true);
                    }
                    os << ')';
                }
            },
            e.node);
    }

private:
    void print_unary(std::ostream& os, const UnaryExpr& n, int required, bool tail) {
        if (n.op == UnaryOp::Not) {
            const bool parens = required > 5;
            if (parens) os << '(';
            os << "not ";
            print(os, *n.operand, 5, !parens && tail);
            if (parens) os << ')';
            return;
        }
        const bool parens = required > 9;
        if (parens) os << '(';
        os << (n.op == UnaryOp::Neg ? "-" : "pre ");
        print(os, *n.operand, 9, !parens && tail);
        if (parens) os << ')';
    }

    void print_binary(std::ostream& os, const BinaryExpr& n, int required, bool tail) {
        const int prec = binary_prec(n.op);
        const bool parens = required > prec;
        if (parens) os << '(';
        print(os, *n.lhs, prec, false);
        os << ' ' << binary_op_symbol(n.op) << ' ';
        print(os, *n.rhs, prec + 1, !parens && tail);
        if (parens) os << ')';
    }
};

void print_decl_list(std::ostream& os, const std::vector<VarDecl>& decls) {
    for (std::size_t i = 0; i < decls.size(); ++i) {
        if (i) os << "; ";
        const auto& v = decls[i];
        os << v.name << ": ";
        switch (v.type.kind) {
            case TypeExprRef::Kind::Bool: os << "bool"; break;
            case TypeExprRef::Kind::Int: os << "int"; break;
            case TypeExprRef::Kind::Real: os << "real"; break;
            case TypeExprRef::Kind::Named: os << v.type.name; break;
        }
        if (v.is_clock) os << " clock";
    }
}

void print_equation(std::ostream& os, const Equation& eq, const std::string& indent) {
    os << indent;
    if (eq.targets.size() > 1) {
        os << '(';
        for (std::size_t i = 0; i < eq.targets.size(); ++i) {
            if (i) os << ", ";
            os << eq.targets[i];
        }
        os << ')';
    } else {
        os << eq.targets.front();
    }
    os << " = ";
    ExprPrinter().print(os, eq.rhs, 1, true);
    os << ";\n";
}

void print_transition(std::ostream& os, const Transition& t, const char* keyword,
                      const std::string& indent) {
    os << indent << keyword << ' ';
    ExprPrinter().print(os, t.guard, 1, true);
    if (!t.target.empty()) {
        os << (t.is_restart ? " restart " : " resume ") << t.target;
    }
    os << '\n';
}

void print_automaton(std::ostream& os, const AutomatonDecl& aut, int depth);

void print_body(std::ostream& os, const std::vector<Equation>& equations,
                const std::vector<AutomatonDecl>& automata, int depth) {
    const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    for (const auto& eq : equations) print_equation(os, eq, indent);
    for (const auto& aut : automata) print_automaton(os, aut, depth);
}

void print_automaton(std::ostream& os, const AutomatonDecl& aut, int depth) {
    const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    os << indent << "automaton " << aut.name << '\n';
    for (const auto& state : aut.states) {
        os << indent << "state " << state.name << ":\n";
        for (const auto& t : state.strong_transitions) print_transition(os, t, "unless", indent);
        if (!state.locals.empty()) {
            os << indent << "var ";
            print_decl_list(os, state.locals);
            os << ";\n";
        }
        os << indent << "let\n";
        print_body(os, state.equations, state.automata, depth + 1);
        os << indent << "tel\n";
        for (const auto& t : state.weak_transitions) print_transition(os, t, "until", indent);
    }
}

}  // namespace

std::string print_expr(const Expr& expr) {
    std::ostringstream os;
    ExprPrinter().print(os, expr, 1, true);
    return os.str();
}

std::string pretty_print(const NodeDecl& node) {
    std::ostringstream os;
    os << (node.is_function ? "function " : "node ") << node.name << " (";
    print_decl_list(os, node.inputs);
    os << ") returns (";
    print_decl_list(os, node.outputs);
    os << ");\n";
    if (!node.locals.empty()) {
        os << "var ";
        print_decl_list(os, node.locals);
        os << ";\n";
    }
    os << "let\n";
    print_body(os, node.equations, node.automata, 1);
    os << "tel\n";
    return os.str();
}

std::string pretty_print(const Program& program) {
    std::ostringstream os;
    bool first = true;
    for (const auto& decl : program.type_decls) {
        os << "type " << decl.name << " = enum { ";
        for (std::size_t i = 0; i < decl.ctors.size(); ++i) {
            if (i) os << ", ";
            os << decl.ctors[i];
        }
        os << " };\n";
        first = false;
    }
    for (const auto& node : program.nodes) {
        if (!first) os << '\n';
        os << pretty_print(node);
        first = false;
    }
    return os.str();
}

}  // namespace l2h
