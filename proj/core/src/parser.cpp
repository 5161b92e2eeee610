// SPDX-License-Identifier: Apache-2.0
#include "l2h/parser.hpp"

#include <set>
#include <string>
#include <utility>

namespace l2h {

namespace {

class Parser {
public:
    Parser(const std::vector<Token>& tokens, Diagnostics& diags)
        : tokens_(tokens), diags_(diags) {}

    std::optional<Program> run() {
        Program program;
        while (!at(TokenKind::EndOfFile)) {
            if (at(TokenKind::KwType)) {
                if (!parse_type_decl(program)) return std::nullopt;
            } else if (at(TokenKind::KwNode) || at(TokenKind::KwFunction)) {
                if (!parse_node(program)) return std::nullopt;
            } else {
                error("expected 'type', 'node' or 'function'");
                return std::nullopt;
            }
        }
        if (!validate(program)) return std::nullopt;
        return program;
    }

private:
    const std::vector<Token>& tokens_;
    Diagnostics& diags_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t idx = pos_ + ahead;
        return idx < tokens_.size() ? tokens_[idx] : tokens_.back();
    }
    bool at(TokenKind kind, std::size_t ahead = 0) const { return peek(ahead).kind == kind; }
    const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    void error(const std::string& message) {
        diags_.error(DiagCode::Parse, peek().loc, message);
    }

    bool expect(TokenKind kind, const char* what) {
        if (!at(kind)) {
            error(std::string("expected ") + what + ", found " + token_kind_name(peek().kind));
            return false;
        }
        advance();
        return true;
    }

    std::optional<std::string> expect_ident(const char* what) {
        if (!at(TokenKind::Ident)) {
            error(std::string("expected ") + what + ", found " + token_kind_name(peek().kind));
            return std::nullopt;
        }
        const Token& tok = advance();
        if (tok.text.rfind(kReservedPrefix, 0) == 0) {
            diags_.error(DiagCode::Parse, tok.loc,
                         "identifier '" + tok.text + "' uses the reserved '__' prefix");
            return std::nullopt;
        }
        return tok.text;
    }

    // -- declarations --------------------------------------------------------

    bool parse_type_decl(Program& program) {
        EnumDecl decl;
        decl.loc = peek().loc;
        advance();  // type
        auto name = expect_ident("type name");
        if (!name) return false;
        decl.name = *name;
        if (!expect(TokenKind::Equal, "'='")) return false;
        if (!expect(TokenKind::KwEnum, "'enum'")) return false;
        if (!expect(TokenKind::LBrace, "'{'")) return false;
        while (true) {
            auto ctor = expect_ident("enum constructor");
            if (!ctor) return false;
            decl.ctors.push_back(*ctor);
            if (at(TokenKind::Comma)) {
                advance();
                continue;
            }
            break;
        }
        if (!expect(TokenKind::RBrace, "'}'")) return false;
        if (!expect(TokenKind::Semicolon, "';'")) return false;
        program.type_decls.push_back(std::move(decl));
        return true;
    }

    std::optional<TypeExprRef> parse_type_ref() {
        TypeExprRef ref;
        if (at(TokenKind::KwBool)) {
            advance();
            ref.kind = TypeExprRef::Kind::Bool;
        } else if (at(TokenKind::KwInt)) {
            advance();
            ref.kind = TypeExprRef::Kind::Int;
        } else if (at(TokenKind::KwReal)) {
            advance();
            ref.kind = TypeExprRef::Kind::Real;
        } else if (at(TokenKind::Ident)) {
            ref.kind = TypeExprRef::Kind::Named;
            ref.name = advance().text;
        } else {
            error("expected a type");
            return std::nullopt;
        }
        return ref;
    }

    // names : type [clock]
    bool parse_decl_group(std::vector<VarDecl>& out) {
        std::vector<std::pair<std::string, SourceLoc>> names;
        while (true) {
            const SourceLoc loc = peek().loc;
            auto name = expect_ident("variable name");
            if (!name) return false;
            names.emplace_back(*name, loc);
            if (at(TokenKind::Comma)) {
                advance();
                continue;
            }
            break;
        }
        if (!expect(TokenKind::Colon, "':'")) return false;
        auto type = parse_type_ref();
        if (!type) return false;
        bool is_clock = false;
        if (at(TokenKind::KwClock)) {
            advance();
            is_clock = true;
        }
        for (auto& [name, loc] : names) out.push_back({name, *type, is_clock, loc});
        return true;
    }

    // '(' group (';' group)* ')'   -- empty list allowed
    bool parse_param_list(std::vector<VarDecl>& out) {
        if (!expect(TokenKind::LParen, "'('")) return false;
        if (at(TokenKind::RParen)) {
            advance();
            return true;
        }
        while (true) {
            if (!parse_decl_group(out)) return false;
            if (at(TokenKind::Semicolon)) {
                advance();
                continue;
            }
            break;
        }
        return expect(TokenKind::RParen, "')'");
    }

    // 'var' (group ';')+  -- runs until 'let'
    bool parse_var_section(std::vector<VarDecl>& out) {
        advance();  // var
        while (!at(TokenKind::KwLet)) {
            if (!parse_decl_group(out)) return false;
            if (!expect(TokenKind::Semicolon, "';'")) return false;
        }
        return true;
    }

    bool parse_node(Program& program) {
        NodeDecl node;
        node.loc = peek().loc;
        node.is_function = at(TokenKind::KwFunction);
        advance();  // node | function
        auto name = expect_ident("node name");
        if (!name) return false;
        node.name = *name;
        if (!parse_param_list(node.inputs)) return false;
        if (!expect(TokenKind::KwReturns, "'returns'")) return false;
        if (!parse_param_list(node.outputs)) return false;
        if (at(TokenKind::Semicolon)) advance();
        if (at(TokenKind::KwVar)) {
            if (!parse_var_section(node.locals)) return false;
        }
        if (!expect(TokenKind::KwLet, "'let'")) return false;
        if (!parse_body_items(node.equations, node.automata)) return false;
        if (!expect(TokenKind::KwTel, "'tel'")) return false;
        if (at(TokenKind::Semicolon)) advance();
        program.nodes.push_back(std::move(node));
        return true;
    }

    bool parse_body_items(std::vector<Equation>& equations, std::vector<AutomatonDecl>& automata) {
        while (!at(TokenKind::KwTel)) {
            if (at(TokenKind::KwAutomaton)) {
                auto aut = parse_automaton();
                if (!aut) return false;
                automata.push_back(std::move(*aut));
            } else if (at(TokenKind::Ident) || at(TokenKind::LParen)) {
                auto eq = parse_equation();
                if (!eq) return false;
                equations.push_back(std::move(*eq));
            } else {
                error("expected an equation, an automaton or 'tel'");
                return false;
            }
        }
        return true;
    }

    std::optional<Equation> parse_equation() {
        Equation eq;
        eq.loc = peek().loc;
        const bool parenthesized = at(TokenKind::LParen);
        if (parenthesized) advance();
        while (true) {
            auto name = expect_ident("equation target");
            if (!name) return std::nullopt;
            eq.targets.push_back(*name);
            if (at(TokenKind::Comma)) {
                advance();
                continue;
            }
            break;
        }
        if (parenthesized && !expect(TokenKind::RParen, "')'")) return std::nullopt;
        if (!expect(TokenKind::Equal, "'='")) return std::nullopt;
        auto rhs = parse_expr();
        if (!rhs) return std::nullopt;
        eq.rhs = std::move(*rhs);
        if (!expect(TokenKind::Semicolon, "';'")) return std::nullopt;
        return eq;
    }

    // Transitions may be written before 'state S:' (attaching to that state)
    // or between the state header and the body; both attach to that state.
    std::optional<AutomatonDecl> parse_automaton() {
        AutomatonDecl aut;
        aut.loc = peek().loc;
        advance();  // automaton
        auto name = expect_ident("automaton name");
        if (!name) return std::nullopt;
        aut.name = *name;

        std::vector<Transition> pending_strong;
        while (true) {
            while (at(TokenKind::KwUnless)) {
                auto t = parse_transition();
                if (!t) return std::nullopt;
                pending_strong.push_back(std::move(*t));
            }
            if (!at(TokenKind::KwState)) break;
            StateDecl state;
            state.loc = peek().loc;
            advance();  // state
            auto state_name = expect_ident("state name");
            if (!state_name) return std::nullopt;
            state.name = *state_name;
            if (!expect(TokenKind::Colon, "':'")) return std::nullopt;
            state.strong_transitions = std::move(pending_strong);
            pending_strong.clear();
            while (at(TokenKind::KwUnless)) {
                auto t = parse_transition();
                if (!t) return std::nullopt;
                state.strong_transitions.push_back(std::move(*t));
            }
            if (at(TokenKind::KwVar)) {
                if (!parse_var_section(state.locals)) return std::nullopt;
            }
            if (!expect(TokenKind::KwLet, "'let'")) return std::nullopt;
            if (!parse_body_items(state.equations, state.automata)) return std::nullopt;
            if (!expect(TokenKind::KwTel, "'tel'")) return std::nullopt;
            while (at(TokenKind::KwUntil)) {
                auto t = parse_transition();
                if (!t) return std::nullopt;
                state.weak_transitions.push_back(std::move(*t));
            }
            aut.states.push_back(std::move(state));
        }
        if (!pending_strong.empty()) {
            error("'unless' clause is not followed by a state");
            return std::nullopt;
        }
        if (aut.states.empty()) {
            diags_.error(DiagCode::Parse, aut.loc,
                         "automaton '" + aut.name + "' declares no state");
            return std::nullopt;
        }
        return aut;
    }

    // guard [('restart'|'resume') target]; a bare guard self-loops with restart.
    std::optional<Transition> parse_transition() {
        Transition t;
        t.loc = peek().loc;
        advance();  // unless | until
        auto guard = parse_expr();
        if (!guard) return std::nullopt;
        t.guard = std::move(*guard);
        if (at(TokenKind::KwRestart) || at(TokenKind::KwResume)) {
            t.is_restart = at(TokenKind::KwRestart);
            advance();
            auto target = expect_ident("transition target state");
            if (!target) return std::nullopt;
            t.target = *target;
        }
        return t;
    }

    // -- expressions ----------------------------------------------------------
    //
    // Precedence, loosest first:  ->  when  or/xor  and  not  comparisons
    // + -  * /  unary -/pre  primary. 'pre' binds tighter than any binary
    // operator; '->' is right associative.

    std::optional<Expr> parse_expr() { return parse_arrow(); }

    std::optional<Expr> parse_arrow() {
        auto lhs = parse_when();
        if (!lhs) return std::nullopt;
        if (at(TokenKind::Arrow)) {
            const SourceLoc loc = peek().loc;
            advance();
            auto rhs = parse_arrow();
            if (!rhs) return std::nullopt;
            return Expr(ArrowExpr{box(std::move(*lhs)), box(std::move(*rhs))}, loc);
        }
        return lhs;
    }

    std::optional<Expr> parse_when() {
        auto operand = parse_or();
        if (!operand) return std::nullopt;
        while (at(TokenKind::KwWhen)) {
            const SourceLoc loc = peek().loc;
            advance();
            auto ctor = expect_ident("clock constructor");
            if (!ctor) return std::nullopt;
            if (!expect(TokenKind::LParen, "'('")) return std::nullopt;
            auto clock_var = expect_ident("clock variable");
            if (!clock_var) return std::nullopt;
            if (!expect(TokenKind::RParen, "')'")) return std::nullopt;
            *operand = Expr(WhenExpr{box(std::move(*operand)), *ctor, *clock_var}, loc);
        }
        return operand;
    }

    std::optional<Expr> parse_or() {
        auto lhs = parse_and();
        if (!lhs) return std::nullopt;
        while (at(TokenKind::KwOr) || at(TokenKind::BarBar) || at(TokenKind::KwXor)) {
            const BinaryOp op = at(TokenKind::KwXor) ? BinaryOp::Xor : BinaryOp::Or;
            const SourceLoc loc = peek().loc;
            advance();
            auto rhs = parse_and();
            if (!rhs) return std::nullopt;
            *lhs = Expr(BinaryExpr{op, box(std::move(*lhs)), box(std::move(*rhs))}, loc);
        }
        return lhs;
    }

    std::optional<Expr> parse_and() {
        auto lhs = parse_not();
        if (!lhs) return std::nullopt;
        while (at(TokenKind::KwAnd) || at(TokenKind::AmpAmp)) {
            const SourceLoc loc = peek().loc;
            advance();
            auto rhs = parse_not();
            if (!rhs) return std::nullopt;
            *lhs = Expr(BinaryExpr{BinaryOp::And, box(std::move(*lhs)), box(std::move(*rhs))}, loc);
        }
        return lhs;
    }

    std::optional<Expr> parse_not() {
        if (at(TokenKind::KwNot)) {
            const SourceLoc loc = peek().loc;
            advance();
            auto operand = parse_not();
            if (!operand) return std::nullopt;
            return Expr(UnaryExpr{UnaryOp::Not, box(std::move(*operand))}, loc);
        }
        return parse_comparison();
    }

    std::optional<Expr> parse_comparison() {
        auto lhs = parse_additive();
        if (!lhs) return std::nullopt;
        BinaryOp op;
        if (at(TokenKind::Equal)) {
            op = BinaryOp::Eq;
        } else if (at(TokenKind::NotEqual)) {
            op = BinaryOp::Neq;
        } else if (at(TokenKind::Less)) {
            op = BinaryOp::Lt;
        } else if (at(TokenKind::LessEq)) {
            op = BinaryOp::Le;
        } else if (at(TokenKind::Greater)) {
            op = BinaryOp::Gt;
        } else if (at(TokenKind::GreaterEq)) {
            op = BinaryOp::Ge;
        } else {
            return lhs;
        }
        const SourceLoc loc = peek().loc;
        advance();
        auto rhs = parse_additive();
        if (!rhs) return std::nullopt;
        return Expr(BinaryExpr{op, box(std::move(*lhs)), box(std::move(*rhs))}, loc);
    }

    std::optional<Expr> parse_additive() {
        auto lhs = parse_multiplicative();
        if (!lhs) return std::nullopt;
        while (at(TokenKind::Plus) || at(TokenKind::Minus)) {
            const BinaryOp op = at(TokenKind::Plus) ? BinaryOp::Add : BinaryOp::Sub;
            const SourceLoc loc = peek().loc;
            advance();
            auto rhs = parse_multiplicative();
            if (!rhs) return std::nullopt;
            *lhs = Expr(BinaryExpr{op, box(std::move(*lhs)), box(std::move(*rhs))}, loc);
        }
        return lhs;
    }

    std::optional<Expr> parse_multiplicative() {
        auto lhs = parse_unary();
        if (!lhs) return std::nullopt;
        while (at(TokenKind::Star) || at(TokenKind::Slash)) {
            const BinaryOp op = at(TokenKind::Star) ? BinaryOp::Mul : BinaryOp::Div;
            const SourceLoc loc = peek().loc;
            advance();
            auto rhs = parse_unary();
            if (!rhs) return std::nullopt;
            *lhs = Expr(BinaryExpr{op, box(std::move(*lhs)), box(std::move(*rhs))}, loc);
        }
        return lhs;
    }

    std::optional<Expr> parse_unary() {
        if (at(TokenKind::Minus) || at(TokenKind::KwPre)) {
            const UnaryOp op = at(TokenKind::Minus) ? UnaryOp::Neg : UnaryOp::Pre;
            const SourceLoc loc = peek().loc;
            advance();
            auto operand = parse_unary();
            if (!operand) return std::nullopt;
            return Expr(UnaryExpr{op, box(std::move(*operand))}, loc);
        }
        return parse_primary();
    }

    std::optional<Expr> parse_primary() {
        const SourceLoc loc = peek().loc;
        if (at(TokenKind::KwTrue) || at(TokenKind::KwFalse)) {
            const bool value = at(TokenKind::KwTrue);
            advance();
            return make_bool(value, loc);
        }
        if (at(TokenKind::IntLit)) {
            return make_int(std::stoll(advance().text), loc);
        }
        if (at(TokenKind::RealLit)) {
            const Token& tok = advance();
            return Expr(RealLitExpr{std::stod(tok.text), tok.text}, loc);
        }
        if (at(TokenKind::KwIf)) {
            advance();
            auto cond = parse_expr();
            if (!cond) return std::nullopt;
            if (!expect(TokenKind::KwThen, "'then'")) return std::nullopt;
            auto then_branch = parse_expr();
            if (!then_branch) return std::nullopt;
            if (!expect(TokenKind::KwElse, "'else'")) return std::nullopt;
            auto else_branch = parse_expr();
            if (!else_branch) return std::nullopt;
            return Expr(IteExpr{box(std::move(*cond)), box(std::move(*then_branch)),
                                box(std::move(*else_branch))},
                        loc);
        }
        if (at(TokenKind::KwMerge)) return parse_merge();
        if (at(TokenKind::Ident)) {
            auto name = expect_ident("identifier");
            if (!name) return std::nullopt;
            if (at(TokenKind::LParen)) {
                advance();
                CallExpr call;
                call.callee = *name;
                if (!at(TokenKind::RParen)) {
                    while (true) {
                        auto arg = parse_expr();
                        if (!arg) return std::nullopt;
                        call.args.push_back(std::move(*arg));
                        if (at(TokenKind::Comma)) {
                            advance();
                            continue;
                        }
                        break;
                    }
                }
                if (!expect(TokenKind::RParen, "')'")) return std::nullopt;
                if (at(TokenKind::KwEvery)) {
                    advance();
                    auto cond = parse_unary();
                    if (!cond) return std::nullopt;
                    call.every = box(std::move(*cond));
                }
                return Expr(std::move(call), loc);
            }
            return make_var(*name, loc);
        }
        if (at(TokenKind::LParen)) {
            advance();
            std::vector<Expr> elems;
            while (true) {
                auto e = parse_expr();
                if (!e) return std::nullopt;
                elems.push_back(std::move(*e));
                if (at(TokenKind::Comma)) {
                    advance();
                    continue;
                }
                break;
            }
            if (!expect(TokenKind::RParen, "')'")) return std::nullopt;
            if (elems.size() == 1) return std::move(elems.front());
            return make_tuple(std::move(elems), loc);
        }
        error(std::string("expected an expression, found ") + token_kind_name(peek().kind));
        return std::nullopt;
    }

    // merge clk (C1 -> e1) ... (Cn -> en); branches recognized by the
    // '(' IDENT '->' prefix.
    std::optional<Expr> parse_merge() {
        const SourceLoc loc = peek().loc;
        advance();  // merge
        auto clock_var = expect_ident("merge clock variable");
        if (!clock_var) return std::nullopt;
        MergeExpr merge;
        merge.clock_var = *clock_var;
        while (at(TokenKind::LParen) && at(TokenKind::Ident, 1) && at(TokenKind::Arrow, 2)) {
            advance();  // (
            const std::string ctor = advance().text;
            advance();  // ->
            auto branch = parse_expr();
            if (!branch) return std::nullopt;
            if (!expect(TokenKind::RParen, "')'")) return std::nullopt;
            merge.branches.emplace_back(ctor, std::move(*branch));
        }
        if (merge.branches.empty()) {
            diags_.error(DiagCode::Parse, loc, "merge has no branches");
            return std::nullopt;
        }
        return Expr(std::move(merge), loc);
    }

    // -- post-parse structural validation -------------------------------------

    void collect_automaton_writes(const AutomatonDecl& aut, std::set<std::string>& out) {
        for (const auto& state : aut.states) {
            std::set<std::string> local_names;
            for (const auto& v : state.locals) local_names.insert(v.name);
            for (const auto& eq : state.equations) {
                for (const auto& target : eq.targets) {
                    if (!local_names.count(target)) out.insert(target);
                }
            }
            for (const auto& nested : state.automata) {
                std::set<std::string> nested_writes;
                collect_automaton_writes(nested, nested_writes);
                for (const auto& w : nested_writes) {
                    if (!local_names.count(w)) out.insert(w);
                }
            }
        }
    }

    bool check_duplicate_defs(const NodeDecl& node, const std::vector<Equation>& equations,
                              const std::vector<AutomatonDecl>& automata, SourceLoc scope_loc) {
        bool ok = true;
        std::set<std::string> defined;
        auto define = [&](const std::string& name, SourceLoc loc) {
            if (!defined.insert(name).second) {
                diags_.error(DiagCode::DupDef, loc,
                             "variable '" + name + "' is defined more than once in node '" +
                                 node.name + "'");
                ok = false;
            }
        };
        for (const auto& eq : equations) {
            for (const auto& target : eq.targets) define(target, eq.loc);
        }
        for (const auto& aut : automata) {
            std::set<std::string> writes;
            collect_automaton_writes(aut, writes);
            for (const auto& w : writes) define(w, aut.loc);
        }
        (void)scope_loc;
        return ok;
    }

    bool validate_automaton(const NodeDecl& node, const AutomatonDecl& aut) {
        bool ok = true;
        std::set<std::string> state_names;
        for (const auto& state : aut.states) {
            if (!state_names.insert(state.name).second) {
                diags_.error(DiagCode::DupDef, state.loc,
                             "duplicate state '" + state.name + "' in automaton '" + aut.name + "'");
                ok = false;
            }
        }
        for (const auto& state : aut.states) {
            auto check_target = [&](const Transition& t) {
                if (!t.target.empty() && !state_names.count(t.target)) {
                    diags_.error(DiagCode::UnknownState, t.loc,
                                 "transition targets unknown state '" + t.target +
                                     "' in automaton '" + aut.name + "'");
                    ok = false;
                }
            };
            for (const auto& t : state.strong_transitions) check_target(t);
            for (const auto& t : state.weak_transitions) check_target(t);
            if (!check_duplicate_defs(node, state.equations, state.automata, state.loc)) ok = false;
            for (const auto& nested : state.automata) {
                if (!validate_automaton(node, nested)) ok = false;
            }
        }
        return ok;
    }

    bool validate(const Program& program) {
        bool ok = true;
        std::set<std::string> type_names;
        std::set<std::string> ctor_names;
        for (const auto& decl : program.type_decls) {
            if (!type_names.insert(decl.name).second) {
                diags_.error(DiagCode::DupDef, decl.loc, "duplicate type '" + decl.name + "'");
                ok = false;
            }
            for (const auto& ctor : decl.ctors) {
                if (!ctor_names.insert(ctor).second) {
                    diags_.error(DiagCode::DupDef, decl.loc,
                                 "enum constructor '" + ctor + "' is declared more than once");
                    ok = false;
                }
            }
        }
        std::set<std::string> node_names;
        for (const auto& node : program.nodes) {
            if (node.name == kArrowNode) {
                diags_.error(DiagCode::DupDef, node.loc,
                             "'arrow' is reserved for the builtin initialization node");
                ok = false;
            }
            if (!node_names.insert(node.name).second || type_names.count(node.name)) {
                diags_.error(DiagCode::DupDef, node.loc, "duplicate declaration '" + node.name + "'");
                ok = false;
            }
            std::set<std::string> var_names;
            auto declare = [&](const VarDecl& v) {
                if (!var_names.insert(v.name).second) {
                    diags_.error(DiagCode::DupDef, v.loc,
                                 "variable '" + v.name + "' is declared more than once in node '" +
                                     node.name + "'");
                    ok = false;
                }
            };
            for (const auto& v : node.inputs) declare(v);
            for (const auto& v : node.outputs) declare(v);
            for (const auto& v : node.locals) declare(v);
            if (!check_duplicate_defs(node, node.equations, node.automata, node.loc)) ok = false;
            std::set<std::string> automaton_names;
            for (const auto& aut : node.automata) {
                if (!automaton_names.insert(aut.name).second) {
                    diags_.error(DiagCode::DupDef, aut.loc,
                                 "duplicate automaton '" + aut.name + "' in node '" + node.name + "'");
                    ok = false;
                }
                if (!validate_automaton(node, aut)) ok = false;
            }
        }
        return ok;
    }
};

}  // namespace

std::optional<Program> parse_program(const std::vector<Token>& tokens, Diagnostics& diags) {
    return Parser(tokens, diags).run();
}

std::optional<Program> parse_text(std::string_view text, Diagnostics& diags) {
    auto tokens = tokenize(text, diags);
    if (!tokens) return std::nullopt;
    return parse_program(*tokens, diags);
}

}  // namespace l2h
