// SPDX-License-Identifier: Apache-2.0
//
// Lexer, parser and pretty-printer tests, including the round-trip
// property over the whole corpus.

#include <gtest/gtest.h>

#include "l2h/lexer.hpp"
#include "l2h/parser.hpp"
#include "l2h/printer.hpp"
#include "test_util.hpp"

using namespace l2h;
using l2h::test::parse_ok;
using l2h::test::read_corpus;

namespace {

std::vector<Token> lex_ok(const std::string& text) {
    Diagnostics diags;
    auto tokens = tokenize(text, diags);
    EXPECT_TRUE(tokens) << diags.render_all("<test>");
    return tokens ? *tokens : std::vector<Token>{};
}

}  // namespace

TEST(lexer, keywords_and_literals) {
    auto tokens = lex_ok("pre y + 1");
    ASSERT_EQ(tokens.size(), 5u);  // incl. EOF
    EXPECT_EQ(tokens[0].kind, TokenKind::KwPre);
    EXPECT_EQ(tokens[1].kind, TokenKind::Ident);
    EXPECT_EQ(tokens[1].text, "y");
    EXPECT_EQ(tokens[2].kind, TokenKind::Plus);
    EXPECT_EQ(tokens[3].kind, TokenKind::IntLit);
    EXPECT_EQ(tokens[3].text, "1");
}

TEST(lexer, automaton_keyword) {
    auto tokens = lex_ok("automaton four_states");
    ASSERT_GE(tokens.size(), 2u);
    EXPECT_EQ(tokens[0].kind, TokenKind::KwAutomaton);
    EXPECT_EQ(tokens[1].kind, TokenKind::Ident);
    EXPECT_EQ(tokens[1].text, "four_states");
}

TEST(lexer, illegal_character_position) {
    Diagnostics diags;
    auto tokens = tokenize("x @ y", diags);
    EXPECT_FALSE(tokens);
    ASSERT_EQ(diags.items().size(), 1u);
    EXPECT_EQ(diags.items()[0].code, DiagCode::Lex);
    EXPECT_EQ(diags.items()[0].loc.line, 1);
    EXPECT_EQ(diags.items()[0].loc.column, 3);
}

TEST(lexer, comments_and_positions) {
    auto tokens = lex_ok("a -- comment ->\nb");
    ASSERT_EQ(tokens.size(), 3u);
    EXPECT_EQ(tokens[1].text, "b");
    EXPECT_EQ(tokens[1].loc.line, 2);
    EXPECT_EQ(tokens[1].loc.column, 1);
}

TEST(lexer, operators) {
    auto tokens = lex_ok("<> <= >= -> && || < > = + - * /");
    std::vector<TokenKind> kinds;
    for (const auto& t : tokens) kinds.push_back(t.kind);
    const std::vector<TokenKind> expected = {
        TokenKind::NotEqual, TokenKind::LessEq,  TokenKind::GreaterEq, TokenKind::Arrow,
        TokenKind::AmpAmp,   TokenKind::BarBar,  TokenKind::Less,      TokenKind::Greater,
        TokenKind::Equal,    TokenKind::Plus,    TokenKind::Minus,     TokenKind::Star,
        TokenKind::Slash,    TokenKind::EndOfFile};
    EXPECT_EQ(kinds, expected);
}

TEST(parser, stopwatch_program) {
    Program p = parse_ok(read_corpus("stopwatch.lus"));
    ASSERT_EQ(p.type_decls.size(), 1u);
    EXPECT_EQ(p.type_decls[0].name, "run_mode");
    EXPECT_EQ(p.type_decls[0].ctors, (std::vector<std::string>{"Start", "Stop"}));
    ASSERT_EQ(p.nodes.size(), 3u);
    EXPECT_TRUE(p.nodes[0].is_function);
    EXPECT_EQ(p.nodes[0].name, "switch");
    EXPECT_FALSE(p.nodes[1].is_function);
    EXPECT_FALSE(p.nodes[2].is_function);
    EXPECT_EQ(p.nodes[2].name, "stopwatch");
    ASSERT_EQ(p.nodes[2].locals.size(), 1u);
    EXPECT_TRUE(p.nodes[2].locals[0].is_clock);
}

TEST(parser, four_state_automaton) {
    Program p = parse_ok(read_corpus("auto.lus"));
    ASSERT_EQ(p.nodes.size(), 1u);
    const NodeDecl& node = p.nodes[0];
    ASSERT_EQ(node.automata.size(), 1u);
    const AutomatonDecl& aut = node.automata[0];
    EXPECT_EQ(aut.name, "four_states");
    ASSERT_EQ(aut.states.size(), 4u);
    for (const auto& state : aut.states) {
        EXPECT_EQ(state.strong_transitions.size(), 0u);
        ASSERT_EQ(state.weak_transitions.size(), 1u);
        EXPECT_TRUE(state.weak_transitions[0].is_restart);
        EXPECT_TRUE(state.weak_transitions[0].guard.is<BoolLitExpr>());
    }
    EXPECT_EQ(aut.states[0].weak_transitions[0].target, "Two");
    EXPECT_EQ(aut.states[3].weak_transitions[0].target, "One");
}

TEST(parser, unless_before_state_attaches_to_it) {
    Program p = parse_ok(read_corpus("solution.lus"));
    const AutomatonDecl& aut = p.nodes[0].automata[0];
    ASSERT_EQ(aut.states.size(), 2u);
    EXPECT_EQ(aut.states[0].name, "OK");
    ASSERT_EQ(aut.states[0].strong_transitions.size(), 1u);
    EXPECT_FALSE(aut.states[0].strong_transitions[0].is_restart);
    EXPECT_EQ(aut.states[0].strong_transitions[0].target, "KO");
    ASSERT_EQ(aut.states[1].strong_transitions.size(), 1u);
    EXPECT_EQ(aut.states[1].strong_transitions[0].target, "OK");
}

TEST(parser, transition_without_target_self_loops) {
    Program p = parse_ok(read_corpus("triangle.lus"));
    const StateDecl& one = p.nodes[0].automata[0].states[0];
    ASSERT_EQ(one.strong_transitions.size(), 1u);
    EXPECT_TRUE(one.strong_transitions[0].target.empty());
    EXPECT_TRUE(one.strong_transitions[0].is_restart);
}

TEST(parser, duplicate_definition_error) {
    Diagnostics diags;
    auto p = parse_text("node n() returns (o:int); let o = 1; o = 2; tel", diags);
    EXPECT_FALSE(p);
    EXPECT_TRUE(diags.has_error(DiagCode::DupDef));
}

TEST(parser, unknown_state_target) {
    Diagnostics diags;
    auto p = parse_text(
        "node n(x: bool) returns (o:int);\n"
        "let\n"
        "  automaton a\n"
        "  state S:\n"
        "  let o = 1; tel until x restart Missing\n"
        "tel",
        diags);
    EXPECT_FALSE(p);
    EXPECT_TRUE(diags.has_error(DiagCode::UnknownState));
}

TEST(parser, syntax_error_carries_position) {
    Diagnostics diags;
    auto p = parse_text("node n() returns (o:int);\nlet o = ; tel", diags);
    EXPECT_FALSE(p);
    ASSERT_FALSE(diags.items().empty());
    EXPECT_EQ(diags.items()[0].loc.line, 2);
    EXPECT_GT(diags.items()[0].loc.column, 0);
}

TEST(parser, reserved_prefix_rejected) {
    Diagnostics diags;
    auto p = parse_text("node n() returns (__o:int); let __o = 1; tel", diags);
    EXPECT_FALSE(p);
}

TEST(parser, precedence) {
    Program p = parse_ok("node n(a: int; r: bool) returns (o:bool);\nlet o = r || pre a = 100; tel");
    const Expr& rhs = p.nodes[0].equations[0].rhs;
    // r || ((pre a) = 100)
    ASSERT_TRUE(rhs.is<BinaryExpr>());
    EXPECT_EQ(rhs.as<BinaryExpr>().op, BinaryOp::Or);
    const Expr& cmp = *rhs.as<BinaryExpr>().rhs;
    ASSERT_TRUE(cmp.is<BinaryExpr>());
    EXPECT_EQ(cmp.as<BinaryExpr>().op, BinaryOp::Eq);
    EXPECT_TRUE(cmp.as<BinaryExpr>().lhs->is<UnaryExpr>());
}

TEST(parser, arrow_binds_weakest) {
    Program p = parse_ok("node n(z: int) returns (o:int);\nlet o = 0 -> pre o + 1; tel");
    const Expr& rhs = p.nodes[0].equations[0].rhs;
    ASSERT_TRUE(rhs.is<ArrowExpr>());
    EXPECT_TRUE(rhs.as<ArrowExpr>().rest->is<BinaryExpr>());
}

TEST(printer, round_trip_corpus) {
    for (const char* name : {"stopwatch.lus", "cpt_foo.lus", "failure.lus", "solution.lus",
                             "triangle.lus", "auto.lus", "greycounter.lus", "intloopcounter.lus",
                             "counters3.lus"}) {
        Program original = parse_ok(read_corpus(name));
        const std::string printed = pretty_print(original);
        Program reparsed = parse_ok(printed);
        EXPECT_TRUE(program_equal(original, reparsed)) << name << ":\n" << printed;
    }
}

TEST(printer, empty_body_round_trips) {
    Program p = parse_ok("node n(x: bool) returns (o:int); let o = 1; tel");
    p.nodes[0].equations.clear();
    p.nodes[0].outputs.clear();
    const std::string printed = pretty_print(p);
    EXPECT_NE(printed.find("let"), std::string::npos);
    EXPECT_NE(printed.find("tel"), std::string::npos);
    Program reparsed = parse_ok(printed);
    EXPECT_TRUE(program_equal(p, reparsed));
}

TEST(printer, parenthesization_round_trips) {
    // Constructs that need parentheses to re-parse equal.
    const char* text =
        "node n(a: int; b: int; c: bool) returns (o:int; q: bool);\n"
        "let\n"
        "  o = (if c then a else b) * 2 - (a - (b - 1));\n"
        "  q = not (c and (true -> c)) or c;\n"
        "tel";
    Program original = parse_ok(text);
    Program reparsed = parse_ok(pretty_print(original));
    EXPECT_TRUE(program_equal(original, reparsed)) << pretty_print(original);
}
