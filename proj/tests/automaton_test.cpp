// SPDX-License-Identifier: Apache-2.0
//
// Automaton-to-clocked-dataflow compilation: per-state variable sets, the
// generated strong-transition and handler nodes, and the rewired host.

#include <gtest/gtest.h>

#include "l2h/automaton.hpp"
#include "l2h/printer.hpp"
#include "test_util.hpp"

using namespace l2h;
using l2h::test::check_ok;
using l2h::test::expand_ok;
using l2h::test::read_corpus;

namespace {

const NodeDecl& find(const Program& p, const std::string& name) {
    const NodeDecl* node = p.find_node(name);
    if (!node) throw std::runtime_error("node not found: " + name);
    return *node;
}

}  // namespace

TEST(var_sets, counter_state_four) {
    auto checked = check_ok(read_corpus("auto.lus"));
    const NodeDecl& node = checked.program.nodes[0];
    const StateDecl& four = node.automata[0].states[3];
    ASSERT_EQ(four.name, "Four");
    StateVarSets sets = collect_var_sets(four, node);
    EXPECT_TRUE(sets.read_eqs.empty());
    EXPECT_EQ(sets.write_eqs, (std::set<std::string>{"out"}));
    EXPECT_TRUE(sets.read_unless.empty());
    EXPECT_TRUE(sets.read_until.empty());
}

TEST(var_sets, solution_state_ok_reads_and_writes) {
    auto checked = check_ok(read_corpus("solution.lus"));
    const NodeDecl& node = checked.program.nodes[0];
    const StateDecl& ok = node.automata[0].states[0];
    StateVarSets sets = collect_var_sets(ok, node);
    EXPECT_EQ(sets.read_eqs, (std::set<std::string>{"o2", "i"}));
    EXPECT_EQ(sets.write_eqs, (std::set<std::string>{"o1", "o2"}));
    EXPECT_EQ(sets.read_unless, (std::set<std::string>{"i"}));
}

TEST(var_sets, triangle_unless_reads_through_pre) {
    auto checked = check_ok(read_corpus("triangle.lus"));
    const NodeDecl& node = checked.program.nodes[0];
    StateVarSets sets = collect_var_sets(node.automata[0].states[0], node);
    EXPECT_EQ(sets.read_unless, (std::set<std::string>{"r", "o"}));
}

TEST(var_sets, state_locals_excluded) {
    auto checked = check_ok(
        "node n(x: int) returns (o:int);\n"
        "let\n"
        "  automaton a\n"
        "  state S:\n"
        "  var t: int;\n"
        "  let t = x + 1; o = t; tel\n"
        "tel");
    const NodeDecl& node = checked.program.nodes[0];
    StateVarSets sets = collect_var_sets(node.automata[0].states[0], node);
    EXPECT_EQ(sets.read_eqs, (std::set<std::string>{"x"}));
    EXPECT_EQ(sets.write_eqs, (std::set<std::string>{"o"}));
}

TEST(unless_node, no_strong_transition_passes_putative_state_through) {
    auto expanded = expand_ok(read_corpus("auto.lus"));
    const NodeDecl& node = find(expanded.program, "Four_unless");
    EXPECT_TRUE(node.is_function);
    ASSERT_EQ(node.inputs.size(), 2u);
    EXPECT_EQ(node.inputs[0].name, "restart_in");
    EXPECT_EQ(node.inputs[1].name, "state_in");
    ASSERT_EQ(node.equations.size(), 1u);
    EXPECT_EQ(node.equations[0].targets, (std::vector<std::string>{"restart_act", "state_act"}));
    const Expr& rhs = node.equations[0].rhs;
    ASSERT_TRUE(rhs.is<TupleExpr>());
    EXPECT_TRUE(rhs.as<TupleExpr>().elems[0].is<VarExpr>());
    EXPECT_EQ(rhs.as<TupleExpr>().elems[0].as<VarExpr>().name, "restart_in");
    EXPECT_EQ(rhs.as<TupleExpr>().elems[1].as<VarExpr>().name, "state_in");
}

TEST(unless_node, resume_maps_to_false) {
    auto expanded = expand_ok(read_corpus("solution.lus"));
    const NodeDecl& node = find(expanded.program, "KO_unless");
    // if i = 0 then (false, OK) else (restart_in, state_in)
    const Expr& rhs = node.equations[0].rhs;
    ASSERT_TRUE(rhs.is<IteExpr>());
    const auto& ite = rhs.as<IteExpr>();
    ASSERT_TRUE(ite.then_branch->is<TupleExpr>());
    const auto& then_tuple = ite.then_branch->as<TupleExpr>();
    ASSERT_TRUE(then_tuple.elems[0].is<BoolLitExpr>());
    EXPECT_FALSE(then_tuple.elems[0].as<BoolLitExpr>().value);
    ASSERT_TRUE(then_tuple.elems[1].is<EnumLitExpr>());
    EXPECT_EQ(then_tuple.elems[1].as<EnumLitExpr>().ctor, "OK");
}

TEST(unless_node, priority_follows_source_order) {
    auto expanded = expand_ok(
        "node n(g1: bool; g2: bool) returns (o:int);\n"
        "let\n"
        "  automaton a\n"
        "  state S:\n"
        "  unless g1 restart T\n"
        "  unless g2 resume T\n"
        "  let o = 1; tel\n"
        "  state T:\n"
        "  let o = 2; tel\n"
        "tel");
    const NodeDecl& node = find(expanded.program, "S_unless");
    const Expr& rhs = node.equations[0].rhs;
    ASSERT_TRUE(rhs.is<IteExpr>());
    const auto& outer = rhs.as<IteExpr>();
    EXPECT_EQ(outer.cond->as<VarExpr>().name, "g1");
    ASSERT_TRUE(outer.else_branch->is<IteExpr>());
    EXPECT_EQ(outer.else_branch->as<IteExpr>().cond->as<VarExpr>().name, "g2");
}

TEST(unless_node, guard_with_memory_makes_it_stateful) {
    auto expanded = expand_ok(read_corpus("guardy.lus"));
    const NodeDecl& unless_node = find(expanded.program, "A_unless");
    EXPECT_FALSE(unless_node.is_function);  // pre in the guard
    const NodeDecl& handler = find(expanded.program, "A_handler_until");
    EXPECT_TRUE(handler.is_function);
}

TEST(handler_node, four_restarts_one) {
    auto expanded = expand_ok(read_corpus("auto.lus"));
    const NodeDecl& node = find(expanded.program, "Four_handler_until");
    EXPECT_TRUE(node.is_function);
    ASSERT_EQ(node.inputs.size(), 2u);
    EXPECT_EQ(node.inputs[0].name, "restart_act");
    EXPECT_EQ(node.inputs[1].name, "state_act");
    ASSERT_EQ(node.outputs.size(), 3u);
    EXPECT_EQ(node.outputs[0].name, "restart_in");
    EXPECT_EQ(node.outputs[1].name, "state_in");
    EXPECT_EQ(node.outputs[2].name, "out");
    ASSERT_EQ(node.equations.size(), 2u);
    // until true restart Two folds to the constant pair (true, One)... for Four it is (true, One)
    const Expr& rhs = node.equations[0].rhs;
    ASSERT_TRUE(rhs.is<TupleExpr>());
    EXPECT_TRUE(rhs.as<TupleExpr>().elems[0].as<BoolLitExpr>().value);
    EXPECT_EQ(rhs.as<TupleExpr>().elems[1].as<EnumLitExpr>().ctor, "One");
    // out = false kept verbatim
    EXPECT_EQ(node.equations[1].targets, (std::vector<std::string>{"out"}));
    EXPECT_FALSE(node.equations[1].rhs.as<BoolLitExpr>().value);
}

TEST(handler_node, no_until_clause_stays_put) {
    auto expanded = expand_ok(read_corpus("solution.lus"));
    const NodeDecl& node = find(expanded.program, "OK_handler_until");
    const Expr& rhs = node.equations[0].rhs;
    ASSERT_TRUE(rhs.is<TupleExpr>());
    EXPECT_FALSE(rhs.as<TupleExpr>().elems[0].as<BoolLitExpr>().value);
    EXPECT_EQ(rhs.as<TupleExpr>().elems[1].as<EnumLitExpr>().ctor, "OK");
}

TEST(handler_node, self_written_reads_stay_internal) {
    auto expanded = expand_ok(read_corpus("solution.lus"));
    const NodeDecl& node = find(expanded.program, "OK_handler_until");
    // ReadEqs = {o2, i} but o2 is written by the state, so only i is an input.
    std::vector<std::string> names;
    for (const auto& v : node.inputs) names.push_back(v.name);
    EXPECT_EQ(names, (std::vector<std::string>{"restart_act", "state_act", "i"}));
    ASSERT_EQ(node.outputs.size(), 4u);
    EXPECT_EQ(node.outputs[2].name, "o1");
    EXPECT_EQ(node.outputs[3].name, "o2");
}

TEST(rewire, four_state_host_shape) {
    auto expanded = expand_ok(read_corpus("auto.lus"));
    const NodeDecl& host = find(expanded.program, "auto");
    EXPECT_TRUE(host.automata.empty());
    // Six plumbing locals for the single automaton.
    ASSERT_EQ(host.locals.size(), 6u);
    EXPECT_EQ(host.locals[3].name, "four_states_state_in");
    EXPECT_TRUE(host.locals[3].is_clock);
    ASSERT_EQ(host.equations.size(), 3u);
    // Group 1: (restart_in, state_in) = (false, One) -> pre (...)
    EXPECT_TRUE(host.equations[0].rhs.is<ArrowExpr>());
    // Group 2 and 3: merges over state_in / state_act.
    ASSERT_TRUE(host.equations[1].rhs.is<MergeExpr>());
    EXPECT_EQ(host.equations[1].rhs.as<MergeExpr>().clock_var, "four_states_state_in");
    EXPECT_EQ(host.equations[1].rhs.as<MergeExpr>().branches.size(), 4u);
    ASSERT_TRUE(host.equations[2].rhs.is<MergeExpr>());
    EXPECT_EQ(host.equations[2].rhs.as<MergeExpr>().clock_var, "four_states_state_act");
    EXPECT_EQ(host.equations[2].targets,
              (std::vector<std::string>{"four_states_next_restart_in", "four_states_next_state_in",
                                        "out"}));
    // Every unless call resets on restart_in, every handler call on restart_act.
    const auto& unless_call = host.equations[1].rhs.as<MergeExpr>().branches[0].second;
    ASSERT_TRUE(unless_call.is<CallExpr>());
    EXPECT_EQ(unless_call.as<CallExpr>().every->as<VarExpr>().name, "four_states_restart_in");
}

TEST(rewire, generated_clock_type) {
    auto expanded = expand_ok(read_corpus("auto.lus"));
    ASSERT_EQ(expanded.program.type_decls.size(), 1u);
    EXPECT_EQ(expanded.program.type_decls[0].name, "auto_ck");
    EXPECT_EQ(expanded.program.type_decls[0].ctors,
              (std::vector<std::string>{"One", "Two", "Three", "Four"}));
}

TEST(rewire, two_automata_are_independent) {
    auto expanded = expand_ok(
        "node n(x: bool) returns (o:int; p:int);\n"
        "let\n"
        "  automaton a\n"
        "  state A1:\n"
        "  let o = 1; tel until x restart A2\n"
        "  state A2:\n"
        "  let o = 2; tel\n"
        "  automaton b\n"
        "  state B1:\n"
        "  let p = 3; tel until x restart B2\n"
        "  state B2:\n"
        "  let p = 4; tel\n"
        "tel");
    const NodeDecl& host = find(expanded.program, "n");
    EXPECT_EQ(host.locals.size(), 12u);
    EXPECT_EQ(host.equations.size(), 6u);
    ASSERT_EQ(expanded.program.type_decls.size(), 2u);
    EXPECT_EQ(expanded.program.type_decls[0].name, "n_a_ck");
    EXPECT_EQ(expanded.program.type_decls[1].name, "n_b_ck");
    EXPECT_NE(expanded.program.find_node("A1_unless"), nullptr);
    EXPECT_NE(expanded.program.find_node("B2_handler_until"), nullptr);
}

TEST(rewire, heterogeneous_writes_rejected) {
    Diagnostics diags;
    auto program = parse_text(
        "node n(x: bool) returns (o:int; p:int);\n"
        "let\n"
        "  automaton a\n"
        "  state S:\n"
        "  let o = 1; p = 2; tel until x restart T\n"
        "  state T:\n"
        "  let o = 3; tel\n"
        "tel",
        diags);
    ASSERT_TRUE(program);
    auto info = check_program(*program, diags);
    ASSERT_TRUE(info);
    auto expanded = expand_all(*program, *info, diags);
    EXPECT_FALSE(expanded);
    ASSERT_TRUE(diags.has_error(DiagCode::StateWrite));
    EXPECT_NE(diags.items()[0].message.find("'p'"), std::string::npos);
    EXPECT_NE(diags.items()[0].message.find("'T'"), std::string::npos);
}

TEST(expand_all, counter_trio_node_count) {
    // Three counter nodes; the automaton contributes two nodes per state.
    std::string trio = l2h::test::read_corpus("greycounter.lus") + "\n" +
                       l2h::test::read_corpus("intloopcounter.lus") + "\n" +
                       l2h::test::read_corpus("auto.lus");
    auto expanded = expand_ok(trio);
    EXPECT_EQ(expanded.program.nodes.size(), 3u + 8u);
}

TEST(expand_all, identity_on_pure_dataflow) {
    auto checked = check_ok(read_corpus("greycounter.lus"));
    Diagnostics diags;
    auto expanded = expand_all(checked.program, checked.info, diags);
    ASSERT_TRUE(expanded);
    EXPECT_TRUE(expanded->generated_nodes.empty());
    EXPECT_TRUE(program_equal(checked.program, expanded->program));
}

TEST(expand_all, triangle_propagates_unless_diagnostic) {
    auto checked = check_ok(read_corpus("triangle.lus"));
    Diagnostics diags;
    auto expanded = expand_all(checked.program, checked.info, diags);
    EXPECT_FALSE(expanded);
    EXPECT_TRUE(diags.has_error(DiagCode::UnlessMemory));
}

TEST(expand_all, structure_preservation_count) {
    auto expanded = expand_ok(read_corpus("solution.lus"));
    // 2 states -> 4 generated nodes plus the host.
    EXPECT_EQ(expanded.program.nodes.size(), 5u);
}

TEST(expand_all, deterministic) {
    const std::string text = read_corpus("counters3.lus");
    auto first = expand_ok(text);
    auto second = expand_ok(text);
    EXPECT_EQ(pretty_print(first.program), pretty_print(second.program));
    EXPECT_TRUE(program_equal(first.program, second.program));
}

TEST(expand_all, output_round_trips) {
    auto expanded = expand_ok(read_corpus("counters3.lus"));
    const std::string printed = pretty_print(expanded.program);
    Diagnostics diags;
    auto reparsed = parse_text(printed, diags);
    ASSERT_TRUE(reparsed) << diags.render_all("<printed>");
    EXPECT_TRUE(program_equal(expanded.program, *reparsed)) << printed;
}

TEST(expand_all, nested_automaton_expands) {
    auto expanded = expand_ok(
        "node n(x: bool) returns (o:int);\n"
        "let\n"
        "  automaton outer\n"
        "  state Up:\n"
        "  let\n"
        "    automaton inner\n"
        "    state Fast:\n"
        "    let o = 1; tel until x restart Slow\n"
        "    state Slow:\n"
        "    let o = 2; tel until x restart Fast\n"
        "  tel until x restart Down\n"
        "  state Down:\n"
        "  let o = 0; tel until x restart Up\n"
        "tel");
    // Two automata, two states each: 8 generated nodes + host.
    EXPECT_EQ(expanded.program.nodes.size(), 9u);
    EXPECT_EQ(expanded.program.type_decls.size(), 2u);
    // The inner plumbing lives inside Up_handler_until.
    const NodeDecl& up = find(expanded.program, "Up_handler_until");
    bool has_inner_merge = false;
    for (const auto& eq : up.equations) {
        if (eq.rhs.is<MergeExpr>()) has_inner_merge = true;
    }
    EXPECT_TRUE(has_inner_merge);
}
