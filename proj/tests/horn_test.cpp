// SPDX-License-Identifier: Apache-2.0
//
// Horn backend: enum sorts, per-node step and reset relations, the arrow
// rules, merge and every encodings, collecting semantics, SMT-LIB output
// determinism, and the trace oracle over the emitted rules.

#include <algorithm>

#include <gtest/gtest.h>

#include "l2h/driver.hpp"
#include "l2h/interp.hpp"
#include "test_util.hpp"

using namespace l2h;
using l2h::test::read_corpus;

namespace {

PipelineResult compile_ok(const std::string& text, const std::string& main,
                          std::optional<std::string> prove = std::nullopt) {
    CompilerConfig config;
    config.main_node = main;
    if (prove) config.prove = main + ":" + *prove;
    Diagnostics diags;
    auto result = run_pipeline_on(text, config, diags);
    if (!result) {
        ADD_FAILURE() << "pipeline failed:\n" << diags.render_all("<test>");
        throw std::runtime_error("pipeline failed");
    }
    return std::move(*result);
}

std::string result_main(const std::string& corpus_name) {
    if (corpus_name == "cpt_foo.lus") return "foo";
    return corpus_name.substr(0, corpus_name.find('.'));
}

/// Conjunct list of a rule body (a single conjunct body yields one entry).
std::vector<const Term*> conjuncts(const Term& body) {
    std::vector<const Term*> out;
    if (body.kind == Term::Kind::App && body.symbol == "and") {
        for (const auto& c : body.args) out.push_back(&c);
    } else {
        out.push_back(&body);
    }
    return out;
}

bool body_has_equality(const Term& body, const std::string& var_suffix,
                       const std::string& printed_rhs) {
    for (const Term* c : conjuncts(body)) {
        if (c->kind != Term::Kind::App || c->symbol != "=") continue;
        const Term& lhs = (*c).args[0];
        if (lhs.kind != Term::Kind::Var) continue;
        if (lhs.symbol.size() < var_suffix.size() ||
            lhs.symbol.compare(lhs.symbol.size() - var_suffix.size(), var_suffix.size(),
                               var_suffix) != 0) {
            continue;
        }
        if ((*c).args[1].print() == printed_rhs) return true;
    }
    return false;
}

}  // namespace

TEST(sorts, enum_declarations) {
    auto result = compile_ok(read_corpus("stopwatch.lus"), "stopwatch");
    const std::string text = result.smtlib;
    EXPECT_NE(text.find("(declare-datatypes () ((run_mode Start Stop)))"), std::string::npos);
}

TEST(sorts, automaton_clock_type) {
    auto result = compile_ok(read_corpus("auto.lus"), "auto");
    EXPECT_NE(result.smtlib.find("(declare-datatypes () ((auto_ck One Two Three Four)))"),
              std::string::npos);
}

TEST(sorts, no_enums_no_datatypes) {
    auto result = compile_ok(read_corpus("greycounter.lus"), "greycounter");
    EXPECT_EQ(result.smtlib.find("declare-datatypes"), std::string::npos);
}

TEST(relations, counter_program_declare_rel_signatures) {
    auto result = compile_ok(read_corpus("counters3.lus"), "top");
    const std::string& text = result.smtlib;
    EXPECT_NE(text.find("(declare-rel Four_unless (Bool auto_ck Bool auto_ck))"),
              std::string::npos);
    EXPECT_NE(text.find("(declare-rel Four_handler_until (Bool auto_ck Bool auto_ck Bool))"),
              std::string::npos);
    EXPECT_NE(text.find("(declare-rel arrow_reset (Bool Bool))"), std::string::npos);
}

TEST(relations, function_keeps_bare_name_node_gets_step_suffix) {
    auto result = compile_ok(
        "function id(i: int) returns (o:int); let o = i; tel\n"
        "node idn(i: int) returns (o:int); let o = i; tel",
        "idn");
    EXPECT_TRUE(result.horn->find_relation("id"));
    EXPECT_TRUE(result.horn->find_relation("idn_step"));
    EXPECT_FALSE(result.horn->find_relation("id_step"));
    // Memoryless: no state arguments and no reset relation.
    EXPECT_EQ(result.horn->find_relation("idn_step")->args.size(), 2u);
    EXPECT_FALSE(result.horn->find_relation("idn_reset"));
}

TEST(rules, identity_node_step_rule) {
    auto result = compile_ok("node idn(i: int) returns (o:int); let o = i; tel", "idn");
    const NodeEncoding& enc = result.horn->nodes.at("idn");
    const HornRule& rule = result.horn->rules[enc.step_rule];
    EXPECT_EQ(rule.body.print(), "(= idn.o idn.i)");
    EXPECT_EQ(rule.head.print(), "(idn_step idn.i idn.o)");
}

TEST(rules, arrow_reset_rule) {
    auto result = compile_ok(read_corpus("greycounter.lus"), "greycounter");
    const NodeEncoding& arrow = result.horn->nodes.at("arrow");
    const HornRule& rule = result.horn->rules[arrow.reset_rule];
    EXPECT_EQ(rule.body.print(), "(= arrow.init_x true)");
    EXPECT_EQ(rule.head.print(), "(arrow_reset arrow.init_c arrow.init_x)");
}

TEST(rules, four_unless_body_is_the_identity) {
    auto result = compile_ok(read_corpus("counters3.lus"), "top");
    const NodeEncoding& enc = result.horn->nodes.at("Four_unless");
    const Term& body = result.horn->rules[enc.step_rule].body;
    ASSERT_EQ(conjuncts(body).size(), 2u);
    EXPECT_TRUE(body_has_equality(body, "restart_act", "Four_unless.restart_in"));
    EXPECT_TRUE(body_has_equality(body, "state_act", "Four_unless.state_in"));
}

TEST(rules, four_handler_body_is_the_folded_transition) {
    auto result = compile_ok(read_corpus("counters3.lus"), "top");
    const NodeEncoding& enc = result.horn->nodes.at("Four_handler_until");
    const Term& body = result.horn->rules[enc.step_rule].body;
    // (= out false) (= state_in One) (= restart_in true), any order.
    ASSERT_EQ(conjuncts(body).size(), 3u);
    EXPECT_TRUE(body_has_equality(body, "out", "false"));
    EXPECT_TRUE(body_has_equality(body, "state_in", "One"));
    EXPECT_TRUE(body_has_equality(body, "restart_in", "true"));
}

TEST(rules, merge_encodes_as_implications) {
    auto result = compile_ok(read_corpus("stopwatch.lus"), "stopwatch");
    const std::string& text = result.smtlib;
    EXPECT_NE(text.find("(=> (= stopwatch.run Start) (= stopwatch.seconds"), std::string::npos);
    EXPECT_NE(text.find("(=> (= stopwatch.run Stop) (= stopwatch.seconds"), std::string::npos);
}

TEST(rules, auto_step_contains_the_arrow_case_split) {
    auto result = compile_ok(read_corpus("auto.lus"), "auto");
    const std::string& text = result.smtlib;
    EXPECT_NE(text.find("(=> (= auto.arrow_1.init_i true) (and (= auto.four_states_restart_in "
                        "false) (= auto.four_states_state_in One)))"),
              std::string::npos);
    EXPECT_NE(text.find("(= auto.arrow_1.init_x false)"), std::string::npos);
}

TEST(rules, auto_reset_body) {
    auto result = compile_ok(read_corpus("auto.lus"), "auto");
    const NodeEncoding& enc = result.horn->nodes.at("auto");
    const Term& body = result.horn->rules[enc.reset_rule].body;
    ASSERT_EQ(conjuncts(body).size(), 3u);
    EXPECT_TRUE(body_has_equality(body, "__auto_mem_1_x", "auto.__auto_mem_1_c"));
    EXPECT_TRUE(body_has_equality(body, "__auto_mem_2_x", "auto.__auto_mem_2_c"));
    EXPECT_TRUE(body_has_equality(body, "arrow_1.init_x", "true"));
}

TEST(rules, stateful_callee_gets_intermediate_state_and_reset_ite) {
    auto result = compile_ok(read_corpus("stopwatch.lus"), "stopwatch");
    const std::string& text = result.smtlib;
    // count(...) every reset: the arrow init slot of the callee subtree is
    // conditionally re-initialized; the plain memory passes through.
    EXPECT_NE(text.find("(= stopwatch.count_1.arrow_1.init_i (ite stopwatch.reset true "
                        "stopwatch.count_1.arrow_1.init_c))"),
              std::string::npos);
    EXPECT_NE(text.find("(= stopwatch.count_1.__count_mem_1_i stopwatch.count_1.__count_mem_1_c)"),
              std::string::npos);
    // The callee step applies to the intermediate and next state.
    EXPECT_NE(text.find("(count_step stopwatch.tick stopwatch.__stopwatch_call_2 "
                        "stopwatch.count_1.__count_mem_1_i stopwatch.count_1.arrow_1.init_i "
                        "stopwatch.count_1.__count_mem_1_x stopwatch.count_1.arrow_1.init_x)"),
              std::string::npos);
}

TEST(rules, inactive_clock_freezes_callee_state) {
    auto result = compile_ok(read_corpus("stopwatch.lus"), "stopwatch");
    const std::string& text = result.smtlib;
    EXPECT_NE(text.find("(=> (not (= stopwatch.run Start)) (and (= "
                        "stopwatch.count_1.__count_mem_1_x stopwatch.count_1.__count_mem_1_c) (= "
                        "stopwatch.count_1.arrow_1.init_x stopwatch.count_1.arrow_1.init_c)))"),
              std::string::npos);
}

TEST(collecting_semantics, reach_rules_for_main) {
    auto result = compile_ok(read_corpus("auto.lus"), "auto");
    ASSERT_EQ(result.horn->reach_rel, "Reach");
    const std::string& text = result.smtlib;
    EXPECT_NE(text.find("(declare-rel Reach (Bool auto_ck Bool))"), std::string::npos);
    // Rule 1: reset seeds Reach; rule 2: step preserves it.
    EXPECT_NE(text.find("(rule (=> (auto_reset auto.__auto_mem_1_c auto.__auto_mem_2_c "
                        "auto.arrow_1.init_c auto.__auto_mem_1_x auto.__auto_mem_2_x "
                        "auto.arrow_1.init_x)\n  (Reach auto.__auto_mem_1_x auto.__auto_mem_2_x "
                        "auto.arrow_1.init_x)))"),
              std::string::npos);
    EXPECT_NE(text.find("(Reach auto.__auto_mem_1_c auto.__auto_mem_2_c auto.arrow_1.init_c)"),
              std::string::npos);
}

TEST(collecting_semantics, prove_emits_err_and_query) {
    auto result = compile_ok(read_corpus("counters3.lus"), "top", "ok");
    const std::string& text = result.smtlib;
    EXPECT_NE(text.find("(declare-rel ERR ())"), std::string::npos);
    EXPECT_NE(text.find("(not top.ok)"), std::string::npos);
    EXPECT_NE(text.find("(query ERR)"), std::string::npos);
}

TEST(collecting_semantics, stateless_main_without_query_skips_reach) {
    auto result = compile_ok("node idf(i: bool) returns (o:bool); let o = i; tel", "idf");
    EXPECT_TRUE(result.horn->reach_rel.empty());
    EXPECT_EQ(result.smtlib.find("Reach"), std::string::npos);
}

TEST(collecting_semantics, stateless_main_with_query_is_an_error) {
    CompilerConfig config;
    config.main_node = "idf";
    config.prove = "idf:o";
    Diagnostics diags;
    auto result = run_pipeline_on("node idf(i: bool) returns (o:bool); let o = i; tel", config,
                                  diags);
    EXPECT_FALSE(result);
    EXPECT_TRUE(diags.has_error(DiagCode::MainNode));
    bool mentions_state = false;
    for (const auto& d : diags.items()) {
        mentions_state = mentions_state || d.message.find("no state") != std::string::npos;
    }
    EXPECT_TRUE(mentions_state);
}

TEST(write_smtlib, emission_order_and_determinism) {
    const std::string text = read_corpus("counters3.lus");
    auto first = compile_ok(text, "top");
    auto second = compile_ok(text, "top");
    EXPECT_EQ(first.smtlib, second.smtlib);
    const std::string& out = first.smtlib;
    const auto logic = out.find("(set-logic HORN)");
    const auto datatypes = out.find("declare-datatypes");
    const auto rel = out.find("declare-rel");
    const auto var = out.find("declare-var");
    const auto rule = out.find("(rule ");
    EXPECT_EQ(logic, 0u);
    EXPECT_LT(datatypes, rel);
    EXPECT_LT(rel, var);
    EXPECT_LT(var, rule);
}

TEST(modularity, one_step_relation_per_node) {
    auto result = compile_ok(read_corpus("counters3.lus"), "top");
    int step_rules = 0;
    for (const auto& [name, enc] : result.horn->nodes) {
        if (enc.step_rule >= 0) {
            ++step_rules;
            EXPECT_EQ(result.horn->rules[enc.step_rule].head.symbol, enc.step_rel);
        }
    }
    // 4 source nodes + 8 generated state nodes; the arrow contributes only
    // its reset rule.
    EXPECT_EQ(step_rules, 12);
    EXPECT_EQ(result.horn->nodes.at("arrow").step_rule, -1);
    for (const char* stateful : {"greycounter", "intloopcounter", "auto", "top", "arrow"}) {
        EXPECT_GE(result.horn->nodes.at(stateful).reset_rule, 0) << stateful;
    }
}

TEST(oracle, step_relation_holds_on_random_traces) {
    for (const char* name : {"greycounter.lus", "intloopcounter.lus", "stopwatch.lus",
                             "cpt_foo.lus", "solution.lus", "auto.lus", "guardy.lus",
                             "nested.lus"}) {
        auto result = compile_ok(read_corpus(name), result_main(name));
        Diagnostics diags;
        auto interp = Interpreter::create(result.normalized, result.info, diags);
        ASSERT_TRUE(interp) << diags.render_all("<test>");
        for (const auto& node : result.normalized.nodes) {
            auto inputs = random_inputs(node, result.info, 20, 7);
            Trace trace = interp->run_trace(node.name, inputs, true);
            auto check = check_step_relation(node.name, trace, *result.horn);
            EXPECT_TRUE(check.ok) << name << " node " << node.name << " instant "
                                  << check.violating_instant << ": " << check.detail;
        }
    }
}

TEST(oracle, empty_trace_is_ok) {
    auto result = compile_ok(read_corpus("greycounter.lus"), "greycounter");
    Trace empty;
    EXPECT_TRUE(check_step_relation("greycounter", empty, *result.horn).ok);
}

TEST(oracle, flipped_equality_is_detected) {
    auto result = compile_ok(read_corpus("greycounter.lus"), "greycounter");
    Diagnostics diags;
    auto interp = Interpreter::create(result.normalized, result.info, diags);
    ASSERT_TRUE(interp);
    auto inputs = random_inputs(*result.normalized.find_node("greycounter"), result.info, 20, 3);
    Trace trace = interp->run_trace("greycounter", inputs, true);
    ASSERT_TRUE(check_step_relation("greycounter", trace, *result.horn).ok);

    // Negate the first equality conjunct of the step body.
    HornSystem mutated = std::move(*result.horn);
    Term& body = mutated.rules[mutated.nodes.at("greycounter").step_rule].body;
    ASSERT_EQ(body.symbol, "and");
    for (auto& c : body.args) {
        if (c.kind == Term::Kind::App && c.symbol == "=") {
            c = t_not(std::move(c));
            break;
        }
    }
    auto check = check_step_relation("greycounter", trace, mutated);
    EXPECT_FALSE(check.ok);
    EXPECT_EQ(check.violating_instant, 0);
}

TEST(reset_image, arrow_inits_true_memories_unchanged) {
    auto result = compile_ok(read_corpus("auto.lus"), "auto");
    std::map<std::string, Value> state{{"__auto_mem_1", Value::boolean(true)},
                                       {"__auto_mem_2", Value::enumeration("Three")},
                                       {"arrow_1.init", Value::boolean(false)}};
    auto image = eval_reset_image(*result.horn, "auto", state);
    EXPECT_EQ(image.at("__auto_mem_1"), Value::boolean(true));
    EXPECT_EQ(image.at("__auto_mem_2"), Value::enumeration("Three"));
    EXPECT_EQ(image.at("arrow_1.init"), Value::boolean(true));
}

TEST(reset_image, recursive_through_callee_reset) {
    auto result = compile_ok(read_corpus("cpt_foo.lus"), "foo");
    std::map<std::string, Value> state{{"cpt_1.__cpt_mem_1", Value::integer(9)},
                                       {"cpt_1.arrow_1.init", Value::boolean(false)},
                                       {"arrow_1.init", Value::boolean(false)}};
    auto image = eval_reset_image(*result.horn, "foo", state);
    EXPECT_EQ(image.at("cpt_1.__cpt_mem_1"), Value::integer(9));
    EXPECT_EQ(image.at("cpt_1.arrow_1.init"), Value::boolean(true));
    EXPECT_EQ(image.at("arrow_1.init"), Value::boolean(true));
}

TEST(reset_image, idempotent) {
    auto result = compile_ok(read_corpus("counters3.lus"), "top");
    Diagnostics diags;
    auto interp = Interpreter::create(result.normalized, result.info, diags);
    ASSERT_TRUE(interp);
    // Drive the top node a few steps, then reset twice.
    InstanceState state = interp->init_state("top");
    for (int i = 0; i < 5; ++i) interp->step("top", state, {{"x", Value::boolean(false)}});
    auto concrete = interp->flat_snapshot("top", state);
    auto once = eval_reset_image(*result.horn, "top", concrete);
    auto twice = eval_reset_image(*result.horn, "top", once);
    EXPECT_EQ(once, twice);
}
