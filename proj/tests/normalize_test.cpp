// SPDX-License-Identifier: Apache-2.0
//
// Normalization: memory extraction, arrow instances, call uids, every
// lowering, the normal-form lint, and semantics preservation against the
// interpreter.

#include <gtest/gtest.h>

#include "l2h/interp.hpp"
#include "l2h/normalize.hpp"
#include "l2h/printer.hpp"
#include "test_util.hpp"

using namespace l2h;
using l2h::test::check_ok;
using l2h::test::expand_ok;
using l2h::test::read_corpus;

namespace {

struct Normalized {
    Program program;
    CheckInfo info;
};

Normalized normalize_ok(const std::string& text) {
    auto expanded = expand_ok(text);
    Diagnostics diags;
    Program normalized = normalize_program(expanded.program, diags);
    auto info = check_program(normalized, diags, CheckMode::Internal);
    if (!info) {
        ADD_FAILURE() << "normalized program fails checks:\n"
                      << diags.render_all("<test>") << pretty_print(normalized);
        throw std::runtime_error("check failed");
    }
    return {std::move(normalized), std::move(*info)};
}

const Equation& only_call_to(const NodeDecl& node, const std::string& callee) {
    const Equation* found = nullptr;
    for (const auto& eq : node.equations) {
        if (classify_equation(eq) == NormEqKind::Call &&
            eq.rhs.as<CallExpr>().callee == callee) {
            EXPECT_EQ(found, nullptr) << "more than one call to " << callee;
            found = &eq;
        }
    }
    if (!found) throw std::runtime_error("no call to " + callee);
    return *found;
}

}  // namespace

TEST(normalize, cpt_splits_memory_and_arrow) {
    auto normalized = normalize_ok(read_corpus("cpt_foo.lus"));
    const NodeDecl& cpt = *normalized.program.find_node("cpt");
    // y = 0 -> if z then 0 else pre y + 1 becomes
    //   m = pre y;  y = arrow(0, if z then 0 else m + 1)
    int memories = 0;
    for (const auto& eq : cpt.equations) {
        if (classify_equation(eq) == NormEqKind::Memory) {
            ++memories;
            EXPECT_EQ(eq.targets[0], "__cpt_mem_1");
            EXPECT_EQ(eq.rhs.as<UnaryExpr>().operand->as<VarExpr>().name, "y");
        }
    }
    EXPECT_EQ(memories, 1);
    const Equation& arrow = only_call_to(cpt, kArrowNode);
    EXPECT_EQ(arrow.targets, (std::vector<std::string>{"y"}));
    ASSERT_EQ(arrow.rhs.as<CallExpr>().args.size(), 2u);
    // Second argument keeps the conditional inline, reading the memory.
    const Expr& rest = arrow.rhs.as<CallExpr>().args[1];
    ASSERT_TRUE(rest.is<IteExpr>());
    std::string why;
    EXPECT_TRUE(verify_normal_form(cpt, &why)) << why;
}

TEST(normalize, call_inside_arrow_is_extracted) {
    auto normalized = normalize_ok(read_corpus("cpt_foo.lus"));
    const NodeDecl& foo = *normalized.program.find_node("foo");
    // out = 1 -> cpt(z) becomes  t = cpt(z);  out = arrow(1, t)
    const Equation& call = only_call_to(foo, "cpt");
    ASSERT_EQ(call.targets.size(), 1u);
    EXPECT_EQ(call.targets[0].rfind("__foo_", 0), 0u);
    const Equation& arrow = only_call_to(foo, kArrowNode);
    EXPECT_EQ(arrow.targets, (std::vector<std::string>{"out"}));
    EXPECT_TRUE(arrow.rhs.as<CallExpr>().args[1].is<VarExpr>());
}

TEST(normalize, already_normal_keeps_shape) {
    auto normalized = normalize_ok(
        "node n(x: int) returns (o:int);\n"
        "var t: int;\n"
        "let\n"
        "  t = x + 1;\n"
        "  o = t * 2;\n"
        "tel");
    const NodeDecl& node = *normalized.program.find_node("n");
    EXPECT_EQ(node.equations.size(), 2u);
    EXPECT_EQ(node.locals.size(), 1u);
}

TEST(normalize, uids_are_distinct_and_deterministic) {
    const std::string text =
        "node count(t: bool) returns (s:int); let s = 0 -> pre s + 1; tel\n"
        "node n(x: bool) returns (o:int);\n"
        "var a: int; b: int;\n"
        "let\n"
        "  a = count(x);\n"
        "  b = count(not x);\n"
        "  o = a + b;\n"
        "tel";
    auto first = normalize_ok(text);
    const NodeDecl& n1 = *first.program.find_node("n");
    std::vector<std::string> uids;
    for (const auto& eq : n1.equations) {
        if (classify_equation(eq) == NormEqKind::Call &&
            eq.rhs.as<CallExpr>().callee == "count") {
            uids.push_back(eq.rhs.as<CallExpr>().uid);
        }
    }
    EXPECT_EQ(uids, (std::vector<std::string>{"count_1", "count_2"}));
    // Recompilation of identical source produces identical uids and text.
    auto second = normalize_ok(text);
    EXPECT_EQ(pretty_print(first.program), pretty_print(second.program));
}

TEST(normalize, generated_nodes_stay_in_normal_form) {
    auto normalized = normalize_ok(read_corpus("counters3.lus"));
    for (const auto& node : normalized.program.nodes) {
        std::string why;
        EXPECT_TRUE(verify_normal_form(node, &why)) << why;
    }
}

TEST(normalize, every_constructor_test_becomes_condition_variable) {
    auto normalized = normalize_ok(
        "type mode = enum { On, Off };\n"
        "node count(t: bool) returns (s:int); let s = 0 -> pre s + 1; tel\n"
        "node n(x: bool; m: mode) returns (o:int);\n"
        "let\n"
        "  o = count(x) every On(m);\n"
        "tel");
    const NodeDecl& node = *normalized.program.find_node("n");
    const Equation& call = only_call_to(node, "count");
    const auto& every = call.rhs.as<CallExpr>().every;
    ASSERT_TRUE(every);
    ASSERT_TRUE(every->is<VarExpr>());
    EXPECT_EQ(every->as<VarExpr>().name, "__n_cond_1");
    // The condition variable is defined by the constructor equality.
    bool found = false;
    for (const auto& eq : node.equations) {
        if (eq.targets[0] != "__n_cond_1") continue;
        found = true;
        ASSERT_TRUE(eq.rhs.is<BinaryExpr>());
        EXPECT_EQ(eq.rhs.as<BinaryExpr>().op, BinaryOp::Eq);
    }
    EXPECT_TRUE(found);
}

TEST(normalize, every_variable_condition_is_kept) {
    auto normalized = normalize_ok(read_corpus("stopwatch.lus"));
    const NodeDecl& node = *normalized.program.find_node("stopwatch");
    const Equation& call = only_call_to(node, "count");
    ASSERT_TRUE(call.rhs.as<CallExpr>().every);
    EXPECT_EQ(call.rhs.as<CallExpr>().every->as<VarExpr>().name, "reset");
}

TEST(normalize, pre_of_compound_expression) {
    auto normalized = normalize_ok(
        "node n(a: int; b: int) returns (o:int);\n"
        "let o = 0 -> pre (a + b); tel");
    const NodeDecl& node = *normalized.program.find_node("n");
    // pre (a+b) becomes t = a + b; m = pre t.
    bool has_mem_of_var = false;
    for (const auto& eq : node.equations) {
        if (classify_equation(eq) == NormEqKind::Memory) {
            has_mem_of_var = eq.rhs.as<UnaryExpr>().operand->is<VarExpr>();
        }
    }
    EXPECT_TRUE(has_mem_of_var);
    std::string why;
    EXPECT_TRUE(verify_normal_form(node, &why)) << why;
}

TEST(normalize, repeated_pre_of_same_variable_shares_memory) {
    auto normalized = normalize_ok(read_corpus("intloopcounter.lus"));
    const NodeDecl& node = *normalized.program.find_node("intloopcounter");
    int memories = 0;
    for (const auto& eq : node.equations) {
        if (classify_equation(eq) == NormEqKind::Memory) ++memories;
    }
    EXPECT_EQ(memories, 1);  // pre(time) occurs twice but is one memory
}

TEST(normalize, tuple_arrow_is_one_instance) {
    auto normalized = normalize_ok(read_corpus("auto.lus"));
    const NodeDecl& host = *normalized.program.find_node("auto");
    int arrows = 0;
    for (const auto& eq : host.equations) {
        if (classify_equation(eq) == NormEqKind::Call &&
            eq.rhs.as<CallExpr>().callee == kArrowNode) {
            ++arrows;
            EXPECT_EQ(eq.targets.size(), 2u);
            EXPECT_EQ(eq.rhs.as<CallExpr>().args.size(), 4u);
        }
    }
    EXPECT_EQ(arrows, 1);
}

TEST(normalize, normal_form_lint_flags_violations) {
    auto checked = check_ok("node n(x: int) returns (o:int);\nlet o = 0 -> x; tel");
    std::string why;
    EXPECT_FALSE(verify_normal_form(checked.program.nodes[0], &why));
    EXPECT_NE(why.find("'o'"), std::string::npos);
}

TEST(normalize, uninitialized_memory_lint_warns) {
    auto expanded = expand_ok("node n(x: int) returns (o:int);\nlet o = pre x; tel");
    Diagnostics diags;
    Program normalized = normalize_program(expanded.program, diags);
    auto info = check_program(normalized, diags, CheckMode::Internal);
    ASSERT_TRUE(info);
    lint_uninitialized_memories(*normalized.find_node("n"), diags);
    ASSERT_FALSE(diags.empty());
    EXPECT_FALSE(diags.has_errors());  // warning only
}

// Semantics preservation: interpreter traces agree before and after
// normalization on random inputs (the normalization half of the pipeline
// oracle; the corpus-wide 100-trace version runs in the acceptance suite).
TEST(normalize, preserves_semantics_on_random_traces) {
    for (const char* name :
         {"greycounter.lus", "intloopcounter.lus", "stopwatch.lus", "cpt_foo.lus"}) {
        auto expanded = expand_ok(read_corpus(name));
        Diagnostics diags;
        Program normalized = normalize_program(expanded.program, diags);
        auto norm_info = check_program(normalized, diags, CheckMode::Internal);
        ASSERT_TRUE(norm_info) << name;

        auto before = Interpreter::create(expanded.program, expanded.info, diags);
        auto after = Interpreter::create(normalized, *norm_info, diags);
        ASSERT_TRUE(before && after) << name << "\n" << diags.render_all("<test>");
        for (const auto& node : expanded.program.nodes) {
            for (std::uint64_t seed = 1; seed <= 10; ++seed) {
                auto inputs = random_inputs(node, expanded.info, 20, seed);
                Trace t1 = before->run_trace(node.name, inputs);
                Trace t2 = after->run_trace(node.name, inputs);
                ASSERT_EQ(t1.steps.size(), t2.steps.size());
                for (std::size_t i = 0; i < t1.steps.size(); ++i) {
                    EXPECT_EQ(t1.steps[i].outputs, t2.steps[i].outputs)
                        << name << " node " << node.name << " seed " << seed << " instant " << i;
                }
            }
        }
    }
}
