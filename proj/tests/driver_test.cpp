// SPDX-License-Identifier: Apache-2.0
//
// Pipeline orchestration, artifact writing, solver invocation and the
// command line binary (exit codes, simulate subcommand, --inline).

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "l2h/csv.hpp"
#include "l2h/driver.hpp"
#include "l2h/interp.hpp"
#include "l2h/parser.hpp"
#include "test_util.hpp"

using namespace l2h;
using l2h::test::read_corpus;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
    const fs::path dir = fs::path(::testing::TempDir()) / "l2h_driver_test";
    fs::create_directories(dir);
    return dir;
}

std::string write_script(const std::string& name, const std::string& body) {
    const fs::path path = temp_dir() / name;
    {
        std::ofstream out(path);
        out << "#!/bin/sh\n" << body << "\n";
    }
    fs::permissions(path, fs::perms::owner_all, fs::perm_options::add);
    return path.string();
}

int run_cli(const std::string& args) {
    const std::string command = std::string(L2H_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string run_cli_stdout(const std::string& args) {
    const fs::path out = temp_dir() / "stdout.txt";
    const std::string command =
        std::string(L2H_CLI_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
    const int status = std::system(command.c_str());
    EXPECT_EQ(WIFEXITED(status) ? WEXITSTATUS(status) : -1, 0);
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(pipeline, writes_horn_artifact) {
    const fs::path out = temp_dir() / "counters3.smt2";
    fs::remove(out);
    CompilerConfig config;
    config.input_path = l2h::test::corpus_path("counters3.lus");
    config.main_node = "top";
    config.horn_path = out.string();
    Diagnostics diags;
    auto result = run_pipeline(config, diags);
    ASSERT_TRUE(result) << diags.render_all(config.input_path);
    ASSERT_TRUE(fs::exists(out));
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), result->smtlib);
    for (const char* rel : {"auto_reset", "auto_step", "Four_unless", "Four_handler_until"}) {
        EXPECT_NE(ss.str().find(rel), std::string::npos) << rel;
    }
}

TEST(pipeline, stops_on_causality_error_without_artifacts) {
    const fs::path out = temp_dir() / "failure.smt2";
    fs::remove(out);
    CompilerConfig config;
    config.input_path = l2h::test::corpus_path("failure.lus");
    config.main_node = "failure";
    config.horn_path = out.string();
    Diagnostics diags;
    auto result = run_pipeline(config, diags);
    EXPECT_FALSE(result);
    EXPECT_TRUE(diags.has_error(DiagCode::Causality));
    EXPECT_FALSE(fs::exists(out));
}

TEST(pipeline, triangle_fails_with_unless_memory_diagnostic) {
    CompilerConfig config;
    config.input_path = l2h::test::corpus_path("triangle.lus");
    config.main_node = "triangle";
    Diagnostics diags;
    EXPECT_FALSE(run_pipeline(config, diags));
    EXPECT_TRUE(diags.has_error(DiagCode::UnlessMemory));
}

TEST(pipeline, emit_clocked_reparses) {
    const fs::path out = temp_dir() / "auto_clocked.lus";
    CompilerConfig config;
    config.input_path = l2h::test::corpus_path("auto.lus");
    config.main_node = "auto";
    config.emit_clocked_path = out.string();
    Diagnostics diags;
    ASSERT_TRUE(run_pipeline(config, diags)) << diags.render_all("auto.lus");
    auto text = read_file(out.string(), diags);
    ASSERT_TRUE(text);
    Diagnostics reparse_diags;
    auto program = parse_text(*text, reparse_diags);
    ASSERT_TRUE(program) << reparse_diags.render_all(out.string());
    EXPECT_NE(program->find_node("Four_handler_until"), nullptr);
    EXPECT_NE(program->find_node("One_unless"), nullptr);
    EXPECT_NE(text->find("merge four_states_state_act"), std::string::npos);
    EXPECT_NE(text->find("every four_states_restart_act"), std::string::npos);
    auto golden = read_file(std::string(L2H_GOLDEN_DIR) + "/auto_clocked.lus", diags);
    ASSERT_TRUE(golden);
    EXPECT_EQ(*text, *golden) << "golden drift in auto_clocked.lus";
}

TEST(pipeline, emit_normalized_and_state_tree) {
    const fs::path norm = temp_dir() / "sw_norm.lus";
    const fs::path tree = temp_dir() / "sw_tree.txt";
    CompilerConfig config;
    config.input_path = l2h::test::corpus_path("stopwatch.lus");
    config.main_node = "stopwatch";
    config.emit_normalized_path = norm.string();
    config.emit_state_tree_path = tree.string();
    Diagnostics diags;
    ASSERT_TRUE(run_pipeline(config, diags));
    auto tree_text = read_file(tree.string(), diags);
    ASSERT_TRUE(tree_text);
    EXPECT_NE(tree_text->find("inst count_1 (count)"), std::string::npos);
    auto norm_text = read_file(norm.string(), diags);
    ASSERT_TRUE(norm_text);
    EXPECT_NE(norm_text->find("__stopwatch_mem_"), std::string::npos);
}

TEST(pipeline, inline_removes_generated_relations_and_preserves_traces) {
    CompilerConfig config;
    config.main_node = "auto";
    config.inline_generated = true;
    Diagnostics diags;
    auto inlined = run_pipeline_on(read_corpus("auto.lus"), config, diags);
    ASSERT_TRUE(inlined) << diags.render_all("<inline>");
    EXPECT_FALSE(inlined->horn->find_relation("One_unless"));
    EXPECT_FALSE(inlined->horn->find_relation("Four_handler_until"));
    EXPECT_TRUE(inlined->horn->find_relation("auto_step"));

    config.inline_generated = false;
    Diagnostics diags2;
    auto plain = run_pipeline_on(read_corpus("auto.lus"), config, diags2);
    ASSERT_TRUE(plain);

    // Same observable behavior with and without inlining.
    auto i1 = Interpreter::create(inlined->normalized, inlined->info, diags);
    auto i2 = Interpreter::create(plain->normalized, plain->info, diags2);
    ASSERT_TRUE(i1 && i2);
    std::vector<std::map<std::string, Value>> inputs(12, {{"x", Value::boolean(false)}});
    Trace t1 = i1->run_trace("auto", inputs);
    Trace t2 = i2->run_trace("auto", inputs);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        EXPECT_EQ(t1.steps[i].outputs, t2.steps[i].outputs) << "instant " << i;
    }
    // The oracle still holds on the inlined encoding.
    Trace recorded = i1->run_trace("auto", inputs, true);
    EXPECT_TRUE(check_step_relation("auto", recorded, *inlined->horn).ok);
}

TEST(invoke_solver, outcome_mapping) {
    CompilerConfig config;
    config.timeout_seconds = 5;
    const std::string file = write_script("fake.smt2", "");  // any readable file

    config.solver_command = {write_script("solver_unsat.sh", "echo unsat")};
    EXPECT_EQ(invoke_solver(config, file), VerificationOutcome::Valid);
    config.solver_command = {write_script("solver_sat.sh", "echo sat")};
    EXPECT_EQ(invoke_solver(config, file), VerificationOutcome::Invalid);
    config.solver_command = {write_script("solver_unknown.sh", "echo unknown")};
    EXPECT_EQ(invoke_solver(config, file), VerificationOutcome::Unknown);
    config.solver_command = {"/nonexistent/chc-solver"};
    EXPECT_EQ(invoke_solver(config, file), VerificationOutcome::SolverUnavailable);
}

TEST(invoke_solver, timeout_kills_the_solver) {
    CompilerConfig config;
    config.timeout_seconds = 1;
    config.solver_command = {write_script("solver_slow.sh", "sleep 30\necho unsat")};
    const auto start = std::chrono::steady_clock::now();
    EXPECT_EQ(invoke_solver(config, write_script("slow.smt2", "")),
              VerificationOutcome::Unknown);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LT(elapsed, 10.0);
}

TEST(cli, exit_codes) {
    const std::string corpus = L2H_CORPUS_DIR;
    const std::string out_dir = temp_dir().string();
    EXPECT_EQ(run_cli("compile " + corpus + "/greycounter.lus --node greycounter"), kExitOk);
    EXPECT_EQ(run_cli("compile " + corpus + "/failure.lus --node failure"), kExitDiagnostics);
    EXPECT_EQ(run_cli("compile " + corpus + "/triangle.lus --node triangle"), kExitDiagnostics);
    EXPECT_EQ(run_cli("compile " + corpus + "/greycounter.lus --node nope"), kExitDiagnostics);
    // --prove without --horn is a usage error.
    EXPECT_EQ(run_cli("compile " + corpus + "/counters3.lus --node top --prove top:ok"),
              kExitUsage);
    EXPECT_EQ(run_cli("frobnicate"), kExitUsage);
}

TEST(cli, prove_with_stub_solvers) {
    const std::string corpus = L2H_CORPUS_DIR;
    const std::string smt = (temp_dir() / "prove.smt2").string();
    const std::string base = "compile " + corpus + "/counters3.lus --node top --horn " + smt +
                             " --prove top:ok --solver ";
    EXPECT_EQ(run_cli(base + write_script("unsat.sh", "echo unsat")), kExitOk);
    EXPECT_EQ(run_cli(base + write_script("sat.sh", "echo sat")), kExitInvalid);
    EXPECT_EQ(run_cli(base + write_script("unk.sh", "echo unknown")), kExitSolverUnavailable);
    EXPECT_EQ(run_cli(base + "/nonexistent/chc-solver"), kExitSolverUnavailable);
    // Without a solver the query is still emitted and compilation succeeds.
    EXPECT_EQ(run_cli("compile " + corpus + "/counters3.lus --node top --horn " + smt +
                      " --prove top:ok"),
              kExitOk);
}

TEST(cli, simulate_default_inputs) {
    const std::string corpus = L2H_CORPUS_DIR;
    const std::string out =
        run_cli_stdout("simulate " + corpus + "/greycounter.lus --node greycounter --steps 4");
    EXPECT_EQ(out, "out\nfalse\nfalse\ntrue\nfalse\n");
}

TEST(cli, simulate_csv_roundtrip) {
    const fs::path csv = temp_dir() / "stopwatch_inputs.csv";
    {
        std::ofstream out(csv);
        out << "tick,start_stop,reset\n";
        out << "true,false,false\n";
        out << "true,true,false\n";
        out << "true,false,false\n";
        out << "true,false,false\n";
        out << "true,false,false\n";
    }
    const std::string corpus = L2H_CORPUS_DIR;
    const std::string out = run_cli_stdout("simulate " + corpus +
                                           "/stopwatch.lus --node stopwatch --input " +
                                           csv.string());
    EXPECT_EQ(out, "seconds\n0\n0\n1\n2\n3\n");
}

TEST(cli, simulate_rejects_bad_csv) {
    const fs::path csv = temp_dir() / "bad.csv";
    {
        std::ofstream out(csv);
        out << "nope\ntrue\n";
    }
    const std::string corpus = L2H_CORPUS_DIR;
    EXPECT_EQ(run_cli("simulate " + corpus + "/greycounter.lus --node greycounter --input " +
                      csv.string()),
              kExitDiagnostics);
}

TEST(csv, value_parsing) {
    auto checked = l2h::test::check_ok(read_corpus("stopwatch.lus"));
    const NodeDecl& node = *checked.program.find_node("stopwatch");
    Diagnostics diags;
    auto rows = parse_input_csv("tick,start_stop,reset\n1,true,0\nfalse,0,true\n", node,
                                checked.info, diags);
    ASSERT_TRUE(rows) << diags.render_all("<csv>");
    ASSERT_EQ(rows->size(), 2u);
    EXPECT_EQ((*rows)[0].at("tick"), Value::boolean(true));
    EXPECT_EQ((*rows)[1].at("reset"), Value::boolean(true));
}
