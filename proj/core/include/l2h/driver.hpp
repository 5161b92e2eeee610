// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "l2h/ast.hpp"
#include "l2h/check.hpp"
#include "l2h/horn.hpp"
#include "l2h/interp.hpp"
#include "l2h/state_model.hpp"

namespace l2h {

/// Process exit codes, a stable contract for CI.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitDiagnostics = 2,
    kExitInvalid = 3,
    kExitSolverUnavailable = 4,
};

struct CompilerConfig {
    std::string input_path;
    std::string main_node;
    std::string horn_path;             // --horn
    std::string emit_clocked_path;     // --emit-clocked
    std::string emit_normalized_path;  // --emit-normalized
    std::string emit_state_tree_path;  // --emit-state-tree
    bool inline_generated = false;     // --inline
    std::optional<std::string> prove;  // --prove <node>:<output>
    std::vector<std::string> solver_command;
    int timeout_seconds = 60;
};

/// Everything the pipeline produced, for embedding and tests.
struct PipelineResult {
    Program expanded;    // automaton-free source program
    Program normalized;  // normalized, equations in schedule order
    CheckInfo info;      // symbol tables of the normalized program
    std::optional<StateModel> model;
    std::optional<HornSystem> horn;
    std::string smtlib;
    std::vector<std::string> generated_nodes;
};

/// parse -> check -> unless-check + automaton expansion -> re-check
/// [-> inline] -> normalize -> re-check -> schedule -> state model ->
/// horn emission. Stops at the first stage with errors. Artifacts are
/// written atomically (temp file + rename).
std::optional<PipelineResult> run_pipeline(const CompilerConfig& config, Diagnostics& diags);

/// Same pipeline over in-memory source text.
std::optional<PipelineResult> run_pipeline_on(const std::string& text,
                                              const CompilerConfig& config, Diagnostics& diags);

enum class VerificationOutcome { Valid, Invalid, Unknown, SolverUnavailable };

/// Runs the configured external CHC solver on the emitted file and maps its
/// first result line (sat / unsat / unknown). "unsat" on the ERR query
/// means the property holds.
VerificationOutcome invoke_solver(const CompilerConfig& config, const std::string& horn_file);

/// Whole-file atomic write; false (with diagnostic) on IO failure.
bool write_file_atomic(const std::string& path, const std::string& content, Diagnostics& diags);

std::optional<std::string> read_file(const std::string& path, Diagnostics& diags);

}  // namespace l2h
