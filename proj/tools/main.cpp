// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: `compile` runs the full pipeline and writes the
// requested artifacts; `simulate` executes a node on CSV inputs.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "l2h/csv.hpp"
#include "l2h/driver.hpp"
#include "l2h/interp.hpp"
#include "l2h/printer.hpp"

namespace {

std::vector<std::string> split_command(const std::string& text) {
    std::vector<std::string> parts;
    std::istringstream in(text);
    std::string word;
    while (in >> word) parts.push_back(word);
    return parts;
}

void print_diagnostics(const l2h::Diagnostics& diags, const std::string& file) {
    std::cerr << diags.render_all(file);
}

int run_compile(const l2h::CompilerConfig& config) {
    l2h::Diagnostics diags;
    auto result = l2h::run_pipeline(config, diags);
    print_diagnostics(diags, config.input_path);
    if (!result) return l2h::kExitDiagnostics;

    if (config.prove && !config.horn_path.empty()) {
        if (config.solver_command.empty()) {
            std::cout << "property emitted as a query; no solver configured" << std::endl;
            return l2h::kExitOk;
        }
        switch (l2h::invoke_solver(config, config.horn_path)) {
            case l2h::VerificationOutcome::Valid:
                std::cout << "valid" << std::endl;
                return l2h::kExitOk;
            case l2h::VerificationOutcome::Invalid:
                std::cout << "invalid" << std::endl;
                return l2h::kExitInvalid;
            case l2h::VerificationOutcome::Unknown:
                std::cout << "unknown" << std::endl;
                return l2h::kExitSolverUnavailable;
            case l2h::VerificationOutcome::SolverUnavailable:
                std::cout << "solver unavailable" << std::endl;
                return l2h::kExitSolverUnavailable;
        }
    }
    return l2h::kExitOk;
}

int run_simulate(const std::string& input_path, const std::string& node_name, int steps,
                 const std::string& csv_path, const std::string& output_path) {
    l2h::CompilerConfig config;
    config.input_path = input_path;
    config.main_node = node_name;
    l2h::Diagnostics diags;
    auto result = l2h::run_pipeline(config, diags);
    if (!result) {
        print_diagnostics(diags, input_path);
        return l2h::kExitDiagnostics;
    }
    const l2h::NodeDecl* node = result->normalized.find_node(node_name);
    auto interp = l2h::Interpreter::create(result->normalized, result->info, diags);
    if (!interp) {
        print_diagnostics(diags, input_path);
        return l2h::kExitDiagnostics;
    }

    std::vector<std::map<std::string, l2h::Value>> inputs;
    if (!csv_path.empty()) {
        auto text = l2h::read_file(csv_path, diags);
        if (!text) {
            print_diagnostics(diags, csv_path);
            return l2h::kExitDiagnostics;
        }
        auto parsed = l2h::parse_input_csv(*text, *node, result->info, diags);
        if (!parsed) {
            print_diagnostics(diags, csv_path);
            return l2h::kExitDiagnostics;
        }
        inputs = std::move(*parsed);
        if (steps > 0 && static_cast<std::size_t>(steps) < inputs.size()) {
            inputs.resize(static_cast<std::size_t>(steps));
        }
    } else {
        // No CSV: run the requested number of instants on default inputs.
        for (int s = 0; s < steps; ++s) {
            std::map<std::string, l2h::Value> instant;
            for (const auto& v : node->inputs) {
                auto type = l2h::resolve_type_ref(v.type, result->info);
                instant[v.name] = interp->default_value(*type);
            }
            inputs.push_back(std::move(instant));
        }
    }

    try {
        const l2h::Trace trace = interp->run_trace(node_name, inputs);
        const std::string csv = l2h::write_output_csv(trace, *node);
        if (output_path.empty()) {
            std::cout << csv;
        } else if (!l2h::write_file_atomic(output_path, csv, diags)) {
            print_diagnostics(diags, output_path);
            return l2h::kExitDiagnostics;
        }
    } catch (const l2h::EvalError& e) {
        std::cerr << "evaluation error: " << e.what() << std::endl;
        return l2h::kExitDiagnostics;
    }
    return l2h::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lustre-subset compiler emitting modular constrained Horn clauses"};
    app.require_subcommand(1);

    l2h::CompilerConfig config;
    std::string prove;
    std::vector<std::string> solver_args;

    auto* compile = app.add_subcommand("compile", "compile a .lus file");
    compile->add_option("file", config.input_path, "input program (.lus)")->required();
    compile->add_option("--node", config.main_node, "main node")->required();
    compile->add_option("--horn", config.horn_path, "write the Horn system (.smt2)");
    compile->add_option("--emit-clocked", config.emit_clocked_path,
                        "write the automaton-free program");
    compile->add_option("--emit-normalized", config.emit_normalized_path,
                        "write the normalized program");
    compile->add_option("--emit-state-tree", config.emit_state_tree_path,
                        "write the per-node memory trees");
    compile->add_flag("--inline", config.inline_generated,
                      "inline generated state nodes before emission");
    compile->add_option("--prove", prove, "safety property <node>:<output>");
    compile->add_option("--solver", solver_args, "external CHC solver command");
    compile->add_option("--timeout", config.timeout_seconds, "solver timeout in seconds");

    std::string sim_file, sim_node, sim_input, sim_output;
    int sim_steps = 0;
    auto* simulate = app.add_subcommand("simulate", "run a node on CSV inputs");
    simulate->add_option("file", sim_file, "input program (.lus)")->required();
    simulate->add_option("--node", sim_node, "node to execute")->required();
    simulate->add_option("--steps", sim_steps, "number of instants");
    simulate->add_option("--input", sim_input, "CSV with one column per input");
    simulate->add_option("--output", sim_output, "output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return l2h::kExitUsage;
    }

    if (compile->parsed()) {
        if (!prove.empty()) {
            if (config.horn_path.empty()) {
                std::cerr << "--prove requires --horn" << std::endl;
                return l2h::kExitUsage;
            }
            config.prove = prove;
        }
        if (!solver_args.empty()) {
            config.solver_command = solver_args;
        } else if (const char* env = std::getenv("HORN_SOLVER")) {
            config.solver_command = split_command(env);
        }
        return run_compile(config);
    }
    if (simulate->parsed()) {
        if (sim_input.empty() && sim_steps <= 0) {
            std::cerr << "simulate needs --input or --steps" << std::endl;
            return l2h::kExitUsage;
        }
        return run_simulate(sim_file, sim_node, sim_steps, sim_input, sim_output);
    }
    return l2h::kExitUsage;
}
