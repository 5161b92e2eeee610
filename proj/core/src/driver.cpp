// SPDX-License-Identifier: Apache-2.0
#include "l2h/driver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "l2h/automaton.hpp"
#include "l2h/inline.hpp"
#include "l2h/normalize.hpp"
#include "l2h/parser.hpp"
#include "l2h/printer.hpp"
#include "l2h/schedule.hpp"

namespace l2h {

std::optional<std::string> read_file(const std::string& path, Diagnostics& diags) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        diags.error(DiagCode::Io, {}, "cannot open '" + path + "'");
        return std::nullopt;
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool write_file_atomic(const std::string& path, const std::string& content, Diagnostics& diags) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            diags.error(DiagCode::Io, {}, "cannot write '" + tmp + "'");
            return false;
        }
        out << content;
        if (!out.good()) {
            diags.error(DiagCode::Io, {}, "write to '" + tmp + "' failed");
            return false;
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        diags.error(DiagCode::Io, {}, "cannot rename '" + tmp + "' to '" + path + "'");
        std::remove(tmp.c_str());
        return false;
    }
    return true;
}

namespace {

/// Reorders each node's equations to its schedule.
bool apply_schedules(Program& program, Diagnostics& diags) {
    for (auto& node : program.nodes) {
        auto schedule = schedule_node(node, diags);
        if (!schedule) return false;
        std::vector<Equation> ordered;
        std::set<std::size_t> seen;
        for (const auto& unit : schedule->order) {
            if (!seen.insert(unit.eq_index).second) continue;  // split components
            ordered.push_back(std::move(node.equations[unit.eq_index]));
        }
        node.equations = std::move(ordered);
    }
    return true;
}

std::string render_state_trees(const Program& program, const StateModel& model) {
    std::string out;
    for (const auto& node : program.nodes) {
        out += model.render(node.name);
    }
    return out;
}

}  // namespace

std::optional<PipelineResult> run_pipeline(const CompilerConfig& config, Diagnostics& diags) {
    auto text = read_file(config.input_path, diags);
    if (!text) return std::nullopt;
    return run_pipeline_on(*text, config, diags);
}

std::optional<PipelineResult> run_pipeline_on(const std::string& text,
                                              const CompilerConfig& config, Diagnostics& diags) {
    auto parsed = parse_text(text, diags);
    if (!parsed) return std::nullopt;

    auto source_info = check_program(*parsed, diags, CheckMode::Source);
    if (!source_info) return std::nullopt;

    if (!config.main_node.empty() && !parsed->find_node(config.main_node)) {
        diags.error(DiagCode::MainNode, {},
                    "main node '" + config.main_node + "' does not exist in '" +
                        config.input_path + "'");
        return std::nullopt;
    }

    PipelineResult result;
    auto expanded = expand_all(*parsed, *source_info, diags);
    if (!expanded) return std::nullopt;
    result.expanded = std::move(expanded->program);
    result.generated_nodes = std::move(expanded->generated_nodes);

    auto expanded_info = check_program(result.expanded, diags, CheckMode::Source);
    if (!expanded_info) return std::nullopt;

    if (!config.emit_clocked_path.empty()) {
        if (!write_file_atomic(config.emit_clocked_path, pretty_print(result.expanded), diags)) {
            return std::nullopt;
        }
    }

    const Program* for_normalization = &result.expanded;
    Program inlined;
    std::optional<CheckInfo> inlined_info;
    if (config.inline_generated && !result.generated_nodes.empty()) {
        std::set<std::string> names(result.generated_nodes.begin(),
                                    result.generated_nodes.end());
        auto folded = inline_calls(result.expanded, names, diags);
        if (!folded) return std::nullopt;
        inlined = std::move(*folded);
        inlined_info = check_program(inlined, diags, CheckMode::Source);
        if (!inlined_info) return std::nullopt;
        for_normalization = &inlined;
    }

    result.normalized = normalize_program(*for_normalization, diags);
    auto info = check_program(result.normalized, diags, CheckMode::Internal);
    if (!info) return std::nullopt;
    if (!apply_schedules(result.normalized, diags)) return std::nullopt;

    for (const auto& node : result.normalized.nodes) {
        std::string why;
        if (!verify_normal_form(node, &why)) {
            diags.error(DiagCode::Internal, node.loc, "normal form violated: " + why);
            return std::nullopt;
        }
        lint_uninitialized_memories(node, diags);
    }
    result.info = std::move(*info);

    if (!config.emit_normalized_path.empty()) {
        if (!write_file_atomic(config.emit_normalized_path, pretty_print(result.normalized),
                               diags)) {
            return std::nullopt;
        }
    }

    auto model = StateModel::build(result.normalized, result.info, diags);
    if (!model) return std::nullopt;
    result.model = std::move(*model);

    if (!config.emit_state_tree_path.empty()) {
        if (!write_file_atomic(config.emit_state_tree_path,
                               render_state_trees(result.normalized, *result.model), diags)) {
            return std::nullopt;
        }
    }

    HornOptions horn_options;
    horn_options.main = config.main_node;
    if (config.prove) {
        const auto colon = config.prove->find(':');
        const std::string prove_node = config.prove->substr(0, colon);
        if (colon == std::string::npos || prove_node != config.main_node) {
            diags.error(DiagCode::MainNode, {},
                        "--prove expects '" + config.main_node + ":<output>'");
            return std::nullopt;
        }
        horn_options.prove_output = config.prove->substr(colon + 1);
    }
    auto horn = build_horn(result.normalized, result.info, *result.model, horn_options, diags);
    if (!horn) return std::nullopt;
    result.horn = std::move(*horn);
    result.smtlib = write_smtlib(*result.horn);

    if (!config.horn_path.empty()) {
        if (!write_file_atomic(config.horn_path, result.smtlib, diags)) return std::nullopt;
    }
    return result;
}

VerificationOutcome invoke_solver(const CompilerConfig& config, const std::string& horn_file) {
    if (config.solver_command.empty()) return VerificationOutcome::SolverUnavailable;

    int out_pipe[2];
    if (pipe(out_pipe) != 0) return VerificationOutcome::SolverUnavailable;

    const pid_t pid = fork();
    if (pid < 0) {
        close(out_pipe[0]);
        close(out_pipe[1]);
        return VerificationOutcome::SolverUnavailable;
    }
    if (pid == 0) {
        setpgid(0, 0);  // own process group, so a timeout kills helpers too
        dup2(out_pipe[1], STDOUT_FILENO);
        close(out_pipe[0]);
        close(out_pipe[1]);
        std::vector<char*> argv;
        for (const auto& arg : config.solver_command) {
            argv.push_back(const_cast<char*>(arg.c_str()));
        }
        std::string file = horn_file;
        argv.push_back(file.data());
        argv.push_back(nullptr);
        execvp(argv[0], argv.data());
        _exit(127);
    }
    close(out_pipe[1]);

    std::string output;
    char buffer[4096];
    const int timeout_ms = config.timeout_seconds * 1000;
    int waited_ms = 0;
    bool timed_out = false;
    while (true) {
        struct pollfd pfd{out_pipe[0], POLLIN, 0};
        const int step_ms = 100;
        const int rc = poll(&pfd, 1, step_ms);
        if (rc > 0) {
            const ssize_t n = read(out_pipe[0], buffer, sizeof buffer);
            if (n <= 0) break;
            output.append(buffer, static_cast<std::size_t>(n));
            continue;
        }
        waited_ms += step_ms;
        if (timeout_ms > 0 && waited_ms >= timeout_ms) {
            timed_out = true;
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            break;
        }
    }
    close(out_pipe[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    if (timed_out) return VerificationOutcome::Unknown;
    if (WIFEXITED(status) && WEXITSTATUS(status) == 127) {
        return VerificationOutcome::SolverUnavailable;
    }

    std::istringstream lines(output);
    std::string line;
    while (std::getline(lines, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line == "unsat") return VerificationOutcome::Valid;
        if (line == "sat") return VerificationOutcome::Invalid;
        if (line == "unknown") return VerificationOutcome::Unknown;
    }
    return VerificationOutcome::Unknown;
}

}  // namespace l2h
