// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace l2h {

/// Position inside a source file, 1-based.
struct SourceLoc {
    int line = 0;
    int column = 0;

    bool valid() const { return line > 0; }
    bool operator==(const SourceLoc&) const = default;
};

enum class Severity {
    Error,
    Warning,
};

/// Stable diagnostic codes, rendered as "error[CODE]".
enum class DiagCode {
    Lex,
    Parse,
    DupDef,
    UnknownState,
    Type,
    Clock,
    Causality,
    UnlessMemory,
    Recursion,
    StateWrite,
    MainNode,
    Io,
    Internal,
};

const char* diag_code_name(DiagCode code);

struct Diagnostic {
    Severity severity = Severity::Error;
    DiagCode code = DiagCode::Internal;
    std::string message;
    SourceLoc loc;

    /// "file:line:col: error[CODE]: message"
    std::string render(const std::string& file) const;
};

/// Accumulates diagnostics across pipeline stages. Diagnostics are plain
/// values so tests can assert on them; no stage aborts the process.
class Diagnostics {
public:
    void error(DiagCode code, SourceLoc loc, std::string message) {
        items_.push_back({Severity::Error, code, std::move(message), loc});
    }
    void warning(DiagCode code, SourceLoc loc, std::string message) {
        items_.push_back({Severity::Warning, code, std::move(message), loc});
    }

    bool has_errors() const {
        for (const auto& d : items_) {
            if (d.severity == Severity::Error) return true;
        }
        return false;
    }
    bool empty() const { return items_.empty(); }
    const std::vector<Diagnostic>& items() const { return items_; }

    /// True if some error diagnostic carries the given code.
    bool has_error(DiagCode code) const {
        for (const auto& d : items_) {
            if (d.severity == Severity::Error && d.code == code) return true;
        }
        return false;
    }

    std::string render_all(const std::string& file) const;

private:
    std::vector<Diagnostic> items_;
};

}  // namespace l2h
