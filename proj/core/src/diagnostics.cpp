// SPDX-License-Identifier: Apache-2.0
#include "l2h/diagnostics.hpp"

#include <sstream>

namespace l2h {

const char* diag_code_name(DiagCode code) {
    switch (code) {
        case DiagCode::Lex: return "lex";
        case DiagCode::Parse: return "parse";
        case DiagCode::DupDef: return "dup-def";
        case DiagCode::UnknownState: return "unknown-state";
        case DiagCode::Type: return "type";
        case DiagCode::Clock: return "clock";
        case DiagCode::Causality: return "causality";
        case DiagCode::UnlessMemory: return "unless-memory";
        case DiagCode::Recursion: return "recursion";
        case DiagCode::StateWrite: return "state-write";
        case DiagCode::MainNode: return "main-node";
        case DiagCode::Io: return "io";
        case DiagCode::Internal: return "internal";
    }
    return "internal";
}

std::string Diagnostic::render(const std::string& file) const {
    std::ostringstream os;
    os << file << ':' << loc.line << ':' << loc.column << ": "
       << (severity == Severity::Error ? "error" : "warning") << '['
       << diag_code_name(code) << "]: " << message;
    return os.str();
}

std::string Diagnostics::render_all(const std::string& file) const {
    std::ostringstream os;
    for (const auto& d : items_) os << d.render(file) << '\n';
    return os.str();
}

}  // namespace l2h
