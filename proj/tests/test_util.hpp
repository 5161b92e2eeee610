// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "l2h/automaton.hpp"
#include "l2h/check.hpp"
#include "l2h/parser.hpp"

namespace l2h::test {

inline std::string corpus_path(const std::string& name) {
    return std::string(L2H_CORPUS_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline std::string read_corpus(const std::string& name) { return read_file(corpus_path(name)); }

inline Program parse_ok(const std::string& text) {
    Diagnostics diags;
    auto program = parse_text(text, diags);
    if (!program) {
        ADD_FAILURE() << "parse failed:\n" << diags.render_all("<test>");
        throw std::runtime_error("parse failed");
    }
    return std::move(*program);
}

struct Checked {
    Program program;
    CheckInfo info;
};

inline Checked check_ok(const std::string& text, CheckMode mode = CheckMode::Source) {
    Diagnostics diags;
    auto program = parse_text(text, diags);
    if (!program) {
        ADD_FAILURE() << "parse failed:\n" << diags.render_all("<test>");
        throw std::runtime_error("parse failed");
    }
    auto info = check_program(*program, diags, mode);
    if (!info) {
        ADD_FAILURE() << "check failed:\n" << diags.render_all("<test>");
        throw std::runtime_error("check failed");
    }
    return {std::move(*program), std::move(*info)};
}

/// parse + check + expand + re-check, as the pipeline runs it.
inline Checked expand_ok(const std::string& text) {
    Checked checked = check_ok(text);
    Diagnostics diags;
    auto expanded = expand_all(checked.program, checked.info, diags);
    if (!expanded) {
        ADD_FAILURE() << "expansion failed:\n" << diags.render_all("<test>");
        throw std::runtime_error("expansion failed");
    }
    auto info = check_program(expanded->program, diags, CheckMode::Source);
    if (!info) {
        ADD_FAILURE() << "re-check of expansion failed:\n" << diags.render_all("<test>");
        throw std::runtime_error("re-check failed");
    }
    return {std::move(expanded->program), std::move(*info)};
}

}  // namespace l2h::test
