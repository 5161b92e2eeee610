// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "l2h/ast.hpp"

namespace l2h {

/// Per-variable results of the analysis.
struct VarInfo {
    Type type;
    Clock clock;
    bool is_clock_decl = false;
    enum class Role { Input, Output, Local } role = Role::Local;
};

/// Symbol tables and annotations computed by type and clock checking.
struct CheckInfo {
    std::map<std::string, std::vector<std::string>> enums;  // type name -> ctors
    std::map<std::string, std::string> ctor_owner;          // ctor -> type name
    // Variable info per automaton-free node; nodes that still contain
    // automata only get entries for their node-level variables.
    std::map<std::string, std::map<std::string, VarInfo>> node_vars;

    const std::vector<std::string>* ctors_of(const std::string& enum_name) const {
        auto it = enums.find(enum_name);
        return it == enums.end() ? nullptr : &it->second;
    }
    std::optional<std::string> enum_of_ctor(const std::string& ctor) const {
        auto it = ctor_owner.find(ctor);
        if (it == ctor_owner.end()) return std::nullopt;
        return it->second;
    }
    const VarInfo* var_info(const std::string& node, const std::string& var) const {
        auto nit = node_vars.find(node);
        if (nit == node_vars.end()) return nullptr;
        auto vit = nit->second.find(var);
        return vit == nit->second.end() ? nullptr : &vit->second;
    }
};

/// Pass configuration: Source rejects compiler-internal constructs (arrow
/// calls, call uids) that may not appear in user programs; Internal accepts
/// them so the checker can re-run on generated and normalized code.
enum class CheckMode { Source, Internal };

/// Type checks, resolves enum constructors in place, infers clocks by
/// unification and annotates every expression. Returns the symbol tables,
/// or nullopt after reporting diagnostics.
std::optional<CheckInfo> check_program(Program& program, Diagnostics& diags,
                                       CheckMode mode = CheckMode::Source);

/// Resolves a declared type reference against the enum table.
std::optional<Type> resolve_type_ref(const TypeExprRef& ref, const CheckInfo& info);

}  // namespace l2h
