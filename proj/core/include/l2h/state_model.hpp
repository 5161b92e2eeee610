// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "l2h/ast.hpp"
#include "l2h/check.hpp"

namespace l2h {

/// Per-node tree of memories and callee instances. Memories come first,
/// then instances, each in first-occurrence order of the defining equation.
struct StateTree {
    struct Mem {
        std::string name;
        Type type;
    };
    struct Inst {
        std::string callee;
        std::string uid;
        const StateTree* child = nullptr;
    };
    std::string node;
    std::vector<Mem> mems;
    std::vector<Inst> insts;

    bool empty() const { return mems.empty() && insts.empty(); }
};

/// One scalar slot of the flattened state: qualified name (uids joined by
/// '.') and its type. Labels (_c, _i, _x) are appended by the backend.
struct FlatEntry {
    std::string qualified;
    Type type;
    bool is_arrow_init = false;
};

using FlatState = std::vector<FlatEntry>;

/// Computes and memoizes the state trees of a normalized program.
class StateModel {
public:
    /// Builds trees for every node. The call graph is acyclic by the
    /// frontend check; a cycle found here is an internal error.
    static std::optional<StateModel> build(const Program& program, const CheckInfo& info,
                                           Diagnostics& diags);

    const StateTree& tree(const std::string& node) const { return *trees_.at(node); }
    bool has(const std::string& node) const { return trees_.count(node) > 0; }
    bool is_stateful(const std::string& node) const { return !tree(node).empty(); }

    /// Pre-order flattening: own memories first, then each instance subtree
    /// prefixed by its uid.
    FlatState flatten(const std::string& node) const;
    static FlatState flatten(const StateTree& tree);

    /// Indented text form, one line per memory or instance.
    std::string render(const std::string& node) const;

private:
    std::map<std::string, std::unique_ptr<StateTree>> trees_;
};

}  // namespace l2h
