// SPDX-License-Identifier: Apache-2.0
#include "l2h/state_model.hpp"

#include <functional>
#include <sstream>

#include "l2h/normalize.hpp"

namespace l2h {

namespace {

// The builtin arrow node owns a single boolean memory `init`.
std::unique_ptr<StateTree> arrow_tree() {
    auto tree = std::make_unique<StateTree>();
    tree->node = kArrowNode;
    tree->mems.push_back({"init", Type::boolean()});
    return tree;
}

}  // namespace

std::optional<StateModel> StateModel::build(const Program& program, const CheckInfo& info,
                                            Diagnostics& diags) {
    StateModel model;
    model.trees_[kArrowNode] = arrow_tree();

    bool ok = true;
    std::function<const StateTree*(const NodeDecl&, std::vector<std::string>&)> build_tree =
        [&](const NodeDecl& node, std::vector<std::string>& stack) -> const StateTree* {
        auto found = model.trees_.find(node.name);
        if (found != model.trees_.end()) return found->second.get();
        for (const auto& name : stack) {
            if (name == node.name) {
                diags.error(DiagCode::Recursion, node.loc,
                            "recursive node call through '" + node.name + "'");
                ok = false;
                return nullptr;
            }
        }
        stack.push_back(node.name);
        auto tree = std::make_unique<StateTree>();
        tree->node = node.name;
        for (const auto& eq : node.equations) {
            switch (classify_equation(eq)) {
                case NormEqKind::Memory: {
                    const VarInfo* vi = info.var_info(node.name, eq.targets[0]);
                    tree->mems.push_back(
                        {eq.targets[0], vi ? vi->type : eq.rhs.type});
                    break;
                }
                case NormEqKind::Call: {
                    const auto& call = eq.rhs.as<CallExpr>();
                    const StateTree* child = nullptr;
                    if (call.callee == kArrowNode) {
                        child = model.trees_.at(kArrowNode).get();
                    } else if (const NodeDecl* callee = program.find_node(call.callee)) {
                        child = build_tree(*callee, stack);
                        if (!child) {
                            stack.pop_back();
                            return nullptr;
                        }
                    }
                    if (child && !child->empty()) {
                        tree->insts.push_back({call.callee, call.uid, child});
                    }
                    break;
                }
                case NormEqKind::Simple:
                    break;
            }
        }
        stack.pop_back();
        const StateTree* result = tree.get();
        model.trees_[node.name] = std::move(tree);
        return result;
    };

    for (const auto& node : program.nodes) {
        std::vector<std::string> stack;
        if (!build_tree(node, stack)) break;
    }
    if (!ok || diags.has_errors()) return std::nullopt;
    return model;
}

FlatState StateModel::flatten(const StateTree& tree) {
    FlatState flat;
    std::function<void(const StateTree&, const std::string&)> walk =
        [&](const StateTree& t, const std::string& prefix) {
            for (const auto& mem : t.mems) {
                const bool is_init = t.node == kArrowNode && mem.name == "init";
                flat.push_back({prefix + mem.name, mem.type, is_init});
            }
            for (const auto& inst : t.insts) {
                walk(*inst.child, prefix + inst.uid + ".");
            }
        };
    walk(tree, "");
    return flat;
}

FlatState StateModel::flatten(const std::string& node) const { return flatten(tree(node)); }

std::string StateModel::render(const std::string& node) const {
    std::ostringstream os;
    std::function<void(const StateTree&, int)> walk = [&](const StateTree& t, int depth) {
        const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
        for (const auto& mem : t.mems) {
            os << indent << "mem " << mem.name << ": " << mem.type.to_string() << '\n';
        }
        for (const auto& inst : t.insts) {
            os << indent << "inst " << inst.uid << " (" << inst.callee << ")\n";
            walk(*inst.child, depth + 1);
        }
    };
    os << node << '\n';
    walk(tree(node), 1);
    return os.str();
}

}  // namespace l2h
