// SPDX-License-Identifier: Apache-2.0
#include "l2h/automaton.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>

#include "l2h/vars.hpp"

namespace l2h {

namespace {

// Scope chain used while expanding: host declarations plus the locals of
// every enclosing state for nested automata.
struct DeclScope {
    std::vector<const std::vector<VarDecl>*> frames;

    const VarDecl* lookup(const std::string& name) const {
        for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
            for (const auto& v : **it) {
                if (v.name == name) return &v;
            }
        }
        return nullptr;
    }
    bool contains(const std::string& name) const { return lookup(name) != nullptr; }

    /// Declaration-order list of all visible names, outermost frame first.
    std::vector<std::string> ordered_names() const {
        std::vector<std::string> out;
        for (const auto* frame : frames) {
            for (const auto& v : *frame) out.push_back(v.name);
        }
        return out;
    }
};

void collect_state_reads(const StateDecl& state, std::set<std::string>& eq_reads,
                         std::set<std::string>& unless_reads, std::set<std::string>& until_reads) {
    for (const auto& eq : state.equations) collect_free_vars(eq.rhs, ReadMode::All, eq_reads);
    for (const auto& t : state.strong_transitions) {
        collect_free_vars(t.guard, ReadMode::All, unless_reads);
    }
    for (const auto& t : state.weak_transitions) {
        collect_free_vars(t.guard, ReadMode::All, until_reads);
    }
    for (const auto& nested : state.automata) {
        for (const auto& s : nested.states) {
            std::set<std::string> inner_eq, inner_unless, inner_until;
            collect_state_reads(s, inner_eq, inner_unless, inner_until);
            std::set<std::string> locals;
            for (const auto& v : s.locals) locals.insert(v.name);
            auto splice = [&](const std::set<std::string>& reads) {
                for (const auto& r : reads) {
                    if (!locals.count(r)) eq_reads.insert(r);
                }
            };
            splice(inner_eq);
            splice(inner_unless);
            splice(inner_until);
        }
    }
}

StateVarSets collect_var_sets_scoped(const StateDecl& state, const DeclScope& scope) {
    StateVarSets sets;
    std::set<std::string> locals;
    for (const auto& v : state.locals) locals.insert(v.name);
    auto visible = [&](const std::string& name) {
        return !locals.count(name) && scope.contains(name);
    };

    std::set<std::string> eq_reads, unless_reads, until_reads;
    collect_state_reads(state, eq_reads, unless_reads, until_reads);
    for (const auto& r : eq_reads) {
        if (visible(r)) sets.read_eqs.insert(r);
    }
    for (const auto& r : unless_reads) {
        if (visible(r)) sets.read_unless.insert(r);
    }
    for (const auto& r : until_reads) {
        if (visible(r)) sets.read_until.insert(r);
    }
    for (const auto& eq : state.equations) {
        for (const auto& t : eq.targets) {
            if (visible(t)) sets.write_eqs.insert(t);
        }
    }
    for (const auto& nested : state.automata) {
        for (const auto& w : automaton_writes(nested)) {
            if (visible(w)) sets.write_eqs.insert(w);
        }
    }
    return sets;
}

bool expr_has_state(const Expr& e, const Program& program) {
    bool found = false;
    std::function<void(const Expr&)> walk = [&](const Expr& x) {
        if (found) return;
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, UnaryExpr>) {
                    if (n.op == UnaryOp::Pre) {
                        found = true;
                        return;
                    }
                    walk(*n.operand);
                } else if constexpr (std::is_same_v<T, ArrowExpr>) {
                    found = true;
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    walk(*n.lhs);
                    walk(*n.rhs);
                } else if constexpr (std::is_same_v<T, IteExpr>) {
                    walk(*n.cond);
                    walk(*n.then_branch);
                    walk(*n.else_branch);
                } else if constexpr (std::is_same_v<T, CallExpr>) {
                    if (n.every || n.callee == kArrowNode) {
                        found = true;
                        return;
                    }
                    const NodeDecl* callee = program.find_node(n.callee);
                    if (callee && !callee->is_function) {
                        found = true;
                        return;
                    }
                    for (const auto& a : n.args) walk(a);
                } else if constexpr (std::is_same_v<T, WhenExpr>) {
                    walk(*n.operand);
                } else if constexpr (std::is_same_v<T, MergeExpr>) {
                    for (const auto& [c, b] : n.branches) walk(b);
                } else if constexpr (std::is_same_v<T, TupleExpr>) {
                    for (const auto& el : n.elems) walk(el);
                }
            },
            x.node);
    };
    walk(e);
    return found;
}

// Right-nested transition conditional over (restart flag, target state).
// Priority follows source order; literally true/false guards fold so the
// emitted rules stay plain conjunctions of equalities.
Expr build_transition_conditional(const std::vector<Transition>& transitions,
                                  const std::string& self_state, Expr default_value,
                                  const std::map<std::string, std::string>& ctor_of_state,
                                  const std::string& enum_type) {
    Expr acc = std::move(default_value);
    for (auto it = transitions.rbegin(); it != transitions.rend(); ++it) {
        const Transition& t = *it;
        const std::string& target = t.target.empty() ? self_state : t.target;
        std::vector<Expr> parts;
        parts.push_back(make_bool(t.is_restart, t.loc));
        parts.push_back(make_enum(ctor_of_state.at(target), enum_type, t.loc));
        Expr value = make_tuple(std::move(parts), t.loc);
        if (t.guard.is<BoolLitExpr>()) {
            if (t.guard.as<BoolLitExpr>().value) acc = std::move(value);
            continue;
        }
        acc = Expr(IteExpr{box(t.guard.clone()), box(std::move(value)), box(std::move(acc))}, t.loc);
    }
    return acc;
}

struct StatePlan {
    std::string ctor;
    std::string unless_name;
    std::string handler_name;
};

struct AutomatonPlan {
    std::string ck_name;
    std::vector<StatePlan> states;
};

class Expander {
public:
    Expander(const Program& program, Diagnostics& diags) : source_(program), diags_(diags) {}

    std::optional<ExpandResult> run() {
        if (!plan_names()) return std::nullopt;
        if (!precheck_unless()) return std::nullopt;

        ExpandResult result;
        Program& out = result.program;
        out.type_decls = source_.type_decls;
        for (const auto& node : source_.nodes) {
            NodeDecl host = node.clone();
            std::vector<NodeDecl> generated;
            DeclScope scope;
            scope.frames = {&host.inputs, &host.outputs, &host.locals};
            std::vector<AutomatonDecl> automata = std::move(host.automata);
            host.automata.clear();
            for (auto& aut : automata) {
                if (!expand_automaton(node.name, aut, scope, host.locals, host.equations,
                                      generated, out.type_decls)) {
                    return std::nullopt;
                }
            }
            for (auto& g : generated) {
                result.generated_nodes.push_back(g.name);
                out.nodes.push_back(std::move(g));
            }
            out.nodes.push_back(std::move(host));
        }
        if (diags_.has_errors()) return std::nullopt;
        return result;
    }

private:
    const Program& source_;
    Diagnostics& diags_;
    std::map<std::string, AutomatonPlan> plans_;  // keyed "<node>/<automaton>"

    // -- naming -----------------------------------------------------------------

    bool plan_names() {
        // Occurrence counts decide how much qualification generated names need:
        // a state name that is unique program-wide keeps its bare form.
        std::map<std::string, int> state_count;
        std::map<std::string, int> aut_state_count;
        std::set<std::string> taken_nodes;
        std::set<std::string> taken_types;
        std::set<std::string> taken_ctors;
        for (const auto& node : source_.nodes) taken_nodes.insert(node.name);
        for (const auto& decl : source_.type_decls) {
            taken_types.insert(decl.name);
            for (const auto& c : decl.ctors) taken_ctors.insert(c);
        }

        struct Entry {
            const NodeDecl* node;
            const AutomatonDecl* aut;
        };
        std::vector<Entry> entries;
        bool ok = true;
        for (const auto& node : source_.nodes) {
            std::set<std::string> names_in_node;
            std::function<void(const AutomatonDecl&)> visit = [&](const AutomatonDecl& aut) {
                if (!names_in_node.insert(aut.name).second) {
                    diags_.error(DiagCode::DupDef, aut.loc,
                                 "duplicate automaton '" + aut.name + "' in node '" + node.name +
                                     "'");
                    ok = false;
                }
                entries.push_back({&node, &aut});
                for (const auto& state : aut.states) {
                    ++state_count[state.name];
                    ++aut_state_count[aut.name + "." + state.name];
                    for (const auto& nested : state.automata) visit(nested);
                }
            };
            for (const auto& aut : node.automata) visit(aut);
        }
        if (!ok) return false;

        for (const auto& entry : entries) {
            AutomatonPlan plan;
            const bool single = count_automata(*entry.node) == 1;
            std::string ck = single ? entry.node->name + "_ck"
                                    : entry.node->name + "_" + entry.aut->name + "_ck";
            if (taken_types.count(ck)) ck = entry.node->name + "_" + entry.aut->name + "_ck";
            if (!taken_types.insert(ck).second) {
                diags_.error(DiagCode::DupDef, entry.aut->loc,
                             "cannot allocate clock type name '" + ck + "'");
                return false;
            }
            plan.ck_name = ck;
            for (const auto& state : entry.aut->states) {
                StatePlan sp;
                sp.ctor = taken_ctors.count(state.name) ? ck + "_" + state.name : state.name;
                if (!taken_ctors.insert(sp.ctor).second) {
                    diags_.error(DiagCode::DupDef, state.loc,
                                 "cannot allocate state constructor '" + sp.ctor + "'");
                    return false;
                }
                std::vector<std::string> bases;
                if (state_count[state.name] == 1) bases.push_back(state.name);
                if (aut_state_count[entry.aut->name + "." + state.name] == 1) {
                    bases.push_back(entry.aut->name + "_" + state.name);
                }
                bases.push_back(entry.node->name + "_" + entry.aut->name + "_" + state.name);
                bool named = false;
                for (const auto& base : bases) {
                    const std::string unless_name = base + "_unless";
                    const std::string handler_name = base + "_handler_until";
                    if (taken_nodes.count(unless_name) || taken_nodes.count(handler_name)) continue;
                    taken_nodes.insert(unless_name);
                    taken_nodes.insert(handler_name);
                    sp.unless_name = unless_name;
                    sp.handler_name = handler_name;
                    named = true;
                    break;
                }
                if (!named) {
                    diags_.error(DiagCode::DupDef, state.loc,
                                 "cannot allocate generated node names for state '" + state.name +
                                     "'");
                    return false;
                }
                plan.states.push_back(std::move(sp));
            }
            plans_[entry.node->name + "/" + entry.aut->name] = std::move(plan);
        }
        return true;
    }

    static int count_automata(const NodeDecl& node) {
        int count = 0;
        std::function<void(const AutomatonDecl&)> visit = [&](const AutomatonDecl& aut) {
            ++count;
            for (const auto& state : aut.states) {
                for (const auto& nested : state.automata) visit(nested);
            }
        };
        for (const auto& aut : node.automata) visit(aut);
        return count;
    }

    bool precheck_unless() {
        bool ok = true;
        for (const auto& node : source_.nodes) {
            std::function<void(const AutomatonDecl&)> visit = [&](const AutomatonDecl& aut) {
                if (!check_unless_memories(aut, node, diags_)) ok = false;
                for (const auto& state : aut.states) {
                    for (const auto& nested : state.automata) visit(nested);
                }
            };
            for (const auto& aut : node.automata) visit(aut);
        }
        return ok;
    }

    // -- generation --------------------------------------------------------------

    std::vector<VarDecl> decls_for(const std::vector<std::string>& names, const DeclScope& scope,
                                   SourceLoc loc) {
        std::vector<VarDecl> out;
        for (const auto& name : names) {
            const VarDecl* d = scope.lookup(name);
            assert(d && "read variable not in scope");
            VarDecl v = *d;
            v.loc = loc;
            out.push_back(std::move(v));
        }
        return out;
    }

    /// Visible names in declaration order, filtered by membership.
    std::vector<std::string> ordered_subset(const std::set<std::string>& wanted,
                                            const DeclScope& scope) {
        std::vector<std::string> out;
        for (const auto& name : scope.ordered_names()) {
            if (wanted.count(name) && std::find(out.begin(), out.end(), name) == out.end()) {
                out.push_back(name);
            }
        }
        return out;
    }

    NodeDecl build_unless_node(const StateDecl& state, const AutomatonPlan& plan,
                               std::size_t index, const std::vector<std::string>& reads,
                               const std::map<std::string, std::string>& ctor_of_state,
                               const DeclScope& scope) {
        const StatePlan& sp = plan.states[index];
        NodeDecl node;
        node.loc = state.loc;
        node.name = sp.unless_name;
        node.inputs.push_back({"restart_in", {TypeExprRef::Kind::Bool, ""}, false, state.loc});
        node.inputs.push_back(
            {"state_in", {TypeExprRef::Kind::Named, plan.ck_name}, false, state.loc});
        for (auto& d : decls_for(reads, scope, state.loc)) node.inputs.push_back(std::move(d));
        node.outputs.push_back({"restart_act", {TypeExprRef::Kind::Bool, ""}, false, state.loc});
        node.outputs.push_back(
            {"state_act", {TypeExprRef::Kind::Named, plan.ck_name}, false, state.loc});

        // With no live strong transition the putative state stands, and the
        // restart flag decided by the previous weak transition passes through.
        std::vector<Expr> identity;
        identity.push_back(make_var("restart_in", state.loc));
        identity.push_back(make_var("state_in", state.loc));
        Expr body = build_transition_conditional(state.strong_transitions, state.name,
                                                 make_tuple(std::move(identity), state.loc),
                                                 ctor_of_state, plan.ck_name);
        node.equations.emplace_back(std::vector<std::string>{"restart_act", "state_act"},
                                    std::move(body), state.loc);
        bool stateful = false;
        for (const auto& t : state.strong_transitions) {
            stateful = stateful || expr_has_state(t.guard, source_);
        }
        node.is_function = !stateful;
        return node;
    }

    NodeDecl build_handler_node(const StateDecl& state, const AutomatonPlan& plan,
                                std::size_t index, const std::vector<std::string>& reads,
                                const std::vector<std::string>& writes,
                                const std::map<std::string, std::string>& ctor_of_state,
                                const DeclScope& scope) {
        const StatePlan& sp = plan.states[index];
        NodeDecl node;
        node.loc = state.loc;
        node.name = sp.handler_name;
        node.inputs.push_back({"restart_act", {TypeExprRef::Kind::Bool, ""}, false, state.loc});
        node.inputs.push_back(
            {"state_act", {TypeExprRef::Kind::Named, plan.ck_name}, false, state.loc});
        for (auto& d : decls_for(reads, scope, state.loc)) node.inputs.push_back(std::move(d));
        node.outputs.push_back({"restart_in", {TypeExprRef::Kind::Bool, ""}, false, state.loc});
        node.outputs.push_back(
            {"state_in", {TypeExprRef::Kind::Named, plan.ck_name}, false, state.loc});
        for (auto& d : decls_for(writes, scope, state.loc)) node.outputs.push_back(std::move(d));
        node.locals = state.locals;

        std::vector<Expr> stay;
        stay.push_back(make_bool(false, state.loc));
        stay.push_back(make_enum(ctor_of_state.at(state.name), plan.ck_name, state.loc));
        Expr body = build_transition_conditional(state.weak_transitions, state.name,
                                                 make_tuple(std::move(stay), state.loc),
                                                 ctor_of_state, plan.ck_name);
        node.equations.emplace_back(std::vector<std::string>{"restart_in", "state_in"},
                                    std::move(body), state.loc);
        bool stateful = false;
        for (const auto& eq : state.equations) {
            node.equations.push_back(eq.clone());
            stateful = stateful || expr_has_state(eq.rhs, source_);
        }
        for (const auto& t : state.weak_transitions) {
            stateful = stateful || expr_has_state(t.guard, source_);
        }
        node.is_function = !stateful;
        return node;
    }

    bool expand_automaton(const std::string& host_name, AutomatonDecl& aut, DeclScope scope,
                          std::vector<VarDecl>& host_locals, std::vector<Equation>& host_equations,
                          std::vector<NodeDecl>& generated, std::vector<EnumDecl>& type_decls) {
        // Innermost first: nested automata become ordinary state equations.
        for (auto& state : aut.states) {
            scope.frames.push_back(&state.locals);
            std::vector<AutomatonDecl> nested = std::move(state.automata);
            state.automata.clear();
            for (auto& inner : nested) {
                if (!expand_automaton(host_name, inner, scope, state.locals, state.equations,
                                      generated, type_decls)) {
                    return false;
                }
            }
            scope.frames.pop_back();
        }

        const AutomatonPlan& plan = plans_.at(host_name + "/" + aut.name);
        std::map<std::string, std::string> ctor_of_state;
        for (std::size_t i = 0; i < aut.states.size(); ++i) {
            ctor_of_state[aut.states[i].name] = plan.states[i].ctor;
        }

        EnumDecl ck;
        ck.loc = aut.loc;
        ck.name = plan.ck_name;
        for (const auto& sp : plan.states) ck.ctors.push_back(sp.ctor);
        type_decls.push_back(std::move(ck));

        std::vector<StateVarSets> sets;
        std::set<std::string> write_union_set;
        for (const auto& state : aut.states) {
            sets.push_back(collect_var_sets_scoped(state, scope));
            for (const auto& w : sets.back().write_eqs) write_union_set.insert(w);
        }
        bool ok = true;
        for (std::size_t i = 0; i < aut.states.size(); ++i) {
            for (const auto& w : write_union_set) {
                if (!sets[i].write_eqs.count(w)) {
                    diags_.error(DiagCode::StateWrite, aut.states[i].loc,
                                 "variable '" + w + "' not defined in state '" +
                                     aut.states[i].name + "'");
                    ok = false;
                }
            }
        }
        if (!ok) return false;
        const std::vector<std::string> write_union = ordered_subset(write_union_set, scope);

        std::vector<std::vector<std::string>> unless_reads(aut.states.size());
        std::vector<std::vector<std::string>> handler_reads(aut.states.size());
        for (std::size_t i = 0; i < aut.states.size(); ++i) {
            unless_reads[i] = ordered_subset(sets[i].read_unless, scope);
            std::set<std::string> handler_set;
            for (const auto& r : sets[i].read_eqs) handler_set.insert(r);
            for (const auto& r : sets[i].read_until) handler_set.insert(r);
            // Variables the state itself writes are internal to the handler.
            for (const auto& w : write_union_set) handler_set.erase(w);
            handler_reads[i] = ordered_subset(handler_set, scope);
        }

        for (std::size_t i = 0; i < aut.states.size(); ++i) {
            generated.push_back(
                build_unless_node(aut.states[i], plan, i, unless_reads[i], ctor_of_state, scope));
            generated.push_back(build_handler_node(aut.states[i], plan, i, handler_reads[i],
                                                   write_union, ctor_of_state, scope));
        }

        return rewire(aut, plan, scope, unless_reads, handler_reads, write_union, host_locals,
                      host_equations);
    }

    bool rewire(const AutomatonDecl& aut, const AutomatonPlan& plan, const DeclScope& scope,
                const std::vector<std::vector<std::string>>& unless_reads,
                const std::vector<std::vector<std::string>>& handler_reads,
                const std::vector<std::string>& write_union, std::vector<VarDecl>& host_locals,
                std::vector<Equation>& host_equations) {
        const std::string p = aut.name;
        const SourceLoc loc = aut.loc;
        const std::string restart_in = p + "_restart_in";
        const std::string next_restart_in = p + "_next_restart_in";
        const std::string restart_act = p + "_restart_act";
        const std::string state_in = p + "_state_in";
        const std::string next_state_in = p + "_next_state_in";
        const std::string state_act = p + "_state_act";

        for (const auto& name :
             {restart_in, next_restart_in, restart_act, state_in, next_state_in, state_act}) {
            if (scope.contains(name)) {
                diags_.error(DiagCode::DupDef, loc,
                             "generated variable '" + name + "' collides with a declaration");
                return false;
            }
        }
        const TypeExprRef bool_ref{TypeExprRef::Kind::Bool, ""};
        const TypeExprRef ck_ref{TypeExprRef::Kind::Named, plan.ck_name};
        host_locals.push_back({restart_in, bool_ref, false, loc});
        host_locals.push_back({next_restart_in, bool_ref, false, loc});
        host_locals.push_back({restart_act, bool_ref, false, loc});
        host_locals.push_back({state_in, ck_ref, true, loc});
        host_locals.push_back({next_state_in, ck_ref, false, loc});
        host_locals.push_back({state_act, ck_ref, true, loc});

        // (restart_in, state_in) = (false, S1) -> pre (next_restart_in, next_state_in)
        {
            std::vector<Expr> init;
            init.push_back(make_bool(false, loc));
            init.push_back(make_enum(plan.states[0].ctor, plan.ck_name, loc));
            std::vector<Expr> next;
            next.push_back(make_var(next_restart_in, loc));
            next.push_back(make_var(next_state_in, loc));
            Expr pre(UnaryExpr{UnaryOp::Pre, box(make_tuple(std::move(next), loc))}, loc);
            Expr rhs(ArrowExpr{box(make_tuple(std::move(init), loc)), box(std::move(pre))}, loc);
            host_equations.emplace_back(std::vector<std::string>{restart_in, state_in},
                                        std::move(rhs), loc);
        }

        auto sampled = [&](const std::string& var, const std::string& ctor,
                           const std::string& driver) {
            return Expr(WhenExpr{box(make_var(var, loc)), ctor, driver}, loc);
        };

        // Strong transitions, driven by the putative state.
        {
            MergeExpr merge;
            merge.clock_var = state_in;
            for (std::size_t i = 0; i < plan.states.size(); ++i) {
                CallExpr call;
                call.callee = plan.states[i].unless_name;
                call.args.push_back(sampled(restart_in, plan.states[i].ctor, state_in));
                call.args.push_back(sampled(state_in, plan.states[i].ctor, state_in));
                for (const auto& r : unless_reads[i]) {
                    call.args.push_back(sampled(r, plan.states[i].ctor, state_in));
                }
                call.every = box(make_var(restart_in, loc));
                merge.branches.emplace_back(plan.states[i].ctor, Expr(std::move(call), loc));
            }
            host_equations.emplace_back(std::vector<std::string>{restart_act, state_act},
                                        Expr(std::move(merge), loc), loc);
        }

        // Handlers and weak transitions, driven by the actual state.
        {
            MergeExpr merge;
            merge.clock_var = state_act;
            for (std::size_t i = 0; i < plan.states.size(); ++i) {
                CallExpr call;
                call.callee = plan.states[i].handler_name;
                call.args.push_back(sampled(restart_act, plan.states[i].ctor, state_act));
                call.args.push_back(sampled(state_act, plan.states[i].ctor, state_act));
                for (const auto& r : handler_reads[i]) {
                    call.args.push_back(sampled(r, plan.states[i].ctor, state_act));
                }
                call.every = box(make_var(restart_act, loc));
                merge.branches.emplace_back(plan.states[i].ctor, Expr(std::move(call), loc));
            }
            std::vector<std::string> targets{next_restart_in, next_state_in};
            for (const auto& w : write_union) targets.push_back(w);
            host_equations.emplace_back(std::move(targets), Expr(std::move(merge), loc), loc);
        }
        return true;
    }
};

}  // namespace

StateVarSets collect_var_sets(const StateDecl& state, const NodeDecl& host) {
    DeclScope scope;
    scope.frames = {&host.inputs, &host.outputs, &host.locals};
    return collect_var_sets_scoped(state, scope);
}

bool check_unless_memories(const AutomatonDecl& aut, const NodeDecl& host, Diagnostics& diags) {
    (void)host;
    const std::set<std::string> writes = automaton_writes(aut);
    bool ok = true;
    for (const auto& state : aut.states) {
        for (const auto& t : state.strong_transitions) {
            for (const auto& read : free_vars(t.guard, ReadMode::All)) {
                if (writes.count(read)) {
                    diags.error(DiagCode::UnlessMemory, t.loc,
                                "unless guard reads automaton-defined variable '" + read + "'");
                    ok = false;
                }
            }
        }
    }
    return ok;
}

std::optional<ExpandResult> expand_all(const Program& program, const CheckInfo& info,
                                       Diagnostics& diags) {
    (void)info;
    return Expander(program, diags).run();
}

}  // namespace l2h
