// SPDX-License-Identifier: Apache-2.0
#include "l2h/interp.hpp"

#include <cassert>
#include <functional>
#include <random>
#include <sstream>

#include "l2h/normalize.hpp"
#include "l2h/schedule.hpp"
#include "l2h/vars.hpp"

namespace l2h {

bool Value::operator==(const Value& other) const {
    if (kind != other.kind) return false;
    switch (kind) {
        case Kind::None: return true;
        case Kind::Bool: return b == other.b;
        case Kind::Int: return i == other.i;
        case Kind::Real: return r == other.r;
        case Kind::Enum: return ctor == other.ctor;
    }
    return false;
}

std::string Value::to_string() const {
    switch (kind) {
        case Kind::None: return "<none>";
        case Kind::Bool: return b ? "true" : "false";
        case Kind::Int: return std::to_string(i);
        case Kind::Real: {
            std::ostringstream os;
            os << r;
            return os.str();
        }
        case Kind::Enum: return ctor;
    }
    return "<none>";
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

namespace {

void assign_occurrences(const Expr& e, int& counter,
                        std::map<const Expr*, std::string>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, UnaryExpr>) {
                if (n.op == UnaryOp::Pre) out[&e] = "~pre" + std::to_string(++counter);
                assign_occurrences(*n.operand, counter, out);
            } else if constexpr (std::is_same_v<T, ArrowExpr>) {
                out[&e] = "~arrow" + std::to_string(++counter);
                assign_occurrences(*n.init, counter, out);
                assign_occurrences(*n.rest, counter, out);
            } else if constexpr (std::is_same_v<T, CallExpr>) {
                out[&e] = n.uid.empty() ? "~call" + std::to_string(++counter) : n.uid;
                for (const auto& a : n.args) assign_occurrences(a, counter, out);
                if (n.every) assign_occurrences(*n.every, counter, out);
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                assign_occurrences(*n.lhs, counter, out);
                assign_occurrences(*n.rhs, counter, out);
            } else if constexpr (std::is_same_v<T, IteExpr>) {
                assign_occurrences(*n.cond, counter, out);
                assign_occurrences(*n.then_branch, counter, out);
                assign_occurrences(*n.else_branch, counter, out);
            } else if constexpr (std::is_same_v<T, WhenExpr>) {
                assign_occurrences(*n.operand, counter, out);
            } else if constexpr (std::is_same_v<T, MergeExpr>) {
                for (const auto& [c, b] : n.branches) assign_occurrences(b, counter, out);
            } else if constexpr (std::is_same_v<T, TupleExpr>) {
                for (const auto& el : n.elems) assign_occurrences(el, counter, out);
            }
        },
        e.node);
}

std::unique_ptr<StateTree> build_layout(const NodeDecl& node,
                                        const std::map<std::string, std::unique_ptr<StateTree>>& trees,
                                        const CheckInfo& info) {
    auto tree = std::make_unique<StateTree>();
    tree->node = node.name;
    for (const auto& eq : node.equations) {
        switch (classify_equation(eq)) {
            case NormEqKind::Memory: {
                const VarInfo* vi = info.var_info(node.name, eq.targets[0]);
                tree->mems.push_back({eq.targets[0], vi ? vi->type : eq.rhs.type});
                break;
            }
            case NormEqKind::Call: {
                const auto& call = eq.rhs.as<CallExpr>();
                auto it = trees.find(call.callee);
                if (it != trees.end() && !it->second->empty()) {
                    tree->insts.push_back({call.callee, call.uid, it->second.get()});
                }
                break;
            }
            case NormEqKind::Simple:
                break;
        }
    }
    return tree;
}

}  // namespace

const StateTree* Interpreter::tree_of(const std::string& node) const {
    auto it = trees_.find(node);
    return it == trees_.end() ? nullptr : it->second.get();
}

std::optional<Interpreter> Interpreter::create(const Program& program, const CheckInfo& info,
                                               Diagnostics& diags) {
    Interpreter interp;
    interp.program_ = &program;
    interp.info_ = &info;

    {
        auto arrow = std::make_unique<StateTree>();
        arrow->node = kArrowNode;
        arrow->mems.push_back({"init", Type::boolean()});
        interp.trees_[kArrowNode] = std::move(arrow);
    }
    // Callees precede callers in dependency order; iterate until stable.
    // The call graph is acyclic, so two passes in program order suffice
    // only when callees come first; a worklist keeps it order-independent.
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& node : program.nodes) {
            if (interp.trees_.count(node.name)) continue;
            bool ready = true;
            for (const auto& eq : node.equations) {
                if (classify_equation(eq) != NormEqKind::Call) continue;
                const auto& callee = eq.rhs.as<CallExpr>().callee;
                if (program.find_node(callee) && !interp.trees_.count(callee)) ready = false;
            }
            if (!ready) continue;
            interp.trees_[node.name] = build_layout(node, interp.trees_, info);
            changed = true;
        }
    }
    for (const auto& node : program.nodes) {
        if (!interp.trees_.count(node.name)) {
            diags.error(DiagCode::Recursion, node.loc,
                        "recursive node call through '" + node.name + "'");
            return std::nullopt;
        }
    }

    for (const auto& node : program.nodes) {
        if (!node.automata.empty()) {
            diags.error(DiagCode::Internal, node.loc,
                        "node '" + node.name + "' still contains an automaton; expand first");
            return std::nullopt;
        }
        auto schedule = schedule_node(node, diags);
        if (!schedule) return std::nullopt;
        ExecPlan plan;
        plan.node = &node;
        int counter = 0;
        for (const auto& unit : schedule->order) {
            ExecUnit exec;
            exec.targets = unit.targets;
            const Equation& eq = node.equations[unit.eq_index];
            if (unit.component < 0) {
                exec.rhs = eq.rhs.clone();
            } else {
                auto projected =
                    project_component(eq.rhs, static_cast<std::size_t>(unit.component));
                assert(projected);
                exec.rhs = std::move(*projected);
            }
            exec.clock = exec.rhs.clock;
            exec.loc = eq.loc;
            plan.units.push_back(std::move(exec));
        }
        for (const auto& unit : plan.units) assign_occurrences(unit.rhs, counter, plan.occurrence);
        interp.plans_[node.name] = std::move(plan);
    }
    return interp;
}

Value Interpreter::default_value(const Type& type) const {
    switch (type.kind) {
        case Type::Kind::Bool: return Value::boolean(false);
        case Type::Kind::Int: return Value::integer(0);
        case Type::Kind::Real: return Value::real(0.0);
        case Type::Kind::Enum: {
            const auto* ctors = info_->ctors_of(type.enum_name);
            if (!ctors || ctors->empty()) throw EvalError("enum without constructors");
            return Value::enumeration(ctors->front());
        }
        default:
            throw EvalError("no default for type " + type.to_string());
    }
}

InstanceState Interpreter::init_state(const std::string& node) const {
    (void)node;
    return {};
}

void Interpreter::snapshot_tree(const StateTree& tree, const InstanceState& state,
                                const std::string& prefix,
                                std::map<std::string, Value>& out) const {
    for (const auto& mem : tree.mems) {
        auto it = state.memories.find(mem.name);
        const bool is_init = tree.node == kArrowNode && mem.name == "init";
        if (it != state.memories.end()) {
            out[prefix + mem.name] = it->second;
        } else {
            out[prefix + mem.name] = is_init ? Value::boolean(true) : default_value(mem.type);
        }
    }
    for (const auto& inst : tree.insts) {
        static const InstanceState empty;
        auto it = state.children.find(inst.uid);
        const InstanceState& child = it != state.children.end() ? it->second->state : empty;
        snapshot_tree(*inst.child, child, prefix + inst.uid + ".", out);
    }
}

std::map<std::string, Value> Interpreter::flat_snapshot(const std::string& node,
                                                        const InstanceState& state) const {
    const StateTree* tree = tree_of(node);
    if (!tree) throw EvalError("unknown node '" + node + "'");
    std::map<std::string, Value> out;
    snapshot_tree(*tree, state, "", out);
    return out;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

class Runner {
public:
    Runner(const Interpreter& interp, const Interpreter::ExecPlan& plan, InstanceState& state,
           StepRecord* record)
        : interp_(interp), plan_(plan), state_(state), record_(record) {}

    std::map<std::string, Value> run(const std::map<std::string, Value>& inputs) {
        for (const auto& v : plan_.node->inputs) {
            auto it = inputs.find(v.name);
            if (it == inputs.end()) {
                throw EvalError("missing input '" + v.name + "' for node '" + plan_.node->name +
                                "'");
            }
            values_[v.name] = it->second;
        }
        if (record_) {
            record_->state_before = interp_.flat_snapshot(plan_.node->name, state_);
            record_->state_inter = record_->state_before;
        }
        for (const auto& unit : plan_.units) {
            if (clock_active(unit.clock)) {
                run_unit(unit);
            } else {
                // Sub-expressions on coarser clocks (operands of `when`)
                // still advance their state at this instant.
                tick(unit.rhs);
            }
        }
        // Memories advance after every stream of the instant is known.
        std::vector<std::pair<std::string, Value>> updates;
        for (std::size_t i = 0; i < pending_.size(); ++i) {
            const Pending p = pending_[i];  // pending_ may grow while evaluating
            updates.emplace_back(p.key, eval(*p.operand));
        }
        for (auto& [key, value] : updates) state_.memories[key] = value;

        std::map<std::string, Value> outputs;
        for (const auto& v : plan_.node->outputs) {
            auto it = values_.find(v.name);
            if (it == values_.end()) {
                throw EvalError("output '" + v.name + "' of node '" + plan_.node->name +
                                "' was never defined");
            }
            outputs[v.name] = it->second;
        }
        if (record_) {
            record_->values = values_;
            record_->state_after = interp_.flat_snapshot(plan_.node->name, state_);
        }
        return outputs;
    }

private:
    struct Pending {
        std::string key;
        const Expr* operand;
    };

    const Interpreter& interp_;
    const Interpreter::ExecPlan& plan_;
    InstanceState& state_;
    StepRecord* record_;
    std::map<std::string, Value> values_;
    std::vector<Pending> pending_;

    bool clock_active(const Clock& clock) {
        for (const auto& sample : clock.samples) {
            auto it = values_.find(sample.clock_var);
            if (it == values_.end()) return false;  // driver itself absent
            if (it->second.kind != Value::Kind::Enum) {
                throw EvalError("clock variable '" + sample.clock_var + "' is not an enum");
            }
            if (it->second.ctor != sample.ctor) return false;
        }
        return true;
    }

    void run_unit(const Interpreter::ExecUnit& unit) {
        if (unit.rhs.is<CallExpr>()) {
            exec_call(unit.rhs, &unit.targets);
            return;
        }
        if (unit.targets.size() == 1 && unit.rhs.is<UnaryExpr>() &&
            unit.rhs.as<UnaryExpr>().op == UnaryOp::Pre &&
            unit.rhs.as<UnaryExpr>().operand->is<VarExpr>()) {
            // Memory definition: the state slot is named by the target.
            const std::string& key = unit.targets[0];
            auto it = state_.memories.find(key);
            values_[key] = it != state_.memories.end()
                               ? it->second
                               : interp_.default_value(unit.rhs.type);
            pending_.push_back({key, unit.rhs.as<UnaryExpr>().operand.get()});
            return;
        }
        assert(unit.targets.size() == 1 && "non-call tuple unit");
        values_[unit.targets[0]] = eval(unit.rhs);
    }

    InstanceState::Child& child_for(const std::string& key, const std::string& callee) {
        auto it = state_.children.find(key);
        if (it == state_.children.end()) {
            auto child = std::make_unique<InstanceState::Child>();
            child->callee = callee;
            it = state_.children.emplace(key, std::move(child)).first;
        }
        return *it->second;
    }

    static void reset_instance(InstanceState& state) {
        // Resetting re-initializes every arrow in the subtree; plain
        // memories keep their values.
        for (auto& [key, child] : state.children) {
            if (child->callee == kArrowNode) {
                child->state.memories["init"] = Value::boolean(true);
            } else {
                reset_instance(child->state);
            }
        }
    }

    bool arrow_init(InstanceState::Child& child) {
        auto it = child.state.memories.find("init");
        return it == child.state.memories.end() ? true : it->second.b;
    }

    /// Advances state whose own clock is active inside an expression that
    /// is not selected this instant. Only `when` operands (and merge
    /// branches) can sit on a coarser, still-active clock.
    void tick(const Expr& e) {
        if (clock_active(e.clock)) {
            eval(e);
            return;
        }
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, UnaryExpr>) {
                    tick(*n.operand);
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    tick(*n.lhs);
                    tick(*n.rhs);
                } else if constexpr (std::is_same_v<T, IteExpr>) {
                    tick(*n.cond);
                    tick(*n.then_branch);
                    tick(*n.else_branch);
                } else if constexpr (std::is_same_v<T, ArrowExpr>) {
                    tick(*n.init);
                    tick(*n.rest);
                } else if constexpr (std::is_same_v<T, CallExpr>) {
                    for (const auto& a : n.args) tick(a);
                } else if constexpr (std::is_same_v<T, WhenExpr>) {
                    tick(*n.operand);
                } else if constexpr (std::is_same_v<T, MergeExpr>) {
                    for (const auto& [c, b] : n.branches) tick(b);
                } else if constexpr (std::is_same_v<T, TupleExpr>) {
                    for (const auto& el : n.elems) tick(el);
                }
            },
            e.node);
    }

    /// Node call or arrow instance; multi-output only with explicit targets.
    Value exec_call(const Expr& e, const std::vector<std::string>* targets) {
        const auto& call = e.as<CallExpr>();
        const std::string key =
            call.uid.empty() ? plan_.occurrence.at(&e) : call.uid;

        if (call.callee == kArrowNode) {
            InstanceState::Child& child = child_for(key, kArrowNode);
            if (call.every) {
                const Value cond = eval(*call.every);
                if (cond.kind != Value::Kind::Bool) throw EvalError("every condition is not bool");
                if (cond.b) child.state.memories["init"] = Value::boolean(true);
            }
            const bool init = arrow_init(child);
            const std::size_t k = call.args.size() / 2;
            std::vector<Value> first(k), rest(k);
            for (std::size_t j = 0; j < k; ++j) first[j] = eval(call.args[j]);
            for (std::size_t j = 0; j < k; ++j) rest[j] = eval(call.args[j + k]);
            child.state.memories["init"] = Value::boolean(false);
            const std::vector<Value>& selected = init ? first : rest;
            if (!targets) {
                assert(k == 1);
                return selected[0];
            }
            for (std::size_t j = 0; j < k; ++j) values_[(*targets)[j]] = selected[j];
            return Value::none();
        }

        const NodeDecl* callee = interp_.program_->find_node(call.callee);
        if (!callee) throw EvalError("unknown callee '" + call.callee + "'");
        std::map<std::string, Value> child_inputs;
        for (std::size_t j = 0; j < call.args.size(); ++j) {
            child_inputs[callee->inputs[j].name] = eval(call.args[j]);
        }
        InstanceState::Child& child = child_for(key, call.callee);
        if (call.every) {
            const Value cond = eval(*call.every);
            if (cond.kind != Value::Kind::Bool) throw EvalError("every condition is not bool");
            if (cond.b) reset_instance(child.state);
        }
        std::shared_ptr<StepRecord> child_record;
        std::shared_ptr<StepRecord>* record_slot = nullptr;
        if (record_) {
            // Intermediate state: the callee subtree right after the
            // conditional reset, before its step.
            if (const StateTree* tree = interp_.tree_of(call.callee)) {
                interp_.snapshot_tree(*tree, child.state, key + ".", record_->state_inter);
            }
            record_slot = &child_record;
        }
        std::map<std::string, Value> outs =
            interp_.step(call.callee, child.state, child_inputs, record_slot);
        if (record_ && child_record) record_->callees[key] = child_record;
        if (!targets) {
            assert(callee->outputs.size() == 1);
            return outs.at(callee->outputs[0].name);
        }
        for (std::size_t j = 0; j < targets->size(); ++j) {
            values_[(*targets)[j]] = outs.at(callee->outputs[j].name);
        }
        return Value::none();
    }

    Value eval(const Expr& e) {
        return std::visit(
            [&](const auto& n) -> Value {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, BoolLitExpr>) {
                    return Value::boolean(n.value);
                } else if constexpr (std::is_same_v<T, IntLitExpr>) {
                    return Value::integer(n.value);
                } else if constexpr (std::is_same_v<T, RealLitExpr>) {
                    return Value::real(n.value);
                } else if constexpr (std::is_same_v<T, VarExpr>) {
                    auto it = values_.find(n.name);
                    if (it == values_.end()) {
                        throw EvalError("read of absent value '" + n.name + "' in node '" +
                                        plan_.node->name + "'");
                    }
                    return it->second;
                } else if constexpr (std::is_same_v<T, EnumLitExpr>) {
                    return Value::enumeration(n.ctor);
                } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                    if (n.op == UnaryOp::Pre) {
                        const std::string& key = plan_.occurrence.at(&e);
                        pending_.push_back({key, n.operand.get()});
                        auto it = state_.memories.find(key);
                        return it != state_.memories.end() ? it->second
                                                           : interp_.default_value(e.type);
                    }
                    Value v = eval(*n.operand);
                    if (n.op == UnaryOp::Not) {
                        if (v.kind != Value::Kind::Bool) throw EvalError("'not' on non-bool");
                        return Value::boolean(!v.b);
                    }
                    if (v.kind == Value::Kind::Int) return Value::integer(-v.i);
                    if (v.kind == Value::Kind::Real) return Value::real(-v.r);
                    throw EvalError("unary '-' on non-numeric");
                } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    return eval_binary(n);
                } else if constexpr (std::is_same_v<T, IteExpr>) {
                    // Pointwise conditional: both branches advance their
                    // memories every instant; only the value is selected.
                    const Value c = eval(*n.cond);
                    const Value t = eval(*n.then_branch);
                    const Value f = eval(*n.else_branch);
                    if (c.kind != Value::Kind::Bool) throw EvalError("if condition not bool");
                    return c.b ? t : f;
                } else if constexpr (std::is_same_v<T, ArrowExpr>) {
                    const std::string& key = plan_.occurrence.at(&e);
                    InstanceState::Child& child = child_for(key, kArrowNode);
                    const bool init = arrow_init(child);
                    const Value a = eval(*n.init);
                    const Value b = eval(*n.rest);
                    child.state.memories["init"] = Value::boolean(false);
                    return init ? a : b;
                } else if constexpr (std::is_same_v<T, CallExpr>) {
                    return exec_call(e, nullptr);
                } else if constexpr (std::is_same_v<T, WhenExpr>) {
                    return eval(*n.operand);
                } else if constexpr (std::is_same_v<T, MergeExpr>) {
                    auto it = values_.find(n.clock_var);
                    if (it == values_.end() || it->second.kind != Value::Kind::Enum) {
                        throw EvalError("merge driver '" + n.clock_var + "' unavailable");
                    }
                    std::optional<Value> selected;
                    for (const auto& [ctor, branch] : n.branches) {
                        if (ctor == it->second.ctor) {
                            selected = eval(branch);
                        } else {
                            tick(branch);
                        }
                    }
                    if (!selected) {
                        throw EvalError("merge driver value '" + it->second.ctor +
                                        "' matches no branch");
                    }
                    return *selected;
                } else {
                    throw EvalError("tuple expression evaluated as a scalar");
                }
            },
            e.node);
    }

    Value eval_binary(const BinaryExpr& n) {
        const Value a = eval(*n.lhs);
        const Value b = eval(*n.rhs);
        auto need = [&](Value::Kind kind) {
            if (a.kind != kind || b.kind != kind) {
                throw EvalError(std::string("operator '") + binary_op_symbol(n.op) +
                                "' on mismatched sorts");
            }
        };
        auto numeric = [&]() {
            if (a.kind != b.kind || (a.kind != Value::Kind::Int && a.kind != Value::Kind::Real)) {
                throw EvalError(std::string("operator '") + binary_op_symbol(n.op) +
                                "' on non-numeric sorts");
            }
        };
        switch (n.op) {
            case BinaryOp::Add:
                numeric();
                return a.kind == Value::Kind::Int ? Value::integer(a.i + b.i)
                                                  : Value::real(a.r + b.r);
            case BinaryOp::Sub:
                numeric();
                return a.kind == Value::Kind::Int ? Value::integer(a.i - b.i)
                                                  : Value::real(a.r - b.r);
            case BinaryOp::Mul:
                numeric();
                return a.kind == Value::Kind::Int ? Value::integer(a.i * b.i)
                                                  : Value::real(a.r * b.r);
            case BinaryOp::Div:
                need(Value::Kind::Real);
                return Value::real(a.r / b.r);
            case BinaryOp::And:
                need(Value::Kind::Bool);
                return Value::boolean(a.b && b.b);
            case BinaryOp::Or:
                need(Value::Kind::Bool);
                return Value::boolean(a.b || b.b);
            case BinaryOp::Xor:
                need(Value::Kind::Bool);
                return Value::boolean(a.b != b.b);
            case BinaryOp::Eq:
                if (a.kind != b.kind) throw EvalError("'=' on mismatched sorts");
                return Value::boolean(a == b);
            case BinaryOp::Neq:
                if (a.kind != b.kind) throw EvalError("'<>' on mismatched sorts");
                return Value::boolean(!(a == b));
            case BinaryOp::Lt:
                numeric();
                return Value::boolean(a.kind == Value::Kind::Int ? a.i < b.i : a.r < b.r);
            case BinaryOp::Le:
                numeric();
                return Value::boolean(a.kind == Value::Kind::Int ? a.i <= b.i : a.r <= b.r);
            case BinaryOp::Gt:
                numeric();
                return Value::boolean(a.kind == Value::Kind::Int ? a.i > b.i : a.r > b.r);
            case BinaryOp::Ge:
                numeric();
                return Value::boolean(a.kind == Value::Kind::Int ? a.i >= b.i : a.r >= b.r);
        }
        throw EvalError("unhandled operator");
    }
};

std::map<std::string, Value> Interpreter::step(const std::string& node, InstanceState& state,
                                               const std::map<std::string, Value>& inputs,
                                               std::shared_ptr<StepRecord>* record) const {
    auto it = plans_.find(node);
    if (it == plans_.end()) throw EvalError("unknown node '" + node + "'");
    std::shared_ptr<StepRecord> rec;
    if (record) {
        rec = std::make_shared<StepRecord>();
        *record = rec;
    }
    Runner runner(*this, it->second, state, rec.get());
    return runner.run(inputs);
}

Trace Interpreter::run_trace(const std::string& node,
                             const std::vector<std::map<std::string, Value>>& inputs,
                             bool record) const {
    Trace trace;
    InstanceState state = init_state(node);
    for (const auto& step_inputs : inputs) {
        TraceStep step;
        step.inputs = step_inputs;
        std::shared_ptr<StepRecord> rec;
        step.outputs = this->step(node, state, step_inputs, record ? &rec : nullptr);
        step.record = rec;
        trace.steps.push_back(std::move(step));
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Random inputs
// ---------------------------------------------------------------------------

std::vector<std::map<std::string, Value>> random_inputs(const NodeDecl& node,
                                                        const CheckInfo& info, int steps,
                                                        std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::vector<std::map<std::string, Value>> out;
    for (int s = 0; s < steps; ++s) {
        std::map<std::string, Value> instant;
        for (const auto& v : node.inputs) {
            auto type = resolve_type_ref(v.type, info);
            if (!type) throw EvalError("unresolved input type");
            switch (type->kind) {
                case Type::Kind::Bool:
                    instant[v.name] = Value::boolean(engine() % 2 == 0);
                    break;
                case Type::Kind::Int:
                    instant[v.name] =
                        Value::integer(static_cast<std::int64_t>(engine() % 17) - 8);
                    break;
                case Type::Kind::Real:
                    instant[v.name] =
                        Value::real(static_cast<double>(static_cast<std::int64_t>(engine() % 17) - 8));
                    break;
                case Type::Kind::Enum: {
                    const auto* ctors = info.ctors_of(type->enum_name);
                    instant[v.name] = Value::enumeration((*ctors)[engine() % ctors->size()]);
                    break;
                }
                default:
                    throw EvalError("tuple input");
            }
        }
        out.push_back(std::move(instant));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ground checking of the emitted rules
// ---------------------------------------------------------------------------

namespace {

struct GroundCtx {
    const HornSystem* horn;
    const StepRecord* frame;
    const std::map<std::string, Value>* bindings;  // formals, prefixed names
    std::string node;
};

Value ground_eval(const Term& t, const GroundCtx& ctx);

Value resolve_var(const std::string& symbol, const GroundCtx& ctx) {
    if (ctx.bindings) {
        auto it = ctx.bindings->find(symbol);
        if (it != ctx.bindings->end()) return it->second;
    }
    const std::string prefix = ctx.node + ".";
    if (symbol.rfind(prefix, 0) != 0) throw EvalError("unbound variable " + symbol);
    const std::string base = symbol.substr(prefix.size());
    auto lookup_state = [&](const std::map<std::string, Value>& table,
                            const char* suffix) -> const Value* {
        const std::size_t len = 2;  // "_c", "_i", "_x"
        if (base.size() > len && base.compare(base.size() - len, len, suffix) == 0) {
            auto it = table.find(base.substr(0, base.size() - len));
            if (it != table.end()) return &it->second;
        }
        return nullptr;
    };
    if (const Value* v = lookup_state(ctx.frame->state_before, "_c")) return *v;
    if (const Value* v = lookup_state(ctx.frame->state_inter, "_i")) return *v;
    if (const Value* v = lookup_state(ctx.frame->state_after, "_x")) return *v;
    auto it = ctx.frame->values.find(base);
    if (it != ctx.frame->values.end()) return it->second;
    throw EvalError("unbound variable " + symbol);
}

Value ground_rel(const Term& t, const GroundCtx& ctx) {
    const NodeEncoding* enc = nullptr;
    for (const auto& [name, e] : ctx.horn->nodes) {
        if (e.step_rel == t.symbol) {
            enc = &e;
            break;
        }
    }
    if (!enc || enc->step_rule < 0) throw EvalError("unbound relation " + t.symbol);
    if (t.uid.empty()) throw EvalError("relation application without instance id");
    auto frame_it = ctx.frame->callees.find(t.uid);
    if (frame_it == ctx.frame->callees.end()) {
        throw EvalError("no recorded step for instance " + t.uid);
    }
    std::vector<Value> args;
    args.reserve(t.args.size());
    for (const auto& a : t.args) args.push_back(ground_eval(a, ctx));

    std::map<std::string, Value> bindings;
    std::size_t index = 0;
    auto bind = [&](const std::string& name) {
        if (index >= args.size()) throw EvalError("arity mismatch applying " + t.symbol);
        bindings[horn_var(enc->node, name)] = args[index++];
    };
    for (const auto& name : enc->inputs) bind(name);
    for (const auto& name : enc->outputs) bind(name);
    for (const char* label : {"_c", "_x"}) {
        for (const auto& entry : enc->flat) bind(entry.qualified + label);
    }
    if (index != args.size()) throw EvalError("arity mismatch applying " + t.symbol);

    GroundCtx child{ctx.horn, frame_it->second.get(), &bindings, enc->node};
    const Value v = ground_eval(ctx.horn->rules[enc->step_rule].body, child);
    if (v.kind != Value::Kind::Bool) throw EvalError("relation body not boolean");
    return v;
}

Value ground_eval(const Term& t, const GroundCtx& ctx) {
    switch (t.kind) {
        case Term::Kind::Var: return resolve_var(t.symbol, ctx);
        case Term::Kind::BoolLit: return Value::boolean(t.bool_value);
        case Term::Kind::IntLit: return Value::integer(t.int_value);
        case Term::Kind::RealLit: return Value::real(std::stod(t.real_lexeme));
        case Term::Kind::EnumLit: return Value::enumeration(t.symbol);
        case Term::Kind::RelApp: return ground_rel(t, ctx);
        case Term::Kind::App: break;
    }
    const auto& op = t.symbol;
    auto arg = [&](std::size_t i) { return ground_eval(t.args[i], ctx); };
    if (op == "and") {
        for (const auto& c : t.args) {
            const Value v = ground_eval(c, ctx);
            if (v.kind != Value::Kind::Bool) throw EvalError("'and' on non-bool");
            if (!v.b) return Value::boolean(false);
        }
        return Value::boolean(true);
    }
    if (op == "or") {
        for (const auto& c : t.args) {
            const Value v = ground_eval(c, ctx);
            if (v.kind != Value::Kind::Bool) throw EvalError("'or' on non-bool");
            if (v.b) return Value::boolean(true);
        }
        return Value::boolean(false);
    }
    if (op == "=>") {
        const Value a = arg(0);
        if (a.kind != Value::Kind::Bool) throw EvalError("'=>' on non-bool");
        if (!a.b) return Value::boolean(true);
        return arg(1);
    }
    if (op == "not") {
        const Value a = arg(0);
        if (a.kind != Value::Kind::Bool) throw EvalError("'not' on non-bool");
        return Value::boolean(!a.b);
    }
    if (op == "ite") {
        const Value c = arg(0);
        if (c.kind != Value::Kind::Bool) throw EvalError("'ite' condition not bool");
        return c.b ? arg(1) : arg(2);
    }
    if (op == "=") {
        const Value a = arg(0);
        const Value b = arg(1);
        if (a.kind != b.kind) throw EvalError("'=' on mismatched sorts");
        return Value::boolean(a == b);
    }
    if (op == "xor") {
        const Value a = arg(0);
        const Value b = arg(1);
        if (a.kind != Value::Kind::Bool || b.kind != Value::Kind::Bool) {
            throw EvalError("'xor' on non-bool");
        }
        return Value::boolean(a.b != b.b);
    }
    auto numeric2 = [&](auto f_int, auto f_real) {
        const Value a = arg(0);
        const Value b = arg(1);
        if (a.kind == Value::Kind::Int && b.kind == Value::Kind::Int) return f_int(a.i, b.i);
        if (a.kind == Value::Kind::Real && b.kind == Value::Kind::Real) return f_real(a.r, b.r);
        throw EvalError("'" + op + "' on mismatched sorts");
    };
    if (op == "+") {
        return numeric2([](auto a, auto b) { return Value::integer(a + b); },
                        [](auto a, auto b) { return Value::real(a + b); });
    }
    if (op == "-") {
        if (t.args.size() == 1) {
            const Value a = arg(0);
            if (a.kind == Value::Kind::Int) return Value::integer(-a.i);
            if (a.kind == Value::Kind::Real) return Value::real(-a.r);
            throw EvalError("unary '-' on non-numeric");
        }
        return numeric2([](auto a, auto b) { return Value::integer(a - b); },
                        [](auto a, auto b) { return Value::real(a - b); });
    }
    if (op == "*") {
        return numeric2([](auto a, auto b) { return Value::integer(a * b); },
                        [](auto a, auto b) { return Value::real(a * b); });
    }
    if (op == "/") {
        const Value a = arg(0);
        const Value b = arg(1);
        if (a.kind != Value::Kind::Real || b.kind != Value::Kind::Real) {
            throw EvalError("'/' on non-real sorts");
        }
        return Value::real(a.r / b.r);
    }
    if (op == "<") {
        return numeric2([](auto a, auto b) { return Value::boolean(a < b); },
                        [](auto a, auto b) { return Value::boolean(a < b); });
    }
    if (op == "<=") {
        return numeric2([](auto a, auto b) { return Value::boolean(a <= b); },
                        [](auto a, auto b) { return Value::boolean(a <= b); });
    }
    if (op == ">") {
        return numeric2([](auto a, auto b) { return Value::boolean(a > b); },
                        [](auto a, auto b) { return Value::boolean(a > b); });
    }
    if (op == ">=") {
        return numeric2([](auto a, auto b) { return Value::boolean(a >= b); },
                        [](auto a, auto b) { return Value::boolean(a >= b); });
    }
    throw EvalError("unhandled operator '" + op + "'");
}

}  // namespace

StepCheckResult check_step_relation(const std::string& node, const Trace& trace,
                                    const HornSystem& horn) {
    auto it = horn.nodes.find(node);
    if (it == horn.nodes.end() || it->second.step_rule < 0) {
        return {false, -1, "no step rule for node '" + node + "'"};
    }
    const Term& body = horn.rules[it->second.step_rule].body;
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const auto& step = trace.steps[i];
        if (!step.record) return {false, static_cast<int>(i), "trace was not recorded"};
        GroundCtx ctx{&horn, step.record.get(), nullptr, node};
        try {
            const Value v = ground_eval(body, ctx);
            if (v.kind != Value::Kind::Bool || !v.b) {
                return {false, static_cast<int>(i), "step rule body evaluated to false"};
            }
        } catch (const EvalError& e) {
            return {false, static_cast<int>(i), e.what()};
        }
    }
    return {};
}

std::map<std::string, Value> eval_reset_image(const HornSystem& horn, const std::string& node,
                                              const std::map<std::string, Value>& state) {
    auto it = horn.nodes.find(node);
    if (it == horn.nodes.end() || it->second.reset_rule < 0) {
        throw EvalError("no reset rule for node '" + node + "'");
    }
    const NodeEncoding& enc = it->second;
    const Term& body = horn.rules[enc.reset_rule].body;
    std::vector<const Term*> conjuncts;
    if (body.kind == Term::Kind::App && body.symbol == "and") {
        for (const auto& c : body.args) conjuncts.push_back(&c);
    } else {
        conjuncts.push_back(&body);
    }

    const std::string prefix = enc.node + ".";
    auto qualified_of = [&](const std::string& symbol, const char* suffix) -> std::string {
        std::string base = symbol;
        if (base.rfind(prefix, 0) == 0) base = base.substr(prefix.size());
        const std::string tail(suffix);
        if (base.size() > tail.size() &&
            base.compare(base.size() - tail.size(), tail.size(), tail) == 0) {
            return base.substr(0, base.size() - tail.size());
        }
        throw EvalError("reset body variable " + symbol + " lacks the " + tail + " label");
    };

    std::map<std::string, Value> image;
    for (const Term* conjunct : conjuncts) {
        if (conjunct->kind == Term::Kind::App && conjunct->symbol == "=") {
            const Term& lhs = conjunct->args[0];
            const Term& rhs = conjunct->args[1];
            const std::string target = qualified_of(lhs.symbol, "_x");
            if (rhs.kind == Term::Kind::Var) {
                image[target] = state.at(qualified_of(rhs.symbol, "_c"));
            } else if (rhs.kind == Term::Kind::BoolLit) {
                image[target] = Value::boolean(rhs.bool_value);
            } else {
                throw EvalError("unexpected reset equality shape");
            }
            continue;
        }
        if (conjunct->kind == Term::Kind::RelApp) {
            // Child reset application over (subtree_c, subtree_x).
            const NodeEncoding* child = nullptr;
            for (const auto& [name, e] : horn.nodes) {
                if (e.reset_rel == conjunct->symbol) {
                    child = &e;
                    break;
                }
            }
            if (!child) throw EvalError("unbound reset relation " + conjunct->symbol);
            const std::size_t half = conjunct->args.size() / 2;
            const std::string& uid = conjunct->uid;
            std::map<std::string, Value> child_state;
            for (std::size_t i = 0; i < half; ++i) {
                const std::string q = qualified_of(conjunct->args[i].symbol, "_c");
                // Strip the instance prefix to reach the child's own names.
                child_state[q.substr(uid.size() + 1)] = state.at(q);
            }
            auto child_image = eval_reset_image(horn, child->node, child_state);
            for (auto& [k, v] : child_image) image[uid + "." + k] = v;
            continue;
        }
        throw EvalError("unexpected reset body conjunct");
    }
    return image;
}

}  // namespace l2h
