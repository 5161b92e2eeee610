// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "l2h/ast.hpp"
#include "l2h/check.hpp"
#include "l2h/horn.hpp"
#include "l2h/state_model.hpp"

namespace l2h {

/// Concrete stream value at one instant.
struct Value {
    enum class Kind { None, Bool, Int, Real, Enum };
    Kind kind = Kind::None;
    bool b = false;
    std::int64_t i = 0;
    double r = 0.0;
    std::string ctor;

    static Value none() { return {}; }
    static Value boolean(bool v) {
        Value x;
        x.kind = Kind::Bool;
        x.b = v;
        return x;
    }
    static Value integer(std::int64_t v) {
        Value x;
        x.kind = Kind::Int;
        x.i = v;
        return x;
    }
    static Value real(double v) {
        Value x;
        x.kind = Kind::Real;
        x.r = v;
        return x;
    }
    static Value enumeration(std::string c) {
        Value x;
        x.kind = Kind::Enum;
        x.ctor = std::move(c);
        return x;
    }
    bool is_none() const { return kind == Kind::None; }
    bool operator==(const Value& other) const;
    std::string to_string() const;
};

/// Runtime guard: clock discipline violations, unbound reads and sort
/// confusion are compiler bugs surfaced by the oracle, not user errors.
struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

/// Memory tree of one node instance. Children are keyed by call uid (or a
/// synthetic occurrence key for un-normalized expressions).
struct InstanceState {
    struct Child;
    std::map<std::string, Value> memories;
    std::map<std::string, std::unique_ptr<Child>> children;
};
struct InstanceState::Child {
    std::string callee;
    InstanceState state;
};

/// Everything the oracle needs about one executed instant of one instance.
struct StepRecord {
    std::map<std::string, Value> values;        // inputs, outputs, locals
    std::map<std::string, Value> state_before;  // qualified name -> value
    std::map<std::string, Value> state_inter;   // after conditional resets
    std::map<std::string, Value> state_after;
    std::map<std::string, std::shared_ptr<StepRecord>> callees;  // by uid
};

struct TraceStep {
    std::map<std::string, Value> inputs;
    std::map<std::string, Value> outputs;
    std::shared_ptr<StepRecord> record;  // set when recording was requested
};

struct Trace {
    std::vector<TraceStep> steps;
};

/// Reference executor for automaton-free programs, normalized or not.
/// Instances own their state; independent traces may run concurrently on
/// separate Interpreter-created states.
class Interpreter {
public:
    /// Prepares execution plans (schedules) for every node; fails on
    /// causality errors.
    static std::optional<Interpreter> create(const Program& program, const CheckInfo& info,
                                             Diagnostics& diags);

    /// Fresh instance state; memories take type defaults on first read and
    /// arrow instances start initialized.
    InstanceState init_state(const std::string& node) const;

    /// One synchronous step. Returns the outputs and advances the state.
    std::map<std::string, Value> step(const std::string& node, InstanceState& state,
                                      const std::map<std::string, Value>& inputs,
                                      std::shared_ptr<StepRecord>* record = nullptr) const;

    Trace run_trace(const std::string& node,
                    const std::vector<std::map<std::string, Value>>& inputs,
                    bool record = false) const;

    /// Flattened snapshot with qualified names matching the Horn backend;
    /// absent slots materialize as defaults. Meaningful for normalized nodes.
    std::map<std::string, Value> flat_snapshot(const std::string& node,
                                               const InstanceState& state) const;

    Value default_value(const Type& type) const;
    const Program& program() const { return *program_; }

private:
    friend class Runner;
    struct ExecUnit {
        std::vector<std::string> targets;
        Expr rhs;
        Clock clock;
        SourceLoc loc;
    };
    struct ExecPlan {
        const NodeDecl* node = nullptr;
        std::vector<ExecUnit> units;
        std::map<const Expr*, std::string> occurrence;  // stateful sub-expressions
    };

    const Program* program_ = nullptr;
    const CheckInfo* info_ = nullptr;
    std::map<std::string, ExecPlan> plans_;
    std::map<std::string, std::unique_ptr<StateTree>> trees_;  // Definition 1 layouts

    const StateTree* tree_of(const std::string& node) const;
    void snapshot_tree(const StateTree& tree, const InstanceState& state, const std::string& prefix,
                       std::map<std::string, Value>& out) const;
};

/// Uniformly random type-correct inputs: booleans fair, integers in
/// [-8, 8], constructors uniform. Deterministic for a fixed seed.
std::vector<std::map<std::string, Value>> random_inputs(const NodeDecl& node,
                                                        const CheckInfo& info, int steps,
                                                        std::uint64_t seed);

struct StepCheckResult {
    bool ok = true;
    int violating_instant = -1;
    std::string detail;
};

/// Substitutes each recorded instant of the trace into the node's step rule
/// body — callee relations checked recursively against their own frames —
/// and evaluates the ground formula. The trace must have been recorded.
StepCheckResult check_step_relation(const std::string& node, const Trace& trace,
                                    const HornSystem& horn);

/// Image of a concrete state under the emitted reset relation, following
/// its defining equalities (and child reset applications) structurally.
std::map<std::string, Value> eval_reset_image(const HornSystem& horn, const std::string& node,
                                              const std::map<std::string, Value>& state);

}  // namespace l2h
