// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "l2h/diagnostics.hpp"

namespace l2h {

// ---------------------------------------------------------------------------
// Types and clocks
// ---------------------------------------------------------------------------

struct Type {
    enum class Kind { Unknown, Bool, Int, Real, Enum, Tuple };

    Kind kind = Kind::Unknown;
    std::string enum_name;     // Kind::Enum
    std::vector<Type> elems;   // Kind::Tuple

    static Type unknown() { return {}; }
    static Type boolean() { return {Kind::Bool, {}, {}}; }
    static Type integer() { return {Kind::Int, {}, {}}; }
    static Type real() { return {Kind::Real, {}, {}}; }
    static Type enumeration(std::string name) { return {Kind::Enum, std::move(name), {}}; }
    static Type tuple(std::vector<Type> elems) { return {Kind::Tuple, {}, std::move(elems)}; }

    bool is_scalar() const { return kind != Kind::Tuple && kind != Kind::Unknown; }
    std::size_t arity() const { return kind == Kind::Tuple ? elems.size() : 1; }
    const Type& element(std::size_t i) const { return kind == Kind::Tuple ? elems[i] : *this; }

    bool operator==(const Type&) const = default;
    std::string to_string() const;
};

/// Resolved clock of a stream: the base clock refined by a chain of enum
/// samplings, outermost last. Empty chain = base clock.
struct Clock {
    struct Sample {
        std::string ctor;
        std::string clock_var;
        bool operator==(const Sample&) const = default;
    };
    std::vector<Sample> samples;

    bool is_base() const { return samples.empty(); }
    bool operator==(const Clock&) const = default;

    /// True if this clock is a (non-strict) prefix of `other`.
    bool is_prefix_of(const Clock& other) const {
        if (samples.size() > other.samples.size()) return false;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (!(samples[i] == other.samples[i])) return false;
        }
        return true;
    }
    std::string to_string() const;
};

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class UnaryOp { Neg, Not, Pre };
enum class BinaryOp { Add, Sub, Mul, Div, And, Or, Xor, Eq, Neq, Lt, Le, Gt, Ge };

const char* binary_op_symbol(BinaryOp op);

struct BoolLitExpr {
    bool value = false;
};
struct IntLitExpr {
    std::int64_t value = 0;
};
struct RealLitExpr {
    double value = 0.0;
    std::string lexeme;  // preserved for byte-identical printing
};
struct VarExpr {
    std::string name;
};
/// Enum constructor used as a value; produced by the resolver from VarExpr.
struct EnumLitExpr {
    std::string ctor;
    std::string enum_type;
};
struct UnaryExpr {
    UnaryOp op;
    ExprPtr operand;
};
struct BinaryExpr {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct IteExpr {
    ExprPtr cond;
    ExprPtr then_branch;
    ExprPtr else_branch;
};
/// e1 -> e2 : e1 at the first instant (after any reset), e2 afterwards.
struct ArrowExpr {
    ExprPtr init;
    ExprPtr rest;
};
struct CallExpr {
    std::string callee;
    std::vector<Expr> args;
    ExprPtr every;     // optional reset condition
    std::string uid;   // assigned by normalization; empty in parsed source
};
struct WhenExpr {
    ExprPtr operand;
    std::string ctor;
    std::string clock_var;
};
struct MergeExpr {
    std::string clock_var;
    std::vector<std::pair<std::string, Expr>> branches;  // (constructor, expr)
};
struct TupleExpr {
    std::vector<Expr> elems;
};

using ExprNode = std::variant<BoolLitExpr, IntLitExpr, RealLitExpr, VarExpr, EnumLitExpr,
                              UnaryExpr, BinaryExpr, IteExpr, ArrowExpr, CallExpr, WhenExpr,
                              MergeExpr, TupleExpr>;

struct Expr {
    ExprNode node;
    SourceLoc loc;
    // Annotations filled by the checker; ignored by structural equality.
    Type type;
    Clock clock;

    Expr() = default;
    explicit Expr(ExprNode n, SourceLoc l = {}) : node(std::move(n)), loc(l) {}
    Expr(Expr&&) = default;
    Expr& operator=(Expr&&) = default;
    Expr(const Expr&) = delete;
    Expr& operator=(const Expr&) = delete;

    Expr clone() const;

    template <typename T>
    bool is() const { return std::holds_alternative<T>(node); }
    template <typename T>
    const T& as() const { return std::get<T>(node); }
    template <typename T>
    T& as() { return std::get<T>(node); }
};

/// Structural equality, ignoring positions and annotations.
bool expr_equal(const Expr& a, const Expr& b);

ExprPtr box(Expr expr);

// Convenience constructors used by compiler passes.
Expr make_var(std::string name, SourceLoc loc = {});
Expr make_bool(bool value, SourceLoc loc = {});
Expr make_int(std::int64_t value, SourceLoc loc = {});
Expr make_enum(std::string ctor, std::string enum_type, SourceLoc loc = {});
Expr make_tuple(std::vector<Expr> elems, SourceLoc loc = {});

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

struct TypeExprRef {
    enum class Kind { Bool, Int, Real, Named };
    Kind kind = Kind::Bool;
    std::string name;  // Kind::Named
    bool operator==(const TypeExprRef&) const = default;
};

struct VarDecl {
    std::string name;
    TypeExprRef type;
    bool is_clock = false;  // declared with the `clock` keyword
    SourceLoc loc;
};
bool var_decl_equal(const VarDecl& a, const VarDecl& b);

struct Equation {
    std::vector<std::string> targets;
    Expr rhs;
    SourceLoc loc;

    Equation() = default;
    Equation(std::vector<std::string> t, Expr e, SourceLoc l = {})
        : targets(std::move(t)), rhs(std::move(e)), loc(l) {}
    Equation(Equation&&) = default;
    Equation& operator=(Equation&&) = default;
    Equation(const Equation&) = delete;
    Equation& operator=(const Equation&) = delete;
    Equation clone() const;
};

struct Transition {
    Expr guard;
    bool is_restart = true;  // restart unless written `resume`
    std::string target;      // empty = self loop on the enclosing state
    SourceLoc loc;

    Transition() = default;
    Transition(Transition&&) = default;
    Transition& operator=(Transition&&) = default;
    Transition(const Transition&) = delete;
    Transition& operator=(const Transition&) = delete;
    Transition clone() const;
};

struct AutomatonDecl;

struct StateDecl {
    std::string name;
    std::vector<Transition> strong_transitions;  // unless clauses, source order
    std::vector<VarDecl> locals;
    std::vector<Equation> equations;
    std::vector<AutomatonDecl> automata;  // nested state machines
    std::vector<Transition> weak_transitions;  // until clauses, source order
    SourceLoc loc;

    StateDecl() = default;
    StateDecl(StateDecl&&) = default;
    StateDecl& operator=(StateDecl&&) = default;
    StateDecl(const StateDecl&) = delete;
    StateDecl& operator=(const StateDecl&) = delete;
    StateDecl clone() const;
};

struct AutomatonDecl {
    std::string name;
    std::vector<StateDecl> states;  // first state is initial
    SourceLoc loc;

    AutomatonDecl() = default;
    AutomatonDecl(AutomatonDecl&&) = default;
    AutomatonDecl& operator=(AutomatonDecl&&) = default;
    AutomatonDecl(const AutomatonDecl&) = delete;
    AutomatonDecl& operator=(const AutomatonDecl&) = delete;
    AutomatonDecl clone() const;
};

struct NodeDecl {
    std::string name;
    bool is_function = false;  // memoryless: no pre, no arrow, no automaton
    std::vector<VarDecl> inputs;
    std::vector<VarDecl> outputs;
    std::vector<VarDecl> locals;
    std::vector<Equation> equations;
    std::vector<AutomatonDecl> automata;
    SourceLoc loc;

    NodeDecl() = default;
    NodeDecl(NodeDecl&&) = default;
    NodeDecl& operator=(NodeDecl&&) = default;
    NodeDecl(const NodeDecl&) = delete;
    NodeDecl& operator=(const NodeDecl&) = delete;
    NodeDecl clone() const;

    const VarDecl* find_var(const std::string& name) const;
};

struct EnumDecl {
    std::string name;
    std::vector<std::string> ctors;
    SourceLoc loc;
};

struct Program {
    std::vector<EnumDecl> type_decls;
    std::vector<NodeDecl> nodes;

    Program() = default;
    Program(Program&&) = default;
    Program& operator=(Program&&) = default;
    Program(const Program&) = delete;
    Program& operator=(const Program&) = delete;
    Program clone() const;

    const NodeDecl* find_node(const std::string& name) const;
    NodeDecl* find_node(const std::string& name);
};

bool equation_equal(const Equation& a, const Equation& b);
bool node_equal(const NodeDecl& a, const NodeDecl& b);
bool program_equal(const Program& a, const Program& b);

/// Name of the builtin polymorphic initialization node; calls to it are
/// introduced by normalization and may not appear in user source.
inline constexpr const char* kArrowNode = "arrow";

/// Reserved prefix for compiler-generated names, rejected in user source.
inline constexpr const char* kReservedPrefix = "__";

}  // namespace l2h
