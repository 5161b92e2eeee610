// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "l2h/ast.hpp"
#include "l2h/check.hpp"
#include "l2h/state_model.hpp"

namespace l2h {

struct Sort {
    enum class Kind { Bool, Int, Real, Enum };
    Kind kind = Kind::Bool;
    std::string enum_name;

    static Sort of(const Type& t);
    std::string smt() const;
    bool operator==(const Sort&) const = default;
};

/// First-order term of a rule body: variables, literals, interpreted
/// applications and relation applications.
struct Term {
    enum class Kind { Var, BoolLit, IntLit, RealLit, EnumLit, App, RelApp };
    Kind kind = Kind::BoolLit;
    std::string symbol;  // Var name, EnumLit constructor, App operator, RelApp relation
    bool bool_value = false;
    std::int64_t int_value = 0;
    std::string real_lexeme;
    std::vector<Term> args;
    std::string uid;  // RelApp only: source call instance, not printed

    std::string print() const;
};

Term t_var(std::string name);
Term t_bool(bool value);
Term t_int(std::int64_t value);
Term t_enum(std::string ctor);
Term t_app(std::string op, std::vector<Term> args);
Term t_eq(Term a, Term b);
Term t_not(Term a);
Term t_imp(Term a, Term b);
Term t_ite(Term c, Term a, Term b);
/// Conjunction; flattens singletons and empties.
Term t_and(std::vector<Term> conjuncts);
Term t_rel(std::string name, std::vector<Term> args, std::string uid = "");

struct Relation {
    std::string name;
    std::vector<Sort> args;
};

struct RuleVar {
    std::string name;
    Sort sort;
};

struct HornRule {
    Term body;
    Term head;  // Kind::RelApp
};

/// How one node maps onto the emitted relations; consumed by the trace
/// oracle and the structural tests.
struct NodeEncoding {
    std::string node;
    bool is_function = false;
    std::string step_rel;
    std::string reset_rel;  // empty when stateless
    std::vector<std::string> inputs;   // unprefixed
    std::vector<std::string> outputs;  // unprefixed
    FlatState flat;
    int step_rule = -1;
    int reset_rule = -1;
};

struct HornSystem {
    std::vector<EnumDecl> sorts;
    std::vector<Relation> relations;
    std::vector<RuleVar> variables;
    std::vector<HornRule> rules;
    std::vector<std::string> queries;
    std::map<std::string, NodeEncoding> nodes;
    std::string reach_rel;  // empty when no collecting semantics was emitted

    const Relation* find_relation(const std::string& name) const;
    const NodeEncoding* encoding_of_rel(const std::string& rel) const;
};

/// Rule-variable naming: every free variable carries its node prefix so
/// global declare-var lines cannot collide across nodes.
std::string horn_var(const std::string& node, const std::string& name);

struct HornOptions {
    std::string main;  // node whose reachable states are collected
    // Safety property: boolean output of main checked to hold at every
    // reachable step; emits the ERR relation and its query.
    std::optional<std::string> prove_output;
};

/// Emits the modular Horn system for a normalized, scheduled program:
/// enum sorts, one step relation per node, reset relations for stateful
/// nodes, the arrow reset rule, and the collecting semantics of `main`.
std::optional<HornSystem> build_horn(const Program& program, const CheckInfo& info,
                                     const StateModel& model, const HornOptions& options,
                                     Diagnostics& diags);

/// Deterministic SMT-LIB 2 text in the rule/declare-rel/query format.
std::string write_smtlib(const HornSystem& system);

}  // namespace l2h
