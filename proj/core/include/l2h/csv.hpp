// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "l2h/ast.hpp"
#include "l2h/check.hpp"
#include "l2h/interp.hpp"

namespace l2h {

/// Reads input valuations from CSV text: a header row naming one column per
/// node input, then one row per instant. Values: true/false, integers,
/// reals, enum constructor names.
std::optional<std::vector<std::map<std::string, Value>>> parse_input_csv(
    const std::string& text, const NodeDecl& node, const CheckInfo& info, Diagnostics& diags);

/// Renders a trace's outputs as CSV, one column per output in declaration
/// order.
std::string write_output_csv(const Trace& trace, const NodeDecl& node);

}  // namespace l2h
