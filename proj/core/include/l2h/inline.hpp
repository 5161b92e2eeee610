// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <string>

#include "l2h/ast.hpp"

namespace l2h {

/// Replaces calls to the named nodes by their defining expressions: formal
/// inputs substitute to the (sampled) argument expressions and every output
/// unfolds through the callee's own equations. Arrows inside an inlined
/// callee under `f(...) every r` become conditionals guarded by `true -> r`,
/// which reproduces the reset behavior in plain operators; memories are
/// unaffected by reset and splice unchanged. The inlined nodes are removed
/// from the program when no call to them remains.
std::optional<Program> inline_calls(const Program& program, const std::set<std::string>& callees,
                                    Diagnostics& diags);

}  // namespace l2h
