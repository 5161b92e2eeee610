// SPDX-License-Identifier: Apache-2.0
#include "l2h/csv.hpp"

#include <sstream>

namespace l2h {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    cells.push_back(cell);
    for (auto& s : cells) {
        const auto begin = s.find_first_not_of(" \t");
        const auto end = s.find_last_not_of(" \t");
        s = begin == std::string::npos ? "" : s.substr(begin, end - begin + 1);
    }
    return cells;
}

std::optional<Value> parse_cell(const std::string& cell, const Type& type,
                                const CheckInfo& info) {
    switch (type.kind) {
        case Type::Kind::Bool:
            if (cell == "true" || cell == "1") return Value::boolean(true);
            if (cell == "false" || cell == "0") return Value::boolean(false);
            return std::nullopt;
        case Type::Kind::Int:
            try {
                std::size_t used = 0;
                const long long v = std::stoll(cell, &used);
                if (used != cell.size()) return std::nullopt;
                return Value::integer(v);
            } catch (...) {
                return std::nullopt;
            }
        case Type::Kind::Real:
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                if (used != cell.size()) return std::nullopt;
                return Value::real(v);
            } catch (...) {
                return std::nullopt;
            }
        case Type::Kind::Enum: {
            const auto* ctors = info.ctors_of(type.enum_name);
            if (!ctors) return std::nullopt;
            for (const auto& c : *ctors) {
                if (c == cell) return Value::enumeration(c);
            }
            return std::nullopt;
        }
        default:
            return std::nullopt;
    }
}

}  // namespace

std::optional<std::vector<std::map<std::string, Value>>> parse_input_csv(
    const std::string& text, const NodeDecl& node, const CheckInfo& info, Diagnostics& diags) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        header = split_row(line);
        break;
    }
    if (header.empty()) {
        diags.error(DiagCode::Io, {line_no, 1}, "input CSV has no header row");
        return std::nullopt;
    }
    std::vector<const VarDecl*> columns;
    for (const auto& name : header) {
        const VarDecl* found = nullptr;
        for (const auto& v : node.inputs) {
            if (v.name == name) found = &v;
        }
        if (!found) {
            diags.error(DiagCode::Io, {line_no, 1},
                        "CSV column '" + name + "' is not an input of node '" + node.name + "'");
            return std::nullopt;
        }
        columns.push_back(found);
    }
    for (const auto& v : node.inputs) {
        bool present = false;
        for (const auto* c : columns) present = present || c->name == v.name;
        if (!present) {
            diags.error(DiagCode::Io, {line_no, 1},
                        "CSV is missing a column for input '" + v.name + "'");
            return std::nullopt;
        }
    }

    std::vector<std::map<std::string, Value>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_row(line);
        if (cells.size() != columns.size()) {
            diags.error(DiagCode::Io, {line_no, 1}, "CSV row has the wrong number of cells");
            return std::nullopt;
        }
        std::map<std::string, Value> row;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            auto type = resolve_type_ref(columns[i]->type, info);
            auto value = type ? parse_cell(cells[i], *type, info) : std::nullopt;
            if (!value) {
                diags.error(DiagCode::Io, {line_no, static_cast<int>(i) + 1},
                            "cannot parse '" + cells[i] + "' for input '" + columns[i]->name +
                                "'");
                return std::nullopt;
            }
            row[columns[i]->name] = *value;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string write_output_csv(const Trace& trace, const NodeDecl& node) {
    std::ostringstream os;
    for (std::size_t i = 0; i < node.outputs.size(); ++i) {
        if (i) os << ',';
        os << node.outputs[i].name;
    }
    os << '\n';
    for (const auto& step : trace.steps) {
        for (std::size_t i = 0; i < node.outputs.size(); ++i) {
            if (i) os << ',';
            os << step.outputs.at(node.outputs[i].name).to_string();
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace l2h
