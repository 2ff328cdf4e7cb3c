#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "avp/config.hpp"
#include "avp/parse.hpp"

namespace avp {

// Field-definition files: a chart block, parameter defaults, then one block
// per field with role, index structure, and per-component expressions in the
// documented grammar. Unset components are zero. Example:
//
//   # schwarzschild exterior
//   chart t r theta phi
//   param M = 1
//   field g : metric [dd]
//     [0 0] = -(1 - 2*M/r)
//     [1 1] = 1/(1 - 2*M/r)
//     [2 2] = r^2
//     [3 3] = r^2 * sin(theta)^2
struct FieldFile {
    struct Entry {
        std::string name;
        std::string role;      // metric | connection | gauge(u1) | gauge(so3) | scalar
        std::string variance;  // one letter per slot: u contravariant, d covariant
        std::vector<std::pair<std::vector<int>, std::string>> comps;
    };
    std::string origin;
    std::vector<std::string> chart_names;
    std::vector<std::pair<std::string, std::string>> params;  // name, value expression
    std::vector<Entry> fields;

    const Entry* find(const std::string& name) const {
        for (const auto& f : fields)
            if (f.name == name) return &f;
        return nullptr;
    }
};

namespace detail {

inline std::string ff_strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

inline FieldFile parse_field_file(std::istream& in, const std::string& origin) {
    FieldFile ff;
    ff.origin = origin;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw Error(origin + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::ff_strip(line);
        if (line.empty()) continue;

        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "chart") {
            std::string n;
            while (ls >> n) ff.chart_names.push_back(n);
            if (ff.chart_names.empty()) fail("chart needs coordinate names");
        } else if (head == "param") {
            std::string name, eq;
            ls >> name >> eq;
            if (eq != "=") fail("expected 'param <name> = <value>'");
            std::string value;
            std::getline(ls, value);
            value = detail::ff_strip(value);
            if (value.empty()) fail("missing parameter value");
            ff.params.emplace_back(name, value);
        } else if (head == "field") {
            FieldFile::Entry e;
            std::string colon;
            ls >> e.name >> colon >> e.role;
            if (colon != ":") fail("expected 'field <name> : <role> [<variance>]'");
            std::string var;
            if (ls >> var) {
                if (var.size() < 2 || var.front() != '[' || var.back() != ']')
                    fail("variance must look like [dd]");
                e.variance = var.substr(1, var.size() - 2);
            }
            ff.fields.push_back(std::move(e));
        } else if (head[0] == '[') {
            if (ff.fields.empty()) fail("component line before any field block");
            std::string rest = line;
            std::size_t close = rest.find(']');
            if (close == std::string::npos) fail("unterminated component index");
            std::istringstream is(rest.substr(1, close - 1));
            std::vector<int> idx;
            int v;
            while (is >> v) idx.push_back(v);
            std::string tail = detail::ff_strip(rest.substr(close + 1));
            if (tail.empty() || tail[0] != '=') fail("expected '= <expression>'");
            tail = detail::ff_strip(tail.substr(1));
            if (tail.empty()) fail("empty component expression");
            ff.fields.back().comps.emplace_back(std::move(idx), std::move(tail));
        } else {
            fail("unrecognized directive '" + head + "'");
        }
    }
    if (ff.chart_names.empty()) fail("file declares no chart");
    return ff;
}

inline FieldFile load_field_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open field file '" + path + "'");
    return parse_field_file(in, path);
}

// Expected index-slot count for a role on an m-dimensional chart; the
// algebra slot of gauge fields with more than one generator comes first.
inline std::vector<int> role_dims(const std::string& role, int m) {
    if (role == "metric") return {m, m};
    if (role == "connection") return {m, m, m};
    if (role == "scalar") return {};
    if (role == "gauge(u1)") return {m};
    if (role == "gauge(so3)") return {3, m};
    throw Error("unknown field role '" + role + "'");
}

// Applies one file to a config: parses every component against the config
// chart, bakes parameter values (after optional overrides), and assigns the
// file's fields under their names plus `suffix` (vacuum twins use "_bar").
inline void apply_field_file(FieldConfig& cfg, const FieldFile& ff, const std::string& suffix = "",
                             const std::map<std::string, ExprPtr>& overrides = {}) {
    const Chart& ch = cfg.chart();
    if (static_cast<int>(ff.chart_names.size()) != ch.dim())
        throw Error(ff.origin + ": chart dimension mismatch");
    for (int i = 0; i < ch.dim(); ++i)
        if (ff.chart_names[i] != ch.coords[i]->name)
            throw Error(ff.origin + ": chart coordinate '" + ff.chart_names[i] +
                        "' does not match '" + ch.coords[i]->name + "'");

    std::map<std::string, ExprPtr> param_values;
    SymbolLookup const_lookup = [&](const std::string&) { return SymbolPtr{}; };
    for (const auto& [name, text] : ff.params) param_values[name] = parse_expr(text, const_lookup);
    for (const auto& [name, value] : overrides) {
        if (!param_values.count(name))
            throw Error(ff.origin + ": override for undeclared parameter '" + name + "'");
        param_values[name] = value;
    }

    SymbolLookup lookup = [&](const std::string& name) -> SymbolPtr {
        int ci = ch.index_of(name);
        if (ci >= 0) return ch.coords[ci];
        return nullptr;
    };

    for (const auto& entry : ff.fields) {
        std::vector<int> dims = role_dims(entry.role, ch.dim());
        Tensor t(dims);
        for (const auto& [idx, text] : entry.comps) {
            if (idx.size() != dims.size())
                throw Error(ff.origin + ": component rank mismatch in field '" + entry.name + "'");
            for (std::size_t k = 0; k < idx.size(); ++k)
                if (idx[k] < 0 || idx[k] >= dims[k])
                    throw Error(ff.origin + ": component index out of range in field '" +
                                entry.name + "'");
            // parameters first parse as placeholders, then bake to values
            std::map<std::string, SymbolPtr> placeholders;
            SymbolLookup full = [&](const std::string& name) -> SymbolPtr {
                if (SymbolPtr s = lookup(name)) return s;
                if (!param_values.count(name)) return nullptr;
                auto it = placeholders.find(name);
                if (it == placeholders.end())
                    it = placeholders.emplace(name, make_parameter(name)).first;
                return it->second;
            };
            ExprPtr e = parse_expr(text, full);
            e = substitute(e, [&](const SymbolPtr& s) -> std::optional<ExprPtr> {
                auto it = param_values.find(s->name);
                if (s->kind == SymKind::Parameter && it != param_values.end()) return it->second;
                return std::nullopt;
            });
            t[idx] = simplify(e);
            if (entry.role == "metric") {
                std::vector<int> sw{idx[1], idx[0]};
                t[sw] = t[idx];
            } else if (entry.role == "connection") {
                std::vector<int> sw{idx[0], idx[2], idx[1]};
                t[sw] = t[idx];
            }
        }
        cfg.assign(entry.name + suffix, std::move(t));
    }
}

}  // namespace avp
