#include "cspfolio/native.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <vector>

namespace cspfolio {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw CspError("line " + std::to_string(line) + ": " + msg);
}

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> toks;
    std::string cur;
    for (char ch : line) {
        if (ch == '#') break;
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) toks.push_back(std::move(cur)), cur.clear();
        } else if (ch == '{' || ch == '}' || ch == ':' || ch == ',') {
            if (!cur.empty()) toks.push_back(std::move(cur)), cur.clear();
            toks.push_back(std::string(1, ch));
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) toks.push_back(std::move(cur));
    return toks;
}

bool valid_id(const std::string& s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

int parse_int(const std::string& tok, std::size_t line) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
        fail(line, "expected integer, got '" + tok + "'");
    }
    if (pos != tok.size()) fail(line, "expected integer, got '" + tok + "'");
    return v;
}

int require_var(const CspInstance& inst, const std::string& id, std::size_t line) {
    int idx = inst.var_index(id);
    if (idx < 0) fail(line, "'" + id + "' used before declaration");
    return idx;
}

} // namespace

CspInstance parse_native(std::string_view text, std::string name) {
    CspInstance inst;
    inst.name = std::move(name);

    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++lineno;

        auto toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string& head = toks[0];

        if (head == "var") {
            if (toks.size() < 3) fail(lineno, "malformed var line");
            const std::string& id = toks[1];
            if (!valid_id(id)) fail(lineno, "invalid variable id '" + id + "'");
            if (inst.var_index(id) >= 0) fail(lineno, "duplicate variable id '" + id + "'");
            std::vector<int> domain;
            if (toks[2] == "{") {
                std::size_t i = 3;
                for (; i < toks.size() && toks[i] != "}"; ++i) domain.push_back(parse_int(toks[i], lineno));
                if (i >= toks.size() || toks[i] != "}") fail(lineno, "missing '}' in domain");
                if (i + 1 != toks.size()) fail(lineno, "trailing tokens after domain");
                std::sort(domain.begin(), domain.end());
                domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
            } else {
                if (toks.size() != 4) fail(lineno, "malformed var line");
                int lo = parse_int(toks[2], lineno);
                int hi = parse_int(toks[3], lineno);
                if (lo > hi) fail(lineno, "empty domain: " + std::to_string(lo) + " > " + std::to_string(hi));
                for (int v = lo; v <= hi; ++v) domain.push_back(v);
            }
            if (domain.empty()) fail(lineno, "empty domain for '" + id + "'");
            inst.variables.push_back(CspVariable{id, std::move(domain)});
        } else if (head == "forbid") {
            if (toks.size() < 4 || toks[3] != ":") fail(lineno, "malformed forbid line");
            int x = require_var(inst, toks[1], lineno);
            int y = require_var(inst, toks[2], lineno);
            if (x == y) fail(lineno, "binary scope must name two distinct variables");
            std::vector<std::pair<int, int>> tuples;
            std::size_t i = 4;
            while (i < toks.size()) { // an empty tuple list is a vacuous constraint, allowed
                if (i + 1 >= toks.size()) fail(lineno, "expected a value pair after ':'");
                int v = parse_int(toks[i], lineno);
                int w = parse_int(toks[i + 1], lineno);
                if (!std::binary_search(inst.variables[x].domain.begin(), inst.variables[x].domain.end(), v))
                    fail(lineno, "value " + std::to_string(v) + " outside domain of '" + toks[1] + "'");
                if (!std::binary_search(inst.variables[y].domain.begin(), inst.variables[y].domain.end(), w))
                    fail(lineno, "value " + std::to_string(w) + " outside domain of '" + toks[2] + "'");
                tuples.emplace_back(v, w);
                i += 2;
                if (i == toks.size()) break;
                if (toks[i] != ",") fail(lineno, "expected ',' between tuples");
                ++i;
                if (i == toks.size()) fail(lineno, "trailing ',' without a tuple");
            }
            inst.constraints.push_back(Constraint::forbidden(x, y, std::move(tuples)));
        } else if (head == "rel") {
            if (toks.size() != 4) fail(lineno, "malformed rel line");
            int x = require_var(inst, toks[1], lineno);
            auto op = parse_rel_op(toks[2]);
            if (!op) fail(lineno, "unknown operator '" + toks[2] + "'");
            int y = require_var(inst, toks[3], lineno);
            if (x == y) fail(lineno, "binary scope must name two distinct variables");
            inst.constraints.push_back(Constraint::relation(x, y, *op));
        } else if (head == "bound") {
            if (toks.size() != 4) fail(lineno, "malformed bound line");
            int x = require_var(inst, toks[1], lineno);
            auto op = parse_rel_op(toks[2]);
            if (!op) fail(lineno, "unknown operator '" + toks[2] + "'");
            int v = parse_int(toks[3], lineno);
            inst.constraints.push_back(Constraint::unary_bound(x, *op, v));
        } else {
            fail(lineno, "unknown directive '" + head + "'");
        }
    }
    validate(inst);
    return inst;
}

std::string render_native(const CspInstance& inst) {
    std::ostringstream out;
    for (const auto& v : inst.variables) {
        const bool contiguous =
            v.domain.back() - v.domain.front() + 1 == static_cast<int>(v.domain.size());
        if (contiguous) {
            out << "var " << v.id << ' ' << v.domain.front() << ' ' << v.domain.back() << '\n';
        } else {
            out << "var " << v.id << " {";
            for (int val : v.domain) out << ' ' << val;
            out << " }\n";
        }
    }
    for (const auto& c : inst.constraints) {
        switch (c.kind) {
        case Constraint::Kind::Forbidden: {
            out << "forbid " << inst.variables[c.x].id << ' ' << inst.variables[c.y].id << " :";
            bool first = true;
            for (auto [v, w] : c.tuples) {
                out << (first ? " " : ", ") << v << ' ' << w;
                first = false;
            }
            out << '\n';
            break;
        }
        case Constraint::Kind::Relation:
            out << "rel " << inst.variables[c.x].id << ' ' << to_string(c.op) << ' '
                << inst.variables[c.y].id << '\n';
            break;
        case Constraint::Kind::UnaryBound:
            out << "bound " << inst.variables[c.x].id << ' ' << to_string(c.op) << ' ' << c.bound
                << '\n';
            break;
        }
    }
    return out.str();
}

} // namespace cspfolio
