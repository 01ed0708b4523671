#include "cspfolio/cnf.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <set>
#include <sstream>

namespace cspfolio {

std::string format_tag(VarTagKind kind, int value) {
    std::string s = kind == VarTagKind::Eq ? "eq(" : "leq(";
    s += std::to_string(value);
    s += ')';
    return s;
}

std::optional<std::pair<VarTagKind, int>> parse_tag(std::string_view tag) {
    VarTagKind kind;
    if (tag.starts_with("eq(")) {
        kind = VarTagKind::Eq;
        tag.remove_prefix(3);
    } else if (tag.starts_with("leq(")) {
        kind = VarTagKind::Leq;
        tag.remove_prefix(4);
    } else {
        return std::nullopt;
    }
    if (tag.empty() || tag.back() != ')') return std::nullopt;
    tag.remove_suffix(1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(tag.data(), tag.data() + tag.size(), value);
    if (ec != std::errc{} || ptr != tag.data() + tag.size()) return std::nullopt;
    return std::make_pair(kind, value);
}

std::size_t CnfFormula::literal_count() const {
    std::size_t n = 0;
    for (const auto& c : clauses) n += c.size();
    return n;
}

void check_formula(const CnfFormula& f, bool require_var_map) {
    if (f.num_vars < 0) throw DimacsError("negative variable count");
    for (const auto& clause : f.clauses) {
        std::set<int> seen;
        for (int lit : clause) {
            if (lit == 0) throw DimacsError("zero literal inside a clause");
            int v = std::abs(lit);
            if (v > f.num_vars) throw DimacsError("literal " + std::to_string(lit) + " out of range");
            if (seen.count(-lit)) throw DimacsError("tautological clause");
            if (!seen.insert(lit).second) throw DimacsError("duplicate literal in clause");
        }
    }
    if (require_var_map) {
        std::set<int> covered;
        for (const auto& e : f.var_map) {
            if (e.sat_var < 1 || e.sat_var > f.num_vars)
                throw DimacsError("var_map entry outside [1, num_vars]");
            if (!covered.insert(e.sat_var).second)
                throw DimacsError("var_map maps SAT variable " + std::to_string(e.sat_var) + " twice");
        }
        if (static_cast<int>(covered.size()) != f.num_vars)
            throw DimacsError("var_map does not cover every SAT variable");
    }
}

std::string write_dimacs(const CnfFormula& f) {
    std::ostringstream out;
    for (const auto& [var, dom] : f.var_domains) {
        out << "c dom " << var;
        for (int v : dom) out << ' ' << v;
        out << '\n';
    }
    for (const auto& e : f.var_map)
        out << "c map " << e.var << ' ' << format_tag(e.kind, e.value) << ' ' << e.sat_var << '\n';
    out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
    for (const auto& clause : f.clauses) {
        for (int lit : clause) out << lit << ' ';
        out << "0\n";
    }
    return out.str();
}

CnfFormula parse_dimacs(std::string_view text) {
    CnfFormula f;
    bool saw_header = false;
    std::size_t expected_clauses = 0;
    Clause current;

    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == 'c') {
            std::istringstream ls(line);
            std::string c, kind;
            ls >> c >> kind;
            if (kind == "map") {
                std::string var, tag;
                int sat_var = 0;
                if (!(ls >> var >> tag >> sat_var))
                    throw DimacsError("line " + std::to_string(lineno) + ": malformed map comment");
                auto parsed = parse_tag(tag);
                if (!parsed)
                    throw DimacsError("line " + std::to_string(lineno) + ": bad tag '" + tag + "'");
                f.var_map.push_back(VarMapEntry{var, parsed->first, parsed->second, sat_var});
            } else if (kind == "dom") {
                std::string var;
                if (!(ls >> var))
                    throw DimacsError("line " + std::to_string(lineno) + ": malformed dom comment");
                std::vector<int> dom;
                int v;
                while (ls >> v) dom.push_back(v);
                f.var_domains.emplace_back(var, std::move(dom));
            }
            continue;
        }
        if (line[0] == 'p') {
            std::istringstream ls(line);
            std::string p, cnf;
            long long nv = -1, nc = -1;
            if (!(ls >> p >> cnf >> nv >> nc) || cnf != "cnf" || nv < 0 || nc < 0)
                throw DimacsError("line " + std::to_string(lineno) + ": malformed problem line");
            f.num_vars = static_cast<int>(nv);
            expected_clauses = static_cast<std::size_t>(nc);
            saw_header = true;
            continue;
        }
        if (!saw_header) throw DimacsError("line " + std::to_string(lineno) + ": clause before problem line");
        std::istringstream ls(line);
        int lit;
        while (ls >> lit) {
            if (lit == 0) {
                f.clauses.push_back(current);
                current.clear();
            } else {
                current.push_back(lit);
            }
        }
        if (!ls.eof())
            throw DimacsError("line " + std::to_string(lineno) + ": bad literal");
    }
    if (!saw_header) throw DimacsError("missing problem line");
    if (!current.empty()) throw DimacsError("last clause not terminated by 0");
    if (f.clauses.size() != expected_clauses)
        throw DimacsError("clause count mismatch: header says " + std::to_string(expected_clauses) +
                          ", found " + std::to_string(f.clauses.size()));
    check_formula(f, false);
    return f;
}

} // namespace cspfolio
