#include "cspfolio/csp.hpp"

#include <algorithm>
#include <set>

namespace cspfolio {

std::string_view to_string(RelOp op) {
    switch (op) {
    case RelOp::Lt: return "<";
    case RelOp::Le: return "<=";
    case RelOp::Gt: return ">";
    case RelOp::Ge: return ">=";
    case RelOp::Eq: return "=";
    case RelOp::Ne: return "!=";
    }
    return "?";
}

std::optional<RelOp> parse_rel_op(std::string_view s) {
    if (s == "<") return RelOp::Lt;
    if (s == "<=") return RelOp::Le;
    if (s == ">") return RelOp::Gt;
    if (s == ">=") return RelOp::Ge;
    if (s == "=" || s == "==") return RelOp::Eq;
    if (s == "!=") return RelOp::Ne;
    return std::nullopt;
}

bool rel_holds(RelOp op, int lhs, int rhs) {
    switch (op) {
    case RelOp::Lt: return lhs < rhs;
    case RelOp::Le: return lhs <= rhs;
    case RelOp::Gt: return lhs > rhs;
    case RelOp::Ge: return lhs >= rhs;
    case RelOp::Eq: return lhs == rhs;
    case RelOp::Ne: return lhs != rhs;
    }
    return false;
}

Constraint Constraint::forbidden(int x, int y, std::vector<std::pair<int, int>> tuples) {
    Constraint c;
    c.kind = Kind::Forbidden;
    c.x = x;
    c.y = y;
    std::sort(tuples.begin(), tuples.end());
    tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
    c.tuples = std::move(tuples);
    return c;
}

Constraint Constraint::relation(int x, int y, RelOp op) {
    Constraint c;
    c.kind = Kind::Relation;
    c.x = x;
    c.y = y;
    c.op = op;
    return c;
}

Constraint Constraint::unary_bound(int x, RelOp op, int bound) {
    Constraint c;
    c.kind = Kind::UnaryBound;
    c.x = x;
    c.y = -1;
    c.op = op;
    c.bound = bound;
    return c;
}

int CspInstance::var_index(std::string_view id) const {
    for (std::size_t i = 0; i < variables.size(); ++i)
        if (variables[i].id == id) return static_cast<int>(i);
    return -1;
}

bool structurally_equal(const CspInstance& a, const CspInstance& b) {
    return a.variables == b.variables && a.constraints == b.constraints;
}

namespace {

bool in_domain(const CspVariable& v, int value) {
    return std::binary_search(v.domain.begin(), v.domain.end(), value);
}

} // namespace

void validate(const CspInstance& inst) {
    std::set<std::string> seen;
    for (const auto& v : inst.variables) {
        if (v.id.empty()) throw CspError("variable with empty id");
        if (!seen.insert(v.id).second) throw CspError("duplicate variable id '" + v.id + "'");
        if (v.domain.empty()) throw CspError("variable '" + v.id + "' has an empty domain");
        if (!std::is_sorted(v.domain.begin(), v.domain.end()) ||
            std::adjacent_find(v.domain.begin(), v.domain.end()) != v.domain.end())
            throw CspError("variable '" + v.id + "' domain is not a sorted set");
    }
    const int n = static_cast<int>(inst.variables.size());
    for (const auto& c : inst.constraints) {
        if (c.x < 0 || c.x >= n) throw CspError("constraint references undeclared variable");
        const bool binary = c.kind != Constraint::Kind::UnaryBound;
        if (binary) {
            if (c.y < 0 || c.y >= n) throw CspError("constraint references undeclared variable");
            if (c.x == c.y) throw CspError("binary scope must name two distinct variables");
        } else if (c.y != -1) {
            throw CspError("unary constraint with a second scope variable");
        }
        if (c.kind == Constraint::Kind::Forbidden) {
            if (!std::is_sorted(c.tuples.begin(), c.tuples.end()) ||
                std::adjacent_find(c.tuples.begin(), c.tuples.end()) != c.tuples.end())
                throw CspError("forbidden tuple set contains duplicates or is unsorted");
        } else if (!c.tuples.empty()) {
            throw CspError("non-extensional constraint carries tuples");
        }
    }
}

CspInstance normalize(const CspInstance& inst, NormalizeStats* stats) {
    validate(inst);
    NormalizeStats local;
    CspInstance out;
    out.name = inst.name;
    out.variables = inst.variables;
    out.constraints.reserve(inst.constraints.size());
    for (const auto& c : inst.constraints) {
        switch (c.kind) {
        case Constraint::Kind::UnaryBound:
            out.constraints.push_back(c);
            break;
        case Constraint::Kind::Relation: {
            std::vector<std::pair<int, int>> forb;
            for (int v : inst.variables[c.x].domain)
                for (int w : inst.variables[c.y].domain)
                    if (!rel_holds(c.op, v, w)) forb.emplace_back(v, w);
            out.constraints.push_back(Constraint::forbidden(c.x, c.y, std::move(forb)));
            ++local.expanded_relations;
            break;
        }
        case Constraint::Kind::Forbidden: {
            std::vector<std::pair<int, int>> kept;
            kept.reserve(c.tuples.size());
            for (auto [v, w] : c.tuples) {
                if (in_domain(inst.variables[c.x], v) && in_domain(inst.variables[c.y], w))
                    kept.emplace_back(v, w);
                else
                    ++local.dropped_tuples;
            }
            out.constraints.push_back(Constraint::forbidden(c.x, c.y, std::move(kept)));
            break;
        }
        }
    }
    if (stats) *stats = local;
    return out;
}

bool is_normalized(const CspInstance& inst) {
    for (const auto& c : inst.constraints)
        if (c.kind == Constraint::Kind::Relation) return false;
    return true;
}

bool assignment_satisfies(const CspInstance& inst, const std::vector<int>& values) {
    for (const auto& c : inst.constraints) {
        switch (c.kind) {
        case Constraint::Kind::Forbidden: {
            std::pair<int, int> t{values[c.x], values[c.y]};
            if (std::binary_search(c.tuples.begin(), c.tuples.end(), t)) return false;
            break;
        }
        case Constraint::Kind::Relation:
            if (!rel_holds(c.op, values[c.x], values[c.y])) return false;
            break;
        case Constraint::Kind::UnaryBound:
            if (!rel_holds(c.op, values[c.x], c.bound)) return false;
            break;
        }
    }
    return true;
}

std::optional<std::uint64_t> count_solutions(const CspInstance& inst, std::uint64_t limit) {
    validate(inst);
    std::uint64_t space = 1;
    for (const auto& v : inst.variables) {
        const std::uint64_t d = v.domain.size();
        if (space > limit / d) return std::nullopt; // overflow-safe: space * d > limit
        space *= d;
    }
    if (space > limit) return std::nullopt;

    const std::size_t n = inst.variables.size();
    std::vector<int> values(n, 0);
    std::vector<std::size_t> idx(n, 0);
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) values[i] = inst.variables[i].domain[0];
    for (;;) {
        if (assignment_satisfies(inst, values)) ++count;
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < inst.variables[pos].domain.size()) {
                values[pos] = inst.variables[pos].domain[idx[pos]];
                break;
            }
            idx[pos] = 0;
            values[pos] = inst.variables[pos].domain[0];
            if (pos == 0) return count;
        }
        if (n == 0) return count;
    }
}

} // namespace cspfolio
