#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cspfolio {

class DimacsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Positive literal v means SAT variable v true, -v means false. Variables are
// numbered 1..num_vars.
using Clause = std::vector<int>;

enum class VarTagKind { Eq, Leq };

// One (CSP variable, semantic tag) -> SAT variable binding. Tag eq(v) is the
// direct/support "X = v" variable, leq(v) the order-encoding "X <= v"
// threshold, with v the original domain value.
struct VarMapEntry {
    std::string var;
    VarTagKind kind = VarTagKind::Eq;
    int value = 0;
    int sat_var = 0;

    bool operator==(const VarMapEntry&) const = default;
};

std::string format_tag(VarTagKind kind, int value);
std::optional<std::pair<VarTagKind, int>> parse_tag(std::string_view tag);

struct CnfFormula {
    int num_vars = 0;
    std::vector<Clause> clauses;
    // Empty for raw DIMACS input; encoder output is ordered by sat_var.
    std::vector<VarMapEntry> var_map;
    // Full original domain per CSP variable, in declaration order. Needed to
    // decode an order-encoded model (the top value has no threshold variable).
    std::vector<std::pair<std::string, std::vector<int>>> var_domains;

    bool operator==(const CnfFormula&) const = default;

    std::size_t literal_count() const;
};

// Validates literal ranges, the no-tautology / no-duplicate-literal clause
// invariants, and (when require_var_map) that var_map is injective and covers
// exactly [1, num_vars]. Throws DimacsError.
void check_formula(const CnfFormula& f, bool require_var_map);

// Header "p cnf <vars> <clauses>", one clause per line with trailing 0.
// The var map and domains ride in leading comments:
//   c map <cspvar> <tag> <satvar>
//   c dom <cspvar> <v1> <v2> ...
// Output is byte-deterministic for a given formula.
std::string write_dimacs(const CnfFormula& f);

CnfFormula parse_dimacs(std::string_view text);

} // namespace cspfolio
