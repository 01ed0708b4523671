#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cspfolio/cnf.hpp"

namespace cspfolio {

// Exact model count by exhaustive DPLL with unit propagation. Branching is
// fixed: lowest-index unassigned variable, true branch first. `node_limit`
// caps the number of search nodes; nullopt past the limit or when the count
// would overflow 64 bits.
std::optional<std::uint64_t> count_models(const CnfFormula& f, std::uint64_t node_limit);

// All satisfying complete assignments, free variables expanded, in the
// deterministic order the search visits them. nullopt when more than
// `max_models` models exist or the search exceeds an internal node limit.
std::optional<std::vector<std::vector<bool>>> enumerate_models(const CnfFormula& f,
                                                               std::size_t max_models);

struct ProbeStats {
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
    std::uint64_t backtracks = 0;
    bool solved = false;             // SAT found or UNSAT proven within budget
    double assigned_fraction = 0.0;  // assigned variables / num_vars at termination
};

// Satisfiability probe: same branching rule, stops at the first model, at an
// exhausted search space, or after `decision_budget` decisions.
ProbeStats probe_dpll(const CnfFormula& f, std::uint64_t decision_budget);

} // namespace cspfolio
