#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cspfolio/cnf.hpp"
#include "cspfolio/csp.hpp"

namespace cspfolio {

// Fixed, ordered feature schemas. Every extractor returns one finite value
// per schema entry; undefined ratios are 0 by convention.
const std::vector<std::string>& sat_feature_schema();
const std::vector<std::string>& csp_feature_schema();

// Structural blocks (sizes, clause lengths, variable-clause-graph degrees,
// polarity balance, horn proximity, clause-length categories) plus a bounded
// deterministic DPLL probe. probe_node_budget = 0 leaves the probing block
// all zero.
std::vector<double> sat_features(const CnfFormula& f, std::uint64_t probe_node_budget);

// Static blocks (sizes, domains, constraint tightness, primal-graph degrees)
// plus a bounded backtracking probe with AC-3 propagation. Requires a
// normalized instance.
std::vector<double> csp_features(const CspInstance& inst, std::uint64_t probe_node_budget);

struct CspProbeStats {
    std::uint64_t nodes = 0;
    std::uint64_t queue_pops = 0;
    std::uint64_t wipeouts = 0;
    bool solved = false;
};

// Backtracking search with AC-3 propagation, declaration-order variable
// selection, ascending value order; stops at the first solution, a refuted
// root, or `node_budget` explored nodes.
CspProbeStats probe_csp(const CspInstance& inst, std::uint64_t node_budget);

// Feature rows keyed by instance id, all sharing one schema. Instances whose
// extraction failed carry no row; they are listed in error_instances and
// rendered as "<id>,ERROR" marker rows.
struct FeatureTable {
    std::vector<std::string> schema;
    std::vector<std::string> instances;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> error_instances;
};

// CSV with header "instance,<feature names...>", full-precision values.
std::string write_feature_csv(const FeatureTable& table);
FeatureTable parse_feature_csv(std::string_view text);

// Full-precision double rendering shared by all CSV writers: the first of
// %.15g / %.16g / %.17g that parses back to the same value.
std::string format_double(double v);

} // namespace cspfolio
