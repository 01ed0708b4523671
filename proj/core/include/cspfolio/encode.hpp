#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cspfolio/cnf.hpp"
#include "cspfolio/csp.hpp"

namespace cspfolio {

enum class Encoding { Direct, Support, Order };

std::string_view to_string(Encoding e);
std::optional<Encoding> parse_encoding(std::string_view s);

struct EncodingConfig {
    Encoding encoding = Encoding::Direct;
    bool include_domains = true;

    // "direct", "direct_nd", ...
    std::string variant_name() const;
};

// All six (encoding, include_domains) combinations, in fixed sweep order.
const std::vector<EncodingConfig>& all_encoding_configs();

// The encoders require a normalized instance (no Relation constraints) and
// throw CspError otherwise. SAT variables are numbered lexicographically by
// (variable declaration index, domain value index), so output is fully
// deterministic.
//
// Direct: one variable per (X, v); at-least-one + at-most-one clauses per CSP
// variable when include_domains; one conflict clause (-x_v | -y_w) per
// forbidden tuple; unit clauses excluding values that violate a unary bound.
CnfFormula encode_direct(const CspInstance& inst, bool include_domains);

// Support: direct's variables and domain clauses; per constrained pair and
// value v of X one clause  -x_v | OR{ y_w : (v,w) allowed }, and symmetrically
// for Y. An empty support set degenerates to the unit (-x_v).
CnfFormula encode_support(const CspInstance& inst, bool include_domains);

// Order: d-1 threshold variables x_<=1 .. x_<=d-1 per CSP variable, with
// x_<=d constant true and x_<=0 constant false. Chain clauses
// (-x_<=v | x_<=v+1) when include_domains. A forbidden tuple <X=v, Y=w>
// becomes (-x_<=v | x_<=v-1 | -y_<=w | y_<=w-1) with constant literals
// simplified away; a clause whose literals all vanish is emitted empty.
CnfFormula encode_order(const CspInstance& inst, bool include_domains);

CnfFormula encode(const CspInstance& inst, const EncodingConfig& cfg);

// Fault-injection hook for the self-test harness.
enum class EncoderMutant { None, DropAmo };
CnfFormula encode_mutant(const CspInstance& inst, const EncodingConfig& cfg, EncoderMutant mutant);

// Maps a complete satisfying assignment back to CSP values, one (id, value)
// per variable in declaration order. Requires a formula built with
// include_domains = true; throws DimacsError when the model violates the
// exactly-one discipline (an encoder or solver bug, not user error).
std::vector<std::pair<std::string, int>> decode_model(const CnfFormula& f,
                                                      const std::vector<bool>& model);

} // namespace cspfolio
