#pragma once

#include <string>
#include <string_view>

#include "cspfolio/csp.hpp"

namespace cspfolio {

// XCSP 2.1 XML, restricted to integer domains, binary extensional relations
// (supports or conflicts semantics), and unary/binary inequality predicates
// (ne, eq, lt, le, gt, ge). supports-semantics relations are complemented
// into forbidden tuples over the declared domains at parse time. Anything
// else (global constraints, arity > 2, arithmetic predicate terms) is
// rejected with a CspError naming the construct.
CspInstance parse_xcsp(std::string_view text, std::string name = "");

} // namespace cspfolio
