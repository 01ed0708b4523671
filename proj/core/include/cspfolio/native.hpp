#pragma once

#include <string>
#include <string_view>

#include "cspfolio/csp.hpp"

namespace cspfolio {

// Line-oriented native format:
//   var <id> <lo> <hi>
//   var <id> { v1 v2 ... }
//   forbid <id1> <id2> : v w [, v w]*
//   rel <id1> <op> <id2>        op in < <= > >= = !=
//   bound <id> <op> <v>
//   # comment
// Variables must be declared before any constraint that uses them.
// Throws CspError with a 1-based line number on bad input.
CspInstance parse_native(std::string_view text, std::string name = "");

// Inverse of parse_native: parse_native(render_native(i)) is structurally
// equal to normalize-free i for any valid instance.
std::string render_native(const CspInstance& inst);

} // namespace cspfolio
