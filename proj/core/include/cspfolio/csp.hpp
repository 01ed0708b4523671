#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cspfolio {

class CspError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CspVariable {
    std::string id;
    std::vector<int> domain; // ascending, unique, non-empty

    bool operator==(const CspVariable&) const = default;
};

enum class RelOp { Lt, Le, Gt, Ge, Eq, Ne };

std::string_view to_string(RelOp op);
std::optional<RelOp> parse_rel_op(std::string_view s);
bool rel_holds(RelOp op, int lhs, int rhs);

struct Constraint {
    enum class Kind { Forbidden, Relation, UnaryBound };

    Kind kind = Kind::Forbidden;
    int x = -1; // index into CspInstance::variables
    int y = -1; // second variable; -1 for UnaryBound
    std::vector<std::pair<int, int>> tuples; // forbidden (x,y) value pairs; sorted, deduped
    RelOp op = RelOp::Eq;                    // Relation and UnaryBound kinds
    int bound = 0;                           // UnaryBound: x `op` bound

    bool operator==(const Constraint&) const = default;

    static Constraint forbidden(int x, int y, std::vector<std::pair<int, int>> tuples);
    static Constraint relation(int x, int y, RelOp op);
    static Constraint unary_bound(int x, RelOp op, int bound);
};

struct CspInstance {
    std::string name; // metadata only; never part of structural identity
    std::vector<CspVariable> variables;
    std::vector<Constraint> constraints;

    // -1 when the id is not declared.
    int var_index(std::string_view id) const;
};

bool structurally_equal(const CspInstance& a, const CspInstance& b);

// Throws CspError on the first violated invariant: empty domain, unsorted or
// duplicated domain values, dangling or non-distinct constraint scope,
// duplicate tuples.
void validate(const CspInstance& inst);

struct NormalizeStats {
    std::size_t expanded_relations = 0;
    std::size_t dropped_tuples = 0; // tuples outside the domain product
};

// Expands every Relation constraint into forbidden tuples over the current
// domains and canonicalizes Forbidden constraints (sorted, deduped, tuples
// outside the domain product dropped). UnaryBound constraints pass through.
// Idempotent; solution set is unchanged.
CspInstance normalize(const CspInstance& inst, NormalizeStats* stats = nullptr);

bool is_normalized(const CspInstance& inst);

// values[i] assigns variables[i]; evaluates every constraint semantically,
// so it works on non-normalized instances too.
bool assignment_satisfies(const CspInstance& inst, const std::vector<int>& values);

// Exact satisfying-assignment count by exhaustive enumeration. Returns
// nullopt when the assignment-space size (product of domain sizes) exceeds
// `limit`.
std::optional<std::uint64_t> count_solutions(const CspInstance& inst, std::uint64_t limit);

} // namespace cspfolio
