#include "doctest.h"

#include "cspfolio/cnf.hpp"
#include "cspfolio/rng.hpp"

using namespace cspfolio;

TEST_CASE("write_dimacs basic forms") {
    SUBCASE("single clause, no map") {
        CnfFormula f;
        f.num_vars = 2;
        f.clauses = {{-1, 2}};
        CHECK(write_dimacs(f) == "p cnf 2 1\n-1 2 0\n");
    }
    SUBCASE("no clauses") {
        CnfFormula f;
        f.num_vars = 3;
        CHECK(write_dimacs(f) == "p cnf 3 0\n");
    }
    SUBCASE("empty clause renders as a bare terminator") {
        CnfFormula f;
        f.num_vars = 0;
        f.clauses = {{}};
        CHECK(write_dimacs(f) == "p cnf 0 1\n0\n");
    }
    SUBCASE("map and domain comments lead the header") {
        CnfFormula f;
        f.num_vars = 2;
        f.clauses = {{1, 2}};
        f.var_map = {{"X", VarTagKind::Eq, 5, 1}, {"X", VarTagKind::Eq, 9, 2}};
        f.var_domains = {{"X", {5, 9}}};
        CHECK(write_dimacs(f) == "c dom X 5 9\n"
                                 "c map X eq(5) 1\n"
                                 "c map X eq(9) 2\n"
                                 "p cnf 2 1\n"
                                 "1 2 0\n");
    }
}

TEST_CASE("parse_dimacs round-trips structurally") {
    CnfFormula f;
    f.num_vars = 4;
    f.clauses = {{1, -2}, {}, {3, 4, -1}};
    f.var_map = {{"X", VarTagKind::Leq, 1, 1},
                 {"X", VarTagKind::Leq, 2, 2},
                 {"Y", VarTagKind::Eq, 3, 3},
                 {"Y", VarTagKind::Eq, 7, 4}};
    f.var_domains = {{"X", {1, 2, 3}}, {"Y", {3, 7}}};
    CHECK(parse_dimacs(write_dimacs(f)) == f);
}

TEST_CASE("parse_dimacs on random formulas") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        CnfFormula f;
        f.num_vars = 1 + static_cast<int>(rng.next_below(12));
        const int clauses = static_cast<int>(rng.next_below(10));
        for (int c = 0; c < clauses; ++c) {
            Clause cl;
            for (int v = 1; v <= f.num_vars; ++v) {
                const auto r = rng.next_below(4);
                if (r == 0) cl.push_back(v);
                if (r == 1) cl.push_back(-v);
            }
            f.clauses.push_back(std::move(cl));
        }
        CHECK(parse_dimacs(write_dimacs(f)) == f);
        CHECK(write_dimacs(f) == write_dimacs(f));
    }
}

TEST_CASE("parse_dimacs rejects malformed input") {
    CHECK_THROWS_AS(parse_dimacs("1 2 0\n"), DimacsError);          // clause before header
    CHECK_THROWS_AS(parse_dimacs("p cnf 2 2\n1 0\n"), DimacsError); // count mismatch
    CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 2\n"), DimacsError); // unterminated clause
    CHECK_THROWS_AS(parse_dimacs("p cnf 1 1\n2 0\n"), DimacsError); // literal out of range
    CHECK_THROWS_AS(parse_dimacs(""), DimacsError);
    CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\nc zz\n1 x 0\n"), DimacsError);
}

TEST_CASE("check_formula enforces the clause invariants") {
    CnfFormula taut;
    taut.num_vars = 2;
    taut.clauses = {{1, -1}};
    CHECK_THROWS_AS(check_formula(taut, false), DimacsError);

    CnfFormula dup;
    dup.num_vars = 2;
    dup.clauses = {{1, 1}};
    CHECK_THROWS_AS(check_formula(dup, false), DimacsError);

    CnfFormula gap;
    gap.num_vars = 2;
    gap.var_map = {{"X", VarTagKind::Eq, 1, 1}}; // var 2 uncovered
    CHECK_THROWS_AS(check_formula(gap, true), DimacsError);

    CnfFormula twice;
    twice.num_vars = 1;
    twice.var_map = {{"X", VarTagKind::Eq, 1, 1}, {"Y", VarTagKind::Eq, 1, 1}};
    CHECK_THROWS_AS(check_formula(twice, true), DimacsError);
}

TEST_CASE("tag formatting round-trips") {
    CHECK(format_tag(VarTagKind::Eq, 3) == "eq(3)");
    CHECK(format_tag(VarTagKind::Leq, -2) == "leq(-2)");
    CHECK(parse_tag("eq(3)") == std::make_pair(VarTagKind::Eq, 3));
    CHECK(parse_tag("leq(-2)") == std::make_pair(VarTagKind::Leq, -2));
    CHECK_FALSE(parse_tag("lt(2)").has_value());
    CHECK_FALSE(parse_tag("eq(2").has_value());
}
