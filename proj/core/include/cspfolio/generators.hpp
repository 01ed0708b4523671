#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "cspfolio/csp.hpp"

namespace cspfolio {

// Model B random binary CSP: n variables over {1..d}; each of the n(n-1)/2
// pairs is constrained with probability `density`; a constrained pair forbids
// ceil(tightness * d^2) distinct tuples drawn uniformly. Pure in (params, seed).
CspInstance gen_random_binary(int n, int d, double density, double tightness,
                              std::uint64_t seed);

// p pigeons into h holes: pairwise != over domain {1..h}.
CspInstance gen_pigeonhole(int pigeons, int holes);

// Proper k-coloring: one variable per vertex, != per edge. Vertices are 0-based.
CspInstance gen_coloring(int num_vertices, const std::vector<std::pair<int, int>>& edges,
                         int colors);

// G(n, p) random graph, then gen_coloring.
CspInstance gen_random_coloring(int num_vertices, double edge_prob, int colors,
                                std::uint64_t seed);

struct ColoringParams {
    int num_vertices = 0;
    std::vector<std::pair<int, int>> edges;
    int colors = 0;
};
struct PigeonholeParams {
    int pigeons = 0;
    int holes = 0;
};
struct RandomBinaryParams {
    int n = 0;
    int d = 0;
    double density = 0;
    double tightness = 0;
};
using FamilyParams = std::variant<ColoringParams, PigeonholeParams, RandomBinaryParams>;

CspInstance gen_family(const FamilyParams& params, std::uint64_t seed);

} // namespace cspfolio
