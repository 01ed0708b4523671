#include "cspfolio/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cspfolio/rng.hpp"

namespace cspfolio {

namespace {

std::vector<int> iota_domain(int d) {
    std::vector<int> dom(static_cast<std::size_t>(d));
    std::iota(dom.begin(), dom.end(), 1);
    return dom;
}

} // namespace

CspInstance gen_random_binary(int n, int d, double density, double tightness,
                              std::uint64_t seed) {
    if (n < 2 || d < 1) throw CspError("gen_random_binary requires n >= 2 and d >= 1");
    if (density < 0 || density > 1 || tightness < 0 || tightness > 1)
        throw CspError("density and tightness must lie in [0,1]");

    CspInstance inst;
    inst.name = "random_n" + std::to_string(n) + "_d" + std::to_string(d);
    for (int i = 0; i < n; ++i)
        inst.variables.push_back(CspVariable{"X" + std::to_string(i), iota_domain(d)});

    Rng rng(derive_seed(seed, "gen_random_binary"));
    const auto num_forbidden =
        static_cast<std::size_t>(std::ceil(tightness * static_cast<double>(d) * d));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.next_unit() >= density) continue;
            // partial Fisher-Yates over the d*d tuple indices
            std::vector<int> cells(static_cast<std::size_t>(d) * d);
            std::iota(cells.begin(), cells.end(), 0);
            std::vector<std::pair<int, int>> tuples;
            tuples.reserve(num_forbidden);
            for (std::size_t k = 0; k < num_forbidden && k < cells.size(); ++k) {
                std::size_t pick = k + static_cast<std::size_t>(rng.next_below(cells.size() - k));
                std::swap(cells[k], cells[pick]);
                tuples.emplace_back(cells[k] / d + 1, cells[k] % d + 1);
            }
            inst.constraints.push_back(Constraint::forbidden(i, j, std::move(tuples)));
        }
    }
    return inst;
}

CspInstance gen_pigeonhole(int pigeons, int holes) {
    if (pigeons <= 0 || holes <= 0) throw CspError("pigeonhole requires positive pigeon and hole counts");
    CspInstance inst;
    inst.name = "pigeonhole_p" + std::to_string(pigeons) + "_h" + std::to_string(holes);
    for (int p = 0; p < pigeons; ++p)
        inst.variables.push_back(CspVariable{"P" + std::to_string(p), iota_domain(holes)});
    for (int p = 0; p < pigeons; ++p)
        for (int q = p + 1; q < pigeons; ++q)
            inst.constraints.push_back(Constraint::relation(p, q, RelOp::Ne));
    return inst;
}

CspInstance gen_coloring(int num_vertices, const std::vector<std::pair<int, int>>& edges,
                         int colors) {
    if (num_vertices <= 0 || colors <= 0)
        throw CspError("coloring requires positive vertex and color counts");
    CspInstance inst;
    inst.name = "coloring_n" + std::to_string(num_vertices) + "_k" + std::to_string(colors);
    for (int v = 0; v < num_vertices; ++v)
        inst.variables.push_back(CspVariable{"V" + std::to_string(v), iota_domain(colors)});
    for (auto [a, b] : edges) {
        if (a < 0 || a >= num_vertices || b < 0 || b >= num_vertices || a == b)
            throw CspError("coloring edge references an invalid vertex");
        inst.constraints.push_back(Constraint::relation(a, b, RelOp::Ne));
    }
    return inst;
}

CspInstance gen_random_coloring(int num_vertices, double edge_prob, int colors,
                                std::uint64_t seed) {
    Rng rng(derive_seed(seed, "gen_random_coloring"));
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < num_vertices; ++a)
        for (int b = a + 1; b < num_vertices; ++b)
            if (rng.next_unit() < edge_prob) edges.emplace_back(a, b);
    return gen_coloring(num_vertices, edges, colors);
}

CspInstance gen_family(const FamilyParams& params, std::uint64_t seed) {
    return std::visit(
        [&](const auto& p) -> CspInstance {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ColoringParams>)
                return gen_coloring(p.num_vertices, p.edges, p.colors);
            else if constexpr (std::is_same_v<T, PigeonholeParams>)
                return gen_pigeonhole(p.pigeons, p.holes);
            else
                return gen_random_binary(p.n, p.d, p.density, p.tightness, seed);
        },
        params);
}

} // namespace cspfolio
