#include "cspfolio/stats.hpp"

#include <cmath>
#include <map>

namespace cspfolio {

StatSummary stat_summary(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("stat_summary: empty input");
    StatSummary s;
    s.min = values[0];
    s.max = values[0];
    double sum = 0;
    for (double v : values) {
        sum += v;
        if (v < s.min) s.min = v;
        if (v > s.max) s.max = v;
    }
    const double n = static_cast<double>(values.size());
    s.mean = sum / n;
    double sq = 0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    const double stddev = std::sqrt(sq / n);
    s.cv = s.mean == 0 ? 0 : stddev / s.mean;

    std::map<double, std::size_t> hist;
    for (double v : values) ++hist[v];
    double h = 0;
    for (const auto& [value, count] : hist) {
        const double p = static_cast<double>(count) / n;
        h -= p * std::log(p);
    }
    s.entropy = h;
    return s;
}

StatSummary stat_summary_or_zero(std::span<const double> values) {
    if (values.empty()) return StatSummary{};
    return stat_summary(values);
}

} // namespace cspfolio
