#pragma once

#include <span>
#include <stdexcept>

namespace cspfolio {

// The five aggregates every feature block reuses. cv is population standard
// deviation over mean (0 when the mean is 0); entropy is the Shannon entropy
// (natural log) of the exact-value histogram.
struct StatSummary {
    double mean = 0;
    double cv = 0;
    double min = 0;
    double max = 0;
    double entropy = 0;
};

// Throws std::invalid_argument on empty input.
StatSummary stat_summary(std::span<const double> values);

// Feature-extraction convention: an empty population is all zeros.
StatSummary stat_summary_or_zero(std::span<const double> values);

} // namespace cspfolio
