#include <cmath>

#include "doctest.h"

#include "cspfolio/stats.hpp"

using namespace cspfolio;

TEST_CASE("stat_summary on a constant sequence") {
    const double values[] = {1, 1, 1};
    const StatSummary s = stat_summary(values);
    CHECK(s.mean == 1);
    CHECK(s.cv == 0);
    CHECK(s.min == 1);
    CHECK(s.max == 1);
    CHECK(s.entropy == 0);
}

TEST_CASE("stat_summary mean and cv") {
    const double values[] = {2, 4};
    const StatSummary s = stat_summary(values);
    CHECK(s.mean == 3);
    CHECK(s.cv == doctest::Approx(1.0 / 3.0).epsilon(1e-12)); // population std = 1
    CHECK(s.min == 2);
    CHECK(s.max == 4);
}

TEST_CASE("stat_summary entropy of a two-value histogram") {
    const double values[] = {1, 2};
    CHECK(stat_summary(values).entropy == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("stat_summary rejects empty input, or-zero maps it to zeros") {
    CHECK_THROWS_AS(stat_summary({}), std::invalid_argument);
    const StatSummary s = stat_summary_or_zero({});
    CHECK(s.mean == 0);
    CHECK(s.cv == 0);
    CHECK(s.entropy == 0);
}

TEST_CASE("cv convention when the mean is zero") {
    const double values[] = {-1, 1};
    CHECK(stat_summary(values).cv == 0);
}
