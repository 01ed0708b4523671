#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cspfolio/features.hpp"

namespace cspfolio {

class PortfolioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dense instances x solvers runtime grid. A cell >= timeout means unsolved
// and is stored as exactly the timeout value.
struct RuntimeMatrix {
    std::vector<std::string> instances;
    std::vector<std::string> solvers;
    std::vector<std::vector<double>> runtimes; // [instance][solver]
    double timeout = 0;

    int instance_index(std::string_view id) const;
    int solver_index(std::string_view id) const;
    void clamp_to_timeout();
};

// CSV "instance,<solver ids...>"; timeout is carried out-of-band.
std::string write_runtime_csv(const RuntimeMatrix& m);
RuntimeMatrix parse_runtime_csv(std::string_view text, double timeout);

// Mean of (r < timeout ? r : f * timeout). Throws PortfolioError on empty input.
double par_score(std::span<const double> runtimes, double timeout, double f);

// Per-feature linear map from training [min,max] onto [-1,1]; constant
// features map to 0 and out-of-range application clamps.
struct NormBounds {
    std::vector<std::string> schema;
    std::vector<double> min;
    std::vector<double> max;
};

NormBounds normalize_fit(const std::vector<std::string>& schema,
                         const std::vector<std::vector<double>>& rows);
std::vector<double> normalize_apply(const NormBounds& bounds, std::span<const double> row);

struct ClusterResult {
    int k = 1;
    std::vector<std::vector<double>> centroids;
    std::vector<int> assignment; // nearest centroid, lowest-index tie-break
};

// Iterative splitting: run seeded k-means (k-means++ seeding, Lloyd capped at
// 100 iterations) at k+1 and accept the split only while every cluster keeps
// at least min_cluster_size points and k+1 <= max_k. Deterministic in seed.
ClusterResult cluster(const std::vector<std::vector<double>>& points, int min_cluster_size,
                      int max_k, std::uint64_t seed);

struct PortfolioConfig {
    int min_cluster_size = 8;
    int max_k = 16;
    double par_f = 10;
    std::uint64_t seed = 0;
};

struct PortfolioModel {
    NormBounds bounds;
    int k = 1;
    std::vector<std::vector<double>> centroids;
    std::vector<std::string> cluster_solver; // one solver id per cluster
    PortfolioConfig config;
};

// Fit normalization, cluster the training points, then give each cluster the
// solver minimizing PAR-f on that cluster's rows (ties: more instances
// solved, then lexicographically smaller id).
PortfolioModel train(const FeatureTable& features, const RuntimeMatrix& runtimes,
                     const PortfolioConfig& config);

const std::string& select(const PortfolioModel& model, std::span<const double> raw_row);

// JSON model file.
std::string model_to_json(const PortfolioModel& model);
PortfolioModel model_from_json(std::string_view json_text);

struct ParSolved {
    double par = 0;
    int solved = 0;
};

// Oracle: per-instance best runtime.
ParSolved vbs(const RuntimeMatrix& m, double f);

struct BestSingleResult {
    std::string solver;
    double par = 0;
    int solved = 0;
};

// Single solver minimizing whole-matrix PAR-f (same tie-break as train).
BestSingleResult best_single(const RuntimeMatrix& m, double f);

// Shuffles the test instances, deals them into k near-equal groups, and picks
// each group's best solver on that same test data (the documented leak the
// baseline is defined with).
ParSolved random_cluster_baseline(const RuntimeMatrix& test, int k, double f, std::uint64_t seed);

struct ApproachResult {
    double par = 0;
    int solved = 0;
};

struct EvaluationReport {
    int num_instances = 0;
    int num_solvers = 0;
    int folds = 0;
    double timeout = 0;
    PortfolioConfig config;
    bool overhead_applied = false;
    std::vector<std::string> roundrobin_families; // families smaller than the fold count
    std::vector<int> fold_k;
    std::vector<std::vector<std::string>> fold_instances;
    ApproachResult vbs, portfolio, random_cluster, best_single;
};

// Stratified k-fold cross-validation over family labels; per fold trains on
// the remainder and scores Portfolio, VBS, Best Single (chosen per fold on
// training data) and Random Cluster (grouped on the fold itself, k taken from
// the fold's model). `overhead`, when present, is added to the portfolio's
// selected-solver runtimes, capped at the timeout.
EvaluationReport cross_validate(const FeatureTable& features, const RuntimeMatrix& runtimes,
                                const std::map<std::string, std::string>& family_of, int folds,
                                const PortfolioConfig& config,
                                const std::map<std::string, double>* overhead);

// Table-1-style plain-text report; byte-deterministic.
std::string render_report(const EvaluationReport& report);

} // namespace cspfolio
