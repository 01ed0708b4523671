#include "cspfolio/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"

#include "cspfolio/csv.hpp"
#include "cspfolio/rng.hpp"

namespace cspfolio {

int RuntimeMatrix::instance_index(std::string_view id) const {
    for (std::size_t i = 0; i < instances.size(); ++i)
        if (instances[i] == id) return static_cast<int>(i);
    return -1;
}

int RuntimeMatrix::solver_index(std::string_view id) const {
    for (std::size_t i = 0; i < solvers.size(); ++i)
        if (solvers[i] == id) return static_cast<int>(i);
    return -1;
}

void RuntimeMatrix::clamp_to_timeout() {
    for (auto& row : runtimes)
        for (double& r : row)
            if (r >= timeout) r = timeout;
}

std::string write_runtime_csv(const RuntimeMatrix& m) {
    std::string out = "instance";
    for (const auto& s : m.solvers) {
        out += ',';
        out += s;
    }
    out += '\n';
    for (std::size_t i = 0; i < m.instances.size(); ++i) {
        out += m.instances[i];
        for (double r : m.runtimes[i]) {
            out += ',';
            out += format_double(r);
        }
        out += '\n';
    }
    return out;
}

RuntimeMatrix parse_runtime_csv(std::string_view text, double timeout) {
    if (timeout <= 0) throw PortfolioError("runtime CSV: timeout must be positive");
    const auto rows = parse_csv(text);
    if (rows.empty() || rows[0].empty() || rows[0][0] != "instance")
        throw PortfolioError("runtime CSV: missing 'instance,...' header");
    RuntimeMatrix m;
    m.timeout = timeout;
    m.solvers.assign(rows[0].begin() + 1, rows[0].end());
    if (m.solvers.empty()) throw PortfolioError("runtime CSV: no solver columns");
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != rows[0].size())
            throw PortfolioError("runtime CSV: row " + std::to_string(r + 1) +
                                 " has wrong column count");
        std::vector<double> runtimes;
        for (std::size_t c = 1; c < rows[r].size(); ++c) {
            char* end = nullptr;
            const double v = std::strtod(rows[r][c].c_str(), &end);
            if (end != rows[r][c].c_str() + rows[r][c].size() || !(v >= 0) || !std::isfinite(v))
                throw PortfolioError("runtime CSV: bad runtime '" + rows[r][c] + "'");
            runtimes.push_back(v);
        }
        m.instances.push_back(rows[r][0]);
        m.runtimes.push_back(std::move(runtimes));
    }
    m.clamp_to_timeout();
    return m;
}

double par_score(std::span<const double> runtimes, double timeout, double f) {
    if (runtimes.empty()) throw PortfolioError("par_score: empty input");
    if (f < 1) throw PortfolioError("par_score: penalty factor must be >= 1");
    double sum = 0;
    for (double r : runtimes) sum += r < timeout ? r : f * timeout;
    return sum / static_cast<double>(runtimes.size());
}

namespace {

ParSolved par_solved(std::span<const double> runtimes, double timeout, double f) {
    ParSolved out;
    out.par = par_score(runtimes, timeout, f);
    for (double r : runtimes)
        if (r < timeout) ++out.solved;
    return out;
}

} // namespace

NormBounds normalize_fit(const std::vector<std::string>& schema,
                         const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw PortfolioError("normalize_fit: no rows");
    NormBounds b;
    b.schema = schema;
    b.min = rows[0];
    b.max = rows[0];
    for (const auto& row : rows) {
        if (row.size() != schema.size()) throw PortfolioError("normalize_fit: schema mismatch");
        for (std::size_t j = 0; j < row.size(); ++j) {
            b.min[j] = std::min(b.min[j], row[j]);
            b.max[j] = std::max(b.max[j], row[j]);
        }
    }
    return b;
}

std::vector<double> normalize_apply(const NormBounds& bounds, std::span<const double> row) {
    if (row.size() != bounds.schema.size()) throw PortfolioError("normalize_apply: schema mismatch");
    std::vector<double> out(row.size(), 0.0);
    for (std::size_t j = 0; j < row.size(); ++j) {
        const double lo = bounds.min[j], hi = bounds.max[j];
        if (lo == hi) continue; // constant feature maps to 0
        const double t = -1.0 + 2.0 * (row[j] - lo) / (hi - lo);
        out[j] = std::clamp(t, -1.0, 1.0);
    }
    return out;
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

int nearest(std::span<const double> p, const std::vector<std::vector<double>>& centroids) {
    int best = 0;
    double best_d = sq_dist(p, centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = sq_dist(p, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

std::vector<double> mean_point(const std::vector<std::vector<double>>& points,
                               const std::vector<std::size_t>& members) {
    std::vector<double> m(points[0].size(), 0.0);
    for (std::size_t i : members)
        for (std::size_t j = 0; j < m.size(); ++j) m[j] += points[i][j];
    for (double& v : m) v /= static_cast<double>(members.size());
    return m;
}

// Lloyd with k-means++ seeding; empty clusters keep their previous centroid.
ClusterResult kmeans(const std::vector<std::vector<double>>& points, int k, Rng rng) {
    const std::size_t n = points.size();
    ClusterResult res;
    res.k = k;

    res.centroids.push_back(points[rng.next_below(n)]);
    std::vector<double> d2(n);
    while (static_cast<int>(res.centroids.size()) < k) {
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = sq_dist(points[i], res.centroids[0]);
            for (std::size_t c = 1; c < res.centroids.size(); ++c)
                d2[i] = std::min(d2[i], sq_dist(points[i], res.centroids[c]));
            total += d2[i];
        }
        std::size_t pick = 0;
        if (total == 0) {
            pick = rng.next_below(n);
        } else {
            const double r = rng.next_unit() * total;
            double cum = 0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                cum += d2[i];
                if (cum > r) {
                    pick = i;
                    break;
                }
            }
        }
        res.centroids.push_back(points[pick]);
    }

    res.assignment.assign(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = iter == 0;
        for (std::size_t i = 0; i < n; ++i) {
            const int a = nearest(points[i], res.centroids);
            if (a != res.assignment[i]) changed = true;
            res.assignment[i] = a;
        }
        if (!changed && iter > 0) break;
        std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < n; ++i)
            members[static_cast<std::size_t>(res.assignment[i])].push_back(i);
        for (int c = 0; c < k; ++c)
            if (!members[static_cast<std::size_t>(c)].empty())
                res.centroids[static_cast<std::size_t>(c)] =
                    mean_point(points, members[static_cast<std::size_t>(c)]);
    }
    // final assignment against the final centroids
    for (std::size_t i = 0; i < n; ++i) res.assignment[i] = nearest(points[i], res.centroids);
    return res;
}

} // namespace

ClusterResult cluster(const std::vector<std::vector<double>>& points, int min_cluster_size,
                      int max_k, std::uint64_t seed) {
    if (points.empty()) throw PortfolioError("cluster: no points");
    if (min_cluster_size < 1 || max_k < 1)
        throw PortfolioError("cluster: min_cluster_size and max_k must be positive");

    ClusterResult res;
    res.k = 1;
    std::vector<std::size_t> all(points.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    res.centroids.push_back(mean_point(points, all));
    res.assignment.assign(points.size(), 0);

    while (res.k + 1 <= max_k && static_cast<std::size_t>(res.k) < points.size()) {
        const int next_k = res.k + 1;
        ClusterResult candidate =
            kmeans(points, next_k, Rng(derive_seed(seed, "kmeans-k" + std::to_string(next_k))));
        std::vector<int> sizes(static_cast<std::size_t>(next_k), 0);
        for (int a : candidate.assignment) ++sizes[static_cast<std::size_t>(a)];
        const bool ok = std::all_of(sizes.begin(), sizes.end(),
                                    [&](int s) { return s >= min_cluster_size; });
        if (!ok) break;
        res = std::move(candidate);
    }
    return res;
}

namespace {

// Best solver over a set of rows: min PAR, tie-break on more solved, then
// lexicographically smaller id.
int best_solver_on(const RuntimeMatrix& m, const std::vector<std::size_t>& rows, double f) {
    int best = -1;
    double best_par = 0;
    int best_solved = -1;
    for (std::size_t s = 0; s < m.solvers.size(); ++s) {
        std::vector<double> col;
        col.reserve(rows.size());
        for (std::size_t r : rows) col.push_back(m.runtimes[r][s]);
        const ParSolved ps = par_solved(col, m.timeout, f);
        const bool better =
            best < 0 || ps.par < best_par ||
            (ps.par == best_par &&
             (ps.solved > best_solved ||
              (ps.solved == best_solved && m.solvers[s] < m.solvers[static_cast<std::size_t>(best)])));
        if (better) {
            best = static_cast<int>(s);
            best_par = ps.par;
            best_solved = ps.solved;
        }
    }
    return best;
}

std::vector<std::size_t> all_rows(const RuntimeMatrix& m) {
    std::vector<std::size_t> rows(m.instances.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    return rows;
}

} // namespace

PortfolioModel train(const FeatureTable& features, const RuntimeMatrix& runtimes,
                     const PortfolioConfig& config) {
    if (features.instances.empty()) throw PortfolioError("train: empty training set");
    if (features.instances.size() != runtimes.instances.size())
        throw PortfolioError("train: features and runtimes cover different instance sets");

    std::vector<std::size_t> run_row(features.instances.size());
    for (std::size_t i = 0; i < features.instances.size(); ++i) {
        const int r = runtimes.instance_index(features.instances[i]);
        if (r < 0)
            throw PortfolioError("train: instance '" + features.instances[i] +
                                 "' missing from the runtime matrix");
        run_row[i] = static_cast<std::size_t>(r);
    }

    PortfolioModel model;
    model.config = config;
    model.bounds = normalize_fit(features.schema, features.rows);

    std::vector<std::vector<double>> points;
    points.reserve(features.rows.size());
    for (const auto& row : features.rows) points.push_back(normalize_apply(model.bounds, row));

    const ClusterResult cres =
        cluster(points, config.min_cluster_size, config.max_k, derive_seed(config.seed, "cluster"));
    model.k = cres.k;
    model.centroids = cres.centroids;

    for (int c = 0; c < cres.k; ++c) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (cres.assignment[i] == c) rows.push_back(run_row[i]);
        const int s = best_solver_on(runtimes, rows, config.par_f);
        model.cluster_solver.push_back(runtimes.solvers[static_cast<std::size_t>(s)]);
    }
    return model;
}

const std::string& select(const PortfolioModel& model, std::span<const double> raw_row) {
    const auto p = normalize_apply(model.bounds, raw_row);
    return model.cluster_solver[static_cast<std::size_t>(nearest(p, model.centroids))];
}

std::string model_to_json(const PortfolioModel& model) {
    nlohmann::json j;
    j["schema"] = model.bounds.schema;
    j["bounds"]["min"] = model.bounds.min;
    j["bounds"]["max"] = model.bounds.max;
    j["k"] = model.k;
    j["centroids"] = model.centroids;
    j["cluster_solver"] = model.cluster_solver;
    j["config"] = {{"min_cluster_size", model.config.min_cluster_size},
                   {"max_k", model.config.max_k},
                   {"par_f", model.config.par_f},
                   {"seed", model.config.seed}};
    return j.dump(2) + "\n";
}

PortfolioModel model_from_json(std::string_view json_text) {
    try {
        const auto j = nlohmann::json::parse(json_text);
        PortfolioModel m;
        m.bounds.schema = j.at("schema").get<std::vector<std::string>>();
        m.bounds.min = j.at("bounds").at("min").get<std::vector<double>>();
        m.bounds.max = j.at("bounds").at("max").get<std::vector<double>>();
        m.k = j.at("k").get<int>();
        m.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
        m.cluster_solver = j.at("cluster_solver").get<std::vector<std::string>>();
        m.config.min_cluster_size = j.at("config").at("min_cluster_size").get<int>();
        m.config.max_k = j.at("config").at("max_k").get<int>();
        m.config.par_f = j.at("config").at("par_f").get<double>();
        m.config.seed = j.at("config").at("seed").get<std::uint64_t>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw PortfolioError(std::string("model file: ") + e.what());
    }
}

ParSolved vbs(const RuntimeMatrix& m, double f) {
    if (m.instances.empty()) throw PortfolioError("vbs: empty matrix");
    std::vector<double> mins;
    mins.reserve(m.instances.size());
    for (const auto& row : m.runtimes) mins.push_back(*std::min_element(row.begin(), row.end()));
    return par_solved(mins, m.timeout, f);
}

BestSingleResult best_single(const RuntimeMatrix& m, double f) {
    if (m.instances.empty()) throw PortfolioError("best_single: empty matrix");
    const int s = best_solver_on(m, all_rows(m), f);
    std::vector<double> col;
    col.reserve(m.instances.size());
    for (const auto& row : m.runtimes) col.push_back(row[static_cast<std::size_t>(s)]);
    const ParSolved ps = par_solved(col, m.timeout, f);
    return BestSingleResult{m.solvers[static_cast<std::size_t>(s)], ps.par, ps.solved};
}

namespace {

// Effective per-instance runtimes of the random-cluster selection, in
// matrix row order.
std::vector<double> random_cluster_runtimes(const RuntimeMatrix& test, int k, double f,
                                            std::uint64_t seed) {
    const std::size_t n = test.instances.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(derive_seed(seed, "random-cluster"));
    rng.shuffle(order);

    std::vector<double> eff(n, 0.0);
    const std::size_t kk = static_cast<std::size_t>(k);
    const std::size_t base = n / kk;
    const std::size_t extra = n % kk;
    std::size_t cursor = 0;
    for (std::size_t g = 0; g < kk; ++g) {
        const std::size_t size = base + (g < extra ? 1 : 0);
        if (size == 0) continue;
        std::vector<std::size_t> group(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                                       order.begin() + static_cast<std::ptrdiff_t>(cursor + size));
        cursor += size;
        const int s = best_solver_on(test, group, f);
        for (std::size_t r : group) eff[r] = test.runtimes[r][static_cast<std::size_t>(s)];
    }
    return eff;
}

} // namespace

ParSolved random_cluster_baseline(const RuntimeMatrix& test, int k, double f, std::uint64_t seed) {
    if (test.instances.empty()) throw PortfolioError("random_cluster_baseline: empty matrix");
    if (k < 1) throw PortfolioError("random_cluster_baseline: k must be positive");
    return par_solved(random_cluster_runtimes(test, k, f, seed), test.timeout, f);
}

EvaluationReport cross_validate(const FeatureTable& features, const RuntimeMatrix& runtimes,
                                const std::map<std::string, std::string>& family_of, int folds,
                                const PortfolioConfig& config,
                                const std::map<std::string, double>* overhead) {
    if (folds < 2) throw PortfolioError("cross_validate: folds must be >= 2");
    if (features.instances.empty()) throw PortfolioError("cross_validate: empty instance set");

    std::set<std::string> feat_ids(features.instances.begin(), features.instances.end());
    std::set<std::string> run_ids(runtimes.instances.begin(), runtimes.instances.end());
    if (feat_ids != run_ids)
        throw PortfolioError("cross_validate: feature and runtime instance sets differ");
    if (feat_ids.size() != features.instances.size())
        throw PortfolioError("cross_validate: duplicate instance ids");

    EvaluationReport report;
    report.num_instances = static_cast<int>(features.instances.size());
    report.num_solvers = static_cast<int>(runtimes.solvers.size());
    report.folds = folds;
    report.timeout = runtimes.timeout;
    report.config = config;
    report.overhead_applied = overhead != nullptr;

    // stratified fold assignment: per family (lexicographic order), shuffle
    // members and deal round-robin. The dealing position carries over across
    // families so that many small families spread over the folds instead of
    // piling into fold 0.
    std::map<std::string, std::vector<std::size_t>> by_family;
    for (std::size_t i = 0; i < features.instances.size(); ++i) {
        const auto it = family_of.find(features.instances[i]);
        by_family[it == family_of.end() ? std::string() : it->second].push_back(i);
    }
    std::vector<int> fold_of(features.instances.size(), 0);
    std::size_t offset = 0;
    for (auto& [family, members] : by_family) {
        if (members.size() < static_cast<std::size_t>(folds))
            report.roundrobin_families.push_back(family);
        Rng rng(derive_seed(config.seed, "folds:" + family));
        rng.shuffle(members);
        for (std::size_t j = 0; j < members.size(); ++j)
            fold_of[members[j]] = static_cast<int>((offset + j) % static_cast<std::size_t>(folds));
        offset += members.size();
    }

    std::vector<double> eff_vbs, eff_portfolio, eff_random, eff_best;
    report.fold_instances.resize(static_cast<std::size_t>(folds));
    for (int fold = 0; fold < folds; ++fold) {
        std::vector<std::size_t> test_idx, train_idx;
        for (std::size_t i = 0; i < features.instances.size(); ++i)
            (fold_of[i] == fold ? test_idx : train_idx).push_back(i);
        if (test_idx.empty()) continue;
        if (train_idx.empty())
            throw PortfolioError("cross_validate: fold " + std::to_string(fold) +
                                 " leaves no training data");

        auto subset_features = [&](const std::vector<std::size_t>& idx) {
            FeatureTable t;
            t.schema = features.schema;
            for (std::size_t i : idx) {
                t.instances.push_back(features.instances[i]);
                t.rows.push_back(features.rows[i]);
            }
            return t;
        };
        auto subset_runtimes = [&](const std::vector<std::size_t>& idx) {
            RuntimeMatrix m;
            m.timeout = runtimes.timeout;
            m.solvers = runtimes.solvers;
            for (std::size_t i : idx) {
                const int r = runtimes.instance_index(features.instances[i]);
                m.instances.push_back(features.instances[i]);
                m.runtimes.push_back(runtimes.runtimes[static_cast<std::size_t>(r)]);
            }
            return m;
        };

        const FeatureTable train_features = subset_features(train_idx);
        const RuntimeMatrix train_matrix = subset_runtimes(train_idx);
        const RuntimeMatrix test_matrix = subset_runtimes(test_idx);

        const PortfolioModel model = train(train_features, train_matrix, config);
        report.fold_k.push_back(model.k);
        for (std::size_t i : test_idx)
            report.fold_instances[static_cast<std::size_t>(fold)].push_back(features.instances[i]);

        // portfolio selections, with optional per-instance overhead
        for (std::size_t t = 0; t < test_idx.size(); ++t) {
            const std::size_t i = test_idx[t];
            const std::string& solver = select(model, features.rows[i]);
            const int s = test_matrix.solver_index(solver);
            double r = test_matrix.runtimes[t][static_cast<std::size_t>(s)];
            if (overhead) {
                const auto it = overhead->find(features.instances[i]);
                if (it != overhead->end()) r = std::min(runtimes.timeout, r + it->second);
            }
            eff_portfolio.push_back(r);
        }
        for (const auto& row : test_matrix.runtimes)
            eff_vbs.push_back(*std::min_element(row.begin(), row.end()));

        const int bs = best_solver_on(train_matrix, all_rows(train_matrix), config.par_f);
        for (const auto& row : test_matrix.runtimes)
            eff_best.push_back(row[static_cast<std::size_t>(bs)]);

        const auto rc = random_cluster_runtimes(
            test_matrix, model.k, config.par_f,
            derive_seed(config.seed, "random-cluster-fold" + std::to_string(fold)));
        eff_random.insert(eff_random.end(), rc.begin(), rc.end());
    }

    const double f = config.par_f;
    const double to = runtimes.timeout;
    auto fill = [&](ApproachResult& a, const std::vector<double>& eff) {
        const ParSolved ps = par_solved(eff, to, f);
        a.par = ps.par;
        a.solved = ps.solved;
    };
    fill(report.vbs, eff_vbs);
    fill(report.portfolio, eff_portfolio);
    fill(report.random_cluster, eff_random);
    fill(report.best_single, eff_best);
    return report;
}

std::string render_report(const EvaluationReport& report) {
    char buf[160];
    std::string out;
    out += "cspfolio evaluation report\n";
    out += "==========================\n";
    std::snprintf(buf, sizeof buf, "instances: %d  solvers: %d  folds: %d\n",
                  report.num_instances, report.num_solvers, report.folds);
    out += buf;
    std::snprintf(buf, sizeof buf, "par_f: %s  timeout: %s\n",
                  format_double(report.config.par_f).c_str(),
                  format_double(report.timeout).c_str());
    out += buf;
    std::snprintf(buf, sizeof buf, "min_cluster_size: %d  max_k: %d  seed: %llu\n",
                  report.config.min_cluster_size, report.config.max_k,
                  static_cast<unsigned long long>(report.config.seed));
    out += buf;
    out += report.overhead_applied
               ? "overhead: encode+feature seconds added to portfolio selections\n"
               : "overhead: none supplied (portfolio runtimes exclude encode/feature time)\n";
    out += "best_single: chosen per fold on the training split\n";
    if (report.roundrobin_families.empty()) {
        out += "stratification: exact\n";
    } else {
        out += "stratification: round-robin for small families:";
        for (const auto& f : report.roundrobin_families) {
            out += ' ';
            out += f.empty() ? "(unlabeled)" : f;
        }
        out += '\n';
    }
    out += "fold_k:";
    for (int k : report.fold_k) {
        out += ' ';
        out += std::to_string(k);
    }
    out += '\n';
    out += '\n';

    const std::string par_header = "PAR" + format_double(report.config.par_f);
    std::snprintf(buf, sizeof buf, "%-16s %-12s %s\n", "approach", par_header.c_str(), "solved");
    out += buf;
    auto row = [&](const char* name, const ApproachResult& a) {
        std::snprintf(buf, sizeof buf, "%-16s %-12.2f %d\n", name, a.par, a.solved);
        out += buf;
    };
    row("VBS", report.vbs);
    row("Portfolio", report.portfolio);
    row("Random Cluster", report.random_cluster);
    row("Best Single", report.best_single);
    return out;
}

} // namespace cspfolio
