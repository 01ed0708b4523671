#include "cspfolio/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <set>

#include "cspfolio/csv.hpp"
#include "cspfolio/dpll.hpp"
#include "cspfolio/stats.hpp"

namespace cspfolio {

namespace {

void push_summary(std::vector<std::string>& names, const std::string& prefix) {
    for (const char* suffix : {"_mean", "_cv", "_min", "_max", "_entropy"})
        names.push_back(prefix + suffix);
}

void push_summary(std::vector<double>& out, const StatSummary& s) {
    out.push_back(s.mean);
    out.push_back(s.cv);
    out.push_back(s.min);
    out.push_back(s.max);
    out.push_back(s.entropy);
}

double ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

} // namespace

const std::vector<std::string>& sat_feature_schema() {
    static const std::vector<std::string> schema = [] {
        std::vector<std::string> n;
        n.insert(n.end(), {"num_vars", "num_clauses", "clause_var_ratio", "var_clause_ratio"});
        push_summary(n, "clause_len");
        push_summary(n, "var_degree");
        n.push_back("pos_lit_fraction");
        push_summary(n, "clause_pos_ratio");
        n.push_back("horn_fraction");
        push_summary(n, "horn_var_count");
        n.insert(n.end(), {"unit_fraction", "binary_fraction", "ternary_fraction"});
        n.insert(n.end(), {"probe_decisions", "probe_propagations", "probe_props_per_decision",
                           "probe_backtracks", "probe_solved", "probe_assigned_fraction"});
        return n;
    }();
    return schema;
}

std::vector<double> sat_features(const CnfFormula& f, std::uint64_t probe_node_budget) {
    check_formula(f, false);
    const double nv = f.num_vars;
    const double nc = static_cast<double>(f.clauses.size());

    std::vector<double> out;
    out.reserve(sat_feature_schema().size());
    out.push_back(nv);
    out.push_back(nc);
    out.push_back(ratio(nc, nv));
    out.push_back(ratio(nv, nc));

    std::vector<double> clause_len;
    std::vector<double> clause_pos_ratio;
    std::vector<double> var_degree(static_cast<std::size_t>(f.num_vars), 0.0);
    std::vector<double> horn_var_count(static_cast<std::size_t>(f.num_vars), 0.0);
    std::size_t total_lits = 0, pos_lits = 0, horn = 0, unit = 0, binary = 0, ternary = 0;
    for (const auto& clause : f.clauses) {
        clause_len.push_back(static_cast<double>(clause.size()));
        std::size_t pos = 0;
        for (int lit : clause) {
            if (lit > 0) ++pos;
            ++var_degree[static_cast<std::size_t>(std::abs(lit)) - 1];
        }
        total_lits += clause.size();
        pos_lits += pos;
        clause_pos_ratio.push_back(clause.empty() ? 0.0
                                                  : static_cast<double>(pos) /
                                                        static_cast<double>(clause.size()));
        if (pos <= 1) {
            ++horn;
            for (int lit : clause) ++horn_var_count[static_cast<std::size_t>(std::abs(lit)) - 1];
        }
        if (clause.size() == 1) ++unit;
        if (clause.size() == 2) ++binary;
        if (clause.size() == 3) ++ternary;
    }

    push_summary(out, stat_summary_or_zero(clause_len));
    push_summary(out, stat_summary_or_zero(var_degree));
    out.push_back(ratio(static_cast<double>(pos_lits), static_cast<double>(total_lits)));
    push_summary(out, stat_summary_or_zero(clause_pos_ratio));
    out.push_back(ratio(static_cast<double>(horn), nc));
    push_summary(out, stat_summary_or_zero(horn_var_count));
    out.push_back(ratio(static_cast<double>(unit), nc));
    out.push_back(ratio(static_cast<double>(binary), nc));
    out.push_back(ratio(static_cast<double>(ternary), nc));

    if (probe_node_budget == 0) {
        out.insert(out.end(), {0, 0, 0, 0, 0, 0});
    } else {
        const ProbeStats st = probe_dpll(f, probe_node_budget);
        out.push_back(static_cast<double>(st.decisions));
        out.push_back(static_cast<double>(st.propagations));
        out.push_back(ratio(static_cast<double>(st.propagations), static_cast<double>(st.decisions)));
        out.push_back(static_cast<double>(st.backtracks));
        out.push_back(st.solved ? 1.0 : 0.0);
        out.push_back(st.assigned_fraction);
    }
    return out;
}

const std::vector<std::string>& csp_feature_schema() {
    static const std::vector<std::string> schema = [] {
        std::vector<std::string> n;
        n.insert(n.end(), {"num_variables", "num_constraints", "constraint_var_ratio",
                           "mean_domain_size", "max_domain_size"});
        push_summary(n, "domain_size");
        push_summary(n, "tightness");
        push_summary(n, "degree");
        n.insert(n.end(), {"probe_nodes", "probe_queue_pops", "probe_wipeouts", "probe_solved"});
        return n;
    }();
    return schema;
}

std::vector<double> csp_features(const CspInstance& inst, std::uint64_t probe_node_budget) {
    validate(inst);
    if (!is_normalized(inst)) throw CspError("csp_features requires a normalized instance");

    std::vector<double> domain_sizes;
    domain_sizes.reserve(inst.variables.size());
    for (const auto& v : inst.variables) domain_sizes.push_back(static_cast<double>(v.domain.size()));

    std::vector<double> tightness;
    std::vector<std::set<int>> neighbors(inst.variables.size());
    for (const auto& c : inst.constraints) {
        if (c.kind != Constraint::Kind::Forbidden) continue;
        const double space = domain_sizes[static_cast<std::size_t>(c.x)] *
                             domain_sizes[static_cast<std::size_t>(c.y)];
        tightness.push_back(ratio(static_cast<double>(c.tuples.size()), space));
        neighbors[static_cast<std::size_t>(c.x)].insert(c.y);
        neighbors[static_cast<std::size_t>(c.y)].insert(c.x);
    }
    std::vector<double> degrees;
    degrees.reserve(neighbors.size());
    for (const auto& ns : neighbors) degrees.push_back(static_cast<double>(ns.size()));

    const auto dom_stats = stat_summary_or_zero(domain_sizes);
    std::vector<double> out;
    out.reserve(csp_feature_schema().size());
    out.push_back(static_cast<double>(inst.variables.size()));
    out.push_back(static_cast<double>(inst.constraints.size()));
    out.push_back(ratio(static_cast<double>(inst.constraints.size()),
                        static_cast<double>(inst.variables.size())));
    out.push_back(dom_stats.mean);
    out.push_back(dom_stats.max);
    push_summary(out, dom_stats);
    push_summary(out, stat_summary_or_zero(tightness));
    push_summary(out, stat_summary_or_zero(degrees));

    if (probe_node_budget == 0) {
        out.insert(out.end(), {0, 0, 0, 0});
    } else {
        const CspProbeStats st = probe_csp(inst, probe_node_budget);
        out.push_back(static_cast<double>(st.nodes));
        out.push_back(static_cast<double>(st.queue_pops));
        out.push_back(static_cast<double>(st.wipeouts));
        out.push_back(st.solved ? 1.0 : 0.0);
    }
    return out;
}

// ---- micro-solver -----------------------------------------------------------

namespace {

class MicroSolver {
public:
    MicroSolver(const CspInstance& inst, std::uint64_t budget) : inst_(inst), budget_(budget) {
        active_.reserve(inst.variables.size());
        counts_.reserve(inst.variables.size());
        for (const auto& v : inst.variables) {
            active_.emplace_back(v.domain.size(), 1);
            counts_.push_back(static_cast<int>(v.domain.size()));
        }
        for (std::size_t ci = 0; ci < inst.constraints.size(); ++ci)
            if (inst.constraints[ci].kind == Constraint::Kind::Forbidden)
                binary_.push_back(static_cast<int>(ci));
    }

    CspProbeStats run() {
        // unary bounds once, then a root AC-3 pass
        for (const auto& c : inst_.constraints) {
            if (c.kind != Constraint::Kind::UnaryBound) continue;
            const auto& dom = inst_.variables[static_cast<std::size_t>(c.x)].domain;
            for (std::size_t i = 0; i < dom.size(); ++i)
                if (active_[static_cast<std::size_t>(c.x)][i] && !rel_holds(c.op, dom[i], c.bound))
                    remove(c.x, i);
            if (counts_[static_cast<std::size_t>(c.x)] == 0) {
                ++stats_.wipeouts;
                stats_.solved = true; // refuted at the root
                return stats_;
            }
        }
        if (!ac3_from_all()) {
            stats_.solved = true;
            return stats_;
        }
        try {
            search(0);
            stats_.solved = true; // found a solution or exhausted the tree
        } catch (const Cutoff&) {
            stats_.solved = false;
        }
        return stats_;
    }

private:
    struct Cutoff {};
    using Removal = std::pair<int, std::size_t>; // (variable, value index)

    void remove(int var, std::size_t idx) {
        active_[static_cast<std::size_t>(var)][idx] = 0;
        --counts_[static_cast<std::size_t>(var)];
        trail_.emplace_back(var, idx);
    }

    void restore(std::size_t mark) {
        while (trail_.size() > mark) {
            auto [var, idx] = trail_.back();
            trail_.pop_back();
            active_[static_cast<std::size_t>(var)][idx] = 1;
            ++counts_[static_cast<std::size_t>(var)];
        }
    }

    bool forbidden(const Constraint& c, int xv, int yv) const {
        return std::binary_search(c.tuples.begin(), c.tuples.end(), std::make_pair(xv, yv));
    }

    // Removes values of `target` without support in `other`; true on wipeout.
    bool revise(int ci, bool target_is_x) {
        const auto& c = inst_.constraints[static_cast<std::size_t>(ci)];
        const int target = target_is_x ? c.x : c.y;
        const int other = target_is_x ? c.y : c.x;
        const auto& tdom = inst_.variables[static_cast<std::size_t>(target)].domain;
        const auto& odom = inst_.variables[static_cast<std::size_t>(other)].domain;
        bool removed = false;
        for (std::size_t i = 0; i < tdom.size(); ++i) {
            if (!active_[static_cast<std::size_t>(target)][i]) continue;
            bool supported = false;
            for (std::size_t j = 0; j < odom.size() && !supported; ++j) {
                if (!active_[static_cast<std::size_t>(other)][j]) continue;
                const int xv = target_is_x ? tdom[i] : odom[j];
                const int yv = target_is_x ? odom[j] : tdom[i];
                if (!forbidden(c, xv, yv)) supported = true;
            }
            if (!supported) {
                remove(target, i);
                removed = true;
            }
        }
        if (counts_[static_cast<std::size_t>(target)] == 0) {
            ++stats_.wipeouts;
            return true;
        }
        if (removed) enqueue_neighbors(target, ci);
        return false;
    }

    void enqueue_neighbors(int changed, int except_ci) {
        for (int ci : binary_) {
            if (ci == except_ci) continue;
            const auto& c = inst_.constraints[static_cast<std::size_t>(ci)];
            if (c.y == changed) push_arc(ci, true);
            if (c.x == changed) push_arc(ci, false);
        }
    }

    void push_arc(int ci, bool target_is_x) {
        const auto key = std::make_pair(ci, target_is_x);
        if (in_queue_.insert(key).second) queue_.push_back(key);
    }

    // False on wipeout. Leaves the queue empty either way.
    bool drain() {
        bool wiped = false;
        while (!queue_.empty()) {
            auto [ci, target_is_x] = queue_.front();
            queue_.pop_front();
            in_queue_.erase({ci, target_is_x});
            ++stats_.queue_pops;
            if (!wiped && revise(ci, target_is_x)) wiped = true;
        }
        return !wiped;
    }

    bool ac3_from_all() {
        for (int ci : binary_) {
            push_arc(ci, true);
            push_arc(ci, false);
        }
        return drain();
    }

    // Singleton domains count as bound: the AC-3 fixpoint already guarantees
    // they are consistent with every neighbor, so all-singleton is a solution.
    bool search(std::size_t from) {
        std::size_t var = from;
        while (var < inst_.variables.size() && counts_[var] == 1) ++var;
        if (var == inst_.variables.size()) return true;

        const auto& dom = inst_.variables[var].domain;
        for (std::size_t i = 0; i < dom.size(); ++i) {
            if (!active_[var][i]) continue;
            if (stats_.nodes >= budget_) throw Cutoff{};
            ++stats_.nodes;
            const std::size_t mark = trail_.size();
            for (std::size_t j = 0; j < dom.size(); ++j)
                if (j != i && active_[var][j]) remove(static_cast<int>(var), j);
            enqueue_neighbors(static_cast<int>(var), -1);
            if (drain() && search(var + 1)) return true;
            restore(mark);
        }
        return false;
    }

    const CspInstance& inst_;
    std::uint64_t budget_;
    std::vector<std::vector<char>> active_;
    std::vector<int> counts_;
    std::vector<int> binary_;
    std::deque<std::pair<int, bool>> queue_;
    std::set<std::pair<int, bool>> in_queue_;
    std::vector<Removal> trail_;
    CspProbeStats stats_;
};

} // namespace

CspProbeStats probe_csp(const CspInstance& inst, std::uint64_t node_budget) {
    validate(inst);
    if (!is_normalized(inst)) throw CspError("probe_csp requires a normalized instance");
    MicroSolver solver(inst, node_budget);
    return solver.run();
}

// ---- feature CSV ------------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    for (int prec : {15, 16, 17}) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string write_feature_csv(const FeatureTable& table) {
    std::string out = "instance";
    for (const auto& name : table.schema) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (std::size_t i = 0; i < table.instances.size(); ++i) {
        out += table.instances[i];
        for (double v : table.rows[i]) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    for (const auto& id : table.error_instances) {
        out += id;
        out += ",ERROR\n";
    }
    return out;
}

FeatureTable parse_feature_csv(std::string_view text) {
    const auto rows = parse_csv(text);
    if (rows.empty() || rows[0].empty() || rows[0][0] != "instance")
        throw std::runtime_error("feature CSV: missing 'instance,...' header");
    FeatureTable table;
    table.schema.assign(rows[0].begin() + 1, rows[0].end());
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() == 2 && row[1] == "ERROR") {
            table.error_instances.push_back(row[0]);
            continue;
        }
        if (row.size() != rows[0].size())
            throw std::runtime_error("feature CSV: row " + std::to_string(r + 1) +
                                     " has wrong column count");
        std::vector<double> values;
        values.reserve(row.size() - 1);
        for (std::size_t c = 1; c < row.size(); ++c) {
            char* end = nullptr;
            const double v = std::strtod(row[c].c_str(), &end);
            if (end != row[c].c_str() + row[c].size())
                throw std::runtime_error("feature CSV: bad number '" + row[c] + "'");
            values.push_back(v);
        }
        table.instances.push_back(row[0]);
        table.rows.push_back(std::move(values));
    }
    return table;
}

} // namespace cspfolio
