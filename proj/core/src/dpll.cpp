#include "cspfolio/dpll.hpp"

#include <cstdlib>

namespace cspfolio {

namespace {

class Engine {
public:
    explicit Engine(const CnfFormula& f)
        : num_vars_(f.num_vars), clauses_(f.clauses), assign_(f.num_vars + 1, 0),
          occ_pos_(f.num_vars + 1), occ_neg_(f.num_vars + 1), sat_count_(f.clauses.size(), 0),
          unassigned_(f.clauses.size(), 0) {
        for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
            unassigned_[ci] = static_cast<int>(clauses_[ci].size());
            for (int lit : clauses_[ci])
                (lit > 0 ? occ_pos_ : occ_neg_)[static_cast<std::size_t>(std::abs(lit))].push_back(
                    static_cast<int>(ci));
        }
    }

    std::uint64_t propagations = 0;

    int num_vars() const { return num_vars_; }
    int assigned_vars() const { return static_cast<int>(trail_.size()); }
    bool all_satisfied() const { return satisfied_ == clauses_.size(); }
    std::size_t mark() const { return trail_.size(); }
    bool value_of(int var) const { return assign_[static_cast<std::size_t>(var)] > 0; }
    bool is_assigned(int var) const { return assign_[static_cast<std::size_t>(var)] != 0; }

    int lowest_unassigned(int from) const {
        for (int v = from; v <= num_vars_; ++v)
            if (assign_[static_cast<std::size_t>(v)] == 0) return v;
        return 0;
    }

    // Applies `lit` (0 means: only re-propagate existing units, used at the
    // root) plus all consequences. Returns false on conflict; the trail keeps
    // whatever was assigned, callers undo via their mark.
    bool propagate(int lit) {
        std::size_t head = trail_.size();
        if (lit != 0) {
            if (!enqueue(lit, false)) return false;
        } else {
            for (std::size_t ci = 0; ci < clauses_.size(); ++ci) {
                if (sat_count_[ci] > 0) continue;
                if (unassigned_[ci] == 0) return false;
                if (unassigned_[ci] == 1 && !enqueue(sole_unassigned(ci), true)) return false;
            }
        }
        while (head < trail_.size()) {
            const int assigned = trail_[head++];
            const int falsified = -assigned;
            const auto& watch = falsified > 0 ? occ_pos_[static_cast<std::size_t>(falsified)]
                                              : occ_neg_[static_cast<std::size_t>(-falsified)];
            for (int ci : watch) {
                const auto c = static_cast<std::size_t>(ci);
                if (sat_count_[c] > 0) continue;
                if (unassigned_[c] == 0) return false;
                if (unassigned_[c] == 1 && !enqueue(sole_unassigned(c), true)) return false;
            }
        }
        return true;
    }

    void undo(std::size_t mark) {
        while (trail_.size() > mark) {
            const int lit = trail_.back();
            trail_.pop_back();
            const int var = std::abs(lit);
            assign_[static_cast<std::size_t>(var)] = 0;
            for (int ci : lit > 0 ? occ_pos_[static_cast<std::size_t>(var)]
                                  : occ_neg_[static_cast<std::size_t>(var)])
                if (--sat_count_[static_cast<std::size_t>(ci)] == 0) --satisfied_;
            for (int ci : lit > 0 ? occ_neg_[static_cast<std::size_t>(var)]
                                  : occ_pos_[static_cast<std::size_t>(var)])
                ++unassigned_[static_cast<std::size_t>(ci)];
        }
    }

    // Complete assignment snapshot; unassigned variables read as `fill`.
    std::vector<bool> snapshot(bool fill) const {
        std::vector<bool> m(static_cast<std::size_t>(num_vars_), fill);
        for (int v = 1; v <= num_vars_; ++v)
            if (assign_[static_cast<std::size_t>(v)] != 0)
                m[static_cast<std::size_t>(v) - 1] = assign_[static_cast<std::size_t>(v)] > 0;
        return m;
    }

    std::vector<int> free_vars() const {
        std::vector<int> out;
        for (int v = 1; v <= num_vars_; ++v)
            if (assign_[static_cast<std::size_t>(v)] == 0) out.push_back(v);
        return out;
    }

private:
    int sole_unassigned(std::size_t ci) const {
        for (int lit : clauses_[ci])
            if (assign_[static_cast<std::size_t>(std::abs(lit))] == 0) return lit;
        return 0; // unreachable when unassigned_[ci] == 1
    }

    bool enqueue(int lit, bool forced) {
        const int var = std::abs(lit);
        const auto v = static_cast<std::size_t>(var);
        if (assign_[v] != 0) return (assign_[v] > 0) == (lit > 0);
        assign_[v] = lit > 0 ? 1 : -1;
        if (forced) ++propagations;
        trail_.push_back(lit);
        for (int ci : lit > 0 ? occ_pos_[v] : occ_neg_[v])
            if (sat_count_[static_cast<std::size_t>(ci)]++ == 0) ++satisfied_;
        for (int ci : lit > 0 ? occ_neg_[v] : occ_pos_[v]) --unassigned_[static_cast<std::size_t>(ci)];
        return true;
    }

    int num_vars_;
    const std::vector<Clause>& clauses_;
    std::vector<signed char> assign_;
    std::vector<std::vector<int>> occ_pos_, occ_neg_;
    std::vector<int> sat_count_;
    std::vector<int> unassigned_;
    std::vector<int> trail_;
    std::size_t satisfied_ = 0;
};

struct Exceeded {};

class Counter {
public:
    Counter(const CnfFormula& f, std::uint64_t node_limit,
            std::vector<std::vector<bool>>* models, std::size_t max_models)
        : eng_(f), node_limit_(node_limit), models_(models), max_models_(max_models) {}

    std::uint64_t run() {
        if (!eng_.propagate(0)) return 0;
        return count_from(1);
    }

private:
    std::uint64_t count_from(int cursor) {
        if (++nodes_ > node_limit_) throw Exceeded{};
        if (eng_.all_satisfied()) return leaf();
        const int var = eng_.lowest_unassigned(cursor);
        if (var == 0) return 0; // every variable assigned yet some clause unsatisfied
        std::uint64_t total = 0;
        for (int sign : {+1, -1}) {
            const std::size_t mark = eng_.mark();
            if (eng_.propagate(sign * var)) {
                const std::uint64_t sub = count_from(var + 1);
                if (total > UINT64_MAX - sub) throw Exceeded{};
                total += sub;
            }
            eng_.undo(mark);
        }
        return total;
    }

    std::uint64_t leaf() {
        const auto free = static_cast<std::uint64_t>(eng_.num_vars() - eng_.assigned_vars());
        if (free >= 63) throw Exceeded{};
        const std::uint64_t n = 1ull << free;
        if (models_) {
            if (models_->size() + n > max_models_) throw Exceeded{};
            const auto free_list = eng_.free_vars();
            for (std::uint64_t combo = 0; combo < n; ++combo) {
                auto m = eng_.snapshot(false);
                for (std::size_t b = 0; b < free_list.size(); ++b)
                    if (combo & (1ull << b))
                        m[static_cast<std::size_t>(free_list[b]) - 1] = true;
                models_->push_back(std::move(m));
            }
        }
        return n;
    }

    Engine eng_;
    std::uint64_t node_limit_;
    std::uint64_t nodes_ = 0;
    std::vector<std::vector<bool>>* models_;
    std::size_t max_models_;
};

} // namespace

std::optional<std::uint64_t> count_models(const CnfFormula& f, std::uint64_t node_limit) {
    check_formula(f, false);
    try {
        Counter c(f, node_limit, nullptr, 0);
        return c.run();
    } catch (const Exceeded&) {
        return std::nullopt;
    }
}

std::optional<std::vector<std::vector<bool>>> enumerate_models(const CnfFormula& f,
                                                               std::size_t max_models) {
    check_formula(f, false);
    std::vector<std::vector<bool>> models;
    try {
        Counter c(f, std::uint64_t{1} << 62, &models, max_models);
        c.run();
    } catch (const Exceeded&) {
        return std::nullopt;
    }
    return models;
}

namespace {

class Prober {
public:
    Prober(const CnfFormula& f, std::uint64_t budget) : eng_(f), budget_(budget) {}

    ProbeStats run() {
        ProbeStats st;
        const bool root_ok = eng_.propagate(0);
        Status s = root_ok ? search(1, st) : Status::Unsat;
        st.solved = s != Status::Cutoff;
        st.propagations = eng_.propagations;
        if (s != Status::Cutoff)
            st.assigned_fraction = fraction(); // SAT: the model; UNSAT: root units
        return st;
    }

private:
    enum class Status { Sat, Unsat, Cutoff };

    double fraction() const {
        return eng_.num_vars() == 0
                   ? 0.0
                   : static_cast<double>(eng_.assigned_vars()) / eng_.num_vars();
    }

    Status search(int cursor, ProbeStats& st) {
        if (eng_.all_satisfied()) return Status::Sat;
        const int var = eng_.lowest_unassigned(cursor);
        if (var == 0) return Status::Unsat;
        if (st.decisions >= budget_) {
            st.assigned_fraction = fraction();
            return Status::Cutoff;
        }
        ++st.decisions;
        const std::size_t mark = eng_.mark();
        if (eng_.propagate(var)) {
            const Status s = search(var + 1, st);
            if (s != Status::Unsat) return s;
        }
        eng_.undo(mark);
        ++st.backtracks;
        if (eng_.propagate(-var)) {
            const Status s = search(var + 1, st);
            if (s != Status::Unsat) return s;
        }
        eng_.undo(mark);
        return Status::Unsat;
    }

    Engine eng_;
    std::uint64_t budget_;
};

} // namespace

ProbeStats probe_dpll(const CnfFormula& f, std::uint64_t decision_budget) {
    check_formula(f, false);
    Prober p(f, decision_budget);
    return p.run();
}

} // namespace cspfolio
