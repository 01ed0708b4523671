#include "cspfolio/encode.hpp"

#include <algorithm>
#include <map>

namespace cspfolio {

std::string_view to_string(Encoding e) {
    switch (e) {
    case Encoding::Direct: return "direct";
    case Encoding::Support: return "support";
    case Encoding::Order: return "order";
    }
    return "?";
}

std::optional<Encoding> parse_encoding(std::string_view s) {
    if (s == "direct") return Encoding::Direct;
    if (s == "support") return Encoding::Support;
    if (s == "order") return Encoding::Order;
    return std::nullopt;
}

std::string EncodingConfig::variant_name() const {
    std::string name{to_string(encoding)};
    if (!include_domains) name += "_nd";
    return name;
}

const std::vector<EncodingConfig>& all_encoding_configs() {
    static const std::vector<EncodingConfig> configs = {
        {Encoding::Direct, true},  {Encoding::Direct, false}, {Encoding::Order, true},
        {Encoding::Order, false},  {Encoding::Support, true}, {Encoding::Support, false},
    };
    return configs;
}

namespace {

// Shared scaffolding: index-maps each variable's domain to {1..d} and lays
// out SAT variables lexicographically by (declaration index, value index).
struct Layout {
    const CspInstance& inst;
    std::vector<int> base;      // SAT var preceding this variable's block
    std::vector<int> width;     // block width: d for eq, d-1 for leq
    int num_vars = 0;

    Layout(const CspInstance& instance, bool order_encoding) : inst(instance) {
        base.reserve(inst.variables.size());
        width.reserve(inst.variables.size());
        for (const auto& v : inst.variables) {
            const int d = static_cast<int>(v.domain.size());
            base.push_back(num_vars);
            width.push_back(order_encoding ? d - 1 : d);
            num_vars += width.back();
        }
    }

    int domain_size(int var) const { return static_cast<int>(inst.variables[var].domain.size()); }

    // 1-based value index of `value` in var's domain, or 0 if absent.
    int value_index(int var, int value) const {
        const auto& dom = inst.variables[var].domain;
        auto it = std::lower_bound(dom.begin(), dom.end(), value);
        if (it == dom.end() || *it != value) return 0;
        return static_cast<int>(it - dom.begin()) + 1;
    }

    // Direct/support: SAT variable for X = (value index j, 1-based).
    int eq_var(int var, int j) const { return base[var] + j; }

    // Order: SAT variable for X <= (value index t); only valid for 1 <= t <= d-1.
    int leq_var(int var, int t) const { return base[var] + t; }
};

void require_normalized(const CspInstance& inst) {
    validate(inst);
    if (!is_normalized(inst))
        throw CspError("encoder requires a normalized instance (run normalize first)");
}

void fill_var_map_eq(const Layout& lay, CnfFormula& f) {
    for (std::size_t i = 0; i < lay.inst.variables.size(); ++i) {
        const auto& v = lay.inst.variables[i];
        f.var_domains.emplace_back(v.id, v.domain);
        for (int j = 1; j <= static_cast<int>(v.domain.size()); ++j)
            f.var_map.push_back(
                VarMapEntry{v.id, VarTagKind::Eq, v.domain[j - 1], lay.eq_var(static_cast<int>(i), j)});
    }
}

void fill_var_map_leq(const Layout& lay, CnfFormula& f) {
    for (std::size_t i = 0; i < lay.inst.variables.size(); ++i) {
        const auto& v = lay.inst.variables[i];
        f.var_domains.emplace_back(v.id, v.domain);
        for (int t = 1; t <= static_cast<int>(v.domain.size()) - 1; ++t)
            f.var_map.push_back(
                VarMapEntry{v.id, VarTagKind::Leq, v.domain[t - 1], lay.leq_var(static_cast<int>(i), t)});
    }
}

// Values of var violating a unary bound, as ascending 1-based value indices.
std::vector<int> excluded_value_indices(const Layout& lay, const Constraint& c) {
    std::vector<int> out;
    const auto& dom = lay.inst.variables[c.x].domain;
    for (int j = 1; j <= static_cast<int>(dom.size()); ++j)
        if (!rel_holds(c.op, dom[j - 1], c.bound)) out.push_back(j);
    return out;
}

// ---- direct and support ----------------------------------------------------

void emit_eq_domain_clauses(const Layout& lay, CnfFormula& f, bool with_amo) {
    for (std::size_t i = 0; i < lay.inst.variables.size(); ++i) {
        const int var = static_cast<int>(i);
        const int d = lay.domain_size(var);
        Clause alo;
        for (int j = 1; j <= d; ++j) alo.push_back(lay.eq_var(var, j));
        f.clauses.push_back(std::move(alo));
        if (!with_amo) continue;
        for (int j = 1; j <= d; ++j)
            for (int k = j + 1; k <= d; ++k)
                f.clauses.push_back(Clause{-lay.eq_var(var, j), -lay.eq_var(var, k)});
    }
}

void emit_eq_unary(const Layout& lay, const Constraint& c, CnfFormula& f) {
    for (int j : excluded_value_indices(lay, c))
        f.clauses.push_back(Clause{-lay.eq_var(c.x, j)});
}

CnfFormula encode_direct_impl(const CspInstance& inst, bool include_domains, bool with_amo) {
    require_normalized(inst);
    Layout lay(inst, false);
    CnfFormula f;
    f.num_vars = lay.num_vars;
    fill_var_map_eq(lay, f);
    if (include_domains) emit_eq_domain_clauses(lay, f, with_amo);
    for (const auto& c : inst.constraints) {
        if (c.kind == Constraint::Kind::UnaryBound) {
            emit_eq_unary(lay, c, f);
            continue;
        }
        for (auto [v, w] : c.tuples)
            f.clauses.push_back(
                Clause{-lay.eq_var(c.x, lay.value_index(c.x, v)), -lay.eq_var(c.y, lay.value_index(c.y, w))});
    }
    return f;
}

CnfFormula encode_support_impl(const CspInstance& inst, bool include_domains) {
    require_normalized(inst);
    Layout lay(inst, false);
    CnfFormula f;
    f.num_vars = lay.num_vars;
    fill_var_map_eq(lay, f);
    if (include_domains) emit_eq_domain_clauses(lay, f, true);
    for (const auto& c : inst.constraints) {
        if (c.kind == Constraint::Kind::UnaryBound) {
            emit_eq_unary(lay, c, f);
            continue;
        }
        const int dx = lay.domain_size(c.x);
        const int dy = lay.domain_size(c.y);
        auto forbidden = [&](int v, int w) {
            return std::binary_search(c.tuples.begin(), c.tuples.end(), std::make_pair(v, w));
        };
        const auto& xdom = inst.variables[c.x].domain;
        const auto& ydom = inst.variables[c.y].domain;
        for (int j = 1; j <= dx; ++j) {
            Clause cl{-lay.eq_var(c.x, j)};
            for (int k = 1; k <= dy; ++k)
                if (!forbidden(xdom[j - 1], ydom[k - 1])) cl.push_back(lay.eq_var(c.y, k));
            f.clauses.push_back(std::move(cl));
        }
        for (int k = 1; k <= dy; ++k) {
            Clause cl{-lay.eq_var(c.y, k)};
            for (int j = 1; j <= dx; ++j)
                if (!forbidden(xdom[j - 1], ydom[k - 1])) cl.push_back(lay.eq_var(c.x, j));
            f.clauses.push_back(std::move(cl));
        }
    }
    return f;
}

// ---- order ------------------------------------------------------------------

// A clause literal over threshold "X <= t" where t may fall on a constant:
// x_<=0 is false and x_<=d is true.
struct ThresholdLit {
    int var;     // CSP variable index
    int t;       // threshold value index, may be <= 0 or >= d
    bool negate; // literal is -(x_<=t)
};

// Returns false when the clause is satisfied by a constant literal (never
// happens for conflict clauses, but unary bounds can produce it).
bool build_order_clause(const Layout& lay, const std::vector<ThresholdLit>& lits, Clause& out) {
    out.clear();
    for (const auto& l : lits) {
        const int d = lay.domain_size(l.var);
        if (l.t >= d) {          // x_<=t is constant true
            if (!l.negate) return false;
            continue;            // negated true literal: drop
        }
        if (l.t <= 0) {          // constant false
            if (l.negate) return false;
            continue;
        }
        out.push_back(l.negate ? -lay.leq_var(l.var, l.t) : lay.leq_var(l.var, l.t));
    }
    return true;
}

void emit_order_unary(const Layout& lay, const Constraint& c, CnfFormula& f) {
    const auto& dom = lay.inst.variables[c.x].domain;
    auto count_le = [&](long long bound) {
        return static_cast<int>(
            std::upper_bound(dom.begin(), dom.end(), bound) - dom.begin());
    };
    Clause cl;
    auto emit = [&](const std::vector<ThresholdLit>& lits) {
        if (build_order_clause(lay, lits, cl)) f.clauses.push_back(cl);
    };
    switch (c.op) {
    case RelOp::Lt:
    case RelOp::Le: { // X <= k  ->  unit (x_<=k)
        const int k = c.op == RelOp::Le ? count_le(c.bound) : count_le(static_cast<long long>(c.bound) - 1);
        emit({{c.x, k, false}});
        break;
    }
    case RelOp::Gt:
    case RelOp::Ge: { // X > k  ->  unit (-x_<=k)
        const int k = c.op == RelOp::Gt ? count_le(c.bound) : count_le(static_cast<long long>(c.bound) - 1);
        emit({{c.x, k, true}});
        break;
    }
    case RelOp::Eq: {
        const int pos = lay.value_index(c.x, c.bound);
        if (pos == 0) {
            f.clauses.push_back(Clause{}); // value not in domain: unsatisfiable
            break;
        }
        emit({{c.x, pos, false}});
        emit({{c.x, pos - 1, true}});
        break;
    }
    case RelOp::Ne: {
        const int pos = lay.value_index(c.x, c.bound);
        if (pos == 0) break; // already excluded by the domain
        emit({{c.x, pos, true}, {c.x, pos - 1, false}});
        break;
    }
    }
}

CnfFormula encode_order_impl(const CspInstance& inst, bool include_domains) {
    require_normalized(inst);
    Layout lay(inst, true);
    CnfFormula f;
    f.num_vars = lay.num_vars;
    fill_var_map_leq(lay, f);
    if (include_domains) {
        for (std::size_t i = 0; i < inst.variables.size(); ++i) {
            const int var = static_cast<int>(i);
            for (int t = 1; t + 1 <= lay.domain_size(var) - 1; ++t)
                f.clauses.push_back(Clause{-lay.leq_var(var, t), lay.leq_var(var, t + 1)});
        }
    }
    Clause cl;
    for (const auto& c : inst.constraints) {
        if (c.kind == Constraint::Kind::UnaryBound) {
            emit_order_unary(lay, c, f);
            continue;
        }
        for (auto [v, w] : c.tuples) {
            const int jv = lay.value_index(c.x, v);
            const int jw = lay.value_index(c.y, w);
            // De Morgan form of not(X=v and Y=w); constants never satisfy it,
            // so build_order_clause always yields a (possibly empty) clause.
            if (build_order_clause(lay,
                                   {{c.x, jv, true},
                                    {c.x, jv - 1, false},
                                    {c.y, jw, true},
                                    {c.y, jw - 1, false}},
                                   cl))
                f.clauses.push_back(cl);
        }
    }
    return f;
}

} // namespace

CnfFormula encode_direct(const CspInstance& inst, bool include_domains) {
    return encode_direct_impl(inst, include_domains, true);
}

CnfFormula encode_support(const CspInstance& inst, bool include_domains) {
    return encode_support_impl(inst, include_domains);
}

CnfFormula encode_order(const CspInstance& inst, bool include_domains) {
    return encode_order_impl(inst, include_domains);
}

CnfFormula encode(const CspInstance& inst, const EncodingConfig& cfg) {
    switch (cfg.encoding) {
    case Encoding::Direct: return encode_direct(inst, cfg.include_domains);
    case Encoding::Support: return encode_support(inst, cfg.include_domains);
    case Encoding::Order: return encode_order(inst, cfg.include_domains);
    }
    throw CspError("unknown encoding");
}

CnfFormula encode_mutant(const CspInstance& inst, const EncodingConfig& cfg, EncoderMutant mutant) {
    if (mutant == EncoderMutant::None) return encode(inst, cfg);
    if (cfg.encoding != Encoding::Direct)
        throw CspError("DropAmo mutant only applies to the direct encoding");
    return encode_direct_impl(inst, cfg.include_domains, false);
}

std::vector<std::pair<std::string, int>> decode_model(const CnfFormula& f,
                                                      const std::vector<bool>& model) {
    if (static_cast<int>(model.size()) != f.num_vars)
        throw DimacsError("model length does not match num_vars");

    std::map<std::string, std::vector<const VarMapEntry*>> by_var;
    for (const auto& e : f.var_map) by_var[e.var].push_back(&e);

    std::vector<std::pair<std::string, int>> out;
    out.reserve(f.var_domains.size());
    for (const auto& [id, dom] : f.var_domains) {
        const auto it = by_var.find(id);
        if (it == by_var.end() || it->second.empty()) {
            // order encoding of a singleton domain: no SAT variables at all
            if (dom.size() != 1) throw DimacsError("no var_map entries for variable '" + id + "'");
            out.emplace_back(id, dom[0]);
            continue;
        }
        const auto& entries = it->second;
        if (entries.front()->kind == VarTagKind::Eq) {
            int chosen = 0;
            int hits = 0;
            for (const auto* e : entries)
                if (model[static_cast<std::size_t>(e->sat_var) - 1]) {
                    chosen = e->value;
                    ++hits;
                }
            if (hits != 1)
                throw DimacsError("model assigns " + std::to_string(hits) + " values to '" + id +
                                  "' (domain clauses violated)");
            out.emplace_back(id, chosen);
        } else {
            // least true threshold; x_<=d is constant true
            int value = dom.back();
            for (const auto* e : entries)
                if (model[static_cast<std::size_t>(e->sat_var) - 1]) {
                    value = std::min(value, e->value);
                }
            out.emplace_back(id, value);
        }
    }
    return out;
}

} // namespace cspfolio
