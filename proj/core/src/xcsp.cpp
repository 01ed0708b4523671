#include "cspfolio/xcsp.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace cspfolio {

namespace {

namespace pt = boost::property_tree;

std::vector<std::string> split_ws(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

int to_int(const std::string& tok, const std::string& context) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
        throw CspError("bad integer '" + tok + "' in " + context);
    }
    if (pos != tok.size()) throw CspError("bad integer '" + tok + "' in " + context);
    return v;
}

std::vector<int> parse_domain_values(const std::string& text) {
    std::vector<int> values;
    for (const auto& tok : split_ws(text)) {
        const auto dots = tok.find("..");
        if (dots == std::string::npos) {
            values.push_back(to_int(tok, "domain"));
        } else {
            const int lo = to_int(tok.substr(0, dots), "domain range");
            const int hi = to_int(tok.substr(dots + 2), "domain range");
            if (lo > hi) throw CspError("empty domain range " + tok);
            for (int v = lo; v <= hi; ++v) values.push_back(v);
        }
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

struct Relation {
    int arity = 0;
    bool supports = false;
    std::vector<std::pair<int, int>> tuples; // arity-2 only
};

struct Predicate {
    std::vector<std::string> formals;
    std::string op;          // ne eq lt le gt ge
    std::string args[2];     // formal name or integer literal
};

RelOp xcsp_op(const std::string& name) {
    if (name == "ne") return RelOp::Ne;
    if (name == "eq") return RelOp::Eq;
    if (name == "lt") return RelOp::Lt;
    if (name == "le") return RelOp::Le;
    if (name == "gt") return RelOp::Gt;
    if (name == "ge") return RelOp::Ge;
    throw CspError("unsupported constraint type: predicate functional '" + name + "'");
}

RelOp flip(RelOp op) {
    switch (op) {
    case RelOp::Lt: return RelOp::Gt;
    case RelOp::Le: return RelOp::Ge;
    case RelOp::Gt: return RelOp::Lt;
    case RelOp::Ge: return RelOp::Le;
    default: return op; // Eq and Ne are symmetric
    }
}

bool is_integer(const std::string& tok) {
    if (tok.empty()) return false;
    std::size_t i = tok[0] == '-' || tok[0] == '+' ? 1 : 0;
    if (i == tok.size()) return false;
    for (; i < tok.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
    return true;
}

// Accepts exactly op(a,b) with atomic arguments; arithmetic terms are out of
// scope and rejected by name.
Predicate parse_functional(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    const auto open = s.find('(');
    if (open == std::string::npos || s.empty() || s.back() != ')')
        throw CspError("unsupported constraint type: predicate expression '" + raw + "'");
    Predicate p;
    p.op = s.substr(0, open);
    const std::string inner = s.substr(open + 1, s.size() - open - 2);
    const auto comma = inner.find(',');
    if (comma == std::string::npos || inner.find('(') != std::string::npos)
        throw CspError("unsupported constraint type: predicate expression '" + raw + "'");
    p.args[0] = inner.substr(0, comma);
    p.args[1] = inner.substr(comma + 1);
    if (p.args[0].empty() || p.args[1].empty() || p.args[1].find(',') != std::string::npos)
        throw CspError("unsupported constraint type: predicate expression '" + raw + "'");
    xcsp_op(p.op); // validates the operator name
    return p;
}

} // namespace

CspInstance parse_xcsp(std::string_view text, std::string name) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::xml_parser::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw CspError(std::string("malformed XML: ") + e.what());
    }

    const auto instance = tree.get_child_optional("instance");
    if (!instance) throw CspError("malformed XML: missing <instance> root");

    CspInstance inst;
    inst.name = instance->get<std::string>("presentation.<xmlattr>.name", std::move(name));

    std::map<std::string, std::vector<int>> domains;
    if (const auto doms = instance->get_child_optional("domains"))
        for (const auto& [key, node] : *doms) {
            if (key != "domain") continue;
            const auto dom_name = node.get<std::string>("<xmlattr>.name");
            domains[dom_name] = parse_domain_values(node.get_value<std::string>());
        }

    const auto vars = instance->get_child_optional("variables");
    if (vars)
        for (const auto& [key, node] : *vars) {
            if (key != "variable") continue;
            const auto var_name = node.get<std::string>("<xmlattr>.name");
            const auto dom_ref = node.get<std::string>("<xmlattr>.domain");
            const auto it = domains.find(dom_ref);
            if (it == domains.end())
                throw CspError("variable '" + var_name + "' references unknown domain '" + dom_ref + "'");
            if (it->second.empty()) throw CspError("variable '" + var_name + "' has an empty domain");
            inst.variables.push_back(CspVariable{var_name, it->second});
        }

    std::map<std::string, Relation> relations;
    if (const auto rels = instance->get_child_optional("relations"))
        for (const auto& [key, node] : *rels) {
            if (key != "relation") continue;
            const auto rel_name = node.get<std::string>("<xmlattr>.name");
            Relation rel;
            rel.arity = node.get<int>("<xmlattr>.arity");
            const auto semantics = node.get<std::string>("<xmlattr>.semantics");
            if (semantics == "supports")
                rel.supports = true;
            else if (semantics != "conflicts")
                throw CspError("unsupported constraint type: relation semantics '" + semantics + "'");
            if (rel.arity == 2) {
                const auto body = node.get_value<std::string>();
                std::size_t start = 0;
                while (start <= body.size() && !body.empty()) {
                    auto bar = body.find('|', start);
                    if (bar == std::string::npos) bar = body.size();
                    const auto toks = split_ws(body.substr(start, bar - start));
                    if (!toks.empty()) {
                        if (toks.size() != 2)
                            throw CspError("relation '" + rel_name + "': tuple arity mismatch");
                        rel.tuples.emplace_back(to_int(toks[0], "relation tuple"),
                                                to_int(toks[1], "relation tuple"));
                    }
                    start = bar + 1;
                }
            }
            relations[rel_name] = std::move(rel);
        }

    std::map<std::string, Predicate> predicates;
    if (const auto preds = instance->get_child_optional("predicates"))
        for (const auto& [key, node] : *preds) {
            if (key != "predicate") continue;
            const auto pred_name = node.get<std::string>("<xmlattr>.name");
            Predicate p = parse_functional(node.get<std::string>("expression.functional"));
            for (const auto& tok : split_ws(node.get<std::string>("parameters")))
                if (tok != "int") p.formals.push_back(tok);
            predicates[pred_name] = std::move(p);
        }

    const auto constraints = instance->get_child_optional("constraints");
    if (constraints)
        for (const auto& [key, node] : *constraints) {
            if (key != "constraint") continue;
            const auto con_name = node.get<std::string>("<xmlattr>.name");
            const auto reference = node.get<std::string>("<xmlattr>.reference");
            const auto scope = split_ws(node.get<std::string>("<xmlattr>.scope"));

            std::vector<int> scope_idx;
            for (const auto& id : scope) {
                const int idx = inst.var_index(id);
                if (idx < 0)
                    throw CspError("constraint '" + con_name + "' references undeclared variable '" +
                                   id + "'");
                scope_idx.push_back(idx);
            }

            if (reference.rfind("global:", 0) == 0)
                throw CspError("unsupported constraint type: " + reference);

            if (const auto rel_it = relations.find(reference); rel_it != relations.end()) {
                const Relation& rel = rel_it->second;
                if (rel.arity != 2 || scope_idx.size() != 2)
                    throw CspError("unsupported constraint type: extensional relation of arity " +
                                   std::to_string(rel.arity != 2 ? rel.arity
                                                                 : static_cast<int>(scope_idx.size())));
                const int x = scope_idx[0], y = scope_idx[1];
                if (x == y) throw CspError("constraint '" + con_name + "' scope is not distinct");
                if (rel.supports) {
                    std::vector<std::pair<int, int>> listed = rel.tuples;
                    std::sort(listed.begin(), listed.end());
                    std::vector<std::pair<int, int>> forbidden;
                    for (int v : inst.variables[x].domain)
                        for (int w : inst.variables[y].domain)
                            if (!std::binary_search(listed.begin(), listed.end(), std::make_pair(v, w)))
                                forbidden.emplace_back(v, w);
                    inst.constraints.push_back(Constraint::forbidden(x, y, std::move(forbidden)));
                } else {
                    inst.constraints.push_back(Constraint::forbidden(x, y, rel.tuples));
                }
                continue;
            }

            if (const auto pred_it = predicates.find(reference); pred_it != predicates.end()) {
                const Predicate& p = pred_it->second;
                std::vector<std::string> actuals;
                if (const auto params = node.get_optional<std::string>("parameters"))
                    actuals = split_ws(*params);
                else
                    actuals = scope;
                if (actuals.size() != p.formals.size())
                    throw CspError("constraint '" + con_name + "': parameter count mismatch");

                std::string effective[2];
                for (int a = 0; a < 2; ++a) {
                    effective[a] = p.args[a];
                    for (std::size_t i = 0; i < p.formals.size(); ++i)
                        if (p.args[a] == p.formals[i]) {
                            effective[a] = actuals[i];
                            break;
                        }
                }

                const RelOp op = xcsp_op(p.op);
                const bool lhs_const = is_integer(effective[0]);
                const bool rhs_const = is_integer(effective[1]);
                if (lhs_const && rhs_const)
                    throw CspError("unsupported constraint type: predicate over two constants");
                if (!lhs_const && !rhs_const) {
                    const int x = inst.var_index(effective[0]);
                    const int y = inst.var_index(effective[1]);
                    if (x < 0 || y < 0)
                        throw CspError("constraint '" + con_name + "' references undeclared variable");
                    if (x == y) throw CspError("constraint '" + con_name + "' scope is not distinct");
                    inst.constraints.push_back(Constraint::relation(x, y, op));
                } else {
                    const std::string& var_tok = lhs_const ? effective[1] : effective[0];
                    const std::string& const_tok = lhs_const ? effective[0] : effective[1];
                    const int x = inst.var_index(var_tok);
                    if (x < 0)
                        throw CspError("constraint '" + con_name + "' references undeclared variable");
                    const RelOp oriented = lhs_const ? flip(op) : op;
                    inst.constraints.push_back(
                        Constraint::unary_bound(x, oriented, to_int(const_tok, "predicate constant")));
                }
                continue;
            }

            throw CspError("unsupported constraint type: " + reference);
        }

    validate(inst);
    return inst;
}

} // namespace cspfolio
