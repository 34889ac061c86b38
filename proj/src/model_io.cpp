#include "topodep/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace topodep {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

namespace {

struct Common {
    std::vector<std::string> vars;
    std::map<std::string, int> preds;
    std::vector<std::string> states;
};

Common read_common(const ordered_json& j) {
    Common c;
    for (const auto& v : j.at("variables")) c.vars.push_back(v.get<std::string>());
    std::sort(c.vars.begin(), c.vars.end());
    if (std::adjacent_find(c.vars.begin(), c.vars.end()) != c.vars.end())
        throw std::runtime_error("duplicate variable name");
    if (j.contains("predicates"))
        for (auto it = j.at("predicates").begin(); it != j.at("predicates").end(); ++it)
            c.preds[it.key()] = it.value().get<int>();
    for (const auto& s : j.at("states")) c.states.push_back(s.get<std::string>());
    std::set<std::string> seen(c.states.begin(), c.states.end());
    if (seen.size() != c.states.size()) throw std::runtime_error("duplicate state name");
    if (c.states.empty()) throw std::runtime_error("empty state set");
    return c;
}

std::size_t state_idx(const Common& c, const std::string& name) {
    for (std::size_t i = 0; i < c.states.size(); ++i)
        if (c.states[i] == name) return i;
    throw std::runtime_error("unknown state '" + name + "'");
}

Rel read_rel_pairs(const Common& c, const ordered_json& pairs, bool reflexive_implied,
                   bool symmetric_implied) {
    Rel r(c.states.size());
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& pr : pairs) {
        if (!pr.is_array() || pr.size() != 2) throw std::runtime_error("relation entry must be a pair");
        std::size_t a = state_idx(c, pr[0].get<std::string>());
        std::size_t b = state_idx(c, pr[1].get<std::string>());
        if (!seen.insert({a, b}).second)
            throw std::runtime_error("duplicate relation pair [" + c.states[a] + "," + c.states[b] + "]");
        r.add(a, b);
        if (symmetric_implied) r.add(b, a);
    }
    if (reflexive_implied) r.close_reflexive();
    return r;
}

Bits read_state_set(const Common& c, const ordered_json& arr) {
    Bits b(c.states.size());
    for (const auto& s : arr) {
        std::size_t i = state_idx(c, s.get<std::string>());
        if (b.test(i)) throw std::runtime_error("duplicate state in set: " + c.states[i]);
        b.set(i);
    }
    return b;
}

std::map<std::string, Bits> read_valuation(const Common& c, const ordered_json& j) {
    std::map<std::string, Bits> val;
    if (!j.contains("valuation")) return val;
    for (auto it = j.at("valuation").begin(); it != j.at("valuation").end(); ++it)
        val[it.key()] = read_state_set(c, it.value());
    return val;
}

ordered_json rel_pairs(const std::vector<std::string>& states, const Rel& r, bool skip_reflexive,
                       bool skip_symmetric_dups) {
    ordered_json out = ordered_json::array();
    for (std::size_t i = 0; i < r.size(); ++i)
        r.row[i].for_each([&](std::size_t j) {
            if (skip_reflexive && i == j) return;
            if (skip_symmetric_dups && j < i && r.at(j, i)) return;
            out.push_back(ordered_json::array({states[i], states[j]}));
        });
    return out;
}

ordered_json state_list(const std::vector<std::string>& states, const Bits& b) {
    ordered_json out = ordered_json::array();
    b.for_each([&](std::size_t i) { out.push_back(states[i]); });
    return out;
}

ordered_json common_header(const char* kind, const char* language,
                           const std::vector<std::string>& vars,
                           const std::map<std::string, int>& preds,
                           const std::vector<std::string>& states) {
    ordered_json j;
    j["kind"] = kind;
    j["language"] = language;
    j["variables"] = vars;
    ordered_json p = ordered_json::object();
    for (const auto& [k, v] : preds) p[k] = v;
    j["predicates"] = p;
    j["states"] = states;
    return j;
}

}  // namespace

AnyModel load_model_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    std::string kind = j.at("kind").get<std::string>();
    Common c = read_common(j);

    if (kind == "standard-preorder") {
        StandardModel m;
        m.vars = c.vars;
        m.preds = c.preds;
        m.states = c.states;
        for (const auto& v : m.vars) {
            if (!j.at("leq").contains(v))
                throw std::runtime_error("missing leq entry for variable '" + v + "'");
            Rel r = read_rel_pairs(c, j.at("leq").at(v), true, false);
            if (!r.transitive())
                throw std::runtime_error("leq for '" + v + "' is not transitive");
            m.basic_leq[v] = std::move(r);
        }
        m.predval = read_valuation(c, j);
        return m;
    }

    if (kind == "pseudo-metric") {
        PseudoMetricModel m;
        m.vars = c.vars;
        m.preds = c.preds;
        m.states = c.states;
        std::size_t n = c.states.size();
        for (const auto& v : m.vars) {
            if (!j.at("dist").contains(v))
                throw std::runtime_error("missing dist entry for variable '" + v + "'");
            std::vector<Rat> d(n * n, Rat(0));
            std::vector<bool> given(n * n, false);
            for (const auto& e : j.at("dist").at(v)) {
                if (!e.is_array() || e.size() != 3)
                    throw std::runtime_error("dist entry must be [state, state, rational]");
                std::size_t a = state_idx(c, e[0].get<std::string>());
                std::size_t b = state_idx(c, e[1].get<std::string>());
                Rat val = Rat::parse(e[2].get<std::string>());
                if (given[a * n + b])
                    throw std::runtime_error("duplicate distance pair [" + c.states[a] + "," +
                                             c.states[b] + "]");
                given[a * n + b] = given[b * n + a] = true;
                d[a * n + b] = val;
                d[b * n + a] = val;
            }
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = i + 1; k < n; ++k)
                    if (!given[i * n + k])
                        throw std::runtime_error("missing distance for [" + c.states[i] + "," +
                                                 c.states[k] + "] under '" + v + "'");
            for (std::size_t i = 0; i < n; ++i)
                if (!d[i * n + i].is_zero())
                    throw std::runtime_error("nonzero self-distance for state " + c.states[i]);
            m.dist[v] = std::move(d);
        }
        m.predval = read_valuation(c, j);
        return m;
    }

    if (kind == "preorder") {
        PreorderModel m;
        m.vars = c.vars;
        m.preds = c.preds;
        m.states = c.states;
        std::string lang = j.value("language", "lcd");
        m.language = lang_parse(lang);
        if (m.language != Lang::LCD && m.language != Lang::LUD)
            throw std::runtime_error("preorder model language must be lcd or lud");

        auto subsets = all_subsets(VarSet(m.vars));
        for (const VarSet& X : subsets) {
            std::string key = X.key();
            if (j.contains("eq") && j.at("eq").contains(key))
                m.eq[key] = read_rel_pairs(c, j.at("eq").at(key), true, true);
            else if (X.empty())
                m.eq[key] = Rel::total(c.states.size());
            else
                throw std::runtime_error("missing eq entry for key '" + key + "'");
            if (j.contains("leq") && j.at("leq").contains(key))
                m.leq[key] = read_rel_pairs(c, j.at("leq").at(key), true, false);
            else if (X.empty())
                m.leq[key] = Rel::total(c.states.size());
            else
                throw std::runtime_error("missing leq entry for key '" + key + "'");
        }
        std::vector<std::string> kinds = {"D", "K"};
        if (m.language == Lang::LUD) kinds.push_back("U");
        for (const auto& k : kinds) {
            if (!j.contains("dep") || !j.at("dep").contains(k))
                throw std::runtime_error("missing dep table '" + k + "'");
            for (const VarSet& X : subsets)
                for (const VarSet& Y : subsets) {
                    std::string pk = X.key() + "|" + Y.key();
                    if (!j.at("dep").at(k).contains(pk))
                        throw std::runtime_error("missing dep entry '" + k + "' / '" + pk + "'");
                    m.dep[k][pk] = read_state_set(c, j.at("dep").at(k).at(pk));
                }
        }
        m.predval = read_valuation(c, j);
        return m;
    }

    throw std::runtime_error("unknown model kind: " + kind);
}

AnyModel load_model_file(const std::string& path) { return load_model_json(read_file(path)); }

std::string dump_model_json(const StandardModel& m) {
    ordered_json j = common_header("standard-preorder", "lcd", m.vars, m.preds, m.states);
    ordered_json leq = ordered_json::object();
    for (const auto& [v, r] : m.basic_leq) leq[v] = rel_pairs(m.states, r, true, false);
    j["leq"] = leq;
    ordered_json val = ordered_json::object();
    for (const auto& [k, b] : m.predval) val[k] = state_list(m.states, b);
    j["valuation"] = val;
    return j.dump(2) + "\n";
}

std::string dump_model_json(const PseudoMetricModel& m) {
    ordered_json j = common_header("pseudo-metric", "lud", m.vars, m.preds, m.states);
    ordered_json dist = ordered_json::object();
    std::size_t n = m.n();
    for (const auto& [v, d] : m.dist) {
        ordered_json entries = ordered_json::array();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = i + 1; k < n; ++k)
                entries.push_back(ordered_json::array({m.states[i], m.states[k], d[i * n + k].str()}));
        dist[v] = entries;
    }
    j["dist"] = dist;
    ordered_json val = ordered_json::object();
    for (const auto& [k, b] : m.predval) val[k] = state_list(m.states, b);
    j["valuation"] = val;
    return j.dump(2) + "\n";
}

std::string dump_model_json(const PreorderModel& m) {
    ordered_json j = common_header("preorder", lang_name(m.language), m.vars, m.preds, m.states);
    ordered_json eq = ordered_json::object(), leq = ordered_json::object();
    for (const auto& [k, r] : m.eq) eq[k] = rel_pairs(m.states, r, true, true);
    for (const auto& [k, r] : m.leq) leq[k] = rel_pairs(m.states, r, true, false);
    j["eq"] = eq;
    j["leq"] = leq;
    ordered_json dep = ordered_json::object();
    for (const auto& [kind, table] : m.dep) {
        ordered_json t = ordered_json::object();
        for (const auto& [pk, b] : table) t[pk] = state_list(m.states, b);
        dep[kind] = t;
    }
    j["dep"] = dep;
    ordered_json val = ordered_json::object();
    for (const auto& [k, b] : m.predval) val[k] = state_list(m.states, b);
    j["valuation"] = val;
    return j.dump(2) + "\n";
}

std::string dump_any_model_json(const AnyModel& m) {
    return std::visit([](const auto& x) { return dump_model_json(x); }, m);
}

std::string dump_concrete_json(const ConcreteModel& cm) {
    ordered_json j;
    ordered_json spaces = ordered_json::object();
    for (const auto& vs : cm.spaces) {
        ordered_json sp;
        sp["values"] = vs.values;
        ordered_json assign = ordered_json::array();
        for (auto vi : vs.assign) assign.push_back(vs.values[vi]);
        sp["assignment"] = assign;
        std::vector<std::vector<std::string>> open_lists;
        for (const Bits& o : vs.value_opens.opens) {
            std::vector<std::string> members;
            o.for_each([&](std::size_t i) { members.push_back(vs.values[i]); });
            std::sort(members.begin(), members.end());
            open_lists.push_back(std::move(members));
        }
        std::sort(open_lists.begin(), open_lists.end());
        sp["opens"] = open_lists;
        spaces[vs.var] = std::move(sp);
    }
    j["value_spaces"] = spaces;
    ordered_json interp = ordered_json::object();
    for (const auto& [pred, tuples] : cm.interp) {
        ordered_json ts = ordered_json::array();
        for (const auto& tup : tuples) {
            ordered_json one = ordered_json::array();
            for (const auto& [var, vi] : tup) {
                for (const auto& vs : cm.spaces)
                    if (vs.var == var) one.push_back(vs.values[vi]);
            }
            ts.push_back(std::move(one));
        }
        interp[pred] = std::move(ts);
    }
    j["interpretation"] = interp;
    return j.dump(2) + "\n";
}

std::string model_kind(const AnyModel& m) {
    if (std::holds_alternative<StandardModel>(m)) return "standard-preorder";
    if (std::holds_alternative<PseudoMetricModel>(m)) return "pseudo-metric";
    return "preorder";
}

PreorderModel to_preorder(const AnyModel& m) {
    if (const auto* sm = std::get_if<StandardModel>(&m)) return expand_standard(*sm);
    if (const auto* pm = std::get_if<PseudoMetricModel>(&m)) return expand_pseudometric(*pm);
    return std::get<PreorderModel>(m);
}

}  // namespace topodep
