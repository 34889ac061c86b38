#include "topodep/model.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace topodep {

// ── Accessors ───────────────────────────────────────────────────────────────

static int find_state(const std::vector<std::string>& states, const std::string& name) {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i] == name) return static_cast<int>(i);
    return -1;
}

int PreorderModel::state_index(const std::string& name) const { return find_state(states, name); }
int StandardModel::state_index(const std::string& name) const { return find_state(states, name); }
int PseudoMetricModel::state_index(const std::string& name) const { return find_state(states, name); }

const Rel& PreorderModel::eq_of(const std::string& key) const {
    auto it = eq.find(key);
    if (it == eq.end()) throw std::runtime_error("missing eq relation for key '" + key + "'");
    return it->second;
}
const Rel& PreorderModel::leq_of(const std::string& key) const {
    auto it = leq.find(key);
    if (it == leq.end()) throw std::runtime_error("missing leq relation for key '" + key + "'");
    return it->second;
}

const Bits* PreorderModel::atom_val(FKind kind, const std::string& xkey,
                                    const std::string& ykey) const {
    const char* k = kind == FKind::DepAtom ? "D" : kind == FKind::ContAtom ? "K" : "U";
    auto kit = dep.find(k);
    if (kit == dep.end()) return nullptr;
    auto it = kit->second.find(xkey + "|" + ykey);
    return it == kit->second.end() ? nullptr : &it->second;
}

Rel StandardModel::derived_leq(const VarSet& X) const {
    Rel r = Rel::total(n());
    for (const auto& x : X.names()) {
        auto it = basic_leq.find(x);
        if (it == basic_leq.end()) throw std::runtime_error("unknown variable '" + x + "'");
        r = r.intersect(it->second);
    }
    return r;
}

Rel StandardModel::derived_eq(const VarSet& X) const {
    Rel le = derived_leq(X);
    return le.intersect(le.converse());
}

const Rat& PseudoMetricModel::d(const std::string& var, std::size_t i, std::size_t j) const {
    auto it = dist.find(var);
    if (it == dist.end()) throw std::runtime_error("unknown variable '" + var + "'");
    return it->second[i * n() + j];
}

Rat PseudoMetricModel::d_set(const VarSet& X, std::size_t i, std::size_t j) const {
    Rat m(0);
    for (const auto& x : X.names()) m = rat_max(m, d(x, i, j));
    return m;
}

// ── Validation ──────────────────────────────────────────────────────────────

namespace {

struct Reporter {
    const std::vector<std::string>& states;
    ValidationReport rep;

    void add(int cond, const std::string& text, std::initializer_list<std::size_t> wit) {
        if (rep.violations.size() >= 200) return;  // cap noise, report stays decisive
        Violation v;
        v.condition = cond;
        v.description = text;
        for (auto i : wit) v.witness.push_back(states[i]);
        rep.violations.push_back(std::move(v));
    }
};

// Parses "P(x,y)" into symbol and argument list using the formula grammar.
bool parse_pred_key(const std::string& key, std::string& sym, std::vector<std::string>& args) {
    FormulaStore st;
    try {
        FormulaId f = parse_formula(st, key);
        if (st.node(f).kind != FKind::Pred) return false;
        sym = st.node(f).pred;
        args = st.node(f).args;
        return true;
    } catch (const ParseError&) {
        return false;
    }
}

}  // namespace

ValidationReport validate_preorder_model(const PreorderModel& m) {
    Reporter r{m.states, {}};
    std::size_t n = m.n();
    if (n == 0) {
        r.rep.violations.push_back({0, "empty state set", {}});
        return r.rep;
    }
    VarSet vocab = m.vocabulary();
    auto subsets = all_subsets(vocab);

    // Structural: every subset key present, relations are equivalences/preorders.
    for (const VarSet& X : subsets) {
        auto eit = m.eq.find(X.key());
        auto lit = m.leq.find(X.key());
        if (eit == m.eq.end() || lit == m.leq.end()) {
            r.rep.violations.push_back({0, "missing relation for key '" + X.key() + "'", {}});
            return r.rep;
        }
        const Rel& e = eit->second;
        const Rel& l = lit->second;
        if (e.size() != n || l.size() != n) {
            r.rep.violations.push_back({0, "relation size mismatch for '" + X.key() + "'", {}});
            return r.rep;
        }
        if (!e.reflexive() || !e.symmetric() || !e.transitive())
            r.add(0, "eq_{" + X.key() + "} is not an equivalence relation", {});
        if (!l.reflexive() || !l.transitive())
            r.add(0, "leq_{" + X.key() + "} is not a preorder", {});
    }
    if (!r.rep.ok()) return r.rep;

    bool lud = m.language == Lang::LUD;
    std::vector<const char*> kinds = lud ? std::vector<const char*>{"D", "K", "U"}
                                         : std::vector<const char*>{"D", "K"};
    auto val = [&](const char* k, const VarSet& X, const VarSet& Y) -> const Bits& {
        auto kit = m.dep.find(k);
        if (kit == m.dep.end())
            throw std::runtime_error(std::string("missing ") + k + " valuation table");
        auto it = kit->second.find(X.key() + "|" + Y.key());
        if (it == kit->second.end())
            throw std::runtime_error(std::string("missing ") + k + " valuation for '" +
                                     X.key() + "|" + Y.key() + "'");
        return it->second;
    };
    try {
        for (const char* k : kinds)
            for (const VarSet& X : subsets)
                for (const VarSet& Y : subsets) (void)val(k, X, Y);
    } catch (const std::runtime_error& e) {
        r.rep.violations.push_back({0, e.what(), {}});
        return r.rep;
    }

    // (1) predicate atoms invariant under eq_X when all argument variables lie in X
    for (const auto& [key, set] : m.predval) {
        std::string sym;
        std::vector<std::string> args;
        if (!parse_pred_key(key, sym, args)) {
            r.rep.violations.push_back({0, "malformed valuation key '" + key + "'", {}});
            continue;
        }
        auto pit = m.preds.find(sym);
        if (pit == m.preds.end() || pit->second != static_cast<int>(args.size())) {
            r.rep.violations.push_back({0, "valuation key '" + key + "' does not match declared predicates", {}});
            continue;
        }
        VarSet avars{std::vector<std::string>(args.begin(), args.end())};
        for (const VarSet& X : subsets) {
            if (!avars.subset_of(X)) continue;
            const Rel& e = m.eq_of(X.key());
            for (std::size_t s = 0; s < n; ++s)
                e.row[s].for_each([&](std::size_t w) {
                    if (set.test(s) != set.test(w))
                        r.add(1, "atom " + key + " not invariant under eq_{" + X.key() + "}", {s, w});
                });
        }
    }

    // (2) empty-set relations are total
    if (m.eq_of("") != Rel::total(n)) {
        std::size_t s = 0, w = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!m.eq_of("").at(i, j)) { s = i; w = j; }
        r.add(2, "eq over the empty set is not total", {s, w});
    }
    if (m.leq_of("") != Rel::total(n)) {
        std::size_t s = 0, w = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!m.leq_of("").at(i, j)) { s = i; w = j; }
        r.add(2, "leq over the empty set is not total", {s, w});
    }

    for (const VarSet& X : subsets) {
        const Rel& eX = m.eq_of(X.key());
        const Rel& lX = m.leq_of(X.key());
        for (const VarSet& Y : subsets) {
            const Bits& dxy = val("D", X, Y);
            const Bits& kxy = val("K", X, Y);

            // (3) eq_X step inside D_XY forces eq_Y and membership
            const Rel& eY = m.eq_of(Y.key());
            for (std::size_t s = 0; s < n; ++s) {
                if (!dxy.test(s)) continue;
                eX.row[s].for_each([&](std::size_t w) {
                    if (!eY.at(s, w))
                        r.add(3, "D{" + X.key() + "}{" + Y.key() + "} at state but eq_Y step missing", {s, w});
                    if (!dxy.test(w))
                        r.add(3, "D{" + X.key() + "}{" + Y.key() + "} not preserved along eq_X", {s, w});
                });
            }

            // (4) Inclusion
            if (Y.subset_of(X)) {
                for (const char* k : kinds)
                    if (val(k, X, Y).count() != n)
                        r.add(4, std::string(k) + " atom for Y subset of X is not everywhere true (" +
                                     X.key() + "|" + Y.key() + ")", {});
            }

            // (5) leq_X-persistence of K_XY
            for (std::size_t s = 0; s < n; ++s) {
                if (!kxy.test(s)) continue;
                lX.row[s].for_each([&](std::size_t w) {
                    if (!kxy.test(w))
                        r.add(5, "K{" + X.key() + "}{" + Y.key() + "} not persistent along leq_X", {s, w});
                });
            }

            // (6) leq_X step inside K_XY forces leq_Y
            const Rel& lY = m.leq_of(Y.key());
            for (std::size_t s = 0; s < n; ++s) {
                if (!kxy.test(s)) continue;
                lX.row[s].for_each([&](std::size_t w) {
                    if (!lY.at(s, w))
                        r.add(6, "K{" + X.key() + "}{" + Y.key() + "} at state but leq_Y step missing", {s, w});
                });
            }

            // (8) K below D
            if (!kxy.subset_of(dxy)) {
                for (std::size_t s = 0; s < n; ++s)
                    if (kxy.test(s) && !dxy.test(s)) {
                        r.add(8, "K{" + X.key() + "}{" + Y.key() + "} not below the D atom", {s});
                        break;
                    }
            }

            if (lud) {
                const Bits& uxy = val("U", X, Y);
                // (10) U valuations are global
                std::size_t c = uxy.count();
                if (c != 0 && c != n)
                    r.add(10, "U(" + X.key() + ";" + Y.key() + ") is neither empty nor everything", {});
                // (11) U below K
                if (!uxy.subset_of(kxy)) {
                    for (std::size_t s = 0; s < n; ++s)
                        if (uxy.test(s) && !kxy.test(s)) {
                            r.add(11, "U(" + X.key() + ";" + Y.key() + ") not below the K atom", {s});
                            break;
                        }
                }
            }

            // (4) Additivity and Transitivity
            for (const VarSet& Z : subsets) {
                VarSet yz = Y.unite(Z);
                for (const char* k : kinds) {
                    const Bits& xy = val(k, X, Y);
                    const Bits& xz = val(k, X, Z);
                    const Bits& xyz = val(k, X, yz);
                    if (xyz != (xy & xz))
                        r.add(4, std::string(k) + " additivity fails for X=" + X.key() +
                                     ", Y=" + Y.key() + ", Z=" + Z.key(), {});
                    const Bits& yzatom = val(k, Y, Z);
                    if (!(xy & yzatom).subset_of(xz))
                        r.add(4, std::string(k) + " transitivity fails for X=" + X.key() +
                                     ", Y=" + Y.key() + ", Z=" + Z.key(), {});
                }
            }
        }

        // (7) eq_X below leq_X
        for (std::size_t s = 0; s < n; ++s)
            if (!eX.row[s].subset_of(lX.row[s])) {
                std::size_t w = 0;
                eX.row[s].for_each([&](std::size_t j) { if (!lX.at(s, j)) w = j; });
                r.add(7, "eq_{" + X.key() + "} not below leq_{" + X.key() + "}", {s, w});
            }
    }

    // (9) D over the empty set below K over the empty set
    for (const VarSet& Y : subsets) {
        const Bits& d0 = val("D", VarSet(), Y);
        const Bits& k0 = val("K", VarSet(), Y);
        if (!d0.subset_of(k0)) {
            for (std::size_t s = 0; s < n; ++s)
                if (d0.test(s) && !k0.test(s)) {
                    r.add(9, "D{}{" + Y.key() + "} not below K{}{" + Y.key() + "}", {s});
                    break;
                }
        }
    }

    return r.rep;
}

ValidationReport validate_standard_model(const StandardModel& m) {
    Reporter r{m.states, {}};
    std::size_t n = m.n();
    if (n == 0) {
        r.rep.violations.push_back({0, "empty state set", {}});
        return r.rep;
    }
    for (const auto& v : m.vars) {
        auto it = m.basic_leq.find(v);
        if (it == m.basic_leq.end()) {
            r.rep.violations.push_back({0, "missing preorder for variable '" + v + "'", {}});
            return r.rep;
        }
        if (it->second.size() != n) {
            r.rep.violations.push_back({0, "preorder size mismatch for '" + v + "'", {}});
            return r.rep;
        }
        if (!it->second.reflexive() || !it->second.transitive())
            r.add(0, "relation for '" + v + "' is not a preorder", {});
    }
    if (!r.rep.ok()) return r.rep;

    // Condition (0): predicate atoms invariant under derived eq over their variables.
    for (const auto& [key, set] : m.predval) {
        std::string sym;
        std::vector<std::string> args;
        if (!parse_pred_key(key, sym, args)) {
            r.rep.violations.push_back({0, "malformed valuation key '" + key + "'", {}});
            continue;
        }
        Rel e = m.derived_eq(VarSet{std::vector<std::string>(args.begin(), args.end())});
        for (std::size_t s = 0; s < n; ++s)
            e.row[s].for_each([&](std::size_t w) {
                if (set.test(s) != set.test(w))
                    r.add(1, "atom " + key + " not invariant under its variables' equality", {s, w});
            });
    }
    return r.rep;
}

ValidationReport validate_pseudometric_model(const PseudoMetricModel& m) {
    Reporter r{m.states, {}};
    std::size_t n = m.n();
    if (n == 0) {
        r.rep.violations.push_back({0, "empty state set", {}});
        return r.rep;
    }
    for (const auto& v : m.vars) {
        auto it = m.dist.find(v);
        if (it == m.dist.end() || it->second.size() != n * n) {
            r.rep.violations.push_back({0, "missing or malformed distance table for '" + v + "'", {}});
            return r.rep;
        }
        const auto& d = it->second;
        for (std::size_t i = 0; i < n; ++i) {
            if (!d[i * n + i].is_zero())
                r.add(0, "d_" + v + " has nonzero diagonal", {i});
            for (std::size_t j = 0; j < n; ++j) {
                if (d[i * n + j] != d[j * n + i]) r.add(0, "d_" + v + " not symmetric", {i, j});
                if (d[i * n + j] < Rat(0)) r.add(0, "d_" + v + " negative", {i, j});
                for (std::size_t k = 0; k < n; ++k)
                    if (d[i * n + j] > d[i * n + k] + d[k * n + j])
                        r.add(0, "d_" + v + " violates the triangle inequality", {i, j, k});
            }
        }
    }
    if (!r.rep.ok()) return r.rep;

    for (const auto& [key, set] : m.predval) {
        std::string sym;
        std::vector<std::string> args;
        if (!parse_pred_key(key, sym, args)) {
            r.rep.violations.push_back({0, "malformed valuation key '" + key + "'", {}});
            continue;
        }
        VarSet avars{std::vector<std::string>(args.begin(), args.end())};
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t w = 0; w < n; ++w)
                if (m.d_set(avars, s, w).is_zero() && set.test(s) != set.test(w))
                    r.add(1, "atom " + key + " not invariant at distance zero", {s, w});
    }
    return r.rep;
}

// ── Expansions ──────────────────────────────────────────────────────────────

PreorderModel expand_standard(const StandardModel& sm) {
    auto check = validate_standard_model(sm);
    if (!check.ok())
        throw std::runtime_error("standard model invalid: " + check.violations.front().description);

    PreorderModel m;
    m.vars = sm.vars;
    m.preds = sm.preds;
    m.states = sm.states;
    m.language = Lang::LCD;
    m.predval = sm.predval;
    std::size_t n = sm.n();

    auto subsets = all_subsets(sm.vocabulary());
    std::map<std::string, Rel> eqs, leqs;
    for (const VarSet& X : subsets) {
        Rel le = sm.derived_leq(X);
        eqs[X.key()] = le.intersect(le.converse());
        leqs[X.key()] = std::move(le);
    }
    m.eq = eqs;
    m.leq = leqs;

    for (const VarSet& X : subsets) {
        const Rel& eX = eqs[X.key()];
        const Rel& lX = leqs[X.key()];
        for (const VarSet& Y : subsets) {
            const Rel& eY = eqs[Y.key()];
            const Rel& lY = leqs[Y.key()];
            Bits dxy(n), kxy(n);
            for (std::size_t s = 0; s < n; ++s) {
                if (eX.row[s].subset_of(eY.row[s])) dxy.set(s);
                bool k = true;
                lX.row[s].for_each([&](std::size_t t) {
                    if (!k) return;
                    lX.row[t].for_each([&](std::size_t w) {
                        if (!lY.at(t, w)) k = false;
                    });
                });
                if (k) kxy.set(s);
            }
            m.dep["D"][X.key() + "|" + Y.key()] = dxy;
            m.dep["K"][X.key() + "|" + Y.key()] = kxy;
        }
    }
    return m;
}

PreorderModel expand_pseudometric(const PseudoMetricModel& pm) {
    auto check = validate_pseudometric_model(pm);
    if (!check.ok())
        throw std::runtime_error("pseudo-metric model invalid: " + check.violations.front().description);

    PreorderModel m;
    m.vars = pm.vars;
    m.preds = pm.preds;
    m.states = pm.states;
    m.language = Lang::LUD;
    m.predval = pm.predval;
    std::size_t n = pm.n();

    auto subsets = all_subsets(pm.vocabulary());
    for (const VarSet& X : subsets) {
        Rel e(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (pm.d_set(X, i, j).is_zero()) e.add(i, j);
        m.eq[X.key()] = e;
        m.leq[X.key()] = e;  // zero-distance indistinguishability is symmetric
    }

    // On a finite state set the epsilon-delta clauses reduce to zero-distance
    // implications: a positive delta below every positive occurring distance
    // turns "d_X < delta" into "d_X = 0", and positive epsilon only excludes
    // positive d_Y. The acceptance suite cross-checks this reduction against
    // direct quantifier elimination over the occurring distance values.
    for (const VarSet& X : subsets) {
        const Rel& eX = m.eq[X.key()];
        for (const VarSet& Y : subsets) {
            const Rel& eY = m.eq[Y.key()];
            Bits dxy(n);
            for (std::size_t s = 0; s < n; ++s)
                if (eX.row[s].subset_of(eY.row[s])) dxy.set(s);

            // K clause: within the smallest ball around s (its zero-distance
            // class), all pairs must be Y-indistinguishable.
            Bits kxy(n);
            for (std::size_t s = 0; s < n; ++s) {
                bool ok = true;
                eX.row[s].for_each([&](std::size_t t) {
                    if (!ok) return;
                    eX.row[s].for_each([&](std::size_t w) {
                        if (!eY.at(t, w)) ok = false;
                    });
                });
                if (ok) kxy.set(s);
            }

            // U clause: the zero-distance implication must hold between all pairs.
            bool uniform = true;
            for (std::size_t t = 0; t < n && uniform; ++t)
                if (!eX.row[t].subset_of(eY.row[t])) uniform = false;
            Bits uxy(n);
            if (uniform) uxy.set_all();

            m.dep["D"][X.key() + "|" + Y.key()] = dxy;
            m.dep["K"][X.key() + "|" + Y.key()] = kxy;
            m.dep["U"][X.key() + "|" + Y.key()] = uxy;
        }
    }
    return m;
}

ConcreteModel extract_dependence_model(const StandardModel& sm) {
    auto check = validate_standard_model(sm);
    if (!check.ok())
        throw std::runtime_error("standard model invalid: " + check.violations.front().description);

    ConcreteModel cm;
    std::size_t n = sm.n();
    std::map<std::string, std::vector<std::size_t>> var_assign;

    for (const auto& x : sm.vars) {
        ConcreteModel::VariableSpace vs;
        vs.var = x;
        Rel e = sm.derived_eq(VarSet::single(x));
        std::vector<long> cls(n, -1);
        for (std::size_t s = 0; s < n; ++s) {
            if (cls[s] >= 0) continue;
            std::size_t vi = vs.values.size();
            vs.values.push_back("(" + x + ",[" + sm.states[s] + "])");
            e.row[s].for_each([&](std::size_t w) { cls[w] = static_cast<long>(vi); });
        }
        vs.assign.resize(n);
        for (std::size_t s = 0; s < n; ++s) vs.assign[s] = static_cast<std::size_t>(cls[s]);

        // Value opens: images of leq_x-upsets under the assignment map.
        Rel up = sm.derived_leq(VarSet::single(x));
        OpenFamily upsets = alexandroff_opens(up);
        std::set<Bits> vopens;
        for (const Bits& o : upsets.opens) {
            Bits img(vs.values.size());
            o.for_each([&](std::size_t s) { img.set(vs.assign[s]); });
            vopens.insert(img);
        }
        vs.value_opens.n = vs.values.size();
        vs.value_opens.opens.assign(vopens.begin(), vopens.end());
        std::sort(vs.value_opens.opens.begin(), vs.value_opens.opens.end());

        var_assign[x] = vs.assign;
        cm.spaces.push_back(std::move(vs));
    }

    for (const auto& [key, set] : sm.predval) {
        std::string sym;
        std::vector<std::string> args;
        if (!parse_pred_key(key, sym, args)) continue;
        auto& tuples = cm.interp[sym];
        for (std::size_t s = 0; s < n; ++s) {
            if (!set.test(s)) continue;
            std::vector<std::pair<std::string, std::size_t>> tup;
            for (const auto& a : args) tup.emplace_back(a, var_assign.at(a)[s]);
            if (std::find(tuples.begin(), tuples.end(), tup) == tuples.end())
                tuples.push_back(std::move(tup));
        }
    }
    return cm;
}

// ── Generators ──────────────────────────────────────────────────────────────

// All argument tuples of the given arity over the vocabulary.
static std::vector<std::vector<std::string>> all_arg_tuples(const std::vector<std::string>& vars,
                                                            int arity) {
    std::vector<std::vector<std::string>> out{{}};
    if (vars.empty() && arity > 0)
        throw std::runtime_error("predicate of positive arity over an empty vocabulary");
    if (arity > 3) throw std::runtime_error("generator limited to arity 3");
    for (int i = 0; i < arity; ++i) {
        std::vector<std::vector<std::string>> next;
        for (const auto& t : out)
            for (const auto& v : vars) {
                auto u = t;
                u.push_back(v);
                next.push_back(std::move(u));
            }
        out = std::move(next);
    }
    return out;
}

StandardModel random_standard_model(const RandomModelParams& p) {
    if (p.state_count == 0) throw std::runtime_error("state count must be positive");
    StandardModel sm;
    sm.vars = p.vars;
    std::sort(sm.vars.begin(), sm.vars.end());
    sm.preds = p.preds;
    for (std::size_t i = 0; i < p.state_count; ++i) sm.states.push_back("s" + std::to_string(i));
    Rng rng(p.seed);

    std::size_t n = p.state_count;
    for (const auto& v : sm.vars) {
        Rel r = Rel::identity(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && static_cast<int>(rng.below(256)) < p.edge_density) r.add(i, j);
        r.close_transitive();
        sm.basic_leq[v] = std::move(r);
    }

    for (const auto& [sym, ar] : sm.preds) {
        for (const auto& args : all_arg_tuples(sm.vars, ar)) {
            std::string key = sym + "(";
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (i) key += ",";
                key += args[i];
            }
            key += ")";
            Bits val(n);
            for (std::size_t s = 0; s < n; ++s)
                if (rng.below(2)) val.set(s);
            // Repair: saturate truth across the derived equality of the atom's variables.
            Rel e = sm.derived_eq(VarSet{std::vector<std::string>(args.begin(), args.end())});
            Bits sat(n);
            for (std::size_t s = 0; s < n; ++s)
                if (val.test(s)) sat |= e.row[s];
            sm.predval[key] = sat;
        }
    }
    return sm;
}

PseudoMetricModel random_pseudometric_model(const RandomModelParams& p) {
    if (p.state_count == 0) throw std::runtime_error("state count must be positive");
    PseudoMetricModel pm;
    pm.vars = p.vars;
    std::sort(pm.vars.begin(), pm.vars.end());
    pm.preds = p.preds;
    for (std::size_t i = 0; i < p.state_count; ++i) pm.states.push_back("s" + std::to_string(i));
    Rng rng(p.seed ^ 0xabcdef12345ULL);

    std::size_t n = p.state_count;
    const Rat pool[4] = {Rat(1, 4), Rat(1, 2), Rat(3, 4), Rat(1)};
    for (const auto& v : pm.vars) {
        // Random partition into zero-distance classes, then a shortest-path
        // closed positive distance between classes, lifted back to states.
        std::vector<std::size_t> cls(n);
        std::size_t k = 1 + rng.below(n);
        for (std::size_t i = 0; i < n; ++i) cls[i] = rng.below(k);
        std::size_t m = *std::max_element(cls.begin(), cls.end()) + 1;
        std::vector<Rat> cd(m * m, Rat(0));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) {
                Rat w = pool[rng.below(4)];
                cd[i * m + j] = w;
                cd[j * m + i] = w;
            }
        for (std::size_t mid = 0; mid < m; ++mid)
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    Rat via = cd[i * m + mid] + cd[mid * m + j];
                    if (i != j && via < cd[i * m + j]) cd[i * m + j] = via;
                }
        std::vector<Rat> d(n * n, Rat(0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i * n + j] = cd[cls[i] * m + cls[j]];
        pm.dist[v] = std::move(d);
    }

    for (const auto& [sym, ar] : pm.preds) {
        for (const auto& args : all_arg_tuples(pm.vars, ar)) {
            std::string key = sym + "(";
            for (std::size_t i = 0; i < args.size(); ++i) {
                if (i) key += ",";
                key += args[i];
            }
            key += ")";
            Bits val(n);
            for (std::size_t s = 0; s < n; ++s)
                if (rng.below(2)) val.set(s);
            VarSet avars{std::vector<std::string>(args.begin(), args.end())};
            Bits sat(n);
            for (std::size_t s = 0; s < n; ++s) {
                if (!val.test(s)) continue;
                for (std::size_t w = 0; w < n; ++w)
                    if (pm.d_set(avars, s, w).is_zero()) sat.set(w);
            }
            pm.predval[key] = sat;
        }
    }
    return pm;
}

}  // namespace topodep
