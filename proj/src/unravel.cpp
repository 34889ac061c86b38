#include "topodep/unravel.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "topodep/checker.hpp"

namespace topodep {

// ── BetaSet ─────────────────────────────────────────────────────────────────

void BetaSet::validate() const {
    if (values.empty()) throw std::runtime_error("beta set is empty");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i - 1] < values[i])) throw std::runtime_error("beta values must be strictly ascending");
    if (!values.front().is_zero()) throw std::runtime_error("beta set must contain 0");
    std::size_t positive = values.size() - 1;
    if (positive < 3) throw std::runtime_error("beta set needs at least three positive values");
    if (!(values.back() < Rat(1))) throw std::runtime_error("beta values must stay below 1");
}

BetaSet BetaSet::standard() {
    BetaSet b;
    b.values = {Rat(0), Rat(1, 8), Rat(1, 4), Rat(1, 2)};
    return b;
}

// ── Construction ────────────────────────────────────────────────────────────

namespace {

struct SourceView {
    const PreorderModel* m;
    std::vector<VarSet> subsets;
    // atom truth per (kind, subset pair) fetched from the valuation
    bool atom(FKind k, std::size_t xi, std::size_t yi, int state) const {
        const Bits* v = m->atom_val(k, subsets[xi].key(), subsets[yi].key());
        if (!v) throw std::runtime_error("source lacks a dependence valuation entry");
        return v->test(static_cast<std::size_t>(state));
    }
    bool u_global(std::size_t xi, std::size_t yi) const {
        const Bits* v = m->atom_val(FKind::UnifAtom, subsets[xi].key(), subsets[yi].key());
        if (!v) throw std::runtime_error("source lacks a U valuation");
        return v->count() == m->n();
    }
};

}  // namespace

std::size_t unravel_node_count(const PreorderModel& m, const std::string& root_state, int depth,
                               const BetaSet& betas) {
    betas.validate();
    int root = m.state_index(root_state);
    if (root < 0) throw std::runtime_error("unknown root state '" + root_state + "'");
    auto subsets = all_subsets(m.vocabulary());
    std::size_t n = m.n();
    std::size_t zero_betas = 1;
    std::size_t pos_betas = betas.values.size() - 1;

    // Branching depends only on the last state.
    std::vector<std::vector<std::size_t>> branch(n, std::vector<std::size_t>(n, 0));
    for (const VarSet& X : subsets) {
        const Rel& e = m.eq_of(X.key());
        const Rel& l = m.leq_of(X.key());
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t < n; ++t) {
                if (e.at(s, t)) branch[s][t] += zero_betas;
                if (l.at(s, t)) branch[s][t] += pos_betas;
            }
    }
    std::vector<std::size_t> level(n, 0);
    level[root] = 1;
    std::size_t total = 1;
    for (int d = 0; d < depth; ++d) {
        std::vector<std::size_t> next(n, 0);
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t t = 0; t < n; ++t) next[t] += level[s] * branch[s][t];
        for (std::size_t t = 0; t < n; ++t) total += next[t];
        level = std::move(next);
    }
    return total;
}

UnravelledTree unravel(const PreorderModel& m, const std::string& root_state, int depth,
                       const BetaSet& betas, std::size_t node_budget) {
    if (depth < 1) throw std::runtime_error("depth must be at least 1");
    auto check = validate_preorder_model(m);
    if (!check.ok())
        throw std::runtime_error("source model invalid: " + check.violations.front().description);
    std::size_t count = unravel_node_count(m, root_state, depth, betas);
    if (count > node_budget)
        throw BudgetError("unravelling would produce " + std::to_string(count) +
                          " nodes, above the budget of " + std::to_string(node_budget));

    UnravelledTree t;
    t.source = m;
    t.root_state = m.state_index(root_state);
    t.depth = depth;
    t.betas = betas.values;
    t.subsets = all_subsets(m.vocabulary());

    std::size_t ns = t.subsets.size();
    SourceView sv{&t.source, t.subsets};

    t.nodes.push_back(TreeNode{-1, -1, -1, t.root_state, 0});
    std::size_t level_start = 0;
    for (int d = 0; d < depth; ++d) {
        std::size_t level_end = t.nodes.size();
        for (std::size_t h = level_start; h < level_end; ++h) {
            int s = t.nodes[h].last;
            for (std::size_t xi = 0; xi < ns; ++xi) {
                const Rel& e = m.eq_of(t.subsets[xi].key());
                const Rel& l = m.leq_of(t.subsets[xi].key());
                for (std::size_t bi = 0; bi < t.betas.size(); ++bi) {
                    bool zero = t.betas[bi].is_zero();
                    for (std::size_t s2 = 0; s2 < m.n(); ++s2) {
                        bool ok = zero ? e.at(s, s2) : l.at(s, s2);
                        if (!ok) continue;
                        t.nodes.push_back(TreeNode{static_cast<int>(h), static_cast<int>(xi),
                                                   static_cast<int>(bi), static_cast<int>(s2),
                                                   d + 1});
                    }
                }
            }
        }
        level_start = level_end;
    }

    // Edge qualifications, cumulative from the root:
    //   eq-step:  zero label whose parent satisfies the D atom for the label set
    //   leq-step: eq-step, or parent satisfies the K atom for the label set
    std::size_t nn = t.nodes.size();
    std::vector<std::vector<int>> bad_eq(ns, std::vector<int>(nn, 0));
    std::vector<std::vector<int>> bad_leq(ns, std::vector<int>(nn, 0));
    for (std::size_t h = 1; h < nn; ++h) {
        const TreeNode& nd = t.nodes[h];
        int p = nd.parent;
        int plast = t.nodes[p].last;
        bool zero = t.betas[nd.beta].is_zero();
        for (std::size_t yi = 0; yi < ns; ++yi) {
            bool eq_step = zero && sv.atom(FKind::DepAtom, nd.xset, yi, plast);
            bool leq_step = eq_step || sv.atom(FKind::ContAtom, nd.xset, yi, plast);
            bad_eq[yi][h] = bad_eq[yi][p] + (eq_step ? 0 : 1);
            bad_leq[yi][h] = bad_leq[yi][p] + (leq_step ? 0 : 1);
        }
    }

    // Materialize the relations via the non-redundant path: descend through
    // eq-steps to the meet, then ascend through eq- or leq-steps.
    t.eq_rel.assign(ns, Rel(nn));
    t.leq_rel.assign(ns, Rel(nn));
    for (std::size_t a = 0; a < nn; ++a)
        for (std::size_t b = 0; b < nn; ++b) {
            int mm = t.lca(static_cast<int>(a), static_cast<int>(b));
            for (std::size_t yi = 0; yi < ns; ++yi) {
                if (bad_eq[yi][a] != bad_eq[yi][mm]) continue;
                if (bad_eq[yi][b] == bad_eq[yi][mm]) t.eq_rel[yi].add(a, b);
                if (bad_leq[yi][b] == bad_leq[yi][mm]) t.leq_rel[yi].add(a, b);
            }
        }

    // Densities and roots per subset.
    t.delta.assign(nn, Rat(1));
    for (std::size_t h = 1; h < nn; ++h) {
        const TreeNode& nd = t.nodes[h];
        const Rat& beta = t.betas[nd.beta];
        t.delta[h] = t.delta[nd.parent];
        if (!beta.is_zero()) t.delta[h] = rat_min(t.delta[h], beta);
    }
    t.xroot.assign(ns, std::vector<int>(nn, 0));
    for (std::size_t xi = 0; xi < ns; ++xi)
        for (std::size_t h = 0; h < nn; ++h) {
            // Shallowest ancestor still below the last disqualified step.
            std::vector<int> chain;
            for (int e = static_cast<int>(h); e >= 0; e = t.nodes[e].parent) chain.push_back(e);
            std::reverse(chain.begin(), chain.end());
            int root = static_cast<int>(h);
            for (int e : chain)
                if (bad_leq[xi][h] == bad_leq[xi][e]) { root = e; break; }
            t.xroot[xi][h] = root;
        }

    return t;
}

int UnravelledTree::lca(int a, int b) const {
    while (nodes[a].len > nodes[b].len) a = nodes[a].parent;
    while (nodes[b].len > nodes[a].len) b = nodes[b].parent;
    while (a != b) {
        a = nodes[a].parent;
        b = nodes[b].parent;
    }
    return a;
}

std::vector<int> UnravelledTree::interval(int a, int b) const {
    int mm = lca(a, b);
    std::vector<int> down, up;
    for (int e = a; e != mm; e = nodes[e].parent) down.push_back(e);
    down.push_back(mm);
    for (int e = b; e != mm; e = nodes[e].parent) up.push_back(e);
    std::reverse(up.begin(), up.end());
    down.insert(down.end(), up.begin(), up.end());
    return down;
}

int UnravelledTree::tree_distance(int a, int b) const {
    int mm = lca(a, b);
    return (nodes[a].len - nodes[mm].len) + (nodes[b].len - nodes[mm].len);
}

std::size_t UnravelledTree::subset_index(const VarSet& X) const {
    for (std::size_t i = 0; i < subsets.size(); ++i)
        if (subsets[i] == X) return i;
    throw std::runtime_error("variable set outside the source vocabulary");
}

std::string UnravelledTree::node_path(int id) const {
    std::vector<int> chain;
    for (int e = id; e >= 0; e = nodes[e].parent) chain.push_back(e);
    std::reverse(chain.begin(), chain.end());
    std::string out = "(" + source.states[static_cast<std::size_t>(nodes[chain[0]].last)];
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const TreeNode& nd = nodes[chain[i]];
        out += ",{" + subsets[nd.xset].key() + "}^" + betas[nd.beta].str() + "," +
               source.states[static_cast<std::size_t>(nd.last)];
    }
    return out + ")";
}

// ── Pseudo-metric layer ─────────────────────────────────────────────────────

void pseudo_metrize(UnravelledTree& t) {
    if (t.source.language != Lang::LUD)
        throw std::runtime_error("pseudo-metric layer needs a source with U valuations");
    std::size_t nn = t.n();
    SourceView sv{&t.source, t.subsets};

    t.dvalues = t.betas;
    t.dvalues.push_back(Rat(1));
    auto code_of = [&](const Rat& r) {
        for (std::size_t i = 0; i < t.dvalues.size(); ++i)
            if (t.dvalues[i] == r) return static_cast<std::uint8_t>(i);
        throw std::runtime_error("distance value outside the label set");
    };
    std::uint8_t far_code = static_cast<std::uint8_t>(t.dvalues.size() - 1);

    // Edge closeness per variable, cumulative from the root. The parent's
    // x-root density bounds the admissible positive label.
    std::size_t nv = t.source.vars.size();
    std::vector<std::vector<int>> bad_close(nv, std::vector<int>(nn, 0));
    std::vector<std::uint8_t> beta_code(nn, 0);  // label code of the parent edge
    for (std::size_t v = 0; v < nv; ++v) {
        const std::string& x = t.source.vars[v];
        std::size_t x_singleton = t.subset_index(VarSet::single(x));
        for (std::size_t h = 1; h < nn; ++h) {
            const TreeNode& nd = t.nodes[h];
            int p = nd.parent;
            int plast = t.nodes[p].last;
            const Rat& beta = t.betas[nd.beta];
            beta_code[h] = code_of(beta);
            bool close = sv.u_global(nd.xset, x_singleton);
            if (!close && sv.atom(FKind::ContAtom, nd.xset, x_singleton, plast) &&
                beta < t.delta[t.xroot[x_singleton][p]])
                close = true;
            if (!close && beta.is_zero() && sv.atom(FKind::DepAtom, nd.xset, x_singleton, plast))
                close = true;
            bad_close[v][h] = bad_close[v][p] + (close ? 0 : 1);
        }
        t.dist[x].assign(nn * nn, 0);
    }

    std::vector<std::vector<std::uint8_t>*> mats;
    for (const auto& x : t.source.vars) mats.push_back(&t.dist[x]);
    for (std::size_t a = 0; a < nn; ++a)
        for (std::size_t b = 0; b < nn; ++b) {
            int mm = t.lca(static_cast<int>(a), static_cast<int>(b));
            std::uint8_t mx = 0;  // largest label code on the path
            for (int e = static_cast<int>(a); e != mm; e = t.nodes[e].parent)
                mx = std::max(mx, beta_code[e]);
            for (int e = static_cast<int>(b); e != mm; e = t.nodes[e].parent)
                mx = std::max(mx, beta_code[e]);
            for (std::size_t v = 0; v < nv; ++v) {
                bool close = bad_close[v][a] == bad_close[v][mm] &&
                             bad_close[v][b] == bad_close[v][mm];
                (*mats[v])[a * nn + b] = close ? mx : far_code;
            }
        }
    t.metrized = true;
}

std::uint8_t UnravelledTree::dist_code(const VarSet& X, int a, int b) const {
    if (!metrized) throw std::runtime_error("tree has no pseudo-metric layer");
    std::uint8_t c = 0;
    std::size_t nn = n();
    for (const auto& x : X.names()) {
        const auto& d = dist.at(x);
        c = std::max(c, d[static_cast<std::size_t>(a) * nn + static_cast<std::size_t>(b)]);
    }
    return c;
}

Rat UnravelledTree::dist_value(const VarSet& X, int a, int b) const {
    return dvalues[dist_code(X, a, b)];
}

HistoryMetrics history_metrics(const UnravelledTree& t, int a, int b) {
    if (a < 0 || b < 0 || a >= static_cast<int>(t.n()) || b >= static_cast<int>(t.n()))
        throw std::runtime_error("node not in tree");
    HistoryMetrics hm;
    for (std::size_t xi = 0; xi < t.subsets.size(); ++xi)
        hm.xroot[t.subsets[xi].key()] = t.xroot[xi][static_cast<std::size_t>(a)];
    hm.density_first = t.delta[static_cast<std::size_t>(a)];
    hm.density_second = t.delta[static_cast<std::size_t>(b)];
    hm.interval = t.interval(a, b);
    hm.tree_distance = t.tree_distance(a, b);
    if (t.metrized) {
        std::uint8_t far_code = static_cast<std::uint8_t>(t.dvalues.size() - 1);
        for (const VarSet& X : t.subsets)
            hm.close[X.key()] = t.dist_code(X, a, b) < far_code;
    }
    return hm;
}

// ── Verification battery ────────────────────────────────────────────────────

namespace {

struct Battery {
    const UnravelledTree& t;
    VerificationReport rep;

    void fail(const std::string& claim, const std::string& item, const std::string& witness) {
        if (rep.violations.size() < 100) rep.violations.push_back({claim, item, witness});
    }
    void tick() { ++rep.checks_run; }

    std::string wit(int a) const { return t.node_path(a); }
    std::string wit(int a, int b) const { return t.node_path(a) + " / " + t.node_path(b); }
    std::string wit(int a, int b, int c) const {
        return t.node_path(a) + " / " + t.node_path(b) + " / " + t.node_path(c);
    }
};

// Equivalence check in O(n^2): rows must be reflexive and constant on the
// blocks they describe.
bool is_equivalence_rows(const Rel& r, std::string* why, std::size_t* w1, std::size_t* w2) {
    std::size_t n = r.size();
    for (std::size_t a = 0; a < n; ++a) {
        if (!r.at(a, a)) {
            *why = "not reflexive";
            *w1 = *w2 = a;
            return false;
        }
    }
    std::vector<std::size_t> rep(n);
    for (std::size_t a = 0; a < n; ++a) rep[a] = r.row[a].next(0);
    for (std::size_t a = 0; a < n; ++a) {
        if (r.row[a] != r.row[rep[a]]) {
            *why = "rows differ inside a block";
            *w1 = a;
            *w2 = rep[a];
            return false;
        }
        bool bad = false;
        std::size_t bw = 0;
        r.row[a].for_each([&](std::size_t b) {
            if (rep[b] != rep[a] && !bad) { bad = true; bw = b; }
        });
        if (bad) {
            *why = "not symmetric/transitive";
            *w1 = a;
            *w2 = bw;
            return false;
        }
    }
    return true;
}

// Preorder transitivity with per-distinct-row memoization.
bool is_preorder_rows(const Rel& r, std::size_t* w1, std::size_t* w2) {
    std::size_t n = r.size();
    for (std::size_t a = 0; a < n; ++a)
        if (!r.at(a, a)) { *w1 = *w2 = a; return false; }
    // Deduplicate rows.
    std::map<Bits, int> row_id;
    std::vector<int> id_of(n);
    std::vector<const Bits*> rows;
    for (std::size_t a = 0; a < n; ++a) {
        auto [it, fresh] = row_id.try_emplace(r.row[a], static_cast<int>(rows.size()));
        if (fresh) rows.push_back(&it->first);
        id_of[a] = it->second;
    }
    std::set<std::pair<int, int>> checked;
    for (std::size_t a = 0; a < n; ++a) {
        bool bad = false;
        std::size_t bw = 0;
        r.row[a].for_each([&](std::size_t b) {
            if (bad) return;
            if (!checked.insert({id_of[a], id_of[b]}).second) return;
            if (!r.row[b].subset_of(r.row[a])) { bad = true; bw = b; }
        });
        if (bad) { *w1 = a; *w2 = bw; return false; }
    }
    return true;
}

}  // namespace

VerificationReport verify_representation(const UnravelledTree& t) {
    Battery B{t, {}};
    std::size_t nn = t.n();
    std::size_t ns = t.subsets.size();
    const PreorderModel& src = t.source;

    // ── Tree axioms ─────────────────────────────────────────────────────────
    {
        int roots = 0;
        for (std::size_t h = 0; h < nn; ++h) {
            const TreeNode& nd = t.nodes[h];
            if (nd.parent < 0) ++roots;
            else if (nd.parent >= static_cast<int>(h))
                B.fail("tree", "parent order", B.wit(static_cast<int>(h)));
            B.tick();
        }
        if (roots != 1) B.fail("tree", "unique root", std::to_string(roots) + " roots");
        // Meet distributivity over a deterministic sample of triples.
        std::size_t step = std::max<std::size_t>(1, nn / 17);
        for (std::size_t a = 0; a < nn; a += step)
            for (std::size_t b = a; b < nn; b += step)
                for (std::size_t c = b; c < nn; c += step) {
                    int m1 = t.lca(static_cast<int>(a), t.lca(static_cast<int>(b), static_cast<int>(c)));
                    int mab = t.lca(static_cast<int>(a), static_cast<int>(b));
                    int mac = t.lca(static_cast<int>(a), static_cast<int>(c));
                    int m2 = t.nodes[mab].len <= t.nodes[mac].len ? mab : mac;
                    B.tick();
                    if (m1 != m2)
                        B.fail("tree", "meet of a triple is the lower pairwise meet",
                               B.wit(static_cast<int>(a), static_cast<int>(b), static_cast<int>(c)));
                }
    }

    // ── Relation laws on histories ──────────────────────────────────────────
    for (std::size_t xi = 0; xi < ns; ++xi) {
        const Rel& e = t.eq_rel[xi];
        const Rel& l = t.leq_rel[xi];
        const std::string xk = "{" + t.subsets[xi].key() + "}";
        std::string why;
        std::size_t w1 = 0, w2 = 0;
        B.tick();
        if (!is_equivalence_rows(e, &why, &w1, &w2))
            B.fail("histories", "eq" + xk + " equivalence: " + why,
                   B.wit(static_cast<int>(w1), static_cast<int>(w2)));
        B.tick();
        if (!is_preorder_rows(l, &w1, &w2))
            B.fail("histories", "leq" + xk + " preorder",
                   B.wit(static_cast<int>(w1), static_cast<int>(w2)));
        // eq below leq; their meet equals eq.
        Rel lc = l.converse();
        for (std::size_t a = 0; a < nn; ++a) {
            B.tick();
            if (!e.row[a].subset_of(l.row[a]))
                B.fail("histories", "eq" + xk + " below leq" + xk, B.wit(static_cast<int>(a)));
            Bits meet = l.row[a] & lc.row[a];
            if (meet != e.row[a])
                B.fail("histories", "leq" + xk + " meet converse equals eq" + xk,
                       B.wit(static_cast<int>(a)));
        }
    }
    // Additivity of the relations.
    for (std::size_t xi = 0; xi < ns; ++xi)
        for (std::size_t yi = 0; yi < ns; ++yi) {
            std::size_t ui = t.subset_index(t.subsets[xi].unite(t.subsets[yi]));
            for (std::size_t a = 0; a < nn; ++a) {
                B.tick();
                if ((t.eq_rel[xi].row[a] & t.eq_rel[yi].row[a]) != t.eq_rel[ui].row[a])
                    B.fail("histories", "eq additivity", B.wit(static_cast<int>(a)));
                if ((t.leq_rel[xi].row[a] & t.leq_rel[yi].row[a]) != t.leq_rel[ui].row[a])
                    B.fail("histories", "leq additivity", B.wit(static_cast<int>(a)));
            }
        }
    // Projection is monotone (forth), and atoms propagate along the relations.
    for (std::size_t xi = 0; xi < ns; ++xi) {
        const std::string& xkey = t.subsets[xi].key();
        const Rel& se = src.eq_of(xkey);
        const Rel& sl = src.leq_of(xkey);
        for (std::size_t a = 0; a < nn; ++a) {
            int la = t.nodes[a].last;
            t.eq_rel[xi].row[a].for_each([&](std::size_t b) {
                B.tick();
                if (!se.at(la, t.nodes[b].last))
                    B.fail("histories", "eq forth", B.wit(static_cast<int>(a), static_cast<int>(b)));
            });
            t.leq_rel[xi].row[a].for_each([&](std::size_t b) {
                B.tick();
                if (!sl.at(la, t.nodes[b].last))
                    B.fail("histories", "leq forth", B.wit(static_cast<int>(a), static_cast<int>(b)));
            });
        }
        for (std::size_t yi = 0; yi < ns; ++yi) {
            const Bits* datom = src.atom_val(FKind::DepAtom, xkey, t.subsets[yi].key());
            const Bits* katom = src.atom_val(FKind::ContAtom, xkey, t.subsets[yi].key());
            for (std::size_t a = 0; a < nn; ++a) {
                if (datom->test(t.nodes[a].last)) {
                    B.tick();
                    if (!t.eq_rel[xi].row[a].subset_of(t.eq_rel[yi].row[a]))
                        B.fail("histories", "D atom transports eq", B.wit(static_cast<int>(a)));
                    bool bad = false;
                    std::size_t bw = 0;
                    t.eq_rel[xi].row[a].for_each([&](std::size_t b) {
                        if (!bad && !datom->test(t.nodes[b].last)) { bad = true; bw = b; }
                    });
                    if (bad)
                        B.fail("histories", "D atom persists along eq",
                               B.wit(static_cast<int>(a), static_cast<int>(bw)));
                }
                if (katom->test(t.nodes[a].last)) {
                    B.tick();
                    if (!t.leq_rel[xi].row[a].subset_of(t.leq_rel[yi].row[a]))
                        B.fail("histories", "K atom transports leq", B.wit(static_cast<int>(a)));
                    bool bad = false;
                    std::size_t bw = 0;
                    t.leq_rel[xi].row[a].for_each([&](std::size_t b) {
                        if (!bad && !katom->test(t.nodes[b].last)) { bad = true; bw = b; }
                    });
                    if (bad)
                        B.fail("histories", "K atom persists along leq",
                               B.wit(static_cast<int>(a), static_cast<int>(bw)));
                }
            }
        }
        // Interval closure: relations restrict to subpaths.
        for (std::size_t a = 0; a < nn; ++a)
            for (std::size_t b = a + 1; b < nn; ++b) {
                bool eq = t.eq_rel[xi].at(a, b);
                bool le = t.leq_rel[xi].at(a, b);
                if (!eq && !le) continue;
                B.tick();
                for (int e2 : t.interval(static_cast<int>(a), static_cast<int>(b))) {
                    std::size_t ee = static_cast<std::size_t>(e2);
                    if (eq && !(t.eq_rel[xi].at(a, ee) && t.eq_rel[xi].at(ee, b)))
                        B.fail("histories", "eq interval closure",
                               B.wit(static_cast<int>(a), e2, static_cast<int>(b)));
                    if (le && !(t.leq_rel[xi].at(a, ee) && t.leq_rel[xi].at(ee, b)))
                        B.fail("histories", "leq interval closure",
                               B.wit(static_cast<int>(a), e2, static_cast<int>(b)));
                }
            }
    }

    // ── Standard-model view over the basic preorders ────────────────────────
    {
        StandardModel view;
        view.vars = src.vars;
        view.preds = src.preds;
        for (std::size_t h = 0; h < nn; ++h) view.states.push_back("h" + std::to_string(h));
        for (const auto& x : src.vars)
            view.basic_leq[x] = t.leq_rel[t.subset_index(VarSet::single(x))];
        for (const auto& [key, bits] : src.predval) {
            Bits v(nn);
            for (std::size_t h = 0; h < nn; ++h)
                if (bits.test(t.nodes[h].last)) v.set(h);
            view.predval[key] = v;
        }
        B.tick();
        auto vrep = validate_standard_model(view);
        for (const auto& viol : vrep.violations)
            B.fail("standard view", viol.description,
                   viol.witness.empty() ? "" : viol.witness.front());
    }

    // ── Density laws ────────────────────────────────────────────────────────
    for (std::size_t h = 0; h < nn; ++h) {
        B.tick();
        if (!(Rat(0) < t.delta[h]) || Rat(1) < t.delta[h])
            B.fail("density", "density in (0,1]", B.wit(static_cast<int>(h)));
        if (t.nodes[h].parent >= 0 && t.delta[t.nodes[h].parent] < t.delta[h])
            B.fail("density", "antitone along the order", B.wit(static_cast<int>(h)));
        for (std::size_t xi = 0; xi < ns; ++xi) {
            if (t.delta[t.xroot[xi][h]] < t.delta[h])
                B.fail("density", "node density below its root density", B.wit(static_cast<int>(h)));
            for (std::size_t yi = xi; yi < ns; ++yi) {
                std::size_t ui = t.subset_index(t.subsets[xi].unite(t.subsets[yi]));
                Rat lhs = t.delta[t.xroot[ui][h]];
                Rat rhs = rat_min(t.delta[t.xroot[xi][h]], t.delta[t.xroot[yi][h]]);
                if (lhs != rhs)
                    B.fail("density", "union root density is the minimum", B.wit(static_cast<int>(h)));
            }
        }
    }
    for (std::size_t xi = 0; xi < ns; ++xi)
        for (std::size_t a = 0; a < nn; ++a)
            t.leq_rel[xi].row[a].for_each([&](std::size_t b) {
                B.tick();
                if (t.delta[t.xroot[xi][a]] != t.delta[t.xroot[xi][b]])
                    B.fail("density", "root density constant along leq",
                           B.wit(static_cast<int>(a), static_cast<int>(b)));
            });

    if (!t.metrized) return B.rep;

    // ── Ultra-pseudo-metric laws ────────────────────────────────────────────
    std::uint8_t far_code = static_cast<std::uint8_t>(t.dvalues.size() - 1);
    std::vector<std::vector<std::uint8_t>> dmat(ns);
    for (std::size_t xi = 0; xi < ns; ++xi) {
        dmat[xi].assign(nn * nn, 0);
        for (std::size_t a = 0; a < nn; ++a)
            for (std::size_t b = 0; b < nn; ++b)
                dmat[xi][a * nn + b] = t.dist_code(t.subsets[xi], static_cast<int>(a),
                                                   static_cast<int>(b));
    }
    {
        std::size_t empty_xi = t.subset_index(VarSet());
        for (std::size_t a = 0; a < nn && B.rep.violations.size() < 100; ++a)
            for (std::size_t b = 0; b < nn; ++b) {
                B.tick();
                if (dmat[empty_xi][a * nn + b] != 0) {
                    B.fail("metric", "empty-set distance is zero",
                           B.wit(static_cast<int>(a), static_cast<int>(b)));
                    break;
                }
            }
    }
    for (std::size_t xi = 0; xi < ns; ++xi) {
        const auto& d = dmat[xi];
        const std::string xk = "{" + t.subsets[xi].key() + "}";
        bool empty_set = t.subsets[xi].empty();
        // Zero distance coincides with the equality relation; symmetry;
        // self-distance. The empty set is excluded from the equality match:
        // its distance is identically zero by the joint-distance convention,
        // while the path relation only follows zero-label steps.
        for (std::size_t a = 0; a < nn; ++a) {
            B.tick();
            if (d[a * nn + a] != 0) B.fail("metric", "self-distance " + xk, B.wit(static_cast<int>(a)));
            for (std::size_t b = 0; b < nn; ++b) {
                if (d[a * nn + b] != d[b * nn + a]) {
                    B.fail("metric", "symmetry " + xk, B.wit(static_cast<int>(a), static_cast<int>(b)));
                    break;
                }
                if (!empty_set && (d[a * nn + b] == 0) != t.eq_rel[xi].at(a, b)) {
                    B.fail("metric", "zero distance equals eq " + xk,
                           B.wit(static_cast<int>(a), static_cast<int>(b)));
                    break;
                }
            }
        }
        // Strong triangle: each strict-threshold relation must be transitive.
        for (std::uint8_t eps = 1; eps <= far_code; ++eps) {
            Rel r(nn);
            for (std::size_t a = 0; a < nn; ++a)
                for (std::size_t b = 0; b < nn; ++b)
                    if (d[a * nn + b] < eps) r.add(a, b);
            std::size_t w1 = 0, w2 = 0;
            B.tick();
            if (!is_preorder_rows(r, &w1, &w2)) {
                // locate a concrete bad triple for the report
                bool done = false;
                for (std::size_t a = 0; a < nn && !done; ++a)
                    for (std::size_t b = 0; b < nn && !done; ++b) {
                        if (d[a * nn + b] >= eps) continue;
                        for (std::size_t c = 0; c < nn; ++c)
                            if (d[b * nn + c] < eps && d[a * nn + c] >= eps) {
                                B.fail("metric", "strong triangle " + xk,
                                       B.wit(static_cast<int>(a), static_cast<int>(b),
                                             static_cast<int>(c)));
                                done = true;
                                break;
                            }
                    }
            }
        }
        // Ball of the node's density sits inside its upset (nonempty sets;
        // the empty-set ball is the whole tree by the distance convention).
        if (!empty_set)
            for (std::size_t a = 0; a < nn; ++a) {
                std::uint8_t dcode = 0;
                while (dcode < t.dvalues.size() && t.dvalues[dcode] < t.delta[a]) ++dcode;
                // d(a,b) < delta  iff  code(d) < dcode
                B.tick();
                for (std::size_t b = 0; b < nn; ++b)
                    if (d[a * nn + b] < dcode && !t.leq_rel[xi].at(a, b)) {
                        B.fail("metric", "density ball inside the upset " + xk,
                               B.wit(static_cast<int>(a), static_cast<int>(b)));
                        break;
                    }
            }
    }
    // Close distances agree across nonempty variable sets.
    for (std::size_t xi = 0; xi < ns; ++xi)
        for (std::size_t yi = xi + 1; yi < ns; ++yi) {
            if (t.subsets[xi].empty() || t.subsets[yi].empty()) continue;
            const auto& dx = dmat[xi];
            const auto& dy = dmat[yi];
            for (std::size_t a = 0; a < nn; ++a) {
                B.tick();
                for (std::size_t b = 0; b < nn; ++b)
                    if (dx[a * nn + b] < far_code && dy[a * nn + b] < far_code &&
                        dx[a * nn + b] != dy[a * nn + b]) {
                        B.fail("metric", "close distances collapse",
                               B.wit(static_cast<int>(a), static_cast<int>(b)));
                        break;
                    }
            }
        }

    // ── Projection morphism at interior nodes ───────────────────────────────
    {
        // Surjectivity.
        Bits seen(src.n());
        for (std::size_t h = 0; h < nn; ++h) seen.set(t.nodes[h].last);
        B.tick();
        if (seen.count() != src.n()) B.fail("projection", "surjectivity", "");

        // Atom agreement at interior nodes, via the induced relation clauses.
        for (std::size_t xi = 0; xi < ns; ++xi)
            for (std::size_t yi = 0; yi < ns; ++yi) {
                const Bits* datom = src.atom_val(FKind::DepAtom, t.subsets[xi].key(),
                                                 t.subsets[yi].key());
                const Bits* katom = src.atom_val(FKind::ContAtom, t.subsets[xi].key(),
                                                 t.subsets[yi].key());
                Bits kgood(nn);
                for (std::size_t a = 0; a < nn; ++a)
                    if (t.leq_rel[xi].row[a].subset_of(t.leq_rel[yi].row[a])) kgood.set(a);
                for (std::size_t a = 0; a < nn; ++a) {
                    if (t.nodes[a].len >= t.depth) continue;
                    bool tree_d = t.eq_rel[xi].row[a].subset_of(t.eq_rel[yi].row[a]);
                    B.tick();
                    if (tree_d != datom->test(t.nodes[a].last))
                        B.fail("projection", "D atom agreement", B.wit(static_cast<int>(a)));
                    bool tree_k = t.leq_rel[xi].row[a].subset_of(kgood);
                    if (tree_k != katom->test(t.nodes[a].last))
                        B.fail("projection", "K atom agreement", B.wit(static_cast<int>(a)));
                }
            }

        // Back clauses at interior nodes, witnessed by one-step extensions.
        std::vector<std::vector<int>> children(nn);
        for (std::size_t h = 1; h < nn; ++h) children[t.nodes[h].parent].push_back(static_cast<int>(h));
        int beta_pos = 1;  // smallest positive label
        for (std::size_t a = 0; a < nn; ++a) {
            if (t.nodes[a].len >= t.depth) continue;
            int la = t.nodes[a].last;
            for (std::size_t xi = 0; xi < ns; ++xi) {
                const Rel& se = src.eq_of(t.subsets[xi].key());
                const Rel& sl = src.leq_of(t.subsets[xi].key());
                for (std::size_t s = 0; s < src.n(); ++s) {
                    if (se.at(la, s)) {
                        B.tick();
                        bool found = false;
                        for (int c : children[a]) {
                            const TreeNode& nd = t.nodes[c];
                            if (nd.xset == static_cast<int>(xi) && t.betas[nd.beta].is_zero() &&
                                nd.last == static_cast<int>(s) &&
                                t.eq_rel[xi].at(a, static_cast<std::size_t>(c))) {
                                found = true;
                                break;
                            }
                        }
                        if (!found)
                            B.fail("projection", "eq back clause",
                                   B.wit(static_cast<int>(a)) + " -> " + src.states[s]);
                    }
                    if (sl.at(la, s)) {
                        B.tick();
                        bool found = false;
                        for (int c : children[a]) {
                            const TreeNode& nd = t.nodes[c];
                            if (nd.xset == static_cast<int>(xi) && nd.beta == beta_pos &&
                                nd.last == static_cast<int>(s) &&
                                t.leq_rel[xi].at(a, static_cast<std::size_t>(c))) {
                                found = true;
                                break;
                            }
                        }
                        if (!found)
                            B.fail("projection", "leq back clause",
                                   B.wit(static_cast<int>(a)) + " -> " + src.states[s]);
                    }
                }
            }
        }
    }

    // ── Finite uniformity transfer ──────────────────────────────────────────
    // Both checks exclude the empty conditioning set: with it the antecedent
    // distance is identically zero while positive labels keep the consequent
    // distance positive, so only nonempty sets carry the intended content.
    for (std::size_t yi = 0; yi < ns; ++yi) {
        if (t.subsets[yi].empty()) continue;
        for (std::size_t xi = 0; xi < ns; ++xi) {
            const auto& dy = dmat[yi];
            const auto& dx = dmat[xi];
            const Bits* uatom = src.atom_val(FKind::UnifAtom, t.subsets[yi].key(),
                                             t.subsets[xi].key());
            if (uatom->count() == src.n()) {
                for (std::size_t a = 0; a < nn; ++a) {
                    B.tick();
                    for (std::size_t b = 0; b < nn; ++b)
                        if (dx[a * nn + b] > dy[a * nn + b]) {
                            B.fail("uniformity", "U transfer",
                                   B.wit(static_cast<int>(a), static_cast<int>(b)));
                            break;
                        }
                }
            }
            // Uniformity witness below the density ball of a K state: a pair
            // inside the ball with antecedent distance under min(density,
            // epsilon) must keep the consequent distance under epsilon. With
            // label-set distances a violating pair needs dy < dx and a label
            // epsilon strictly between them, so only such pairs are indexed.
            const Bits* katom = src.atom_val(FKind::ContAtom, t.subsets[yi].key(),
                                             t.subsets[xi].key());
            std::map<std::uint8_t, std::vector<Bits>> viol_rows;  // threshold -> rows
            auto rows_for = [&](std::uint8_t v) -> const std::vector<Bits>& {
                auto it = viol_rows.find(v);
                if (it != viol_rows.end()) return it->second;
                std::vector<Bits> rows(nn, Bits(nn));
                for (std::size_t a = 0; a < nn; ++a)
                    for (std::size_t b = 0; b < nn; ++b) {
                        std::uint8_t cy = dy[a * nn + b], cx = dx[a * nn + b];
                        if (cy < v && cy < cx && cy + 1 < far_code) rows[a].set(b);
                    }
                return viol_rows.emplace(v, std::move(rows)).first->second;
            };
            for (std::size_t h = 0; h < nn; ++h) {
                if (!katom->test(t.nodes[h].last)) continue;
                std::uint8_t dcode = 0;
                while (dcode < t.dvalues.size() && t.dvalues[dcode] < t.delta[h]) ++dcode;
                B.tick();
                Bits ball(nn);
                for (std::size_t a = 0; a < nn; ++a)
                    if (dy[h * nn + a] < dcode) ball.set(a);
                const auto& rows = rows_for(dcode);
                bool bad = false;
                ball.for_each([&](std::size_t a) {
                    if (bad) return;
                    Bits hit = rows[a] & ball;
                    if (hit.any()) {
                        B.fail("uniformity", "witness inequality",
                               B.wit(static_cast<int>(h), static_cast<int>(a),
                                     static_cast<int>(hit.next(0))));
                        bad = true;
                    }
                });
                if (bad) break;
            }
        }
    }

    return B.rep;
}

// ── Bounded modal-equivalence probe ─────────────────────────────────────────

int probe_depth(const FormulaStore& st, FormulaId f) {
    const FNode& n = st.node(f);
    switch (n.kind) {
        case FKind::Pred: return 0;
        case FKind::DepAtom: return 1;
        case FKind::ContAtom: return 2;
        case FKind::Not: return probe_depth(st, n.a);
        case FKind::And: return std::max(probe_depth(st, n.a), probe_depth(st, n.b));
        case FKind::DepMod:
        case FKind::KnowMod: return 1 + probe_depth(st, n.a);
        default:
            throw EvalError("probe formulas must stay within the continuity language");
    }
}

namespace {

struct BoundedEval {
    const FormulaStore& st;
    const UnravelledTree& t;
    std::map<std::pair<FormulaId, int>, bool> memo;

    bool eval(int h, FormulaId f) {
        auto key = std::make_pair(f, h);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        const FNode& n = st.node(f);
        std::size_t nn = t.n();
        int cap = t.nodes[h].len + 1;
        bool out = false;
        switch (n.kind) {
            case FKind::Pred: {
                auto v = t.source.predval.find(st.print(f));
                if (v == t.source.predval.end())
                    throw EvalError("atom outside valuation domain: " + st.print(f));
                out = v->second.test(t.nodes[h].last);
                break;
            }
            case FKind::Not: out = !eval(h, n.a); break;
            case FKind::And: out = eval(h, n.a) && eval(h, n.b); break;
            case FKind::DepAtom: {
                std::size_t xi = t.subset_index(n.xs), yi = t.subset_index(n.ys);
                out = true;
                for (std::size_t b = 0; b < nn && out; ++b)
                    if (t.nodes[b].len <= cap && t.eq_rel[xi].at(h, b) && !t.eq_rel[yi].at(h, b))
                        out = false;
                break;
            }
            case FKind::ContAtom: {
                std::size_t xi = t.subset_index(n.xs), yi = t.subset_index(n.ys);
                out = true;
                for (std::size_t a = 0; a < nn && out; ++a) {
                    if (t.nodes[a].len > cap || !t.leq_rel[xi].at(h, a)) continue;
                    int cap2 = t.nodes[a].len + 1;
                    for (std::size_t b = 0; b < nn; ++b)
                        if (t.nodes[b].len <= cap2 && t.leq_rel[xi].at(a, b) &&
                            !t.leq_rel[yi].at(a, b)) {
                            out = false;
                            break;
                        }
                }
                break;
            }
            case FKind::DepMod: {
                std::size_t xi = t.subset_index(n.xs);
                out = true;
                for (std::size_t b = 0; b < nn && out; ++b)
                    if (t.nodes[b].len <= cap && t.eq_rel[xi].at(h, b) && !eval(static_cast<int>(b), n.a))
                        out = false;
                break;
            }
            case FKind::KnowMod: {
                std::size_t xi = t.subset_index(n.xs);
                out = true;
                for (std::size_t b = 0; b < nn && out; ++b)
                    if (t.nodes[b].len <= cap && t.leq_rel[xi].at(h, b) && !eval(static_cast<int>(b), n.a))
                        out = false;
                break;
            }
            default:
                throw EvalError("probe formulas must stay within the continuity language");
        }
        memo.emplace(key, out);
        return out;
    }
};

}  // namespace

ProbeResult modal_equivalence_probe(const FormulaStore& st, const UnravelledTree& t, int node,
                                    FormulaId f) {
    if (node < 0 || node >= static_cast<int>(t.n())) throw EvalError("node not in tree");
    int need = probe_depth(st, f);
    if (t.nodes[node].len + need > t.depth)
        throw EvalError("probe refused: history length " + std::to_string(t.nodes[node].len) +
                        " plus formula depth " + std::to_string(need) + " exceeds the tree depth " +
                        std::to_string(t.depth));
    ProbeResult r;
    BoundedEval be{st, t, {}};
    r.tree_truth = be.eval(node, f);
    // Source evaluation at the projected state.
    FormulaStore& stm = const_cast<FormulaStore&>(st);
    Evaluator ev(stm, t.source);
    r.source_truth = ev.eval(static_cast<std::size_t>(t.nodes[node].last), f);
    r.agree = r.tree_truth == r.source_truth;
    return r;
}

// ── Export ──────────────────────────────────────────────────────────────────

std::string dump_tree_json(const UnravelledTree& t) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["root"] = t.source.states[static_cast<std::size_t>(t.root_state)];
    j["depth"] = t.depth;
    ordered_json betas = ordered_json::array();
    for (const Rat& b : t.betas) betas.push_back(b.str());
    j["betas"] = betas;
    ordered_json nodes = ordered_json::array();
    for (std::size_t h = 0; h < t.n(); ++h) {
        const TreeNode& nd = t.nodes[h];
        ordered_json e;
        e["id"] = h;
        e["parent"] = nd.parent;
        if (nd.parent >= 0) {
            e["X"] = t.subsets[nd.xset].names();
            e["beta"] = t.betas[nd.beta].str();
        }
        e["last"] = t.source.states[static_cast<std::size_t>(nd.last)];
        nodes.push_back(std::move(e));
    }
    j["nodes"] = nodes;
    ordered_json eq = ordered_json::object(), leq = ordered_json::object();
    for (std::size_t xi = 0; xi < t.subsets.size(); ++xi) {
        ordered_json epairs = ordered_json::array(), lpairs = ordered_json::array();
        for (std::size_t a = 0; a < t.n(); ++a) {
            t.eq_rel[xi].row[a].for_each([&](std::size_t b) {
                if (a != b) epairs.push_back(ordered_json::array({a, b}));
            });
            t.leq_rel[xi].row[a].for_each([&](std::size_t b) {
                if (a != b) lpairs.push_back(ordered_json::array({a, b}));
            });
        }
        eq[t.subsets[xi].key()] = std::move(epairs);
        leq[t.subsets[xi].key()] = std::move(lpairs);
    }
    j["eq"] = eq;
    j["leq"] = leq;
    if (t.metrized) {
        ordered_json dist = ordered_json::object();
        for (const auto& [x, d] : t.dist) {
            ordered_json entries = ordered_json::array();
            for (std::size_t a = 0; a < t.n(); ++a)
                for (std::size_t b = a + 1; b < t.n(); ++b)
                    if (d[a * t.n() + b] != 0)
                        entries.push_back(
                            ordered_json::array({a, b, t.dvalues[d[a * t.n() + b]].str()}));
            dist[x] = std::move(entries);
        }
        j["dist"] = dist;
    }
    return j.dump(2) + "\n";
}

std::string dump_report_json(const VerificationReport& r) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["ok"] = r.ok();
    j["checks_run"] = r.checks_run;
    ordered_json v = ordered_json::array();
    for (const auto& item : r.violations) {
        ordered_json e;
        e["claim"] = item.claim;
        e["item"] = item.item;
        e["witness"] = item.witness;
        v.push_back(std::move(e));
    }
    j["violations"] = v;
    return j.dump(2) + "\n";
}

}  // namespace topodep
