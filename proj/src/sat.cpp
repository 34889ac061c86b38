#include "topodep/sat.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <unordered_map>

namespace topodep {

namespace {

// ── Saturation constraints ──────────────────────────────────────────────────
// Local coherence of a type: Boolean structure plus the axiom-derived closure
// conditions needed for the canonical relations to satisfy the model
// conditions. Each rule below mirrors one scheme of the proof systems.

struct Constraints {
    std::vector<std::pair<std::vector<int>, int>> horn;  // body in => head in
    std::vector<std::pair<int, int>> xors;               // Not-member vs child
    std::vector<std::array<int, 3>> andeq;               // And-member vs children
    std::vector<int> forced;
};

struct Compiled {
    std::vector<FormulaId> members;
    std::unordered_map<FormulaId, int> index;
    Constraints cns;
    std::vector<VarSet> subsets;
};

int idx_of(const Compiled& c, FormulaId f) {
    auto it = c.index.find(f);
    return it == c.index.end() ? -1 : it->second;
}

Compiled compile(FormulaStore& st, const ClosureSet& phi) {
    Compiled c;
    c.members = phi.members;
    for (std::size_t i = 0; i < c.members.size(); ++i)
        c.index[c.members[i]] = static_cast<int>(i);
    c.subsets = all_subsets(phi.vocab);
    bool lud = phi.language == Lang::LUD;

    auto horn = [&](std::vector<int> body, int head) {
        if (head < 0) return;
        for (int b : body)
            if (b < 0) return;
        c.cns.horn.emplace_back(std::move(body), head);
    };

    for (std::size_t i = 0; i < c.members.size(); ++i) {
        int ii = static_cast<int>(i);
        const FNode n = st.node(c.members[i]);  // interning below may relocate nodes
        switch (n.kind) {
            case FKind::Not:
                c.cns.xors.emplace_back(ii, idx_of(c, n.a));
                break;
            case FKind::And:
                c.cns.andeq.push_back({ii, idx_of(c, n.a), idx_of(c, n.b)});
                break;
            case FKind::DepMod: {
                horn({ii}, idx_of(c, n.a));                              // factivity
                horn({ii}, idx_of(c, st.dep_mod(n.xs, c.members[i])));   // axiom 4
                if (n.xs.empty())
                    horn({ii}, idx_of(c, st.know_mod(VarSet(), n.a)));   // necessity is known
                break;
            }
            case FKind::KnowMod: {
                horn({ii}, idx_of(c, n.a));                              // veracity
                horn({ii}, idx_of(c, st.know_mod(n.xs, c.members[i])));  // pos. introspection
                horn({ii}, idx_of(c, st.dep_mod(n.xs, c.members[i])));   // knowability determined
                horn({ii}, idx_of(c, st.dep_mod(n.xs, n.a)));            // knowable determination
                break;
            }
            case FKind::Pred: {
                VarSet av{std::vector<std::string>(n.args.begin(), n.args.end())};
                horn({ii}, idx_of(c, st.dep_mod(av, c.members[i])));     // determined atoms
                break;
            }
            case FKind::DepAtom:
            case FKind::ContAtom:
            case FKind::UnifAtom: {
                if (n.ys.subset_of(n.xs)) c.cns.forced.push_back(ii);    // inclusion
                // additivity via singleton decomposition
                if (n.ys.size() >= 2) {
                    std::vector<int> body;
                    for (const auto& y : n.ys.names()) {
                        FormulaId single =
                            n.kind == FKind::DepAtom ? st.dep_atom(n.xs, VarSet::single(y))
                            : n.kind == FKind::ContAtom ? st.cont_atom(n.xs, VarSet::single(y))
                                                        : st.unif_atom(n.xs, VarSet::single(y));
                        int j = idx_of(c, single);
                        horn({ii}, j);
                        body.push_back(j);
                    }
                    horn(std::move(body), ii);
                }
                if (n.kind == FKind::DepAtom) {
                    horn({ii}, idx_of(c, st.dep_mod(n.xs, c.members[i])));   // determined dep.
                    if (n.xs.empty())
                        horn({ii}, idx_of(c, st.cont_atom(VarSet(), n.ys)));  // constants known
                } else if (n.kind == FKind::ContAtom) {
                    horn({ii}, idx_of(c, st.know_mod(n.xs, c.members[i])));  // knowable epi. dep.
                    horn({ii}, idx_of(c, st.dep_atom(n.xs, n.ys)));          // knowable dependence
                    if (n.xs.empty() && lud)
                        for (const VarSet& X : c.subsets)                    // uniformity of knowledge
                            horn({ii}, idx_of(c, st.unif_atom(X, n.ys)));
                } else {
                    horn({ii}, idx_of(c, st.cont_atom(n.xs, n.ys)));         // uniformity -> continuity
                }
                break;
            }
            default:
                throw std::runtime_error("extended atoms cannot appear in a closure set");
        }
    }

    // Transitivity over the atom families.
    for (const VarSet& X : c.subsets)
        for (const VarSet& Y : c.subsets)
            for (const VarSet& Z : c.subsets) {
                horn({idx_of(c, st.dep_atom(X, Y)), idx_of(c, st.dep_atom(Y, Z))},
                     idx_of(c, st.dep_atom(X, Z)));
                horn({idx_of(c, st.cont_atom(X, Y)), idx_of(c, st.cont_atom(Y, Z))},
                     idx_of(c, st.cont_atom(X, Z)));
                if (lud)
                    horn({idx_of(c, st.unif_atom(X, Y)), idx_of(c, st.unif_atom(Y, Z))},
                         idx_of(c, st.unif_atom(X, Z)));
            }

    // Transfer along dependence atoms, within the filtration set.
    for (std::size_t i = 0; i < c.members.size(); ++i) {
        const FNode n = st.node(c.members[i]);
        if (n.kind == FKind::DepMod) {
            for (const VarSet& X : c.subsets)
                horn({idx_of(c, st.dep_atom(X, n.xs)), static_cast<int>(i)},
                     idx_of(c, st.dep_mod(X, n.a)));
        } else if (n.kind == FKind::KnowMod) {
            for (const VarSet& X : c.subsets)
                horn({idx_of(c, st.cont_atom(X, n.xs)), static_cast<int>(i)},
                     idx_of(c, st.know_mod(X, n.a)));
        }
    }
    return c;
}

// Tri-state propagation to fixpoint; returns false on conflict.
bool propagate(const Constraints& cns, std::vector<signed char>& a) {
    bool changed = true;
    bool ok = true;
    auto setv = [&](int i, int v) {
        if (a[i] == -1) {
            a[i] = static_cast<signed char>(v);
            changed = true;
        } else if (a[i] != v) {
            ok = false;
        }
    };
    for (int i : cns.forced) setv(i, 1);
    while (changed && ok) {
        changed = false;
        for (const auto& [n, ch] : cns.xors) {
            if (a[n] != -1) setv(ch, 1 - a[n]);
            if (a[ch] != -1) setv(n, 1 - a[ch]);
            if (!ok) return false;
        }
        for (const auto& [i, x, y] : cns.andeq) {
            if (a[i] == 1) { setv(x, 1); setv(y, 1); }
            if (a[x] == 1 && a[y] == 1) setv(i, 1);
            if (a[x] == 0 || a[y] == 0) setv(i, 0);
            if (a[i] == 0 && a[x] == 1) setv(y, 0);
            if (a[i] == 0 && a[y] == 1) setv(x, 0);
            if (!ok) return false;
        }
        for (const auto& [body, head] : cns.horn) {
            int unknown = -1;
            int nunknown = 0;
            bool anyout = false;
            for (int b : body) {
                if (a[b] == 0) { anyout = true; break; }
                if (a[b] == -1) { unknown = b; ++nunknown; }
            }
            if (anyout) continue;
            if (nunknown == 0) {
                setv(head, 1);
            } else if (nunknown == 1 && a[head] == 0) {
                setv(unknown, 0);
            }
            if (!ok) return false;
        }
    }
    return ok;
}

void enumerate_types(const Compiled& c, std::vector<signed char> a, std::vector<Bits>& out,
                     std::size_t budget) {
    if (!propagate(c.cns, a)) return;
    int branch = -1;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] == -1) { branch = static_cast<int>(i); break; }
    if (branch < 0) {
        Bits t(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] == 1) t.set(i);
        out.push_back(std::move(t));
        if (out.size() > budget) throw BudgetError("type enumeration exceeds the configured budget");
        return;
    }
    for (int v : {0, 1}) {
        std::vector<signed char> b = a;
        b[branch] = static_cast<signed char>(v);
        enumerate_types(c, std::move(b), out, budget);
    }
}

// ── Canonical relations between types ───────────────────────────────────────
// eq_X relates types agreeing on every pair {D_Y psi, D_X Y}; leq_X requires
// one-directional inclusion of the pairs {K_Y psi, K_X Y}.

struct TypeGraph {
    std::vector<VarSet> subsets;
    // per subset: (modal member index, atom member index)
    std::vector<std::vector<std::pair<int, int>>> d_pairs, k_pairs;
    std::vector<int> u_atoms;  // member indices of U atoms (LUD)

    // signature of type t for subset xi
    Bits d_sig(const Bits& t, std::size_t xi) const {
        Bits s(d_pairs[xi].size());
        for (std::size_t p = 0; p < d_pairs[xi].size(); ++p)
            if (t.test(d_pairs[xi][p].first) && t.test(d_pairs[xi][p].second)) s.set(p);
        return s;
    }
    Bits k_sig(const Bits& t, std::size_t xi) const {
        Bits s(k_pairs[xi].size());
        for (std::size_t p = 0; p < k_pairs[xi].size(); ++p)
            if (t.test(k_pairs[xi][p].first) && t.test(k_pairs[xi][p].second)) s.set(p);
        return s;
    }
};

TypeGraph build_graph(FormulaStore& st, const Compiled& c, bool lud) {
    TypeGraph g;
    g.subsets = c.subsets;
    g.d_pairs.resize(c.subsets.size());
    g.k_pairs.resize(c.subsets.size());
    for (std::size_t i = 0; i < c.members.size(); ++i) {
        const FNode n = st.node(c.members[i]);  // interning below may relocate nodes
        if (n.kind == FKind::DepMod) {
            for (std::size_t xi = 0; xi < c.subsets.size(); ++xi) {
                int atom = idx_of(c, st.dep_atom(c.subsets[xi], n.xs));
                if (atom >= 0) g.d_pairs[xi].emplace_back(static_cast<int>(i), atom);
            }
        } else if (n.kind == FKind::KnowMod) {
            for (std::size_t xi = 0; xi < c.subsets.size(); ++xi) {
                int atom = idx_of(c, st.cont_atom(c.subsets[xi], n.xs));
                if (atom >= 0) g.k_pairs[xi].emplace_back(static_cast<int>(i), atom);
            }
        } else if (lud && n.kind == FKind::UnifAtom) {
            g.u_atoms.push_back(static_cast<int>(i));
        }
    }
    return g;
}

std::string bits_key(const Bits& b) {
    std::string s;
    for (std::size_t i = 0; i < b.size(); ++i) s += b.test(i) ? '1' : '0';
    return s;
}

// Diamond obligations of one type: boxes absent from the type.
struct Diamond {
    bool know;      // false: D-modality, true: K-modality
    std::size_t xi;  // subset index of the modality
    int box_idx;     // member index of the box formula
    int body_idx;    // member index of its body
};

}  // namespace

TypeSpace saturate_types(const FormulaStore& st_in, const ClosureSet& phi,
                         const SatLimits& limits) {
    FormulaStore& st = const_cast<FormulaStore&>(st_in);  // interning only
    if (phi.members.size() > limits.closure_budget)
        throw BudgetError("closure set exceeds the configured budget");
    Compiled c = compile(st, phi);
    TypeSpace ts;
    ts.phi = phi;
    ts.members = c.members;
    std::vector<signed char> a(c.members.size(), -1);
    enumerate_types(c, std::move(a), ts.types, limits.type_budget);
    return ts;
}

SatResult decide_sat(FormulaStore& st, FormulaId f, Lang language, const SatLimits& limits) {
    if (st.language(f) == Lang::LUDX)
        throw std::runtime_error("extended atoms have no decision procedure");
    Lang lang = language == Lang::LFD ? Lang::LCD : language;
    if (static_cast<int>(st.language(f)) > static_cast<int>(lang))
        throw std::runtime_error("formula language exceeds the requested logic");

    ClosureSet phi = closure(st, f, lang, nullptr, limits.closure_budget);
    Compiled c = compile(st, phi);
    TypeSpace ts;
    ts.phi = phi;
    ts.members = c.members;
    {
        std::vector<signed char> a(c.members.size(), -1);
        enumerate_types(c, std::move(a), ts.types, limits.type_budget);
    }
    bool lud = lang == Lang::LUD;
    TypeGraph g = build_graph(st, c, lud);

    SatResult res;
    res.closure_size = phi.members.size();
    res.type_count = ts.types.size();

    int f_idx = idx_of(c, f);
    if (f_idx < 0) throw std::runtime_error("seed formula missing from its own closure");

    std::size_t empty_xi = 0;  // all_subsets puts the empty set first
    // Universe key: empty-set profile plus the global U profile.
    auto universe_key = [&](const Bits& t) {
        std::string key = bits_key(g.d_sig(t, empty_xi));
        key += '|';
        for (int u : g.u_atoms) key += t.test(u) ? '1' : '0';
        return key;
    };

    struct Universe {
        std::vector<int> types;       // type-space indices, ascending
        std::vector<bool> alive;
        std::vector<EliminationStep> trace;
        int ordinal = 0;
    };
    std::map<std::string, Universe> cache;
    int next_ordinal = 0;

    auto run_universe = [&](const std::string& key) -> Universe& {
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        Universe u;
        u.ordinal = next_ordinal++;
        for (std::size_t k = 0; k < ts.types.size(); ++k)
            if (universe_key(ts.types[k]) == key) u.types.push_back(static_cast<int>(k));
        u.alive.assign(u.types.size(), true);

        // Precompute signatures and local diamonds.
        std::size_t m = u.types.size();
        std::vector<std::vector<Bits>> dsig(g.subsets.size()), ksig(g.subsets.size());
        for (std::size_t xi = 0; xi < g.subsets.size(); ++xi) {
            dsig[xi].reserve(m);
            ksig[xi].reserve(m);
            for (std::size_t p = 0; p < m; ++p) {
                dsig[xi].push_back(g.d_sig(ts.types[u.types[p]], xi));
                ksig[xi].push_back(g.k_sig(ts.types[u.types[p]], xi));
            }
        }
        std::vector<std::vector<Diamond>> diamonds(m);
        for (std::size_t i = 0; i < c.members.size(); ++i) {
            const FNode& n = st.node(c.members[i]);
            if (n.kind != FKind::DepMod && n.kind != FKind::KnowMod) continue;
            std::size_t xi = 0;
            for (; xi < g.subsets.size(); ++xi)
                if (g.subsets[xi] == n.xs) break;
            int body = idx_of(c, n.a);
            for (std::size_t p = 0; p < m; ++p)
                if (!ts.types[u.types[p]].test(i))
                    diamonds[p].push_back(
                        {n.kind == FKind::KnowMod, xi, static_cast<int>(i), body});
        }

        for (int round = 1;; ++round) {
            std::vector<std::size_t> deaths;
            for (std::size_t p = 0; p < m; ++p) {
                if (!u.alive[p]) continue;
                for (const Diamond& dia : diamonds[p]) {
                    bool witnessed = false;
                    for (std::size_t q = 0; q < m && !witnessed; ++q) {
                        if (!u.alive[q]) continue;
                        if (ts.types[u.types[q]].test(dia.body_idx)) continue;
                        bool related = dia.know ? ksig[dia.xi][p].subset_of(ksig[dia.xi][q])
                                                : dsig[dia.xi][p] == dsig[dia.xi][q];
                        if (related) witnessed = true;
                    }
                    if (!witnessed) {
                        deaths.push_back(p);
                        u.trace.push_back({round,
                                           "u" + std::to_string(u.ordinal) + ".t" + std::to_string(p),
                                           st.print(c.members[dia.box_idx])});
                        break;
                    }
                }
            }
            if (deaths.empty()) break;
            for (std::size_t p : deaths) u.alive[p] = false;
        }
        return cache.emplace(key, std::move(u)).first->second;
    };

    for (std::size_t k = 0; k < ts.types.size(); ++k) {
        if (!ts.types[k].test(f_idx)) continue;
        std::string key = universe_key(ts.types[k]);
        Universe& u = run_universe(key);
        std::size_t pos = 0;
        for (; pos < u.types.size(); ++pos)
            if (u.types[pos] == static_cast<int>(k)) break;
        if (!u.alive[pos]) continue;

        // Build the certificate from the survivors of this universe.
        std::vector<int> survivors;
        for (std::size_t p = 0; p < u.types.size(); ++p)
            if (u.alive[p]) survivors.push_back(u.types[p]);

        PreorderModel cert;
        cert.language = lud ? Lang::LUD : Lang::LCD;
        cert.vars = phi.vocab.names();
        for (std::size_t i = 0; i < c.members.size(); ++i) {
            const FNode& n = st.node(c.members[i]);
            if (n.kind == FKind::Pred) cert.preds[n.pred] = static_cast<int>(n.args.size());
        }
        std::size_t ns = survivors.size();
        for (std::size_t p = 0; p < ns; ++p) cert.states.push_back("t" + std::to_string(p));

        for (std::size_t xi = 0; xi < g.subsets.size(); ++xi) {
            std::vector<Bits> dsig(ns), ksig(ns);
            for (std::size_t p = 0; p < ns; ++p) {
                dsig[p] = g.d_sig(ts.types[survivors[p]], xi);
                ksig[p] = g.k_sig(ts.types[survivors[p]], xi);
            }
            Rel e(ns), l(ns);
            for (std::size_t p = 0; p < ns; ++p)
                for (std::size_t q = 0; q < ns; ++q) {
                    if (dsig[p] == dsig[q]) e.add(p, q);
                    if (ksig[p].subset_of(ksig[q])) l.add(p, q);
                }
            cert.eq[g.subsets[xi].key()] = std::move(e);
            cert.leq[g.subsets[xi].key()] = std::move(l);
        }

        auto atom_bits = [&](FormulaId atom) {
            Bits b(ns);
            int ai = idx_of(c, atom);
            if (ai >= 0)
                for (std::size_t p = 0; p < ns; ++p)
                    if (ts.types[survivors[p]].test(ai)) b.set(p);
            return b;
        };
        for (const VarSet& X : g.subsets)
            for (const VarSet& Y : g.subsets) {
                std::string pk = X.key() + "|" + Y.key();
                cert.dep["D"][pk] = atom_bits(st.dep_atom(X, Y));
                cert.dep["K"][pk] = atom_bits(st.cont_atom(X, Y));
                if (lud) cert.dep["U"][pk] = atom_bits(st.unif_atom(X, Y));
            }
        for (std::size_t i = 0; i < c.members.size(); ++i)
            if (st.node(c.members[i]).kind == FKind::Pred)
                cert.predval[st.print(c.members[i])] = atom_bits(c.members[i]);

        std::string at;
        for (std::size_t p = 0; p < ns; ++p)
            if (survivors[p] == static_cast<int>(k)) at = cert.states[p];

        // A SAT answer is only returned with a verified certificate.
        auto report = validate_preorder_model(cert);
        if (!report.ok())
            throw std::runtime_error("internal soundness failure: certificate rejected (" +
                                     report.violations.front().description + ")");
        Evaluator ev(st, cert);
        if (!ev.eval(at, f))
            throw std::runtime_error("internal soundness failure: certificate does not satisfy the formula");

        res.sat = true;
        res.certificate = std::move(cert);
        res.satisfied_at = at;
        return res;
    }

    for (const auto& [key, u] : cache)
        for (const auto& step : u.trace) res.trace.push_back(step);
    res.sat = false;
    return res;
}

ValidityResult decide_valid(FormulaStore& st, FormulaId f, Lang language, const SatLimits& limits) {
    SatResult neg = decide_sat(st, st.mk_not(f), language, limits);
    ValidityResult r;
    r.closure_size = neg.closure_size;
    r.type_count = neg.type_count;
    if (neg.sat) {
        r.valid = false;
        r.countermodel = std::move(neg.certificate);
        r.falsified_at = neg.satisfied_at;
    } else {
        r.valid = true;
    }
    return r;
}

// ── Brute-force oracle ──────────────────────────────────────────────────────

namespace {

std::vector<Rel> all_equivalences(std::size_t n) {
    // Restricted growth strings enumerate set partitions.
    std::vector<Rel> out;
    std::vector<std::size_t> rgs(n, 0);
    while (true) {
        Rel r(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (rgs[i] == rgs[j]) r.add(i, j);
        out.push_back(std::move(r));
        bool advanced = false;
        for (std::size_t i = n; i-- > 1;) {
            std::size_t maxv = 0;
            for (std::size_t j = 0; j < i; ++j) maxv = std::max(maxv, rgs[j]);
            if (rgs[i] <= maxv) {
                ++rgs[i];
                for (std::size_t j = i + 1; j < n; ++j) rgs[j] = 0;
                advanced = true;
                break;
            }
        }
        if (!advanced) return out;
    }
}

std::vector<Rel> preorders_including(const Rel& eq) {
    std::size_t n = eq.size();
    std::vector<std::pair<std::size_t, std::size_t>> off;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && !eq.at(i, j)) off.emplace_back(i, j);
    std::vector<Rel> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << off.size()); ++mask) {
        Rel r = eq;
        for (std::size_t b = 0; b < off.size(); ++b)
            if (mask & (std::size_t{1} << b)) r.add(off[b].first, off[b].second);
        if (r.transitive()) out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(), [](const Rel& a, const Rel& b) { return a.row < b.row; });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Unions of the classes of an equivalence relation.
std::vector<Bits> class_union_candidates(const Rel& eq, const Bits& eligible) {
    std::size_t n = eq.size();
    std::vector<Bits> classes;
    Bits seen(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (seen.test(i)) continue;
        if (!eligible.test(i)) { seen.set(i); continue; }
        bool all_ok = true;
        eq.row[i].for_each([&](std::size_t j) {
            seen.set(j);
            if (!eligible.test(j)) all_ok = false;
        });
        if (all_ok) classes.push_back(eq.row[i]);
    }
    if (classes.size() > 16) throw BudgetError("too many classes for oracle valuation enumeration");
    std::vector<Bits> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << classes.size()); ++mask) {
        Bits s(n);
        for (std::size_t b = 0; b < classes.size(); ++b)
            if (mask & (std::size_t{1} << b)) s |= classes[b];
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Up-closed subsets of `eligible` with respect to `le`.
std::vector<Bits> upset_candidates(const Rel& le, const Bits& eligible) {
    std::size_t n = le.size();
    if (n > 16) throw BudgetError("too many states for oracle upset enumeration");
    std::vector<Bits> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        Bits s(n);
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i)) s.set(i);
        if (!s.subset_of(eligible)) continue;
        bool up = true;
        for (std::size_t i = 0; i < n && up; ++i)
            if (s.test(i) && !le.row[i].subset_of(s)) up = false;
        if (up) out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

OracleResult brute_force_oracle(FormulaStore& st, FormulaId f, std::size_t max_states,
                                Lang language, std::size_t model_budget) {
    if (st.language(f) == Lang::LUDX)
        throw std::runtime_error("extended atoms are not handled by the oracle");
    Lang lang = language == Lang::LFD ? Lang::LCD : language;
    bool lud = lang == Lang::LUD;
    VarSet vocab = st.vars(f);
    if (vocab.size() > 2) throw BudgetError("oracle vocabulary limited to two variables");
    auto subsets = all_subsets(vocab);
    auto preds = st.predicates(f);
    std::vector<FormulaId> pred_atoms;
    for (FormulaId g : st.subformulas(f))
        if (st.node(g).kind == FKind::Pred) pred_atoms.push_back(g);
    std::sort(pred_atoms.begin(), pred_atoms.end(),
              [&](FormulaId a, FormulaId b) { return st.print(a) < st.print(b); });

    OracleResult res;

    for (std::size_t n = 1; n <= max_states; ++n) {
        // Enumerate relation families for the nonempty subsets.
        std::vector<VarSet> free_sets;
        for (const VarSet& X : subsets)
            if (!X.empty()) free_sets.push_back(X);

        struct RelChoice {
            std::vector<std::pair<Rel, Rel>> options;  // (eq, leq)
        };
        std::vector<RelChoice> rel_choices(free_sets.size());
        auto eqs = all_equivalences(n);
        for (std::size_t i = 0; i < free_sets.size(); ++i)
            for (const Rel& e : eqs)
                for (const Rel& l : preorders_including(e))
                    rel_choices[i].options.emplace_back(e, l);

        std::vector<std::size_t> pick(free_sets.size(), 0);
        bool estimated = false;
        while (true) {
            // Assemble relations.
            PreorderModel m;
            m.language = lud ? Lang::LUD : Lang::LCD;
            m.vars = vocab.names();
            m.preds = preds;
            for (std::size_t i = 0; i < n; ++i) m.states.push_back("w" + std::to_string(i));
            m.eq[""] = Rel::total(n);
            m.leq[""] = Rel::total(n);
            for (std::size_t i = 0; i < free_sets.size(); ++i) {
                m.eq[free_sets[i].key()] = rel_choices[i].options[pick[i]].first;
                m.leq[free_sets[i].key()] = rel_choices[i].options[pick[i]].second;
            }

            // Valuation candidates per component.
            struct ValChoice {
                enum Kind { PredAtom, Dep, Know, Unif } kind;
                FormulaId atom = kNoFormula;
                std::string pk;
                std::vector<Bits> options;
            };
            std::vector<ValChoice> vcs;
            Bits everything(n);
            everything.set_all();

            bool feasible = true;
            try {
                for (FormulaId pa : pred_atoms) {
                    const FNode& nd = st.node(pa);
                    VarSet av{std::vector<std::string>(nd.args.begin(), nd.args.end())};
                    ValChoice vc;
                    vc.kind = ValChoice::PredAtom;
                    vc.atom = pa;
                    vc.options = class_union_candidates(m.eq_of(av.key()), everything);
                    vcs.push_back(std::move(vc));
                }
                for (const VarSet& X : subsets)
                    for (const VarSet& Y : subsets) {
                        std::string pk = X.key() + "|" + Y.key();
                        if (Y.subset_of(X)) {
                            m.dep["D"][pk] = everything;
                            m.dep["K"][pk] = everything;
                            if (lud) m.dep["U"][pk] = everything;
                            continue;
                        }
                        const Rel& eX = m.eq_of(X.key());
                        const Rel& eY = m.eq_of(Y.key());
                        const Rel& lX = m.leq_of(X.key());
                        const Rel& lY = m.leq_of(Y.key());
                        // D: unions of eq_X-classes that stay inside one eq_Y-class.
                        Bits d_eligible(n);
                        for (std::size_t s = 0; s < n; ++s)
                            if (eX.row[s].subset_of(eY.row[s])) d_eligible.set(s);
                        ValChoice dvc;
                        dvc.kind = ValChoice::Dep;
                        dvc.pk = pk;
                        dvc.options = class_union_candidates(eX, d_eligible);
                        vcs.push_back(std::move(dvc));
                        // K: up-closed sets of points whose leq_X-successors are leq_Y.
                        Bits k_eligible(n);
                        for (std::size_t s = 0; s < n; ++s)
                            if (lX.row[s].subset_of(lY.row[s])) k_eligible.set(s);
                        ValChoice kvc;
                        kvc.kind = ValChoice::Know;
                        kvc.pk = pk;
                        kvc.options = upset_candidates(lX, k_eligible);
                        vcs.push_back(std::move(kvc));
                        if (lud) {
                            ValChoice uvc;
                            uvc.kind = ValChoice::Unif;
                            uvc.pk = pk;
                            uvc.options = {Bits(n), everything};
                            vcs.push_back(std::move(uvc));
                        }
                    }
            } catch (const BudgetError&) {
                feasible = false;
            }

            // One upfront estimate so hopeless searches fail immediately.
            if (!estimated && feasible) {
                estimated = true;
                double est = 1;
                for (const auto& rc : rel_choices) est *= static_cast<double>(rc.options.size());
                for (const auto& vc : vcs)
                    est *= static_cast<double>(std::max<std::size_t>(1, vc.options.size()));
                if (est > static_cast<double>(model_budget))
                    throw BudgetError("oracle would enumerate about " +
                                      std::to_string(static_cast<unsigned long long>(est)) +
                                      " models, above the budget");
            }

            if (feasible) {
                std::vector<std::size_t> vp(vcs.size(), 0);
                while (true) {
                    if (++res.models_tried > model_budget)
                        throw BudgetError("oracle model budget exceeded");
                    PreorderModel cand = m;
                    for (std::size_t i = 0; i < vcs.size(); ++i) {
                        const Bits& val = vcs[i].options.empty() ? everything
                                                                 : vcs[i].options[vp[i]];
                        switch (vcs[i].kind) {
                            case ValChoice::PredAtom:
                                cand.predval[st.print(vcs[i].atom)] = val;
                                break;
                            case ValChoice::Dep: cand.dep["D"][vcs[i].pk] = val; break;
                            case ValChoice::Know: cand.dep["K"][vcs[i].pk] = val; break;
                            case ValChoice::Unif: cand.dep["U"][vcs[i].pk] = val; break;
                        }
                    }
                    if (validate_preorder_model(cand).ok()) {
                        Evaluator ev(st, cand);
                        Bits sat = ev.eval_all(f);
                        if (sat.any()) {
                            res.found = true;
                            res.state = cand.states[sat.next(0)];
                            res.model = std::move(cand);
                            return res;
                        }
                    }
                    // advance valuation picks
                    std::size_t i = 0;
                    for (; i < vcs.size(); ++i) {
                        if (vcs[i].options.empty()) continue;
                        if (++vp[i] < vcs[i].options.size()) break;
                        vp[i] = 0;
                    }
                    if (i == vcs.size()) break;
                }
            }

            // advance relation picks
            std::size_t i = 0;
            for (; i < free_sets.size(); ++i) {
                if (++pick[i] < rel_choices[i].options.size()) break;
                pick[i] = 0;
            }
            if (i == free_sets.size()) break;
        }
    }
    return res;
}

}  // namespace topodep
