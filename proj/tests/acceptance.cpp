// Acceptance suite: one line per criterion, nonzero exit on any failure.
//
//  1  axiom soundness sweep over random models
//  2  expansion outputs pass the model validator
//  3  checker equivalences (pointwise, global, metric collapse)
//  4  decision procedure: negated axioms, oracle agreement, certificates
//  5  representation battery on unravelled trees
//  6  bounded modal-equivalence probes
//  7  round-trip and report determinism

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "topodep/checker.hpp"
#include "topodep/model.hpp"
#include "topodep/model_io.hpp"
#include "topodep/proofs.hpp"
#include "topodep/sat.hpp"
#include "topodep/unravel.hpp"

using namespace topodep;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (detail.size() < 600) {
            if (!detail.empty()) detail += "; ";
            detail += why;
        }
    }
};

struct Corpus {
    std::vector<StandardModel> standard;
    std::vector<PseudoMetricModel> metric;
};

Corpus make_corpus(std::size_t count) {
    Corpus c;
    Rng rng(0x5eed0001);
    for (std::size_t i = 0; i < count; ++i) {
        RandomModelParams p;
        p.state_count = 2 + rng.below(4);  // 2..5 states
        p.vars = rng.below(2) ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "y"};
        p.preds = {{"P", 1}, {"Q", 1}};
        p.seed = rng.next();
        p.edge_density = 40 + static_cast<int>(rng.below(120));
        c.standard.push_back(random_standard_model(p));
        c.metric.push_back(random_pseudometric_model(p));
    }
    return c;
}

// ── Criterion 1 ─────────────────────────────────────────────────────────────

Outcome criterion1(const Corpus& corpus) {
    Outcome out;
    FormulaStore st;
    std::vector<FormulaId> pool = {
        parse_formula(st, "P(x)"),
        parse_formula(st, "Q(x)"),
        parse_formula(st, "~P(x)"),
        parse_formula(st, "(P(x) & Q(x))"),
        parse_formula(st, "(P(x) | ~Q(x))"),
        parse_formula(st, "D{x}P(x)"),
        parse_formula(st, "K{x}Q(x)"),
        parse_formula(st, "D{}P(x)"),
        parse_formula(st, "K{}{x}"),
        parse_formula(st, "~K{x}D{x}P(x)"),
    };
    std::size_t instances = 0;
    for (std::size_t mi = 0; mi < corpus.standard.size(); ++mi) {
        PreorderModel lcd = expand_standard(corpus.standard[mi]);
        PreorderModel lud = expand_pseudometric(corpus.metric[mi]);
        Evaluator ev_lcd(st, lcd);
        Evaluator ev_lud(st, lud);
        auto subsets = all_subsets(lcd.vocabulary());
        std::size_t rot = mi;
        for (Scheme s : all_schemes()) {
            bool needs_u = scheme_language(s) == Lang::LUD;
            for (const VarSet& X : subsets)
                for (const VarSet& Y : subsets) {
                    SchemeInstanceArgs a;
                    a.X = X;
                    a.Y = Y;
                    a.Z = subsets[(rot / 7) % subsets.size()];
                    a.phi = pool[rot % pool.size()];
                    a.psi = pool[(rot + 3) % pool.size()];
                    a.pred = "P";
                    a.args = {lcd.vars.front()};
                    ++rot;
                    FormulaId inst = instantiate_scheme(st, s, a);
                    ++instances;
                    Evaluator& ev = needs_u ? ev_lud : ev_lcd;
                    if (!ev.valid_in_model(inst)) {
                        out.fail(std::string(scheme_name(s)) + " fails on model " +
                                 std::to_string(mi) + ": " + st.print(inst));
                        if (!out.pass) return out;
                    }
                }
        }
    }
    out.detail = std::to_string(instances) + " instances over " +
                 std::to_string(corpus.standard.size()) + "+" +
                 std::to_string(corpus.metric.size()) + " models";
    return out;
}

// ── Criterion 2 ─────────────────────────────────────────────────────────────

Outcome criterion2(const Corpus& corpus) {
    Outcome out;
    std::size_t checked = 0;
    for (const auto& sm : corpus.standard) {
        auto rep = validate_preorder_model(expand_standard(sm));
        ++checked;
        if (!rep.ok()) out.fail("standard expansion #" + std::to_string(checked) + ": " +
                                rep.violations.front().description);
    }
    for (const auto& pm : corpus.metric) {
        auto rep = validate_preorder_model(expand_pseudometric(pm));
        ++checked;
        if (!rep.ok()) out.fail("metric expansion #" + std::to_string(checked) + ": " +
                                rep.violations.front().description);
    }
    if (out.pass) out.detail = std::to_string(checked) + " expansions validator-clean";
    return out;
}

// ── Criterion 3 ─────────────────────────────────────────────────────────────

Outcome criterion3(const Corpus& corpus) {
    Outcome out;
    FormulaStore st;
    std::size_t pointwise = 0, ig_mismatch = 0;
    std::string ig_witness;
    for (const auto& sm : corpus.standard) {
        PreorderModel m = expand_standard(sm);
        Evaluator ev(st, m);
        auto subsets = all_subsets(sm.vocabulary());
        for (const VarSet& X : subsets)
            for (const VarSet& Y : subsets) {
                FormulaId kxy = st.cont_atom(X, Y);
                Rel lx = sm.derived_leq(X);
                for (std::size_t s = 0; s < sm.n(); ++s) {
                    ++pointwise;
                    bool katom = ev.eval(s, kxy);
                    bool k_of_point = true;
                    lx.row[s].for_each([&](std::size_t t) {
                        if (!eval_extended_atom(sm, t, FKind::PointAtom, X, Y))
                            k_of_point = false;
                    });
                    if (katom != k_of_point)
                        out.fail("continuity atom differs from knowable point-continuity");
                    if (katom && !ev.eval(s, st.know_mod(X, kxy)))
                        out.fail("continuity atom not knowable where it holds");
                }
                bool ixy = eval_extended_global(sm, FKind::IndepAtom, X, Y);
                bool iyx = eval_extended_global(sm, FKind::IndepAtom, Y, X);
                if (ixy != iyx) out.fail("exact independence asymmetric at X=" + X.key());
                bool gxy = eval_extended_global(sm, FKind::TopoIndepAtom, X, Y);
                bool gyx = eval_extended_global(sm, FKind::TopoIndepAtom, Y, X);
                if (gxy != gyx && ++ig_mismatch == 1)
                    ig_witness = "X={" + X.key() + "} Y={" + Y.key() + "}";
            }
    }
    for (const auto& pm : corpus.metric) {
        PreorderModel m = expand_pseudometric(pm);
        auto subsets = all_subsets(pm.vocabulary());
        for (const VarSet& X : subsets)
            for (const VarSet& Y : subsets) {
                std::string pk = X.key() + "|" + Y.key();
                const Bits& d = m.dep.at("D").at(pk);
                const Bits& k = m.dep.at("K").at(pk);
                const Bits& u = m.dep.at("U").at(pk);
                if (!(k == d)) out.fail("metric collapse K=D fails at " + pk);
                if ((u.count() == m.n()) != (d.count() == m.n()))
                    out.fail("metric collapse U=W iff D=W fails at " + pk);
            }
    }
    if (ig_mismatch > 0)
        out.fail("topological independence symmetry fails on " + std::to_string(ig_mismatch) +
                 " set pairs (first witness " + ig_witness +
                 "); the one-way-order counterexample is recorded in the checker tests");
    if (out.pass) out.detail = std::to_string(pointwise) + " pointwise checks";
    return out;
}

// ── Criterion 4 ─────────────────────────────────────────────────────────────

Outcome criterion4() {
    Outcome out;
    FormulaStore st;
    // (a) negated axiom instances over one variable are unsatisfiable
    std::vector<FormulaId> pool = {parse_formula(st, "P(x)"), parse_formula(st, "D{x}P(x)"),
                                   parse_formula(st, "K{x}P(x)")};
    auto subsets = all_subsets(VarSet::single("x"));
    std::size_t axioms = 0;
    long worst_ms = 0;
    for (Scheme s : all_schemes()) {
        for (const VarSet& X : subsets)
            for (const VarSet& Y : subsets)
                for (std::size_t pi = 0; pi < pool.size(); ++pi) {
                    SchemeInstanceArgs a;
                    a.X = X;
                    a.Y = Y;
                    a.Z = subsets[(pi + axioms) % subsets.size()];
                    a.phi = pool[pi];
                    a.psi = pool[(pi + 1) % pool.size()];
                    a.pred = "P";
                    a.args = {"x"};
                    FormulaId inst = instantiate_scheme(st, s, a);
                    auto t0 = std::chrono::steady_clock::now();
                    ValidityResult r = decide_valid(
                        st, inst, scheme_language(s) == Lang::LUD ? Lang::LUD : Lang::LCD);
                    long ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
                    worst_ms = std::max(worst_ms, ms);
                    ++axioms;
                    if (!r.valid)
                        out.fail(std::string("negated ") + scheme_name(s) + " instance satisfiable: " +
                                 st.print(inst));
                    if (ms > 60000) out.fail(std::string(scheme_name(s)) + " call exceeded 60s");
                }
    }
    // (b)+(c) oracle agreement on a generated corpus
    Rng rng(0xacce97);
    VarSet sets[2] = {VarSet(), VarSet::single("x")};
    std::function<FormulaId(int)> gen = [&](int d) -> FormulaId {
        switch (rng.below(d > 0 ? 7 : 3)) {
            case 0: return st.pred("P", {"x"});
            case 1: return st.dep_atom(sets[rng.below(2)], sets[rng.below(2)]);
            case 2: return st.cont_atom(sets[rng.below(2)], sets[rng.below(2)]);
            case 3: return st.mk_not(gen(d - 1));
            case 4: return st.mk_and(gen(d - 1), gen(d - 1));
            case 5: return st.dep_mod(sets[rng.below(2)], gen(d - 1));
            default: return st.know_mod(sets[rng.below(2)], gen(d - 1));
        }
    };
    std::size_t compared = 0, sat_count = 0;
    for (int i = 0; i < 100; ++i) {
        FormulaId f = gen(2);
        SatResult dec = decide_sat(st, f, Lang::LCD);
        OracleResult ora = brute_force_oracle(st, f, 3, Lang::LCD);
        ++compared;
        if (ora.found && !dec.sat)
            out.fail("oracle found a model but the procedure answered unsat: " + st.print(f));
        if (dec.sat) {
            ++sat_count;
            // (c) certificates replayed through validator and checker
            if (!validate_preorder_model(*dec.certificate).ok())
                out.fail("certificate fails validation: " + st.print(f));
            Evaluator ev(st, *dec.certificate);
            if (!ev.eval(dec.satisfied_at, f))
                out.fail("certificate does not satisfy the formula: " + st.print(f));
        }
    }
    if (out.pass)
        out.detail = std::to_string(axioms) + " negated axioms unsat (worst " +
                     std::to_string(worst_ms) + "ms); " + std::to_string(compared) +
                     " formulas vs oracle (" + std::to_string(sat_count) + " sat)";
    return out;
}

// ── Criteria 5 and 6 share the tree corpus ──────────────────────────────────

struct TreeCorpus {
    std::vector<UnravelledTree> trees;
    std::string description;
};

TreeCorpus make_trees() {
    TreeCorpus tc;
    Rng rng(0x7ee5);
    std::size_t node_cap = 9000;
    auto add = [&](std::size_t states, std::vector<std::string> vars, int want) {
        int made = 0;
        while (made < want) {
            RandomModelParams p;
            p.state_count = states;
            p.vars = vars;
            p.preds = {{"P", 1}};
            p.seed = rng.next();
            PreorderModel m = expand_pseudometric(random_pseudometric_model(p));
            if (unravel_node_count(m, "s0", 3, BetaSet::standard()) > node_cap) continue;
            UnravelledTree t = unravel(m, "s0", 3, BetaSet::standard(), node_cap);
            pseudo_metrize(t);
            tc.trees.push_back(std::move(t));
            ++made;
        }
    };
    add(2, {"x"}, 12);
    add(3, {"x"}, 4);
    add(1, {"x", "y"}, 2);
    add(2, {"x", "y"}, 2);
    std::size_t total = 0;
    for (const auto& t : tc.trees) total += t.n();
    tc.description = std::to_string(tc.trees.size()) + " trees, " + std::to_string(total) +
                     " nodes total";
    return tc;
}

Outcome criterion5(const TreeCorpus& tc) {
    Outcome out;
    std::size_t checks = 0;
    for (std::size_t i = 0; i < tc.trees.size(); ++i) {
        VerificationReport rep = verify_representation(tc.trees[i]);
        checks += rep.checks_run;
        if (!rep.ok())
            out.fail("tree " + std::to_string(i) + ": " + rep.violations.front().claim + "/" +
                     rep.violations.front().item + " @ " + rep.violations.front().witness);
    }
    if (out.pass)
        out.detail = tc.description + ", " + std::to_string(checks) + " checks, no violations";
    return out;
}

Outcome criterion6(const TreeCorpus& tc) {
    Outcome out;
    FormulaStore st;
    Rng rng(0x9706e);
    std::size_t done = 0, target = 200;
    std::size_t disagreements = 0;
    while (done < target) {
        const UnravelledTree& t = tc.trees[done % tc.trees.size()];
        std::vector<VarSet> sets = t.subsets;
        std::function<FormulaId(int)> gen = [&](int d) -> FormulaId {
            switch (rng.below(d > 0 ? 7 : 2)) {
                case 0: return st.pred("P", {t.source.vars.front()});
                case 1: return st.dep_atom(sets[rng.below(sets.size())],
                                           sets[rng.below(sets.size())]);
                case 2: return st.mk_not(gen(d - 1));
                case 3: return st.mk_and(gen(d - 1), gen(d - 1));
                case 4: return st.dep_mod(sets[rng.below(sets.size())], gen(d - 1));
                case 5: return st.know_mod(sets[rng.below(sets.size())], gen(d - 1));
                default: return st.cont_atom(sets[rng.below(sets.size())],
                                             sets[rng.below(sets.size())]);
            }
        };
        FormulaId f = gen(2);
        int node = static_cast<int>(rng.below(t.n()));
        if (t.nodes[node].len + st.modal_depth(f) > t.depth) continue;      // stated contract
        if (t.nodes[node].len + probe_depth(st, f) > t.depth) continue;     // sound refinement
        ProbeResult r = modal_equivalence_probe(st, t, node, f);
        ++done;
        if (!r.agree) {
            ++disagreements;
            if (disagreements == 1)
                out.fail("disagreement at node " + t.node_path(node) + " on " + st.print(f));
        }
    }
    if (disagreements > 1) out.fail(std::to_string(disagreements) + " of 200 disagreed");
    if (out.pass) out.detail = "200 probes agree";
    return out;
}

// ── Criterion 7 ─────────────────────────────────────────────────────────────

Outcome criterion7() {
    Outcome out;
    FormulaStore st;
    Rng rng(0x707a11);
    VarSet pool[3] = {VarSet(), VarSet::single("x"), VarSet({"x", "y"})};
    std::function<FormulaId(int)> gen = [&](int d) -> FormulaId {
        auto vs = [&]() { return pool[rng.below(3)]; };
        switch (rng.below(d > 0 ? 10 : 5)) {
            case 0: return st.pred("P", {"x"});
            case 1: return st.pred("R", {"x", "y"});
            case 2: return st.dep_atom(vs(), vs());
            case 3: return st.cont_atom(vs(), vs());
            case 4:
                switch (rng.below(4)) {
                    case 0: return st.unif_atom(vs(), vs());
                    case 1: return st.point_atom(vs(), vs());
                    case 2: return st.indep_atom(vs(), vs());
                    default: return st.topo_indep_atom(vs(), vs());
                }
            case 5: return st.mk_not(gen(d - 1));
            case 6: return st.mk_and(gen(d - 1), gen(d - 1));
            case 7: return st.dep_mod(vs(), gen(d - 1));
            case 8: return st.know_mod(vs(), gen(d - 1));
            default: return st.mk_or(gen(d - 1), gen(d - 1));
        }
    };
    for (int i = 0; i < 1000; ++i) {
        FormulaId f = gen(3);
        FormulaId back = parse_formula(st, st.print(f));
        if (back != f) {
            out.fail("round trip differs: " + st.print(f));
            break;
        }
    }

    // deterministic reports: identical seeds give byte-identical serializations
    RandomModelParams p;
    p.state_count = 4;
    p.vars = {"x", "y"};
    p.seed = 4242;
    std::string m1 = dump_model_json(expand_standard(random_standard_model(p)));
    std::string m2 = dump_model_json(expand_standard(random_standard_model(p)));
    if (m1 != m2) out.fail("expansion serialization not deterministic");
    PreorderModel lud = expand_pseudometric(random_pseudometric_model(p));
    std::string d1 = dump_model_json(lud);
    if (dump_any_model_json(load_model_json(d1)) != d1)
        out.fail("model serialization does not round trip");
    UnravelledTree t = unravel(expand_pseudometric(random_pseudometric_model(p)), "s0", 1,
                               BetaSet::standard());
    pseudo_metrize(t);
    if (dump_tree_json(t) != dump_tree_json(t)) out.fail("tree serialization not deterministic");
    if (out.pass) out.detail = "1000 round trips; serializations byte-identical";
    return out;
}

}  // namespace

int main() {
    int failures = 0;
    auto run = [&](int num, const char* name, const std::function<Outcome()>& fn) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o = fn();
        long ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        std::printf("CRITERION %d %-28s %s (%ld ms)%s%s\n", num, name,
                    o.pass ? "PASS" : "FAIL", ms, o.detail.empty() ? "" : " -- ",
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    };

    Corpus corpus = make_corpus(500);
    run(1, "axiom soundness sweep", [&] { return criterion1(corpus); });
    run(2, "expansion coherence", [&] { return criterion2(corpus); });
    run(3, "checker equivalences", [&] { return criterion3(corpus); });
    run(4, "decision procedure", [] { return criterion4(); });
    TreeCorpus tc = make_trees();
    run(5, "representation battery", [&] { return criterion5(tc); });
    run(6, "modal equivalence probes", [&] { return criterion6(tc); });
    run(7, "round-trip determinism", [] { return criterion7(); });

    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all criteria passed\n");
    return failures;
}
