#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "topodep/formula.hpp"
#include "topodep/model.hpp"

using namespace topodep;

TEST_CASE("varset canonical order and keys") {
    VarSet s({"y", "x", "y"});
    CHECK(s.key() == "x,y");
    CHECK(VarSet().key() == "");
    CHECK(VarSet::single("x").subset_of(s));
    CHECK(s.unite(VarSet::single("z")).key() == "x,y,z");
    CHECK(VarSet().subset_of(VarSet()));
}

TEST_CASE("parsing core constructs") {
    FormulaStore st;
    FormulaId f = parse_formula(st, "~(P(x) & K{x} P(x))");
    const FNode& n = st.node(f);
    CHECK(n.kind == FKind::Not);
    const FNode& a = st.node(n.a);
    CHECK(a.kind == FKind::And);
    CHECK(st.node(a.a).kind == FKind::Pred);
    CHECK(st.node(a.b).kind == FKind::KnowMod);
    CHECK(st.print(f) == "~(P(x) & K{x}P(x))");
}

TEST_CASE("abbreviations expand to core constructors") {
    FormulaStore st;
    // A phi is the empty-set determination modality
    FormulaId f = parse_formula(st, "A P(x)");
    CHECK(st.node(f).kind == FKind::DepMod);
    CHECK(st.node(f).xs.empty());
    // GK pairs the empty-set knowability modality with a continuity atom
    FormulaId g = parse_formula(st, "GK(x;y)");
    CHECK(st.node(g).kind == FKind::KnowMod);
    CHECK(st.node(g).xs.empty());
    CHECK(st.node(st.node(g).a).kind == FKind::ContAtom);
    CHECK(st.node(st.node(g).a).xs.key() == "x");
    CHECK(st.node(st.node(g).a).ys.key() == "y");
    // C{y} is the empty-set dependence atom
    FormulaId c = parse_formula(st, "C{y}");
    CHECK(st.node(c).kind == FKind::DepAtom);
    CHECK(st.node(c).xs.empty());
    CHECK(st.node(c).ys.key() == "y");
    // Know phi
    FormulaId k = parse_formula(st, "Know P(x)");
    CHECK(st.node(k).kind == FKind::KnowMod);
    CHECK(st.node(k).xs.empty());
    // GD
    FormulaId gd = parse_formula(st, "GD(x;y)");
    CHECK(st.node(gd).kind == FKind::DepMod);
    CHECK(st.node(gd).xs.empty());
    CHECK(st.node(st.node(gd).a).kind == FKind::DepAtom);
    // Boolean sugar
    FormulaId imp = parse_formula(st, "(P(x) -> Q(x))");
    CHECK(st.node(imp).kind == FKind::Not);
    FormulaId dis = parse_formula(st, "(P(x) | Q(x))");
    CHECK(st.node(dis).kind == FKind::Not);
}

TEST_CASE("parse errors carry a position") {
    FormulaStore st;
    CHECK_THROWS_AS(parse_formula(st, "D{x"), ParseError);
    CHECK_THROWS_AS(parse_formula(st, "(P(x) & P(x,y))"), ParseError);  // arity mismatch
    CHECK_THROWS_AS(parse_formula(st, "Foo{x}"), ParseError);           // unknown construct
    CHECK_THROWS_AS(parse_formula(st, "P(x) Q(x)"), ParseError);        // trailing input
    std::map<std::string, int> decl{{"P", 2}};
    CHECK_THROWS_AS(parse_formula(st, "P(x)", &decl), ParseError);
}

TEST_CASE("language tags are monotone along the constructors") {
    FormulaStore st;
    CHECK(st.language(parse_formula(st, "D{x}P(x)")) == Lang::LFD);
    CHECK(st.language(parse_formula(st, "K{x}{y}")) == Lang::LCD);
    CHECK(st.language(parse_formula(st, "(D{x}{y} & U(x;y))")) == Lang::LUD);
    CHECK(st.language(parse_formula(st, "k{x}{y}")) == Lang::LUDX);
    CHECK(st.language(parse_formula(st, "Ig{x}{y}")) == Lang::LUDX);
}

TEST_CASE("modal depth counts modalities only") {
    FormulaStore st;
    CHECK(st.modal_depth(parse_formula(st, "D{x}{y}")) == 0);
    CHECK(st.modal_depth(parse_formula(st, "K{x}D{}P(x)")) == 2);
    CHECK(st.modal_depth(parse_formula(st, "(K{x}P(x) & D{x}{y})")) == 1);
}

namespace {

// Deterministic random formulas for round-trip checks.
FormulaId random_formula(FormulaStore& st, Rng& rng, int depth) {
    VarSet pool[3] = {VarSet(), VarSet::single("x"), VarSet({"x", "y"})};
    auto vs = [&]() { return pool[rng.below(3)]; };
    switch (rng.below(depth > 0 ? 9 : 4)) {
        case 0: return st.pred("P", {"x"});
        case 1: return st.pred("Q", {"x", "y"});
        case 2: return st.dep_atom(vs(), vs());
        case 3:
            switch (rng.below(3)) {
                case 0: return st.cont_atom(vs(), vs());
                case 1: return st.unif_atom(vs(), vs());
                default: return st.point_atom(vs(), vs());
            }
        case 4: return st.mk_not(random_formula(st, rng, depth - 1));
        case 5:
            return st.mk_and(random_formula(st, rng, depth - 1),
                             random_formula(st, rng, depth - 1));
        case 6: return st.dep_mod(vs(), random_formula(st, rng, depth - 1));
        case 7: return st.know_mod(vs(), random_formula(st, rng, depth - 1));
        default:
            switch (rng.below(2)) {
                case 0: return st.indep_atom(vs(), vs());
                default: return st.topo_indep_atom(vs(), vs());
            }
    }
}

}  // namespace

TEST_CASE("print/parse round trip on generated formulas") {
    FormulaStore st;
    Rng rng(7);
    for (int i = 0; i < 500; ++i) {
        FormulaId f = random_formula(st, rng, 3);
        CHECK(parse_formula(st, st.print(f)) == f);
    }
}

TEST_CASE("single negation is an involution") {
    FormulaStore st;
    FormulaId p = parse_formula(st, "P(x)");
    CHECK(st.single_neg(st.single_neg(p)) == p);
    FormulaId np = st.mk_not(p);
    CHECK(st.single_neg(np) == p);
}

// Independent fixpoint oracle for the closure rules, used to freeze expected
// member sets for small seeds.
namespace {

std::set<FormulaId> closure_oracle(FormulaStore& st, FormulaId seed, Lang lang) {
    VarSet vocab = st.vars(seed);
    auto subsets = all_subsets(vocab);
    std::set<FormulaId> mem{seed};
    bool changed = true;
    while (changed) {
        changed = false;
        std::set<FormulaId> cur = mem;
        auto add = [&](FormulaId f) {
            if (mem.insert(f).second) changed = true;
        };
        for (const VarSet& X : subsets)
            for (const VarSet& Y : subsets) {
                add(st.dep_mod(X, st.dep_atom(X, Y)));
                add(st.know_mod(X, st.cont_atom(X, Y)));
                add(st.dep_mod(X, st.cont_atom(X, Y)));
                if (lang == Lang::LUD) add(st.unif_atom(X, Y));
            }
        for (FormulaId f : cur) {
            const FNode& n = st.node(f);
            if (n.a != kNoFormula) add(n.a);
            if (n.b != kNoFormula) add(n.b);
            add(st.single_neg(f));
            if (n.kind == FKind::Pred)
                for (const VarSet& X : subsets) add(st.dep_mod(X, f));
            if (n.kind == FKind::KnowMod) add(st.dep_mod(n.xs, f));
        }
    }
    return mem;
}

}  // namespace

TEST_CASE("closure agrees with the fixpoint oracle and its invariants") {
    FormulaStore st;
    for (const char* text : {"P(x)", "(P(x) & ~K{x}{y})", "D{}P(x)", "K{x}D{x}{y}"}) {
        FormulaId seed = parse_formula(st, text);
        for (Lang lang : {Lang::LCD, Lang::LUD}) {
            ClosureSet cs = closure(st, seed, lang);
            auto oracle = closure_oracle(st, seed, lang);
            CHECK(cs.members.size() == oracle.size());
            for (FormulaId m : cs.members) CHECK(oracle.count(m) == 1);

            // single negation is an involution on the closure
            for (FormulaId m : cs.members) {
                CHECK(cs.contains(st.single_neg(m)));
                CHECK(st.single_neg(st.single_neg(m)) == m);
            }
            // idempotence: closing any member over the same vocabulary stays inside
            for (std::size_t i = 0; i < cs.members.size(); i += 7) {
                ClosureSet inner = closure(st, cs.members[i], lang, &cs.vocab);
                for (FormulaId m : inner.members) CHECK(cs.contains(m));
            }
        }
    }
}

TEST_CASE("closure contents for a one-variable seed") {
    FormulaStore st;
    FormulaId seed = parse_formula(st, "P(x)");
    ClosureSet cs = closure(st, seed, Lang::LCD);
    VarSet x = VarSet::single("x");
    CHECK(cs.contains(seed));
    CHECK(cs.contains(st.mk_not(seed)));
    CHECK(cs.contains(st.dep_mod(VarSet(), seed)));
    CHECK(cs.contains(st.dep_mod(x, seed)));
    for (const VarSet& X : all_subsets(x))
        for (const VarSet& Y : all_subsets(x)) {
            CHECK(cs.contains(st.dep_mod(X, st.dep_atom(X, Y))));
            CHECK(cs.contains(st.know_mod(X, st.cont_atom(X, Y))));
            CHECK(cs.contains(st.dep_mod(X, st.cont_atom(X, Y))));
            CHECK(!cs.contains(st.unif_atom(X, Y)));  // no U members in this mode
        }
}

TEST_CASE("closure over the uniform language holds all U atoms") {
    FormulaStore st;
    FormulaId seed = parse_formula(st, "K{x}{y}");
    ClosureSet cs = closure(st, seed, Lang::LUD);
    auto subsets = all_subsets(VarSet({"x", "y"}));
    int count = 0;
    for (const VarSet& X : subsets)
        for (const VarSet& Y : subsets) {
            CHECK(cs.contains(st.unif_atom(X, Y)));
            ++count;
        }
    CHECK(count == 16);
}

TEST_CASE("closure of a variable-free seed") {
    FormulaStore st;
    FormulaId seed = parse_formula(st, "P()");
    ClosureSet cs = closure(st, seed, Lang::LCD);
    CHECK(cs.vocab.empty());
    for (FormulaId m : cs.members) {
        const FNode& n = st.node(m);
        CHECK(n.xs.empty());
        CHECK(n.ys.empty());
    }
    CHECK(cs.contains(st.dep_atom(VarSet(), VarSet())));
}
