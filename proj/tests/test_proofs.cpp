#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "topodep/checker.hpp"
#include "topodep/model.hpp"
#include "topodep/proofs.hpp"

using namespace topodep;

namespace {

bool matches(FormulaStore& st, const std::string& text, Scheme s) {
    return matches_scheme(st, parse_formula(st, text), s);
}

std::vector<std::string> matched_names(FormulaStore& st, const std::string& text) {
    std::vector<std::string> out;
    for (const auto& m : match_axiom(st, parse_formula(st, text)))
        out.push_back(scheme_name(m.scheme));
    return out;
}

}  // namespace

TEST_CASE("scheme recognition") {
    FormulaStore st;
    CHECK(matches(st, "(D{x}P(x) -> P(x))", Scheme::Factivity));
    CHECK(matches(st, "(K{x}P(x) -> P(x))", Scheme::Veracity));
    CHECK(matches(st, "(D{x}P(x) -> D{x}D{x}P(x))", Scheme::Axiom4));
    CHECK(matches(st, "(~D{x}P(x) -> D{x}~D{x}P(x))", Scheme::Axiom5));
    CHECK(matches(st, "D{x,y}{x}", Scheme::Inclusion));
    CHECK(!matches(st, "D{x}{x,y}", Scheme::Inclusion));  // side condition
    CHECK(matches(st, "K{x}{x}", Scheme::KInclusion));
    CHECK(!matches(st, "K{x}{x,y}", Scheme::KInclusion));
    CHECK(matches(st, "((D{x}{y} & D{x}{z}) -> D{x}{y,z})", Scheme::Additivity));
    CHECK(matches(st, "((K{x}{y} & K{y}{z}) -> K{x}{z})", Scheme::KTransitivity));
    CHECK(matches(st, "(D{x}{y} -> D{x}D{x}{y})", Scheme::DeterminedDependence));
    CHECK(matches(st, "(K{x}{y} -> K{x}K{x}{y})", Scheme::KnowabilityOfEpistemicDependence));
    CHECK(matches(st, "(D{x}{y} -> (D{y}P(x) -> D{x}P(x)))", Scheme::Transfer));
    CHECK(matches(st, "(K{x}{y} -> (K{y}P(x) -> K{x}P(x)))", Scheme::KnowabilityTransfer));
    CHECK(matches(st, "(P(x) -> D{x}P(x))", Scheme::DeterminedAtoms));
    CHECK(matches(st, "(Q(x,y) -> D{x,y}Q(x,y))", Scheme::DeterminedAtoms));
    CHECK(!matches(st, "(Q(x,y) -> D{x}Q(x,y))", Scheme::DeterminedAtoms));
    CHECK(matches(st, "(K{x}P(x) -> D{x}P(x))", Scheme::KnowableDetermination));
    CHECK(matches(st, "(K{x}{y} -> D{x}{y})", Scheme::KnowableDependence));
    CHECK(matches(st, "(A P(x) -> Know P(x))", Scheme::KnowledgeOfNecessity));
    CHECK(matches(st, "(C{y} -> KofV{y})", Scheme::KnowledgeOfConstants));
    CHECK(matches(st, "(D{x}(P(x) -> Q(x)) -> (D{x}P(x) -> D{x}Q(x)))", Scheme::DDistribution));
    CHECK(matches(st, "(K{x}(P(x) -> Q(x)) -> (K{x}P(x) -> K{x}Q(x)))", Scheme::KDistribution));
    CHECK(matches(st, "U(x,y;x)", Scheme::UInclusion));
    CHECK(matches(st, "((U(x;y) & U(y;z)) -> U(x;z))", Scheme::UTransitivity));
    CHECK(matches(st, "(U(x;y) -> Know U(x;y))", Scheme::UniformDependenceIsKnown));
    CHECK(matches(st, "(U(x;y) -> GK(x;y))", Scheme::UniformityImpliesContinuity));
    CHECK(matches(st, "(KofV{y} -> U(x;y))", Scheme::UniformityOfKnowledge));
    CHECK(matches(st, "(P(x) -> P(x))", Scheme::Tautology));
    CHECK(matches(st, "(P(x) | ~P(x))", Scheme::Tautology));
    CHECK(!matches(st, "P(x)", Scheme::Tautology));
}

TEST_CASE("match_axiom returns every applicable scheme with bindings") {
    FormulaStore st;
    auto names = matched_names(st, "(K{x}P(x) -> P(x))");
    // Veracity, and also a propositional tautology it is not; K-instances only.
    CHECK(std::find(names.begin(), names.end(), "Veracity") != names.end());
    CHECK(std::find(names.begin(), names.end(), "Factivity") == names.end());

    auto m = match_axiom(st, parse_formula(st, "D{x,y}{x}"));
    REQUIRE(!m.empty());
    bool found = false;
    for (const auto& e : m)
        if (e.scheme == Scheme::Inclusion) {
            found = true;
            CHECK(e.bindings.at("X") == "{x,y}");
            CHECK(e.bindings.at("Y") == "{x}");
        }
    CHECK(found);
}

TEST_CASE("instantiate_scheme emits instances the matcher accepts") {
    FormulaStore st;
    SchemeInstanceArgs a;
    a.X = VarSet::single("x");
    a.Y = VarSet({"x", "y"});
    a.Z = VarSet();
    a.phi = parse_formula(st, "P(x)");
    a.psi = parse_formula(st, "~Q(y)");
    a.pred = "P";
    a.args = {"x"};
    for (Scheme s : all_schemes()) {
        FormulaId inst = instantiate_scheme(st, s, a);
        CHECK(matches_scheme(st, inst, s));
    }
}

TEST_CASE("tautology decision procedure") {
    FormulaStore st;
    CHECK(is_tautology(st, parse_formula(st, "(D{x}{y} | ~D{x}{y})")));
    CHECK(!is_tautology(st, parse_formula(st, "(P(x) | Q(x))")));
    CHECK(is_tautology(st, parse_formula(st, "((P(x) & Q(x)) -> P(x))")));
    // modal structure is opaque: these differ as atoms
    CHECK(!is_tautology(st, parse_formula(st, "(D{x}P(x) -> P(x))")));
}

TEST_CASE("derivation checking") {
    FormulaStore st;
    SUBCASE("the derived necessitation rule for determination") {
        Derivation d;
        FormulaId phi = parse_formula(st, "(P(x) -> P(x))");
        d.lines.push_back({phi, {Justification::Axiom, "Tautology", 0, 0, 0, VarSet()}});
        d.lines.push_back({st.know_mod(VarSet(), phi),
                           {Justification::KNecessitation, "", 0, 0, 1, VarSet()}});
        d.lines.push_back({parse_formula(st, "(Know (P(x) -> P(x)) -> A (P(x) -> P(x)))"),
                           {Justification::Axiom, "KnowableDetermination", 0, 0, 0, VarSet()}});
        d.lines.push_back({st.dep_mod(VarSet(), phi),
                           {Justification::ModusPonens, "", 2, 3, 0, VarSet()}});
        auto r = check_derivation(st, d);
        CHECK(r.ok);
    }
    SUBCASE("single tautology line") {
        Derivation d;
        d.lines.push_back({parse_formula(st, "(K{x}{y} -> K{x}{y})"),
                           {Justification::Axiom, "Tautology", 0, 0, 0, VarSet()}});
        CHECK(check_derivation(st, d).ok);
    }
    SUBCASE("modus ponens citing a later line fails") {
        Derivation d;
        FormulaId p = parse_formula(st, "P(x)");
        d.lines.push_back({p, {Justification::ModusPonens, "", 1, 2, 0, VarSet()}});
        d.lines.push_back({parse_formula(st, "(P(x) -> P(x))"),
                           {Justification::Axiom, "Tautology", 0, 0, 0, VarSet()}});
        auto r = check_derivation(st, d);
        CHECK(!r.ok);
        CHECK(r.error_line == 1);
    }
    SUBCASE("wrong axiom name is caught") {
        Derivation d;
        d.lines.push_back({parse_formula(st, "(D{x}P(x) -> P(x))"),
                           {Justification::Axiom, "Veracity", 0, 0, 0, VarSet()}});
        auto r = check_derivation(st, d);
        CHECK(!r.ok);
        CHECK(r.error_line == 1);
    }
    SUBCASE("necessitation must match its subscript") {
        Derivation d;
        FormulaId phi = parse_formula(st, "(P(x) -> P(x))");
        d.lines.push_back({phi, {Justification::Axiom, "Tautology", 0, 0, 0, VarSet()}});
        d.lines.push_back({st.know_mod(VarSet::single("x"), phi),
                           {Justification::KNecessitation, "", 0, 0, 1, VarSet::single("y")}});
        CHECK(!check_derivation(st, d).ok);
    }
}

TEST_CASE("concatenated derivations with shifted indices stay valid") {
    FormulaStore st;
    auto make = [&](const std::string& base) {
        Derivation d;
        FormulaId phi = parse_formula(st, base);
        d.lines.push_back({phi, {Justification::Axiom, "Tautology", 0, 0, 0, VarSet()}});
        d.lines.push_back({st.dep_mod(VarSet::single("x"), phi),
                           {Justification::DNecessitation, "", 0, 0, 1, VarSet::single("x")}});
        return d;
    };
    Derivation a = make("(P(x) -> P(x))");
    Derivation b = make("(Q(x) -> Q(x))");
    REQUIRE(check_derivation(st, a).ok);
    REQUIRE(check_derivation(st, b).ok);
    Derivation both = a;
    int shift = static_cast<int>(a.lines.size());
    for (auto line : b.lines) {
        if (line.by.kind == Justification::ModusPonens) {
            line.by.i += shift;
            line.by.j += shift;
        }
        if (line.by.kind == Justification::KNecessitation ||
            line.by.kind == Justification::DNecessitation)
            line.by.of += shift;
        both.lines.push_back(line);
    }
    CHECK(check_derivation(st, both).ok);
}

TEST_CASE("proof files load and verify") {
    FormulaStore st;
    std::string text = R"json({"lines":[
        {"formula":"(P(x) -> P(x))","by":{"axiom":"Tautology"}},
        {"formula":"K{}(P(x) -> P(x))","by":{"knec":{"of":1,"X":[]}}},
        {"formula":"(K{}(P(x) -> P(x)) -> D{}(P(x) -> P(x)))","by":{"axiom":"KnowableDetermination"}},
        {"formula":"D{}(P(x) -> P(x))","by":{"mp":[2,3]}}
    ]})json";
    Derivation d = load_derivation_json(st, text);
    auto r = check_derivation(st, d);
    CHECK(r.ok);
    CHECK_THROWS(
        load_derivation_json(st, R"json({"lines":[{"formula":"P(x)","by":{"zap":1}}]})json"));
}

TEST_CASE("every scheme instance is true everywhere on expanded random models") {
    // Per-scheme soundness over a small sweep; the full sweep lives in the
    // acceptance suite.
    FormulaStore st;
    Rng rng(47);
    std::vector<FormulaId> pool = {parse_formula(st, "P(x)"), parse_formula(st, "~Q(y)"),
                                   parse_formula(st, "K{x}P(x)")};
    for (int trial = 0; trial < 8; ++trial) {
        RandomModelParams p;
        p.state_count = 2 + rng.below(3);
        p.vars = {"x", "y"};
        p.preds = {{"P", 1}, {"Q", 1}};
        p.seed = rng.next();
        PreorderModel lcd = expand_standard(random_standard_model(p));
        PreorderModel lud = expand_pseudometric(random_pseudometric_model(p));
        auto subsets = all_subsets(VarSet({"x", "y"}));
        for (Scheme s : all_schemes()) {
            for (const VarSet& X : subsets)
                for (const VarSet& Y : subsets) {
                    SchemeInstanceArgs a;
                    a.X = X;
                    a.Y = Y;
                    a.Z = subsets[rng.below(subsets.size())];
                    a.phi = pool[rng.below(pool.size())];
                    a.psi = pool[rng.below(pool.size())];
                    a.pred = "P";
                    a.args = {"x"};
                    FormulaId inst = instantiate_scheme(st, s, a);
                    PreorderModel& m = scheme_language(s) == Lang::LUD ? lud : lcd;
                    Evaluator ev(st, m);
                    CHECK(ev.valid_in_model(inst));
                }
        }
    }
}
