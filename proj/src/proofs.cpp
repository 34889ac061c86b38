#include "topodep/proofs.hpp"

#include <algorithm>
#include <array>
#include <functional>

#include <json.hpp>

namespace topodep {

namespace {

struct SchemeInfo {
    Scheme s;
    const char* name;
    Lang lang;
};

const std::array<SchemeInfo, 29> kSchemes = {{
    {Scheme::DDistribution, "D-Distribution", Lang::LFD},
    {Scheme::Factivity, "Factivity", Lang::LFD},
    {Scheme::Axiom4, "Axiom4", Lang::LFD},
    {Scheme::Axiom5, "Axiom5", Lang::LFD},
    {Scheme::Inclusion, "Inclusion", Lang::LFD},
    {Scheme::Additivity, "Additivity", Lang::LFD},
    {Scheme::Transitivity, "Transitivity", Lang::LFD},
    {Scheme::DeterminedDependence, "DeterminedDependence", Lang::LFD},
    {Scheme::Transfer, "Transfer", Lang::LFD},
    {Scheme::DeterminedAtoms, "DeterminedAtoms", Lang::LFD},
    {Scheme::KDistribution, "K-Distribution", Lang::LCD},
    {Scheme::Veracity, "Veracity", Lang::LCD},
    {Scheme::PositiveIntrospection, "PositiveIntrospection", Lang::LCD},
    {Scheme::KInclusion, "K-Inclusion", Lang::LCD},
    {Scheme::KAdditivity, "K-Additivity", Lang::LCD},
    {Scheme::KTransitivity, "K-Transitivity", Lang::LCD},
    {Scheme::KnowabilityOfEpistemicDependence, "KnowabilityOfEpistemicDependence", Lang::LCD},
    {Scheme::KnowabilityTransfer, "KnowabilityTransfer", Lang::LCD},
    {Scheme::KnowableDetermination, "KnowableDetermination", Lang::LCD},
    {Scheme::KnowableDependence, "KnowableDependence", Lang::LCD},
    {Scheme::KnowledgeOfNecessity, "KnowledgeOfNecessity", Lang::LCD},
    {Scheme::KnowledgeOfConstants, "KnowledgeOfConstants", Lang::LCD},
    {Scheme::UInclusion, "U-Inclusion", Lang::LUD},
    {Scheme::UAdditivity, "U-Additivity", Lang::LUD},
    {Scheme::UTransitivity, "U-Transitivity", Lang::LUD},
    {Scheme::UniformDependenceIsKnown, "UniformDependenceIsKnown", Lang::LUD},
    {Scheme::UniformityImpliesContinuity, "UniformityImpliesContinuity", Lang::LUD},
    {Scheme::UniformityOfKnowledge, "UniformityOfKnowledge", Lang::LUD},
    {Scheme::Tautology, "Tautology", Lang::LFD},
}};

// Implication decomposition on the core encoding a -> b == ~(a & ~b).
bool as_implies(const FormulaStore& st, FormulaId f, FormulaId& a, FormulaId& b) {
    const FNode& n = st.node(f);
    if (n.kind != FKind::Not) return false;
    const FNode& m = st.node(n.a);
    if (m.kind != FKind::And) return false;
    const FNode& r = st.node(m.b);
    if (r.kind != FKind::Not) return false;
    a = m.a;
    b = r.a;
    return true;
}

bool as_and(const FormulaStore& st, FormulaId f, FormulaId& a, FormulaId& b) {
    const FNode& n = st.node(f);
    if (n.kind != FKind::And) return false;
    a = n.a;
    b = n.b;
    return true;
}

bool is_mod(const FormulaStore& st, FormulaId f, FKind kind, VarSet& X, FormulaId& body) {
    const FNode& n = st.node(f);
    if (n.kind != kind) return false;
    X = n.xs;
    body = n.a;
    return true;
}

bool is_set_atom(const FormulaStore& st, FormulaId f, FKind kind, VarSet& X, VarSet& Y) {
    const FNode& n = st.node(f);
    if (n.kind != kind) return false;
    X = n.xs;
    Y = n.ys;
    return true;
}

FKind atom_kind_of(Scheme s) {
    switch (s) {
        case Scheme::Inclusion:
        case Scheme::Additivity:
        case Scheme::Transitivity: return FKind::DepAtom;
        case Scheme::KInclusion:
        case Scheme::KAdditivity:
        case Scheme::KTransitivity: return FKind::ContAtom;
        default: return FKind::UnifAtom;
    }
}

void bind_set(std::map<std::string, std::string>* b, const char* k, const VarSet& v) {
    if (b) (*b)[k] = "{" + v.key() + "}";
}
void bind_formula(std::map<std::string, std::string>* b, const FormulaStore& st, const char* k,
                  FormulaId f) {
    if (b) (*b)[k] = st.print(f);
}

}  // namespace

const char* scheme_name(Scheme s) {
    for (const auto& e : kSchemes)
        if (e.s == s) return e.name;
    return "?";
}

std::optional<Scheme> scheme_by_name(const std::string& name) {
    for (const auto& e : kSchemes)
        if (name == e.name) return e.s;
    return std::nullopt;
}

const std::vector<Scheme>& all_schemes() {
    static const std::vector<Scheme> v = [] {
        std::vector<Scheme> out;
        for (const auto& e : kSchemes) out.push_back(e.s);
        return out;
    }();
    return v;
}

Lang scheme_language(Scheme s) {
    for (const auto& e : kSchemes)
        if (e.s == s) return e.lang;
    return Lang::LUD;
}

bool is_tautology(const FormulaStore& st, FormulaId f) {
    std::vector<FormulaId> atoms;
    std::function<void(FormulaId)> collect = [&](FormulaId g) {
        const FNode& n = st.node(g);
        if (n.kind == FKind::Not) return collect(n.a);
        if (n.kind == FKind::And) {
            collect(n.a);
            collect(n.b);
            return;
        }
        if (std::find(atoms.begin(), atoms.end(), g) == atoms.end()) atoms.push_back(g);
    };
    collect(f);
    if (atoms.size() > 20)
        throw std::runtime_error("tautology check limited to 20 distinct atoms per line");

    std::map<FormulaId, bool> env;
    std::function<bool(FormulaId)> ev = [&](FormulaId g) -> bool {
        const FNode& n = st.node(g);
        if (n.kind == FKind::Not) return !ev(n.a);
        if (n.kind == FKind::And) return ev(n.a) && ev(n.b);
        return env.at(g);
    };
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << atoms.size()); ++mask) {
        for (std::size_t i = 0; i < atoms.size(); ++i) env[atoms[i]] = (mask >> i) & 1;
        if (!ev(f)) return false;
    }
    return true;
}

bool matches_scheme(const FormulaStore& st, FormulaId f, Scheme s,
                    std::map<std::string, std::string>* b) {
    FormulaId a = kNoFormula, c = kNoFormula, l = kNoFormula, r = kNoFormula;
    VarSet X, Y, Z, X2, Y2;
    FormulaId body = kNoFormula, body2 = kNoFormula;

    switch (s) {
        case Scheme::Tautology: {
            try {
                return is_tautology(st, f);
            } catch (const std::runtime_error&) {
                return false;
            }
        }

        case Scheme::DDistribution:
        case Scheme::KDistribution: {
            FKind mod = s == Scheme::DDistribution ? FKind::DepMod : FKind::KnowMod;
            // M_X(phi -> psi) -> (M_X phi -> M_X psi)
            if (!as_implies(st, f, a, c)) return false;
            if (!is_mod(st, a, mod, X, body)) return false;
            FormulaId p = kNoFormula, q = kNoFormula;
            if (!as_implies(st, body, p, q)) return false;
            if (!as_implies(st, c, l, r)) return false;
            VarSet X3;
            if (!is_mod(st, l, mod, X2, body) || !is_mod(st, r, mod, X3, body2)) return false;
            if (!(X == X2 && X == X3) || body != p || body2 != q) return false;
            bind_set(b, "X", X);
            bind_formula(b, st, "phi", p);
            bind_formula(b, st, "psi", q);
            return true;
        }

        case Scheme::Factivity:
        case Scheme::Veracity: {
            FKind mod = s == Scheme::Factivity ? FKind::DepMod : FKind::KnowMod;
            if (!as_implies(st, f, a, c)) return false;
            if (!is_mod(st, a, mod, X, body)) return false;
            if (body != c) return false;
            bind_set(b, "X", X);
            bind_formula(b, st, "phi", body);
            return true;
        }

        case Scheme::Axiom4:
        case Scheme::PositiveIntrospection: {
            FKind mod = s == Scheme::Axiom4 ? FKind::DepMod : FKind::KnowMod;
            if (!as_implies(st, f, a, c)) return false;
            if (!is_mod(st, a, mod, X, body)) return false;
            if (!is_mod(st, c, mod, X2, body2)) return false;
            if (!(X == X2) || body2 != a) return false;
            bind_set(b, "X", X);
            bind_formula(b, st, "phi", body);
            return true;
        }

        case Scheme::Axiom5: {
            // ~D_X phi -> D_X ~D_X phi
            if (!as_implies(st, f, a, c)) return false;
            if (st.node(a).kind != FKind::Not) return false;
            if (!is_mod(st, st.node(a).a, FKind::DepMod, X, body)) return false;
            if (!is_mod(st, c, FKind::DepMod, X2, body2)) return false;
            if (!(X == X2) || body2 != a) return false;
            bind_set(b, "X", X);
            bind_formula(b, st, "phi", body);
            return true;
        }

        case Scheme::Inclusion:
        case Scheme::KInclusion:
        case Scheme::UInclusion: {
            if (!is_set_atom(st, f, atom_kind_of(s), X, Y)) return false;
            if (!Y.subset_of(X)) return false;  // side condition
            bind_set(b, "X", X);
            bind_set(b, "Y", Y);
            return true;
        }

        case Scheme::Additivity:
        case Scheme::KAdditivity:
        case Scheme::UAdditivity: {
            FKind k = atom_kind_of(s);
            // (A_XY & A_XZ) -> A_X(Y u Z)
            if (!as_implies(st, f, a, c)) return false;
            if (!as_and(st, a, l, r)) return false;
            VarSet Xa, Ya, Xb, Zb, Xc, Wc;
            if (!is_set_atom(st, l, k, Xa, Ya)) return false;
            if (!is_set_atom(st, r, k, Xb, Zb)) return false;
            if (!is_set_atom(st, c, k, Xc, Wc)) return false;
            if (!(Xa == Xb && Xa == Xc)) return false;
            if (!(Ya.unite(Zb) == Wc)) return false;
            bind_set(b, "X", Xa);
            bind_set(b, "Y", Ya);
            bind_set(b, "Z", Zb);
            return true;
        }

        case Scheme::Transitivity:
        case Scheme::KTransitivity:
        case Scheme::UTransitivity: {
            FKind k = atom_kind_of(s);
            // (A_XY & A_YZ) -> A_XZ
            if (!as_implies(st, f, a, c)) return false;
            if (!as_and(st, a, l, r)) return false;
            VarSet Xa, Ya, Yb, Zb, Xc, Zc;
            if (!is_set_atom(st, l, k, Xa, Ya)) return false;
            if (!is_set_atom(st, r, k, Yb, Zb)) return false;
            if (!is_set_atom(st, c, k, Xc, Zc)) return false;
            if (!(Ya == Yb && Xa == Xc && Zb == Zc)) return false;
            bind_set(b, "X", Xa);
            bind_set(b, "Y", Ya);
            bind_set(b, "Z", Zb);
            return true;
        }

        case Scheme::DeterminedDependence:
        case Scheme::KnowabilityOfEpistemicDependence: {
            bool dd = s == Scheme::DeterminedDependence;
            FKind atom = dd ? FKind::DepAtom : FKind::ContAtom;
            FKind mod = dd ? FKind::DepMod : FKind::KnowMod;
            if (!as_implies(st, f, a, c)) return false;
            if (!is_set_atom(st, a, atom, X, Y)) return false;
            if (!is_mod(st, c, mod, X2, body)) return false;
            if (!(X == X2) || body != a) return false;
            bind_set(b, "X", X);
            bind_set(b, "Y", Y);
            return true;
        }

        case Scheme::Transfer:
        case Scheme::KnowabilityTransfer: {
            bool d = s == Scheme::Transfer;
            FKind atom = d ? FKind::DepAtom : FKind::ContAtom;
            FKind mod = d ? FKind::DepMod : FKind::KnowMod;
            // A_XY -> (M_Y phi -> M_X phi)
            if (!as_implies(st, f, a, c)) return false;
            if (!is_set_atom(st, a, atom, X, Y)) return false;
            if (!as_implies(st, c, l, r)) return false;
            if (!is_mod(st, l, mod, Y2, body)) return false;
            if (!is_mod(st, r, mod, X2, body2)) return false;
            if (!(Y2 == Y && X2 == X) || body != body2) return false;
            bind_set(b, "X", X);
            bind_set(b, "Y", Y);
            bind_formula(b, st, "phi", body);
            return true;
        }

        case Scheme::DeterminedAtoms: {
            // P(args) -> D_{vars(args)} P(args)
            if (!as_implies(st, f, a, c)) return false;
            if (st.node(a).kind != FKind::Pred) return false;
            if (!is_mod(st, c, FKind::DepMod, X, body)) return false;
            if (body != a) return false;
            const auto& args = st.node(a).args;
            VarSet avars{std::vector<std::string>(args.begin(), args.end())};
            if (!(X == avars)) return false;
            bind_formula(b, st, "atom", a);
            return true;
        }

        case Scheme::KnowableDetermination: {
            if (!as_implies(st, f, a, c)) return false;
            if (!is_mod(st, a, FKind::KnowMod, X, body)) return false;
            if (!is_mod(st, c, FKind::DepMod, X2, body2)) return false;
            if (!(X == X2) || body != body2) return false;
            bind_set(b, "X", X);
            bind_formula(b, st, "phi", body);
            return true;
        }

        case Scheme::KnowableDependence: {
            if (!as_implies(st, f, a, c)) return false;
            if (!is_set_atom(st, a, FKind::ContAtom, X, Y)) return false;
            if (!is_set_atom(st, c, FKind::DepAtom, X2, Y2)) return false;
            if (!(X == X2 && Y == Y2)) return false;
            bind_set(b, "X", X);
            bind_set(b, "Y", Y);
            return true;
        }

        case Scheme::KnowledgeOfNecessity: {
            // D_{} phi -> K_{} phi
            if (!as_implies(st, f, a, c)) return false;
            if (!is_mod(st, a, FKind::DepMod, X, body)) return false;
            if (!is_mod(st, c, FKind::KnowMod, X2, body2)) return false;
            if (!X.empty() || !X2.empty() || body != body2) return false;
            bind_formula(b, st, "phi", body);
            return true;
        }

        case Scheme::KnowledgeOfConstants: {
            // D{}{Y} -> K{}{Y}
            if (!as_implies(st, f, a, c)) return false;
            if (!is_set_atom(st, a, FKind::DepAtom, X, Y)) return false;
            if (!is_set_atom(st, c, FKind::ContAtom, X2, Y2)) return false;
            if (!X.empty() || !X2.empty() || !(Y == Y2)) return false;
            bind_set(b, "Y", Y);
            return true;
        }

        case Scheme::UniformDependenceIsKnown: {
            // U(X;Y) -> K_{} U(X;Y)
            if (!as_implies(st, f, a, c)) return false;
            if (!is_set_atom(st, a, FKind::UnifAtom, X, Y)) return false;
            if (!is_mod(st, c, FKind::KnowMod, X2, body)) return false;
            if (!X2.empty() || body != a) return false;
            bind_set(b, "X", X);
            bind_set(b, "Y", Y);
            return true;
        }

        case Scheme::UniformityImpliesContinuity: {
            // U(X;Y) -> K_{} K{X}{Y}
            if (!as_implies(st, f, a, c)) return false;
            if (!is_set_atom(st, a, FKind::UnifAtom, X, Y)) return false;
            if (!is_mod(st, c, FKind::KnowMod, X2, body)) return false;
            if (!X2.empty()) return false;
            if (!is_set_atom(st, body, FKind::ContAtom, X2, Y2)) return false;
            if (!(X2 == X && Y2 == Y)) return false;
            bind_set(b, "X", X);
            bind_set(b, "Y", Y);
            return true;
        }

        case Scheme::UniformityOfKnowledge: {
            // K{}{Y} -> U(X;Y)
            if (!as_implies(st, f, a, c)) return false;
            if (!is_set_atom(st, a, FKind::ContAtom, X, Y)) return false;
            if (!X.empty()) return false;
            if (!is_set_atom(st, c, FKind::UnifAtom, X2, Y2)) return false;
            if (!(Y2 == Y)) return false;
            bind_set(b, "X", X2);
            bind_set(b, "Y", Y);
            return true;
        }
    }
    return false;
}

std::vector<SchemeMatch> match_axiom(const FormulaStore& st, FormulaId f) {
    std::vector<SchemeMatch> out;
    for (Scheme s : all_schemes()) {
        std::map<std::string, std::string> b;
        if (matches_scheme(st, f, s, &b)) out.push_back({s, std::move(b)});
    }
    return out;
}

FormulaId instantiate_scheme(FormulaStore& st, Scheme s, const SchemeInstanceArgs& a) {
    auto imp = [&](FormulaId p, FormulaId q) { return st.mk_implies(p, q); };
    switch (s) {
        case Scheme::DDistribution:
            return imp(st.dep_mod(a.X, imp(a.phi, a.psi)),
                       imp(st.dep_mod(a.X, a.phi), st.dep_mod(a.X, a.psi)));
        case Scheme::KDistribution:
            return imp(st.know_mod(a.X, imp(a.phi, a.psi)),
                       imp(st.know_mod(a.X, a.phi), st.know_mod(a.X, a.psi)));
        case Scheme::Factivity: return imp(st.dep_mod(a.X, a.phi), a.phi);
        case Scheme::Veracity: return imp(st.know_mod(a.X, a.phi), a.phi);
        case Scheme::Axiom4:
            return imp(st.dep_mod(a.X, a.phi), st.dep_mod(a.X, st.dep_mod(a.X, a.phi)));
        case Scheme::PositiveIntrospection:
            return imp(st.know_mod(a.X, a.phi), st.know_mod(a.X, st.know_mod(a.X, a.phi)));
        case Scheme::Axiom5: {
            FormulaId nd = st.mk_not(st.dep_mod(a.X, a.phi));
            return imp(nd, st.dep_mod(a.X, nd));
        }
        // The side condition is built in: the left set is widened to cover Y.
        case Scheme::Inclusion: return st.dep_atom(a.X.unite(a.Y), a.Y);
        case Scheme::KInclusion: return st.cont_atom(a.X.unite(a.Y), a.Y);
        case Scheme::UInclusion: return st.unif_atom(a.X.unite(a.Y), a.Y);
        case Scheme::Additivity:
            return imp(st.mk_and(st.dep_atom(a.X, a.Y), st.dep_atom(a.X, a.Z)),
                       st.dep_atom(a.X, a.Y.unite(a.Z)));
        case Scheme::KAdditivity:
            return imp(st.mk_and(st.cont_atom(a.X, a.Y), st.cont_atom(a.X, a.Z)),
                       st.cont_atom(a.X, a.Y.unite(a.Z)));
        case Scheme::UAdditivity:
            return imp(st.mk_and(st.unif_atom(a.X, a.Y), st.unif_atom(a.X, a.Z)),
                       st.unif_atom(a.X, a.Y.unite(a.Z)));
        case Scheme::Transitivity:
            return imp(st.mk_and(st.dep_atom(a.X, a.Y), st.dep_atom(a.Y, a.Z)),
                       st.dep_atom(a.X, a.Z));
        case Scheme::KTransitivity:
            return imp(st.mk_and(st.cont_atom(a.X, a.Y), st.cont_atom(a.Y, a.Z)),
                       st.cont_atom(a.X, a.Z));
        case Scheme::UTransitivity:
            return imp(st.mk_and(st.unif_atom(a.X, a.Y), st.unif_atom(a.Y, a.Z)),
                       st.unif_atom(a.X, a.Z));
        case Scheme::DeterminedDependence: {
            FormulaId at = st.dep_atom(a.X, a.Y);
            return imp(at, st.dep_mod(a.X, at));
        }
        case Scheme::KnowabilityOfEpistemicDependence: {
            FormulaId at = st.cont_atom(a.X, a.Y);
            return imp(at, st.know_mod(a.X, at));
        }
        case Scheme::Transfer:
            return imp(st.dep_atom(a.X, a.Y),
                       imp(st.dep_mod(a.Y, a.phi), st.dep_mod(a.X, a.phi)));
        case Scheme::KnowabilityTransfer:
            return imp(st.cont_atom(a.X, a.Y),
                       imp(st.know_mod(a.Y, a.phi), st.know_mod(a.X, a.phi)));
        case Scheme::DeterminedAtoms: {
            FormulaId at = st.pred(a.pred, a.args);
            VarSet avars{std::vector<std::string>(a.args.begin(), a.args.end())};
            return imp(at, st.dep_mod(avars, at));
        }
        case Scheme::KnowableDetermination:
            return imp(st.know_mod(a.X, a.phi), st.dep_mod(a.X, a.phi));
        case Scheme::KnowableDependence:
            return imp(st.cont_atom(a.X, a.Y), st.dep_atom(a.X, a.Y));
        case Scheme::KnowledgeOfNecessity:
            return imp(st.dep_mod(VarSet(), a.phi), st.know_mod(VarSet(), a.phi));
        case Scheme::KnowledgeOfConstants:
            return imp(st.dep_atom(VarSet(), a.Y), st.cont_atom(VarSet(), a.Y));
        case Scheme::UniformDependenceIsKnown: {
            FormulaId at = st.unif_atom(a.X, a.Y);
            return imp(at, st.know_mod(VarSet(), at));
        }
        case Scheme::UniformityImpliesContinuity:
            return imp(st.unif_atom(a.X, a.Y), st.know_mod(VarSet(), st.cont_atom(a.X, a.Y)));
        case Scheme::UniformityOfKnowledge:
            return imp(st.cont_atom(VarSet(), a.Y), st.unif_atom(a.X, a.Y));
        case Scheme::Tautology: {
            // phi -> phi stands in for the schema family.
            return imp(a.phi, a.phi);
        }
    }
    throw std::runtime_error("unknown scheme");
}

DerivationResult check_derivation(const FormulaStore& st, const Derivation& d) {
    auto err = [](int line, const std::string& why) {
        DerivationResult r;
        r.ok = false;
        r.error_line = line;
        r.reason = why;
        return r;
    };

    for (std::size_t i = 0; i < d.lines.size(); ++i) {
        int lineno = static_cast<int>(i) + 1;
        const auto& line = d.lines[i];
        const Justification& by = line.by;
        switch (by.kind) {
            case Justification::Axiom: {
                auto s = scheme_by_name(by.axiom_name);
                if (!s) return err(lineno, "unknown axiom scheme '" + by.axiom_name + "'");
                bool ok;
                try {
                    ok = matches_scheme(st, line.formula, *s);
                } catch (const std::runtime_error& e) {
                    return err(lineno, e.what());
                }
                if (!ok)
                    return err(lineno, "formula is not an instance of " + by.axiom_name);
                break;
            }
            case Justification::ModusPonens: {
                if (by.i < 1 || by.i > static_cast<int>(i) || by.j < 1 ||
                    by.j > static_cast<int>(i))
                    return err(lineno, "modus ponens premises must cite earlier lines");
                FormulaId prem = d.lines[by.i - 1].formula;
                FormulaId impl = d.lines[by.j - 1].formula;
                FormulaId a, b;
                if (!as_implies(st, impl, a, b))
                    return err(lineno, "second premise is not an implication");
                if (a != prem) return err(lineno, "implication antecedent does not match premise");
                if (b != line.formula) return err(lineno, "conclusion does not match consequent");
                break;
            }
            case Justification::KNecessitation:
            case Justification::DNecessitation: {
                if (by.of < 1 || by.of > static_cast<int>(i))
                    return err(lineno, "necessitation premise must cite an earlier line");
                FormulaId prem = d.lines[by.of - 1].formula;
                const FNode& n = st.node(line.formula);
                FKind want = by.kind == Justification::KNecessitation ? FKind::KnowMod
                                                                      : FKind::DepMod;
                if (n.kind != want || n.a != prem || !(n.xs == by.X))
                    return err(lineno, "conclusion is not the required necessitation of the premise");
                break;
            }
        }
    }
    return {};
}

Derivation load_derivation_json(FormulaStore& st, const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Derivation d;
    for (const auto& lj : j.at("lines")) {
        Derivation::Line line;
        line.formula = parse_formula(st, lj.at("formula").get<std::string>());
        const auto& by = lj.at("by");
        if (by.contains("axiom")) {
            line.by.kind = Justification::Axiom;
            line.by.axiom_name = by.at("axiom").get<std::string>();
        } else if (by.contains("mp")) {
            line.by.kind = Justification::ModusPonens;
            line.by.i = by.at("mp").at(0).get<int>();
            line.by.j = by.at("mp").at(1).get<int>();
        } else if (by.contains("knec") || by.contains("dnec")) {
            bool k = by.contains("knec");
            const auto& nj = k ? by.at("knec") : by.at("dnec");
            line.by.kind = k ? Justification::KNecessitation : Justification::DNecessitation;
            line.by.of = nj.at("of").get<int>();
            std::vector<std::string> xs;
            for (const auto& x : nj.at("X")) xs.push_back(x.get<std::string>());
            line.by.X = VarSet(xs);
        } else {
            throw std::runtime_error("line justification must name axiom, mp, knec or dnec");
        }
        d.lines.push_back(std::move(line));
    }
    return d;
}

}  // namespace topodep
