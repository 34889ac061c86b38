#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topodep/formula.hpp"

namespace topodep {

// Hilbert-style axiom schemes. Implications and disjunctions in the table
// patterns are the usual core encodings (a -> b is ~(a & ~b)).
enum class Scheme {
    // determination
    DDistribution,
    Factivity,
    Axiom4,
    Axiom5,
    Inclusion,
    Additivity,
    Transitivity,
    DeterminedDependence,
    Transfer,
    DeterminedAtoms,
    // knowability
    KDistribution,
    Veracity,
    PositiveIntrospection,
    KInclusion,
    KAdditivity,
    KTransitivity,
    KnowabilityOfEpistemicDependence,
    KnowabilityTransfer,
    KnowableDetermination,
    KnowableDependence,
    KnowledgeOfNecessity,
    KnowledgeOfConstants,
    // uniformity
    UInclusion,
    UAdditivity,
    UTransitivity,
    UniformDependenceIsKnown,
    UniformityImpliesContinuity,
    UniformityOfKnowledge,
    // propositional
    Tautology,
};

const char* scheme_name(Scheme s);
std::optional<Scheme> scheme_by_name(const std::string& name);
const std::vector<Scheme>& all_schemes();
// Smallest language whose proof system contains the scheme.
Lang scheme_language(Scheme s);

struct SchemeMatch {
    Scheme scheme;
    std::map<std::string, std::string> bindings;  // metavariable -> printed value
};

// All schemes the formula instantiates, side conditions included.
std::vector<SchemeMatch> match_axiom(const FormulaStore& st, FormulaId f);
bool matches_scheme(const FormulaStore& st, FormulaId f, Scheme s,
                    std::map<std::string, std::string>* bindings = nullptr);

// Truth-table tautology test treating maximal non-Boolean subformulas as
// atoms; refuses formulas with more than 20 distinct such atoms.
bool is_tautology(const FormulaStore& st, FormulaId f);

// Instantiates a scheme with concrete variable sets and formulas; used by the
// soundness sweep. Unused slots may stay empty.
struct SchemeInstanceArgs {
    VarSet X, Y, Z;
    FormulaId phi = kNoFormula;
    FormulaId psi = kNoFormula;
    std::string pred;                 // DeterminedAtoms only
    std::vector<std::string> args;    // DeterminedAtoms only
};
FormulaId instantiate_scheme(FormulaStore& st, Scheme s, const SchemeInstanceArgs& a);

// ── Derivations ─────────────────────────────────────────────────────────────

struct Justification {
    enum Kind { Axiom, ModusPonens, KNecessitation, DNecessitation } kind;
    std::string axiom_name;  // Axiom
    int i = 0, j = 0;        // ModusPonens premises (1-based line numbers)
    int of = 0;              // Necessitation premise
    VarSet X;                // Necessitation subscript
};

struct Derivation {
    struct Line {
        FormulaId formula;
        Justification by;
    };
    std::vector<Line> lines;
};

struct DerivationResult {
    bool ok = true;
    int error_line = 0;  // 1-based
    std::string reason;
};

DerivationResult check_derivation(const FormulaStore& st, const Derivation& d);

// Proof file format:
// {"lines":[{"formula":"...","by":{"axiom":"Factivity"} | {"mp":[1,2]}
//           | {"knec":{"of":1,"X":["x"]}} | {"dnec":{"of":1,"X":["x"]}}]}
Derivation load_derivation_json(FormulaStore& st, const std::string& text);

}  // namespace topodep
