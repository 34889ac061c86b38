#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topodep/bitset.hpp"
#include "topodep/finitetopo.hpp"
#include "topodep/formula.hpp"
#include "topodep/rational.hpp"

namespace topodep {

// ── Relational model with per-variable-set structure ────────────────────────
// eq/leq are keyed by the canonical VarSet key of every subset of the
// vocabulary ("": empty set). dep holds the D/K/U atom valuations keyed by
// "Xkey|Ykey". predval is keyed by printed predicate atoms such as "P(x)".
struct PreorderModel {
    std::vector<std::string> vars;       // sorted
    std::map<std::string, int> preds;    // symbol -> arity
    std::vector<std::string> states;
    Lang language = Lang::LCD;           // lcd: no U entries; lud: U present

    std::map<std::string, Rel> eq;
    std::map<std::string, Rel> leq;
    std::map<std::string, std::map<std::string, Bits>> dep;  // "D"/"K"/"U"
    std::map<std::string, Bits> predval;

    std::size_t n() const { return states.size(); }
    int state_index(const std::string& name) const;
    VarSet vocabulary() const { return VarSet(vars); }

    const Rel& eq_of(const std::string& key) const;
    const Rel& leq_of(const std::string& key) const;
    const Bits* atom_val(FKind kind, const std::string& xkey, const std::string& ykey) const;
};

struct StandardModel {
    std::vector<std::string> vars;
    std::map<std::string, int> preds;
    std::vector<std::string> states;

    std::map<std::string, Rel> basic_leq;  // one preorder per basic variable
    std::map<std::string, Bits> predval;

    std::size_t n() const { return states.size(); }
    int state_index(const std::string& name) const;
    VarSet vocabulary() const { return VarSet(vars); }

    // Derived relations per standardness: leq_X = intersection of basics
    // (total for X = empty), eq_X = leq_X meet its converse.
    Rel derived_leq(const VarSet& X) const;
    Rel derived_eq(const VarSet& X) const;
};

struct PseudoMetricModel {
    std::vector<std::string> vars;
    std::map<std::string, int> preds;
    std::vector<std::string> states;

    // Symmetric n*n matrices of exact rationals, zero diagonal.
    std::map<std::string, std::vector<Rat>> dist;
    std::map<std::string, Bits> predval;

    std::size_t n() const { return states.size(); }
    int state_index(const std::string& name) const;
    VarSet vocabulary() const { return VarSet(vars); }

    const Rat& d(const std::string& var, std::size_t i, std::size_t j) const;
    // Chebyshev distance over X (0 for the empty set).
    Rat d_set(const VarSet& X, std::size_t i, std::size_t j) const;
};

// Value-space presentation derived from a standard model: one T0 value space
// per variable, surjective assignment maps, and a predicate interpretation
// over value tuples.
struct ConcreteModel {
    struct VariableSpace {
        std::string var;
        std::vector<std::string> values;     // "(x,[s])" with s the class representative
        std::vector<std::size_t> assign;     // state index -> value index
        OpenFamily value_opens;
    };
    std::vector<VariableSpace> spaces;
    // Predicate interpretation: tuples of (variable, value index) pairs.
    std::map<std::string, std::vector<std::vector<std::pair<std::string, std::size_t>>>> interp;
};

// ── Validation ──────────────────────────────────────────────────────────────

struct Violation {
    int condition;            // numbered condition; 0 for structural defects
    std::string description;
    std::vector<std::string> witness;  // state names involved
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_preorder_model(const PreorderModel& m);
ValidationReport validate_standard_model(const StandardModel& m);
ValidationReport validate_pseudometric_model(const PseudoMetricModel& m);

// ── Expansions ──────────────────────────────────────────────────────────────

PreorderModel expand_standard(const StandardModel& sm);
PreorderModel expand_pseudometric(const PseudoMetricModel& pm);
ConcreteModel extract_dependence_model(const StandardModel& sm);

// ── Generators (deterministic in the seed) ──────────────────────────────────

struct RandomModelParams {
    std::size_t state_count = 3;
    std::vector<std::string> vars = {"x"};
    std::map<std::string, int> preds = {{"P", 1}};
    std::uint64_t seed = 1;
    // Chance (out of 256) that a random off-diagonal edge is added before
    // taking the reflexive-transitive closure.
    int edge_density = 64;
};

StandardModel random_standard_model(const RandomModelParams& p);
PseudoMetricModel random_pseudometric_model(const RandomModelParams& p);

// splitmix64; the only random source in the project.
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t bound) { return bound ? next() % bound : 0; }
};

}  // namespace topodep
