#pragma once

#include <optional>
#include <string>
#include <vector>

#include "topodep/checker.hpp"
#include "topodep/formula.hpp"
#include "topodep/model.hpp"

namespace topodep {

struct SatLimits {
    std::size_t closure_budget = 20000;   // max members of the filtration set
    std::size_t type_budget = 200000;     // max saturated types enumerated
};

// A saturated type candidate is a subset of the filtration set represented as
// a bitset over member indices.
struct TypeSpace {
    ClosureSet phi;
    std::vector<FormulaId> members;        // phi.members
    std::vector<Bits> types;               // locally saturated subsets
};

TypeSpace saturate_types(const FormulaStore& st, const ClosureSet& phi,
                         const SatLimits& limits = {});

struct EliminationStep {
    int round;
    std::string type_name;      // "t<k>" within the candidate universe
    std::string missing_diamond;  // the box formula whose witness was missing
};

struct SatResult {
    bool sat = false;
    // SAT: verified certificate.
    std::optional<PreorderModel> certificate;
    std::string satisfied_at;
    // UNSAT: per-universe elimination traces.
    std::vector<EliminationStep> trace;
    std::size_t closure_size = 0;
    std::size_t type_count = 0;
};

// Decision procedure by type elimination over the filtration set. SAT answers
// carry a certificate that has already passed the validator and the checker;
// an UNSAT answer lists which diamonds lost their witnesses.
SatResult decide_sat(FormulaStore& st, FormulaId f, Lang language, const SatLimits& limits = {});

struct ValidityResult {
    bool valid = false;
    std::optional<PreorderModel> countermodel;
    std::string falsified_at;
    std::size_t closure_size = 0;
    std::size_t type_count = 0;
};

ValidityResult decide_valid(FormulaStore& st, FormulaId f, Lang language,
                            const SatLimits& limits = {});

// Exhaustive search over small preorder models; independent of decide_sat.
struct OracleResult {
    bool found = false;          // a model satisfying the formula exists
    std::optional<PreorderModel> model;
    std::string state;
    std::size_t models_tried = 0;
};

// Enumerates every preorder model with at most max_states states over the
// formula's vocabulary (relations first, then condition-respecting
// valuations), returning the first satisfying model or the bounded negative
// answer. Intended for vocabularies of at most two variables and three
// states; beyond the model budget it raises BudgetError.
OracleResult brute_force_oracle(FormulaStore& st, FormulaId f, std::size_t max_states,
                                Lang language, std::size_t model_budget = 2000000);

}  // namespace topodep
