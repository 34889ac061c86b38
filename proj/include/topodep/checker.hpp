#pragma once

#include <map>
#include <string>
#include <vector>

#include "topodep/formula.hpp"
#include "topodep/model.hpp"

namespace topodep {

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Model checking over preorder models. Evaluation is memoized per
// (subformula, state); one Evaluator is built per model.
class Evaluator {
public:
    Evaluator(const FormulaStore& st, const PreorderModel& m);

    bool eval(std::size_t state, FormulaId f);
    bool eval(const std::string& state, FormulaId f);
    Bits eval_all(FormulaId f);
    bool valid_in_model(FormulaId f);

private:
    const Bits& table(FormulaId f);
    void check_wellformed(FormulaId f);

    const FormulaStore& st_;
    const PreorderModel& m_;
    std::map<FormulaId, Bits> memo_;
};

// Extended check-only atoms over standard models (where minimal opens exist).
// k{X}{Y}: the X-upset of s is contained in its Y-upset.
// I{X}{Y}: every eq_Y class meets the eq_X class of s.
// Ig{X}{Y}: every eq_Y class meets the leq_X upset of s.
bool eval_extended_atom(const StandardModel& sm, std::size_t state, FKind kind,
                        const VarSet& X, const VarSet& Y);
// Global versions (prefix the universal knowledge modality).
bool eval_extended_global(const StandardModel& sm, FKind kind, const VarSet& X, const VarSet& Y);

// Full evaluation over a standard model: core operators via the preorder
// expansion, extended atoms directly. Owns the expanded model.
class StandardEvaluator {
public:
    StandardEvaluator(const FormulaStore& st, const StandardModel& sm);

    bool eval(std::size_t state, FormulaId f);
    bool eval(const std::string& state, FormulaId f);

    const PreorderModel& expanded() const { return expanded_; }

private:
    const FormulaStore& st_;
    const StandardModel& sm_;
    PreorderModel expanded_;
    std::map<FormulaId, Bits> memo_;
    const Bits& table(FormulaId f);
};

}  // namespace topodep
