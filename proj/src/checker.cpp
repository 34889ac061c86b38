#include "topodep/checker.hpp"

namespace topodep {

Evaluator::Evaluator(const FormulaStore& st, const PreorderModel& m) : st_(st), m_(m) {}

void Evaluator::check_wellformed(FormulaId f) {
    Lang fl = st_.language(f);
    if (fl == Lang::LUDX)
        throw EvalError("extended atoms are only defined on standard models");
    if (static_cast<int>(fl) > static_cast<int>(m_.language))
        throw EvalError(std::string("formula language ") + lang_name(fl) +
                        " exceeds model language " + lang_name(m_.language));
    VarSet fv = st_.vars(f);
    VarSet mv = m_.vocabulary();
    // Predicate argument variables may coincide with model variables only.
    if (!fv.subset_of(mv))
        throw EvalError("formula uses variables outside the model vocabulary");
    for (const auto& [p, ar] : st_.predicates(f)) {
        auto it = m_.preds.find(p);
        if (it == m_.preds.end())
            throw EvalError("predicate '" + p + "' not declared by the model");
        if (it->second != ar)
            throw EvalError("arity mismatch for predicate '" + p + "'");
    }
}

const Bits& Evaluator::table(FormulaId f) {
    auto it = memo_.find(f);
    if (it != memo_.end()) return it->second;

    const FNode& nd = st_.node(f);
    std::size_t n = m_.n();
    Bits out(n);
    switch (nd.kind) {
        case FKind::Pred: {
            auto v = m_.predval.find(st_.print(f));
            if (v == m_.predval.end())
                throw EvalError("atom outside valuation domain: " + st_.print(f));
            out = v->second;
            break;
        }
        case FKind::Not: out = ~table(nd.a); break;
        case FKind::And: out = table(nd.a) & table(nd.b); break;
        case FKind::DepMod: {
            const Bits& body = table(nd.a);
            const Rel& e = m_.eq_of(nd.xs.key());
            for (std::size_t s = 0; s < n; ++s)
                if (e.row[s].subset_of(body)) out.set(s);
            break;
        }
        case FKind::KnowMod: {
            const Bits& body = table(nd.a);
            const Rel& l = m_.leq_of(nd.xs.key());
            for (std::size_t s = 0; s < n; ++s)
                if (l.row[s].subset_of(body)) out.set(s);
            break;
        }
        case FKind::DepAtom:
        case FKind::ContAtom:
        case FKind::UnifAtom: {
            const Bits* v = m_.atom_val(nd.kind, nd.xs.key(), nd.ys.key());
            if (!v) throw EvalError("atom outside valuation domain: " + st_.print(f));
            out = *v;
            break;
        }
        default:
            throw EvalError("extended atoms are only defined on standard models");
    }
    return memo_.emplace(f, std::move(out)).first->second;
}

bool Evaluator::eval(std::size_t state, FormulaId f) {
    if (state >= m_.n()) throw EvalError("state index out of range");
    check_wellformed(f);
    return table(f).test(state);
}

bool Evaluator::eval(const std::string& state, FormulaId f) {
    int idx = m_.state_index(state);
    if (idx < 0) throw EvalError("unknown state '" + state + "'");
    return eval(static_cast<std::size_t>(idx), f);
}

Bits Evaluator::eval_all(FormulaId f) {
    check_wellformed(f);
    return table(f);
}

bool Evaluator::valid_in_model(FormulaId f) {
    return eval_all(f).count() == m_.n();
}

// ── Extended atoms ──────────────────────────────────────────────────────────

bool eval_extended_atom(const StandardModel& sm, std::size_t state, FKind kind,
                        const VarSet& X, const VarSet& Y) {
    std::size_t n = sm.n();
    if (state >= n) throw EvalError("state index out of range");
    Rel lX = sm.derived_leq(X);
    switch (kind) {
        case FKind::PointAtom: {
            Rel lY = sm.derived_leq(Y);
            return lX.row[state].subset_of(lY.row[state]);
        }
        case FKind::IndepAtom: {
            Rel eX = sm.derived_eq(X);
            Rel eY = sm.derived_eq(Y);
            for (std::size_t w = 0; w < n; ++w) {
                // Some representative of [w]_Y must lie in [state]_X.
                if (!(eY.row[w] & eX.row[state]).any()) return false;
            }
            return true;
        }
        case FKind::TopoIndepAtom: {
            Rel eY = sm.derived_eq(Y);
            for (std::size_t w = 0; w < n; ++w)
                if (!(eY.row[w] & lX.row[state]).any()) return false;
            return true;
        }
        default:
            throw EvalError("not an extended atom");
    }
}

bool eval_extended_global(const StandardModel& sm, FKind kind, const VarSet& X, const VarSet& Y) {
    for (std::size_t s = 0; s < sm.n(); ++s)
        if (!eval_extended_atom(sm, s, kind, X, Y)) return false;
    return true;
}

// ── StandardEvaluator ───────────────────────────────────────────────────────

StandardEvaluator::StandardEvaluator(const FormulaStore& st, const StandardModel& sm)
    : st_(st), sm_(sm), expanded_(expand_standard(sm)) {}

const Bits& StandardEvaluator::table(FormulaId f) {
    auto it = memo_.find(f);
    if (it != memo_.end()) return it->second;

    const FNode& nd = st_.node(f);
    std::size_t n = sm_.n();
    Bits out(n);
    switch (nd.kind) {
        case FKind::PointAtom:
        case FKind::IndepAtom:
        case FKind::TopoIndepAtom:
            for (std::size_t s = 0; s < n; ++s)
                if (eval_extended_atom(sm_, s, nd.kind, nd.xs, nd.ys)) out.set(s);
            break;
        case FKind::Not: out = ~table(nd.a); break;
        case FKind::And: out = table(nd.a) & table(nd.b); break;
        case FKind::DepMod: {
            const Bits& body = table(nd.a);
            const Rel& e = expanded_.eq_of(nd.xs.key());
            for (std::size_t s = 0; s < n; ++s)
                if (e.row[s].subset_of(body)) out.set(s);
            break;
        }
        case FKind::KnowMod: {
            const Bits& body = table(nd.a);
            const Rel& l = expanded_.leq_of(nd.xs.key());
            for (std::size_t s = 0; s < n; ++s)
                if (l.row[s].subset_of(body)) out.set(s);
            break;
        }
        default: {
            Evaluator ev(st_, expanded_);
            out = ev.eval_all(f);
            break;
        }
    }
    return memo_.emplace(f, std::move(out)).first->second;
}

bool StandardEvaluator::eval(std::size_t state, FormulaId f) {
    if (state >= sm_.n()) throw EvalError("state index out of range");
    VarSet fv = st_.vars(f);
    if (!fv.subset_of(sm_.vocabulary()))
        throw EvalError("formula uses variables outside the model vocabulary");
    return table(f).test(state);
}

bool StandardEvaluator::eval(const std::string& state, FormulaId f) {
    int idx = sm_.state_index(state);
    if (idx < 0) throw EvalError("unknown state '" + state + "'");
    return eval(static_cast<std::size_t>(idx), f);
}

}  // namespace topodep
