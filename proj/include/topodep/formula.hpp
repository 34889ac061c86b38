#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace topodep {

// ── VarSet ──────────────────────────────────────────────────────────────────
// Finite set of basic variable names in a canonical sorted order. The empty
// set is a legal value; its textual key is "".
class VarSet {
public:
    VarSet() = default;
    explicit VarSet(std::vector<std::string> names);

    static VarSet single(const std::string& x) { return VarSet({x}); }

    const std::vector<std::string>& names() const { return v_; }
    bool empty() const { return v_.empty(); }
    std::size_t size() const { return v_.size(); }
    bool contains(const std::string& x) const;
    bool subset_of(const VarSet& o) const;
    VarSet unite(const VarSet& o) const;
    VarSet intersect(const VarSet& o) const;

    // Comma-joined sorted member list; "" for the empty set.
    std::string key() const;

    bool operator==(const VarSet& o) const { return v_ == o.v_; }
    bool operator!=(const VarSet& o) const { return v_ != o.v_; }
    bool operator<(const VarSet& o) const { return v_ < o.v_; }

private:
    std::vector<std::string> v_;
};

// All subsets of a vocabulary, in a deterministic order (by size, then lex).
std::vector<VarSet> all_subsets(const VarSet& vocab);

// ── Formula AST ─────────────────────────────────────────────────────────────

enum class FKind : std::uint8_t {
    Pred,       // P(x1,...,xn)
    Not,
    And,
    DepMod,     // D{X} phi
    KnowMod,    // K{X} phi
    DepAtom,    // D{X}{Y}
    ContAtom,   // K{X}{Y}
    UnifAtom,   // U(X;Y)
    PointAtom,  // k{X}{Y}     (check-only)
    IndepAtom,  // I{X}{Y}     (check-only)
    TopoIndepAtom  // Ig{X}{Y} (check-only)
};

enum class Lang : std::uint8_t { LFD = 0, LCD = 1, LUD = 2, LUDX = 3 };

const char* lang_name(Lang l);
Lang lang_parse(const std::string& s);

using FormulaId = std::uint32_t;
inline constexpr FormulaId kNoFormula = static_cast<FormulaId>(-1);

struct FNode {
    FKind kind{};
    FormulaId a = kNoFormula;       // first child
    FormulaId b = kNoFormula;       // second child (And only)
    VarSet xs, ys;                  // modality/atom variable sets
    std::string pred;               // predicate symbol (Pred only)
    std::vector<std::string> args;  // predicate arguments

    bool operator==(const FNode& o) const;
};

struct FNodeHash {
    std::size_t operator()(const FNode& n) const;
};

struct ParseError : std::runtime_error {
    std::size_t pos;
    ParseError(std::size_t p, const std::string& msg)
        : std::runtime_error(msg + " (at position " + std::to_string(p) + ")"), pos(p) {}
};

// Interning store: structurally equal formulas share one id, so equality is
// id comparison and per-formula tables can be keyed by id.
class FormulaStore {
public:
    FormulaId pred(const std::string& p, std::vector<std::string> args);
    FormulaId mk_not(FormulaId a);
    FormulaId mk_and(FormulaId a, FormulaId b);
    FormulaId dep_mod(VarSet xs, FormulaId a);
    FormulaId know_mod(VarSet xs, FormulaId a);
    FormulaId dep_atom(VarSet xs, VarSet ys);
    FormulaId cont_atom(VarSet xs, VarSet ys);
    FormulaId unif_atom(VarSet xs, VarSet ys);
    FormulaId point_atom(VarSet xs, VarSet ys);
    FormulaId indep_atom(VarSet xs, VarSet ys);
    FormulaId topo_indep_atom(VarSet xs, VarSet ys);

    // Boolean sugar on core constructors.
    FormulaId mk_or(FormulaId a, FormulaId b);       // ~(~a & ~b)
    FormulaId mk_implies(FormulaId a, FormulaId b);  // ~(a & ~b)

    // Single negation: strips one top-level Not, otherwise adds one.
    FormulaId single_neg(FormulaId a);

    const FNode& node(FormulaId id) const { return nodes_[id]; }
    std::size_t size() const { return nodes_.size(); }

    std::string print(FormulaId id) const;
    Lang language(FormulaId id) const;
    int modal_depth(FormulaId id) const;  // DepMod/KnowMod count; atoms are 0
    VarSet vars(FormulaId id) const;

    // Subformulas of id (including id), each once, deterministic order.
    std::vector<FormulaId> subformulas(FormulaId id) const;

    // Predicate symbols with arities occurring in id.
    std::map<std::string, int> predicates(FormulaId id) const;

private:
    FormulaId intern(FNode n);
    void collect_vars(FormulaId id, std::set<std::string>& out) const;

    std::vector<FNode> nodes_;
    std::unordered_map<FNode, FormulaId, FNodeHash> intern_;
};

// ── Parsing ─────────────────────────────────────────────────────────────────
// Grammar (whitespace-insensitive):
//   phi   ::= atom | "~" phi | "(" phi "&" phi ")" | "(" phi "|" phi ")"
//           | "(" phi "->" phi ")" | "D" vset phi | "K" vset phi
//           | "A" phi | "Know" phi
//   atom  ::= ident "(" vlist? ")" | "D" vset vset | "K" vset vset
//           | "U(" vlist? ";" vlist? ")" | "k" vset vset | "I" vset vset
//           | "Ig" vset vset | "C" vset | "KofV" vset
//           | "GD(" vlist? ";" vlist? ")" | "GK(" vlist? ";" vlist? ")"
//   vset  ::= "{" vlist? "}" ;  vlist ::= ident ("," ident)*
// Abbreviations are expanded during parsing; the resulting AST is core-only.
// Redundant parentheses "(phi)" are tolerated. `declared` pins predicate
// arities; predicates not declared get their arity from first use.
FormulaId parse_formula(FormulaStore& st, const std::string& text,
                        const std::map<std::string, int>* declared = nullptr);

// ── Closure set ─────────────────────────────────────────────────────────────

struct ClosureSet {
    FormulaId seed = kNoFormula;
    VarSet vocab;
    Lang language = Lang::LCD;
    std::vector<FormulaId> members;  // sorted by printed form

    bool contains(FormulaId id) const;
};

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filtration set for the decision procedure: smallest superset of {seed}
// closed under subformulas and single negation, containing
// D{X}D{X}{Y}, K{X}K{X}{Y}, D{X}K{X}{Y} for all X,Y over the vocabulary
// (U(X;Y) too in LUD mode), D{X}a for every predicate atom a of the
// subformula closure, and D{X}K{X}psi for every member K{X}psi.
// `vocab_override` widens/pins the vocabulary; default is vars(seed).
ClosureSet closure(FormulaStore& st, FormulaId seed, Lang language,
                   const VarSet* vocab_override = nullptr,
                   std::size_t member_budget = 200000);

}  // namespace topodep
