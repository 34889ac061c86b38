#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topodep/bitset.hpp"
#include "topodep/formula.hpp"
#include "topodep/model.hpp"
#include "topodep/rational.hpp"

namespace topodep {

// Step labels carry a variable set and a rational index in [0,1). Zero-index
// steps must respect the source equality, positive ones the source preorder.
struct BetaSet {
    std::vector<Rat> values;  // sorted ascending; must contain 0 plus at least
                              // three distinct positive values below 1
    void validate() const;
    static BetaSet standard();  // {0, 1/8, 1/4, 1/2}
};

struct TreeNode {
    int parent = -1;  // -1 only at the root
    int xset = -1;    // index into subsets (step label)
    int beta = -1;    // index into betas
    int last = 0;     // source state index
    int len = 0;
};

// Bounded-depth unravelling of a preorder model into a history tree, with the
// induced equality/preorder relations per variable set. A pseudo-metric layer
// of exact rational distances can be added for sources carrying U valuations.
struct UnravelledTree {
    PreorderModel source;
    int root_state = 0;
    int depth = 0;
    std::vector<Rat> betas;
    std::vector<VarSet> subsets;   // all subsets of the source vocabulary
    std::vector<TreeNode> nodes;   // node 0 is the root; parents precede children

    // Path-based relations, materialized per subset.
    std::vector<Rel> eq_rel;   // [subset index]
    std::vector<Rel> leq_rel;

    // Per-node data.
    std::vector<Rat> delta;                  // density
    std::vector<std::vector<int>> xroot;     // [subset][node] -> node id of the X-root

    // Pseudo-metric layer (after pseudo_metrize): per basic variable a matrix
    // of codes into `dvalues` (sorted ascending; last entry is 1).
    bool metrized = false;
    std::vector<Rat> dvalues;
    std::map<std::string, std::vector<std::uint8_t>> dist;

    std::size_t n() const { return nodes.size(); }
    int lca(int a, int b) const;
    std::vector<int> interval(int a, int b) const;  // nodes on the non-redundant path
    int tree_distance(int a, int b) const;

    std::uint8_t dist_code(const VarSet& X, int a, int b) const;  // Chebyshev over codes
    Rat dist_value(const VarSet& X, int a, int b) const;

    std::size_t subset_index(const VarSet& X) const;
    std::string node_path(int id) const;  // printable history
};

// Number of histories of length <= depth, computed before materialization.
std::size_t unravel_node_count(const PreorderModel& m, const std::string& root_state, int depth,
                               const BetaSet& betas);

UnravelledTree unravel(const PreorderModel& m, const std::string& root_state, int depth,
                       const BetaSet& betas, std::size_t node_budget = 200000);

void pseudo_metrize(UnravelledTree& t);

struct HistoryMetrics {
    std::map<std::string, int> xroot;      // subset key -> node id of the X-root of the first node
    Rat density_first;
    Rat density_second;
    std::map<std::string, bool> close;     // subset key -> the two nodes are X-close
    std::vector<int> interval;
    int tree_distance = 0;
};

// Per-history quantities for a pair of nodes; closeness requires the metric layer.
HistoryMetrics history_metrics(const UnravelledTree& t, int a, int b);

struct VerificationItem {
    std::string claim;    // which battery produced the finding
    std::string item;
    std::string witness;
};

struct VerificationReport {
    std::vector<VerificationItem> violations;
    std::size_t checks_run = 0;
    bool ok() const { return violations.empty(); }
};

// Full battery over the truncated tree: tree axioms, the relation laws on
// histories, the standard-model view, density laws, the ultra-pseudo-metric
// laws, projection ("last") morphism clauses at interior nodes, and the
// finite uniformity transfer inequalities.
VerificationReport verify_representation(const UnravelledTree& t);

struct ProbeResult {
    bool tree_truth = false;
    bool source_truth = false;
    bool agree = false;
};

// Compares bounded tree evaluation at a node with source evaluation at its
// last state. Quantifiers on the tree side range over witnesses one level
// deeper, matching the back-clause constructions; the budget therefore counts
// modalities plus one level per dependence atom (two for the continuity
// atom). Out-of-budget probes are refused.
int probe_depth(const FormulaStore& st, FormulaId f);
ProbeResult modal_equivalence_probe(const FormulaStore& st, const UnravelledTree& t, int node,
                                    FormulaId f);

// JSON export: nodes as label paths, relations as pair lists, distances as
// rational strings.
std::string dump_tree_json(const UnravelledTree& t);
std::string dump_report_json(const VerificationReport& r);

}  // namespace topodep
