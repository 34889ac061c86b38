#pragma once

#include <map>
#include <string>
#include <vector>

#include "topodep/bitset.hpp"

namespace topodep {

// Finite point set; subsets are Bits over point indices.
struct FiniteSpace {
    std::vector<std::string> points;
    std::size_t size() const { return points.size(); }
};

// Family of open sets over a finite space. Always contains the empty set and
// the full set, and is closed under pairwise intersection and union (which on
// a finite space equals closure under arbitrary unions). `opens` is kept in a
// canonical sorted order.
struct OpenFamily {
    std::size_t n = 0;
    std::vector<Bits> opens;

    bool is_open(const Bits& s) const;
    bool valid() const;  // closure properties above
    bool operator==(const OpenFamily& o) const { return n == o.n && opens == o.opens; }
};

struct QuotientResult {
    std::vector<std::size_t> cls;       // point -> canonical class representative
    std::vector<Bits> classes;          // distinct indistinguishability classes
    FiniteSpace quotient_space;         // one point per class, named by representative
    OpenFamily quotient_opens;
    bool was_t0 = false;
};

OpenFamily generate_topology(const FiniteSpace& sp, const std::vector<Bits>& subbasis);

// (interior, closure) of A.
std::pair<Bits, Bits> interior_closure(const Bits& a, const OpenFamily& fam);

// d <= c iff every open containing d contains c.
Rel specialization_preorder(const OpenFamily& fam);

// All upward-closed sets of the preorder. Inverse of specialization_preorder
// on finite spaces.
OpenFamily alexandroff_opens(const Rel& pre);

QuotientResult quotient_space(const FiniteSpace& sp, const OpenFamily& fam);

}  // namespace topodep
