#include "topodep/finitetopo.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace topodep {

bool OpenFamily::is_open(const Bits& s) const {
    return std::find(opens.begin(), opens.end(), s) != opens.end();
}

bool OpenFamily::valid() const {
    Bits empty(n), full(n);
    full.set_all();
    if (!is_open(empty) || !is_open(full)) return false;
    for (const Bits& a : opens)
        for (const Bits& b : opens) {
            if (!is_open(a & b)) return false;
            if (!is_open(a | b)) return false;
        }
    return true;
}

static OpenFamily canonicalize(std::size_t n, std::set<Bits> sets) {
    OpenFamily fam;
    fam.n = n;
    fam.opens.assign(sets.begin(), sets.end());
    std::sort(fam.opens.begin(), fam.opens.end());
    return fam;
}

OpenFamily generate_topology(const FiniteSpace& sp, const std::vector<Bits>& subbasis) {
    std::size_t n = sp.size();
    Bits full(n);
    full.set_all();
    for (const Bits& s : subbasis) {
        if (s.size() != n) throw std::runtime_error("subbasis member has wrong universe size");
        if (!s.subset_of(full)) throw std::runtime_error("subbasis member not a subset of the space");
    }
    std::set<Bits> sets;
    sets.insert(Bits(n));
    sets.insert(full);
    for (const Bits& s : subbasis) sets.insert(s);
    // Fixpoint under pairwise intersections and unions.
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Bits> cur(sets.begin(), sets.end());
        for (std::size_t i = 0; i < cur.size(); ++i)
            for (std::size_t j = i + 1; j < cur.size(); ++j) {
                if (sets.insert(cur[i] & cur[j]).second) changed = true;
                if (sets.insert(cur[i] | cur[j]).second) changed = true;
            }
    }
    return canonicalize(n, std::move(sets));
}

std::pair<Bits, Bits> interior_closure(const Bits& a, const OpenFamily& fam) {
    if (a.size() != fam.n) throw std::runtime_error("set has wrong universe size");
    Bits interior(fam.n);
    for (const Bits& o : fam.opens)
        if (o.subset_of(a)) interior |= o;
    Bits complement = ~a;
    Bits intc(fam.n);
    for (const Bits& o : fam.opens)
        if (o.subset_of(complement)) intc |= o;
    return {interior, ~intc};
}

Rel specialization_preorder(const OpenFamily& fam) {
    std::size_t n = fam.n;
    Rel r(n);
    for (std::size_t d = 0; d < n; ++d)
        for (std::size_t c = 0; c < n; ++c) {
            bool le = true;
            for (const Bits& o : fam.opens)
                if (o.test(d) && !o.test(c)) { le = false; break; }
            if (le) r.add(d, c);
        }
    return r;
}

OpenFamily alexandroff_opens(const Rel& pre) {
    std::size_t n = pre.size();
    if (n > 20) throw std::runtime_error("space too large for upset enumeration");
    std::set<Bits> sets;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        Bits s(n);
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::size_t{1} << i)) s.set(i);
        bool up = true;
        for (std::size_t i = 0; i < n && up; ++i)
            if (s.test(i) && !pre.row[i].subset_of(s)) up = false;
        if (up) sets.insert(s);
    }
    return canonicalize(n, std::move(sets));
}

QuotientResult quotient_space(const FiniteSpace& sp, const OpenFamily& fam) {
    std::size_t n = sp.size();
    Rel pre = specialization_preorder(fam);
    QuotientResult q;
    q.cls.assign(n, 0);
    // Indistinguishability: same neighborhood filter, i.e. i<=j and j<=i.
    std::vector<bool> done(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        Bits c(n);
        for (std::size_t j = 0; j < n; ++j)
            if (pre.at(i, j) && pre.at(j, i)) {
                c.set(j);
                q.cls[j] = i;  // least index in order is the representative
                done[j] = true;
            }
        q.classes.push_back(c);
    }
    q.was_t0 = q.classes.size() == n;

    for (const Bits& c : q.classes)
        q.quotient_space.points.push_back(sp.points[c.next(0)]);

    std::set<Bits> qopens;
    for (const Bits& o : fam.opens) {
        Bits img(q.classes.size());
        for (std::size_t k = 0; k < q.classes.size(); ++k) {
            Bits inter = q.classes[k] & o;
            if (inter.any()) img.set(k);
        }
        qopens.insert(img);
    }
    q.quotient_opens = canonicalize(q.classes.size(), std::move(qopens));
    return q;
}

}  // namespace topodep
