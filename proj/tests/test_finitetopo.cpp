#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "topodep/finitetopo.hpp"
#include "topodep/model.hpp"

using namespace topodep;

namespace {

Bits mk(std::size_t n, std::initializer_list<std::size_t> idx) {
    Bits b(n);
    for (auto i : idx) b.set(i);
    return b;
}

FiniteSpace space(std::size_t n) {
    FiniteSpace sp;
    for (std::size_t i = 0; i < n; ++i) sp.points.push_back(std::string(1, char('a' + i)));
    return sp;
}

// Exhaustive closure oracle over all subsets (n <= 5).
std::set<Bits> closure_oracle(std::size_t n, const std::vector<Bits>& subbasis) {
    std::set<Bits> sets;
    Bits full(n);
    full.set_all();
    sets.insert(Bits(n));
    sets.insert(full);
    for (const auto& s : subbasis) sets.insert(s);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<Bits> cur(sets.begin(), sets.end());
        for (const auto& a : cur)
            for (const auto& b : cur) {
                if (sets.insert(a & b).second) changed = true;
                if (sets.insert(a | b).second) changed = true;
            }
    }
    return sets;
}

Rel chain2() {  // s <= t on two points
    Rel r = Rel::identity(2);
    r.add(0, 1);
    return r;
}

}  // namespace

TEST_CASE("generate_topology matches the exhaustive oracle") {
    auto sp = space(3);
    std::vector<Bits> sub = {mk(3, {0}), mk(3, {0, 1})};
    OpenFamily fam = generate_topology(sp, sub);
    auto oracle = closure_oracle(3, sub);
    CHECK(fam.opens.size() == oracle.size());
    for (const auto& o : fam.opens) CHECK(oracle.count(o) == 1);
    CHECK(fam.opens.size() == 4);  // {}, {a}, {ab}, {abc}
    CHECK(fam.valid());
}

TEST_CASE("empty subbasis yields the indiscrete topology") {
    auto sp = space(3);
    OpenFamily fam = generate_topology(sp, {});
    CHECK(fam.opens.size() == 2);
    CHECK(fam.valid());
}

TEST_CASE("singleton subbasis yields the discrete topology") {
    auto sp = space(3);
    std::vector<Bits> sub = {mk(3, {0}), mk(3, {1}), mk(3, {2})};
    OpenFamily fam = generate_topology(sp, sub);
    CHECK(fam.opens.size() == 8);
}

TEST_CASE("generate_topology rejects foreign subsets") {
    auto sp = space(2);
    CHECK_THROWS(generate_topology(sp, {mk(3, {2})}));
}

TEST_CASE("random subbases always satisfy the open-family conditions") {
    Rng rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 1 + rng.below(4);
        std::vector<Bits> sub;
        for (std::size_t k = 0; k < 1 + rng.below(3); ++k) {
            Bits b(n);
            for (std::size_t i = 0; i < n; ++i)
                if (rng.below(2)) b.set(i);
            sub.push_back(b);
        }
        OpenFamily fam = generate_topology(space(n), sub);
        CHECK(fam.valid());
    }
}

TEST_CASE("interior and closure") {
    auto sp = space(2);
    // two-point space with opens {}, {a}, {a,b}
    OpenFamily fam = generate_topology(sp, {mk(2, {0})});
    SUBCASE("whole space is open and closed") {
        auto [i, c] = interior_closure(mk(2, {0, 1}), fam);
        CHECK(i == mk(2, {0, 1}));
        CHECK(c == mk(2, {0, 1}));
    }
    SUBCASE("empty set is open and closed") {
        auto [i, c] = interior_closure(Bits(2), fam);
        CHECK(i == Bits(2));
        CHECK(c == Bits(2));
    }
    SUBCASE("the closed point") {
        auto [i, c] = interior_closure(mk(2, {1}), fam);
        CHECK(i == Bits(2));     // {b} contains no nonempty open
        CHECK(c == mk(2, {1}));  // complement {a} is open
    }
    SUBCASE("the open point closes over everything") {
        auto [i, c] = interior_closure(mk(2, {0}), fam);
        CHECK(i == mk(2, {0}));
        CHECK(c == mk(2, {0, 1}));
    }
}

TEST_CASE("interior is idempotent, monotone and deflationary") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = 1 + rng.below(4);
        std::vector<Bits> sub;
        for (std::size_t k = 0; k < 2; ++k) {
            Bits b(n);
            for (std::size_t i = 0; i < n; ++i)
                if (rng.below(2)) b.set(i);
            sub.push_back(b);
        }
        OpenFamily fam = generate_topology(space(n), sub);
        Bits a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.below(2)) a.set(i);
            if (rng.below(2)) b.set(i);
        }
        b |= a;  // a subset of b
        auto [ia, ca] = interior_closure(a, fam);
        auto [ib, cb] = interior_closure(b, fam);
        (void)cb;
        CHECK(ia.subset_of(a));
        CHECK(a.subset_of(ca));
        CHECK(ia.subset_of(ib));
        auto inner = interior_closure(ia, fam);
        CHECK(inner.first == ia);
        // closure is the De Morgan dual of interior
        auto comp = interior_closure(~a, fam);
        CHECK(comp.second == ~ia);
    }
}

TEST_CASE("specialization preorder") {
    SUBCASE("discrete topology gives identity") {
        auto fam = generate_topology(space(3), {mk(3, {0}), mk(3, {1}), mk(3, {2})});
        CHECK(specialization_preorder(fam) == Rel::identity(3));
    }
    SUBCASE("two-point chain") {
        auto fam = generate_topology(space(2), {mk(2, {0})});
        Rel r = specialization_preorder(fam);
        CHECK(r.at(1, 0));   // b's only open is the full space
        CHECK(!r.at(0, 1));
    }
    SUBCASE("indiscrete topology gives the total relation") {
        auto fam = generate_topology(space(2), {});
        CHECK(specialization_preorder(fam) == Rel::total(2));
    }
}

TEST_CASE("alexandroff opens invert the specialization preorder") {
    SUBCASE("identity preorder gives the powerset") {
        OpenFamily fam = alexandroff_opens(Rel::identity(3));
        CHECK(fam.opens.size() == 8);
    }
    SUBCASE("two-point chain gives three opens") {
        OpenFamily fam = alexandroff_opens(chain2());
        CHECK(fam.opens.size() == 3);
        CHECK(fam.is_open(mk(2, {1})));
        CHECK(!fam.is_open(mk(2, {0})));
    }
    SUBCASE("total preorder gives the indiscrete topology") {
        OpenFamily fam = alexandroff_opens(Rel::total(2));
        CHECK(fam.opens.size() == 2);
    }
    SUBCASE("inverse pair on random preorders") {
        Rng rng(3);
        for (int trial = 0; trial < 30; ++trial) {
            std::size_t n = 1 + rng.below(4);
            Rel r = Rel::identity(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (rng.below(4) == 0) r.add(i, j);
            r.close_reflexive();
            r.close_transitive();
            OpenFamily fam = alexandroff_opens(r);
            CHECK(fam.valid());
            CHECK(specialization_preorder(fam) == r);
            Rel back = specialization_preorder(fam);
            CHECK(alexandroff_opens(back) == fam);
        }
    }
}

TEST_CASE("quotients") {
    SUBCASE("discrete input is already separated") {
        auto fam = generate_topology(space(2), {mk(2, {0}), mk(2, {1})});
        auto q = quotient_space(space(2), fam);
        CHECK(q.was_t0);
        CHECK(q.classes.size() == 2);
    }
    SUBCASE("indiscrete input collapses to a point") {
        auto fam = generate_topology(space(2), {});
        auto q = quotient_space(space(2), fam);
        CHECK(!q.was_t0);
        CHECK(q.classes.size() == 1);
        CHECK(q.quotient_opens.opens.size() == 2);
    }
    SUBCASE("partial indistinguishability") {
        // opens {}, {a,b}, {a,b,c}: a and b indistinguishable
        auto fam = generate_topology(space(3), {mk(3, {0, 1})});
        auto q = quotient_space(space(3), fam);
        CHECK(q.classes.size() == 2);
        CHECK(q.cls[0] == q.cls[1]);
        CHECK(q.cls[2] != q.cls[0]);
        CHECK(q.quotient_opens.opens.size() == 3);  // two-point chain shape
    }
    SUBCASE("quotient output is always separated") {
        Rng rng(17);
        for (int trial = 0; trial < 30; ++trial) {
            std::size_t n = 1 + rng.below(4);
            std::vector<Bits> sub;
            for (std::size_t k = 0; k < 2; ++k) {
                Bits b(n);
                for (std::size_t i = 0; i < n; ++i)
                    if (rng.below(2)) b.set(i);
                sub.push_back(b);
            }
            auto fam = generate_topology(space(n), sub);
            auto q = quotient_space(space(n), fam);
            auto q2 = quotient_space(q.quotient_space, q.quotient_opens);
            CHECK(q2.was_t0);
        }
    }
}
