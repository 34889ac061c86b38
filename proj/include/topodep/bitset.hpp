#pragma once

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace topodep {

// Fixed-size bitset used for state sets and relation rows.
class Bits {
public:
    Bits() = default;
    explicit Bits(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    std::size_t size() const { return n_; }

    void set(std::size_t i) { w_[i >> 6] |= (std::uint64_t{1} << (i & 63)); }
    void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    bool test(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

    void set_all() {
        for (auto& w : w_) w = ~std::uint64_t{0};
        trim();
    }
    void clear() { for (auto& w : w_) w = 0; }

    bool any() const {
        for (auto w : w_) if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : w_) c += static_cast<std::size_t>(__builtin_popcountll(w));
        return c;
    }

    bool subset_of(const Bits& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    Bits& operator&=(const Bits& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    Bits& operator|=(const Bits& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    Bits operator&(const Bits& o) const { Bits r = *this; r &= o; return r; }
    Bits operator|(const Bits& o) const { Bits r = *this; r |= o; return r; }
    Bits operator~() const {
        Bits r = *this;
        for (auto& w : r.w_) w = ~w;
        r.trim();
        return r;
    }

    bool operator==(const Bits& o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const Bits& o) const { return !(*this == o); }
    bool operator<(const Bits& o) const {  // deterministic order for canonical listings
        if (n_ != o.n_) return n_ < o.n_;
        for (std::size_t i = w_.size(); i-- > 0;)
            if (w_[i] != o.w_[i]) return w_[i] < o.w_[i];
        return false;
    }

    // Index of first set bit at or after `from`; size() when none.
    std::size_t next(std::size_t from) const {
        for (std::size_t i = from; i < n_; ++i)
            if (test(i)) return i;
        return n_;
    }

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t i = next(0); i < n_; i = next(i + 1)) f(i);
    }

private:
    void trim() {
        if (n_ & 63) w_.back() &= (std::uint64_t{1} << (n_ & 63)) - 1;
    }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

// Binary relation on {0..n-1}, one bitset row per element.
struct Rel {
    std::vector<Bits> row;

    Rel() = default;
    explicit Rel(std::size_t n) : row(n, Bits(n)) {}

    std::size_t size() const { return row.size(); }
    bool at(std::size_t i, std::size_t j) const { return row[i].test(j); }
    void add(std::size_t i, std::size_t j) { row[i].set(j); }

    bool operator==(const Rel& o) const { return row == o.row; }

    static Rel identity(std::size_t n) {
        Rel r(n);
        for (std::size_t i = 0; i < n; ++i) r.add(i, i);
        return r;
    }
    static Rel total(std::size_t n) {
        Rel r(n);
        for (auto& b : r.row) b.set_all();
        return r;
    }

    Rel intersect(const Rel& o) const {
        Rel r = *this;
        for (std::size_t i = 0; i < row.size(); ++i) r.row[i] &= o.row[i];
        return r;
    }

    Rel converse() const {
        Rel r(size());
        for (std::size_t i = 0; i < size(); ++i)
            row[i].for_each([&](std::size_t j) { r.add(j, i); });
        return r;
    }

    bool reflexive() const {
        for (std::size_t i = 0; i < size(); ++i)
            if (!at(i, i)) return false;
        return true;
    }
    bool symmetric() const {
        for (std::size_t i = 0; i < size(); ++i) {
            bool bad = false;
            row[i].for_each([&](std::size_t j) { if (!at(j, i)) bad = true; });
            if (bad) return false;
        }
        return true;
    }
    bool transitive() const {
        for (std::size_t i = 0; i < size(); ++i) {
            bool bad = false;
            row[i].for_each([&](std::size_t j) {
                if (!row[j].subset_of(row[i])) bad = true;
            });
            if (bad) return false;
        }
        return true;
    }

    void close_reflexive() {
        for (std::size_t i = 0; i < size(); ++i) add(i, i);
    }
    void close_symmetric() {
        Rel c = converse();
        for (std::size_t i = 0; i < size(); ++i) row[i] |= c.row[i];
    }
    void close_transitive() {
        // Warshall with bitset rows.
        for (std::size_t k = 0; k < size(); ++k)
            for (std::size_t i = 0; i < size(); ++i)
                if (at(i, k)) row[i] |= row[k];
    }
};

}  // namespace topodep
