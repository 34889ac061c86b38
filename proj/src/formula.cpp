#include "topodep/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace topodep {

// ── VarSet ──────────────────────────────────────────────────────────────────

VarSet::VarSet(std::vector<std::string> names) : v_(std::move(names)) {
    std::sort(v_.begin(), v_.end());
    v_.erase(std::unique(v_.begin(), v_.end()), v_.end());
}

bool VarSet::contains(const std::string& x) const {
    return std::binary_search(v_.begin(), v_.end(), x);
}

bool VarSet::subset_of(const VarSet& o) const {
    return std::includes(o.v_.begin(), o.v_.end(), v_.begin(), v_.end());
}

VarSet VarSet::unite(const VarSet& o) const {
    std::vector<std::string> out;
    std::set_union(v_.begin(), v_.end(), o.v_.begin(), o.v_.end(), std::back_inserter(out));
    VarSet r;
    r.v_ = std::move(out);
    return r;
}

VarSet VarSet::intersect(const VarSet& o) const {
    std::vector<std::string> out;
    std::set_intersection(v_.begin(), v_.end(), o.v_.begin(), o.v_.end(),
                          std::back_inserter(out));
    VarSet r;
    r.v_ = std::move(out);
    return r;
}

std::string VarSet::key() const {
    std::string s;
    for (std::size_t i = 0; i < v_.size(); ++i) {
        if (i) s += ',';
        s += v_[i];
    }
    return s;
}

std::vector<VarSet> all_subsets(const VarSet& vocab) {
    const auto& names = vocab.names();
    if (names.size() > 20) throw BudgetError("vocabulary too large for subset enumeration");
    std::vector<VarSet> out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << names.size()); ++mask) {
        std::vector<std::string> members;
        for (std::size_t i = 0; i < names.size(); ++i)
            if (mask & (std::size_t{1} << i)) members.push_back(names[i]);
        out.emplace_back(std::move(members));
    }
    std::sort(out.begin(), out.end(), [](const VarSet& a, const VarSet& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a.names() < b.names();
    });
    return out;
}

// ── Store ───────────────────────────────────────────────────────────────────

const char* lang_name(Lang l) {
    switch (l) {
        case Lang::LFD: return "lfd";
        case Lang::LCD: return "lcd";
        case Lang::LUD: return "lud";
        case Lang::LUDX: return "lud-extended";
    }
    return "?";
}

Lang lang_parse(const std::string& s) {
    if (s == "lfd") return Lang::LFD;
    if (s == "lcd") return Lang::LCD;
    if (s == "lud") return Lang::LUD;
    if (s == "lud-extended") return Lang::LUDX;
    throw std::runtime_error("unknown language tag: " + s);
}

bool FNode::operator==(const FNode& o) const {
    return kind == o.kind && a == o.a && b == o.b && xs == o.xs && ys == o.ys &&
           pred == o.pred && args == o.args;
}

std::size_t FNodeHash::operator()(const FNode& n) const {
    std::size_t h = static_cast<std::size_t>(n.kind);
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    mix(n.a);
    mix(n.b);
    std::hash<std::string> hs;
    for (const auto& s : n.xs.names()) mix(hs(s));
    mix(0x51);
    for (const auto& s : n.ys.names()) mix(hs(s));
    mix(hs(n.pred));
    for (const auto& s : n.args) mix(hs(s));
    return h;
}

FormulaId FormulaStore::intern(FNode n) {
    auto it = intern_.find(n);
    if (it != intern_.end()) return it->second;
    FormulaId id = static_cast<FormulaId>(nodes_.size());
    nodes_.push_back(n);
    intern_.emplace(std::move(n), id);
    return id;
}

FormulaId FormulaStore::pred(const std::string& p, std::vector<std::string> args) {
    FNode n;
    n.kind = FKind::Pred;
    n.pred = p;
    n.args = std::move(args);
    return intern(std::move(n));
}
FormulaId FormulaStore::mk_not(FormulaId a) {
    FNode n;
    n.kind = FKind::Not;
    n.a = a;
    return intern(std::move(n));
}
FormulaId FormulaStore::mk_and(FormulaId a, FormulaId b) {
    FNode n;
    n.kind = FKind::And;
    n.a = a;
    n.b = b;
    return intern(std::move(n));
}
FormulaId FormulaStore::dep_mod(VarSet xs, FormulaId a) {
    FNode n;
    n.kind = FKind::DepMod;
    n.xs = std::move(xs);
    n.a = a;
    return intern(std::move(n));
}
FormulaId FormulaStore::know_mod(VarSet xs, FormulaId a) {
    FNode n;
    n.kind = FKind::KnowMod;
    n.xs = std::move(xs);
    n.a = a;
    return intern(std::move(n));
}

static FNode set_atom(FKind k, VarSet xs, VarSet ys) {
    FNode n;
    n.kind = k;
    n.xs = std::move(xs);
    n.ys = std::move(ys);
    return n;
}
FormulaId FormulaStore::dep_atom(VarSet xs, VarSet ys) {
    return intern(set_atom(FKind::DepAtom, std::move(xs), std::move(ys)));
}
FormulaId FormulaStore::cont_atom(VarSet xs, VarSet ys) {
    return intern(set_atom(FKind::ContAtom, std::move(xs), std::move(ys)));
}
FormulaId FormulaStore::unif_atom(VarSet xs, VarSet ys) {
    return intern(set_atom(FKind::UnifAtom, std::move(xs), std::move(ys)));
}
FormulaId FormulaStore::point_atom(VarSet xs, VarSet ys) {
    return intern(set_atom(FKind::PointAtom, std::move(xs), std::move(ys)));
}
FormulaId FormulaStore::indep_atom(VarSet xs, VarSet ys) {
    return intern(set_atom(FKind::IndepAtom, std::move(xs), std::move(ys)));
}
FormulaId FormulaStore::topo_indep_atom(VarSet xs, VarSet ys) {
    return intern(set_atom(FKind::TopoIndepAtom, std::move(xs), std::move(ys)));
}

FormulaId FormulaStore::mk_or(FormulaId a, FormulaId b) {
    return mk_not(mk_and(mk_not(a), mk_not(b)));
}
FormulaId FormulaStore::mk_implies(FormulaId a, FormulaId b) {
    return mk_not(mk_and(a, mk_not(b)));
}

FormulaId FormulaStore::single_neg(FormulaId a) {
    if (node(a).kind == FKind::Not) return node(a).a;
    return mk_not(a);
}

static std::string vset_str(const VarSet& s) {
    return "{" + s.key() + "}";
}

std::string FormulaStore::print(FormulaId id) const {
    const FNode& n = node(id);
    switch (n.kind) {
        case FKind::Pred: {
            std::string s = n.pred + "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) {
                if (i) s += ",";
                s += n.args[i];
            }
            return s + ")";
        }
        case FKind::Not: return "~" + print(n.a);
        case FKind::And: return "(" + print(n.a) + " & " + print(n.b) + ")";
        case FKind::DepMod: return "D" + vset_str(n.xs) + print(n.a);
        case FKind::KnowMod: return "K" + vset_str(n.xs) + print(n.a);
        case FKind::DepAtom: return "D" + vset_str(n.xs) + vset_str(n.ys);
        case FKind::ContAtom: return "K" + vset_str(n.xs) + vset_str(n.ys);
        case FKind::UnifAtom: return "U(" + n.xs.key() + ";" + n.ys.key() + ")";
        case FKind::PointAtom: return "k" + vset_str(n.xs) + vset_str(n.ys);
        case FKind::IndepAtom: return "I" + vset_str(n.xs) + vset_str(n.ys);
        case FKind::TopoIndepAtom: return "Ig" + vset_str(n.xs) + vset_str(n.ys);
    }
    return "?";
}

Lang FormulaStore::language(FormulaId id) const {
    const FNode& n = node(id);
    Lang l = Lang::LFD;
    auto up = [&l](Lang m) { if (static_cast<int>(m) > static_cast<int>(l)) l = m; };
    switch (n.kind) {
        case FKind::Pred: break;
        case FKind::Not: up(language(n.a)); break;
        case FKind::And: up(language(n.a)); up(language(n.b)); break;
        case FKind::DepMod: up(language(n.a)); break;
        case FKind::KnowMod: up(Lang::LCD); up(language(n.a)); break;
        case FKind::DepAtom: break;
        case FKind::ContAtom: up(Lang::LCD); break;
        case FKind::UnifAtom: up(Lang::LUD); break;
        case FKind::PointAtom:
        case FKind::IndepAtom:
        case FKind::TopoIndepAtom: up(Lang::LUDX); break;
    }
    return l;
}

int FormulaStore::modal_depth(FormulaId id) const {
    const FNode& n = node(id);
    switch (n.kind) {
        case FKind::Not: return modal_depth(n.a);
        case FKind::And: return std::max(modal_depth(n.a), modal_depth(n.b));
        case FKind::DepMod:
        case FKind::KnowMod: return 1 + modal_depth(n.a);
        default: return 0;
    }
}

void FormulaStore::collect_vars(FormulaId id, std::set<std::string>& out) const {
    const FNode& n = node(id);
    for (const auto& x : n.xs.names()) out.insert(x);
    for (const auto& y : n.ys.names()) out.insert(y);
    for (const auto& a : n.args) out.insert(a);
    if (n.a != kNoFormula) collect_vars(n.a, out);
    if (n.b != kNoFormula) collect_vars(n.b, out);
}

VarSet FormulaStore::vars(FormulaId id) const {
    std::set<std::string> s;
    collect_vars(id, s);
    return VarSet(std::vector<std::string>(s.begin(), s.end()));
}

std::vector<FormulaId> FormulaStore::subformulas(FormulaId id) const {
    std::vector<FormulaId> out;
    std::set<FormulaId> seen;
    std::function<void(FormulaId)> go = [&](FormulaId f) {
        if (!seen.insert(f).second) return;
        out.push_back(f);
        const FNode& n = node(f);
        if (n.a != kNoFormula) go(n.a);
        if (n.b != kNoFormula) go(n.b);
    };
    go(id);
    return out;
}

std::map<std::string, int> FormulaStore::predicates(FormulaId id) const {
    std::map<std::string, int> out;
    for (FormulaId f : subformulas(id)) {
        const FNode& n = node(f);
        if (n.kind == FKind::Pred) out[n.pred] = static_cast<int>(n.args.size());
    }
    return out;
}

// ── Parser ──────────────────────────────────────────────────────────────────

namespace {

const std::set<std::string> kReserved = {"D", "K", "U", "k", "I", "Ig",
                                         "A", "Know", "C", "KofV", "GD", "GK"};

class Parser {
public:
    Parser(FormulaStore& st, const std::string& text, const std::map<std::string, int>* declared)
        : st_(st), text_(text) {
        if (declared) arity_ = *declared;
    }

    FormulaId run() {
        FormulaId f = phi();
        skip_ws();
        if (pos_ != text_.size()) fail("trailing input");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(pos_, msg); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    bool ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    }

    std::string ident() {
        skip_ws();
        if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail("expected identifier");
        std::size_t start = pos_;
        while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    std::vector<std::string> vlist(char stop) {
        std::vector<std::string> out;
        if (peek() != stop) {
            out.push_back(ident());
            while (eat(',')) out.push_back(ident());
        }
        return out;
    }

    VarSet vset() {
        expect('{');
        auto names = vlist('}');
        expect('}');
        return VarSet(std::move(names));
    }

    // "(" vlist ";" vlist ")" for U/GD/GK.
    std::pair<VarSet, VarSet> semi_pair() {
        expect('(');
        auto xs = vlist(';');
        expect(';');
        auto ys = vlist(')');
        expect(')');
        return {VarSet(std::move(xs)), VarSet(std::move(ys))};
    }

    FormulaId pred_atom(const std::string& name) {
        expect('(');
        auto args = vlist(')');
        expect(')');
        auto it = arity_.find(name);
        if (it == arity_.end()) {
            arity_[name] = static_cast<int>(args.size());
        } else if (it->second != static_cast<int>(args.size())) {
            fail("arity mismatch for predicate " + name + ": declared " +
                 std::to_string(it->second) + ", used with " + std::to_string(args.size()));
        }
        return st_.pred(name, std::move(args));
    }

    FormulaId phi() {
        skip_ws();
        if (eat('~')) return st_.mk_not(phi());
        if (peek() == '(') {
            // Either a binary connective or redundant parentheses.
            expect('(');
            FormulaId lhs = phi();
            skip_ws();
            if (eat('&')) {
                FormulaId rhs = phi();
                expect(')');
                return st_.mk_and(lhs, rhs);
            }
            if (eat('|')) {
                FormulaId rhs = phi();
                expect(')');
                return st_.mk_or(lhs, rhs);
            }
            if (pos_ + 1 < text_.size() && text_[pos_] == '-' && text_[pos_ + 1] == '>') {
                pos_ += 2;
                FormulaId rhs = phi();
                expect(')');
                return st_.mk_implies(lhs, rhs);
            }
            expect(')');
            return lhs;
        }
        std::string id = ident();
        if (id == "D" || id == "K") {
            VarSet xs = vset();
            if (peek() == '{') {
                VarSet ys = vset();
                return id == "D" ? st_.dep_atom(xs, ys) : st_.cont_atom(xs, ys);
            }
            FormulaId body = phi();
            return id == "D" ? st_.dep_mod(xs, body) : st_.know_mod(xs, body);
        }
        if (id == "U") {
            auto [xs, ys] = semi_pair();
            return st_.unif_atom(xs, ys);
        }
        if (id == "k" || id == "I" || id == "Ig") {
            VarSet xs = vset();
            VarSet ys = vset();
            if (id == "k") return st_.point_atom(xs, ys);
            if (id == "I") return st_.indep_atom(xs, ys);
            return st_.topo_indep_atom(xs, ys);
        }
        // Abbreviations, expanded on the spot.
        if (id == "A") return st_.dep_mod(VarSet(), phi());
        if (id == "Know") return st_.know_mod(VarSet(), phi());
        if (id == "C") return st_.dep_atom(VarSet(), vset());
        if (id == "KofV") return st_.cont_atom(VarSet(), vset());
        if (id == "GD") {
            auto [xs, ys] = semi_pair();
            return st_.dep_mod(VarSet(), st_.dep_atom(xs, ys));
        }
        if (id == "GK") {
            auto [xs, ys] = semi_pair();
            return st_.know_mod(VarSet(), st_.cont_atom(xs, ys));
        }
        if (peek() == '(') return pred_atom(id);
        fail("unknown construct '" + id + "'");
    }

    FormulaStore& st_;
    const std::string& text_;
    std::size_t pos_ = 0;
    std::map<std::string, int> arity_;
};

}  // namespace

FormulaId parse_formula(FormulaStore& st, const std::string& text,
                        const std::map<std::string, int>* declared) {
    return Parser(st, text, declared).run();
}

// ── Closure ─────────────────────────────────────────────────────────────────

bool ClosureSet::contains(FormulaId id) const {
    return std::find(members.begin(), members.end(), id) != members.end();
}

ClosureSet closure(FormulaStore& st, FormulaId seed, Lang language,
                   const VarSet* vocab_override, std::size_t member_budget) {
    ClosureSet cs;
    cs.seed = seed;
    cs.vocab = vocab_override ? *vocab_override : st.vars(seed);
    cs.language = language;

    std::set<FormulaId> mem;
    std::vector<FormulaId> work;
    auto add = [&](FormulaId f) {
        if (mem.insert(f).second) {
            if (mem.size() > member_budget) throw BudgetError("closure set exceeds member budget");
            work.push_back(f);
        }
    };

    add(seed);
    const auto subsets = all_subsets(cs.vocab);
    for (const VarSet& X : subsets)
        for (const VarSet& Y : subsets) {
            add(st.dep_mod(X, st.dep_atom(X, Y)));
            add(st.know_mod(X, st.cont_atom(X, Y)));
            add(st.dep_mod(X, st.cont_atom(X, Y)));
            if (language == Lang::LUD) add(st.unif_atom(X, Y));
        }

    while (!work.empty()) {
        FormulaId f = work.back();
        work.pop_back();
        const FNode n = st.node(f);  // interning below may relocate nodes
        if (n.a != kNoFormula) add(n.a);
        if (n.b != kNoFormula) add(n.b);
        add(st.single_neg(f));
        if (n.kind == FKind::Pred)
            for (const VarSet& X : subsets) add(st.dep_mod(X, f));
        if (n.kind == FKind::KnowMod) add(st.dep_mod(n.xs, f));
    }

    cs.members.assign(mem.begin(), mem.end());
    std::sort(cs.members.begin(), cs.members.end(), [&st](FormulaId a, FormulaId b) {
        return st.print(a) < st.print(b);
    });
    return cs;
}

}  // namespace topodep
