#pragma once

#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qwreath/rational.hpp"

namespace qwreath {

class GroupSpec;
using GroupSpecPtr = std::shared_ptr<const GroupSpec>;

// Canonical normal form of a group element. The payload depends on the
// owning spec: Finite stores an element index, Cyclic an exponent in [0,s),
// Integer an exponent, Free a freely reduced word, Amalgam an alternating
// list of coset representatives plus a tail exponent of the amalgam
// generator.
class GroupElement {
public:
    long long n = 0;
    std::vector<std::pair<int, long long>> word;        // Free: (generator, exponent)
    std::vector<std::pair<int, GroupElement>> letters;  // Amalgam: (side, element)

    int cmp(const GroupElement& o) const {
        if (n != o.n) return n < o.n ? -1 : 1;
        if (word != o.word) return word < o.word ? -1 : 1;
        if (letters.size() != o.letters.size()) return letters.size() < o.letters.size() ? -1 : 1;
        for (std::size_t i = 0; i < letters.size(); ++i) {
            if (letters[i].first != o.letters[i].first)
                return letters[i].first < o.letters[i].first ? -1 : 1;
            int c = letters[i].second.cmp(o.letters[i].second);
            if (c) return c;
        }
        return 0;
    }
    bool operator==(const GroupElement& o) const { return cmp(o) == 0; }
    bool operator<(const GroupElement& o) const { return cmp(o) < 0; }
};

// raw words are lists of (generator index, exponent)
using RawWord = std::vector<std::pair<int, long long>>;

class GroupSpec : public std::enable_shared_from_this<GroupSpec> {
public:
    enum class Kind { Finite, Cyclic, Integer, Free, Amalgam };

    static GroupSpecPtr finite(std::vector<std::vector<int>> table, int identity);
    static GroupSpecPtr cyclic(long long s) {
        if (s < 1) throw error("cyclic(s): s must be >= 1");
        auto g = std::shared_ptr<GroupSpec>(new GroupSpec(Kind::Cyclic));
        g->s_ = s;
        return g;
    }
    static GroupSpecPtr integers() { return std::shared_ptr<GroupSpec>(new GroupSpec(Kind::Integer)); }
    static GroupSpecPtr free_group(int rank) {
        if (rank < 1) throw error("free(m): rank must be >= 1");
        auto g = std::shared_ptr<GroupSpec>(new GroupSpec(Kind::Free));
        g->rank_ = rank;
        return g;
    }
    static GroupSpecPtr amalgam(GroupSpecPtr left, GroupSpecPtr right, long long k,
                                const GroupElement& img_left, const GroupElement& img_right);

    Kind kind() const { return kind_; }
    long long cyclic_order() const { return s_; }
    int free_rank() const { return rank_; }
    const GroupSpecPtr& left() const { return left_; }
    const GroupSpecPtr& right() const { return right_; }
    long long amalgam_order() const { return amalgam_k_; }
    const GroupElement& amalgam_image(int side) const { return side == 0 ? img_left_ : img_right_; }
    std::size_t finite_order() const { return table_.size(); }

    int num_generators() const {
        switch (kind_) {
            case Kind::Finite: return int(table_.size());
            case Kind::Cyclic: return 1;
            case Kind::Integer: return 1;
            case Kind::Free: return rank_;
            case Kind::Amalgam: return left_->num_generators() + right_->num_generators();
        }
        return 0;
    }

    std::string generator_name(int g) const {
        if (kind_ == Kind::Finite) return "g" + std::to_string(g);
        if (g < 0 || g >= num_generators()) throw error("unknown generator");
        return std::string(1, char('a' + g));
    }

    std::optional<int> generator_by_name(const std::string& name) const {
        if (kind_ == Kind::Finite) {
            if (name.size() >= 2 && name[0] == 'g') {
                int idx = std::atoi(name.c_str() + 1);
                if (idx >= 0 && idx < int(table_.size())) return idx;
            }
            return std::nullopt;
        }
        if (name.size() == 1 && name[0] >= 'a' && name[0] < char('a' + num_generators()))
            return name[0] - 'a';
        return std::nullopt;
    }

    GroupElement identity() const {
        GroupElement e;
        if (kind_ == Kind::Finite) e.n = identity_;
        return e;
    }

    bool is_identity(const GroupElement& g) const { return g == identity(); }

    GroupElement generator(int i) const {
        if (i < 0 || i >= num_generators()) throw error("unknown generator");
        GroupElement e = identity();
        switch (kind_) {
            case Kind::Finite: e.n = i; break;
            case Kind::Cyclic: e.n = (1 % s_); break;
            case Kind::Integer: e.n = 1; break;
            case Kind::Free: e.word = {{i, 1}}; break;
            case Kind::Amalgam: {
                int nl = left_->num_generators();
                if (i < nl) return embed(0, left_->generator(i));
                return embed(1, right_->generator(i - nl));
            }
        }
        return e;
    }

    GroupElement multiply(const GroupElement& a, const GroupElement& b) const {
        switch (kind_) {
            case Kind::Finite: return from_index(table_[a.n][b.n]);
            case Kind::Cyclic: return from_exponent(a.n + b.n);
            case Kind::Integer: return from_exponent(a.n + b.n);
            case Kind::Free: {
                GroupElement r = a;
                for (const auto& l : b.word) push_free(r.word, l.first, l.second);
                return r;
            }
            case Kind::Amalgam: {
                GroupElement r = a;
                for (const auto& [side, g] : b.letters) amalgam_mul_letter(r, side, g);
                amalgam_mul_tail(r, b.n);
                return r;
            }
        }
        throw error("unreachable");
    }

    GroupElement inverse(const GroupElement& a) const {
        switch (kind_) {
            case Kind::Finite: {
                for (std::size_t x = 0; x < table_.size(); ++x)
                    if (table_[a.n][x] == identity_) return from_index(int(x));
                throw error("finite group: missing inverse");
            }
            case Kind::Cyclic: return from_exponent(-a.n);
            case Kind::Integer: return from_exponent(-a.n);
            case Kind::Free: {
                GroupElement r;
                for (auto it = a.word.rbegin(); it != a.word.rend(); ++it)
                    push_free(r.word, it->first, -it->second);
                return r;
            }
            case Kind::Amalgam: {
                GroupElement r = identity();
                amalgam_mul_tail(r, -a.n);
                for (auto it = a.letters.rbegin(); it != a.letters.rend(); ++it)
                    amalgam_mul_letter(r, it->first, side_spec(it->first)->inverse(it->second));
                return r;
            }
        }
        throw error("unreachable");
    }

    GroupElement power(const GroupElement& a, long long e) const {
        GroupElement base = e < 0 ? inverse(a) : a;
        long long m = e < 0 ? -e : e;
        GroupElement r = identity();
        while (m) {
            if (m & 1) r = multiply(r, base);
            base = multiply(base, base);
            m >>= 1;
        }
        return r;
    }

    GroupElement normalize(const RawWord& raw) const {
        GroupElement r = identity();
        for (const auto& [g, e] : raw) {
            if (g < 0 || g >= num_generators()) throw error("normalize: unknown generator");
            r = multiply(r, power(generator(g), e));
        }
        return r;
    }

    // finite order of g, or nullopt when g has infinite order (searched up to
    // a desk-scale cap)
    std::optional<long long> element_order(const GroupElement& g, long long cap = 4096) const {
        GroupElement h = g;
        for (long long o = 1; o <= cap; ++o) {
            if (is_identity(h)) return o;
            h = multiply(h, g);
            if (kind_ == Kind::Integer && h.n != 0 && (h.n > 0) == (g.n > 0) && o > 2) return std::nullopt;
            if (kind_ == Kind::Free && h.word.size() > g.word.size() * 2 + 2) return std::nullopt;
        }
        return std::nullopt;
    }

    // embed an element of the left (side 0) or right (side 1) factor
    GroupElement embed(int side, const GroupElement& g) const {
        if (kind_ != Kind::Amalgam) throw error("embed: not an amalgam");
        GroupElement r = identity();
        amalgam_mul_letter(r, side, g);
        return r;
    }

    std::string element_str(const GroupElement& g) const {
        if (is_identity(g)) return "e";
        std::ostringstream os;
        switch (kind_) {
            case Kind::Finite: os << "g" << g.n; break;
            case Kind::Cyclic:
            case Kind::Integer:
                os << "a";
                if (g.n != 1) os << "^" << g.n;
                break;
            case Kind::Free: {
                bool first = true;
                for (const auto& [gen, e] : g.word) {
                    if (!first) os << "*";
                    first = false;
                    os << char('a' + gen);
                    if (e != 1) os << "^" << e;
                }
                break;
            }
            case Kind::Amalgam: {
                bool first = true;
                int nl = left_->num_generators();
                for (const auto& [side, el] : g.letters) {
                    if (!first) os << "*";
                    first = false;
                    std::string s = side_spec(side)->element_str(el);
                    if (side == 1) {  // shift generator names of the right factor
                        for (auto& ch : s)
                            if (ch >= 'a' && ch <= 'z') ch = char(ch + nl);
                    }
                    os << s;
                }
                if (g.n != 0) {
                    if (!first) os << "*";
                    std::string s = left_->element_str(left_->power(img_left_, g.n));
                    os << s;
                }
                break;
            }
        }
        return os.str();
    }

private:
    explicit GroupSpec(Kind k) : kind_(k) {}

    GroupElement from_index(int idx) const {
        GroupElement e;
        e.n = idx;
        return e;
    }
    GroupElement from_exponent(long long n) const {
        GroupElement e;
        e.n = (kind_ == Kind::Cyclic) ? ((n % s_) + s_) % s_ : n;
        return e;
    }

    static void push_free(std::vector<std::pair<int, long long>>& w, int gen, long long e) {
        if (e == 0) return;
        if (!w.empty() && w.back().first == gen) {
            w.back().second += e;
            if (w.back().second == 0) w.pop_back();
        } else {
            w.push_back({gen, e});
        }
    }

    const GroupSpecPtr& side_spec(int side) const { return side == 0 ? left_ : right_; }

    // tail exponent t of the amalgam generator, seen inside the side factor
    GroupElement tail_in_side(int side, long long t) const {
        return side_spec(side)->power(amalgam_image(side), t);
    }

    // decompose g in the side factor as (coset representative, tail exponent):
    // the representative is the minimal element of { g * x^e } under the
    // factor's canonical order
    std::pair<GroupElement, long long> coset_decompose(int side, const GroupElement& g) const {
        const auto& spec = side_spec(side);
        GroupElement best = g;
        long long best_e = 0;
        for (long long e = 1; e < amalgam_k_; ++e) {
            GroupElement cand = spec->multiply(g, tail_in_side(side, e));
            if (cand < best) {
                best = cand;
                best_e = e;
            }
        }
        // g = best * x^{-best_e} => tail = -best_e
        return {best, ((-best_e) % amalgam_k_ + amalgam_k_) % amalgam_k_};
    }

    void amalgam_mul_tail(GroupElement& acc, long long t) const {
        if (t == 0) return;
        GroupElement g = tail_in_side(0, t);
        amalgam_mul_letter(acc, 0, g);
    }

    // acc <- acc * iota_side(g), restoring the alternating normal form
    void amalgam_mul_letter(GroupElement& acc, int side, GroupElement g) const {
        // absorb the current tail into g (in the side factor)
        g = side_spec(side)->multiply(tail_in_side(side, acc.n), g);
        acc.n = 0;
        while (true) {
            // is g in the amalgam subgroup?
            std::optional<long long> in_a;
            for (long long e = 0; e < amalgam_k_; ++e)
                if (g == tail_in_side(side, e)) {
                    in_a = e;
                    break;
                }
            if (in_a) {
                acc.n = *in_a;
                return;
            }
            if (!acc.letters.empty() && acc.letters.back().first == side) {
                g = side_spec(side)->multiply(acc.letters.back().second, g);
                acc.letters.pop_back();
                continue;
            }
            auto [rep, tail] = coset_decompose(side, g);
            acc.letters.push_back({side, rep});
            acc.n = tail;
            return;
        }
    }

    void validate_finite() const;

    Kind kind_;
    long long s_ = 1;                       // Cyclic order
    int rank_ = 1;                          // Free rank
    std::vector<std::vector<int>> table_;   // Finite multiplication table
    int identity_ = 0;
    GroupSpecPtr left_, right_;             // Amalgam factors
    long long amalgam_k_ = 1;
    GroupElement img_left_, img_right_;
};

inline GroupSpecPtr GroupSpec::finite(std::vector<std::vector<int>> table, int identity) {
    auto g = std::shared_ptr<GroupSpec>(new GroupSpec(Kind::Finite));
    g->table_ = std::move(table);
    g->identity_ = identity;
    g->validate_finite();
    return g;
}

inline void GroupSpec::validate_finite() const {
    std::size_t n = table_.size();
    if (n == 0) throw error("finite group: empty table");
    for (const auto& row : table_) {
        if (row.size() != n) throw error("finite group: table not square");
        for (int x : row)
            if (x < 0 || std::size_t(x) >= n) throw error("finite group: entry out of range");
    }
    if (identity_ < 0 || std::size_t(identity_) >= n) throw error("finite group: bad identity index");
    for (std::size_t x = 0; x < n; ++x)
        if (table_[identity_][x] != int(x) || table_[x][identity_] != int(x))
            throw error("finite group: identity axiom fails");
    for (std::size_t x = 0; x < n; ++x) {
        bool has_inverse = false;
        for (std::size_t y = 0; y < n && !has_inverse; ++y)
            has_inverse = (table_[x][y] == identity_ && table_[y][x] == identity_);
        if (!has_inverse) throw error("finite group: inverse axiom fails");
    }
    // associativity: full check at desk scale, sampled above
    auto check = [&](std::size_t a, std::size_t b, std::size_t c) {
        if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
            throw error("finite group: associativity fails");
    };
    if (n <= 24) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c) check(a, b, c);
    } else {
        std::uint64_t state = 0x9e3779b97f4a7c15ull;
        auto next = [&] {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            return state;
        };
        for (int t = 0; t < 1000; ++t) check(next() % n, next() % n, next() % n);
    }
}

inline GroupSpecPtr GroupSpec::amalgam(GroupSpecPtr left, GroupSpecPtr right, long long k,
                                       const GroupElement& img_left, const GroupElement& img_right) {
    if (!left || !right) throw error("amalgam: missing factors");
    if (k < 1) throw error("amalgam: order must be >= 1");
    auto depth = [](const GroupSpec& s, auto&& self) -> int {
        if (s.kind() != Kind::Amalgam) return 0;
        return 1 + std::max(self(*s.left(), self), self(*s.right(), self));
    };
    if (std::max(depth(*left, depth), depth(*right, depth)) >= 2)
        throw error("amalgam: nesting depth limited to 2");
    auto g = std::shared_ptr<GroupSpec>(new GroupSpec(Kind::Amalgam));
    g->left_ = std::move(left);
    g->right_ = std::move(right);
    g->amalgam_k_ = k;
    g->img_left_ = img_left;
    g->img_right_ = img_right;
    auto ol = g->left_->element_order(img_left);
    auto orr = g->right_->element_order(img_right);
    if (!ol || *ol != k) throw error("amalgam: left image does not have the stated order");
    if (!orr || *orr != k) throw error("amalgam: right image does not have the stated order");
    return g;
}

// ---- subgroups -------------------------------------------------------------

// Membership predicates for the supported subgroup shapes: the trivial
// subgroup, the cyclic subgroup generated by one element, and the amalgam
// subgroup of an Amalgam spec.
class Subgroup {
public:
    enum class Kind { Trivial, Cyclic, AmalgamCore };

    static Subgroup trivial() { return Subgroup(Kind::Trivial); }
    static Subgroup cyclic(GroupSpecPtr spec, GroupElement gen) {
        Subgroup s(Kind::Cyclic);
        s.spec_ = std::move(spec);
        s.gen_ = std::move(gen);
        s.order_ = s.spec_->element_order(s.gen_);
        return s;
    }
    static Subgroup amalgam_core(GroupSpecPtr spec) {
        if (spec->kind() != GroupSpec::Kind::Amalgam) throw error("amalgam core of a non-amalgam spec");
        Subgroup s(Kind::AmalgamCore);
        s.spec_ = std::move(spec);
        return s;
    }

    Kind kind() const { return kind_; }
    const GroupElement& generator() const { return gen_; }

    bool contains(const GroupSpec& spec, const GroupElement& g) const {
        switch (kind_) {
            case Kind::Trivial: return spec.is_identity(g);
            case Kind::Cyclic: {
                if (spec.is_identity(g)) return true;
                if (spec.kind() == GroupSpec::Kind::Integer)
                    return gen_.n != 0 && g.n % gen_.n == 0;
                if (order_) {
                    GroupElement h = gen_;
                    for (long long e = 1; e < *order_; ++e) {
                        if (h == g) return true;
                        h = spec.multiply(h, gen_);
                    }
                    return false;
                }
                // infinite cyclic inside Free: powers grow in length
                GroupElement h = gen_, hi = spec.inverse(gen_);
                GroupElement fwd = h, bwd = hi;
                for (int e = 0; e < 512; ++e) {
                    if (fwd == g || bwd == g) return true;
                    if (fwd.word.size() > g.word.size() && bwd.word.size() > g.word.size()) return false;
                    fwd = spec.multiply(fwd, h);
                    bwd = spec.multiply(bwd, hi);
                }
                return false;
            }
            case Kind::AmalgamCore: return g.letters.empty();
        }
        return false;
    }

    // all elements, when the subgroup is finite; used by the wreath algebra
    std::vector<GroupElement> enumerate(const GroupSpec& spec) const {
        std::vector<GroupElement> out{spec.identity()};
        switch (kind_) {
            case Kind::Trivial: break;
            case Kind::Cyclic: {
                if (!order_) throw error("subgroup enumeration requires a finite subgroup");
                GroupElement h = gen_;
                for (long long e = 1; e < *order_; ++e) {
                    out.push_back(h);
                    h = spec.multiply(h, gen_);
                }
                break;
            }
            case Kind::AmalgamCore: {
                GroupElement x = spec.embed(0, spec.left()->power(spec.amalgam_image(0), 1));
                GroupElement h = x;
                for (long long e = 1; e < spec.amalgam_order(); ++e) {
                    out.push_back(h);
                    h = spec.multiply(h, x);
                }
                break;
            }
        }
        return out;
    }

private:
    explicit Subgroup(Kind k) : kind_(k) {}
    Kind kind_;
    GroupSpecPtr spec_;
    GroupElement gen_;
    std::optional<long long> order_;
};

inline bool is_member(const GroupSpecPtr& spec, const Subgroup& sub, const GroupElement& g) {
    return sub.contains(*spec, g);
}

// ---- group algebra ---------------------------------------------------------

class GroupAlgebraElement {
public:
    using Terms = std::map<GroupElement, Rational>;

    GroupAlgebraElement() = default;
    explicit GroupAlgebraElement(GroupSpecPtr spec) : spec_(std::move(spec)) {}

    static GroupAlgebraElement delta(GroupSpecPtr spec, const GroupElement& g) {
        GroupAlgebraElement x(std::move(spec));
        x.terms_[g] = 1;
        return x;
    }

    const GroupSpecPtr& spec() const { return spec_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const GroupElement& g, const Rational& c) {
        if (c == 0) return;
        auto& slot = terms_[g];
        slot += c;
        if (slot == 0) terms_.erase(g);
    }

    GroupAlgebraElement operator+(const GroupAlgebraElement& o) const {
        GroupAlgebraElement r = *this;
        for (const auto& [g, c] : o.terms_) r.add_term(g, c);
        return r;
    }

    GroupAlgebraElement operator*(const Rational& c) const {
        GroupAlgebraElement r(spec_);
        if (c == 0) return r;
        for (const auto& [g, cc] : terms_) r.terms_[g] = cc * c;
        return r;
    }

    GroupAlgebraElement operator*(const GroupAlgebraElement& o) const {
        GroupAlgebraElement r(spec_);
        for (const auto& [g1, c1] : terms_)
            for (const auto& [g2, c2] : o.terms_) r.add_term(spec_->multiply(g1, g2), c1 * c2);
        return r;
    }

    GroupAlgebraElement star() const {
        GroupAlgebraElement r(spec_);
        for (const auto& [g, c] : terms_) r.add_term(spec_->inverse(g), c);
        return r;
    }

    bool operator==(const GroupAlgebraElement& o) const { return terms_ == o.terms_; }

private:
    GroupSpecPtr spec_;
    Terms terms_;
};

// Haar state of a discrete-group dual: the coefficient of the identity
inline Rational group_haar(const GroupAlgebraElement& x) {
    auto it = x.terms().find(x.spec()->identity());
    return it == x.terms().end() ? Rational(0) : it->second;
}

// E_H keeps exactly the terms supported on the subgroup
inline GroupAlgebraElement subgroup_expectation(const GroupAlgebraElement& x, const Subgroup& sub) {
    GroupAlgebraElement r(x.spec());
    for (const auto& [g, c] : x.terms())
        if (sub.contains(*x.spec(), g)) r.add_term(g, c);
    return r;
}

}  // namespace qwreath
