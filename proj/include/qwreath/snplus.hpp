#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "qwreath/weingarten.hpp"

namespace qwreath {

struct ULetter {
    int row = 0, col = 0;
    auto operator<=>(const ULetter&) const = default;
};

using UWord = std::vector<ULetter>;

// local reductions of a magic-unitary word: adjacent equal letters collapse
// (projections), adjacent letters sharing exactly one of row/column kill the
// word (orthogonality along rows and columns)
inline std::optional<UWord> reduce_uword(const UWord& w) {
    UWord out;
    for (const auto& l : w) {
        if (!out.empty() && out.back() == l) continue;
        if (!out.empty() && ((out.back().row == l.row) != (out.back().col == l.col)))
            return std::nullopt;
        out.push_back(l);
    }
    return out;
}

// length-lexicographic ordering of monomials; keeps printing and iteration
// deterministic
struct UWordLess {
    bool operator()(const UWord& a, const UWord& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

// Exact-rational element of the S_N^+ polynomial algebra, stored on locally
// reduced monomials. The empty monomial is the unit.
class SnPlusElement {
public:
    using Terms = std::map<UWord, Rational, UWordLess>;

    SnPlusElement() = default;
    explicit SnPlusElement(int N) : N_(N) {
        if (N < 1) throw error("SnPlusElement: N must be positive");
    }

    static SnPlusElement unit(int N) {
        SnPlusElement x(N);
        x.terms_[{}] = 1;
        return x;
    }

    static SnPlusElement generator(int N, int i, int j) {
        SnPlusElement x(N);
        if (i < 1 || i > N || j < 1 || j > N) throw error("u(i,j): index out of range");
        x.terms_[{ULetter{i, j}}] = 1;
        return x;
    }

    int n() const { return N_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(const UWord& w, const Rational& c) {
        auto r = reduce_uword(w);
        if (!r || c == 0) return;
        auto& slot = terms_[*r];
        slot += c;
        if (slot == 0) terms_.erase(*r);
    }

    SnPlusElement operator+(const SnPlusElement& o) const {
        check(o);
        SnPlusElement r = *this;
        for (const auto& [w, c] : o.terms_) r.add_term(w, c);
        return r;
    }

    SnPlusElement operator-(const SnPlusElement& o) const {
        check(o);
        SnPlusElement r = *this;
        for (const auto& [w, c] : o.terms_) r.add_term(w, -c);
        return r;
    }

    SnPlusElement operator*(const Rational& c) const {
        SnPlusElement r(N_);
        if (c == 0) return r;
        for (const auto& [w, cc] : terms_) r.terms_[w] = cc * c;
        return r;
    }

    SnPlusElement operator*(const SnPlusElement& o) const {
        check(o);
        SnPlusElement r(N_);
        for (const auto& [w1, c1] : terms_)
            for (const auto& [w2, c2] : o.terms_) {
                UWord w = w1;
                w.insert(w.end(), w2.begin(), w2.end());
                r.add_term(w, c1 * c2);
            }
        return r;
    }

    // adjoint: the generators are self-adjoint projections, coefficients are
    // rational, so only the letter order flips
    SnPlusElement star() const {
        SnPlusElement r(N_);
        for (const auto& [w, c] : terms_) {
            UWord rev(w.rbegin(), w.rend());
            r.add_term(rev, c);
        }
        return r;
    }

    bool operator==(const SnPlusElement& o) const { return N_ == o.N_ && terms_ == o.terms_; }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [w, c] : terms_) {
            Rational a = c;
            if (first) {
                if (a < 0) {
                    os << "-";
                    a = -a;
                }
            } else {
                os << (a < 0 ? " - " : " + ");
                if (a < 0) a = -a;
            }
            first = false;
            bool unit_coeff = (a == 1) && !w.empty();
            if (!unit_coeff) os << to_string(a);
            for (std::size_t t = 0; t < w.size(); ++t) {
                if (t || !unit_coeff) os << "*";
                os << "u(" << w[t].row << "," << w[t].col << ")";
            }
        }
        return os.str();
    }

private:
    void check(const SnPlusElement& o) const {
        if (N_ != o.N_) throw error("SnPlusElement: mixed N");
    }

    int N_ = 1;
    Terms terms_;
};

inline Rational haar(const SnPlusElement& x) {
    Rational total(0);
    for (const auto& [w, c] : x.terms()) {
        std::vector<int> rows, cols;
        rows.reserve(w.size());
        for (const auto& l : w) {
            rows.push_back(l.row);
            cols.push_back(l.col);
        }
        total += c * haar_moment(x.n(), rows, cols);
    }
    return total;
}

// E_i(x) = N * sum_j h(x u_ij) u_ij, the trace-preserving conditional
// expectation onto the row algebra L_i
inline SnPlusElement cond_expect_row(int i, const SnPlusElement& x) {
    int N = x.n();
    if (i < 1 || i > N) throw error("cond_expect_row: row index out of range");
    SnPlusElement out(N);
    for (int j = 1; j <= N; ++j) {
        Rational c = Rational(N) * haar(x * SnPlusElement::generator(N, i, j));
        if (c != 0) out.add_term({ULetter{i, j}}, c);
    }
    return out;
}

}  // namespace qwreath
