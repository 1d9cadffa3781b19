#pragma once

#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "qwreath/group.hpp"
#include "qwreath/snplus.hpp"

namespace qwreath {

struct NuLetter {
    int index = 1;  // which copy of the group, 1-based
    GroupElement g;
};

// Normalized word a0 nu_{i1}(g1) a1 ... nu_{in}(gn) an with u-monomial
// separators, a leading central subgroup factor h0, and every g_t a fixed
// coset representative outside the subgroup.
struct WreathMonomial {
    GroupElement h0;
    std::vector<UWord> seps;  // letters.size() + 1 entries
    std::vector<NuLetter> letters;

    int cmp(const WreathMonomial& o) const {
        int c = h0.cmp(o.h0);
        if (c) return c;
        if (letters.size() != o.letters.size()) return letters.size() < o.letters.size() ? -1 : 1;
        for (std::size_t t = 0; t < letters.size(); ++t) {
            if (letters[t].index != o.letters[t].index)
                return letters[t].index < o.letters[t].index ? -1 : 1;
            c = letters[t].g.cmp(o.letters[t].g);
            if (c) return c;
        }
        UWordLess less;
        for (std::size_t t = 0; t < seps.size(); ++t) {
            if (less(seps[t], o.seps[t])) return -1;
            if (less(o.seps[t], seps[t])) return 1;
        }
        return 0;
    }
    bool operator<(const WreathMonomial& o) const { return cmp(o) < 0; }
    bool operator==(const WreathMonomial& o) const { return cmp(o) == 0; }

    std::size_t u_count() const {
        std::size_t n = 0;
        for (const auto& s : seps) n += s.size();
        return n;
    }
};

class WreathAlgebra;

class WreathElement {
public:
    using Terms = std::map<WreathMonomial, Rational>;

    WreathElement() = default;
    explicit WreathElement(const WreathAlgebra* alg) : alg_(alg) {}

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    const WreathAlgebra* algebra() const { return alg_; }

    void add_term(const WreathMonomial& m, const Rational& c) {
        if (c == 0) return;
        auto& slot = terms_[m];
        slot += c;
        if (slot == 0) terms_.erase(m);
    }

    WreathElement operator+(const WreathElement& o) const {
        WreathElement r = *this;
        if (!r.alg_) r.alg_ = o.alg_;
        for (const auto& [m, c] : o.terms_) r.add_term(m, c);
        return r;
    }

    WreathElement operator-(const WreathElement& o) const {
        WreathElement r = *this;
        if (!r.alg_) r.alg_ = o.alg_;
        for (const auto& [m, c] : o.terms_) r.add_term(m, -c);
        return r;
    }

    WreathElement operator*(const Rational& c) const {
        WreathElement r(alg_);
        if (c == 0) return r;
        for (const auto& [m, cc] : terms_) r.terms_[m] = cc * c;
        return r;
    }

    WreathElement operator*(const WreathElement& o) const;
    WreathElement star() const;
    bool operator==(const WreathElement& o) const { return terms_ == o.terms_; }

private:
    friend class WreathAlgebra;
    const WreathAlgebra* alg_ = nullptr;
    Terms terms_;
};

// element of the base algebra C(H) (x) C(S_N^+), keyed by subgroup elements
struct WreathBaseElement {
    std::map<GroupElement, SnPlusElement> parts;

    void add(const GroupElement& h, const SnPlusElement& s) {
        if (s.is_zero()) return;
        auto it = parts.find(h);
        if (it == parts.end()) {
            parts.emplace(h, s);
        } else {
            it->second = it->second + s;
            if (it->second.is_zero()) parts.erase(it);
        }
    }
    bool is_zero() const { return parts.empty(); }
};

// The word algebra of a free wreath product of a discrete-group dual by the
// quantum permutation group, with amalgamation over a central subgroup dual.
class WreathAlgebra {
public:
    WreathAlgebra(int N, GroupSpecPtr spec, Subgroup lambda = Subgroup::trivial())
        : N_(N), spec_(std::move(spec)), lambda_(std::move(lambda)) {
        if (N_ < 1) throw error("wreath: N must be positive");
        lambda_elems_ = lambda_.enumerate(*spec_);
        // h0 bookkeeping moves subgroup factors across the word, which is
        // only an identity when the subgroup is central
        for (const auto& lam : lambda_elems_) {
            for (int g = 0; g < spec_->num_generators(); ++g) {
                auto gen = spec_->generator(g);
                if (!(spec_->multiply(lam, gen) == spec_->multiply(gen, lam)))
                    throw error("wreath: amalgamation subgroup must be central");
            }
        }
    }

    int n() const { return N_; }
    const GroupSpecPtr& group() const { return spec_; }
    const Subgroup& lambda() const { return lambda_; }

    WreathElement one() const {
        WreathElement x(this);
        WreathMonomial m;
        m.h0 = spec_->identity();
        m.seps.resize(1);
        x.add_term(m, 1);
        return x;
    }

    WreathElement scalar(const Rational& c) const { return one() * c; }

    WreathElement u(int i, int j) const {
        if (i < 1 || i > N_ || j < 1 || j > N_) throw error("u(i,j): index out of range");
        WreathMonomial m;
        m.h0 = spec_->identity();
        m.seps = {UWord{ULetter{i, j}}};
        WreathElement x(this);
        x.add_term(m, 1);
        return x;
    }

    WreathElement nu(int i, const GroupElement& g) const {
        if (i < 1 || i > N_) throw error("nu(i,g): index out of range");
        auto m = normalize(spec_->identity(), {UWord{}, UWord{}}, {NuLetter{i, g}});
        WreathElement x(this);
        if (m) x.add_term(*m, 1);
        return x;
    }

    // Canonical monomial from raw data; nullopt when a u-word annihilates.
    // Rewrites to a fixpoint: subgroup content sweeps into h0 through a fixed
    // coset transversal, row-i u-letters slide left across nu_i (the defining
    // commutation ideal), and equal-index nu letters across empty separators
    // merge. Each rule is an algebra identity; the fixed order makes the
    // result deterministic.
    std::optional<WreathMonomial> normalize(const GroupElement& h0_in, std::vector<UWord> seps,
                                            std::vector<NuLetter> letters) const {
        if (seps.size() != letters.size() + 1) throw error("wreath monomial: malformed word");
        for (const auto& l : letters)
            if (l.index < 1 || l.index > N_) throw error("nu index out of range");
        GroupElement h0 = h0_in;
        for (auto& s : seps) {
            auto r = reduce_uword(s);
            if (!r) return std::nullopt;
            s = *r;
        }
        bool changed = true;
        while (changed) {
            changed = false;
            // sweep subgroup parts of the nu letters into h0 (central)
            for (std::size_t t = 0; t < letters.size(); ++t) {
                auto [rep, lam] = coset_decompose(letters[t].g);
                if (spec_->is_identity(lam) && !(spec_->is_identity(rep))) continue;
                h0 = spec_->multiply(h0, lam);
                if (spec_->is_identity(rep)) {
                    UWord cat = seps[t];
                    cat.insert(cat.end(), seps[t + 1].begin(), seps[t + 1].end());
                    auto r = reduce_uword(cat);
                    if (!r) return std::nullopt;
                    seps[t] = *r;
                    seps.erase(seps.begin() + t + 1);
                    letters.erase(letters.begin() + t);
                } else {
                    letters[t].g = rep;
                }
                changed = true;
                break;
            }
            if (changed) continue;
            // slide row-i letters left across nu_i
            for (std::size_t t = 0; t < letters.size(); ++t) {
                if (!seps[t + 1].empty() && seps[t + 1].front().row == letters[t].index) {
                    UWord cat = seps[t];
                    cat.push_back(seps[t + 1].front());
                    auto r = reduce_uword(cat);
                    if (!r) return std::nullopt;
                    seps[t] = *r;
                    seps[t + 1].erase(seps[t + 1].begin());
                    changed = true;
                    break;
                }
            }
            if (changed) continue;
            // merge equal-index nu letters across empty separators
            for (std::size_t t = 0; t + 1 < letters.size(); ++t) {
                if (letters[t].index == letters[t + 1].index && seps[t + 1].empty()) {
                    letters[t].g = spec_->multiply(letters[t].g, letters[t + 1].g);
                    letters.erase(letters.begin() + t + 1);
                    seps.erase(seps.begin() + t + 1);
                    changed = true;
                    break;
                }
            }
        }
        if (!lambda_.contains(*spec_, h0)) throw error("wreath monomial: h0 outside the subgroup");
        WreathMonomial out;
        out.h0 = std::move(h0);
        out.seps = std::move(seps);
        out.letters = std::move(letters);
        if (int(out.letters.size()) > Bounds::get().max_nu_letters ||
            int(out.u_count()) > Bounds::get().max_u_letters)
            throw error("wreath: resource bound exceeded");
        return out;
    }

    WreathElement multiply(const WreathElement& a, const WreathElement& b) const {
        WreathElement r(this);
        for (const auto& [m1, c1] : a.terms())
            for (const auto& [m2, c2] : b.terms()) {
                std::vector<UWord> seps(m1.seps.begin(), m1.seps.end() - 1);
                UWord junction = m1.seps.back();
                junction.insert(junction.end(), m2.seps.front().begin(), m2.seps.front().end());
                seps.push_back(junction);
                seps.insert(seps.end(), m2.seps.begin() + 1, m2.seps.end());
                std::vector<NuLetter> letters = m1.letters;
                letters.insert(letters.end(), m2.letters.begin(), m2.letters.end());
                auto m = normalize(spec_->multiply(m1.h0, m2.h0), std::move(seps), std::move(letters));
                if (m) r.add_term(*m, c1 * c2);
            }
        return r;
    }

    WreathElement star(const WreathElement& a) const {
        WreathElement r(this);
        for (const auto& [m, c] : a.terms()) {
            std::vector<UWord> seps;
            for (auto it = m.seps.rbegin(); it != m.seps.rend(); ++it)
                seps.emplace_back(it->rbegin(), it->rend());
            std::vector<NuLetter> letters;
            for (auto it = m.letters.rbegin(); it != m.letters.rend(); ++it)
                letters.push_back({it->index, spec_->inverse(it->g)});
            auto ms = normalize(spec_->inverse(m.h0), std::move(seps), std::move(letters));
            if (ms) r.add_term(*ms, c);
        }
        return r;
    }

    // Haar state. Per monomial the state is evaluated by the splitting
    // recursion: walk to the leftmost equal-index adjacency, split the
    // separator by the row conditional expectation, merge the expected part
    // (one fewer nu letter) and push the scan right past the complement.
    // Words with no mergeable adjacency left are reduced and vanish.
    Rational haar(const WreathElement& x) const {
        Rational total(0);
        for (const auto& [m, c] : x.terms()) {
            Rational v(0);
            eval(to_iword(m), 0, [&](const GroupElement& h0, const SnPlusElement& s, const Rational& cc) {
                if (spec_->is_identity(h0)) v += cc * qwreath::haar(s);
            });
            total += c * v;
        }
        return total;
    }

    // GNS-faithful conditional expectation onto C(H) (x) C(S_N^+)
    WreathBaseElement expect_onto_base(const WreathElement& x) const {
        WreathBaseElement out;
        for (const auto& [m, c] : x.terms()) {
            eval(to_iword(m), 0, [&](const GroupElement& h0, const SnPlusElement& s, const Rational& cc) {
                out.add(h0, s * (cc * c));
            });
        }
        return out;
    }

    Rational base_haar(const WreathBaseElement& b) const {
        Rational total(0);
        for (const auto& [h, s] : b.parts)
            if (spec_->is_identity(h)) total += qwreath::haar(s);
        return total;
    }

    // N=2 oracle: the wreath product is a semidirect product, so the Haar
    // state factors as (group Haar on the doubled amalgam) x (uniform trace
    // on the two permutations)
    Rational haar_semidirect_n2(const WreathElement& x) const {
        if (N_ != 2) throw error("haar_semidirect_n2: N must be 2");
        GroupSpecPtr dbl = doubled_group();
        Rational total(0);
        for (const auto& [m, c] : x.terms()) {
            GroupElement w = dbl->identity();
            if (!spec_->is_identity(m.h0)) w = dbl->embed(0, m.h0);
            for (const auto& l : m.letters) w = dbl->multiply(w, dbl->embed(l.index - 1, l.g));
            if (!dbl->is_identity(w)) continue;
            // character part: average the product of indicators over S_2
            Rational chi(0);
            for (int parity = 0; parity < 2; ++parity) {
                bool ok = true;
                for (const auto& sep : m.seps)
                    for (const auto& ul : sep) {
                        int image = parity == 0 ? ul.col : 3 - ul.col;
                        ok = ok && (image == ul.row);
                    }
                if (ok) chi += rat(1, 2);
            }
            total += c * chi;
        }
        return total;
    }

    std::string str(const WreathElement& x) const {
        if (x.is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [m, c] : x.terms()) {
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
            std::vector<std::string> factors;
            if (!spec_->is_identity(m.h0)) factors.push_back("nu(1," + spec_->element_str(m.h0) + ")");
            for (std::size_t t = 0; t < m.seps.size(); ++t) {
                for (const auto& ul : m.seps[t])
                    factors.push_back("u(" + std::to_string(ul.row) + "," + std::to_string(ul.col) + ")");
                if (t < m.letters.size())
                    factors.push_back("nu(" + std::to_string(m.letters[t].index) + "," +
                                      spec_->element_str(m.letters[t].g) + ")");
            }
            if (factors.empty()) {
                os << to_string(a);
            } else {
                if (a != 1) os << to_string(a) << "*";
                for (std::size_t i = 0; i < factors.size(); ++i) os << (i ? "*" : "") << factors[i];
            }
        }
        return os.str();
    }

private:
    struct IWord {
        GroupElement h0;
        std::vector<SnPlusElement> seps;
        std::vector<NuLetter> letters;
    };

    IWord to_iword(const WreathMonomial& m) const {
        IWord w;
        w.h0 = m.h0;
        w.letters = m.letters;
        for (const auto& s : m.seps) {
            SnPlusElement el(N_);
            el.add_term(s, 1);
            w.seps.push_back(std::move(el));
        }
        return w;
    }

    using BaseSink = std::function<void(const GroupElement&, const SnPlusElement&, const Rational&)>;

    void eval(IWord w, std::size_t from, const BaseSink& sink) const {
        const std::size_t n = w.letters.size();
        if (n == 0) {
            sink(w.h0, w.seps[0], Rational(1));
            return;
        }
        std::size_t k = from;
        while (k + 1 < n && w.letters[k].index != w.letters[k + 1].index) ++k;
        if (k + 1 >= n) return;  // reduced word: every remaining adjacency is cleared
        const int row = w.letters[k].index;
        SnPlusElement expected = cond_expect_row(row, w.seps[k + 1]);
        SnPlusElement complement = w.seps[k + 1] - expected;
        if (!expected.is_zero()) {
            // the expected part lives in the row algebra and commutes with
            // nu_row letters, so the two nu letters merge
            IWord m;
            m.h0 = w.h0;
            GroupElement g = spec_->multiply(w.letters[k].g, w.letters[k + 1].g);
            SnPlusElement left = w.seps[k] * expected;
            m.seps.assign(w.seps.begin(), w.seps.begin() + k);
            m.letters.assign(w.letters.begin(), w.letters.begin() + k);
            if (lambda_.contains(*spec_, g)) {
                m.h0 = spec_->multiply(m.h0, g);
                m.seps.push_back(left * w.seps[k + 2]);
            } else {
                m.seps.push_back(std::move(left));
                m.letters.push_back({row, g});
                m.seps.push_back(w.seps[k + 2]);
            }
            m.seps.insert(m.seps.end(), w.seps.begin() + k + 3, w.seps.end());
            m.letters.insert(m.letters.end(), w.letters.begin() + k + 2, w.letters.end());
            eval(std::move(m), 0, sink);
        }
        if (!complement.is_zero()) {
            w.seps[k + 1] = std::move(complement);
            eval(std::move(w), k + 1, sink);
        }
    }

    // g = rep * lam with lam in the subgroup; rep is the minimal element of
    // the coset g*Lambda
    std::pair<GroupElement, GroupElement> coset_decompose(const GroupElement& g) const {
        GroupElement best = g;
        GroupElement best_lam = spec_->identity();
        for (const auto& lam : lambda_elems_) {
            GroupElement cand = spec_->multiply(g, lam);
            if (cand < best) {
                best = cand;
                best_lam = lam;
            }
        }
        // g = best * lam^{-1}
        return {best, spec_->inverse(best_lam)};
    }

    GroupSpecPtr doubled_group() const {
        long long k = 1;
        GroupElement img = spec_->identity();
        switch (lambda_.kind()) {
            case Subgroup::Kind::Trivial: break;
            case Subgroup::Kind::Cyclic: {
                img = lambda_.generator();
                auto o = spec_->element_order(img);
                if (!o) throw error("haar_semidirect_n2: subgroup must be finite");
                k = *o;
                break;
            }
            case Subgroup::Kind::AmalgamCore:
                img = spec_->embed(0, spec_->left()->power(spec_->amalgam_image(0), 1));
                k = spec_->amalgam_order();
                break;
        }
        return GroupSpec::amalgam(spec_, spec_, k, img, img);
    }

    int N_;
    GroupSpecPtr spec_;
    Subgroup lambda_;
    std::vector<GroupElement> lambda_elems_;
};

inline WreathElement WreathElement::operator*(const WreathElement& o) const {
    if (!alg_) return o * Rational(0);
    return alg_->multiply(*this, o);
}

inline WreathElement WreathElement::star() const {
    if (!alg_) return *this;
    return alg_->star(*this);
}

// trace of a K0 generator representative for the quantum reflection groups:
// the unit, a magic-unitary entry, or nu_i(delta_k) u_ij with delta_k the
// k-th minimal spectral projection of the cyclic generator. The cyclotomic
// coefficients of delta_k multiply Haar values that vanish except at the
// identity power, so the result stays rational; this is checked, not assumed.
enum class K0Generator { Unit, UEntry, NuDeltaU };

inline Rational k0_generator_trace(int N, long long s, K0Generator kind, int i = 1, int k = 0,
                                   int j = 1) {
    WreathAlgebra alg(N, GroupSpec::cyclic(s));
    switch (kind) {
        case K0Generator::Unit: return alg.haar(alg.one());
        case K0Generator::UEntry: return alg.haar(alg.u(i, j));
        case K0Generator::NuDeltaU: {
            if (k < 0 || k >= s) throw error("k0_generator_trace: bad spectral index");
            const auto& spec = alg.group();
            auto a = spec->generator(0);
            // h(nu_i(a^l) u_ij) for l = 1..s-1 must vanish for the
            // omega^{-kl}-weighted sum to be rational
            Rational v0(0);
            for (long long l = 0; l < s; ++l) {
                Rational v = alg.haar(alg.multiply(alg.nu(i, spec->power(a, l)), alg.u(i, j)));
                if (l == 0)
                    v0 = v;
                else if (v != 0)
                    throw error("k0_generator_trace: non-rational trace");
            }
            Rational r = v0 / Rational(long(s));
            r.canonicalize();
            return r;
        }
    }
    throw error("unreachable");
}

}  // namespace qwreath
