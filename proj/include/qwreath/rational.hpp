#pragma once

#include <gmpxx.h>

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace qwreath {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Int = mpz_class;

// Exact rational scalar. mpq_class keeps values canonical (lowest terms,
// positive denominator), which is exactly the invariant we need.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    if (den == 0) throw error("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline std::string to_string(const Int& z) { return z.get_str(); }

class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static RationalMatrix identity(std::size_t n) {
        RationalMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    bool operator==(const RationalMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    RationalMatrix operator*(const RationalMatrix& o) const {
        if (cols_ != o.rows_) throw error("matrix dimension mismatch");
        RationalMatrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Rational& x = (*this)(i, k);
                if (x == 0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += x * o(k, j);
            }
        return r;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rational> a_;
};

// Desk-scale resource bounds. QWREATH_MAX_LETTERS overrides the word-length
// caps for callers that need longer words and accept the cost.
struct Bounds {
    int max_partition_k = 12;
    int max_moment_len = 8;
    int max_nu_letters = 8;
    int max_u_letters = 10;

    static const Bounds& get() {
        static Bounds b = from_env();
        return b;
    }

private:
    static Bounds from_env() {
        Bounds b;
        if (const char* s = std::getenv("QWREATH_MAX_LETTERS")) {
            int v = std::atoi(s);
            if (v > 0) {
                b.max_moment_len = v;
                b.max_u_letters = v;
                b.max_nu_letters = v;
            }
        }
        return b;
    }
};

}  // namespace qwreath
