#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include "qwreath/partition.hpp"
#include "qwreath/rational.hpp"

namespace qwreath {

// Gram matrix of the noncrossing-partition vectors: entry (p,q) = N^{|p v q|}
// with the join taken in the full partition lattice.
inline RationalMatrix gram_matrix(int k, int N) {
    if (k < 1 || k > Bounds::get().max_partition_k) throw error("gram_matrix: k out of range");
    if (N < 1) throw error("gram_matrix: N must be positive");
    auto nc = enumerate_partitions(k, true);
    RationalMatrix g(nc.size(), nc.size());
    for (std::size_t a = 0; a < nc.size(); ++a)
        for (std::size_t b = a; b < nc.size(); ++b) {
            Int e;
            mpz_ui_pow_ui(e.get_mpz_t(), unsigned(N), unsigned(join_block_count(nc[a], nc[b])));
            g(a, b) = Rational(e);
            g(b, a) = g(a, b);
        }
    return g;
}

namespace detail {

// ---- mod-p linear algebra on 31-bit primes (products fit in uint64) ----
constexpr std::uint64_t kPrimes[] = {2147483647ull, 2147483629ull, 2147483587ull,
                                     2147483579ull, 2147483563ull, 2147483549ull};

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1;
    b %= p;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

inline std::uint64_t invmod(std::uint64_t a, std::uint64_t p) { return powmod(a, p - 2, p); }

// inverse of an integer matrix mod p; nullopt if singular mod p
inline std::optional<std::vector<std::vector<std::uint64_t>>> mat_inv_mod(
    const std::vector<std::vector<std::uint64_t>>& M, std::uint64_t p) {
    std::size_t n = M.size();
    auto A = M;
    std::vector<std::vector<std::uint64_t>> I(n, std::vector<std::uint64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) I[i][i] = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && A[piv][c] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(A[c], A[piv]);
        std::swap(I[c], I[piv]);
        std::uint64_t inv = invmod(A[c][c], p);
        for (std::size_t j = 0; j < n; ++j) {
            A[c][j] = A[c][j] * inv % p;
            I[c][j] = I[c][j] * inv % p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || A[r][c] == 0) continue;
            std::uint64_t f = p - A[r][c];
            for (std::size_t j = 0; j < n; ++j) {
                A[r][j] = (A[r][j] + f * A[c][j]) % p;
                I[r][j] = (I[r][j] + f * I[c][j]) % p;
            }
        }
    }
    return I;
}

// balanced rational reconstruction of r mod M; bound sqrt(M/2) on |num|, den
inline bool rat_reconstruct(const Int& r, const Int& M, Int& num, Int& den) {
    Int bound;
    mpz_sqrt(bound.get_mpz_t(), Int((M - 1) / 2).get_mpz_t());
    Int r0 = M, t0 = 0, r1 = r % M, t1 = 1;
    if (r1 < 0) r1 += M;
    while (r1 > bound) {
        Int q = r0 / r1;
        Int r2 = r0 - q * r1, t2 = t0 - q * t1;
        r0 = r1; t0 = t1; r1 = r2; t1 = t2;
    }
    if (t1 == 0) return false;
    if (t1 < 0) { t1 = -t1; r1 = -r1; }
    if (t1 > bound) return false;
    Int g;
    mpz_gcd(g.get_mpz_t(), r1.get_mpz_t(), t1.get_mpz_t());
    if (g != 1 && g != -1) {
        r1 /= g;
        t1 /= g;
    }
    num = r1;
    den = t1;
    return true;
}

// Weingarten data: W = Whole/den, exact, verified against the Gram matrix.
struct WgTable {
    std::vector<Partition> nc;
    std::vector<std::vector<Int>> whole;  // numerators over the common denominator
    Int den;
};

inline WgTable compute_weingarten(int k, int N) {
    WgTable t;
    t.nc = enumerate_partitions(k, true);
    std::size_t n = t.nc.size();
    std::vector<std::vector<int>> joins(n, std::vector<int>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) joins[a][b] = joins[b][a] = join_block_count(t.nc[a], t.nc[b]);

    std::vector<std::vector<Int>> G(n, std::vector<Int>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            mpz_ui_pow_ui(G[a][b].get_mpz_t(), unsigned(N), unsigned(joins[a][b]));

    auto verify = [&](const std::vector<std::vector<Int>>& Wh, const Int& d) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Int s = 0;
                for (std::size_t l = 0; l < n; ++l) s += Wh[i][l] * G[l][j];
                if (s != (i == j ? d : Int(0))) return false;
            }
        return true;
    };

    // CRT over word-size primes, then per-entry rational reconstruction and a
    // full exact verification; the final entries are far smaller than det(G).
    Int M = 1;
    std::vector<std::vector<Int>> R(n, std::vector<Int>(n, 0));
    bool have = false;
    for (std::uint64_t p : kPrimes) {
        std::vector<std::vector<std::uint64_t>> Gp(n, std::vector<std::uint64_t>(n));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) Gp[a][b] = powmod(N % p, joins[a][b], p);
        auto inv = mat_inv_mod(Gp, p);
        if (!inv) continue;  // p divides det
        if (!have) {
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) R[a][b] = Int(static_cast<unsigned long>((*inv)[a][b]));
            M = Int(static_cast<unsigned long>(p));
            have = true;
        } else {
            Int pz(static_cast<unsigned long>(p)), Minv;
            mpz_invert(Minv.get_mpz_t(), M.get_mpz_t(), pz.get_mpz_t());
            Int newM = M * pz;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) {
                    Int rp = Int(static_cast<unsigned long>((*inv)[a][b]));
                    Int diff = ((rp - R[a][b]) % pz + pz) % pz;
                    R[a][b] = (R[a][b] + M * ((diff * Minv) % pz)) % newM;
                }
            M = newM;
        }
        if (!have) continue;
        // try per-entry reconstruction, then put everything over one denominator
        std::vector<std::vector<Int>> num(n, std::vector<Int>(n)), dens(n, std::vector<Int>(n));
        Int den = 1;
        bool ok = true;
        for (std::size_t a = 0; a < n && ok; ++a)
            for (std::size_t b = 0; b < n && ok; ++b) {
                if (!rat_reconstruct(R[a][b], M, num[a][b], dens[a][b])) ok = false;
                else {
                    Int l;
                    mpz_lcm(l.get_mpz_t(), den.get_mpz_t(), dens[a][b].get_mpz_t());
                    den = l;
                }
            }
        if (!ok) continue;
        std::vector<std::vector<Int>> Wh(n, std::vector<Int>(n));
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) Wh[a][b] = num[a][b] * (den / dens[a][b]);
        if (verify(Wh, den)) {
            t.whole = std::move(Wh);
            t.den = den;
            return t;
        }
    }

    // exact fallback: Gauss-Jordan over the rationals
    RationalMatrix A(n, 2 * n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) A(a, b) = Rational(G[a][b]);
        A(a, n + a) = 1;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && A(piv, c) == 0) ++piv;
        if (piv == n) throw error("weingarten_matrix: singular Gram matrix");
        if (piv != c)
            for (std::size_t j = 0; j < 2 * n; ++j) std::swap(A(c, j), A(piv, j));
        Rational pv = A(c, c);
        for (std::size_t j = 0; j < 2 * n; ++j) A(c, j) /= pv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || A(r, c) == 0) continue;
            Rational f = A(r, c);
            for (std::size_t j = 0; j < 2 * n; ++j) A(r, j) -= f * A(c, j);
        }
    }
    Int den = 1;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            Int l;
            mpz_lcm(l.get_mpz_t(), den.get_mpz_t(), A(a, n + b).get_den().get_mpz_t());
            den = l;
        }
    t.whole.assign(n, std::vector<Int>(n));
    t.den = den;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            t.whole[a][b] = A(a, n + b).get_num() * (den / A(a, n + b).get_den());
    if (!verify(t.whole, t.den)) throw error("weingarten_matrix: verification failed");
    return t;
}

inline const WgTable& weingarten_table(int k, int N) {
    static std::map<std::pair<int, int>, WgTable> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({k, N});
    if (it == cache.end()) it = cache.emplace(std::make_pair(k, N), compute_weingarten(k, N)).first;
    return it->second;
}

inline void permutations_rec(int N, std::vector<int>& cur, std::vector<char>& used,
                             std::vector<std::vector<int>>& out) {
    if (int(cur.size()) == N) {
        out.push_back(cur);
        return;
    }
    for (int v = 1; v <= N; ++v) {
        if (used[v]) continue;
        used[v] = 1;
        cur.push_back(v);
        permutations_rec(N, cur, used, out);
        cur.pop_back();
        used[v] = 0;
    }
}

inline const std::vector<std::vector<int>>& all_permutations(int N) {
    static std::map<int, std::vector<std::vector<int>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(N);
    if (it == cache.end()) {
        std::vector<std::vector<int>> out;
        std::vector<int> cur;
        std::vector<char> used(N + 1, 0);
        permutations_rec(N, cur, used, out);
        it = cache.emplace(N, std::move(out)).first;
    }
    return it->second;
}

}  // namespace detail

inline RationalMatrix weingarten_matrix(int k, int N) {
    if (N < 4) throw error("weingarten_matrix: defined for N >= 4 (use classical averaging below)");
    if (k < 1 || k > Bounds::get().max_partition_k) throw error("weingarten_matrix: k out of range");
    const auto& t = detail::weingarten_table(k, N);
    RationalMatrix w(t.nc.size(), t.nc.size());
    for (std::size_t a = 0; a < t.nc.size(); ++a)
        for (std::size_t b = 0; b < t.nc.size(); ++b) {
            w(a, b) = Rational(t.whole[a][b]) / Rational(t.den);
            w(a, b).canonicalize();
        }
    return w;
}

// Haar moment h(u_{i1 j1} ... u_{ik jk}).  Words reduce locally first; the
// Weingarten sum handles N >= 4 and explicit averaging over permutation
// matrices handles N <= 3, where the Gram matrix may be singular.
inline Rational haar_moment(int N, const std::vector<int>& rows, const std::vector<int>& cols) {
    if (rows.size() != cols.size()) throw error("haar_moment: index tuples of unequal length");
    for (std::size_t t = 0; t < rows.size(); ++t)
        if (rows[t] < 1 || rows[t] > N || cols[t] < 1 || cols[t] > N)
            throw error("haar_moment: index out of range");
    // local reductions
    std::vector<int> ri, ci;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        if (!ri.empty() && ri.back() == rows[t] && ci.back() == cols[t]) continue;
        if (!ri.empty() && (ri.back() == rows[t]) != (ci.back() == cols[t])) return Rational(0);
        ri.push_back(rows[t]);
        ci.push_back(cols[t]);
    }
    int k = int(ri.size());
    if (k == 0) return Rational(1);
    if (k > Bounds::get().max_moment_len) throw error("haar_moment: word length exceeds bound");

    if (N <= 3) {
        const auto& perms = detail::all_permutations(N);
        long cnt = 0;
        for (const auto& sg : perms) {
            bool ok = true;
            for (int t = 0; t < k && ok; ++t) ok = (sg[ci[t] - 1] == ri[t]);
            if (ok) ++cnt;
        }
        Rational r(cnt, long(perms.size()));
        r.canonicalize();
        return r;
    }

    static std::map<std::tuple<int, std::vector<int>, std::vector<int>>, Rational> memo;
    static std::mutex mu;
    // moments depend only on the kernel pair; canonicalize indices first
    auto canon = [](const std::vector<int>& v) {
        std::map<int, int> relabel;
        std::vector<int> out;
        out.reserve(v.size());
        for (int x : v) {
            auto [it, fresh] = relabel.emplace(x, int(relabel.size()));
            out.push_back(it->second);
        }
        return out;
    };
    auto key = std::make_tuple(N, canon(ri), canon(ci));
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
    }

    const auto& t = detail::weingarten_table(k, N);
    Partition keri = Partition::kernel(ri), kerj = Partition::kernel(ci);
    std::vector<std::size_t> pi, qi;
    for (std::size_t a = 0; a < t.nc.size(); ++a) {
        if (t.nc[a].refines(keri)) pi.push_back(a);
        if (t.nc[a].refines(kerj)) qi.push_back(a);
    }
    Int s = 0;
    for (auto a : pi)
        for (auto b : qi) s += t.whole[a][b];
    Rational r = Rational(s) / Rational(t.den);
    r.canonicalize();
    {
        std::lock_guard<std::mutex> lock(mu);
        memo.emplace(std::move(key), r);
    }
    return r;
}

// h((sum_i u_ii)^k): fixed-point count of the k-fold tensor power; equals the
// number of noncrossing partitions of k points for N >= 4
inline Rational character_moment(int N, int k) {
    if (N < 1) throw error("character_moment: N must be positive");
    if (k < 1 || k > Bounds::get().max_moment_len) throw error("character_moment: k out of range");
    Rational total(0);
    // group diagonal index tuples by their kernel partition
    for (const auto& tau : enumerate_partitions(k, false)) {
        if (int(tau.block_count()) > N) continue;
        Int ways = 1;  // falling factorial: injective labelings of the blocks
        for (std::size_t b = 0; b < tau.block_count(); ++b) ways *= Int(N - int(b));
        std::vector<int> rep(k);
        for (std::size_t b = 0; b < tau.block_count(); ++b)
            for (int x : tau.blocks()[b]) rep[x - 1] = int(b) + 1;
        total += Rational(ways) * haar_moment(N, rep, rep);
    }
    return total;
}

}  // namespace qwreath
