#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "qwreath/rational.hpp"

namespace qwreath {

// Set partition of {1..k}. Blocks are sorted internally and ordered by their
// minimum element; the list of all partitions of a given k is ordered with
// finer partitions first (more blocks first, ties broken lexicographically),
// so the discrete partition leads and the one-block partition closes the list.
class Partition {
public:
    Partition() = default;
    Partition(int k, std::vector<std::vector<int>> blocks) : k_(k), blocks_(std::move(blocks)) {
        for (auto& b : blocks_) std::sort(b.begin(), b.end());
        std::sort(blocks_.begin(), blocks_.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
        validate();
    }

    // kernel partition of an index tuple: positions carrying equal values
    // fall in the same block
    static Partition kernel(const std::vector<int>& tuple) {
        std::map<int, std::vector<int>> by_value;
        for (std::size_t t = 0; t < tuple.size(); ++t) by_value[tuple[t]].push_back(int(t) + 1);
        std::vector<std::vector<int>> blocks;
        for (auto& [v, b] : by_value) blocks.push_back(std::move(b));
        return Partition(int(tuple.size()), std::move(blocks));
    }

    int ground_size() const { return k_; }
    std::size_t block_count() const { return blocks_.size(); }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }

    bool is_noncrossing() const {
        // noncrossing == properly nested: scanning 1..k, an element may only
        // continue the innermost open block (no a<b<c<d with a,c / b,d split
        // across two blocks)
        std::vector<int> owner(k_ + 1, -1), last(blocks_.size());
        for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
            for (int x : blocks_[bi]) owner[x] = int(bi);
            last[bi] = blocks_[bi].back();
        }
        std::vector<int> stack;
        for (int x = 1; x <= k_; ++x) {
            int b = owner[x];
            if (x == blocks_[b].front()) {
                stack.push_back(b);
            } else if (stack.empty() || stack.back() != b) {
                return false;
            }
            if (x == last[b]) stack.pop_back();
        }
        return true;
    }

    // p refines q: every block of p is contained in a block of q
    bool refines(const Partition& q) const {
        if (k_ != q.k_) throw error("refines: mismatched ground sets");
        std::vector<int> owner(k_ + 1, -1);
        for (std::size_t bi = 0; bi < q.blocks_.size(); ++bi)
            for (int x : q.blocks_[bi]) owner[x] = int(bi);
        for (const auto& b : blocks_) {
            int o = owner[b.front()];
            for (int x : b)
                if (owner[x] != o) return false;
        }
        return true;
    }

    bool operator==(const Partition& o) const { return k_ == o.k_ && blocks_ == o.blocks_; }
    bool operator<(const Partition& o) const {
        if (k_ != o.k_) return k_ < o.k_;
        if (blocks_.size() != o.blocks_.size()) return blocks_.size() > o.blocks_.size();
        return blocks_ < o.blocks_;
    }

private:
    void validate() const {
        std::vector<char> seen(k_ + 1, 0);
        for (const auto& b : blocks_) {
            if (b.empty()) throw error("partition: empty block");
            for (int x : b) {
                if (x < 1 || x > k_ || seen[x]) throw error("partition: invalid blocks");
                seen[x] = 1;
            }
        }
        for (int x = 1; x <= k_; ++x)
            if (!seen[x]) throw error("partition: blocks do not cover ground set");
    }

    int k_ = 0;
    std::vector<std::vector<int>> blocks_;
};

inline std::vector<Partition> enumerate_partitions(int k, bool noncrossing_only) {
    if (k < 1 || k > Bounds::get().max_partition_k) throw error("enumerate_partitions: k out of range");
    std::vector<Partition> out;
    std::vector<int> rgs(k, 0);
    auto emit = [&] {
        std::vector<std::vector<int>> blocks(*std::max_element(rgs.begin(), rgs.end()) + 1);
        for (int i = 0; i < k; ++i) blocks[rgs[i]].push_back(i + 1);
        Partition p(k, std::move(blocks));
        if (!noncrossing_only || p.is_noncrossing()) out.push_back(std::move(p));
    };
    // restricted growth strings: rgs[0]=0, rgs[i] <= max(rgs[0..i-1])+1
    auto rec = [&](auto&& self, int pos, int mx) -> void {
        if (pos == k) {
            emit();
            return;
        }
        for (int v = 0; v <= mx + 1; ++v) {
            rgs[pos] = v;
            self(self, pos + 1, std::max(mx, v));
        }
    };
    rec(rec, 1, 0);
    std::sort(out.begin(), out.end());
    return out;
}

// number of blocks of the join taken in the lattice of ALL set partitions
// (union-find closure), which is the Gram exponent; the join inside the
// noncrossing lattice would be coarser and gives wrong moments.
inline int join_block_count(const Partition& p, const Partition& q) {
    if (p.ground_size() != q.ground_size()) throw error("join_block_count: mismatched ground sets");
    int k = p.ground_size();
    std::vector<int> parent(k + 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto* part : {&p, &q})
        for (const auto& b : part->blocks())
            for (std::size_t i = 1; i < b.size(); ++i) {
                int a = find(b[0]), c = find(b[i]);
                if (a != c) parent[a] = c;
            }
    int n = 0;
    for (int x = 1; x <= k; ++x)
        if (find(x) == x) ++n;
    return n;
}

}  // namespace qwreath
