#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "rankcsp/constraint_system.hpp"
#include "rankcsp/cost.hpp"
#include "rankcsp/error.hpp"
#include "rankcsp/ranking.hpp"

namespace rankcsp {

struct OracleResult {
    std::int64_t opt_cost = 0;
    Ranking witness;
    /// Search nodes visited (rankings evaluated, for enumeration).
    std::uint64_t explored = 0;
};

inline constexpr int kDefaultOracleCap = 10;
inline constexpr int kEnumerateCap = 8;

/// Depth-first branch and bound over ranking prefixes. A prefix is charged
/// the constraints lying entirely inside it; later vertices cannot change
/// those, so the bound is admissible. Children are tried in increasing
/// vertex id and only strict improvements replace the incumbent, so the
/// witness is the lexicographically smallest optimal ranking.
inline OracleResult exact_opt(const ConstraintSystem& c, int cap_n = kDefaultOracleCap) {
    const int n = c.n(), k = c.k();
    if (n > cap_n)
        throw SizeCapExceeded("exact oracle limited to n <= " + std::to_string(cap_n) + ", got n=" + std::to_string(n));
    OracleResult result;
    result.opt_cost = std::numeric_limits<std::int64_t>::max();
    std::vector<Vertex> prefix;
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    std::vector<Vertex> placed_sorted;

    auto added_cost = [&](Vertex v) {
        // Constraints made of v and k-1 already placed vertices; v comes last.
        std::int64_t add = 0;
        std::vector<int> rank(static_cast<std::size_t>(n), 0);
        for (std::size_t i = 0; i < prefix.size(); ++i) rank[static_cast<std::size_t>(prefix[i])] = static_cast<int>(i);
        for_each_subset(placed_sorted, k - 1, [&](std::span<const Vertex> q) {
            std::array<Vertex, kMaxArity> order{};
            std::copy(q.begin(), q.end(), order.begin());
            std::sort(order.begin(), order.begin() + (k - 1),
                      [&](Vertex a, Vertex b) { return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)]; });
            order[static_cast<std::size_t>(k - 1)] = v;
            add += c.violated({order.data(), static_cast<std::size_t>(k)});
        });
        return add;
    };

    auto dfs = [&](auto& self, std::int64_t bound) -> void {
        ++result.explored;
        if (static_cast<int>(prefix.size()) == n) {
            if (bound < result.opt_cost) {
                result.opt_cost = bound;
                result.witness = Ranking(prefix);
            }
            return;
        }
        for (Vertex v = 0; v < n; ++v) {
            if (used[static_cast<std::size_t>(v)]) continue;
            const std::int64_t next = bound + added_cost(v);
            if (next >= result.opt_cost) continue;
            used[static_cast<std::size_t>(v)] = true;
            prefix.push_back(v);
            placed_sorted.insert(std::lower_bound(placed_sorted.begin(), placed_sorted.end(), v), v);
            self(self, next);
            placed_sorted.erase(std::lower_bound(placed_sorted.begin(), placed_sorted.end(), v));
            prefix.pop_back();
            used[static_cast<std::size_t>(v)] = false;
        }
    };
    dfs(dfs, 0);
    return result;
}

/// Evaluates every ranking of the n vertices.
inline OracleResult enumerate_opt(const ConstraintSystem& c, int cap_n = kEnumerateCap) {
    const int n = c.n();
    if (n > cap_n)
        throw SizeCapExceeded("enumeration oracle limited to n <= " + std::to_string(cap_n) + ", got n=" + std::to_string(n));
    std::vector<Vertex> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    OracleResult result;
    result.opt_cost = std::numeric_limits<std::int64_t>::max();
    do {
        ++result.explored;
        const Ranking r(order);
        const std::int64_t value = cost(c, r);
        if (value < result.opt_cost) {
            result.opt_cost = value;
            result.witness = r;
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return result;
}

} // namespace rankcsp
