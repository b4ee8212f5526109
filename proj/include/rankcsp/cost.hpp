#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rankcsp/constraint_system.hpp"
#include "rankcsp/error.hpp"
#include "rankcsp/ranking.hpp"

namespace rankcsp {

/// c-value of the constraint on `subset` under the ranking r of that
/// subset: 1 when the constraint is unsatisfied.
inline int evaluate(const ConstraintSystem& c, std::span<const Vertex> subset, const Ranking& r) {
    if (static_cast<int>(subset.size()) != c.k()) throw MalformedInstance("subset must have k vertices");
    std::vector<Vertex> s(subset.begin(), subset.end());
    std::sort(s.begin(), s.end());
    if (r.domain() != s) throw DomainMismatch("ranking is not over the given subset");
    return c.violated(r.order());
}

namespace detail {

inline void check_domain(const ConstraintSystem& c, std::span<const Vertex> domain) {
    for (Vertex v : domain)
        if (v < 0 || v >= c.n())
            throw DomainMismatch("vertex " + std::to_string(v) + " outside 0.." + std::to_string(c.n() - 1));
}

/// Ranks the ascending subset by `key` and evaluates it.
template <class Key>
int violated_by_key(const ConstraintSystem& c, std::span<const Vertex> ascending, const Key& key) {
    const int k = c.k();
    std::array<Vertex, kMaxArity> order{};
    std::copy(ascending.begin(), ascending.end(), order.begin());
    std::sort(order.begin(), order.begin() + k, [&](Vertex a, Vertex b) { return key(a) < key(b); });
    return c.violated_at(c.index_of(ascending), {order.data(), static_cast<std::size_t>(k)});
}

/// Rank (1-based) of every domain vertex, indexed by vertex id.
inline std::vector<int> rank_table(const ConstraintSystem& c, const Ordering& sigma) {
    std::vector<int> rank(static_cast<std::size_t>(c.n()), 0);
    const std::vector<Vertex> order = sigma.by_position();
    for (std::size_t i = 0; i < order.size(); ++i) rank[static_cast<std::size_t>(order[i])] = static_cast<int>(i) + 1;
    return rank;
}

} // namespace detail

/// Number of unsatisfied constraints among the k-subsets of the domain.
inline std::int64_t cost(const ConstraintSystem& c, const Ordering& sigma) {
    detail::check_domain(c, sigma.domain());
    const std::vector<int> rank = detail::rank_table(c, sigma);
    std::int64_t total = 0;
    for_each_subset(sigma.domain(), c.k(), [&](std::span<const Vertex> s) {
        total += detail::violated_by_key(c, s, [&](Vertex v) { return rank[static_cast<std::size_t>(v)]; });
    });
    return total;
}

inline std::int64_t cost(const ConstraintSystem& c, const Ranking& r) {
    return cost(c, Ordering::from_ranking(r));
}

struct CostStats {
    std::int64_t total = 0;
    /// Aligned with the ordering's domain (ascending vertex id).
    std::vector<std::int64_t> per_vertex;
};

/// Total cost plus, per vertex, the cost of the constraints containing it.
inline CostStats cost_stats(const ConstraintSystem& c, const Ordering& sigma) {
    detail::check_domain(c, sigma.domain());
    const std::vector<int> rank = detail::rank_table(c, sigma);
    std::vector<std::int64_t> by_id(static_cast<std::size_t>(c.n()), 0);
    CostStats stats;
    for_each_subset(sigma.domain(), c.k(), [&](std::span<const Vertex> s) {
        if (detail::violated_by_key(c, s, [&](Vertex v) { return rank[static_cast<std::size_t>(v)]; })) {
            ++stats.total;
            for (Vertex v : s) ++by_id[static_cast<std::size_t>(v)];
        }
    });
    for (Vertex v : sigma.domain()) stats.per_vertex.push_back(by_id[static_cast<std::size_t>(v)]);
    return stats;
}

/// Cost of the constraints containing v once v is moved to p, every other
/// vertex keeping its position. v need not belong to the domain.
inline std::int64_t move_cost(const ConstraintSystem& c, const Ordering& sigma, Vertex v, const Position& p) {
    detail::check_domain(c, sigma.domain());
    if (v < 0 || v >= c.n()) throw DomainMismatch("vertex out of range");
    std::vector<Vertex> others;
    others.reserve(sigma.size());
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        Vertex u = sigma.domain()[i];
        if (u == v) continue;
        if (sigma.positions()[i] == p)
            throw PositionCollision("position " + to_string(p) + " already holds vertex " + std::to_string(u));
        others.push_back(u);
    }
    if (static_cast<int>(others.size()) < c.k() - 1) return 0;

    // Doubled keys: others at 2*rank, v strictly between its neighbours.
    std::vector<int> key(static_cast<std::size_t>(c.n()), 0);
    const std::vector<Vertex> by_pos = sigma.without(v).by_position();
    int below = 0;
    for (std::size_t i = 0; i < by_pos.size(); ++i) {
        key[static_cast<std::size_t>(by_pos[i])] = 2 * (static_cast<int>(i) + 1);
        if (sigma.at(by_pos[i]) < p) ++below;
    }
    key[static_cast<std::size_t>(v)] = 2 * below + 1;

    std::int64_t total = 0;
    const int k = c.k();
    for_each_subset(others, k - 1, [&](std::span<const Vertex> q) {
        std::array<Vertex, kMaxArity> s{};
        std::copy(q.begin(), q.end(), s.begin());
        s[static_cast<std::size_t>(k - 1)] = v;
        std::sort(s.begin(), s.begin() + k);
        total += detail::violated_by_key(c, {s.data(), static_cast<std::size_t>(k)},
                                         [&](Vertex x) { return key[static_cast<std::size_t>(x)]; });
    });
    return total;
}

/// move_cost of v at every gap of `order` (a vertex sequence not containing
/// v): entry g is the cost with v inserted before order[g], entry size() the
/// cost with v last. One pass over the (k-1)-subsets of `order`.
inline std::vector<std::int64_t> move_cost_profile(const ConstraintSystem& c, std::span<const Vertex> order, Vertex v) {
    const int m = static_cast<int>(order.size());
    const int k = c.k();
    std::vector<std::int64_t> diff(static_cast<std::size_t>(m) + 2, 0);
    if (m >= k - 1) {
        std::vector<Vertex> slots(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) slots[static_cast<std::size_t>(i)] = i;
        for_each_subset(slots, k - 1, [&](std::span<const Vertex> idx) {
            std::array<Vertex, kMaxArity> sorted{};
            for (int i = 0; i < k - 1; ++i) sorted[static_cast<std::size_t>(i)] = order[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
            sorted[static_cast<std::size_t>(k - 1)] = v;
            std::sort(sorted.begin(), sorted.begin() + k);
            const std::size_t cidx = c.index_of({sorted.data(), static_cast<std::size_t>(k)});
            std::array<Vertex, kMaxArity> induced{};
            for (int r = 0; r < k; ++r) {
                // r members of Q precede v.
                int out = 0;
                for (int i = 0; i < r; ++i) induced[static_cast<std::size_t>(out++)] = order[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
                induced[static_cast<std::size_t>(out++)] = v;
                for (int i = r; i < k - 1; ++i) induced[static_cast<std::size_t>(out++)] = order[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
                if (!c.violated_at(cidx, {induced.data(), static_cast<std::size_t>(k)})) continue;
                const int lo = r == 0 ? 0 : idx[static_cast<std::size_t>(r - 1)] + 1;
                const int hi = r == k - 1 ? m : idx[static_cast<std::size_t>(r)];
                diff[static_cast<std::size_t>(lo)] += 1;
                diff[static_cast<std::size_t>(hi) + 1] -= 1;
            }
        });
    }
    std::vector<std::int64_t> profile(static_cast<std::size_t>(m) + 1);
    std::int64_t run = 0;
    for (int g = 0; g <= m; ++g) {
        run += diff[static_cast<std::size_t>(g)];
        profile[static_cast<std::size_t>(g)] = run;
    }
    return profile;
}

enum class FragilityMode { Fragile, Weak };

struct FragilityWitness {
    std::vector<Vertex> before;  // satisfied-or-not order of the subset
    std::vector<Vertex> after;   // the order after one single-vertex move
};

namespace detail {

/// Order obtained by taking the vertex at 0-based index `from` and
/// reinserting it at doubled position `twice_p` (ranks are 1-based, so the
/// existing vertices sit at 2, 4, ..., 2k).
inline std::vector<Vertex> moved(const std::vector<Vertex>& order, int from, int twice_p) {
    std::vector<std::pair<int, Vertex>> keyed;
    for (int i = 0; i < static_cast<int>(order.size()); ++i)
        keyed.emplace_back(i == from ? twice_p : 2 * (i + 1), order[static_cast<std::size_t>(i)]);
    std::sort(keyed.begin(), keyed.end());
    std::vector<Vertex> out;
    for (auto& kv : keyed) out.push_back(kv.second);
    return out;
}

} // namespace detail

/// A single-vertex move that keeps the constraint on `subset` satisfied, if
/// one exists. Fragile mode considers every move; weak mode only swapping
/// the first two, swapping the last two, and moving an end vertex to the
/// opposite end.
inline std::optional<FragilityWitness> fragility_counterexample(const ConstraintSystem& c,
                                                                std::span<const Vertex> subset,
                                                                FragilityMode mode) {
    const int k = c.k();
    std::vector<Vertex> order(subset.begin(), subset.end());
    if (static_cast<int>(order.size()) != k) throw MalformedInstance("subset must have k vertices");
    std::sort(order.begin(), order.end());
    do {
        if (c.violated(order)) continue;
        std::vector<std::pair<int, int>> moves;  // (index, doubled target position)
        if (mode == FragilityMode::Fragile) {
            for (int i = 0; i < k; ++i)
                for (int slot = 0; slot <= k; ++slot) moves.emplace_back(i, 2 * slot + 1);
        } else {
            moves = {{0, 5}, {0, 2 * k + 1}, {k - 1, 2 * k - 3}, {k - 1, 1}};
        }
        for (auto [i, twice_p] : moves) {
            std::vector<Vertex> next = detail::moved(order, i, twice_p);
            if (next == order) continue;
            if (!c.violated(next)) return FragilityWitness{order, next};
        }
    } while (std::next_permutation(order.begin(), order.end()));
    return std::nullopt;
}

inline bool check_fragility(const ConstraintSystem& c, std::span<const Vertex> subset, FragilityMode mode) {
    return !fragility_counterexample(c, subset, mode).has_value();
}

/// Vertices other than v lying strictly between positions p and q.
inline std::int64_t between_count(const Ordering& sigma, Vertex v, const Position& p, const Position& q) {
    const Position lo = std::min(p, q), hi = std::max(p, q);
    std::int64_t count = 0;
    for (std::size_t i = 0; i < sigma.size(); ++i)
        if (sigma.domain()[i] != v && sigma.positions()[i] > lo && sigma.positions()[i] < hi) ++count;
    return count;
}

/// Lower bound |B| / ((m-1) 3^(k-1)) * C(m-1, k-1) on b(v,p) + b(v,q) for
/// weakly fragile systems at sufficiently large m.
inline Rational move_pair_lower_bound(std::int64_t between, int m, int k) {
    if (m < 2) return Rational(0);
    return Rational(between) * Rational(binomial(m - 1, k - 1)) / Rational((m - 1) * ipow(3, k - 1));
}

} // namespace rankcsp
