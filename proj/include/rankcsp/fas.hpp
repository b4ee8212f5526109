#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "rankcsp/constraint_system.hpp"
#include "rankcsp/cost.hpp"
#include "rankcsp/error.hpp"
#include "rankcsp/random.hpp"
#include "rankcsp/rational.hpp"
#include "rankcsp/ranking.hpp"

namespace rankcsp {

/// Complete weighted digraph over a vertex subset. Weights are exact
/// rationals sharing one denominator; w(u, v) is the price paid when u is
/// ranked after v.
class FasInstance {
public:
    FasInstance(std::vector<Vertex> vertices, std::vector<std::int64_t> numerators, std::int64_t denominator)
        : verts_(std::move(vertices)), num_(std::move(numerators)), den_(denominator) {
        if (!std::is_sorted(verts_.begin(), verts_.end()) ||
            std::adjacent_find(verts_.begin(), verts_.end()) != verts_.end())
            throw InvalidArgument("FAS vertices must be ascending and distinct");
        if (num_.size() != verts_.size() * verts_.size())
            throw InvalidArgument("FAS weight matrix has wrong size");
        if (den_ <= 0) throw InvalidArgument("FAS denominator must be positive");
        for (std::size_t i = 0; i < verts_.size(); ++i)
            for (std::size_t j = 0; j < verts_.size(); ++j) {
                if (num(i, j) < 0) throw InvalidArgument("negative FAS weight");
                if (i == j && num(i, j) != 0) throw InvalidArgument("nonzero FAS diagonal");
            }
    }

    const std::vector<Vertex>& vertices() const { return verts_; }
    std::size_t size() const { return verts_.size(); }
    std::int64_t denominator() const { return den_; }

    /// Numerator of the weight between vertex indices i and j.
    std::int64_t num(std::size_t i, std::size_t j) const { return num_[i * verts_.size() + j]; }

    std::size_t index_of(Vertex v) const {
        auto it = std::lower_bound(verts_.begin(), verts_.end(), v);
        if (it == verts_.end() || *it != v)
            throw DomainMismatch("vertex " + std::to_string(v) + " not in FAS instance");
        return static_cast<std::size_t>(it - verts_.begin());
    }

    Rational weight(Vertex u, Vertex v) const { return Rational(num(index_of(u), index_of(v)), den_); }

private:
    std::vector<Vertex> verts_;
    std::vector<std::int64_t> num_;
    std::int64_t den_;
};

/// Local FAS representation of c around sigma: w(u, v) counts the
/// constraints S with {u, v} in S that are unsatisfied once v is placed
/// immediately before u (v left in place when it already precedes u).
/// Only the order induced on S matters, so "immediately before" is realized
/// by inserting v right ahead of u in that induced order, which is what any
/// position strictly between u and its predecessor produces.
inline FasInstance derive_fas(const ConstraintSystem& c, const Ordering& sigma) {
    const int k = c.k();
    const std::size_t m = sigma.size();
    if (static_cast<int>(m) < k)
        throw InstanceTooSmall("derive_fas needs at least k=" + std::to_string(k) + " vertices, got " + std::to_string(m));
    detail::check_domain(c, sigma.domain());
    const std::vector<Vertex>& verts = sigma.domain();
    const std::vector<int> rank = detail::rank_table(c, sigma);
    std::vector<std::size_t> local(static_cast<std::size_t>(c.n()), 0);
    for (std::size_t i = 0; i < m; ++i) local[static_cast<std::size_t>(verts[i])] = i;

    std::vector<std::int64_t> w(m * m, 0);
    for_each_subset(verts, k, [&](std::span<const Vertex> s) {
        const std::size_t idx = c.index_of(s);
        std::array<Vertex, kMaxArity> order{};
        std::copy(s.begin(), s.end(), order.begin());
        std::sort(order.begin(), order.begin() + k,
                  [&](Vertex a, Vertex b) { return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)]; });
        const std::span<const Vertex> base(order.data(), static_cast<std::size_t>(k));
        const int base_violated = c.violated_at(idx, base);
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
                if (a == b) continue;
                // u = order[a], v = order[b]
                int violated;
                if (b < a) {
                    violated = base_violated;
                } else {
                    std::array<Vertex, kMaxArity> next{};
                    int out = 0;
                    for (int i = 0; i < k; ++i) {
                        if (i == b) continue;
                        if (i == a) next[static_cast<std::size_t>(out++)] = order[static_cast<std::size_t>(b)];
                        next[static_cast<std::size_t>(out++)] = order[static_cast<std::size_t>(i)];
                    }
                    violated = c.violated_at(idx, {next.data(), static_cast<std::size_t>(k)});
                }
                if (violated) {
                    const std::size_t u = local[static_cast<std::size_t>(order[static_cast<std::size_t>(a)])];
                    const std::size_t v = local[static_cast<std::size_t>(order[static_cast<std::size_t>(b)])];
                    ++w[u * m + v];
                }
            }
        }
    });
    return FasInstance(verts, std::move(w), 1);
}

/// Cancels opposing arc weight: w(u,v) - min(C(|U|-2, k-2) / (10 * 3^(k-1)), w(u,v), w(v,u)).
/// Cost differences between any two rankings are unchanged.
inline FasInstance cancel_fas(const FasInstance& f, int k) {
    const std::size_t m = f.size();
    const std::int64_t scale = 10 * ipow(3, k - 1);
    const std::int64_t cap = binomial(static_cast<std::int64_t>(m) - 2, k - 2) * f.denominator();
    std::vector<std::int64_t> w(m * m, 0);
    std::int64_t g = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            const std::int64_t uv = f.num(i, j) * scale, vu = f.num(j, i) * scale;
            w[i * m + j] = uv - std::min({cap, uv, vu});
            g = std::gcd(g, w[i * m + j]);
        }
    std::int64_t den = f.denominator() * scale;
    g = std::gcd(g, den);
    if (g > 1) {
        for (auto& x : w) x /= g;
        den /= g;
    }
    return FasInstance(f.vertices(), std::move(w), den);
}

namespace detail {

/// Sum of weight numerators of backward pairs for a sequence of local indices.
inline std::int64_t fas_cost_num(const FasInstance& f, std::span<const std::size_t> seq) {
    std::int64_t total = 0;
    for (std::size_t a = 0; a < seq.size(); ++a)
        for (std::size_t b = a + 1; b < seq.size(); ++b) total += f.num(seq[b], seq[a]);
    return total;
}

inline std::vector<std::size_t> local_sequence(const FasInstance& f, const Ranking& r) {
    if (r.domain() != f.vertices()) throw DomainMismatch("ranking domain differs from FAS vertex set");
    std::vector<std::size_t> seq;
    seq.reserve(r.size());
    for (Vertex v : r.order()) seq.push_back(f.index_of(v));
    return seq;
}

inline Ranking to_ranking(const FasInstance& f, std::span<const std::size_t> seq) {
    std::vector<Vertex> order;
    order.reserve(seq.size());
    for (std::size_t i : seq) order.push_back(f.vertices()[i]);
    return Ranking(std::move(order));
}

} // namespace detail

/// Total weight of backward arcs: sum of w(u, v) over sigma(u) > sigma(v).
inline Rational fas_cost(const FasInstance& f, const Ordering& sigma) {
    if (sigma.domain() != f.vertices()) throw DomainMismatch("ordering domain differs from FAS vertex set");
    const auto seq = detail::local_sequence(f, ranking_of(sigma));
    return Rational(detail::fas_cost_num(f, seq), f.denominator());
}

inline Rational fas_cost(const FasInstance& f, const Ranking& r) {
    return Rational(detail::fas_cost_num(f, detail::local_sequence(f, r)), f.denominator());
}

/// FAS analogue of move_cost: arcs between v (placed at p) and every other
/// vertex of sigma's domain.
inline Rational fas_move_cost(const FasInstance& f, const Ordering& sigma, Vertex v, const Position& p) {
    const std::size_t vi = f.index_of(v);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const Vertex u = sigma.domain()[i];
        if (u == v) continue;
        const Position& pu = sigma.positions()[i];
        if (pu == p) throw PositionCollision("position " + to_string(p) + " already holds vertex " + std::to_string(u));
        const std::size_t ui = f.index_of(u);
        total += pu > p ? f.num(ui, vi) : f.num(vi, ui);
    }
    return Rational(total, f.denominator());
}

/// Min and max of w(u,v) + w(v,u) over unordered pairs.
inline std::pair<Rational, Rational> fas_pair_sum_range(const FasInstance& f) {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = i + 1; j < f.size(); ++j) {
            const std::int64_t s = f.num(i, j) + f.num(j, i);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    if (f.size() < 2) lo = 0;
    return {Rational(lo, f.denominator()), Rational(hi, f.denominator())};
}

inline constexpr int kDefaultExactCap = 20;

/// Exact minimizer of fas_cost by dynamic programming over vertex subsets:
/// best[S] = min over v in S of best[S - v] + sum_{u in S - v} w(v, u),
/// v being the last of S. Ties pick the smallest v as last.
inline Ranking solve_fas_exact(const FasInstance& f, int cap = kDefaultExactCap) {
    const int m = static_cast<int>(f.size());
    if (m > cap || m > 30)
        throw SizeCapExceeded("exact FAS solver limited to " + std::to_string(std::min(cap, 30)) +
                              " vertices, instance has " + std::to_string(m));
    if (m == 0) return Ranking();
    const int lo_bits = m / 2, hi_bits = m - lo_bits;
    const std::size_t lo_size = std::size_t{1} << lo_bits, hi_size = std::size_t{1} << hi_bits;
    // in_lo[v][S] = sum_{u in S} w(v, u) over the low / high halves of the index range.
    std::vector<std::int64_t> in_lo(static_cast<std::size_t>(m) * lo_size, 0), in_hi(static_cast<std::size_t>(m) * hi_size, 0);
    for (int v = 0; v < m; ++v) {
        for (std::size_t s = 1; s < lo_size; ++s) {
            int b = std::countr_zero(s);
            in_lo[static_cast<std::size_t>(v) * lo_size + s] = in_lo[static_cast<std::size_t>(v) * lo_size + (s & (s - 1))] +
                f.num(static_cast<std::size_t>(v), static_cast<std::size_t>(b));
        }
        for (std::size_t s = 1; s < hi_size; ++s) {
            int b = std::countr_zero(s);
            in_hi[static_cast<std::size_t>(v) * hi_size + s] = in_hi[static_cast<std::size_t>(v) * hi_size + (s & (s - 1))] +
                f.num(static_cast<std::size_t>(v), static_cast<std::size_t>(b + lo_bits));
        }
    }
    const std::size_t full = (std::size_t{1} << m) - 1;
    std::vector<std::int64_t> best(full + 1, std::numeric_limits<std::int64_t>::max());
    std::vector<std::uint8_t> last(full + 1, 0);
    best[0] = 0;
    for (std::size_t s = 1; s <= full; ++s) {
        for (std::size_t rest = s; rest != 0; rest &= rest - 1) {
            const int v = std::countr_zero(rest);
            const std::size_t prev = s & ~(std::size_t{1} << v);
            const std::int64_t add = in_lo[static_cast<std::size_t>(v) * lo_size + (prev & (lo_size - 1))] +
                                     in_hi[static_cast<std::size_t>(v) * hi_size + (prev >> lo_bits)];
            const std::int64_t cand = best[prev] + add;
            if (cand < best[s]) {
                best[s] = cand;
                last[s] = static_cast<std::uint8_t>(v);
            }
        }
    }
    std::vector<std::size_t> seq(static_cast<std::size_t>(m));
    std::size_t s = full;
    for (int pos = m - 1; pos >= 0; --pos) {
        seq[static_cast<std::size_t>(pos)] = last[s];
        s &= ~(std::size_t{1} << last[s]);
    }
    return detail::to_ranking(f, seq);
}

struct LocalSearchResult {
    Ranking ranking;
    /// True when the search stopped because no single-vertex move improves.
    bool certified = false;
    int moves = 0;
};

inline constexpr int kDefaultMaxPasses = 100000;

/// Steepest-descent over single-vertex moves: each pass applies the best
/// strictly improving (vertex, slot) move, scanning vertices by id and slots
/// left to right; the first best move wins ties.
inline LocalSearchResult solve_fas_local(const FasInstance& f, const Ranking& start, int max_passes = kDefaultMaxPasses) {
    std::vector<std::size_t> seq = detail::local_sequence(f, start);
    const std::size_t m = seq.size();
    LocalSearchResult result;
    std::vector<std::size_t> where(m);
    std::vector<std::size_t> rest;
    rest.reserve(m);
    while (true) {
        if (result.moves >= max_passes) {
            result.certified = false;
            break;
        }
        for (std::size_t i = 0; i < m; ++i) where[seq[i]] = i;
        std::int64_t best_delta = 0;
        std::size_t best_v = 0, best_gap = 0;
        for (std::size_t v = 0; v < m; ++v) {
            const std::size_t at = where[v];
            rest.clear();
            for (std::size_t i = 0; i < m; ++i)
                if (i != at) rest.push_back(seq[i]);
            // cost(g) relative to cost(0); cost(g+1) - cost(g) = w(v, rest_g) - w(rest_g, v).
            std::vector<std::int64_t> rel(m, 0);
            for (std::size_t g = 0; g + 1 < m; ++g)
                rel[g + 1] = rel[g] + f.num(v, rest[g]) - f.num(rest[g], v);
            for (std::size_t g = 0; g < m; ++g) {
                if (g == at) continue;
                const std::int64_t delta = rel[g] - rel[at];
                if (delta < best_delta) {
                    best_delta = delta;
                    best_v = v;
                    best_gap = g;
                }
            }
        }
        if (best_delta >= 0) {
            result.certified = true;
            break;
        }
        const std::size_t at = where[best_v];
        seq.erase(seq.begin() + static_cast<std::ptrdiff_t>(at));
        seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(best_gap), best_v);
        ++result.moves;
    }
    result.ranking = detail::to_ranking(f, seq);
    return result;
}

/// Randomized pivoting: each u joins the pivot's left side when
/// w(u, pivot) >= w(pivot, u), i.e. when u after the pivot costs at least
/// as much as u before it.
inline Ranking solve_fas_pivot(const FasInstance& f, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> out;
    out.reserve(f.size());
    auto sort = [&](auto& self, const std::vector<std::size_t>& items) -> void {
        if (items.empty()) return;
        const std::size_t pivot = items[rng.below(items.size())];
        std::vector<std::size_t> left, right;
        for (std::size_t u : items) {
            if (u == pivot) continue;
            (f.num(u, pivot) >= f.num(pivot, u) ? left : right).push_back(u);
        }
        self(self, left);
        out.push_back(pivot);
        self(self, right);
    };
    std::vector<std::size_t> all(f.size());
    std::iota(all.begin(), all.end(), 0);
    sort(sort, all);
    return detail::to_ranking(f, out);
}

} // namespace rankcsp
