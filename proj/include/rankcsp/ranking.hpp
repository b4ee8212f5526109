#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rankcsp/error.hpp"
#include "rankcsp/rational.hpp"

namespace rankcsp {

using Vertex = int;
using Position = Rational;

/// Bijection from a vertex subset onto {1..m}, stored as the vertex sequence
/// from first to last.
class Ranking {
public:
    Ranking() = default;

    explicit Ranking(std::vector<Vertex> order) : order_(std::move(order)) {
        Vertex max_id = -1;
        for (Vertex v : order_) {
            if (v < 0) throw InvalidArgument("negative vertex id in ranking");
            max_id = std::max(max_id, v);
        }
        rank_.assign(static_cast<std::size_t>(max_id + 1), 0);
        for (std::size_t i = 0; i < order_.size(); ++i) {
            int& slot = rank_[static_cast<std::size_t>(order_[i])];
            if (slot != 0)
                throw InvalidArgument("vertex " + std::to_string(order_[i]) + " ranked twice");
            slot = static_cast<int>(i) + 1;
        }
    }

    /// Identity ranking 0, 1, ..., m-1.
    static Ranking identity(int m) {
        std::vector<Vertex> order(static_cast<std::size_t>(m));
        std::iota(order.begin(), order.end(), 0);
        return Ranking(std::move(order));
    }

    std::size_t size() const { return order_.size(); }
    bool empty() const { return order_.empty(); }
    const std::vector<Vertex>& order() const { return order_; }
    Vertex at_rank(int r) const { return order_.at(static_cast<std::size_t>(r - 1)); }

    bool contains(Vertex v) const {
        return v >= 0 && static_cast<std::size_t>(v) < rank_.size() &&
               rank_[static_cast<std::size_t>(v)] != 0;
    }

    /// 1-based rank of v.
    int rank(Vertex v) const {
        if (!contains(v)) throw DomainMismatch("vertex " + std::to_string(v) + " not in ranking");
        return rank_[static_cast<std::size_t>(v)];
    }

    std::vector<Vertex> domain() const {
        std::vector<Vertex> d = order_;
        std::sort(d.begin(), d.end());
        return d;
    }

    Ranking reversed() const { return Ranking(std::vector<Vertex>(order_.rbegin(), order_.rend())); }

    friend bool operator==(const Ranking& a, const Ranking& b) { return a.order_ == b.order_; }

private:
    std::vector<Vertex> order_;
    std::vector<int> rank_;
};

/// Injection from a vertex subset into the rationals.
class Ordering {
public:
    Ordering() = default;

    explicit Ordering(std::vector<std::pair<Vertex, Position>> entries) {
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < entries.size(); ++i)
            if (entries[i].first == entries[i - 1].first)
                throw InvalidArgument("vertex " + std::to_string(entries[i].first) +
                                      " placed twice");
        verts_.reserve(entries.size());
        pos_.reserve(entries.size());
        for (auto& [v, p] : entries) {
            verts_.push_back(v);
            pos_.push_back(p);
        }
        std::vector<Position> sorted = pos_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw PositionCollision("two vertices share position " +
                                    to_string(*std::adjacent_find(sorted.begin(), sorted.end())));
    }

    static Ordering from_ranking(const Ranking& r) {
        std::vector<std::pair<Vertex, Position>> e;
        e.reserve(r.size());
        for (std::size_t i = 0; i < r.size(); ++i)
            e.emplace_back(r.order()[i], Position(static_cast<std::int64_t>(i) + 1));
        return Ordering(std::move(e));
    }

    std::size_t size() const { return verts_.size(); }
    bool empty() const { return verts_.empty(); }

    /// Domain in ascending vertex id.
    const std::vector<Vertex>& domain() const { return verts_; }
    /// Positions aligned with domain().
    const std::vector<Position>& positions() const { return pos_; }

    bool contains(Vertex v) const { return index_of(v) != npos; }

    const Position& at(Vertex v) const {
        std::size_t i = index_of(v);
        if (i == npos) throw DomainMismatch("vertex " + std::to_string(v) + " not in ordering");
        return pos_[i];
    }

    /// Domain sorted by ascending position.
    std::vector<Vertex> by_position() const {
        std::vector<std::size_t> idx(verts_.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return pos_[a] < pos_[b]; });
        std::vector<Vertex> out;
        out.reserve(idx.size());
        for (std::size_t i : idx) out.push_back(verts_[i]);
        return out;
    }

    /// Copy with v moved to (or inserted at) p.
    Ordering with(Vertex v, const Position& p) const {
        std::vector<std::pair<Vertex, Position>> e;
        e.reserve(verts_.size() + 1);
        for (std::size_t i = 0; i < verts_.size(); ++i)
            if (verts_[i] != v) e.emplace_back(verts_[i], pos_[i]);
        e.emplace_back(v, p);
        return Ordering(std::move(e));
    }

    Ordering without(Vertex v) const {
        Ordering out;
        for (std::size_t i = 0; i < verts_.size(); ++i)
            if (verts_[i] != v) {
                out.verts_.push_back(verts_[i]);
                out.pos_.push_back(pos_[i]);
            }
        return out;
    }

    Ordering restricted(std::span<const Vertex> keep) const {
        std::vector<std::pair<Vertex, Position>> e;
        e.reserve(keep.size());
        for (Vertex v : keep) e.emplace_back(v, at(v));
        return Ordering(std::move(e));
    }

    /// Entrywise union with an ordering over a disjoint domain.
    Ordering combined(const Ordering& other) const {
        std::vector<std::pair<Vertex, Position>> e;
        e.reserve(size() + other.size());
        for (std::size_t i = 0; i < verts_.size(); ++i) e.emplace_back(verts_[i], pos_[i]);
        for (std::size_t i = 0; i < other.verts_.size(); ++i)
            e.emplace_back(other.verts_[i], other.pos_[i]);
        return Ordering(std::move(e));
    }

    friend bool operator==(const Ordering& a, const Ordering& b) {
        return a.verts_ == b.verts_ && a.pos_ == b.pos_;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t index_of(Vertex v) const {
        auto it = std::lower_bound(verts_.begin(), verts_.end(), v);
        if (it == verts_.end() || *it != v) return npos;
        return static_cast<std::size_t>(it - verts_.begin());
    }

    std::vector<Vertex> verts_;
    std::vector<Position> pos_;
};

/// Ranking with the same relative order as the ordering.
inline Ranking ranking_of(const Ordering& sigma) { return Ranking(sigma.by_position()); }

/// j-th grid position of u: j*eps*n + u/(n+1).
inline Position grid_position(Vertex u, std::int64_t j, int n, const Rational& eps) {
    return eps * Rational(n) * Rational(j) + Rational(u, n + 1);
}

inline std::int64_t grid_size(const Rational& eps) { return floor(Rational(1) / eps) + 1; }

inline void check_eps(const Rational& eps) {
    if (eps <= 0 || eps > 1) throw InvalidArgument("eps must lie in (0, 1], got " + to_string(eps));
}

/// Candidate positions of u, ascending; distinct vertices never share one.
inline std::vector<Position> position_grid(Vertex u, int n, const Rational& eps) {
    check_eps(eps);
    std::vector<Position> grid;
    const std::int64_t count = grid_size(eps);
    grid.reserve(static_cast<std::size_t>(count));
    for (std::int64_t j = 0; j < count; ++j) grid.push_back(grid_position(u, j, n, eps));
    return grid;
}

/// Grid index j of a bucketed position of u.
inline std::int64_t bucket_of(const Position& p, Vertex u, int n, const Rational& eps) {
    Rational j = (p - Rational(u, n + 1)) / (eps * Rational(n));
    if (j.denominator() != 1)
        throw InvalidArgument("position " + to_string(p) + " is not on the grid of vertex " +
                              std::to_string(u));
    return j.numerator();
}

/// Rank rounded down to a multiple of eps*n, plus the u/(n+1) tiebreak.
inline Ordering round_ordering(const Ranking& pi, const Rational& eps, int n) {
    check_eps(eps);
    const Rational width = eps * Rational(n);
    std::vector<std::pair<Vertex, Position>> e;
    e.reserve(pi.size());
    for (Vertex u : pi.order()) {
        std::int64_t j = floor(Rational(pi.rank(u)) / width);
        e.emplace_back(u, width * Rational(j) + Rational(u, n + 1));
    }
    return Ordering(std::move(e));
}

namespace detail {

inline std::int64_t count_inversions(std::vector<int>& a, std::vector<int>& scratch,
                                     std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t inv = count_inversions(a, scratch, lo, mid) + count_inversions(a, scratch, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (a[i] <= a[j]) {
            scratch[k++] = a[i++];
        } else {
            inv += static_cast<std::int64_t>(mid - i);
            scratch[k++] = a[j++];
        }
    }
    while (i < mid) scratch[k++] = a[i++];
    while (j < hi) scratch[k++] = a[j++];
    std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
              scratch.begin() + static_cast<std::ptrdiff_t>(hi),
              a.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

} // namespace detail

/// Kendall-Tau distance: pairs ordered differently by the two orderings.
/// Merge-sort inversion count, O(m log m).
inline std::int64_t kendall_tau(const Ordering& a, const Ordering& b) {
    if (a.domain() != b.domain()) throw DomainMismatch("kendall_tau: orderings over different domains");
    const Ranking rb = ranking_of(b);
    std::vector<int> seq;
    seq.reserve(a.size());
    for (Vertex v : a.by_position()) seq.push_back(rb.rank(v));
    std::vector<int> scratch(seq.size());
    return detail::count_inversions(seq, scratch, 0, seq.size());
}

inline std::int64_t kendall_tau(const Ranking& a, const Ranking& b) {
    return kendall_tau(Ordering::from_ranking(a), Ordering::from_ranking(b));
}

struct CrossingStats {
    std::int64_t left_to_right = 0;
    std::int64_t right_to_left = 0;
    std::int64_t net_flow = 0;

    friend bool operator==(const CrossingStats&, const CrossingStats&) = default;
};

/// Crossings of the cut at p (in a) versus the cut at p2 (in b).
/// net_flow = |{v : b(v) > p2}| - |{v : a(v) > p}|; when no vertex sits
/// exactly on either cut, left_to_right - right_to_left == net_flow.
inline CrossingStats crossing_stats(const Ordering& a, const Position& p,
                                    const Ordering& b, const Position& p2) {
    if (a.domain() != b.domain()) throw DomainMismatch("crossing_stats: orderings over different domains");
    CrossingStats s;
    std::int64_t above_a = 0, above_b = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Position& x = a.positions()[i];
        const Position& y = b.positions()[i];
        if (x < p && y > p2) ++s.left_to_right;
        if (x > p && y < p2) ++s.right_to_left;
        if (x > p) ++above_a;
        if (y > p2) ++above_b;
    }
    s.net_flow = above_b - above_a;
    return s;
}

} // namespace rankcsp
