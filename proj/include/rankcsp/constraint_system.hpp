#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankcsp/error.hpp"
#include "rankcsp/rational.hpp"
#include "rankcsp/ranking.hpp"

namespace rankcsp {

enum class Family { Betweenness3, KFast, KBetweenness, ExplicitTable };

inline constexpr int kMaxArity = 8;
inline constexpr int kMaxTableArity = 4;

inline std::string_view family_name(Family f) {
    switch (f) {
    case Family::Betweenness3: return "betweenness";
    case Family::KFast: return "kfast";
    case Family::KBetweenness: return "kbetweenness";
    case Family::ExplicitTable: return "table";
    }
    return "?";
}

inline Family parse_family(std::string_view name) {
    if (name == "betweenness") return Family::Betweenness3;
    if (name == "kfast") return Family::KFast;
    if (name == "kbetweenness") return Family::KBetweenness;
    if (name == "table") return Family::ExplicitTable;
    throw IncompatibleFamily("unknown family '" + std::string(name) + "'");
}

/// Betweenness and k-Betweenness constraints only care which vertices sit
/// at the ends, so reversing a ranking never changes its cost.
inline bool reversal_symmetric(Family f) {
    return f == Family::Betweenness3 || f == Family::KBetweenness;
}

inline void check_family_arity(Family f, int k) {
    if (k < 2 || k > kMaxArity)
        throw IncompatibleFamily("arity must lie in [2, " + std::to_string(kMaxArity) + "]");
    switch (f) {
    case Family::Betweenness3:
        if (k != 3) throw IncompatibleFamily("betweenness requires k = 3");
        break;
    case Family::KBetweenness:
        if (k < 4) throw IncompatibleFamily("kbetweenness requires k >= 4");
        break;
    case Family::ExplicitTable:
        if (k > kMaxTableArity) throw IncompatibleFamily("table family requires k <= 4");
        break;
    case Family::KFast: break;
    }
}

inline int factorial(int k) {
    int f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

/// Position of a permutation of {0..k-1} in lexicographic order.
inline int permutation_rank(std::span<const int> perm) {
    const int k = static_cast<int>(perm.size());
    int rank = 0;
    for (int i = 0; i < k; ++i) {
        int smaller = 0;
        for (int j = i + 1; j < k; ++j)
            if (perm[j] < perm[i]) ++smaller;
        rank = rank * (k - i) + smaller;
    }
    return rank;
}

/// Calls f(subset) for every r-subset of `ground` (ascending ground assumed)
/// in lexicographic order. f receives an ascending span of r vertices.
template <class F>
void for_each_subset(std::span<const Vertex> ground, int r, F&& f) {
    const int m = static_cast<int>(ground.size());
    if (r < 0 || r > m) return;
    std::array<int, kMaxArity + 1> idx{};
    std::array<Vertex, kMaxArity + 1> sub{};
    for (int i = 0; i < r; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
        for (int i = 0; i < r; ++i) sub[static_cast<std::size_t>(i)] = ground[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
        f(std::span<const Vertex>(sub.data(), static_cast<std::size_t>(r)));
        int i = r - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - r + i) --i;
        if (i < 0) return;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < r; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

/// A fully dense ranking k-CSP: one constraint on every k-subset of
/// {0..n-1} (none at all when n < k). The payload of a subset is stored at its colexicographic index.
///
/// Payload layout per family:
///   Betweenness3   the designated (must-be-middle) vertex
///   KFast          the unique satisfying order, first to last
///   KBetweenness   the two vertices that must take the end slots, ascending
///   ExplicitTable  k! c-values (1 = unsatisfied) indexed by the
///                  lexicographic rank of the order as a permutation of the
///                  ascending subset
class ConstraintSystem {
public:
    ConstraintSystem(Family family, int n, int k, std::vector<int> payload)
        : family_(family), n_(n), k_(k), binom_(std::max(n, 1), k), payload_(std::move(payload)) {
        check_family_arity(family, k);
        if (n < 1) throw InstanceTooSmall("need at least one vertex");
        count_ = binom_(n, k);
        stride_ = stride_for(family, k);
        if (payload_.size() != count_ * static_cast<std::size_t>(stride_))
            throw MalformedInstance("payload size does not match C(n,k) constraints");
        for (std::size_t i = 0; i < count_; ++i) validate(i);
    }

    /// Builds a system by asking `make(subset)` for each ascending k-subset.
    static ConstraintSystem build(Family family, int n, int k,
                                  const std::function<std::vector<int>(std::span<const Vertex>)>& make) {
        check_family_arity(family, k);
        if (n < 1) throw InstanceTooSmall("need at least one vertex");
        const BinomialTable binom(n, k);
        const std::size_t stride = static_cast<std::size_t>(stride_for(family, k));
        std::vector<int> payload(binom(n, k) * stride);
        std::vector<Vertex> ground(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) ground[static_cast<std::size_t>(i)] = i;
        for_each_subset(ground, k, [&](std::span<const Vertex> s) {
            std::vector<int> p = make(s);
            if (p.size() != stride) throw MalformedInstance("payload of wrong length");
            std::uint64_t idx = colex_index(binom, s);
            std::copy(p.begin(), p.end(), payload.begin() + static_cast<std::ptrdiff_t>(idx * stride));
        });
        return ConstraintSystem(family, n, k, std::move(payload));
    }

    static int stride_for(Family family, int k) {
        switch (family) {
        case Family::Betweenness3: return 1;
        case Family::KFast: return k;
        case Family::KBetweenness: return 2;
        case Family::ExplicitTable: return factorial(k);
        }
        return 0;
    }

    Family family() const { return family_; }
    int n() const { return n_; }
    int k() const { return k_; }
    std::size_t constraint_count() const { return count_; }
    const BinomialTable& binomials() const { return binom_; }

    std::size_t index_of(std::span<const Vertex> ascending) const {
        if (static_cast<int>(ascending.size()) != k_) throw MalformedInstance("subset of wrong size");
        for (std::size_t i = 0; i < ascending.size(); ++i) {
            if (ascending[i] < 0 || ascending[i] >= n_ || (i > 0 && ascending[i] <= ascending[i - 1]))
                throw MalformedInstance("subset must be ascending distinct vertices in range");
        }
        return colex_index(binom_, ascending);
    }

    /// Ascending subset stored at a colex index.
    std::vector<Vertex> subset_at(std::size_t index) const {
        std::vector<Vertex> s(static_cast<std::size_t>(k_));
        std::uint64_t rest = index;
        int hi = n_ - 1;
        for (int i = k_ - 1; i >= 0; --i) {
            while (binom_(hi, i + 1) > rest) --hi;
            s[static_cast<std::size_t>(i)] = hi;
            rest -= binom_(hi, i + 1);
            --hi;
        }
        return s;
    }

    std::span<const int> payload(std::size_t index) const {
        return {payload_.data() + index * static_cast<std::size_t>(stride_), static_cast<std::size_t>(stride_)};
    }

    /// c-value of the constraint at `index` under the induced order
    /// `order` (first to last): 1 when unsatisfied.
    int violated_at(std::size_t index, std::span<const Vertex> order) const {
        const std::span<const int> p = payload(index);
        switch (family_) {
        case Family::Betweenness3:
            return order[1] != p[0] ? 1 : 0;
        case Family::KFast:
            return std::equal(order.begin(), order.end(), p.begin()) ? 0 : 1;
        case Family::KBetweenness: {
            Vertex a = order.front(), b = order.back();
            bool ends = (a == p[0] && b == p[1]) || (a == p[1] && b == p[0]);
            return ends ? 0 : 1;
        }
        case Family::ExplicitTable: {
            std::array<Vertex, kMaxArity> sorted{};
            std::copy(order.begin(), order.end(), sorted.begin());
            std::sort(sorted.begin(), sorted.begin() + k_);
            std::array<int, kMaxArity> perm{};
            for (int i = 0; i < k_; ++i)
                perm[static_cast<std::size_t>(i)] = static_cast<int>(
                    std::lower_bound(sorted.begin(), sorted.begin() + k_, order[static_cast<std::size_t>(i)]) - sorted.begin());
            return p[static_cast<std::size_t>(permutation_rank({perm.data(), static_cast<std::size_t>(k_)}))];
        }
        }
        return 1;
    }

    /// c-value for an induced order given first to last.
    int violated(std::span<const Vertex> order) const {
        if (static_cast<int>(order.size()) != k_) throw MalformedInstance("order of wrong size");
        std::array<Vertex, kMaxArity> sorted{};
        std::copy(order.begin(), order.end(), sorted.begin());
        std::sort(sorted.begin(), sorted.begin() + k_);
        return violated_at(index_of({sorted.data(), static_cast<std::size_t>(k_)}), order);
    }

    friend bool operator==(const ConstraintSystem& a, const ConstraintSystem& b) {
        return a.family_ == b.family_ && a.n_ == b.n_ && a.k_ == b.k_ && a.payload_ == b.payload_;
    }

private:
    static std::uint64_t colex_index(const BinomialTable& binom, std::span<const Vertex> ascending) {
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < ascending.size(); ++i)
            idx += binom(ascending[i], static_cast<int>(i) + 1);
        return idx;
    }

    void validate(std::size_t index) const {
        const std::span<const int> p = payload(index);
        const std::vector<Vertex> s = subset_at(index);
        auto inside = [&](int v) { return std::binary_search(s.begin(), s.end(), v); };
        auto fail = [&](const std::string& why) {
            std::string set;
            for (Vertex v : s) set += (set.empty() ? "" : ",") + std::to_string(v);
            return MalformedInstance("constraint {" + set + "}: " + why);
        };
        switch (family_) {
        case Family::Betweenness3:
            if (!inside(p[0])) throw fail("designated vertex outside subset");
            break;
        case Family::KFast: {
            std::vector<int> sorted(p.begin(), p.end());
            std::sort(sorted.begin(), sorted.end());
            if (sorted != s) throw fail("satisfying order is not a permutation of the subset");
            break;
        }
        case Family::KBetweenness:
            if (!inside(p[0]) || !inside(p[1])) throw fail("endpoint outside subset");
            if (p[0] >= p[1]) throw fail("endpoints must be distinct and ascending");
            break;
        case Family::ExplicitTable:
            for (int x : p)
                if (x != 0 && x != 1) throw fail("truth table entries must be 0 or 1");
            break;
        }
    }

    Family family_;
    int n_;
    int k_;
    BinomialTable binom_;
    std::size_t count_ = 0;
    int stride_ = 0;
    std::vector<int> payload_;
};

} // namespace rankcsp
