#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "rankcsp/constraint_system.hpp"
#include "rankcsp/error.hpp"
#include "rankcsp/random.hpp"
#include "rankcsp/rational.hpp"
#include "rankcsp/ranking.hpp"

namespace rankcsp {

struct NoiseRecord {
    Rational rho;
    std::int64_t noised = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const NoiseRecord&, const NoiseRecord&) = default;
};

/// A constraint system generated consistent with a hidden ranking, then
/// corrupted constraint by constraint with probability rho.
struct PlantedInstance {
    ConstraintSystem system;
    Ranking planted;
    Rational noise;
    std::int64_t noised_count = 0;
    std::uint64_t seed = 0;
};

/// Contents of an instance file: the system plus optional provenance.
struct InstanceFile {
    ConstraintSystem system;
    std::optional<Ranking> planted;
    std::optional<NoiseRecord> noise;

    friend bool operator==(const InstanceFile& a, const InstanceFile& b) {
        return a.system == b.system && a.planted == b.planted && a.noise == b.noise;
    }
};

inline InstanceFile to_file(const PlantedInstance& p) {
    return InstanceFile{p.system, p.planted, NoiseRecord{p.noise, p.noised_count, p.seed}};
}

namespace detail {

/// The `index`-th permutation (lexicographic) of an ascending subset.
inline std::vector<Vertex> unrank_permutation(std::span<const Vertex> ascending, int index) {
    std::vector<Vertex> pool(ascending.begin(), ascending.end());
    std::vector<Vertex> out;
    int k = static_cast<int>(pool.size());
    int f = factorial(k - 1);
    for (int i = k - 1; i >= 0; --i) {
        int pick = index / f;
        index %= f;
        out.push_back(pool[static_cast<std::size_t>(pick)]);
        pool.erase(pool.begin() + pick);
        if (i > 0) f /= i;
    }
    return out;
}

inline int rank_of_order(std::span<const Vertex> ascending, std::span<const Vertex> order) {
    std::vector<int> perm;
    for (Vertex v : order)
        perm.push_back(static_cast<int>(std::lower_bound(ascending.begin(), ascending.end(), v) - ascending.begin()));
    return permutation_rank(perm);
}

inline std::vector<std::pair<Vertex, Vertex>> all_pairs(std::span<const Vertex> ascending) {
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (std::size_t i = 0; i < ascending.size(); ++i)
        for (std::size_t j = i + 1; j < ascending.size(); ++j) pairs.emplace_back(ascending[i], ascending[j]);
    return pairs;
}

/// Payload satisfied by `order` (the subset's induced order).
inline std::vector<int> consistent_payload(Family family, std::span<const Vertex> ascending, std::span<const Vertex> order) {
    const int k = static_cast<int>(order.size());
    switch (family) {
    case Family::Betweenness3: return {order[1]};
    case Family::KFast: return {order.begin(), order.end()};
    case Family::KBetweenness: return {std::min(order.front(), order.back()), std::max(order.front(), order.back())};
    case Family::ExplicitTable: {
        std::vector<int> table(static_cast<std::size_t>(factorial(k)), 1);
        table[static_cast<std::size_t>(rank_of_order(ascending, order))] = 0;
        return table;
    }
    }
    return {};
}

/// Uniform choice among the payloads differing from the consistent one.
inline std::vector<int> inconsistent_payload(Family family, std::span<const Vertex> ascending,
                                             std::span<const Vertex> order, Rng& rng) {
    const int k = static_cast<int>(order.size());
    switch (family) {
    case Family::Betweenness3: return {rng.below(2) == 0 ? order[0] : order[2]};
    case Family::KFast:
    case Family::ExplicitTable: {
        const int good = rank_of_order(ascending, order);
        int pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(factorial(k) - 1)));
        if (pick >= good) ++pick;
        const std::vector<Vertex> perm = unrank_permutation(ascending, pick);
        return consistent_payload(family, ascending, perm);
    }
    case Family::KBetweenness: {
        const std::vector<int> good = consistent_payload(family, ascending, order);
        std::vector<std::pair<Vertex, Vertex>> pairs = all_pairs(ascending);
        std::erase(pairs, std::pair<Vertex, Vertex>{good[0], good[1]});
        const auto& p = pairs[rng.below(pairs.size())];
        return {p.first, p.second};
    }
    }
    return {};
}

} // namespace detail

/// Planted instance: a uniform hidden ranking, consistent payloads, and each
/// constraint independently re-drawn among its inconsistent payloads with
/// probability rho. Fully determined by the arguments.
inline PlantedInstance gen_planted(Family family, int n, int k, const Rational& rho, std::uint64_t seed) {
    check_family_arity(family, k);
    if (n < k) throw InstanceTooSmall("need n >= k (n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
    if (rho < 0 || rho > 1) throw InvalidArgument("noise must lie in [0, 1]");
    Rng rng(seed);
    std::vector<Vertex> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(order);
    Ranking planted(order);
    std::int64_t noised = 0;
    ConstraintSystem system = ConstraintSystem::build(family, n, k, [&](std::span<const Vertex> s) {
        std::vector<Vertex> induced(s.begin(), s.end());
        std::sort(induced.begin(), induced.end(), [&](Vertex a, Vertex b) { return planted.rank(a) < planted.rank(b); });
        if (rng.bernoulli(rho)) {
            ++noised;
            return detail::inconsistent_payload(family, s, induced, rng);
        }
        return detail::consistent_payload(family, s, induced);
    });
    return PlantedInstance{std::move(system), std::move(planted), rho, noised, seed};
}

/// Every payload drawn uniformly from all admissible payloads (tables get
/// independent fair 0/1 entries).
inline ConstraintSystem gen_uniform(Family family, int n, int k, std::uint64_t seed) {
    check_family_arity(family, k);
    Rng rng(seed);
    return ConstraintSystem::build(family, n, k, [&](std::span<const Vertex> s) -> std::vector<int> {
        switch (family) {
        case Family::Betweenness3: return {s[rng.below(3)]};
        case Family::KFast: {
            auto perm = detail::unrank_permutation(s, static_cast<int>(rng.below(static_cast<std::uint64_t>(factorial(k)))));
            return {perm.begin(), perm.end()};
        }
        case Family::KBetweenness: {
            auto pairs = detail::all_pairs(s);
            auto p = pairs[rng.below(pairs.size())];
            return {p.first, p.second};
        }
        case Family::ExplicitTable: {
            std::vector<int> t(static_cast<std::size_t>(factorial(k)));
            for (auto& x : t) x = static_cast<int>(rng.below(2));
            return t;
        }
        }
        return {};
    });
}

inline constexpr std::string_view kFormatTag = "rankcsp-v1";

/// Canonical text form: fixed key order, constraints in lexicographic order
/// of their ascending subsets, one per line.
inline std::string serialize(const InstanceFile& file) {
    const ConstraintSystem& c = file.system;
    std::ostringstream out;
    auto list = [&](auto begin, auto end) {
        out << '[';
        for (auto it = begin; it != end; ++it) out << (it == begin ? "" : ",") << *it;
        out << ']';
    };
    out << "{\"format\":\"" << kFormatTag << "\",\"n\":" << c.n() << ",\"k\":" << c.k()
        << ",\"family\":\"" << family_name(c.family()) << '"';
    if (file.planted) {
        out << ",\"planted\":";
        list(file.planted->order().begin(), file.planted->order().end());
    }
    if (file.noise) {
        out << ",\"noise\":{\"rho\":\"" << to_string(file.noise->rho) << "\",\"noised\":" << file.noise->noised
            << ",\"seed\":" << file.noise->seed << '}';
    }
    out << ",\"constraints\":[";
    bool first = true;
    std::vector<Vertex> ground(static_cast<std::size_t>(c.n()));
    for (int i = 0; i < c.n(); ++i) ground[static_cast<std::size_t>(i)] = i;
    for_each_subset(ground, c.k(), [&](std::span<const Vertex> s) {
        out << (first ? "\n" : ",\n") << "{\"s\":";
        first = false;
        list(s.begin(), s.end());
        out << ",\"d\":";
        const auto p = c.payload(c.index_of(s));
        if (c.family() == Family::Betweenness3)
            out << p[0];
        else
            list(p.begin(), p.end());
        out << '}';
    });
    out << (first ? "" : "\n") << "]}\n";
    return out.str();
}

inline std::string serialize(const ConstraintSystem& c) { return serialize(InstanceFile{c, std::nullopt, std::nullopt}); }
inline std::string serialize(const PlantedInstance& p) { return serialize(to_file(p)); }

namespace detail {

inline std::int64_t json_int(const nlohmann::json& j, const std::string& what) {
    if (!j.is_number_integer()) throw ParseError(what + " must be an integer");
    return j.get<std::int64_t>();
}

inline std::vector<int> json_int_list(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + " must be an array of integers");
    std::vector<int> out;
    for (const auto& x : j) out.push_back(static_cast<int>(json_int(x, what)));
    return out;
}

} // namespace detail

inline InstanceFile parse(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("instance must be a JSON object");
    for (const auto& [key, _] : doc.items())
        if (key != "format" && key != "n" && key != "k" && key != "family" && key != "planted" && key != "noise" &&
            key != "constraints")
            throw ParseError("unknown key '" + key + "'");
    if (!doc.contains("format") || doc["format"] != kFormatTag) throw ParseError("missing or unsupported format tag");
    for (const char* key : {"n", "k", "family", "constraints"})
        if (!doc.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
    const std::int64_t n = detail::json_int(doc["n"], "n");
    const std::int64_t k = detail::json_int(doc["k"], "k");
    if (!doc["family"].is_string()) throw ParseError("family must be a string");
    if (n < 1 || n > 1000) throw ParseError("n out of range");
    Family family;
    try {
        family = parse_family(doc["family"].get<std::string>());
        check_family_arity(family, static_cast<int>(k));
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
    const nlohmann::json& cons = doc["constraints"];
    if (!cons.is_array()) throw ParseError("constraints must be an array");
    const std::int64_t expected = binomial(n, k);
    if (static_cast<std::int64_t>(cons.size()) != expected)
        throw ParseError("constraint count " + std::to_string(cons.size()) + " differs from C(n,k) = " + std::to_string(expected));

    const BinomialTable binom(static_cast<int>(n), static_cast<int>(k));
    const int stride = ConstraintSystem::stride_for(family, static_cast<int>(k));
    std::vector<int> payload(static_cast<std::size_t>(expected * stride));
    std::vector<bool> seen(static_cast<std::size_t>(expected), false);
    for (const auto& entry : cons) {
        if (!entry.is_object() || entry.size() != 2 || !entry.contains("s") || !entry.contains("d"))
            throw ParseError("constraint entries must be {\"s\":[...],\"d\":...}");
        const std::vector<int> s = detail::json_int_list(entry["s"], "s");
        if (static_cast<std::int64_t>(s.size()) != k) throw ParseError("constraint subset of wrong size");
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] < 0 || s[i] >= n || (i > 0 && s[i] <= s[i - 1]))
                throw ParseError("constraint subset must be ascending distinct vertices in range");
            idx += binom(s[i], static_cast<int>(i) + 1);
        }
        if (seen[idx]) throw ParseError("duplicate constraint subset");
        seen[idx] = true;
        std::vector<int> d;
        if (family == Family::Betweenness3)
            d = {static_cast<int>(detail::json_int(entry["d"], "d"))};
        else
            d = detail::json_int_list(entry["d"], "d");
        if (static_cast<int>(d.size()) != stride) throw ParseError("constraint payload of wrong length");
        std::copy(d.begin(), d.end(), payload.begin() + static_cast<std::ptrdiff_t>(idx * static_cast<std::uint64_t>(stride)));
    }

    std::optional<ConstraintSystem> system;
    try {
        system.emplace(family, static_cast<int>(n), static_cast<int>(k), std::move(payload));
    } catch (const MalformedInstance& e) {
        throw ParseError(e.what());
    }
    InstanceFile file{std::move(*system), std::nullopt, std::nullopt};
    if (doc.contains("planted")) {
        std::vector<int> order = detail::json_int_list(doc["planted"], "planted");
        std::vector<int> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i)
            if (sorted[i] != static_cast<int>(i)) throw ParseError("planted must be a permutation of 0..n-1");
        if (static_cast<std::int64_t>(order.size()) != n) throw ParseError("planted must rank all n vertices");
        file.planted = Ranking(std::move(order));
    }
    if (doc.contains("noise")) {
        const auto& nz = doc["noise"];
        if (!nz.is_object() || !nz.contains("rho") || !nz["rho"].is_string() || !nz.contains("noised") ||
            !nz.contains("seed") || nz.size() != 3)
            throw ParseError("noise must be {\"rho\":\"a/b\",\"noised\":int,\"seed\":int}");
        NoiseRecord rec;
        try {
            rec.rho = parse_rational(nz["rho"].get<std::string>());
        } catch (const Error& e) {
            throw ParseError(e.what());
        }
        rec.noised = detail::json_int(nz["noised"], "noised");
        if (!nz["seed"].is_number_unsigned()) throw ParseError("seed must be a non-negative integer");
        rec.seed = nz["seed"].get<std::uint64_t>();
        file.noise = rec;
    }
    return file;
}

} // namespace rankcsp
