#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rankcsp/constraint_system.hpp"
#include "rankcsp/cost.hpp"
#include "rankcsp/error.hpp"
#include "rankcsp/fas.hpp"
#include "rankcsp/oracle.hpp"
#include "rankcsp/random.hpp"
#include "rankcsp/rational.hpp"
#include "rankcsp/ranking.hpp"

namespace rankcsp {

enum class GuessKind { Exhaustive, Oracle, Restarts };

struct GuessMode {
    GuessKind kind = GuessKind::Restarts;
    int restarts = 32;

    static GuessMode exhaustive() { return {GuessKind::Exhaustive, 0}; }
    static GuessMode oracle() { return {GuessKind::Oracle, 0}; }
    static GuessMode restarts_of(int r) { return {GuessKind::Restarts, r}; }
};

inline std::string to_string(const GuessMode& g) {
    switch (g.kind) {
    case GuessKind::Exhaustive: return "exhaustive";
    case GuessKind::Oracle: return "oracle";
    case GuessKind::Restarts: return "restarts:" + std::to_string(g.restarts);
    }
    return "?";
}

enum class FastSolver { Auto, Exact, Local, PivotLocal };

inline std::string to_string(FastSolver f) {
    switch (f) {
    case FastSolver::Auto: return "auto";
    case FastSolver::Exact: return "exact";
    case FastSolver::Local: return "local";
    case FastSolver::PivotLocal: return "pivot-local";
    }
    return "?";
}

enum class AdditiveBackend { Auto, Exact, Heuristic };

/// Threshold constants: as published, or all multiplied by gamma.
struct ConstantsMode {
    bool scaled = false;
    Rational gamma{1};

    Rational factor() const { return scaled ? gamma : Rational(1); }
};

struct PtasCaps {
    std::uint64_t max_guesses = 4096;
    int max_local_passes = kDefaultMaxPasses;
    /// Largest |U| handed to the exact FAS solver.
    int exact_cap = kDefaultExactCap;
    /// Largest n for which the additive stage runs the exact oracle.
    int additive_exact_cap = 9;
};

struct PtasConfig {
    Rational eps{1, 5};
    std::uint64_t seed = 0;
    /// Unset: oracle when a reference is supplied, otherwise restarts(32).
    std::optional<GuessMode> guess;
    FastSolver fast_solver = FastSolver::Auto;
    AdditiveBackend additive = AdditiveBackend::Auto;
    ConstantsMode constants;
    PtasCaps caps;
    /// Ranking whose rounding supplies the oracle-mode guess.
    std::optional<Ranking> reference;

    GuessMode effective_guess() const {
        if (guess) return *guess;
        return reference ? GuessMode::oracle() : GuessMode::restarts_of(32);
    }

    void validate() const {
        check_eps(eps);
        if (caps.max_guesses == 0 || caps.max_local_passes <= 0 || caps.exact_cap <= 0 || caps.additive_exact_cap <= 0)
            throw InvalidArgument("caps must be positive");
        if (constants.scaled && constants.gamma < 0) throw InvalidArgument("gamma must be non-negative");
        const GuessMode g = effective_guess();
        if (g.kind == GuessKind::Restarts && g.restarts <= 0) throw InvalidArgument("restarts must be positive");
        if (g.kind == GuessKind::Oracle && !reference) throw InvalidArgument("oracle guess mode needs a reference ranking");
    }
};

// ---------------------------------------------------------------------------
// Additive first stage

struct AdditiveResult {
    Ranking ranking;
    std::int64_t cost = 0;
    /// False for the heuristic backend, which carries no additive guarantee.
    bool guaranteed = false;
    std::string backend;
};

/// Sweeping single-vertex local search on the CSP objective: each vertex in
/// id order jumps to its cheapest slot when that strictly lowers its cost.
inline LocalSearchResult csp_local_search(const ConstraintSystem& c, const Ranking& start, int max_passes = kDefaultMaxPasses) {
    std::vector<Vertex> order = start.order();
    LocalSearchResult result;
    int passes = 0;
    while (true) {
        if (passes >= max_passes) break;
        ++passes;
        bool moved = false;
        for (Vertex v = 0; v < c.n(); ++v) {
            auto it = std::find(order.begin(), order.end(), v);
            if (it == order.end()) continue;
            const std::size_t at = static_cast<std::size_t>(it - order.begin());
            order.erase(it);
            const std::vector<std::int64_t> profile = move_cost_profile(c, order, v);
            const std::size_t best = static_cast<std::size_t>(std::min_element(profile.begin(), profile.end()) - profile.begin());
            const std::size_t to = profile[best] < profile[at] ? best : at;
            if (to != at) {
                moved = true;
                ++result.moves;
            }
            order.insert(order.begin() + static_cast<std::ptrdiff_t>(to), v);
        }
        if (!moved) {
            result.certified = true;
            break;
        }
    }
    result.ranking = Ranking(std::move(order));
    return result;
}

/// Baseline without CSP-level search: a few rounds of linearizing the CSP
/// around the current ranking and pivot-sorting the cancelled FAS instance,
/// starting from a seeded random ranking. Returns the cheapest round.
inline Ranking pivot_baseline(const ConstraintSystem& c, std::uint64_t seed, int rounds = 3) {
    Rng rng(derive_seed(seed, 7));
    std::vector<Vertex> order(static_cast<std::size_t>(c.n()));
    for (int i = 0; i < c.n(); ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(order);
    Ranking current(order);
    if (c.n() < c.k()) return current;
    Ranking best = current;
    std::int64_t best_cost = cost(c, best);
    for (int r = 0; r < rounds; ++r) {
        const FasInstance f = cancel_fas(derive_fas(c, Ordering::from_ranking(current)), c.k());
        current = solve_fas_pivot(f, derive_seed(seed, 100 + static_cast<std::uint64_t>(r)));
        const std::int64_t value = cost(c, current);
        if (value < best_cost) {
            best_cost = value;
            best = current;
        }
    }
    return best;
}

/// Stand-in for an additive-error approximation: exact optimum when n is
/// within the oracle cap (which meets any additive bound), otherwise the
/// pivot baseline polished by CSP local search, flagged as unguaranteed.
/// `delta` is the requested additive slack per n^k and is only recorded.
inline AdditiveResult add_approx(const ConstraintSystem& c, double delta, AdditiveBackend backend,
                                 const PtasCaps& caps = {}, std::uint64_t seed = 0) {
    if (!(delta > 0)) throw InvalidArgument("additive slack must be positive");
    if (backend == AdditiveBackend::Auto)
        backend = c.n() <= caps.additive_exact_cap ? AdditiveBackend::Exact : AdditiveBackend::Heuristic;
    AdditiveResult r;
    if (backend == AdditiveBackend::Exact) {
        OracleResult o = exact_opt(c, caps.additive_exact_cap);
        r.ranking = o.witness;
        r.cost = o.opt_cost;
        r.guaranteed = true;
        r.backend = "exact";
    } else {
        LocalSearchResult ls = csp_local_search(c, pivot_baseline(c, seed), caps.max_local_passes);
        r.ranking = ls.ranking;
        r.cost = cost(c, r.ranking);
        r.guaranteed = false;
        r.backend = "heuristic";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Sampling and guessing

struct SamplePlan {
    int t = 0;
    std::vector<std::vector<Vertex>> sets;

    /// Union of the sampled sets, ascending.
    std::vector<Vertex> sampled() const {
        std::vector<Vertex> all;
        for (const auto& s : sets) all.insert(all.end(), s.begin(), s.end());
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        return all;
    }
};

/// t = ceil(14 ln(40/eps) / (C(k,2) eps)).
inline int sample_count(int k, const Rational& eps) {
    const double e = to_double(eps);
    const double t = 14.0 * std::log(40.0 / e) / (static_cast<double>(binomial(k, 2)) * e);
    return static_cast<int>(std::ceil(t - 1e-9));
}

/// t uniform (k-1)-subsets of the vertices, drawn with replacement.
inline SamplePlan sample_plan(int n, int k, const Rational& eps, std::uint64_t seed) {
    check_eps(eps);
    if (n < k) throw InstanceTooSmall("sample_plan needs n >= k");
    SamplePlan plan;
    plan.t = sample_count(k, eps);
    Rng rng(seed);
    plan.sets.reserve(static_cast<std::size_t>(plan.t));
    for (int i = 0; i < plan.t; ++i) plan.sets.push_back(rng.subset(n, k - 1));
    return plan;
}

/// The bucketed orderings of the sampled vertices tried as the guess.
/// Random access so guesses can be processed in any order.
class GuessEnumerator {
public:
    GuessEnumerator(GuessMode mode, const SamplePlan& plan, int n, const Rational& eps,
                    const std::optional<Ranking>& reference, std::uint64_t seed, std::uint64_t max_guesses)
        : mode_(mode), sampled_(plan.sampled()), n_(n), eps_(eps), seed_(seed), grid_(grid_size(eps)) {
        check_eps(eps);
        switch (mode.kind) {
        case GuessKind::Exhaustive: {
            const double required = std::pow(static_cast<double>(grid_), static_cast<double>(sampled_.size()));
            if (required > static_cast<double>(max_guesses))
                throw GuessBudgetExceeded("exhaustive guessing needs " + std::to_string(grid_) + "^" +
                                              std::to_string(sampled_.size()) + " guesses, budget is " +
                                              std::to_string(max_guesses),
                                          required);
            count_ = static_cast<std::size_t>(std::llround(required));
            break;
        }
        case GuessKind::Oracle:
            if (!reference) throw InvalidArgument("oracle guess mode needs a reference ranking");
            oracle_ = round_ordering(*reference, eps, n).restricted(sampled_);
            count_ = 1;
            break;
        case GuessKind::Restarts:
            if (mode.restarts <= 0) throw InvalidArgument("restarts must be positive");
            count_ = static_cast<std::size_t>(mode.restarts);
            break;
        }
    }

    std::size_t size() const { return count_; }
    const std::vector<Vertex>& sampled() const { return sampled_; }

    Ordering operator[](std::size_t index) const {
        if (index >= count_) throw InvalidArgument("guess index out of range");
        if (mode_.kind == GuessKind::Oracle) return oracle_;
        std::vector<std::pair<Vertex, Position>> e;
        e.reserve(sampled_.size());
        if (mode_.kind == GuessKind::Exhaustive) {
            // Mixed radix, first sampled vertex least significant.
            std::size_t rest = index;
            for (Vertex u : sampled_) {
                e.emplace_back(u, grid_position(u, static_cast<std::int64_t>(rest % static_cast<std::size_t>(grid_)), n_, eps_));
                rest /= static_cast<std::size_t>(grid_);
            }
        } else {
            Rng rng(derive_seed(seed_, 1000 + index));
            for (Vertex u : sampled_)
                e.emplace_back(u, grid_position(u, static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(grid_))), n_, eps_));
        }
        return Ordering(std::move(e));
    }

private:
    GuessMode mode_;
    std::vector<Vertex> sampled_;
    int n_;
    Rational eps_;
    std::uint64_t seed_;
    std::int64_t grid_;
    std::size_t count_ = 0;
    Ordering oracle_;
};

// ---------------------------------------------------------------------------
// Greedy placement from the samples

namespace detail {

/// Number of sampled sets avoiding u whose constraint with u at p is violated.
inline std::int64_t sampled_violations(const ConstraintSystem& c, const Ordering& guess, const SamplePlan& plan,
                                       Vertex u, const Position& p) {
    const int k = c.k();
    std::int64_t count = 0;
    for (const auto& t : plan.sets) {
        if (std::binary_search(t.begin(), t.end(), u)) continue;
        std::array<std::pair<Position, Vertex>, kMaxArity> keyed;
        for (int i = 0; i < k - 1; ++i) keyed[static_cast<std::size_t>(i)] = {guess.at(t[static_cast<std::size_t>(i)]), t[static_cast<std::size_t>(i)]};
        keyed[static_cast<std::size_t>(k - 1)] = {p, u};
        std::sort(keyed.begin(), keyed.begin() + k, [](const auto& a, const auto& b) { return a.first < b.first; });
        std::array<Vertex, kMaxArity> order{};
        for (int i = 0; i < k; ++i) order[static_cast<std::size_t>(i)] = keyed[static_cast<std::size_t>(i)].second;
        count += c.violated({order.data(), static_cast<std::size_t>(k)});
    }
    return count;
}

} // namespace detail

/// Sample estimate of move_cost: C(n, k-1)/t times the violated sampled
/// constraints of u placed at p.
inline Rational estimate_move_cost(const ConstraintSystem& c, const Ordering& guess, const SamplePlan& plan,
                                   Vertex u, const Position& p) {
    if (plan.t <= 0) throw InvalidArgument("empty sample plan");
    return Rational(binomial(c.n(), c.k() - 1), plan.t) * Rational(detail::sampled_violations(c, guess, plan, u, p));
}

/// Each vertex goes to the grid position with the smallest sample estimate
/// (smallest position on ties).
inline Ordering greedy_sigma1(const ConstraintSystem& c, const Ordering& guess, const SamplePlan& plan, const Rational& eps) {
    const int n = c.n();
    std::vector<std::pair<Vertex, Position>> e;
    e.reserve(static_cast<std::size_t>(n));
    for (Vertex u = 0; u < n; ++u) {
        const std::vector<Position> grid = position_grid(u, n, eps);
        std::size_t best = 0;
        std::int64_t best_count = std::numeric_limits<std::int64_t>::max();
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const std::int64_t value = detail::sampled_violations(c, guess, plan, u, grid[j]);
            if (value < best_count) {
                best_count = value;
                best = j;
            }
        }
        e.emplace_back(u, grid[best]);
    }
    return Ordering(std::move(e));
}

/// 13 k^4 3^(k-1) eps C(n-1, k-1), times gamma in scaled mode.
inline Rational unambiguity_threshold(int n, int k, const Rational& eps, const ConstantsMode& constants) {
    return Rational(13 * ipow(k, 4) * ipow(3, k - 1)) * eps * Rational(binomial(n - 1, k - 1)) * constants.factor();
}

struct UnambiguousResult {
    std::vector<Vertex> unambiguous;
    /// Bucketed ordering over the unambiguous vertices.
    Ordering sigma2;
    /// Per vertex id: min over its grid of move_cost against sigma1.
    std::vector<std::int64_t> best_move_cost;
    Rational threshold;
};

/// Keeps the vertices whose cheapest grid position against sigma1 costs at
/// most the threshold, placing each at that position (smallest on ties).
inline UnambiguousResult unambiguous(const ConstraintSystem& c, const Ordering& sigma1, const Rational& eps,
                                     const ConstantsMode& constants) {
    const int n = c.n();
    if (static_cast<int>(sigma1.size()) != n) throw DomainMismatch("sigma1 must cover every vertex");
    UnambiguousResult r;
    r.threshold = unambiguity_threshold(n, c.k(), eps, constants);
    r.best_move_cost.assign(static_cast<std::size_t>(n), 0);
    std::vector<std::pair<Vertex, Position>> kept;
    for (Vertex v = 0; v < n; ++v) {
        const Ordering others = sigma1.without(v);
        const std::vector<Vertex> order = others.by_position();
        const std::vector<std::int64_t> profile = move_cost_profile(c, order, v);
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        Position best_p;
        for (const Position& p : position_grid(v, n, eps)) {
            const std::size_t gap = static_cast<std::size_t>(std::count_if(
                order.begin(), order.end(), [&](Vertex u) { return others.at(u) < p; }));
            if (profile[gap] < best) {
                best = profile[gap];
                best_p = p;
            }
        }
        r.best_move_cost[static_cast<std::size_t>(v)] = best;
        if (Rational(best) <= r.threshold) {
            r.unambiguous.push_back(v);
            kept.emplace_back(v, best_p);
        }
    }
    r.sigma2 = Ordering(std::move(kept));
    return r;
}

// ---------------------------------------------------------------------------
// FAS stage and reinsertion

struct CoreResult {
    Ranking pi3;
    bool degenerate = false;  // |U| < k: no FAS instance was built
    bool locally_optimal = false;
    FastSolver solver_used = FastSolver::Auto;
    /// Range of wbar(u,v) + wbar(v,u) and the scale C(|U|-2, k-2).
    Rational pair_sum_min, pair_sum_max;
    std::int64_t pair_scale = 0;
};

inline CoreResult solve_core(const ConstraintSystem& c, const Ordering& sigma2, FastSolver solver,
                             const PtasCaps& caps, std::uint64_t seed = 0) {
    CoreResult r;
    const int m = static_cast<int>(sigma2.size());
    if (m < c.k()) {
        r.pi3 = ranking_of(sigma2);
        r.degenerate = true;
        r.locally_optimal = true;
        return r;
    }
    const FasInstance f = cancel_fas(derive_fas(c, sigma2), c.k());
    std::tie(r.pair_sum_min, r.pair_sum_max) = fas_pair_sum_range(f);
    r.pair_scale = binomial(m - 2, c.k() - 2);
    if (solver == FastSolver::Auto) solver = m <= caps.exact_cap ? FastSolver::Exact : FastSolver::PivotLocal;
    r.solver_used = solver;
    Ranking start;
    switch (solver) {
    case FastSolver::Exact: start = solve_fas_exact(f, caps.exact_cap); break;
    case FastSolver::Local: start = ranking_of(sigma2); break;
    case FastSolver::PivotLocal:
    case FastSolver::Auto: start = solve_fas_pivot(f, seed); break;
    }
    LocalSearchResult ls = solve_fas_local(f, start, caps.max_local_passes);
    r.pi3 = std::move(ls.ranking);
    r.locally_optimal = ls.certified;
    return r;
}

struct Insertion {
    Ordering sigma4;
    Ranking pi4;
};

/// Places every vertex of `rest` independently at its cheapest gap of pi3
/// (position j + (v+1)/(n+1), j = number of pi3 vertices before it; smallest
/// j on ties). pi3's vertices keep their ranks as positions, so the offset
/// stays strictly inside (0, 1).
inline Insertion insert_ambiguous(const ConstraintSystem& c, const Ranking& pi3, std::span<const Vertex> rest) {
    const int n = c.n();
    std::vector<std::pair<Vertex, Position>> e;
    for (std::size_t i = 0; i < pi3.size(); ++i)
        e.emplace_back(pi3.order()[i], Position(static_cast<std::int64_t>(i) + 1));
    for (Vertex v : rest) {
        const std::vector<std::int64_t> profile = move_cost_profile(c, pi3.order(), v);
        const auto j = std::min_element(profile.begin(), profile.end()) - profile.begin();
        e.emplace_back(v, Rational(v + 1, n + 1) + Rational(static_cast<std::int64_t>(j)));
    }
    Insertion out{Ordering(std::move(e)), {}};
    out.pi4 = ranking_of(out.sigma4);
    return out;
}

// ---------------------------------------------------------------------------
// End to end

struct StageTimings {
    double sigma1_ms = 0, sigma2_ms = 0, core_ms = 0, insert_ms = 0;
};

struct GuessRecord {
    std::size_t index = 0;
    Ordering sigma0;
    Ordering sigma1;
    std::vector<Vertex> unambiguous;
    Ordering sigma2;
    Ranking pi3;
    Ranking pi4;
    std::int64_t cost = 0;
    CoreResult core;
    StageTimings timings;
};

struct Candidate {
    Ranking ranking;
    std::int64_t cost = 0;
};

struct PtasResult {
    Ranking best;
    std::int64_t best_cost = 0;
    /// One per guess, in guess order.
    std::vector<Candidate> candidates;
    std::vector<GuessRecord> stages;
    bool took_additive_branch = false;
    AdditiveResult additive;
    double additive_threshold = 0;
    SamplePlan plan;
    GuessMode guess_mode;
    /// Guess that produced `best`, empty when the additive ranking won.
    std::optional<std::size_t> best_guess;
};

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

} // namespace detail

/// Runs one guess through greedy placement, filtering, FAS solving and
/// reinsertion.
inline GuessRecord run_guess(const ConstraintSystem& c, const PtasConfig& config, const SamplePlan& plan,
                             const Ordering& guess, std::size_t index) {
    using clock = std::chrono::steady_clock;
    GuessRecord g;
    g.index = index;
    g.sigma0 = guess;
    auto t0 = clock::now();
    g.sigma1 = greedy_sigma1(c, guess, plan, config.eps);
    g.timings.sigma1_ms = detail::elapsed_ms(t0);

    t0 = clock::now();
    UnambiguousResult u = unambiguous(c, g.sigma1, config.eps, config.constants);
    g.unambiguous = std::move(u.unambiguous);
    g.sigma2 = std::move(u.sigma2);
    g.timings.sigma2_ms = detail::elapsed_ms(t0);

    t0 = clock::now();
    g.core = solve_core(c, g.sigma2, config.fast_solver, config.caps, derive_seed(config.seed, 2000 + index));
    g.pi3 = g.core.pi3;
    g.timings.core_ms = detail::elapsed_ms(t0);

    t0 = clock::now();
    std::vector<Vertex> rest;
    for (Vertex v = 0; v < c.n(); ++v)
        if (!std::binary_search(g.unambiguous.begin(), g.unambiguous.end(), v)) rest.push_back(v);
    Insertion ins = insert_ambiguous(c, g.pi3, rest);
    g.pi4 = std::move(ins.pi4);
    g.timings.insert_ms = detail::elapsed_ms(t0);
    g.cost = cost(c, g.pi4);
    return g;
}

inline PtasResult run_ptas(const ConstraintSystem& c, const PtasConfig& config) {
    config.validate();
    const int n = c.n(), k = c.k();
    if (n < k) throw InstanceTooSmall("run_ptas needs n >= k");
    PtasResult result;
    result.guess_mode = config.effective_guess();

    const double eps = to_double(config.eps);
    const double gamma = to_double(config.constants.factor());
    const double nk = std::pow(static_cast<double>(n), k);
    const double delta = std::pow(eps, 5) * nk * (gamma > 0 ? gamma : 1.0);
    result.additive_threshold = std::pow(eps, 4) * nk * gamma;
    result.additive = add_approx(c, delta, config.additive, config.caps, derive_seed(config.seed, 1));
    if (static_cast<double>(result.additive.cost) >= result.additive_threshold) {
        result.took_additive_branch = true;
        result.best = result.additive.ranking;
        result.best_cost = result.additive.cost;
        return result;
    }

    result.plan = sample_plan(n, k, config.eps, derive_seed(config.seed, 2));
    const GuessEnumerator guesses(result.guess_mode, result.plan, n, config.eps, config.reference,
                                  derive_seed(config.seed, 3), config.caps.max_guesses);
    for (std::size_t i = 0; i < guesses.size(); ++i) {
        GuessRecord g = run_guess(c, config, result.plan, guesses[i], i);
        result.candidates.push_back({g.pi4, g.cost});
        if (!result.best_guess || g.cost < result.best_cost) {
            result.best_guess = i;
            result.best_cost = g.cost;
            result.best = g.pi4;
        }
        result.stages.push_back(std::move(g));
    }
    if (!result.best_guess || result.additive.cost < result.best_cost) {
        result.best_guess.reset();
        result.best = result.additive.ranking;
        result.best_cost = result.additive.cost;
    }
    return result;
}

} // namespace rankcsp
