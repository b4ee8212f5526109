#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rankcsp/rankcsp.hpp"

namespace rankcsp::cli {

using Json = nlohmann::ordered_json;

inline GuessMode parse_guess(const std::string& text) {
    if (text == "exhaustive") return GuessMode::exhaustive();
    if (text == "oracle") return GuessMode::oracle();
    if (text.rfind("restarts:", 0) == 0) {
        int r = 0;
        try {
            r = std::stoi(text.substr(9));
        } catch (const std::exception&) {
            throw InvalidArgument("bad restart count in '" + text + "'");
        }
        if (r <= 0) throw InvalidArgument("restart count must be positive");
        return GuessMode::restarts_of(r);
    }
    throw InvalidArgument("guess mode must be exhaustive, oracle or restarts:R");
}

inline FastSolver parse_fast(const std::string& text) {
    if (text == "auto") return FastSolver::Auto;
    if (text == "exact") return FastSolver::Exact;
    if (text == "local") return FastSolver::Local;
    if (text == "pivot-local") return FastSolver::PivotLocal;
    throw InvalidArgument("fast solver must be auto, exact, local or pivot-local");
}

inline AdditiveBackend parse_additive(const std::string& text) {
    if (text == "auto") return AdditiveBackend::Auto;
    if (text == "exact") return AdditiveBackend::Exact;
    if (text == "heuristic") return AdditiveBackend::Heuristic;
    throw InvalidArgument("additive backend must be auto, exact or heuristic");
}

inline ConstantsMode parse_constants(const std::string& text) {
    if (text == "paper") return {};
    if (text.rfind("scaled:", 0) == 0) return {true, parse_rational(text.substr(7))};
    throw InvalidArgument("constants must be paper or scaled:GAMMA");
}

inline int default_arity(Family f) { return f == Family::KBetweenness ? 4 : 3; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline Json ranking_json(const Ranking& r) { return Json(r.order()); }

/// Bucketed ordering as [vertex, grid index] pairs sorted by position.
inline Json bucketed_json(const Ordering& o, int n, const Rational& eps) {
    Json out = Json::array();
    for (Vertex v : o.by_position()) out.push_back({v, bucket_of(o.at(v), v, n, eps)});
    return out;
}

/// Kendall-Tau distance, modulo reversal for reversal-symmetric families.
inline std::int64_t distance_to(const ConstraintSystem& c, const Ranking& a, const Ranking& b) {
    std::int64_t d = kendall_tau(a, b);
    if (reversal_symmetric(c.family())) d = std::min(d, kendall_tau(a, b.reversed()));
    return d;
}

/// Oracle reference: the embedded planted ranking, else the exact optimum.
inline Ranking oracle_reference(const InstanceFile& file, int cap) {
    if (file.planted) return *file.planted;
    if (file.system.n() <= cap) return exact_opt(file.system, cap).witness;
    throw SizeCapExceeded("oracle guess needs an embedded planted ranking or n <= " + std::to_string(cap));
}

inline int threads_from_env() {
    if (const char* env = std::getenv("RANKCSP_THREADS")) {
        try {
            int t = std::stoi(env);
            if (t >= 1) return t;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------

struct GenArgs {
    std::string family = "betweenness";
    int n = 8;
    int k = 0;
    std::string noise = "0";
    std::uint64_t seed = 0;
    std::string out;
};

inline int cmd_gen(const GenArgs& a, std::ostream& out) {
    const Family family = parse_family(a.family);
    const int k = a.k > 0 ? a.k : default_arity(family);
    const PlantedInstance inst = gen_planted(family, a.n, k, parse_rational(a.noise), a.seed);
    const std::string text = serialize(inst);
    if (a.out.empty()) {
        out << text;
    } else {
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw InvalidArgument("cannot write '" + a.out + "'");
        f << text;
    }
    return 0;
}

struct SolveArgs {
    std::string file;
    std::string eps = "0.2";
    std::uint64_t seed = 0;
    std::string guess;
    std::string fast = "auto";
    std::string additive = "auto";
    std::string constants = "paper";
    std::uint64_t max_guesses = 4096;
    int exact_cap = kDefaultExactCap;
    int oracle_cap = kDefaultOracleCap;
    bool emit_candidates = false;
    bool emit_stages = false;
    bool timings = false;
};

inline PtasConfig make_config(const SolveArgs& a) {
    PtasConfig cfg;
    cfg.eps = parse_rational(a.eps);
    cfg.seed = a.seed;
    if (!a.guess.empty()) cfg.guess = parse_guess(a.guess);
    cfg.fast_solver = parse_fast(a.fast);
    cfg.additive = parse_additive(a.additive);
    cfg.constants = parse_constants(a.constants);
    cfg.caps.max_guesses = a.max_guesses;
    cfg.caps.exact_cap = a.exact_cap;
    return cfg;
}

inline Json result_json(const ConstraintSystem& c, const PtasConfig& cfg, const PtasResult& r, const SolveArgs& a) {
    Json j;
    j["n"] = c.n();
    j["k"] = c.k();
    j["family"] = std::string(family_name(c.family()));
    j["eps"] = to_string(cfg.eps);
    j["seed"] = cfg.seed;
    j["guess"] = to_string(r.guess_mode);
    j["fast"] = to_string(cfg.fast_solver);
    j["best"] = ranking_json(r.best);
    j["best_cost"] = r.best_cost;
    j["took_additive_branch"] = r.took_additive_branch;
    j["additive"] = {{"backend", r.additive.backend},
                     {"cost", r.additive.cost},
                     {"guaranteed", r.additive.guaranteed},
                     {"ranking", ranking_json(r.additive.ranking)}};
    j["sample_t"] = r.plan.t;
    j["guesses"] = r.candidates.size();
    j["best_guess"] = r.best_guess ? Json(*r.best_guess) : Json(nullptr);
    if (a.emit_candidates) {
        Json cands = Json::array();
        for (const auto& cand : r.candidates) cands.push_back({{"ranking", ranking_json(cand.ranking)}, {"cost", cand.cost}});
        j["candidates"] = cands;
    }
    Json stages = Json::array();
    for (const auto& g : r.stages) {
        Json s;
        s["guess"] = g.index;
        s["cost"] = g.cost;
        s["unambiguous"] = g.unambiguous.size();
        s["fast_solver"] = to_string(g.core.solver_used);
        s["locally_optimal"] = g.core.locally_optimal;
        if (a.emit_stages) {
            s["sigma1"] = bucketed_json(g.sigma1, c.n(), cfg.eps);
            s["sigma2"] = bucketed_json(g.sigma2, c.n(), cfg.eps);
            s["pi3"] = ranking_json(g.pi3);
            s["pi4"] = ranking_json(g.pi4);
        }
        if (a.timings)
            s["timings_ms"] = {{"sigma1", g.timings.sigma1_ms},
                               {"sigma2", g.timings.sigma2_ms},
                               {"core", g.timings.core_ms},
                               {"insert", g.timings.insert_ms}};
        stages.push_back(s);
    }
    j["stages"] = stages;
    return j;
}

inline int cmd_solve(const SolveArgs& a, std::ostream& out) {
    const InstanceFile file = parse(read_file(a.file));
    PtasConfig cfg = make_config(a);
    if (cfg.effective_guess().kind == GuessKind::Oracle || (!cfg.guess && file.planted))
        cfg.reference = oracle_reference(file, a.oracle_cap);
    const auto start = std::chrono::steady_clock::now();
    const PtasResult r = run_ptas(file.system, cfg);
    Json j = result_json(file.system, cfg, r, a);
    if (a.timings) j["wall_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out << j.dump() << "\n";
    return 0;
}

struct ExactArgs {
    std::string file;
    int cap = kDefaultOracleCap;
};

inline int cmd_exact(const ExactArgs& a, std::ostream& out) {
    const InstanceFile file = parse(read_file(a.file));
    const OracleResult r = exact_opt(file.system, a.cap);
    Json j;
    j["opt_cost"] = r.opt_cost;
    j["witness"] = ranking_json(r.witness);
    j["explored"] = r.explored;
    out << j.dump() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// check

struct CheckArgs {
    std::string file;
    std::uint64_t seed = 0;
    int orderings = 5;
};

struct CheckOutcome {
    explicit CheckOutcome(std::string n) : name(std::move(n)) {}

    std::string name;
    bool pass = true;
    std::int64_t checked = 0;
    Json counterexample;
};

inline Json check_report(const ConstraintSystem& c, const std::optional<Ranking>& planted, std::uint64_t seed, int orderings) {
    std::vector<CheckOutcome> checks;
    std::vector<Vertex> ground(static_cast<std::size_t>(c.n()));
    for (int i = 0; i < c.n(); ++i) ground[static_cast<std::size_t>(i)] = i;

    auto fragility = [&](FragilityMode mode, const std::string& name) {
        CheckOutcome o{name};
        for_each_subset(ground, c.k(), [&](std::span<const Vertex> s) {
            ++o.checked;
            if (!o.pass) return;
            if (auto w = fragility_counterexample(c, s, mode)) {
                o.pass = false;
                o.counterexample = {{"subset", std::vector<Vertex>(s.begin(), s.end())}, {"before", w->before}, {"after", w->after}};
            }
        });
        checks.push_back(o);
    };
    switch (c.family()) {
    case Family::Betweenness3:
    case Family::KFast:
    case Family::ExplicitTable: fragility(FragilityMode::Fragile, "fragile"); break;
    case Family::KBetweenness: fragility(FragilityMode::Weak, "weakly-fragile"); break;
    }

    std::vector<Ranking> probes;
    if (planted) probes.push_back(*planted);
    Rng rng(seed);
    for (int i = 0; i < orderings; ++i) {
        std::vector<Vertex> order = ground;
        rng.shuffle(order);
        probes.emplace_back(order);
    }

    CheckOutcome stats{"cost-stats-sum"}, identity_total{"fas-total-identity"}, identity_vertex{"fas-vertex-identity"},
        cancel{"cancellation-invariance"}, reversal{"reversal-symmetry"};
    const std::int64_t pairs = binomial(c.k(), 2);
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        const Ordering sigma = Ordering::from_ranking(probes[pi]);
        const CostStats cs = cost_stats(c, sigma);
        std::int64_t sum = 0;
        for (std::int64_t b : cs.per_vertex) sum += b;
        ++stats.checked;
        if (stats.pass && sum != c.k() * cs.total) {
            stats.pass = false;
            stats.counterexample = {{"ranking", probes[pi].order()}, {"sum_b", sum}, {"k_times_cost", c.k() * cs.total}};
        }
        if (c.n() < c.k()) continue;
        const FasInstance f = derive_fas(c, sigma);
        ++identity_total.checked;
        const Rational lhs = fas_cost(f, sigma);
        if (identity_total.pass && lhs != Rational(pairs * cs.total)) {
            identity_total.pass = false;
            identity_total.counterexample = {{"ranking", probes[pi].order()}, {"fas_cost", to_string(lhs)}, {"expected", pairs * cs.total}};
        }
        for (Vertex v : ground) {
            ++identity_vertex.checked;
            const Rational bw = fas_move_cost(f, sigma, v, sigma.at(v));
            const std::int64_t b = move_cost(c, sigma, v, sigma.at(v));
            if (identity_vertex.pass && bw != Rational((c.k() - 1) * b)) {
                identity_vertex.pass = false;
                identity_vertex.counterexample = {{"ranking", probes[pi].order()}, {"vertex", v}, {"fas_move_cost", to_string(bw)}, {"expected", (c.k() - 1) * b}};
            }
        }
        const FasInstance fb = cancel_fas(f, c.k());
        if (pi + 1 < probes.size()) {
            const Ranking& other = probes[pi + 1];
            ++cancel.checked;
            const Rational d1 = fas_cost(f, probes[pi]) - fas_cost(f, other);
            const Rational d2 = fas_cost(fb, probes[pi]) - fas_cost(fb, other);
            if (cancel.pass && d1 != d2) {
                cancel.pass = false;
                cancel.counterexample = {{"first", probes[pi].order()}, {"second", other.order()}, {"w_diff", to_string(d1)}, {"wbar_diff", to_string(d2)}};
            }
        }
        if (reversal_symmetric(c.family())) {
            ++reversal.checked;
            const std::int64_t rc = cost(c, probes[pi].reversed());
            if (reversal.pass && rc != cs.total) {
                reversal.pass = false;
                reversal.counterexample = {{"ranking", probes[pi].order()}, {"cost", cs.total}, {"reversed_cost", rc}};
            }
        }
    }
    checks.push_back(stats);
    checks.push_back(identity_total);
    checks.push_back(identity_vertex);
    checks.push_back(cancel);
    if (reversal_symmetric(c.family())) checks.push_back(reversal);
    if (planted) {
        CheckOutcome o{"planted-cost"};
        o.checked = 1;
        Json j;
        j["cost"] = cost(c, *planted);
        o.counterexample = j;
        checks.push_back(o);
    }

    Json report;
    bool all = true;
    Json list = Json::array();
    for (const auto& o : checks) {
        Json e = {{"name", o.name}, {"pass", o.pass}, {"checked", o.checked}};
        if (!o.pass || o.name == "planted-cost") e[o.pass ? "detail" : "counterexample"] = o.counterexample;
        all = all && o.pass;
        list.push_back(e);
    }
    report["checks"] = list;
    report["all_pass"] = all;
    return report;
}

inline int cmd_check(const CheckArgs& a, std::ostream& out) {
    const InstanceFile file = parse(read_file(a.file));
    const Json report = check_report(file.system, file.planted, a.seed, a.orderings);
    out << report.dump() << "\n";
    return report["all_pass"].get<bool>() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
    std::string family = "betweenness";
    int k = 0;
    std::vector<int> n = {8};
    std::vector<std::string> noise = {"0"};
    std::vector<std::string> eps = {"0.25"};
    int seeds = 10;
    std::uint64_t seed_base = 0;
    std::string guess = "oracle";
    std::string fast = "auto";
    std::string additive = "auto";
    std::string constants = "paper";
    int oracle_cap = kDefaultOracleCap;
    bool no_timing = false;
    std::string out;
};

inline const char* kBenchHeader =
    "instance_id,n,k,family,rho,eps,guess_mode,fast_solver,cost_alg,cost_opt,ratio,exact_zero_match,"
    "kendall_to_planted,kendall_to_opt,took_additive_branch,u_size,wall_ms,seed,"
    "wbar_pair_min,wbar_pair_max,dist_opt_scaled,out_of_place_frac";

struct BenchRecord {
    // sort key
    int n = 0;
    Rational rho, eps;
    std::uint64_t seed = 0;
    std::string line;
};

inline std::string fmt_double(double x) {
    std::ostringstream s;
    s << std::setprecision(6) << x;
    return s.str();
}

/// Fraction of vertices whose sigma1 position is further than
/// 3 k^2 3^(k-1) eps n from their rounded reference position.
inline double out_of_place_fraction(const ConstraintSystem& c, const Ordering& sigma1, const Ranking& reference, const Rational& eps) {
    const int n = c.n(), k = c.k();
    const Rational limit = Rational(3 * k * k * ipow(3, k - 1)) * eps * Rational(n);
    auto count_for = [&](const Ranking& ref) {
        const Ordering rounded = round_ordering(ref, eps, n);
        int count = 0;
        for (Vertex v = 0; v < n; ++v) {
            Rational d = sigma1.at(v) - rounded.at(v);
            if (d < 0) d = -d;
            if (d > limit) ++count;
        }
        return count;
    };
    int count = count_for(reference);
    if (reversal_symmetric(c.family())) count = std::min(count, count_for(reference.reversed()));
    return static_cast<double>(count) / n;
}

inline BenchRecord bench_one(const BenchArgs& a, Family family, int k, int n, const std::string& rho_text,
                             const std::string& eps_text, std::uint64_t seed) {
    const Rational rho = parse_rational(rho_text), eps = parse_rational(eps_text);
    const PlantedInstance inst = gen_planted(family, n, k, rho, seed);
    const ConstraintSystem& c = inst.system;
    std::optional<OracleResult> opt;
    if (n <= a.oracle_cap) opt = exact_opt(c, a.oracle_cap);

    PtasConfig cfg;
    cfg.eps = eps;
    cfg.seed = seed;
    cfg.guess = parse_guess(a.guess);
    cfg.fast_solver = parse_fast(a.fast);
    cfg.additive = parse_additive(a.additive);
    cfg.constants = parse_constants(a.constants);
    cfg.reference = inst.planted;
    const auto start = std::chrono::steady_clock::now();
    const PtasResult r = run_ptas(c, cfg);
    const double wall = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    const GuessRecord* stage = nullptr;
    for (const auto& g : r.stages)
        if (!stage || g.cost < stage->cost) stage = &g;
    if (r.best_guess) stage = &r.stages[*r.best_guess];

    std::string rho_id = to_string(rho);
    std::replace(rho_id.begin(), rho_id.end(), '/', '_');
    const std::string id = std::string(family_name(family)) + "-n" + std::to_string(n) + "-k" + std::to_string(k) +
                           "-rho" + rho_id + "-s" + std::to_string(seed);
    std::ostringstream row;
    row << id << ',' << n << ',' << k << ',' << family_name(family) << ',' << to_string(rho) << ',' << to_string(eps)
        << ',' << to_string(r.guess_mode) << ',' << to_string(cfg.fast_solver) << ',' << r.best_cost << ',';
    if (opt) row << opt->opt_cost;
    row << ',';
    if (opt && opt->opt_cost > 0) row << fmt_double(static_cast<double>(r.best_cost) / static_cast<double>(opt->opt_cost));
    row << ',';
    if (opt && opt->opt_cost == 0) row << (r.best_cost == 0 ? "true" : "false");
    row << ',' << distance_to(c, r.best, inst.planted) << ',';
    if (opt) row << distance_to(c, r.best, opt->witness);
    row << ',' << (r.took_additive_branch ? "true" : "false") << ',';
    if (stage) row << stage->unambiguous.size();
    row << ',' << (a.no_timing ? std::string("0") : fmt_double(wall)) << ',' << seed << ',';
    if (stage && !stage->core.degenerate && stage->core.pair_scale > 0) {
        row << fmt_double(to_double(stage->core.pair_sum_min) / static_cast<double>(stage->core.pair_scale)) << ','
            << fmt_double(to_double(stage->core.pair_sum_max) / static_cast<double>(stage->core.pair_scale));
    } else {
        row << ',';
    }
    row << ',';
    if (opt && opt->opt_cost > 0)
        row << fmt_double(static_cast<double>(distance_to(c, r.best, opt->witness)) * std::pow(static_cast<double>(n), k - 2) /
                          static_cast<double>(opt->opt_cost));
    row << ',';
    if (stage) row << fmt_double(out_of_place_fraction(c, stage->sigma1, opt ? opt->witness : inst.planted, eps));
    return BenchRecord{n, rho, eps, seed, row.str()};
}

inline int cmd_bench(const BenchArgs& a, std::ostream& out) {
    const Family family = parse_family(a.family);
    const int k = a.k > 0 ? a.k : default_arity(family);
    check_family_arity(family, k);
    parse_guess(a.guess);
    parse_fast(a.fast);
    parse_additive(a.additive);
    parse_constants(a.constants);
    if (a.seeds <= 0) throw InvalidArgument("--seeds must be positive");
    struct Job {
        int n;
        std::string rho, eps;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int n : a.n)
        for (const auto& rho : a.noise)
            for (const auto& eps : a.eps)
                for (int s = 0; s < a.seeds; ++s) jobs.push_back({n, rho, eps, a.seed_base + static_cast<std::uint64_t>(s)});

    std::vector<BenchRecord> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::optional<std::string> first_error;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next++;
            if (i >= jobs.size()) return;
            try {
                rows[i] = bench_one(a, family, k, jobs[i].n, jobs[i].rho, jobs[i].eps, jobs[i].seed);
            } catch (const std::exception& e) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = e.what();
            }
        }
    };
    const int threads = std::min<int>(threads_from_env(), static_cast<int>(jobs.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (first_error) throw Error("bench-failed", *first_error);

    std::sort(rows.begin(), rows.end(), [](const BenchRecord& x, const BenchRecord& y) {
        return std::tie(x.n, x.rho, x.seed, x.eps) < std::tie(y.n, y.rho, y.seed, y.eps);
    });
    std::ostringstream csv;
    csv << kBenchHeader << "\n";
    for (const auto& r : rows) csv << r.line << "\n";
    if (a.out.empty()) {
        out << csv.str();
    } else {
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw InvalidArgument("cannot write '" + a.out + "'");
        f << csv.str();
    }
    return 0;
}

// ---------------------------------------------------------------------------

inline void report_error(std::ostream& err, const std::string& kind, const std::string& message,
                         std::optional<double> required = std::nullopt) {
    Json j;
    j["error"] = kind;
    j["message"] = message;
    if (required) j["required"] = *required;
    err << j.dump() << "\n";
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Approximation scheme for fragile ranking CSPs in tournaments"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Generate a planted instance");
    g->add_option("--family", gen.family, "betweenness | kfast | kbetweenness | table");
    g->add_option("--n", gen.n, "Vertex count")->check(CLI::PositiveNumber);
    g->add_option("--k", gen.k, "Arity (default 3, or 4 for kbetweenness)");
    g->add_option("--noise", gen.noise, "Corruption probability (decimal or a/b)");
    g->add_option("--seed", gen.seed, "Seed");
    g->add_option("--out", gen.out, "Output file (default stdout)");

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Run the approximation scheme on an instance file");
    s->add_option("file", solve.file, "Instance file")->required();
    s->add_option("--eps", solve.eps, "Approximation parameter in (0,1]");
    s->add_option("--seed", solve.seed, "Seed");
    s->add_option("--guess", solve.guess, "exhaustive | oracle | restarts:R");
    s->add_option("--fast", solve.fast, "auto | exact | local | pivot-local");
    s->add_option("--additive", solve.additive, "auto | exact | heuristic");
    s->add_option("--constants", solve.constants, "paper | scaled:GAMMA");
    s->add_option("--max-guesses", solve.max_guesses, "Exhaustive guess budget");
    s->add_option("--exact-cap", solve.exact_cap, "Largest FAS instance for the exact solver");
    s->add_option("--oracle-cap", solve.oracle_cap, "Largest n for the exact oracle reference");
    s->add_flag("--emit-candidates", solve.emit_candidates, "Include every candidate ranking");
    s->add_flag("--emit-stages", solve.emit_stages, "Include per-guess intermediate orderings");
    s->add_flag("--timings", solve.timings, "Include wall-clock timings");

    ExactArgs exact;
    auto* e = app.add_subcommand("exact", "Exact optimum by branch and bound");
    e->add_option("file", exact.file, "Instance file")->required();
    e->add_option("--cap", exact.cap, "Largest n accepted");

    CheckArgs check;
    auto* c = app.add_subcommand("check", "Verify fragility and cost identities on an instance");
    c->add_option("file", check.file, "Instance file")->required();
    c->add_option("--seed", check.seed, "Seed for probe orderings");
    c->add_option("--orderings", check.orderings, "Random probe orderings");

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Sweep planted instances and emit CSV");
    b->add_option("--family", bench.family);
    b->add_option("--k", bench.k);
    b->add_option("--n", bench.n, "Vertex counts")->delimiter(',');
    b->add_option("--noise", bench.noise, "Noise levels")->delimiter(',');
    b->add_option("--eps", bench.eps, "eps values")->delimiter(',');
    b->add_option("--seeds", bench.seeds, "Seeds per cell");
    b->add_option("--seed-base", bench.seed_base, "First seed");
    b->add_option("--guess", bench.guess);
    b->add_option("--fast", bench.fast);
    b->add_option("--additive", bench.additive);
    b->add_option("--constants", bench.constants);
    b->add_option("--oracle-cap", bench.oracle_cap, "Largest n for which OPT is computed");
    b->add_flag("--no-timing", bench.no_timing, "Write 0 in wall_ms for byte-stable output");
    b->add_option("--out", bench.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& pe) {
        report_error(err, "usage", pe.what());
        return 2;
    }

    try {
        if (g->parsed()) return cmd_gen(gen, out);
        if (s->parsed()) return cmd_solve(solve, out);
        if (e->parsed()) return cmd_exact(exact, out);
        if (c->parsed()) return cmd_check(check, out);
        if (b->parsed()) return cmd_bench(bench, out);
    } catch (const GuessBudgetExceeded& ex) {
        report_error(err, ex.kind(), ex.what(), ex.required());
        return 1;
    } catch (const Error& ex) {
        const bool usage = ex.kind() == "invalid-argument" || ex.kind() == "incompatible-family";
        report_error(err, ex.kind(), ex.what());
        return usage ? 2 : 1;
    } catch (const std::exception& ex) {
        report_error(err, "internal", ex.what());
        return 1;
    }
    return 2;
}

} // namespace rankcsp::cli
