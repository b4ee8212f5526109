// Acceptance suite: one PASS/FAIL line per criterion, plus DIAG lines for
// measured quantities that are reported but not asserted.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "rankcsp/rankcsp.hpp"

using namespace rankcsp;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " [" << detail << "]" << std::endl;
    if (!ok) ++failures;
}

void diag(const std::string& text) { std::cout << "DIAG " << text << std::endl; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixed(double x, int digits = 3) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << x;
    return s.str();
}

Family family_for(int k, std::uint64_t salt) {
    if (k == 3 && salt % 2) return Family::Betweenness3;
    if (k >= 4 && salt % 2) return Family::KBetweenness;
    return salt % 3 == 0 ? Family::ExplicitTable : Family::KFast;
}

std::int64_t distance_mod_reversal(const ConstraintSystem& c, const Ranking& a, const Ranking& b) {
    std::int64_t d = kendall_tau(a, b);
    if (reversal_symmetric(c.family())) d = std::min(d, kendall_tau(a, b.reversed()));
    return d;
}

void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(101);
    int cases = 0, bad = 0;
    for (int i = 0; i < 200; ++i) {
        const int k = 2 + i % 3;
        const int n = 6 + (i / 3) % 5;
        const ConstraintSystem c = gen_uniform(family_for(k, static_cast<std::uint64_t>(i / 3)), n, k, 1000 + static_cast<std::uint64_t>(i));
        const Ordering sigma = oracle::random_ordering(oracle::iota(n), rng);
        const FasInstance f = derive_fas(c, sigma);
        ++cases;
        bool ok = fas_cost(f, sigma) == Rational(binomial(k, 2) * cost(c, sigma));
        for (Vertex v = 0; v < n; ++v)
            ok = ok && fas_move_cost(f, sigma, v, sigma.at(v)) == Rational((k - 1) * move_cost(c, sigma, v, sigma.at(v)));
        bad += !ok;
    }
    const double secs = seconds_since(t0);
    report(1, bad == 0 && secs < 60, "derived FAS cost identities (total and per vertex)",
           std::to_string(cases - bad) + "/" + std::to_string(cases) + " exact, " + fixed(secs) + " s");
}

void criterion2() {
    Rng rng(202);
    int checks = 0, bad = 0;
    for (int i = 0; i < 100; ++i) {
        const int n = 5 + i % 6;
        const ConstraintSystem c = gen_uniform(i % 2 ? Family::Betweenness3 : Family::KFast, n, 3, 2000 + static_cast<std::uint64_t>(i));
        const FasInstance w = derive_fas(c, oracle::random_ordering(oracle::iota(n), rng));
        const FasInstance wb = cancel_fas(w, 3);
        for (int j = 0; j < 10; ++j) {
            const Ranking a = oracle::random_ranking(n, rng), b = oracle::random_ranking(n, rng);
            ++checks;
            bad += fas_cost(w, a) - fas_cost(w, b) != fas_cost(wb, a) - fas_cost(wb, b);
        }
    }
    report(2, bad == 0, "cancellation preserves cost differences",
           std::to_string(checks - bad) + "/" + std::to_string(checks) + " pairs exact");
}

void criterion3() {
    std::int64_t bt_total = 0, bt_ok = 0, kf_total = 0, kf_ok = 0;
    int kb_instances = 0, kb_weak_ok = 0, kb_witnessed = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int n = 6 + static_cast<int>(seed % 5);
        const ConstraintSystem bt = gen_uniform(Family::Betweenness3, n, 3, 3000 + seed);
        for (std::size_t i = 0; i < bt.constraint_count(); ++i) {
            ++bt_total;
            bt_ok += check_fragility(bt, bt.subset_at(i), FragilityMode::Fragile);
        }
        for (int k = 2; k <= 4; ++k) {
            const ConstraintSystem kf = gen_uniform(Family::KFast, n, k, 3100 + seed);
            for (std::size_t i = 0; i < kf.constraint_count(); ++i) {
                ++kf_total;
                kf_ok += check_fragility(kf, kf.subset_at(i), FragilityMode::Fragile);
            }
        }
        const ConstraintSystem kb = gen_uniform(Family::KBetweenness, n, 4, 3200 + seed);
        ++kb_instances;
        bool weak = true, witnessed = false;
        for (std::size_t i = 0; i < kb.constraint_count(); ++i) {
            weak = weak && check_fragility(kb, kb.subset_at(i), FragilityMode::Weak);
            witnessed = witnessed || fragility_counterexample(kb, kb.subset_at(i), FragilityMode::Fragile).has_value();
        }
        kb_weak_ok += weak;
        kb_witnessed += witnessed;
    }
    const bool ok = bt_ok == bt_total && kf_ok == kf_total && kb_weak_ok == kb_instances && kb_witnessed == kb_instances;
    report(3, ok, "fragility classification",
           "betweenness fragile " + std::to_string(bt_ok) + "/" + std::to_string(bt_total) + ", kfast fragile " +
               std::to_string(kf_ok) + "/" + std::to_string(kf_total) + ", kbetweenness weak " + std::to_string(kb_weak_ok) +
               "/" + std::to_string(kb_instances) + " with strict-fragility counterexample in " +
               std::to_string(kb_witnessed) + "/" + std::to_string(kb_instances));
}

void criterion4() {
    Rng rng(404);
    int move_bad = 0, fas_bad = 0, move_cost_bad = 0;
    for (int i = 0; i < 100; ++i) {
        const int k = 2 + i % 3;
        const int n = std::max(k, 4 + i % 6);
        const ConstraintSystem c = gen_uniform(family_for(k, static_cast<std::uint64_t>(i)), n, k, 4000 + static_cast<std::uint64_t>(i));
        const Ordering sigma = oracle::random_ordering(oracle::iota(n), rng);
        const Vertex v = static_cast<Vertex>(rng.below(static_cast<std::uint64_t>(n)));
        const Position p(2 * static_cast<std::int64_t>(rng.below(60)) - 59, 14);
        move_bad += move_cost(c, sigma, v, p) != oracle::move_cost(c, sigma, v, p);

        const FasInstance f = cancel_fas(derive_fas(c, oracle::random_ordering(oracle::iota(n), rng)), k);
        fas_bad += fas_cost(f, sigma) != oracle::fas_cost(f, sigma);
        move_cost_bad += fas_move_cost(f, sigma, v, p) != oracle::fas_move_cost(f, sigma, v, p);
    }
    report(4, move_bad + fas_bad + move_cost_bad == 0, "cost kernels match brute-force references",
           "move_cost " + std::to_string(100 - move_bad) + "/100, fas_cost " + std::to_string(100 - fas_bad) +
               "/100, fas_move_cost " + std::to_string(100 - move_cost_bad) + "/100");
}

void criterion5() {
    Rng rng(505);
    int fas_bad = 0, csp_bad = 0;
    for (int i = 0; i < 100; ++i) {
        const int m = 3 + i % 6;
        const ConstraintSystem c = gen_uniform(i % 2 ? Family::Betweenness3 : Family::KFast, m, 3, 5000 + static_cast<std::uint64_t>(i));
        const FasInstance f = cancel_fas(derive_fas(c, oracle::random_ordering(oracle::iota(m), rng)), 3);
        fas_bad += fas_cost(f, solve_fas_exact(f)) != oracle::fas_opt(f);
    }
    for (int i = 0; i < 100; ++i) {
        const int n = 4 + i % 4;
        const ConstraintSystem c = i % 3 == 0 ? gen_planted(Family::Betweenness3, n, 3, Rational(1, 5), 5100 + static_cast<std::uint64_t>(i)).system
                                              : gen_uniform(family_for(3, static_cast<std::uint64_t>(i)), n, 3, 5200 + static_cast<std::uint64_t>(i));
        csp_bad += exact_opt(c).opt_cost != enumerate_opt(c).opt_cost;
    }
    report(5, fas_bad + csp_bad == 0, "exact solvers agree with permutation enumeration",
           "FAS " + std::to_string(100 - fas_bad) + "/100 (|U| <= 8), CSP " + std::to_string(100 - csp_bad) + "/100 (n <= 7)");
}

PtasConfig oracle_exact_config(const Ranking& reference, Rational eps) {
    PtasConfig cfg;
    cfg.eps = eps;
    cfg.guess = GuessMode::oracle();
    cfg.fast_solver = FastSolver::Exact;
    cfg.reference = reference;
    return cfg;
}

void criterion6() {
    const auto t0 = std::chrono::steady_clock::now();
    int ok = 0, via_guess = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const int n = 6 + static_cast<int>(seed % 4);
        const PlantedInstance p = gen_planted(Family::Betweenness3, n, 3, Rational(0), 6000 + seed);
        const PtasResult r = run_ptas(p.system, oracle_exact_config(p.planted, Rational(1, 5)));
        ok += r.best_cost == 0 && distance_mod_reversal(p.system, r.best, p.planted) == 0;
        via_guess += !r.took_additive_branch && r.best_guess.has_value() && r.stages[*r.best_guess].cost == 0 &&
                     distance_mod_reversal(p.system, r.stages[*r.best_guess].pi4, p.planted) == 0;
    }
    const double secs = seconds_since(t0);
    report(6, ok == 100 && secs < 120, "zero-noise recovery, betweenness n in 6..9, eps 0.2, oracle guess, exact FAS",
           std::to_string(ok) + "/100 cost 0 and Kendall 0, " + fixed(secs) + " s");
    diag("criterion 6: runs recovered by the guess branch itself (pi4 cost 0, Kendall 0): " + std::to_string(via_guess) + "/100");
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double ratio_of(std::int64_t alg, std::int64_t opt) {
    if (opt == 0) return alg == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    return static_cast<double>(alg) / static_cast<double>(opt);
}

void criterion7() {
    const auto t0 = std::chrono::steady_clock::now();
    const Rational eps(1, 4);
    std::vector<double> ratios, guess_only;
    int additive = 0;
    double oop = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const PlantedInstance p = gen_planted(Family::Betweenness3, 9, 3, Rational(1, 20), 7000 + seed);
        const std::int64_t opt = exact_opt(p.system).opt_cost;
        const PtasResult r = run_ptas(p.system, oracle_exact_config(p.planted, eps));
        ratios.push_back(ratio_of(r.best_cost, opt));
        additive += r.took_additive_branch;

        // Same pipeline with the first-stage threshold lifted so the guess
        // branch always runs; its pi4 alone is measured.
        PtasConfig forced = oracle_exact_config(p.planted, eps);
        forced.constants = ConstantsMode{true, Rational(1000000)};
        const PtasResult g = run_ptas(p.system, forced);
        guess_only.push_back(ratio_of(g.stages.front().cost, opt));
        oop += cli::out_of_place_fraction(p.system, g.stages.front().sigma1, p.planted, eps);
    }
    const auto within = std::count_if(ratios.begin(), ratios.end(), [](double x) { return x <= 1.25; });
    const double med = median(ratios);
    report(7, within >= 95 && med <= 1.05, "approximation regression, betweenness n=9, noise 0.05, eps 0.25",
           std::to_string(within) + "/100 with ratio <= 1.25, median " + fixed(med) + ", " + fixed(seconds_since(t0)) + " s");
    const auto g_within = std::count_if(guess_only.begin(), guess_only.end(), [](double x) { return x <= 1.25; });
    diag("criterion 7: first-stage additive branch taken in " + std::to_string(additive) + "/100 runs");
    diag("criterion 7: guess-branch pi4 alone: " + std::to_string(g_within) + "/100 with ratio <= 1.25, median " +
         fixed(median(guess_only)) + ", max " + fixed(*std::max_element(guess_only.begin(), guess_only.end())));
    diag("criterion 7: mean out-of-place fraction of sigma1 " + fixed(oop / 100.0, 4));
}

void criterion8() {
    const char* argv[] = {"rankcsp", "bench", "--family", "betweenness", "--n", "8", "--noise", "0.05", "--eps", "0.25",
                          "--seeds", "5", "--no-timing", "--constants", "scaled:1000000"};
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(std::size(argv)), argv, out, err);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    std::vector<std::string> names;
    std::stringstream hs(header);
    for (std::string cell; std::getline(hs, cell, ',');) names.push_back(cell);
    const std::vector<std::string> wanted{"wbar_pair_min", "wbar_pair_max", "dist_opt_scaled", "out_of_place_frac"};
    int present = 0, filled_rows = 0, rows = 0;
    std::vector<std::size_t> idx;
    for (const auto& w : wanted) {
        const auto it = std::find(names.begin(), names.end(), w);
        if (it != names.end()) {
            ++present;
            idx.push_back(static_cast<std::size_t>(it - names.begin()));
        }
    }
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        ++rows;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        cells.resize(names.size());
        bool filled = true;
        for (std::size_t i : idx) filled = filled && !cells[i].empty();
        filled_rows += filled;
        if (rows == 1) diag("criterion 8 sample row: " + line);
    }
    report(8, code == 0 && present == 4 && rows == 5 && filled_rows == rows, "bench emits diagnostic columns",
           std::to_string(present) + "/4 columns, " + std::to_string(rows) + " rows, " + std::to_string(filled_rows) +
               " rows with every diagnostic populated");
}

void criterion9() {
    const PlantedInstance p = gen_planted(Family::Betweenness3, 60, 3, Rational(1, 200), 9000);
    PtasConfig cfg;
    cfg.eps = Rational(1, 5);
    cfg.guess = GuessMode::restarts_of(8);
    cfg.fast_solver = FastSolver::PivotLocal;
    cfg.seed = 9;
    const auto t0 = std::chrono::steady_clock::now();
    const PtasResult r = run_ptas(p.system, cfg);
    const double secs = seconds_since(t0);
    const std::int64_t baseline = cost(p.system, pivot_baseline(p.system, cfg.seed));
    report(9, secs < 60 && r.best_cost <= baseline, "n=60 smoke run, restarts:8, pivot-local",
           "cost " + std::to_string(r.best_cost) + " vs pivot baseline " + std::to_string(baseline) + ", " + fixed(secs) + " s");
    std::int64_t best_guess = std::numeric_limits<std::int64_t>::max();
    for (const auto& cand : r.candidates) best_guess = std::min(best_guess, cand.cost);
    diag("criterion 9: planted cost " + std::to_string(p.noised_count) + ", additive branch " +
         (r.took_additive_branch ? "taken" : "not taken") + ", additive heuristic cost " + std::to_string(r.additive.cost) +
         (r.candidates.empty() ? std::string() : ", best guess-branch pi4 cost " + std::to_string(best_guess)));
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
