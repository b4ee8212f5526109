#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rankcsp/rankcsp.hpp"

using namespace rankcsp;

namespace {

ConstraintSystem single_betweenness(Vertex designated) {
    return ConstraintSystem(Family::Betweenness3, 3, 3, {designated});
}

Ordering ord(std::vector<std::pair<Vertex, Position>> e) { return Ordering(std::move(e)); }

} // namespace

TEST(Evaluate, BetweennessMiddleIsSatisfied) {
    const std::vector<Vertex> s{0, 1, 2};
    EXPECT_EQ(evaluate(single_betweenness(1), s, Ranking({0, 1, 2})), 0);
    EXPECT_EQ(evaluate(single_betweenness(0), s, Ranking({0, 1, 2})), 1);
}

TEST(Evaluate, KBetweennessEndpoints) {
    const ConstraintSystem c(Family::KBetweenness, 4, 4, {0, 3});
    const std::vector<Vertex> s{0, 1, 2, 3};
    EXPECT_EQ(evaluate(c, s, Ranking({0, 1, 2, 3})), 0);
    EXPECT_EQ(evaluate(c, s, Ranking({1, 0, 2, 3})), 1);
    EXPECT_EQ(evaluate(c, s, Ranking({3, 2, 1, 0})), 0);
}

TEST(Evaluate, KFastAndTable) {
    const ConstraintSystem fast(Family::KFast, 3, 3, {2, 0, 1});
    EXPECT_EQ(fast.violated(std::vector<Vertex>{2, 0, 1}), 0);
    EXPECT_EQ(fast.violated(std::vector<Vertex>{0, 2, 1}), 1);
    // Lexicographic permutation order of {0,1,2}: 012 021 102 120 201 210.
    const ConstraintSystem table(Family::ExplicitTable, 3, 3, {1, 1, 0, 1, 1, 0});
    EXPECT_EQ(table.violated(std::vector<Vertex>{1, 0, 2}), 0);
    EXPECT_EQ(table.violated(std::vector<Vertex>{2, 1, 0}), 0);
    EXPECT_EQ(table.violated(std::vector<Vertex>{0, 1, 2}), 1);
}

TEST(Evaluate, ErrorPaths) {
    const ConstraintSystem c = single_betweenness(1);
    EXPECT_THROW(evaluate(c, std::vector<Vertex>{0, 1}, Ranking({0, 1})), MalformedInstance);
    EXPECT_THROW(evaluate(c, std::vector<Vertex>{0, 1, 2}, Ranking({0, 1, 3})), DomainMismatch);
    EXPECT_THROW(ConstraintSystem(Family::Betweenness3, 3, 3, {5}), MalformedInstance);
    EXPECT_THROW(ConstraintSystem(Family::KFast, 3, 3, {0, 0, 1}), MalformedInstance);
    EXPECT_THROW(ConstraintSystem(Family::KBetweenness, 4, 4, {1, 1}), MalformedInstance);
    EXPECT_THROW(ConstraintSystem(Family::ExplicitTable, 3, 3, {0, 1, 2, 0, 0, 0}), MalformedInstance);
    EXPECT_THROW(ConstraintSystem(Family::ExplicitTable, 5, 5, std::vector<int>(120, 0)), IncompatibleFamily);
    EXPECT_THROW(ConstraintSystem(Family::Betweenness3, 4, 3, {0}), MalformedInstance);
}

TEST(ConstraintSystem, SubsetIndexRoundTrip) {
    const ConstraintSystem c = gen_uniform(Family::KFast, 9, 4, 3);
    for (std::size_t i = 0; i < c.constraint_count(); ++i) EXPECT_EQ(c.index_of(c.subset_at(i)), i);
}

TEST(Cost, PlantedAndReversalAreFree) {
    const PlantedInstance p = gen_planted(Family::Betweenness3, 9, 3, Rational(0), 11);
    EXPECT_EQ(cost(p.system, p.planted), 0);
    EXPECT_EQ(cost(p.system, p.planted.reversed()), 0);
}

TEST(Cost, SingleConstraintDesignatedFirst) {
    EXPECT_EQ(cost(single_betweenness(1), Ranking({1, 0, 2})), 1);
}

TEST(Cost, MatchesBruteForceOnRandomOrderings) {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const int k = 2 + trial % 3;
        const ConstraintSystem c = gen_uniform(trial % 2 ? Family::KFast : Family::ExplicitTable, 8, k, 100 + trial);
        const Ordering sigma = oracle::random_ordering(oracle::iota(8), rng);
        EXPECT_EQ(cost(c, sigma), oracle::cost(c, sigma));
        EXPECT_EQ(cost(c, sigma), cost(c, ranking_of(sigma)));
    }
}

TEST(MoveCost, HandExamples) {
    const ConstraintSystem c = single_betweenness(1);
    const Ordering sigma = ord({{0, Rational(1)}, {2, Rational(2)}});
    EXPECT_EQ(move_cost(c, sigma, 1, Rational(3, 2)), 0);
    EXPECT_EQ(move_cost(c, sigma, 1, Rational(5, 2)), 1);
    EXPECT_THROW(move_cost(c, sigma, 1, Rational(2)), PositionCollision);
    // Fewer than k-1 other vertices: empty sum.
    EXPECT_EQ(move_cost(c, ord({{0, Rational(1)}}), 1, Rational(2)), 0);
}

TEST(MoveCost, MatchesBruteForce) {
    Rng rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const ConstraintSystem c = gen_uniform(Family::Betweenness3, 8, 3, 200 + trial);
        const Ordering sigma = oracle::random_ordering(oracle::iota(8), rng);
        const Vertex v = static_cast<Vertex>(rng.below(8));
        const Position p = Rational(static_cast<std::int64_t>(rng.below(80)) - 40, 7) + Rational(1, 13);
        EXPECT_EQ(move_cost(c, sigma, v, p), oracle::move_cost(c, sigma, v, p));
        EXPECT_EQ(move_cost(c, sigma, v, sigma.at(v)), oracle::move_cost(c, sigma, v, sigma.at(v)));
    }
}

TEST(MoveCost, ProfileMatchesPointQueries) {
    Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 2 + trial % 3;
        const ConstraintSystem c = gen_uniform(Family::KFast, 8, k, 300 + trial);
        const Ranking r = oracle::random_ranking(8, rng);
        const Vertex v = r.order()[rng.below(8)];
        std::vector<Vertex> rest;
        for (Vertex u : r.order())
            if (u != v) rest.push_back(u);
        const auto profile = move_cost_profile(c, rest, v);
        const Ordering others = Ordering::from_ranking(Ranking(rest));
        for (std::size_t g = 0; g <= rest.size(); ++g)
            EXPECT_EQ(profile[g], move_cost(c, others, v, Rational(static_cast<std::int64_t>(g)) + Rational(1, 2)));
    }
}

TEST(CostStats, PerVertexSumsToKTimesTotal) {
    Rng rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 2 + trial % 3;
        const ConstraintSystem c = gen_uniform(Family::KFast, 8, k, 400 + trial);
        const Ordering sigma = oracle::random_ordering(oracle::iota(8), rng);
        const CostStats s = cost_stats(c, sigma);
        std::int64_t sum = 0;
        for (std::size_t i = 0; i < sigma.size(); ++i) {
            const Vertex v = sigma.domain()[i];
            EXPECT_EQ(s.per_vertex[i], move_cost(c, sigma, v, sigma.at(v)));
            sum += s.per_vertex[i];
        }
        EXPECT_EQ(sum, k * s.total);
        EXPECT_EQ(s.total, cost(c, sigma));
    }
}

TEST(RankingOf, Examples) {
    EXPECT_EQ(ranking_of(ord({{4, Rational(1, 5)}, {9, Rational(71, 10)}})).order(), (std::vector<Vertex>{4, 9}));
    const Ranking r({3, 0, 2, 1});
    EXPECT_EQ(ranking_of(Ordering::from_ranking(r)), r);
    const int n = 10;
    EXPECT_EQ(ranking_of(ord({{7, Rational(5) + Rational(7, n + 1)}, {2, Rational(5) + Rational(2, n + 1)}})).order(),
              (std::vector<Vertex>{2, 7}));
}

TEST(Ranking, RejectsDuplicates) { EXPECT_THROW(Ranking({1, 2, 1}), InvalidArgument); }

TEST(Ordering, RejectsCollisions) {
    EXPECT_THROW(ord({{0, Rational(1)}, {1, Rational(1)}}), PositionCollision);
    EXPECT_THROW(ord({{0, Rational(1)}, {0, Rational(2)}}), InvalidArgument);
}

TEST(RoundOrdering, Formula) {
    const int n = 10;
    std::vector<Vertex> order{0, 1, 2, 4, 5, 6, 3, 7, 8, 9};  // rank(3) = 7
    const Ordering rounded = round_ordering(Ranking(order), Rational(1, 2), n);
    EXPECT_EQ(rounded.at(3), Rational(5) + Rational(3, 11));
}

TEST(RoundOrdering, EpsOneKeepsEveryoneInBucketZeroByRank) {
    // With eps = 1 only rank n reaches bucket 1; all others share bucket 0
    // and are ordered by id.
    const int n = 6;
    const Ranking r({5, 3, 1, 0, 4, 2});
    const Ordering rounded = round_ordering(r, Rational(1), n);
    for (Vertex v = 0; v < n; ++v) {
        const std::int64_t bucket = bucket_of(rounded.at(v), v, n, Rational(1));
        EXPECT_EQ(bucket, r.rank(v) == n ? 1 : 0);
    }
    std::vector<Vertex> first;
    const Ranking seq = ranking_of(rounded);
    for (Vertex v : seq.order())
        if (r.rank(v) != n) first.push_back(v);
    EXPECT_TRUE(std::is_sorted(first.begin(), first.end()));
}

TEST(RoundOrdering, WithinBucketOrderIsById) {
    const int n = 12;
    Rng rng(31);
    const Ranking r = oracle::random_ranking(n, rng);
    const Rational eps(1, 4);
    const Ordering rounded = round_ordering(r, eps, n);
    const std::vector<Vertex> seq = ranking_of(rounded).order();
    for (std::size_t i = 1; i < seq.size(); ++i) {
        const auto b0 = bucket_of(rounded.at(seq[i - 1]), seq[i - 1], n, eps);
        const auto b1 = bucket_of(rounded.at(seq[i]), seq[i], n, eps);
        EXPECT_LE(b0, b1);
        if (b0 == b1) {
            EXPECT_LT(seq[i - 1], seq[i]);
        }
    }
}

TEST(PositionGrid, Examples) {
    EXPECT_EQ(position_grid(3, 10, Rational(1, 2)),
              (std::vector<Position>{Rational(3, 11), Rational(5) + Rational(3, 11), Rational(10) + Rational(3, 11)}));
    EXPECT_EQ(position_grid(0, 7, Rational(1)).size(), 2u);
    EXPECT_EQ(position_grid(0, 10, Rational(3, 10)).size(), 4u);
    EXPECT_THROW(position_grid(0, 10, Rational(0)), InvalidArgument);
    EXPECT_THROW(position_grid(0, 10, Rational(3, 2)), InvalidArgument);
}

TEST(PositionGrid, DistinctVerticesNeverShare) {
    const int n = 9;
    for (const Rational eps : {Rational(1, 5), Rational(1, 3), Rational(2, 7), Rational(1)}) {
        std::vector<Position> all;
        for (Vertex u = 0; u < n; ++u) {
            auto g = position_grid(u, n, eps);
            all.insert(all.end(), g.begin(), g.end());
        }
        std::sort(all.begin(), all.end());
        EXPECT_EQ(std::adjacent_find(all.begin(), all.end()), all.end());
    }
}

TEST(KendallTau, Examples) {
    const Ranking id = Ranking::identity(4);
    EXPECT_EQ(kendall_tau(id, id), 0);
    EXPECT_EQ(kendall_tau(id, id.reversed()), 6);
    EXPECT_EQ(kendall_tau(id, Ranking({0, 2, 1, 3})), 1);
    EXPECT_THROW(kendall_tau(id, Ranking({0, 1, 2, 5})), DomainMismatch);
}

TEST(KendallTau, MetricAndMatchesQuadraticReference) {
    Rng rng(37);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 1 + static_cast<int>(rng.below(30));
        const auto dom = oracle::iota(m);
        const Ordering a = oracle::random_ordering(dom, rng), b = oracle::random_ordering(dom, rng),
                       c = oracle::random_ordering(dom, rng);
        EXPECT_EQ(kendall_tau(a, b), oracle::kendall(a, b));
        EXPECT_EQ(kendall_tau(a, b), kendall_tau(b, a));
        EXPECT_LE(kendall_tau(a, c), kendall_tau(a, b) + kendall_tau(b, c));
        EXPECT_EQ(kendall_tau(a, b) == 0, ranking_of(a) == ranking_of(b));
    }
}

TEST(Crossings, Examples) {
    const Ordering a = Ordering::from_ranking(Ranking({0, 1, 2, 3}));
    EXPECT_EQ(crossing_stats(a, Rational(5, 2), a, Rational(5, 2)), (CrossingStats{0, 0, 0}));
    const Ordering b = a.with(1, Rational(7, 2));
    EXPECT_EQ(crossing_stats(a, Rational(5, 2), b, Rational(5, 2)), (CrossingStats{1, 0, 1}));
}

TEST(Crossings, MatchBruteForceAndFlowIdentity) {
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        const auto dom = oracle::iota(10);
        const Ordering a = oracle::random_ordering(dom, rng), b = oracle::random_ordering(dom, rng);
        // Odd multiples of 1/14 never coincide with an a/7 position.
        const Position p(2 * static_cast<std::int64_t>(rng.below(50)) - 49, 14), q(2 * static_cast<std::int64_t>(rng.below(50)) - 49, 14);
        CrossingStats expect;
        std::int64_t above_a = 0, above_b = 0;
        for (Vertex v : dom) {
            const bool left_a = a.at(v) < p, left_b = b.at(v) < q;
            if (left_a && !left_b) ++expect.left_to_right;
            if (!left_a && left_b) ++expect.right_to_left;
            above_a += !left_a;
            above_b += !left_b;
        }
        expect.net_flow = above_b - above_a;
        const CrossingStats got = crossing_stats(a, p, b, q);
        EXPECT_EQ(got, expect);
        EXPECT_EQ(got.left_to_right - got.right_to_left, got.net_flow);
    }
}

TEST(Fragility, FamiliesClassifyAsExpected) {
    const ConstraintSystem bt = gen_uniform(Family::Betweenness3, 6, 3, 1);
    const ConstraintSystem kb = gen_uniform(Family::KBetweenness, 6, 4, 2);
    for (int k = 2; k <= 5; ++k) {
        const ConstraintSystem kf = gen_uniform(Family::KFast, 6, k, 3);
        for (std::size_t i = 0; i < kf.constraint_count(); ++i)
            EXPECT_TRUE(check_fragility(kf, kf.subset_at(i), FragilityMode::Fragile));
    }
    for (std::size_t i = 0; i < bt.constraint_count(); ++i) {
        EXPECT_TRUE(check_fragility(bt, bt.subset_at(i), FragilityMode::Fragile));
        EXPECT_TRUE(check_fragility(bt, bt.subset_at(i), FragilityMode::Weak));
    }
    for (std::size_t i = 0; i < kb.constraint_count(); ++i) {
        EXPECT_TRUE(check_fragility(kb, kb.subset_at(i), FragilityMode::Weak));
        EXPECT_FALSE(check_fragility(kb, kb.subset_at(i), FragilityMode::Fragile));
    }
}

TEST(Fragility, CounterexampleIsAGenuineSingleMove) {
    const ConstraintSystem kb(Family::KBetweenness, 4, 4, {0, 3});
    const auto w = fragility_counterexample(kb, std::vector<Vertex>{0, 1, 2, 3}, FragilityMode::Fragile);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(kb.violated(w->before), 0);
    EXPECT_EQ(kb.violated(w->after), 0);
    EXPECT_NE(w->before, w->after);
}

TEST(Fragility, AllSatisfyingTableIsNotFragile) {
    const ConstraintSystem t(Family::ExplicitTable, 3, 3, std::vector<int>(6, 0));
    EXPECT_FALSE(check_fragility(t, std::vector<Vertex>{0, 1, 2}, FragilityMode::Weak));
}

TEST(MovePairBound, ArityThreeEveryCrossedTripleIsPaid) {
    // For fragile arity-3 systems, every Q with a vertex strictly between
    // the two placements is violated at one of them.
    Rng rng(43);
    for (int trial = 0; trial < 60; ++trial) {
        const ConstraintSystem c = trial % 2 ? gen_uniform(Family::Betweenness3, 9, 3, 500 + trial)
                                             : gen_uniform(Family::KFast, 9, 3, 500 + trial);
        const Ordering sigma = oracle::random_ordering(oracle::iota(9), rng);
        const Vertex v = static_cast<Vertex>(rng.below(9));
        const Position p(2 * static_cast<std::int64_t>(rng.below(50)) - 49, 14), q(2 * static_cast<std::int64_t>(rng.below(50)) - 49, 14);
        const std::int64_t between = between_count(sigma, v, p, q);
        const std::int64_t pair = move_cost(c, sigma, v, p) + move_cost(c, sigma, v, q);
        // Q meets B: C(8,2) - C(8 - |B|, 2).
        EXPECT_GE(pair, binomial(8, 2) - binomial(8 - between, 2));
        if (between >= 1) {
            EXPECT_GE(pair, 1);
        }
    }
}

TEST(MovePairBound, Value) {
    EXPECT_EQ(move_pair_lower_bound(3, 10, 3), Rational(3) * Rational(36) / Rational(81));
}
