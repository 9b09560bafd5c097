#include <gtest/gtest.h>

#include "communitylab/community.hpp"
#include "communitylab/generators.hpp"
#include "communitylab/rng.hpp"
#include "oracles.hpp"

using namespace communitylab;

namespace {

CommunityGraph graph(std::vector<std::uint64_t> mult, std::vector<std::pair<GroupId, GroupId>> edges) {
    std::vector<Group> groups;
    for (auto m : mult) groups.push_back({m, "{}"});
    return CommunityGraph::from_edges(std::move(groups), std::move(edges));
}

CommunityGraph k3() { return graph({1, 1, 1}, {{0, 1}, {1, 2}, {0, 2}}); }
CommunityGraph path3() { return graph({1, 1, 1}, {{0, 1}, {1, 2}}); }

SubsetSelection sel(std::vector<std::uint64_t> c) { return SubsetSelection(std::move(c)); }

// Random graph with group multiplicities, at most `labeled` labeled vertices.
CommunityGraph random_grouped(std::uint64_t seed, std::uint32_t labeled) {
    Rng rng(seed);
    std::vector<std::uint64_t> mult;
    std::uint32_t used = 0;
    while (used < labeled) {
        const std::uint64_t m = std::min<std::uint64_t>(1 + rng.below(3), labeled - used);
        mult.push_back(m);
        used += static_cast<std::uint32_t>(m);
    }
    std::vector<std::pair<GroupId, GroupId>> edges;
    const std::uint64_t density = 1 + rng.below(4);
    for (GroupId a = 0; a < mult.size(); ++a)
        for (GroupId b = a + 1; b < mult.size(); ++b)
            if (rng.chance(density, 5)) edges.emplace_back(a, b);
    return graph(std::move(mult), std::move(edges));
}

oracle::Frac F(const Rational& r) { return {r.num(), r.den()}; }

} // namespace

TEST(Profile, Examples) {
    const auto p = profile(k3(), sel({1, 1, 1}));
    EXPECT_EQ(p.alpha_star, Rational(1));
    EXPECT_EQ(p.beta_star, Rational(0));

    const auto q = profile(path3(), sel({1, 1, 0}));
    EXPECT_EQ(q.alpha_star, Rational(1));
    EXPECT_EQ(q.beta_star, Rational(1, 2));

    const auto twins = graph({2}, {});
    EXPECT_EQ(profile(twins, sel({2})).alpha_star, Rational(1, 2));

    EXPECT_THROW(profile(k3(), sel({0, 0, 0})), ParameterError);
    EXPECT_THROW(profile(twins, sel({3})), ParameterError);
}

TEST(IsCommunity, Examples) {
    EXPECT_TRUE(is_community(k3(), sel({1, 1, 1}), 1, 0));
    EXPECT_FALSE(is_community(path3(), sel({1, 1, 0}), 1, Rational(2, 5)));
    EXPECT_TRUE(is_community(path3(), sel({1, 1, 0}), 1, Rational(1, 2)));
    EXPECT_TRUE(is_community(graph({1, 1}, {}), sel({1, 0}), 1, 0));
}

TEST(Enumerate, K3AndEmptyGraph) {
    const auto all = enumerate_communities(k3(), 1, 0);
    ASSERT_EQ(all.size(), 1u);
    EXPECT_EQ(all[0], sel({1, 1, 1}));
    EXPECT_EQ(count_communities(k3(), 1, 0, 2), 1);
    EXPECT_EQ(count_communities(graph({1, 1}, {}), 1, 0, 1), 2);
}

TEST(Enumerate, BudgetRefusal) {
    // A path has no twins, so compression leaves 4^40 count vectors.
    std::vector<std::pair<GroupId, GroupId>> edges;
    for (GroupId v = 0; v + 1 < 40; ++v) edges.emplace_back(v, v + 1);
    const auto g = graph(std::vector<std::uint64_t>(40, 3), edges);
    EXPECT_THROW(count_communities(g, Rational(1, 2), 0, 1, 1e6), BudgetExceeded);
}

TEST(Count, MatchesLabeledOracleOnRandomGraphs) {
    const std::vector<std::pair<Rational, Rational>> cells{
        {1, 0}, {1, Rational(1, 2)}, {Rational(3, 4), Rational(1, 4)}, {Rational(1, 2), Rational(1, 3)}, {Rational(2, 3), 1}};
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto g = random_grouped(seed, 6 + seed % 9);
        for (const auto& [a, b] : cells) {
            for (std::uint64_t min_size : {1u, 2u}) {
                const auto expected = oracle::count(g, F(a), F(b), min_size);
                ASSERT_EQ(count_communities(g, a, b, min_size), expected)
                    << "seed " << seed << " alpha " << a << " beta " << b << " min " << min_size;
            }
        }
    }
}

TEST(Enumerate, CountVectorsMatchOracle) {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const auto g = random_grouped(seed, 10);
        for (const auto& [a, b] : std::vector<std::pair<Rational, Rational>>{{1, Rational(1, 3)}, {Rational(3, 5), Rational(1, 5)}}) {
            const auto ref = oracle::communities(g, F(a), F(b));
            const auto got = enumerate_communities(g, a, b);
            ASSERT_EQ(got.size(), ref.size()) << "seed " << seed;
            std::size_t i = 0;
            for (const auto& [counts, w] : ref) {
                EXPECT_EQ(got[i].counts, counts);
                EXPECT_EQ(labeled_weight(g, got[i]), w);
                ++i;
            }
        }
    }
}

TEST(MaxGap, Examples) {
    EXPECT_EQ(max_gap(k3()).epsilon, Rational(1));
    EXPECT_EQ(max_gap(graph({1}, {})).epsilon, Rational(1));

    const auto k22 = graph({1, 1, 1, 1}, {{0, 2}, {0, 3}, {1, 2}, {1, 3}});
    const auto r = max_gap(k22);
    const auto ref = oracle::max_gap(k22);
    EXPECT_EQ(r.epsilon, Rational(ref.num, ref.den));
    EXPECT_EQ(profile(k22, r.witness).gap(), r.epsilon);
}

TEST(MaxGap, MatchesOracleOnRandomGraphs) {
    for (std::uint64_t seed = 200; seed < 260; ++seed) {
        const auto g = random_grouped(seed, 5 + seed % 12);
        const auto r = max_gap(g);
        const auto ref = oracle::max_gap(g);
        ASSERT_EQ(r.epsilon, Rational(ref.num, ref.den)) << "seed " << seed;
        EXPECT_EQ(r.profile.gap(), r.epsilon);
        EXPECT_EQ(profile(g, r.witness).gap(), r.epsilon);
    }
}

TEST(Properties, Monotonicity) {
    for (std::uint64_t seed = 300; seed < 320; ++seed) {
        const auto g = random_grouped(seed, 9);
        for (const auto& s : enumerate_communities(g, Rational(3, 4), Rational(1, 4))) {
            EXPECT_TRUE(is_community(g, s, Rational(1, 2), Rational(1, 4)));
            EXPECT_TRUE(is_community(g, s, Rational(3, 4), Rational(1, 2)));
        }
    }
}

TEST(Properties, TwinConsistencyUnderCopyRelabeling) {
    // Selecting different copies of a group gives the same labeled profile.
    for (std::uint64_t seed = 400; seed < 420; ++seed) {
        const auto g = random_grouped(seed, 12);
        const oracle::Labeled l(g);
        Rng rng(seed);
        for (int t = 0; t < 20; ++t) {
            std::uint64_t mask = 1 + rng.below((std::uint64_t{1} << l.size()) - 1);
            // Permute labels within each group.
            std::vector<std::size_t> perm(l.size());
            for (std::size_t v = 0; v < l.size(); ++v) perm[v] = v;
            std::size_t start = 0;
            while (start < l.size()) {
                std::size_t end = start;
                while (end < l.size() && l.group_of[end] == l.group_of[start]) ++end;
                for (std::size_t i = end; i > start + 1; --i) std::swap(perm[i - 1], perm[start + rng.below(i - start)]);
                start = end;
            }
            std::uint64_t moved = 0;
            for (std::size_t v = 0; v < l.size(); ++v)
                if ((mask >> v) & 1) moved |= std::uint64_t{1} << perm[v];
            const auto a = oracle::raw_profile(l, mask);
            const auto b = oracle::raw_profile(l, moved);
            EXPECT_EQ(a.min_in, b.min_in);
            EXPECT_EQ(a.max_out, b.max_out);
            const auto p = profile(g, SubsetSelection(oracle::counts_of(l, mask, g.group_count())));
            EXPECT_EQ(p.alpha_star, Rational(a.min_in, a.size));
            EXPECT_EQ(p.beta_star, Rational(a.max_out, a.size));
        }
    }
}

TEST(Properties, OracleAndExplicitAgree) {
    const auto g = random_grouped(7, 30);
    const auto o = CommunityGraph::from_oracle(g.groups(), [&g](GroupId a, GroupId b) { return g.adjacent(a, b); });
    const auto m = o.materialize();
    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        auto s = SubsetSelection::none(g.group_count());
        for (GroupId h = 0; h < g.group_count(); ++h) s.counts[h] = rng.below(g.multiplicity(h) + 1);
        if (s.empty()) s.counts[0] = 1;
        const auto a = profile(g, s);
        const auto b = profile(o, s);
        const auto c = profile(m, s);
        EXPECT_EQ(a.alpha_star, b.alpha_star);
        EXPECT_EQ(a.beta_star, b.beta_star);
        EXPECT_EQ(a.alpha_star, c.alpha_star);
        EXPECT_EQ(a.beta_star, c.beta_star);
    }
}

TEST(CommunityGraph, BuilderAndValidation) {
    CommunityGraph::Builder b;
    const auto x = b.add_group(2, R"({"name":"x"})");
    const auto y = b.add_group();
    b.add_edge(x, y);
    b.add_edge(y, x);
    EXPECT_THROW(b.add_edge(x, x), ParameterError);
    EXPECT_THROW(b.add_group(0), ParameterError);
    const auto g = std::move(b).build();
    EXPECT_EQ(g.group_count(), 2u);
    EXPECT_EQ(g.vertex_count(), 3u);
    EXPECT_EQ(g.group_edge_count(), 1u);
    EXPECT_TRUE(g.adjacent(0, 1));
    EXPECT_FALSE(g.adjacent(0, 0));
}

TEST(CommunityGraph, TwinCompressionAndComponents) {
    // 0 and 1 share neighbor set {2}; 3 is isolated.
    const auto g = graph({1, 2, 1, 1}, {{0, 2}, {1, 2}});
    const auto tc = compress_twins(g);
    EXPECT_EQ(tc.group_of[0], tc.group_of[1]);
    EXPECT_EQ(tc.graph.multiplicity(tc.group_of[0]), 3u);
    EXPECT_EQ(tc.graph.vertex_count(), g.vertex_count());
    EXPECT_EQ(connected_components(g).size(), 2u);
    const auto sub = induced_subgraph(g, {0, 2});
    EXPECT_EQ(sub.group_count(), 2u);
    EXPECT_TRUE(sub.adjacent(0, 1));
}

TEST(StrictWeakTieBound, SeparatesTies) {
    const Rational beta(1, 2);
    const auto b = strict_weak_tie_bound(beta, 10);
    for (std::int64_t s = 1; s <= 10; ++s)
        for (std::int64_t c = 0; c <= s; ++c) EXPECT_EQ(Rational(c, s) <= b, Rational(c, s) < beta);
}
