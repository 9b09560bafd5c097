#include <gtest/gtest.h>

#include "communitylab/decision_reduction.hpp"
#include "communitylab/rng.hpp"

using namespace communitylab;

namespace {

// n_A = n_B = 2, Σ_A = 3, Σ_B = 2. The satisfiable sibling has 4 satisfying
// labelings; the other forces b0 = 0 and b0 = 1 at once.
LabelCoverInstance micro(bool satisfiable) {
    LabelCoverInstance i;
    i.n_A = 2;
    i.n_B = 2;
    i.sigma_A = 3;
    i.sigma_B = 2;
    if (satisfiable)
        i.edges = {{0, 0, {0, 0, 0}}, {1, 0, {0, 0, 0}}, {0, 1, {0, 1, 1}}, {1, 1, {1, 0, 0}}};
    else
        i.edges = {{0, 0, {0, 0, 0}}, {1, 0, {1, 1, 1}}, {0, 1, {0, 1, 1}}, {1, 1, {1, 0, 0}}};
    return i;
}

struct Built {
    DecisionReduction red;
    CommunityGraph g;
};

const Built& built(bool satisfiable) {
    static const Built sat = [] {
        DecisionReduction r(micro(true), DecisionParams::make(micro(true), 7, 2, 2, 3, 1, 1));
        auto g = r.build(GraphMode::explicit_edges);
        return Built{std::move(r), std::move(g)};
    }();
    static const Built unsat = [] {
        DecisionReduction r(micro(false), DecisionParams::make(micro(false), 7, 2, 2, 3, 1, 1));
        auto g = r.build(GraphMode::explicit_edges);
        return Built{std::move(r), std::move(g)};
    }();
    return satisfiable ? sat : unsat;
}

} // namespace

TEST(DecodePair, MixedRadix) {
    EXPECT_EQ(DecisionReduction::decode_pair(0, 3, 2), std::make_optional(std::make_pair(0u, 0u)));
    const auto p = DecisionReduction::decode_pair(13, 2, 7);
    ASSERT_TRUE(p.has_value());
    EXPECT_EQ(*p, std::make_pair(1u, 6u));
    EXPECT_EQ(p->first * 7 + p->second, 13u);
    EXPECT_FALSE(DecisionReduction::decode_pair(14, 2, 7).has_value());
    EXPECT_FALSE(DecisionReduction::decode_pair(6, 3, 2).has_value());
}

TEST(DecodePoint, HostedVariables) {
    const auto& b = built(true);
    // A block X_0 on row 0, B block Y_0 on column 1: (0,1) hosts a0[1]... and b0.
    const auto d = b.red.decode_point(FieldElem{5}, {FieldElem{0}, FieldElem{1}});
    ASSERT_TRUE(d.a_var && d.b_var);
    EXPECT_EQ(*d.a_label, 2u);
    EXPECT_EQ(*d.b_label, 1u);
    const auto bad = b.red.decode_point(FieldElem{6}, {FieldElem{0}, FieldElem{1}});
    EXPECT_TRUE(bad.invalid);
    const auto none = b.red.decode_point(FieldElem{6}, {FieldElem{4}, FieldElem{4}});
    EXPECT_FALSE(none.a_var || none.b_var || none.invalid);
}

TEST(DecisionParams, Validation) {
    const auto inst = micro(true);
    EXPECT_THROW(DecisionParams::make(inst, 7, 2, 3, 3, 1, 1), ParameterError); // ρ ∤ n_A
    EXPECT_THROW(DecisionReduction(inst, DecisionParams::make(inst, 5, 2, 2, 3, 1, 1)), ParameterError); // 3·2 > 5
    EXPECT_THROW(DecisionReduction(inst, DecisionParams::make(inst, 7, 2, 2, 3, 2, 1)), ParameterError);
    EXPECT_THROW(DecisionParams::derived_quota(3, 1, 7), ParameterError);
    EXPECT_EQ(DecisionParams::derived_quota(14, 1, 7), 2u);
}

TEST(DecisionReduction, VerticesAreBalancedAndConsistent) {
    const auto& b = built(true);
    EXPECT_EQ(b.red.balanced_sets().size(), 5u);
    EXPECT_EQ(b.red.proper_count(), 5u * 2401u);
    const auto& f = b.red.params().field;
    for (GroupId id = 0; id < b.red.proper_count(); id += 37) {
        const auto& v = b.red.proper(id);
        const auto& s = b.red.set_of(id);
        std::uint32_t qa = 0, qb = 0;
        for (auto e : s) {
            qa += e.value == 0;
            qb += e.value == 1;
        }
        EXPECT_EQ(qa, 1u);
        EXPECT_EQ(qb, 1u);
        for (std::size_t r = 0; r < s.size(); ++r)
            for (std::size_t c = 0; c < s.size(); ++c)
                EXPECT_EQ(v.rows[r].evaluate(f, s[c]), v.cols[c].evaluate(f, s[r]));
    }
}

TEST(DecisionReduction, OracleAgreesWithExplicit) {
    for (bool sat : {true, false}) {
        const auto& b = built(sat);
        const auto o = b.red.build(GraphMode::oracle);
        Rng rng(sat ? 1 : 2);
        const auto n = b.g.group_count();
        for (int t = 0; t < 200; ++t) {
            const auto x = static_cast<GroupId>(rng.below(n));
            const auto y = static_cast<GroupId>(rng.below(n));
            EXPECT_EQ(o.adjacent(x, y), b.g.adjacent(x, y));
            EXPECT_EQ(b.red.edge_predicate(x, y), b.red.edge_predicate(y, x));
        }
        // Include pairs that are actually adjacent.
        for (GroupId x = 0; x < n; x += 401)
            for (auto y : b.g.neighbors(x)) EXPECT_TRUE(b.red.edge_predicate(x, y));
        EXPECT_FALSE(b.red.edge_predicate(0, 0));
    }
}

TEST(DecisionReduction, AuxAdjacencyFollowsContainment) {
    const auto& b = built(true);
    EXPECT_EQ(b.red.aux_multiplicity(), 16u);
    for (GroupId u = static_cast<GroupId>(b.red.proper_count()); u < b.g.group_count(); ++u) {
        const auto& aux = b.red.aux(u);
        for (GroupId v = 0; v < b.red.proper_count(); v += 97) {
            bool contained = true;
            for (auto e : b.red.set_of(v))
                contained = contained && std::find(aux.set.begin(), aux.set.end(), e) != aux.set.end();
            if (aux.kind == AuxKind::H) {
                EXPECT_EQ(b.g.adjacent(u, v), contained);
            }
        }
        for (GroupId w = static_cast<GroupId>(b.red.proper_count()); w < b.g.group_count(); ++w)
            EXPECT_FALSE(b.g.adjacent(u, w));
    }
}

TEST(DecisionReduction, CompletenessAtMicroScale) {
    const auto& b = built(true);
    for (const auto& lambda : enumerate_satisfying(b.red.instance())) {
        const auto r = b.red.completeness(b.g, lambda);
        EXPECT_EQ(r.community_size, 5u);
        EXPECT_TRUE(r.is_community);
        EXPECT_EQ(r.profile.alpha_star, Rational(1));
        EXPECT_EQ(r.max_aux_fraction, Rational(1, 5));
        EXPECT_LT(r.max_perturbed_fraction, b.red.params().epsilon);
        EXPECT_EQ(r.perturbed_checked, 20u);

        // Every pair of restriction vertices is adjacent.
        const auto c = b.red.community_from_labeling(lambda);
        const auto ids = c.support();
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = i + 1; j < ids.size(); ++j) EXPECT_TRUE(b.g.adjacent(ids[i], ids[j]));
    }
}

TEST(DecisionReduction, SoundnessProbeOnUnsatisfiableSibling) {
    const auto& b = built(false);
    const auto r = b.red.soundness_probe(b.g);
    EXPECT_EQ(r.gap.epsilon, Rational(1, 2));
    EXPECT_EQ(profile(b.g, r.gap.witness).gap(), r.gap.epsilon);
    EXPECT_EQ(r.list_bound, Rational(16));

    // Aux groups alone are isolated, so a singleton has gap 1.
    std::vector<GroupId> aux;
    for (GroupId u = static_cast<GroupId>(b.red.proper_count()); u < b.g.group_count(); ++u) aux.push_back(u);
    EXPECT_EQ(max_gap(induced_subgraph(b.g, aux)).epsilon, Rational(1));
}

TEST(DecisionReduction, DisjointSetsWithViolatedConstraint) {
    // GF(5), F = {0,1,2}, ρ = 1: A0 at (0,0), A1 at (1,0), B0 at (0,2). t = 1
    // with quota 1 on F_A gives S = {0} and T = {1}.
    LabelCoverInstance inst;
    inst.n_A = 2;
    inst.n_B = 1;
    inst.sigma_A = 2;
    inst.sigma_B = 2;
    inst.edges = {{1, 0, {0, 1}}};
    auto params = DecisionParams::make(inst, 5, 3, 1, 1, 1, 0);
    DecisionReduction red(inst, params);
    ASSERT_EQ(red.balanced_sets().size(), 2u);
    const auto g = red.build(GraphMode::explicit_edges);

    std::size_t violating = 0, adjacent = 0;
    for (GroupId v = 0; v < red.proper_count(); v += 7) {
        if (red.set_of(v)[0].value != 0) continue;
        for (GroupId w = 0; w < red.proper_count(); w += 11) {
            if (red.set_of(w)[0].value != 1) continue;
            const bool e = red.edge_predicate(v, w);
            EXPECT_EQ(e, g.adjacent(v, w));
            const auto lv = red.induced_assignment(red.proper(v));
            const auto lw = red.induced_assignment(red.proper(w));
            if (!union_violation_free(inst, lv, lw)) {
                EXPECT_FALSE(e);
                ++violating;
            }
            adjacent += e;
        }
    }
    EXPECT_GT(violating, 0u);
    EXPECT_GT(adjacent, 0u);
}

TEST(DecisionReduction, BudgetRefusal) {
    const auto inst = micro(true);
    EXPECT_THROW(DecisionReduction(inst, DecisionParams::make(inst, 7, 2, 2, 3, 1, 1), 1e4), BudgetExceeded);
}
