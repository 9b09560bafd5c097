#include <gtest/gtest.h>

#include <set>

#include "communitylab/counting_reduction.hpp"
#include "communitylab/label_cover_io.hpp"
#include "oracles.hpp"

using namespace communitylab;

namespace {

LabelCoverInstance tiny_instance() {
    // One A and one B variable over binary alphabets, π = identity.
    LabelCoverInstance inst;
    inst.n_A = 1;
    inst.n_B = 1;
    inst.sigma_A = 2;
    inst.sigma_B = 2;
    inst.edges.push_back({0, 0, {0, 1}});
    return inst;
}

const Cnf3& one_clause() {
    static const Cnf3 f = parse_dimacs("p cnf 3 1\n1 2 3 0\n");
    return f;
}

struct OneClauseGraph {
    CountingReduction red;
    CommunityGraph g;
};

const OneClauseGraph& one_clause_m2() {
    static const OneClauseGraph og = [] {
        CountingReduction red(reduce_3sat(one_clause()), CountingParams::make(7, 2, 2));
        auto g = red.build();
        return OneClauseGraph{std::move(red), std::move(g)};
    }();
    return og;
}

} // namespace

TEST(CountingParams, Validation) {
    const auto inst = reduce_3sat(one_clause());
    EXPECT_THROW(CountingReduction(inst, CountingParams::make(5, 2, 2)), ParameterError); // 7 labels in GF(5)
    EXPECT_THROW(CountingReduction(inst, CountingParams::make(7, 1, 2)), ParameterError); // 4 variables, 1 point
    EXPECT_THROW(CountingReduction(inst, CountingParams::make(7, 2, 1)), ParameterError);
    EXPECT_THROW(CountingParams::make(7, 8, 2), ParameterError);
}

TEST(CountingReduction, CopiesOfOneClassAreAdjacent) {
    CountingReduction red(tiny_instance(), CountingParams::make(3, 2, 2));
    for (GroupId id = 0; id < red.proper_count(); id += 2) {
        const auto v = red.proper(id);
        auto w = v;
        w.i = 2;
        const auto lab = red.induced_assignment(v);
        if (lc_partial_violations(red.instance(), lab).violated) continue;
        EXPECT_TRUE(red.edge_predicate(red.proper_id(v), red.proper_id(w)));
    }
}

TEST(CountingReduction, PredicateMatchesBuildAndIsSymmetric) {
    CountingReduction red(tiny_instance(), CountingParams::make(3, 2, 2));
    const auto g = red.build();
    const auto o = red.build_oracle();
    ASSERT_EQ(g.group_count(), red.group_count());
    for (GroupId a = 0; a < g.group_count(); ++a)
        for (GroupId b = 0; b < g.group_count(); ++b) {
            ASSERT_EQ(red.edge_predicate(a, b), g.adjacent(a, b)) << a << " " << b;
            ASSERT_EQ(red.edge_predicate(a, b), red.edge_predicate(b, a));
            ASSERT_EQ(o.adjacent(a, b), g.adjacent(a, b));
        }
}

TEST(CountingReduction, CrossingPointRule) {
    // v on line g and w on line h agree iff v.p1(h) = w.p2(g) and v.p2(h) = w.p1(g).
    CountingReduction red(tiny_instance(), CountingParams::make(3, 2, 1 + 1));
    const auto& f = red.params().field;
    std::size_t checked = 0;
    for (GroupId a = 0; a < red.proper_count(); a += 2)
        for (GroupId b = 0; b < red.proper_count(); b += 2) {
            const auto v = red.proper(a), w = red.proper(b);
            if (v.g == w.g) continue;
            const bool cross =
                v.p1.evaluate(f, w.g) == w.p2.evaluate(f, v.g) && v.p2.evaluate(f, w.g) == w.p1.evaluate(f, v.g);
            if (!cross) {
                EXPECT_FALSE(red.edge_predicate(a, b));
            }
            ++checked;
        }
    EXPECT_GT(checked, 0u);
}

TEST(CountingReduction, AuxAdjacency) {
    CountingReduction red(tiny_instance(), CountingParams::make(3, 2, 2));
    for (GroupId id = 0; id < red.proper_count(); ++id) {
        const auto v = red.proper(id);
        for (std::uint32_t g = 0; g < 3; ++g)
            for (std::uint32_t i = 1; i <= 2; ++i)
                EXPECT_EQ(red.edge_predicate(red.aux_id(FieldElem{g}, i), id), v.g.value != g && v.i == i);
    }
    EXPECT_FALSE(red.edge_predicate(red.aux_id(FieldElem{0}, 1), red.aux_id(FieldElem{1}, 1)));
    const auto g = red.build();
    EXPECT_EQ(g.multiplicity(red.aux_id(FieldElem{2}, 2)), 2u);
}

TEST(CountingReduction, InducedAssignment) {
    const auto& og = one_clause_m2();
    const auto f = one_clause();
    const auto lambda = labeling_from_assignment(f, {false, true, true});
    const auto c = og.red.community_from_labeling(lambda);
    for (auto id : c.support()) {
        const auto lab = og.red.induced_assignment(og.red.proper(id));
        for (std::uint32_t a = 0; a < lab.n_A(); ++a)
            if (lab.a(a).state == Labeling::State::assigned) {
                EXPECT_EQ(lab.a(a).value, lambda.a(a).value);
            }
        for (std::uint32_t b = 0; b < lab.n_B(); ++b)
            if (lab.b(b).state == Labeling::State::assigned) {
                EXPECT_EQ(lab.b(b).value, lambda.b(b).value);
            }
    }
    // Lines x = 2 and y = 2 avoid the grid, so they host no variable.
    for (GroupId id = 0; id < og.red.proper_count(); ++id) {
        const auto v = og.red.proper(id);
        if (v.g.value >= 2) {
            EXPECT_TRUE(og.red.induced_assignment(v).empty());
            break;
        }
    }
}

TEST(CountingReduction, InvalidValueFlagsVariable) {
    CountingReduction red(tiny_instance(), CountingParams::make(3, 2, 2));
    // Variable A0 sits at (0,0); value 2 names no binary label.
    ProperVertexC v{FieldElem{0}, UniPoly::constant(FieldElem{2}, 1), UniPoly::constant(FieldElem{2}, 1), 1};
    const auto lab = red.induced_assignment(v);
    EXPECT_EQ(lab.a(0).state, Labeling::State::invalid);
    EXPECT_GT(lc_partial_violations(red.instance(), lab).violated, 0u);
}

TEST(CountingReduction, CompletenessCommunity) {
    const auto& og = one_clause_m2();
    const auto inst = reduce_3sat(one_clause());
    std::set<SubsetSelection> seen;
    for (const auto& lambda : enumerate_satisfying(inst)) {
        const auto c = og.red.community_from_labeling(lambda);
        EXPECT_EQ(c.size(), 14u);
        const auto p = profile(og.g, c);
        EXPECT_EQ(p.alpha_star, Rational(1));
        EXPECT_EQ(p.beta_star, Rational(3, 7));
        EXPECT_TRUE(is_community(og.g, c, 1, Rational(1, 2)));

        const auto in = selected_neighbor_counts(og.g, c);
        for (GroupId id = static_cast<GroupId>(og.red.proper_count()); id < og.g.group_count(); ++id)
            EXPECT_EQ(Rational(static_cast<std::int64_t>(in[id]), 14), Rational(3, 7));

        const auto rep = og.red.check_structure_claim(og.g, c);
        EXPECT_TRUE(rep.pass);
        ASSERT_TRUE(rep.decoded.has_value());
        EXPECT_EQ(*rep.decoded, lambda);
        seen.insert(c);
    }
    EXPECT_EQ(seen.size(), 7u);
    EXPECT_THROW(og.red.community_from_labeling(Labeling(1, 3)), ParameterError);
}

TEST(CountingReduction, StructureViolationsReported) {
    const auto& og = one_clause_m2();
    const auto lambda = enumerate_satisfying(reduce_3sat(one_clause())).front();
    auto c = og.red.community_from_labeling(lambda);

    auto with_aux = c;
    with_aux.counts[og.red.aux_id(FieldElem{0}, 1)] = 1;
    EXPECT_FALSE(is_community(og.g, with_aux, 1, Rational(1, 2)));
    EXPECT_FALSE(og.red.check_structure_claim(og.g, with_aux).pass);

    auto missing = c;
    for (auto id : c.support())
        if (og.red.proper(id).g.value == 3) missing.counts[id] = 0;
    const auto p = profile(og.g, missing);
    EXPECT_GT(p.beta_star, Rational(1, 2));
    EXPECT_FALSE(og.red.check_structure_claim(og.g, missing).pass);
}

TEST(CountingReduction, StrictTieCountEqualsSat) {
    const auto& og = one_clause_m2();
    const auto beta = strict_weak_tie_bound(Rational(1, 2), og.g.vertex_count());
    EXPECT_EQ(count_communities(og.g, 1, beta, 2), oracle::count_sat(one_clause()));
    for (const auto& s : enumerate_communities(og.g, 1, beta, 2)) EXPECT_TRUE(og.red.check_structure_claim(og.g, s).pass);
}

TEST(CountingReduction, BudgetRefusal) {
    CountingReduction red(reduce_3sat(one_clause()), CountingParams::make(7, 2, 2));
    EXPECT_THROW(red.build(1000), BudgetExceeded);
}
