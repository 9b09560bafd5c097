#include <gtest/gtest.h>

#include <sstream>

#include "communitylab/generators.hpp"
#include "communitylab/graph_io.hpp"
#include "communitylab/label_cover_io.hpp"

using namespace communitylab;

TEST(Random3Sat, DistinctVariablesAndDeterminism) {
    const auto a = random_3sat(4, 6, 12);
    const auto b = random_3sat(4, 6, 12);
    EXPECT_EQ(a.clauses, b.clauses);
    for (const auto& c : a.clauses) {
        EXPECT_NE(std::abs(c[0]), std::abs(c[1]));
        EXPECT_NE(std::abs(c[0]), std::abs(c[2]));
        EXPECT_NE(std::abs(c[1]), std::abs(c[2]));
    }
    EXPECT_NO_THROW(a.validate());
    EXPECT_THROW(random_3sat(2, 1, 0), ParameterError);
}

TEST(PlantedCommunity, PlantIsACliqueCommunity) {
    const auto p = planted_community(200, 0.05, 30, 7);
    EXPECT_EQ(p.plant.size(), 30u);
    for (std::size_t i = 0; i < p.plant.size(); ++i)
        for (std::size_t j = i + 1; j < p.plant.size(); ++j) EXPECT_TRUE(p.graph.adjacent(p.plant[i], p.plant[j]));
    const auto prof = profile(p.graph, SubsetSelection::whole_groups(p.graph, p.plant));
    EXPECT_EQ(prof.alpha_star, Rational(1));
    EXPECT_LE(prof.beta_star, Rational(3, 10));
    EXPECT_THROW(planted_community(10, 0.1, 11, 0), ParameterError);
}

TEST(RandomBiregular, DegreesAndSimplicity) {
    const auto inst = random_biregular_lc(30, 20, 4, 6, 3, 2, 5);
    EXPECT_NO_THROW(inst.validate());
    const auto d = inst.biregular_degrees();
    ASSERT_TRUE(d.has_value());
    EXPECT_EQ(*d, std::make_pair(4u, 6u));
    for (std::size_t i = 1; i < inst.edges.size(); ++i)
        EXPECT_FALSE(inst.edges[i].a == inst.edges[i - 1].a && inst.edges[i].b == inst.edges[i - 1].b);
    EXPECT_THROW(random_biregular_lc(30, 20, 4, 5, 3, 2, 5), ParameterError);
    EXPECT_THROW(random_biregular_lc(2, 1, 2, 4, 2, 2, 5), ParameterError);

    std::ostringstream a, b;
    write_label_cover(a, inst);
    write_label_cover(b, random_biregular_lc(30, 20, 4, 6, 3, 2, 5));
    EXPECT_EQ(a.str(), b.str());
}

TEST(Cgraph, RoundTrip) {
    std::vector<Group> groups{{1, R"({"kind":"a"})"}, {3, "{}"}, {2, R"({"x":[1,2]})"}};
    const auto g = CommunityGraph::from_edges(groups, {{0, 1}, {2, 1}});
    std::ostringstream out;
    write_cgraph(out, g);
    EXPECT_EQ(out.str(), "cgraph 3\n0 1 {\"kind\":\"a\"}\n1 3 {}\n2 2 {\"x\":[1,2]}\n0 1\n1 2\n");
    const auto back = read_cgraph(out.str());
    EXPECT_EQ(back.group_count(), 3u);
    EXPECT_EQ(back.multiplicity(1), 3u);
    EXPECT_EQ(back.group(2).descriptor, R"({"x":[1,2]})");
    EXPECT_TRUE(back.adjacent(1, 2));
    EXPECT_FALSE(back.adjacent(0, 2));
}

TEST(Cgraph, ParseErrorsAndOracleRefusal) {
    EXPECT_THROW(read_cgraph("graph 1\n0 1 {}\n"), ParseError);
    EXPECT_THROW(read_cgraph("cgraph 2\n0 1 {}\n"), ParseError);
    EXPECT_THROW(read_cgraph("cgraph 1\n0 0 {}\n"), ParseError);
    EXPECT_THROW(read_cgraph("cgraph 2\n0 1 {}\n1 1 {}\n0 5\n"), ParseError);
    EXPECT_THROW(read_cgraph("cgraph 1\n0 1 {oops\n"), ParseError);
    try {
        read_cgraph("cgraph 2\n0 1 {}\n1 1 {}\n0 0\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
    const auto o = CommunityGraph::from_oracle(std::vector<Group>(2), [](GroupId, GroupId) { return false; });
    std::ostringstream out;
    EXPECT_THROW(write_cgraph(out, o), Error);
}

TEST(Selection, JsonForms) {
    const auto g = CommunityGraph::from_edges({{2, "{}"}, {1, "{}"}}, {});
    EXPECT_EQ(selection_from_json(nlohmann::json::parse(R"({"counts":[1,1]})"), g).counts,
              (std::vector<std::uint64_t>{1, 1}));
    EXPECT_EQ(selection_from_json(nlohmann::json::parse(R"({"groups":[0]})"), g).counts,
              (std::vector<std::uint64_t>{2, 0}));
    EXPECT_THROW(selection_from_json(nlohmann::json::parse(R"({"counts":[3,0]})"), g), ParameterError);
    EXPECT_THROW(selection_from_json(nlohmann::json::parse(R"({"x":1})"), g), ParameterError);
}
