#pragma once

// Seeded instance generators. Same arguments, same output.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstdint>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "communitylab/community_graph.hpp"
#include "communitylab/error.hpp"
#include "communitylab/label_cover.hpp"
#include "communitylab/rng.hpp"

namespace communitylab {

/// Clauses over three distinct variables with random signs.
inline Cnf3 random_3sat(std::uint32_t num_vars, std::uint32_t num_clauses, std::uint64_t seed) {
    if (num_vars < 3) throw ParameterError("random 3-SAT needs at least 3 variables");
    Rng rng(derive_seed(seed, "random-3sat"));
    Cnf3 f;
    f.num_vars = num_vars;
    for (std::uint32_t c = 0; c < num_clauses; ++c) {
        std::array<int, 3> clause{};
        for (int k = 0; k < 3;) {
            const int v = static_cast<int>(rng.below(num_vars)) + 1;
            if (std::any_of(clause.begin(), clause.begin() + k, [v](int l) { return std::abs(l) == v; })) continue;
            clause[k++] = rng.chance(1, 2) ? v : -v;
        }
        f.clauses.push_back(clause);
    }
    return f;
}

inline std::vector<std::pair<GroupId, GroupId>> erdos_renyi_edges(std::uint32_t n, double p, Rng& rng) {
    std::vector<std::pair<GroupId, GroupId>> edges;
    for (GroupId a = 0; a < n; ++a)
        for (GroupId b = a + 1; b < n; ++b)
            if (rng.chance(p)) edges.emplace_back(a, b);
    return edges;
}

/// G(n, p) with singleton groups.
inline CommunityGraph random_graph(std::uint32_t n, double p, std::uint64_t seed) {
    if (p < 0 || p > 1) throw ParameterError("edge probability must lie in [0, 1]");
    Rng rng(derive_seed(seed, "random-graph"));
    auto edges = erdos_renyi_edges(n, p, rng);
    return CommunityGraph::from_edges(std::vector<Group>(n), std::move(edges),
                                      {{"generator", "random-graph"}, {"n", n}, {"p", p}, {"seed", seed}});
}

struct PlantedInstance {
    CommunityGraph graph;
    std::vector<GroupId> plant; ///< sorted
};

/// G(n, p) plus a clique on `k` uniformly chosen vertices.
inline PlantedInstance planted_community(std::uint32_t n, double p, std::uint32_t k, std::uint64_t seed) {
    if (k > n) throw ParameterError("plant larger than the graph");
    if (p < 0 || p > 1) throw ParameterError("edge probability must lie in [0, 1]");
    Rng rng(derive_seed(seed, "planted-community"));
    auto edges = erdos_renyi_edges(n, p, rng);
    std::vector<GroupId> order(n);
    for (GroupId v = 0; v < n; ++v) order[v] = v;
    rng.shuffle(order);
    std::vector<GroupId> plant(order.begin(), order.begin() + k);
    std::sort(plant.begin(), plant.end());
    for (std::size_t i = 0; i < plant.size(); ++i)
        for (std::size_t j = i + 1; j < plant.size(); ++j) edges.emplace_back(plant[i], plant[j]);
    nlohmann::json meta = {{"generator", "planted-community"}, {"n", n}, {"p", p}, {"k", k}, {"seed", seed}};
    return {CommunityGraph::from_edges(std::vector<Group>(n), std::move(edges), std::move(meta)), std::move(plant)};
}

/// Simple (d_A, d_B)-bi-regular instance from the configuration model with
/// duplicate edges repaired by random swaps; projections are uniform maps.
inline LabelCoverInstance random_biregular_lc(std::uint32_t n_A, std::uint32_t n_B, std::uint32_t d_A, std::uint32_t d_B,
                                              std::uint32_t sigma_A, std::uint32_t sigma_B, std::uint64_t seed) {
    if (static_cast<std::uint64_t>(n_A) * d_A != static_cast<std::uint64_t>(n_B) * d_B)
        throw ParameterError("bi-regularity needs n_A·d_A = n_B·d_B");
    if (d_A > n_B || d_B > n_A) throw ParameterError("degree exceeds the opposite side; no simple bi-regular graph");
    if (sigma_A == 0 || sigma_B == 0) throw ParameterError("alphabets must be nonempty");
    Rng rng(derive_seed(seed, "random-biregular-lc"));

    std::vector<std::uint32_t> a_stub, b_stub;
    for (std::uint32_t a = 0; a < n_A; ++a) a_stub.insert(a_stub.end(), d_A, a);
    for (std::uint32_t b = 0; b < n_B; ++b) b_stub.insert(b_stub.end(), d_B, b);
    rng.shuffle(b_stub);

    const std::size_t m = a_stub.size();
    std::set<std::pair<std::uint32_t, std::uint32_t>> present;
    std::vector<std::size_t> dup;
    std::vector<char> is_dup(m, 0);
    for (std::size_t i = 0; i < m; ++i)
        if (!present.insert({a_stub[i], b_stub[i]}).second) {
            dup.push_back(i);
            is_dup[i] = 1;
        }
    std::uint64_t tries = 0;
    const std::uint64_t max_tries = 1000 * (m + 1);
    while (!dup.empty()) {
        if (++tries > max_tries) throw Error("could not repair duplicate edges in the bi-regular configuration model");
        const std::size_t i = dup.back();
        const std::size_t j = static_cast<std::size_t>(rng.below(m));
        if (is_dup[j]) continue;
        const std::pair<std::uint32_t, std::uint32_t> ei{a_stub[i], b_stub[j]}, ej{a_stub[j], b_stub[i]};
        if (present.count(ei) || present.count(ej) || ei == ej) continue;
        // i is a duplicate, so its current pair stays present through its twin.
        present.erase({a_stub[j], b_stub[j]});
        std::swap(b_stub[i], b_stub[j]);
        present.insert(ei);
        present.insert(ej);
        is_dup[i] = 0;
        dup.pop_back();
    }

    LabelCoverInstance inst;
    inst.n_A = n_A;
    inst.n_B = n_B;
    inst.sigma_A = sigma_A;
    inst.sigma_B = sigma_B;
    for (std::size_t i = 0; i < m; ++i) {
        LcEdge e{a_stub[i], b_stub[i], std::vector<Label>(sigma_A)};
        for (auto& l : e.projection) l = static_cast<Label>(rng.below(sigma_B));
        inst.edges.push_back(std::move(e));
    }
    std::sort(inst.edges.begin(), inst.edges.end(),
              [](const LcEdge& x, const LcEdge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    return inst;
}

} // namespace communitylab
