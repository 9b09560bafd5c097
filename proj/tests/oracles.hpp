#pragma once

// Test-side reference implementations. They share no code with the library
// beyond the graph container they read: labeled-vertex expansion, integer
// cross-multiplication for fraction tests, truth tables for #SAT.

#include <algorithm>
#include <climits>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <map>
#include <utility>
#include <vector>

#include "communitylab/community_graph.hpp"
#include "communitylab/label_cover.hpp"

namespace oracle {

using communitylab::CommunityGraph;
using communitylab::GroupId;

struct Frac {
    std::int64_t num, den;
};

/// Labeled expansion: vertex list with its group and a dense adjacency matrix.
struct Labeled {
    std::vector<GroupId> group_of;
    std::vector<std::vector<char>> adj;

    explicit Labeled(const CommunityGraph& g) {
        for (GroupId id = 0; id < g.group_count(); ++id)
            for (std::uint64_t c = 0; c < g.multiplicity(id); ++c) group_of.push_back(id);
        const std::size_t n = group_of.size();
        adj.assign(n, std::vector<char>(n, 0));
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = 0; v < n; ++v)
                if (group_of[u] != group_of[v] && g.adjacent(group_of[u], group_of[v])) adj[u][v] = 1;
    }
    std::size_t size() const { return group_of.size(); }
};

/// (min member closed-neighborhood count, max non-member open count, |S|).
struct RawProfile {
    std::int64_t min_in, max_out, size;
};

inline RawProfile raw_profile(const Labeled& l, std::uint64_t mask) {
    RawProfile r{INT64_MAX, 0, 0};
    for (std::size_t v = 0; v < l.size(); ++v) r.size += (mask >> v) & 1;
    for (std::size_t v = 0; v < l.size(); ++v) {
        std::int64_t c = 0;
        for (std::size_t u = 0; u < l.size(); ++u)
            if (((mask >> u) & 1) && l.adj[v][u]) ++c;
        if ((mask >> v) & 1)
            r.min_in = std::min(r.min_in, c + 1);
        else
            r.max_out = std::max(r.max_out, c);
    }
    return r;
}

/// min_in/|S| ≥ α and max_out/|S| ≤ β, by cross-multiplication.
inline bool is_community(const Labeled& l, std::uint64_t mask, Frac alpha, Frac beta) {
    const auto r = raw_profile(l, mask);
    if (r.size == 0) return false;
    return r.min_in * alpha.den >= alpha.num * r.size && r.max_out * beta.den <= beta.num * r.size;
}

/// Count vector of a labeled mask.
inline std::vector<std::uint64_t> counts_of(const Labeled& l, std::uint64_t mask, std::size_t groups) {
    std::vector<std::uint64_t> c(groups, 0);
    for (std::size_t v = 0; v < l.size(); ++v)
        if ((mask >> v) & 1) ++c[l.group_of[v]];
    return c;
}

/// Every labeled (α,β)-community of size ≥ min_size, as count vectors with multiplicity.
inline std::map<std::vector<std::uint64_t>, std::uint64_t> communities(const CommunityGraph& g, Frac alpha, Frac beta,
                                                                      std::uint64_t min_size = 1) {
    const Labeled l(g);
    std::map<std::vector<std::uint64_t>, std::uint64_t> out;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << l.size()); ++mask) {
        if (static_cast<std::uint64_t>(__builtin_popcountll(mask)) < min_size) continue;
        if (is_community(l, mask, alpha, beta)) ++out[counts_of(l, mask, g.group_count())];
    }
    return out;
}

inline std::uint64_t count(const CommunityGraph& g, Frac alpha, Frac beta, std::uint64_t min_size = 1) {
    std::uint64_t n = 0;
    for (const auto& [c, k] : communities(g, alpha, beta, min_size)) n += k;
    return n;
}

/// max over nonempty labeled S of (min_in − max_out)/|S|, as (num, den) in lowest terms.
inline Frac max_gap(const CommunityGraph& g) {
    const Labeled l(g);
    Frac best{-1, 1};
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << l.size()); ++mask) {
        const auto r = raw_profile(l, mask);
        const Frac f{r.min_in - r.max_out, r.size};
        if (f.num * best.den > best.num * f.den) best = f;
    }
    const auto gcd = std::gcd(best.num < 0 ? -best.num : best.num, best.den);
    return {best.num / gcd, best.den / gcd};
}

/// #SAT by truth table.
inline std::uint64_t count_sat(const communitylab::Cnf3& f) {
    std::uint64_t n = 0;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << f.num_vars); ++x) {
        bool all = true;
        for (const auto& cl : f.clauses) {
            bool any = false;
            for (int lit : cl) {
                const bool val = (x >> (std::abs(lit) - 1)) & 1;
                any = any || (lit > 0 ? val : !val);
            }
            all = all && any;
        }
        n += all;
    }
    return n;
}

/// Σ c_i x^i mod p by explicit powers.
inline std::uint32_t poly_eval(const std::vector<std::uint32_t>& coeffs, std::uint32_t x, std::uint32_t p) {
    std::uint64_t acc = 0, pw = 1;
    for (auto c : coeffs) {
        acc = (acc + c * pw) % p;
        pw = pw * x % p;
    }
    return static_cast<std::uint32_t>(acc);
}

} // namespace oracle
