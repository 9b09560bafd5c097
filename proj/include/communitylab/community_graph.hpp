#pragma once

// Graphs whose vertices come in twin groups. Group g stands for m_g copies of
// one vertex; copies are pairwise non-adjacent and share their neighborhood,
// and adjacency between two groups is all-or-nothing. Adjacency is stored as
// CSR over group ids or answered by an edge oracle.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "communitylab/budget.hpp"
#include "communitylab/error.hpp"

namespace communitylab {

using GroupId = std::uint32_t;

struct Group {
    std::uint64_t multiplicity = 1;
    std::string descriptor = "{}"; ///< compact JSON describing the vertex
};

using EdgeOracle = std::function<bool(GroupId, GroupId)>;

class CommunityGraph {
public:
    class Builder {
    public:
        GroupId add_group(std::uint64_t multiplicity = 1, std::string descriptor = "{}") {
            if (multiplicity == 0) throw ParameterError("group multiplicity must be at least 1");
            groups_.push_back({multiplicity, std::move(descriptor)});
            return static_cast<GroupId>(groups_.size() - 1);
        }
        void add_edge(GroupId a, GroupId b) {
            if (a == b) throw ParameterError("a group cannot be adjacent to itself");
            if (a >= groups_.size() || b >= groups_.size()) throw ParameterError("edge endpoint out of range");
            edges_.emplace_back(a, b);
        }
        std::size_t group_count() const noexcept { return groups_.size(); }
        nlohmann::json& metadata() noexcept { return metadata_; }

        CommunityGraph build() && {
            return CommunityGraph::from_edges(std::move(groups_), std::move(edges_), std::move(metadata_));
        }

    private:
        std::vector<Group> groups_;
        std::vector<std::pair<GroupId, GroupId>> edges_;
        nlohmann::json metadata_ = nlohmann::json::object();
    };

    CommunityGraph() = default;

    /// Duplicate pairs are merged; both orientations may be given.
    static CommunityGraph from_edges(std::vector<Group> groups, std::vector<std::pair<GroupId, GroupId>> edges,
                                     nlohmann::json metadata = nlohmann::json::object()) {
        CommunityGraph g;
        g.groups_ = std::move(groups);
        g.metadata_ = std::move(metadata);
        const std::size_t n = g.groups_.size();
        std::vector<std::pair<GroupId, GroupId>> dir;
        dir.reserve(edges.size() * 2);
        for (auto [a, b] : edges) {
            if (a == b) throw ParameterError("a group cannot be adjacent to itself");
            if (a >= n || b >= n) throw ParameterError("edge endpoint out of range");
            dir.emplace_back(a, b);
            dir.emplace_back(b, a);
        }
        std::sort(dir.begin(), dir.end());
        dir.erase(std::unique(dir.begin(), dir.end()), dir.end());
        g.offsets_.assign(n + 1, 0);
        for (auto [a, b] : dir) ++g.offsets_[a + 1];
        std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
        g.targets_.reserve(dir.size());
        for (auto [a, b] : dir) g.targets_.push_back(b);
        return g;
    }

    /// The oracle must be symmetric and false on the diagonal; it is trusted.
    static CommunityGraph from_oracle(std::vector<Group> groups, EdgeOracle oracle,
                                      nlohmann::json metadata = nlohmann::json::object()) {
        CommunityGraph g;
        g.groups_ = std::move(groups);
        g.metadata_ = std::move(metadata);
        g.oracle_ = std::make_shared<EdgeOracle>(std::move(oracle));
        return g;
    }

    std::size_t group_count() const noexcept { return groups_.size(); }
    const Group& group(GroupId g) const { return groups_.at(g); }
    const std::vector<Group>& groups() const noexcept { return groups_; }
    std::uint64_t multiplicity(GroupId g) const { return groups_[g].multiplicity; }

    std::uint64_t vertex_count() const noexcept {
        std::uint64_t s = 0;
        for (const auto& gr : groups_) s += gr.multiplicity;
        return s;
    }

    bool is_oracle() const noexcept { return static_cast<bool>(oracle_); }
    const nlohmann::json& metadata() const noexcept { return metadata_; }
    nlohmann::json& metadata() noexcept { return metadata_; }

    bool adjacent(GroupId a, GroupId b) const {
        if (a == b) return false;
        if (oracle_) return (*oracle_)(a, b);
        const auto nb = neighbors(a);
        return std::binary_search(nb.begin(), nb.end(), b);
    }

    /// Sorted neighbor groups. Explicit graphs only.
    std::span<const GroupId> neighbors(GroupId g) const {
        if (oracle_) throw Error("neighbor lists are not stored for an oracle graph; materialize it first");
        return {targets_.data() + offsets_[g], targets_.data() + offsets_[g + 1]};
    }

    /// Sorted neighbor groups for either representation.
    std::vector<GroupId> neighbor_list(GroupId g) const {
        if (!oracle_) {
            auto nb = neighbors(g);
            return {nb.begin(), nb.end()};
        }
        std::vector<GroupId> out;
        for (GroupId h = 0; h < groups_.size(); ++h)
            if (h != g && (*oracle_)(g, h)) out.push_back(h);
        return out;
    }

    std::size_t degree(GroupId g) const { return oracle_ ? neighbor_list(g).size() : offsets_[g + 1] - offsets_[g]; }

    /// Number of group-level edges (unordered pairs).
    std::size_t group_edge_count() const {
        if (oracle_) throw Error("edge count of an oracle graph requires materialization");
        return targets_.size() / 2;
    }

    /// Explicit copy of an oracle graph; pair queries are charged to the budget.
    CommunityGraph materialize(std::uint64_t budget = default_budget()) const {
        if (!oracle_) return *this;
        const std::uint64_t n = groups_.size();
        require_within_budget("materializing oracle graph (group pairs)", n * (n - 1) / 2, budget);
        std::vector<std::pair<GroupId, GroupId>> edges;
        for (GroupId a = 0; a < n; ++a)
            for (GroupId b = a + 1; b < n; ++b)
                if ((*oracle_)(a, b)) edges.emplace_back(a, b);
        nlohmann::json meta = metadata_;
        meta["materialized"] = true;
        return from_edges(groups_, std::move(edges), std::move(meta));
    }

private:
    std::vector<Group> groups_;
    std::vector<std::size_t> offsets_;
    std::vector<GroupId> targets_;
    std::shared_ptr<EdgeOracle> oracle_;
    nlohmann::json metadata_ = nlohmann::json::object();
};

/// Per-group selected counts.
struct SubsetSelection {
    std::vector<std::uint64_t> counts;

    SubsetSelection() = default;
    explicit SubsetSelection(std::vector<std::uint64_t> c) : counts(std::move(c)) {}

    static SubsetSelection none(std::size_t groups) { return SubsetSelection(std::vector<std::uint64_t>(groups, 0)); }
    static SubsetSelection whole_groups(const CommunityGraph& g, const std::vector<GroupId>& ids) {
        auto s = none(g.group_count());
        for (auto id : ids) s.counts.at(id) = g.multiplicity(id);
        return s;
    }

    std::uint64_t size() const noexcept {
        std::uint64_t s = 0;
        for (auto c : counts) s += c;
        return s;
    }
    bool empty() const noexcept { return size() == 0; }

    std::vector<GroupId> support() const {
        std::vector<GroupId> out;
        for (std::size_t i = 0; i < counts.size(); ++i)
            if (counts[i]) out.push_back(static_cast<GroupId>(i));
        return out;
    }

    void validate(const CommunityGraph& g) const {
        if (counts.size() != g.group_count()) throw ParameterError("selection length differs from the group count");
        for (std::size_t i = 0; i < counts.size(); ++i)
            if (counts[i] > g.multiplicity(static_cast<GroupId>(i)))
                throw ParameterError("selection takes more copies than group " + std::to_string(i) + " has");
    }

    friend auto operator<=>(const SubsetSelection&, const SubsetSelection&) = default;
};

/// Result of merging false twins (equal open neighborhoods) repeatedly.
struct TwinCompression {
    CommunityGraph graph;
    std::vector<GroupId> group_of;             ///< original group -> compressed group
    std::vector<std::vector<GroupId>> members; ///< compressed group -> original groups, ascending

    /// Distribute compressed counts over the original groups, filling members in order.
    SubsetSelection expand(const SubsetSelection& s, const CommunityGraph& original) const {
        auto out = SubsetSelection::none(original.group_count());
        for (std::size_t c = 0; c < members.size(); ++c) {
            std::uint64_t left = s.counts[c];
            for (auto g : members[c]) {
                const auto take = std::min(left, original.multiplicity(g));
                out.counts[g] = take;
                left -= take;
            }
        }
        return out;
    }
};

/// Groups with identical neighbor lists are never adjacent to each other, so
/// they merge into one group of summed multiplicity. Repeats until stable;
/// merging can create new twins. Explicit graphs only.
inline TwinCompression compress_twins(const CommunityGraph& g) {
    TwinCompression tc;
    const std::size_t n0 = g.group_count();
    std::vector<std::vector<GroupId>> members(n0);
    for (GroupId i = 0; i < n0; ++i) members[i] = {i};
    CommunityGraph cur = g;
    std::vector<GroupId> group_of(n0);
    std::iota(group_of.begin(), group_of.end(), 0);

    for (;;) {
        const std::size_t n = cur.group_count();
        std::map<std::vector<GroupId>, GroupId> by_nbhd;
        std::vector<GroupId> next_id(n);
        std::vector<Group> next_groups;
        std::vector<std::vector<GroupId>> next_members;
        for (GroupId i = 0; i < n; ++i) {
            auto nb = cur.neighbors(i);
            std::vector<GroupId> key(nb.begin(), nb.end());
            auto [it, fresh] = by_nbhd.emplace(std::move(key), static_cast<GroupId>(next_groups.size()));
            if (fresh) {
                next_groups.push_back(cur.group(i));
                next_members.push_back(members[i]);
            } else {
                auto& tgt = next_groups[it->second];
                tgt.multiplicity += cur.multiplicity(i);
                tgt.descriptor = "{\"merged\":true}";
                auto& mem = next_members[it->second];
                mem.insert(mem.end(), members[i].begin(), members[i].end());
            }
            next_id[i] = it->second;
        }
        if (next_groups.size() == n) break;
        std::vector<std::pair<GroupId, GroupId>> edges;
        for (GroupId i = 0; i < n; ++i)
            for (auto j : cur.neighbors(i))
                if (i < j) edges.emplace_back(next_id[i], next_id[j]);
        for (auto& gid : group_of) gid = next_id[gid];
        for (auto& m : next_members) std::sort(m.begin(), m.end());
        members = std::move(next_members);
        cur = CommunityGraph::from_edges(std::move(next_groups), std::move(edges), cur.metadata());
    }
    tc.graph = std::move(cur);
    tc.group_of = std::move(group_of);
    tc.members = std::move(members);
    return tc;
}

/// Connected components of the group graph, each sorted, ordered by smallest member.
inline std::vector<std::vector<GroupId>> connected_components(const CommunityGraph& g) {
    const std::size_t n = g.group_count();
    std::vector<char> seen(n, 0);
    std::vector<std::vector<GroupId>> out;
    for (GroupId s = 0; s < n; ++s) {
        if (seen[s]) continue;
        std::vector<GroupId> comp{s}, stack{s};
        seen[s] = 1;
        while (!stack.empty()) {
            const GroupId v = stack.back();
            stack.pop_back();
            for (auto w : g.neighbors(v))
                if (!seen[w]) {
                    seen[w] = 1;
                    comp.push_back(w);
                    stack.push_back(w);
                }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

/// Induced subgraph on the given groups; ids are renumbered in list order.
inline CommunityGraph induced_subgraph(const CommunityGraph& g, const std::vector<GroupId>& ids) {
    std::vector<std::int64_t> pos(g.group_count(), -1);
    std::vector<Group> groups;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        pos[ids[i]] = static_cast<std::int64_t>(i);
        groups.push_back(g.group(ids[i]));
    }
    std::vector<std::pair<GroupId, GroupId>> edges;
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (auto w : g.neighbors(ids[i]))
            if (pos[w] > static_cast<std::int64_t>(i)) edges.emplace_back(static_cast<GroupId>(i), static_cast<GroupId>(pos[w]));
    return CommunityGraph::from_edges(std::move(groups), std::move(edges));
}

} // namespace communitylab
