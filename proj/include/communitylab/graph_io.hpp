#pragma once

// Community graph text format:
//   cgraph k
//   id multiplicity descriptor-json      (k lines, ids 0..k-1 in order)
//   i j                                  (one line per group-level edge)
// Lines starting with '#' are comments. Oracle graphs cannot be written.
//
// Selections are JSON: {"counts": [c_0, ..., c_{k-1}]} or {"groups": [ids]}
// (whole groups).

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "communitylab/community.hpp"
#include "communitylab/community_graph.hpp"
#include "communitylab/error.hpp"

namespace communitylab {

inline void write_cgraph(std::ostream& out, const CommunityGraph& g) {
    if (g.is_oracle()) throw Error("oracle-backed graphs are not serializable; materialize or query edges instead");
    out << "cgraph " << g.group_count() << "\n";
    for (GroupId id = 0; id < g.group_count(); ++id)
        out << id << " " << g.multiplicity(id) << " " << g.group(id).descriptor << "\n";
    for (GroupId a = 0; a < g.group_count(); ++a)
        for (auto b : g.neighbors(a))
            if (a < b) out << a << " " << b << "\n";
}

inline CommunityGraph read_cgraph(std::istream& in, const std::string& source = "<cgraph>") {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() {
        while (std::getline(in, line)) {
            ++lineno;
            const auto pos = line.find_first_not_of(" \t\r");
            if (pos != std::string::npos && line[pos] != '#') return true;
        }
        return false;
    };
    if (!next_line()) throw ParseError(source, lineno, "missing 'cgraph k' header");
    std::istringstream hs(line);
    std::string magic;
    long long k = -1;
    if (!(hs >> magic >> k) || magic != "cgraph" || k < 0) throw ParseError(source, lineno, "expected 'cgraph k'");

    std::vector<Group> groups(static_cast<std::size_t>(k));
    for (long long id = 0; id < k; ++id) {
        if (!next_line()) throw ParseError(source, lineno, "expected " + std::to_string(k) + " group lines");
        std::istringstream ls(line);
        long long gid = -1, mult = 0;
        if (!(ls >> gid >> mult)) throw ParseError(source, lineno, "group line needs 'id multiplicity descriptor'");
        if (gid != id) throw ParseError(source, lineno, "group ids must be 0..k-1 in order");
        if (mult < 1) throw ParseError(source, lineno, "multiplicity must be at least 1");
        std::string desc;
        std::getline(ls >> std::ws, desc);
        if (desc.empty()) desc = "{}";
        if (!nlohmann::json::accept(desc)) throw ParseError(source, lineno, "descriptor is not valid JSON");
        groups[static_cast<std::size_t>(id)] = {static_cast<std::uint64_t>(mult), std::move(desc)};
    }
    std::vector<std::pair<GroupId, GroupId>> edges;
    while (next_line()) {
        std::istringstream ls(line);
        long long a = -1, b = -1;
        std::string rest;
        if (!(ls >> a >> b) || (ls >> rest)) throw ParseError(source, lineno, "edge line must be 'i j'");
        if (a < 0 || b < 0 || a >= k || b >= k) throw ParseError(source, lineno, "edge endpoint out of range");
        if (a == b) throw ParseError(source, lineno, "self-loop");
        edges.emplace_back(static_cast<GroupId>(a), static_cast<GroupId>(b));
    }
    return CommunityGraph::from_edges(std::move(groups), std::move(edges));
}

inline CommunityGraph read_cgraph(const std::string& text) {
    std::istringstream in(text);
    return read_cgraph(in);
}

inline nlohmann::json selection_to_json(const SubsetSelection& s) { return {{"counts", s.counts}}; }

inline SubsetSelection selection_from_json(const nlohmann::json& j, const CommunityGraph& g) {
    SubsetSelection s;
    if (j.contains("counts")) {
        s.counts = j.at("counts").get<std::vector<std::uint64_t>>();
    } else if (j.contains("groups")) {
        s = SubsetSelection::whole_groups(g, j.at("groups").get<std::vector<GroupId>>());
    } else {
        throw ParameterError("selection JSON needs \"counts\" or \"groups\"");
    }
    s.validate(g);
    return s;
}

inline nlohmann::json profile_to_json(const CommunityProfile& p) {
    return {{"alpha_star", p.alpha_star.str()},
            {"alpha_star_decimal", p.alpha_star.to_double()},
            {"beta_star", p.beta_star.str()},
            {"beta_star_decimal", p.beta_star.to_double()},
            {"gap", p.gap().str()},
            {"gap_decimal", p.gap().to_double()},
            {"size", p.size}};
}

} // namespace communitylab
