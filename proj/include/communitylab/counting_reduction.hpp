#pragma once

// Label Cover -> community graph whose (1, 1/m)-communities correspond one to
// one with satisfying labelings.
//
// Variables sit on distinct points of the grid F x F (A first, row-major) and
// labels are field elements (label ℓ is the element ℓ on either side). A
// proper vertex v_{g,p1,p2,i} holds p1 on the column G x {g} (x -> p1(x)) and
// p2 on the row {g} x G (y -> p2(y)) with p1(g) = p2(g), and copy index
// i in [1, m]. Two proper vertices are adjacent when they agree on the points
// their lines share and the union of their induced assignments violates no
// constraint. The aux pair u_{g,i} (a twin group of two) is adjacent to every
// proper vertex with copy index i on a line g' != g.
//
// Group layout: proper vertices first, indexed
//   ((g * p^|F| + idx(p1)) * p^(|F|-1) + idx(p2 without constant)) * m + (i-1)
// where idx is the base-p coefficient index; the constant term of p2 is fixed
// by p2(g) = p1(g). Aux groups follow, indexed g * m + (i-1).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "communitylab/budget.hpp"
#include "communitylab/community.hpp"
#include "communitylab/community_graph.hpp"
#include "communitylab/error.hpp"
#include "communitylab/field_poly.hpp"
#include "communitylab/label_cover.hpp"

namespace communitylab {

struct CountingParams {
    PrimeField field{5};
    std::vector<FieldElem> grid; ///< F
    std::uint32_t mult = 2;      ///< m; ε = 1/m

    static CountingParams make(std::uint32_t p, std::uint32_t grid_size, std::uint32_t m) {
        CountingParams c;
        c.field = PrimeField(p);
        if (grid_size == 0 || grid_size > p) throw ParameterError("grid size must lie in [1, p]");
        for (std::uint32_t i = 0; i < grid_size; ++i) c.grid.push_back(FieldElem{i});
        c.mult = m;
        return c;
    }

    Rational epsilon() const { return Rational(1, mult); }

    void validate(const LabelCoverInstance& inst) const {
        if (mult < 2) throw ParameterError("multiplicity m must be at least 2");
        if (grid.empty()) throw ParameterError("grid F is empty");
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!field.contains(grid[i])) throw ParameterError("grid element outside the field");
            for (std::size_t j = 0; j < i; ++j)
                if (grid[i] == grid[j]) throw ParameterError("grid F has duplicate elements");
        }
        const std::uint64_t points = static_cast<std::uint64_t>(grid.size()) * grid.size();
        if (points < static_cast<std::uint64_t>(inst.n_A) + inst.n_B)
            throw ParameterError("|F|^2 = " + std::to_string(points) + " cannot host " +
                                 std::to_string(inst.n_A + inst.n_B) + " variables");
        if (inst.sigma_A > field.size() || inst.sigma_B > field.size())
            throw ParameterError("alphabets of size " + std::to_string(inst.sigma_A) + " and " +
                                 std::to_string(inst.sigma_B) + " do not embed into GF(" +
                                 std::to_string(field.size()) + ")");
    }
};

struct ProperVertexC {
    FieldElem g;
    UniPoly p1, p2;
    std::uint32_t i = 1;
};

struct AuxVertexC {
    FieldElem g;
    std::uint32_t i = 1;
};

struct StructureReport {
    bool pass = false;
    bool is_community = false;
    std::uint64_t aux_selected = 0;
    std::vector<std::uint64_t> proper_per_line; ///< selected proper vertices for each g
    std::vector<std::string> problems;
    std::optional<Labeling> decoded;
};

class CountingReduction {
public:
    CountingReduction(LabelCoverInstance inst, CountingParams params)
        : inst_(std::move(inst)), params_(std::move(params)) {
        inst_.validate();
        params_.validate(inst_);
        p_ = params_.field.size();
        d_ = params_.grid.size() - 1;
        p1_count_ = poly_count(params_.field, d_);
        hi_count_ = p1_count_ / p_;
        const std::size_t k = params_.grid.size();
        for (std::uint32_t v = 0; v < inst_.n_A + inst_.n_B; ++v) {
            const GridPoint pt{params_.grid[v / k], params_.grid[v % k]};
            points_.push_back(pt);
        }
    }

    const LabelCoverInstance& instance() const noexcept { return inst_; }
    const CountingParams& params() const noexcept { return params_; }

    std::uint64_t classes_per_line() const noexcept { return p1_count_ * hi_count_; }
    std::uint64_t proper_count() const noexcept { return p_ * classes_per_line() * params_.mult; }
    std::uint64_t aux_group_count() const noexcept { return static_cast<std::uint64_t>(p_) * params_.mult; }
    std::uint64_t group_count() const noexcept { return proper_count() + aux_group_count(); }
    /// Labeled vertices: proper vertices plus two per aux group.
    std::uint64_t vertex_count() const noexcept { return proper_count() + 2 * aux_group_count(); }

    GridPoint point_of_A(std::uint32_t a) const { return points_.at(a); }
    GridPoint point_of_B(std::uint32_t b) const { return points_.at(inst_.n_A + b); }

    bool is_aux(GroupId id) const noexcept { return id >= proper_count(); }

    GroupId aux_id(FieldElem g, std::uint32_t i) const {
        return static_cast<GroupId>(proper_count() + static_cast<std::uint64_t>(g.value) * params_.mult + (i - 1));
    }
    AuxVertexC aux(GroupId id) const {
        const std::uint64_t r = id - proper_count();
        return {FieldElem{static_cast<std::uint32_t>(r / params_.mult)}, static_cast<std::uint32_t>(r % params_.mult) + 1};
    }

    GroupId proper_id(const ProperVertexC& v) const {
        if (v.p1.evaluate(params_.field, v.g) != v.p2.evaluate(params_.field, v.g))
            throw ParameterError("proper vertex needs p1(g) = p2(g)");
        return static_cast<GroupId>(class_of(v.g, poly_index(params_.field, v.p1), poly_index(params_.field, v.p2) / p_) *
                                        params_.mult +
                                    (v.i - 1));
    }

    ProperVertexC proper(GroupId id) const {
        const std::uint64_t cls = id / params_.mult;
        ProperVertexC v;
        v.i = static_cast<std::uint32_t>(id % params_.mult) + 1;
        const std::uint64_t hi = cls % hi_count_;
        const std::uint64_t p1i = (cls / hi_count_) % p1_count_;
        v.g = FieldElem{static_cast<std::uint32_t>(cls / hi_count_ / p1_count_)};
        v.p1 = poly_from_index(params_.field, d_, p1i);
        v.p2 = p2_from(v.g, v.p1, hi);
        return v;
    }

    /// Labels read off the two lines of v; values that name no label are flagged invalid.
    Labeling induced_assignment(const ProperVertexC& v) const {
        Labeling lab(inst_.n_A, inst_.n_B);
        const auto& f = params_.field;
        for (std::uint32_t var = 0; var < points_.size(); ++var) {
            const auto [x, y] = points_[var];
            std::optional<FieldElem> val;
            if (y == v.g) val = v.p1.evaluate(f, x);
            else if (x == v.g) val = v.p2.evaluate(f, y);
            if (val) assign_decoded(lab, var, *val);
        }
        return lab;
    }

    /// Direct edge rule, evaluated from the descriptors of both groups.
    bool edge_predicate(GroupId a, GroupId b) const {
        if (a == b) return false;
        if (is_aux(a) && is_aux(b)) return false;
        if (is_aux(a) || is_aux(b)) {
            const auto u = aux(is_aux(a) ? a : b);
            const auto v = proper(is_aux(a) ? b : a);
            return v.g != u.g && v.i == u.i;
        }
        const auto v = proper(a), w = proper(b);
        const auto& f = params_.field;
        if (v.g == w.g) {
            if (!(v.p1 == w.p1 && v.p2 == w.p2)) return false;
        } else {
            if (v.p1.evaluate(f, w.g) != w.p2.evaluate(f, v.g)) return false;
            if (v.p2.evaluate(f, w.g) != w.p1.evaluate(f, v.g)) return false;
        }
        return union_satisfies(induced_assignment(v), induced_assignment(w));
    }

    CommunityGraph build(double budget = default_budget()) const {
        require_within_budget("counting graph vertices", static_cast<double>(vertex_count()), budget);
        const auto& f = params_.field;
        const std::uint64_t per_line = classes_per_line();
        const std::uint32_t m = params_.mult;

        // Per class (g, p1, p2): values on both lines, induced labeling, intra check.
        struct Cls {
            std::vector<FieldElem> v1, v2;
            Labeling lab;
            bool ok = false;
        };
        std::vector<Cls> cls(p_ * per_line);
        for (std::uint64_t c = 0; c < cls.size(); ++c) {
            const auto v = proper(static_cast<GroupId>(c * m));
            cls[c].v1 = v.p1.values(f);
            cls[c].v2 = v.p2.values(f);
            cls[c].lab = induced_assignment(v);
            cls[c].ok = lc_partial_violations(inst_, cls[c].lab).violated == 0;
        }

        std::vector<Group> groups;
        groups.reserve(group_count());
        for (GroupId id = 0; id < proper_count(); ++id) groups.push_back({1, descriptor(id)});
        for (std::uint64_t a = 0; a < aux_group_count(); ++a)
            groups.push_back({2, descriptor(static_cast<GroupId>(proper_count() + a))});

        std::vector<std::pair<GroupId, GroupId>> edges;
        auto link_copies = [&](std::uint64_t c1, std::uint64_t c2) {
            for (std::uint32_t i = 0; i < m; ++i)
                for (std::uint32_t j = 0; j < m; ++j)
                    if (c1 != c2 || i < j)
                        edges.emplace_back(static_cast<GroupId>(c1 * m + i), static_cast<GroupId>(c2 * m + j));
        };
        for (std::uint64_t c = 0; c < cls.size(); ++c)
            if (cls[c].ok) link_copies(c, c);
        for (std::uint32_t g = 0; g < p_; ++g)
            for (std::uint32_t h = g + 1; h < p_; ++h) {
                // classes on h keyed by (p2_h(g), p1_h(g)); a class on g needs (p1_g(h), p2_g(h))
                std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> bucket;
                for (std::uint64_t c = h * per_line; c < (h + 1) * per_line; ++c)
                    if (cls[c].ok) bucket[std::uint64_t{cls[c].v2[g].value} * p_ + cls[c].v1[g].value].push_back(c);
                for (std::uint64_t c = g * per_line; c < (g + 1) * per_line; ++c) {
                    if (!cls[c].ok) continue;
                    auto it = bucket.find(std::uint64_t{cls[c].v1[h].value} * p_ + cls[c].v2[h].value);
                    if (it == bucket.end()) continue;
                    for (auto c2 : it->second)
                        if (union_satisfies(cls[c].lab, cls[c2].lab)) link_copies(c, c2);
                }
            }
        for (std::uint32_t g = 0; g < p_; ++g)
            for (std::uint32_t i = 1; i <= m; ++i) {
                const GroupId u = aux_id(FieldElem{g}, i);
                for (std::uint64_t c = 0; c < cls.size(); ++c)
                    if (c / per_line != g) edges.emplace_back(u, static_cast<GroupId>(c * m + (i - 1)));
            }

        nlohmann::json meta = {{"construction", "counting"},
                               {"field", p_},
                               {"grid", grid_values()},
                               {"mult", m},
                               {"epsilon", params_.epsilon().str()},
                               {"n_A", inst_.n_A},
                               {"n_B", inst_.n_B},
                               {"sigma_A", inst_.sigma_A},
                               {"sigma_B", inst_.sigma_B},
                               {"proper_vertices", proper_count()},
                               {"aux_groups", aux_group_count()}};
        return CommunityGraph::from_edges(std::move(groups), std::move(edges), std::move(meta));
    }

    /// Oracle-backed graph answering adjacency through edge_predicate.
    CommunityGraph build_oracle() const {
        std::vector<Group> groups;
        for (GroupId id = 0; id < proper_count(); ++id) groups.push_back({1, descriptor(id)});
        for (std::uint64_t a = 0; a < aux_group_count(); ++a)
            groups.push_back({2, descriptor(static_cast<GroupId>(proper_count() + a))});
        return CommunityGraph::from_oracle(std::move(groups), [this](GroupId a, GroupId b) { return edge_predicate(a, b); },
                                           {{"construction", "counting"}, {"oracle", true}});
    }

    std::string descriptor(GroupId id) const {
        nlohmann::json j;
        if (is_aux(id)) {
            const auto u = aux(id);
            j = {{"kind", "aux"}, {"g", u.g.value}, {"i", u.i}};
        } else {
            const auto v = proper(id);
            j = {{"kind", "proper"},
                 {"g", v.g.value},
                 {"p1", v.p1.coefficient_values()},
                 {"p2", v.p2.coefficient_values()},
                 {"i", v.i}};
        }
        return j.dump();
    }

    /// All m·|G| proper vertices whose lines are restrictions of the
    /// low-degree extension of λ's embedding (unhosted grid points take 0).
    SubsetSelection community_from_labeling(const Labeling& lambda) const {
        if (!lambda.is_total() || lc_value(inst_, lambda) != Rational(1))
            throw ParameterError("community_from_labeling needs a satisfying total labeling");
        const auto& f = params_.field;
        std::map<GridPoint, FieldElem> partial;
        for (std::uint32_t a = 0; a < inst_.n_A; ++a) partial[point_of_A(a)] = FieldElem{lambda.a(a).value};
        for (std::uint32_t b = 0; b < inst_.n_B; ++b) partial[point_of_B(b)] = FieldElem{lambda.b(b).value};
        const auto table = low_degree_extend(f, params_.grid, partial, FieldElem{0});
        auto s = SubsetSelection::none(group_count());
        for (std::uint32_t g = 0; g < p_; ++g)
            for (std::uint32_t i = 1; i <= params_.mult; ++i) {
                ProperVertexC v{FieldElem{g}, restrict_line(table, Axis::col, FieldElem{g}),
                                restrict_line(table, Axis::row, FieldElem{g}), i};
                s.counts[proper_id(v)] = 1;
            }
        return s;
    }

    /// Checks that C has no aux vertex, m proper vertices on each line, all
    /// pairwise adjacent, and decodes to a satisfying labeling.
    StructureReport check_structure_claim(const CommunityGraph& g, const SubsetSelection& c) const {
        StructureReport r;
        if (c.counts.size() != group_count()) throw ParameterError("selection does not match this construction");
        r.is_community = is_community(g, c, Rational(1), params_.epsilon());
        r.proper_per_line.assign(p_, 0);
        std::vector<GroupId> members;
        std::vector<std::optional<ProperVertexC>> on_line(p_);
        for (GroupId id = 0; id < c.counts.size(); ++id) {
            if (!c.counts[id]) continue;
            if (is_aux(id)) {
                r.aux_selected += c.counts[id];
                continue;
            }
            members.push_back(id);
            auto v = proper(id);
            ++r.proper_per_line[v.g.value];
            if (!on_line[v.g.value]) on_line[v.g.value] = std::move(v);
        }
        if (!r.is_community) r.problems.push_back("selection is not a (1, 1/m)-community");
        if (r.aux_selected) r.problems.push_back(std::to_string(r.aux_selected) + " auxiliary vertices selected");
        for (std::uint32_t x = 0; x < p_; ++x)
            if (r.proper_per_line[x] != params_.mult)
                r.problems.push_back("line " + std::to_string(x) + " has " + std::to_string(r.proper_per_line[x]) +
                                     " proper vertices, expected " + std::to_string(params_.mult));
        for (std::size_t i = 0; i < members.size(); ++i)
            for (std::size_t j = i + 1; j < members.size(); ++j)
                if (!g.adjacent(members[i], members[j])) {
                    r.problems.push_back("members " + std::to_string(members[i]) + " and " + std::to_string(members[j]) +
                                         " are inconsistent or violate a constraint");
                    i = members.size();
                    break;
                }
        // Decode each variable from the column through its point.
        Labeling lab(inst_.n_A, inst_.n_B);
        bool complete = true;
        for (std::uint32_t var = 0; var < points_.size(); ++var) {
            const auto [x, y] = points_[var];
            if (!on_line[y.value]) {
                complete = false;
                continue;
            }
            assign_decoded(lab, var, on_line[y.value]->p1.evaluate(params_.field, x));
        }
        if (complete && lab.is_total()) {
            if (lc_value(inst_, lab) != Rational(1)) r.problems.push_back("decoded labeling is not satisfying");
            r.decoded = lab;
        } else {
            r.problems.push_back("selection does not decode to a total labeling");
        }
        r.pass = r.problems.empty();
        return r;
    }

private:
    std::uint64_t class_of(FieldElem g, std::uint64_t p1i, std::uint64_t hi) const {
        return (static_cast<std::uint64_t>(g.value) * p1_count_ + p1i) * hi_count_ + hi;
    }

    UniPoly p2_from(FieldElem g, const UniPoly& p1, std::uint64_t hi) const {
        const auto& f = params_.field;
        std::vector<FieldElem> c(d_ + 1);
        FieldElem rest{0}, gp{1};
        for (std::size_t k = 1; k <= d_; ++k) {
            c[k] = FieldElem{static_cast<std::uint32_t>(hi % p_)};
            hi /= p_;
            gp = f.mul(gp, g);
            rest = f.add(rest, f.mul(c[k], gp));
        }
        c[0] = f.sub(p1.evaluate(f, g), rest);
        return UniPoly(std::move(c), d_);
    }

    void assign_decoded(Labeling& lab, std::uint32_t var, FieldElem val) const {
        if (var < inst_.n_A) {
            if (val.value < inst_.sigma_A) lab.assign_a(var, val.value);
            else lab.mark_invalid_a(var);
        } else {
            const std::uint32_t b = var - inst_.n_A;
            if (val.value < inst_.sigma_B) lab.assign_b(b, val.value);
            else lab.mark_invalid_b(b);
        }
    }

    bool union_satisfies(const Labeling& x, const Labeling& y) const { return union_violation_free(inst_, x, y); }

    std::vector<std::uint32_t> grid_values() const {
        std::vector<std::uint32_t> out;
        for (auto e : params_.grid) out.push_back(e.value);
        return out;
    }

    LabelCoverInstance inst_;
    CountingParams params_;
    std::uint32_t p_ = 0;
    std::size_t d_ = 0;
    std::uint64_t p1_count_ = 0, hi_count_ = 0;
    std::vector<GridPoint> points_;
};

inline CommunityGraph build_counting_graph(const LabelCoverInstance& inst, const CountingParams& params,
                                           double budget = default_budget()) {
    return CountingReduction(inst, params).build(budget);
}

} // namespace communitylab
