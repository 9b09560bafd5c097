#pragma once

// Label Cover -> community graph for the gap (detection) problem.
//
// Block X_i of A is hosted on the row {F_A[i]} x F (variable k of the block at
// (F_A[i], F[k])) and block Y_j of B on the column F x {F_B[j]} (variable k at
// (F[k], F_B[j])). A point may host one A and one B variable; its value v
// encodes the pair (v div |Σ_B|, v mod |Σ_B|), and values ≥ |Σ_A||Σ_B| name
// no label.
//
// A proper vertex is a balanced t-subset S of the field (exact quotas on F_A
// and F_B) with one polynomial of degree ≤ |F|-1 per row {s} x G and per
// column G x {s}, s in S, agreeing on S x S. Two proper vertices are adjacent
// when they agree on the intersection of their domains and the union of their
// decoded labelings violates no constraint. Aux twin groups u_H, u_{H_A},
// u_{H_B} (H of half size, rounded down) are adjacent to the proper vertices
// with S ⊆ H, S∩F_A ⊆ H_A, S∩F_B ⊆ H_B respectively.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "communitylab/budget.hpp"
#include "communitylab/community.hpp"
#include "communitylab/community_graph.hpp"
#include "communitylab/error.hpp"
#include "communitylab/field_poly.hpp"
#include "communitylab/label_cover.hpp"
#include "communitylab/partition.hpp"

namespace communitylab {

struct DecisionParams {
    PrimeField field{7};
    std::vector<FieldElem> grid;     ///< F
    std::vector<FieldElem> grid_A;   ///< F_A, one element per block of X
    std::vector<FieldElem> grid_B;   ///< F_B, one element per block of Y
    Blocks blocks_A, blocks_B;       ///< X_1.., Y_1..
    std::uint32_t t = 1;
    std::uint32_t quota_A = 0, quota_B = 0;
    std::uint64_t aux_cap = 16;      ///< m_aux = min(|V|^2, aux_cap)
    Rational epsilon{1, 4};
    bool omit_isolated_aux = true;   ///< drop aux groups with no proper neighbor

    /// Grid {0..grid_size-1}; F_A and F_B are its first n_A/ρ and next n_B/ρ
    /// elements; A and B are cut into consecutive blocks of ρ.
    static DecisionParams make(const LabelCoverInstance& inst, std::uint32_t p, std::uint32_t grid_size,
                               std::uint32_t rho, std::uint32_t t, std::uint32_t quota_A, std::uint32_t quota_B) {
        if (rho == 0) throw ParameterError("ρ must be positive");
        if (inst.n_A % rho || inst.n_B % rho) throw ParameterError("ρ must divide n_A and n_B");
        DecisionParams d;
        d.field = PrimeField(p);
        if (grid_size > p) throw ParameterError("grid larger than the field");
        for (std::uint32_t i = 0; i < grid_size; ++i) d.grid.push_back(FieldElem{i});
        const std::uint32_t ka = inst.n_A / rho, kb = inst.n_B / rho;
        if (ka + kb > grid_size) throw ParameterError("F_A and F_B do not fit disjointly in F");
        for (std::uint32_t i = 0; i < ka; ++i) d.grid_A.push_back(d.grid[i]);
        for (std::uint32_t j = 0; j < kb; ++j) d.grid_B.push_back(d.grid[ka + j]);
        d.blocks_A = contiguous_blocks(inst.n_A, rho);
        d.blocks_B = contiguous_blocks(inst.n_B, rho);
        d.t = t;
        d.quota_A = quota_A;
        d.quota_B = quota_B;
        return d;
    }

    /// Quota t·|F_X|/|G|; throws unless it is an integer.
    static std::uint32_t derived_quota(std::uint32_t t, std::size_t block_count, std::uint32_t p) {
        const std::uint64_t num = static_cast<std::uint64_t>(t) * block_count;
        if (num % p) throw ParameterError("quota t·|F_X|/|G| = " + std::to_string(num) + "/" + std::to_string(p) +
                                          " is not an integer");
        return static_cast<std::uint32_t>(num / p);
    }

    void validate(const LabelCoverInstance& inst) const {
        auto contains = [](const std::vector<FieldElem>& v, FieldElem e) {
            return std::find(v.begin(), v.end(), e) != v.end();
        };
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (!field.contains(grid[i])) throw ParameterError("grid element outside the field");
            for (std::size_t j = 0; j < i; ++j)
                if (grid[i] == grid[j]) throw ParameterError("grid F has duplicate elements");
        }
        if (grid.empty()) throw ParameterError("grid F is empty");
        for (auto e : grid_A)
            if (!contains(grid, e) || contains(grid_B, e)) throw ParameterError("F_A must lie in F and avoid F_B");
        for (auto e : grid_B)
            if (!contains(grid, e)) throw ParameterError("F_B must lie in F");
        if (blocks_A.size() != grid_A.size() || blocks_B.size() != grid_B.size())
            throw ParameterError("one block per element of F_A and F_B is required");
        for (const auto& b : blocks_A)
            if (b.size() > grid.size()) throw ParameterError("an A block is larger than |F|");
        for (const auto& b : blocks_B)
            if (b.size() > grid.size()) throw ParameterError("a B block is larger than |F|");
        if (static_cast<std::uint64_t>(inst.sigma_A) * inst.sigma_B > field.size())
            throw ParameterError("|G| must be at least |Σ_A|·|Σ_B|");
        if (t == 0 || t > field.size()) throw ParameterError("subset size t must lie in [1, |G|]");
        if (quota_A > grid_A.size() || quota_B > grid_B.size() || quota_A + quota_B > t)
            throw ParameterError("quotas must satisfy b_A ≤ |F_A|, b_B ≤ |F_B|, b_A + b_B ≤ t");
        if (epsilon <= Rational(0) || epsilon > Rational(1)) throw ParameterError("ε must lie in (0, 1]");
    }
};

struct ProperVertexD {
    std::uint32_t set_index = 0;     ///< into DecisionReduction::balanced_sets()
    std::vector<UniPoly> rows, cols; ///< rows[k] on {S[k]} x G, cols[k] on G x {S[k]}
};

enum class AuxKind { H, H_A, H_B };

inline const char* aux_kind_name(AuxKind k) {
    switch (k) {
    case AuxKind::H: return "H";
    case AuxKind::H_A: return "H_A";
    case AuxKind::H_B: return "H_B";
    }
    return "?";
}

struct AuxVertexD {
    AuxKind kind = AuxKind::H;
    std::vector<FieldElem> set;
};

enum class GraphMode { explicit_edges, oracle };

/// Pair decoded from one point value.
struct DecodedPoint {
    std::optional<std::uint32_t> a_var, b_var; ///< hosted variables
    std::optional<Label> a_label, b_label;
    bool invalid = false;                      ///< value names no label pair
};

struct DecisionCompletenessReport {
    std::uint64_t community_size = 0;
    bool is_community = false; ///< at (1, ε)
    CommunityProfile profile;
    std::vector<std::pair<GroupId, Rational>> aux_fractions; ///< adjacency of each aux group into C
    Rational max_aux_fraction;
    Rational max_outsider_fraction; ///< over proper vertices outside C
    Rational max_perturbed_fraction; ///< tables P + δ·L_z, one grid point z changed
    std::uint64_t perturbed_checked = 0;
};

struct SoundnessReport {
    GapResult gap;
    bool aux_all_or_none = true;
    std::uint64_t aux_groups_selected = 0;
    std::uint64_t max_assignments_per_line = 0;
    Rational list_bound; ///< 4/ε
};

class DecisionReduction {
public:
    DecisionReduction(LabelCoverInstance inst, DecisionParams params, double budget = default_budget())
        : inst_(std::move(inst)), params_(std::move(params)) {
        inst_.validate();
        params_.validate(inst_);
        p_ = params_.field.size();
        d_ = params_.grid.size() - 1;
        host_a_.assign(static_cast<std::size_t>(p_) * p_, -1);
        host_b_.assign(static_cast<std::size_t>(p_) * p_, -1);
        for (std::size_t i = 0; i < params_.blocks_A.size(); ++i)
            for (std::size_t k = 0; k < params_.blocks_A[i].size(); ++k)
                host_a_[pt(params_.grid_A[i], params_.grid[k])] = params_.blocks_A[i][k];
        for (std::size_t j = 0; j < params_.blocks_B.size(); ++j)
            for (std::size_t k = 0; k < params_.blocks_B[j].size(); ++k)
                host_b_[pt(params_.grid[k], params_.grid_B[j])] = params_.blocks_B[j][k];
        enumerate_sets(budget);
        enumerate_vertices(budget);
        build_aux();
    }

    const LabelCoverInstance& instance() const noexcept { return inst_; }
    const DecisionParams& params() const noexcept { return params_; }
    const std::vector<std::vector<FieldElem>>& balanced_sets() const noexcept { return sets_; }

    std::uint64_t proper_count() const noexcept { return vertices_.size(); }
    std::uint64_t aux_group_count() const noexcept { return aux_.size(); }
    std::uint64_t group_count() const noexcept { return proper_count() + aux_group_count(); }
    std::uint64_t aux_multiplicity() const noexcept { return m_aux_; }
    std::uint64_t aux_omitted() const noexcept { return aux_omitted_; }

    bool is_aux(GroupId id) const noexcept { return id >= proper_count(); }
    const ProperVertexD& proper(GroupId id) const { return vertices_.at(id); }
    const AuxVertexD& aux(GroupId id) const { return aux_.at(id - proper_count()); }
    const std::vector<FieldElem>& set_of(GroupId id) const { return sets_[proper(id).set_index]; }

    /// Mixed-radix pair for a value, or nothing when it names no pair.
    static std::optional<std::pair<Label, Label>> decode_pair(std::uint32_t value, std::uint32_t sigma_A,
                                                             std::uint32_t sigma_B) {
        if (value >= static_cast<std::uint64_t>(sigma_A) * sigma_B) return std::nullopt;
        return std::make_pair(value / sigma_B, value % sigma_B);
    }

    DecodedPoint decode_point(FieldElem value, GridPoint point) const {
        DecodedPoint d;
        const auto k = pt(point.first, point.second);
        if (host_a_[k] >= 0) d.a_var = static_cast<std::uint32_t>(host_a_[k]);
        if (host_b_[k] >= 0) d.b_var = static_cast<std::uint32_t>(host_b_[k]);
        if (!d.a_var && !d.b_var) return d;
        const auto pair = decode_pair(value.value, inst_.sigma_A, inst_.sigma_B);
        if (!pair) {
            d.invalid = true;
            return d;
        }
        if (d.a_var) d.a_label = pair->first;
        if (d.b_var) d.b_label = pair->second;
        return d;
    }

    /// Value of the vertex's assignment at (x, y); the point must lie on one of its lines.
    FieldElem value_at(const ProperVertexD& v, FieldElem x, FieldElem y) const {
        const auto& s = sets_[v.set_index];
        const auto& f = params_.field;
        for (std::size_t k = 0; k < s.size(); ++k)
            if (s[k] == x) return v.rows[k].evaluate(f, y);
        for (std::size_t k = 0; k < s.size(); ++k)
            if (s[k] == y) return v.cols[k].evaluate(f, x);
        throw ParameterError("point is outside the vertex's lines");
    }

    Labeling induced_assignment(const ProperVertexD& v) const {
        Labeling lab(inst_.n_A, inst_.n_B);
        const auto& s = sets_[v.set_index];
        auto in_s = [&](FieldElem e) { return std::find(s.begin(), s.end(), e) != s.end(); };
        for (std::uint32_t x = 0; x < p_; ++x)
            for (std::uint32_t y = 0; y < p_; ++y) {
                const auto k = pt(FieldElem{x}, FieldElem{y});
                if (host_a_[k] < 0 && host_b_[k] < 0) continue;
                if (!in_s(FieldElem{x}) && !in_s(FieldElem{y})) continue;
                apply_decoded(lab, decode_point(value_at(v, FieldElem{x}, FieldElem{y}), {FieldElem{x}, FieldElem{y}}));
            }
        return lab;
    }

    /// Direct edge rule: compares the two vertices point by point.
    bool edge_predicate(GroupId a, GroupId b) const {
        if (a == b) return false;
        if (is_aux(a) && is_aux(b)) return false;
        if (is_aux(a) || is_aux(b)) return aux_adjacent(aux(is_aux(a) ? a : b), set_of(is_aux(a) ? b : a));
        const auto& v = proper(a);
        const auto& w = proper(b);
        for (auto [x, y] : intersection_domain(v.set_index, w.set_index))
            if (value_at(v, x, y) != value_at(w, x, y)) return false;
        return union_violation_free(inst_, induced_assignment(v), induced_assignment(w));
    }

    CommunityGraph build(GraphMode mode, double budget = default_budget()) const {
        std::vector<Group> groups;
        groups.reserve(group_count());
        for (GroupId id = 0; id < proper_count(); ++id) groups.push_back({1, descriptor(id)});
        for (std::uint64_t a = 0; a < aux_.size(); ++a)
            groups.push_back({m_aux_, descriptor(static_cast<GroupId>(proper_count() + a))});
        nlohmann::json meta = metadata();
        if (mode == GraphMode::oracle) {
            meta["oracle"] = true;
            return CommunityGraph::from_oracle(
                std::move(groups), [this](GroupId a, GroupId b) { return edge_predicate(a, b); }, std::move(meta));
        }
        require_within_budget("decision graph vertices", static_cast<double>(proper_count() + aux_.size() * m_aux_),
                              budget);

        std::vector<Labeling> labs;
        std::vector<char> ok;
        for (const auto& v : vertices_) {
            labs.push_back(induced_assignment(v));
            ok.push_back(lc_partial_violations(inst_, labs.back()).violated == 0);
        }
        std::vector<std::pair<GroupId, GroupId>> edges;
        for (std::uint32_t a = 0; a < sets_.size(); ++a)
            for (std::uint32_t b = a + 1; b < sets_.size(); ++b) {
                // Bucket set b's vertices by their values on the shared domain.
                const auto dom = intersection_domain(a, b);
                std::unordered_map<std::string, std::vector<GroupId>> bucket;
                for (GroupId w = by_set_[b]; w < by_set_[b + 1]; ++w)
                    if (ok[w]) bucket[domain_key(vertices_[w], dom)].push_back(w);
                for (GroupId v = by_set_[a]; v < by_set_[a + 1]; ++v) {
                    if (!ok[v]) continue;
                    auto it = bucket.find(domain_key(vertices_[v], dom));
                    if (it == bucket.end()) continue;
                    for (auto w : it->second)
                        if (union_violation_free(inst_, labs[v], labs[w])) edges.emplace_back(v, w);
                }
            }
        for (std::uint64_t x = 0; x < aux_.size(); ++x)
            for (GroupId v = 0; v < proper_count(); ++v)
                if (aux_adjacent(aux_[x], set_of(v))) edges.emplace_back(static_cast<GroupId>(proper_count() + x), v);
        return CommunityGraph::from_edges(std::move(groups), std::move(edges), std::move(meta));
    }

    std::string descriptor(GroupId id) const {
        nlohmann::json j;
        if (is_aux(id)) {
            const auto& u = aux(id);
            std::vector<std::uint32_t> set;
            for (auto e : u.set) set.push_back(e.value);
            j = {{"kind", std::string("aux_") + aux_kind_name(u.kind)}, {"set", set}};
        } else {
            const auto& v = proper(id);
            std::vector<std::uint32_t> s;
            for (auto e : sets_[v.set_index]) s.push_back(e.value);
            std::vector<std::vector<std::uint32_t>> rows, cols;
            for (const auto& q : v.rows) rows.push_back(q.coefficient_values());
            for (const auto& q : v.cols) cols.push_back(q.coefficient_values());
            j = {{"kind", "proper"}, {"S", s}, {"rows", rows}, {"cols", cols}};
        }
        return j.dump();
    }

    nlohmann::json metadata() const {
        std::vector<std::uint32_t> grid, ga, gb;
        for (auto e : params_.grid) grid.push_back(e.value);
        for (auto e : params_.grid_A) ga.push_back(e.value);
        for (auto e : params_.grid_B) gb.push_back(e.value);
        return {{"construction", "decision"},
                {"field", p_},
                {"grid", grid},
                {"grid_A", ga},
                {"grid_B", gb},
                {"t", params_.t},
                {"quota_A", params_.quota_A},
                {"quota_B", params_.quota_B},
                {"epsilon", params_.epsilon.str()},
                {"balanced_sets", sets_.size()},
                {"proper_vertices", proper_count()},
                {"aux_groups", aux_.size()},
                {"aux_multiplicity", m_aux_},
                {"aux_cap", params_.aux_cap},
                {"aux_omitted_isolated", aux_omitted_}};
    }

    /// Zero-filled low-degree extension of λ on the hosted points.
    BiPolyTable extension_of(const Labeling& lambda) const {
        if (!lambda.is_total() || lc_value(inst_, lambda) != Rational(1))
            throw ParameterError("community_from_labeling needs a satisfying total labeling");
        std::map<GridPoint, FieldElem> partial;
        for (auto x : params_.grid)
            for (auto y : params_.grid) {
                const auto k = pt(x, y);
                if (host_a_[k] < 0 && host_b_[k] < 0) continue;
                const Label la = host_a_[k] >= 0 ? lambda.a(static_cast<std::uint32_t>(host_a_[k])).value : 0;
                const Label lb = host_b_[k] >= 0 ? lambda.b(static_cast<std::uint32_t>(host_b_[k])).value : 0;
                partial[{x, y}] = FieldElem{la * inst_.sigma_B + lb};
            }
        return low_degree_extend(params_.field, params_.grid, partial, FieldElem{0});
    }

    /// The restriction vertex of P on every balanced S.
    SubsetSelection community_from_table(const BiPolyTable& table) const {
        auto s = SubsetSelection::none(group_count());
        for (std::uint32_t si = 0; si < sets_.size(); ++si) s.counts[restriction_vertex(table, si)] = 1;
        return s;
    }

    SubsetSelection community_from_labeling(const Labeling& lambda) const {
        return community_from_table(extension_of(lambda));
    }

    GroupId restriction_vertex(const BiPolyTable& table, std::uint32_t si) const {
        ProperVertexD v;
        v.set_index = si;
        for (auto s : sets_[si]) {
            v.rows.push_back(restrict_line(table, Axis::row, s));
            v.cols.push_back(restrict_line(table, Axis::col, s));
        }
        auto it = index_.find(vertex_key(v));
        if (it == index_.end()) throw Error("restriction is not a vertex of the graph");
        return it->second;
    }

    DecisionCompletenessReport completeness(const CommunityGraph& g, const Labeling& lambda) const {
        DecisionCompletenessReport r;
        const auto table = extension_of(lambda);
        const auto c = community_from_table(table);
        r.community_size = c.size();
        r.profile = profile(g, c);
        r.is_community = satisfies(r.profile, Rational(1), params_.epsilon);
        const auto in = selected_neighbor_counts(g, c);
        const auto n = static_cast<std::int64_t>(c.size());
        for (GroupId id = 0; id < g.group_count(); ++id) {
            if (c.counts[id]) continue;
            const Rational frac(static_cast<std::int64_t>(in[id]), n);
            if (is_aux(id)) {
                r.aux_fractions.emplace_back(id, frac);
                r.max_aux_fraction = std::max(r.max_aux_fraction, frac);
            } else {
                r.max_outsider_fraction = std::max(r.max_outsider_fraction, frac);
            }
        }
        // Perturb the table at one grid point z: P + δ·L_z stays low-degree.
        for (auto zx : params_.grid)
            for (auto zy : params_.grid) {
                std::map<GridPoint, FieldElem> bump{{{zx, zy}, FieldElem{1}}};
                const auto lz = low_degree_extend(params_.field, params_.grid, bump, FieldElem{0});
                BiPolyTable moved = table;
                for (std::uint32_t x = 0; x < p_; ++x)
                    for (std::uint32_t y = 0; y < p_; ++y)
                        moved.set(FieldElem{x}, FieldElem{y},
                                  params_.field.add(table.at(FieldElem{x}, FieldElem{y}), lz.at(FieldElem{x}, FieldElem{y})));
                for (std::uint32_t si = 0; si < sets_.size(); ++si) {
                    const GroupId v = restriction_vertex(moved, si);
                    if (c.counts[v]) continue;
                    ++r.perturbed_checked;
                    r.max_perturbed_fraction =
                        std::max(r.max_perturbed_fraction, Rational(static_cast<std::int64_t>(in[v]), n));
                }
            }
        return r;
    }

    /// max_gap over the graph plus the aux all-or-none and list-decoding probes on the witness.
    SoundnessReport soundness_probe(const CommunityGraph& g, double budget = default_budget()) const {
        SoundnessReport r;
        r.gap = max_gap(g, budget);
        r.list_bound = Rational(4) / params_.epsilon;
        const auto& w = r.gap.witness;
        for (GroupId id = proper_count(); id < g.group_count(); ++id) {
            if (!w.counts[id]) continue;
            ++r.aux_groups_selected;
            if (w.counts[id] != g.multiplicity(id)) r.aux_all_or_none = false;
        }
        // Distinct polynomials each line receives from the witness.
        std::map<std::pair<int, std::uint32_t>, std::vector<std::vector<std::uint32_t>>> per_line;
        for (GroupId id = 0; id < proper_count(); ++id) {
            if (!w.counts[id]) continue;
            const auto& v = proper(id);
            const auto& s = sets_[v.set_index];
            for (std::size_t k = 0; k < s.size(); ++k) {
                per_line[{0, s[k].value}].push_back(v.rows[k].coefficient_values());
                per_line[{1, s[k].value}].push_back(v.cols[k].coefficient_values());
            }
        }
        for (auto& [line, polys] : per_line) {
            std::sort(polys.begin(), polys.end());
            const auto distinct = static_cast<std::uint64_t>(std::unique(polys.begin(), polys.end()) - polys.begin());
            r.max_assignments_per_line = std::max(r.max_assignments_per_line, distinct);
        }
        return r;
    }

private:
    std::size_t pt(FieldElem x, FieldElem y) const noexcept {
        return static_cast<std::size_t>(x.value) * p_ + y.value;
    }

    void apply_decoded(Labeling& lab, const DecodedPoint& d) const {
        if (d.a_var) {
            if (d.invalid) lab.mark_invalid_a(*d.a_var);
            else lab.assign_a(*d.a_var, *d.a_label);
        }
        if (d.b_var) {
            if (d.invalid) lab.mark_invalid_b(*d.b_var);
            else lab.assign_b(*d.b_var, *d.b_label);
        }
    }

    bool aux_adjacent(const AuxVertexD& u, const std::vector<FieldElem>& s) const {
        auto in = [](const std::vector<FieldElem>& v, FieldElem e) { return std::find(v.begin(), v.end(), e) != v.end(); };
        const auto& only = u.kind == AuxKind::H_A ? params_.grid_A : params_.grid_B;
        for (auto e : s) {
            if (u.kind != AuxKind::H && !in(only, e)) continue;
            if (!in(u.set, e)) return false;
        }
        return true;
    }

    // (S∩T)×G ∪ G×(S∩T) ∪ S×T ∪ T×S, each point once, in row-major order.
    std::vector<GridPoint> intersection_domain(std::uint32_t a, std::uint32_t b) const {
        const auto& s = sets_[a];
        const auto& t = sets_[b];
        auto in = [](const std::vector<FieldElem>& v, std::uint32_t e) {
            return std::find(v.begin(), v.end(), FieldElem{e}) != v.end();
        };
        std::vector<GridPoint> out;
        for (std::uint32_t x = 0; x < p_; ++x)
            for (std::uint32_t y = 0; y < p_; ++y) {
                const bool on_s = in(s, x) || in(s, y);
                const bool on_t = in(t, x) || in(t, y);
                if (on_s && on_t) out.push_back({FieldElem{x}, FieldElem{y}});
            }
        return out;
    }

    std::string domain_key(const ProperVertexD& v, const std::vector<GridPoint>& dom) const {
        std::string key;
        key.reserve(dom.size() * 2);
        for (auto [x, y] : dom) {
            const auto val = value_at(v, x, y).value;
            key.push_back(static_cast<char>(val & 0xff));
            key.push_back(static_cast<char>(val >> 8));
        }
        return key;
    }

    static std::string vertex_key(const ProperVertexD& v) {
        std::string key = std::to_string(v.set_index) + ":";
        for (const auto* polys : {&v.rows, &v.cols})
            for (const auto& q : *polys) {
                for (auto c : q.coefficient_values()) key += std::to_string(c) + ",";
                key += ";";
            }
        return key;
    }

    void enumerate_sets(double budget) {
        std::vector<std::uint32_t> pick;
        double total = 1;
        for (std::uint32_t i = 0; i < params_.t; ++i) total = total * (p_ - i) / (i + 1);
        require_within_budget("balanced subset enumeration", total, budget);
        auto in = [](const std::vector<FieldElem>& v, std::uint32_t e) {
            return std::find(v.begin(), v.end(), FieldElem{e}) != v.end();
        };
        auto rec = [&](auto&& self, std::uint32_t from) -> void {
            if (pick.size() == params_.t) {
                std::uint32_t qa = 0, qb = 0;
                for (auto e : pick) {
                    qa += in(params_.grid_A, e);
                    qb += in(params_.grid_B, e);
                }
                if (qa != params_.quota_A || qb != params_.quota_B) return;
                std::vector<FieldElem> s;
                for (auto e : pick) s.push_back(FieldElem{e});
                sets_.push_back(std::move(s));
                return;
            }
            for (std::uint32_t e = from; e < p_; ++e) {
                pick.push_back(e);
                self(self, e + 1);
                pick.pop_back();
            }
        };
        rec(rec, 0);
        if (sets_.empty()) throw ParameterError("no balanced subset satisfies the quotas");
    }

    // Rows are free; each column is then pinned on S and solved by interpolation.
    void enumerate_vertices(double budget) {
        const auto& f = params_.field;
        const std::uint64_t per_poly = poly_count(f, d_);
        const std::uint32_t t = params_.t;
        double rows_space = static_cast<double>(sets_.size());
        for (std::uint32_t k = 0; k < t; ++k) rows_space *= static_cast<double>(per_poly);
        require_within_budget("decision vertex enumeration (row tuples)", rows_space, budget);

        by_set_.push_back(0);
        for (std::uint32_t si = 0; si < sets_.size(); ++si) {
            const auto& s = sets_[si];
            std::vector<FieldElem> extra; // interpolation nodes outside S when t < |F|
            for (std::uint32_t e = 0; e < p_ && s.size() + extra.size() < d_ + 1; ++e)
                if (std::find(s.begin(), s.end(), FieldElem{e}) == s.end()) extra.push_back(FieldElem{e});
            if (s.size() + extra.size() < d_ + 1) throw ParameterError("field too small for the column degree");

            std::vector<std::uint64_t> idx(t, 0);
            std::vector<UniPoly> rows(t);
            for (;;) {
                for (std::uint32_t k = 0; k < t; ++k) rows[k] = poly_from_index(f, d_, idx[k]);
                // Candidate columns per s' in S.
                std::vector<std::vector<UniPoly>> options(t);
                bool feasible = true;
                for (std::uint32_t c = 0; c < t && feasible; ++c) {
                    std::vector<FieldElem> xs(s.begin(), s.end()), ys;
                    for (std::uint32_t k = 0; k < t; ++k) ys.push_back(rows[k].evaluate(f, s[c]));
                    options[c] = solve_column(xs, ys, extra);
                    feasible = !options[c].empty();
                }
                if (feasible) {
                    std::vector<std::size_t> pick(t, 0);
                    for (;;) {
                        ProperVertexD v;
                        v.set_index = si;
                        v.rows = rows;
                        for (std::uint32_t c = 0; c < t; ++c) v.cols.push_back(options[c][pick[c]]);
                        index_.emplace(vertex_key(v), static_cast<GroupId>(vertices_.size()));
                        vertices_.push_back(std::move(v));
                        std::uint32_t c = 0;
                        while (c < t && ++pick[c] == options[c].size()) pick[c++] = 0;
                        if (c == t) break;
                    }
                }
                std::uint32_t k = 0;
                while (k < t && ++idx[k] == per_poly) idx[k++] = 0;
                if (k == t) break;
            }
            by_set_.push_back(static_cast<GroupId>(vertices_.size()));
        }
        const double v = static_cast<double>(vertices_.size());
        m_aux_ = static_cast<std::uint64_t>(std::min(v * v, static_cast<double>(params_.aux_cap)));
        if (m_aux_ == 0) m_aux_ = 1;
    }

    // All polynomials of degree ≤ d through (xs, ys); free values at `extra` when under-determined.
    std::vector<UniPoly> solve_column(const std::vector<FieldElem>& xs, const std::vector<FieldElem>& ys,
                                      const std::vector<FieldElem>& extra) const {
        const auto& f = params_.field;
        std::vector<UniPoly> out;
        if (xs.size() >= d_ + 1) {
            std::vector<FieldElem> x0(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(d_ + 1));
            std::vector<FieldElem> y0(ys.begin(), ys.begin() + static_cast<std::ptrdiff_t>(d_ + 1));
            UniPoly q = interpolate_values(f, x0, y0, d_);
            for (std::size_t i = d_ + 1; i < xs.size(); ++i)
                if (q.evaluate(f, xs[i]) != ys[i]) return out;
            out.push_back(std::move(q));
            return out;
        }
        std::vector<std::uint32_t> free(extra.size(), 0);
        for (;;) {
            std::vector<FieldElem> x1(xs), y1(ys);
            for (std::size_t i = 0; i < extra.size(); ++i) {
                x1.push_back(extra[i]);
                y1.push_back(FieldElem{free[i]});
            }
            out.push_back(interpolate_values(f, x1, y1, d_));
            std::size_t i = 0;
            while (i < free.size() && ++free[i] == p_) free[i++] = 0;
            if (i == free.size()) break;
        }
        return out;
    }

    void build_aux() {
        auto subsets = [](const std::vector<FieldElem>& pool, std::size_t k) {
            std::vector<std::vector<FieldElem>> out;
            std::vector<FieldElem> cur;
            auto rec = [&](auto&& self, std::size_t from) -> void {
                if (cur.size() == k) {
                    out.push_back(cur);
                    return;
                }
                for (std::size_t i = from; i < pool.size(); ++i) {
                    cur.push_back(pool[i]);
                    self(self, i + 1);
                    cur.pop_back();
                }
            };
            rec(rec, 0);
            return out;
        };
        const auto all = params_.field.elements();
        auto add_kind = [&](AuxKind kind, const std::vector<FieldElem>& pool) {
            for (auto& h : subsets(pool, pool.size() / 2)) {
                AuxVertexD u{kind, std::move(h)};
                bool any = false;
                for (std::uint32_t si = 0; si < sets_.size() && !any; ++si) any = aux_adjacent(u, sets_[si]);
                if (!any && params_.omit_isolated_aux) {
                    ++aux_omitted_;
                    continue;
                }
                aux_.push_back(std::move(u));
            }
        };
        add_kind(AuxKind::H, all);
        add_kind(AuxKind::H_A, params_.grid_A);
        add_kind(AuxKind::H_B, params_.grid_B);
    }

    LabelCoverInstance inst_;
    DecisionParams params_;
    std::uint32_t p_ = 0;
    std::size_t d_ = 0;
    std::vector<std::int64_t> host_a_, host_b_; ///< point -> hosted variable or -1
    std::vector<std::vector<FieldElem>> sets_;
    std::vector<ProperVertexD> vertices_;
    std::vector<GroupId> by_set_; ///< vertices of set i are [by_set_[i], by_set_[i+1])
    std::unordered_map<std::string, GroupId> index_;
    std::vector<AuxVertexD> aux_;
    std::uint64_t m_aux_ = 1;
    std::uint64_t aux_omitted_ = 0;
};

inline CommunityGraph build_decision_graph(const DecisionReduction& red, GraphMode mode,
                                           double budget = default_budget()) {
    return red.build(mode, budget);
}

} // namespace communitylab
