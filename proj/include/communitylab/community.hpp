#pragma once

// (α,β)-community verification, exact enumeration and counting, and the
// max-gap oracle.
//
// A member v of S counts itself: its score is |N[v] ∩ S| / |S| with the
// closed neighborhood N[v]. A non-member u scores |N(u) ∩ S| / |S|. S is an
// (α,β)-community when every member scores ≥ α and every non-member ≤ β.
//
// Selections are per-group counts. Copies in a group are twins, so a count
// vector stands for Π C(m_g, c_g) labeled subsets with one common profile.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "communitylab/budget.hpp"
#include "communitylab/community_graph.hpp"
#include "communitylab/error.hpp"
#include "communitylab/rational.hpp"

namespace communitylab {

using BigCount = boost::multiprecision::cpp_int;

struct CommunityProfile {
    Rational alpha_star;
    Rational beta_star;
    std::uint64_t size = 0;

    Rational gap() const { return alpha_star - beta_star; }
};

/// in[h] = number of selected vertices adjacent to group h (open neighborhood).
inline std::vector<std::uint64_t> selected_neighbor_counts(const CommunityGraph& g, const SubsetSelection& s) {
    std::vector<std::uint64_t> in(g.group_count(), 0);
    const auto support = s.support();
    if (!g.is_oracle()) {
        for (auto sg : support)
            for (auto h : g.neighbors(sg)) in[h] += s.counts[sg];
        return in;
    }
    for (GroupId h = 0; h < g.group_count(); ++h)
        for (auto sg : support)
            if (g.adjacent(h, sg)) in[h] += s.counts[sg];
    return in;
}

inline CommunityProfile profile_from_counts(const CommunityGraph& g, const SubsetSelection& s,
                                            const std::vector<std::uint64_t>& in) {
    const std::uint64_t n = s.size();
    if (n == 0) throw ParameterError("community profile of an empty selection");
    std::uint64_t min_member = UINT64_MAX, max_outsider = 0;
    for (GroupId h = 0; h < g.group_count(); ++h) {
        if (s.counts[h] > 0) min_member = std::min(min_member, in[h] + 1);
        if (s.counts[h] < g.multiplicity(h)) max_outsider = std::max(max_outsider, in[h]);
    }
    const auto den = static_cast<std::int64_t>(n);
    return {Rational(static_cast<std::int64_t>(min_member), den), Rational(static_cast<std::int64_t>(max_outsider), den),
            n};
}

inline CommunityProfile profile(const CommunityGraph& g, const SubsetSelection& s) {
    s.validate(g);
    return profile_from_counts(g, s, selected_neighbor_counts(g, s));
}

inline bool satisfies(const CommunityProfile& p, const Rational& alpha, const Rational& beta) {
    return p.alpha_star >= alpha && p.beta_star <= beta;
}

inline bool is_community(const CommunityGraph& g, const SubsetSelection& s, const Rational& alpha,
                         const Rational& beta) {
    return satisfies(profile(g, s), alpha, beta);
}

/// A threshold that turns the weak-tie test into a strict one on graphs with at
/// most n vertices: c/s < β iff c/s ≤ β - 1/(2·den(β)·n) for integers c and
/// 1 ≤ s ≤ n, since a gap below β is at least 1/(den(β)·s).
inline Rational strict_weak_tie_bound(const Rational& beta, std::uint64_t n) {
    return beta - Rational(1, 2 * beta.den() * static_cast<std::int64_t>(n));
}

inline BigCount binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    BigCount r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Number of labeled subsets a count vector stands for.
inline BigCount labeled_weight(const CommunityGraph& g, const SubsetSelection& s) {
    BigCount w = 1;
    for (GroupId h = 0; h < g.group_count(); ++h) w *= binomial(g.multiplicity(h), s.counts[h]);
    return w;
}

inline double count_vector_space(const CommunityGraph& g) {
    double total = 1;
    for (const auto& gr : g.groups()) total *= static_cast<double>(gr.multiplicity) + 1;
    return total;
}

using CommunityVisitor = std::function<void(const SubsetSelection&)>;

namespace detail {

// β·x compared against an integer count, exactly.
struct BetaCmp {
    __int128 num, den;
    explicit BetaCmp(const Rational& b) : num(b.num()), den(b.den()) {}
    bool exceeds(std::uint64_t count, std::uint64_t x) const {
        return static_cast<__int128>(count) * den > num * static_cast<__int128>(x);
    }
};

// Odometer over count vectors, maintaining in[] incrementally.
template <class Fn>
void for_each_count_vector(const CommunityGraph& g, Fn&& fn) {
    const std::size_t n = g.group_count();
    SubsetSelection s = SubsetSelection::none(n);
    std::vector<std::uint64_t> in(n, 0);
    for (;;) {
        std::size_t i = 0;
        while (i < n && s.counts[i] == g.multiplicity(static_cast<GroupId>(i))) {
            const auto drop = s.counts[i];
            for (auto h : g.neighbors(static_cast<GroupId>(i))) in[h] -= drop;
            s.counts[i] = 0;
            ++i;
        }
        if (i == n) return;
        ++s.counts[i];
        for (auto h : g.neighbors(static_cast<GroupId>(i))) ++in[h];
        fn(s, in);
    }
}

// α = 1 forces a clique with at most one copy per group. Groups are added in
// increasing id order; cnt[h] tracks |N(h) ∩ R|. A group h outside R and
// outside the candidate set P stays outside in every extension R ∪ Q, and
// its score there is at least (cnt[h] + |Q∩N(h)|) / (|R|+|Q|); the branch is
// cut once cnt[h] > β(|R| + |P \ N(h)|). A selected group with spare copies
// sees |R|-1 members, which caps |R| at 1/(1-β).
class CliqueCommunitySearch {
public:
    CliqueCommunitySearch(const CommunityGraph& g, const Rational& beta, std::uint64_t min_size, double budget)
        : g_(g), beta_(beta), min_size_(min_size), budget_(budget), cnt_(g.group_count(), 0),
          in_r_(g.group_count(), 0), in_p_(g.group_count(), 0) {}

    void run(const std::function<void(const std::vector<GroupId>&)>& found) {
        found_ = &found;
        for (GroupId v = 0; v < g_.group_count(); ++v) {
            std::vector<GroupId> cand;
            for (auto u : g_.neighbors(v))
                if (u > v) cand.push_back(u);
            extend(v, cand);
        }
    }

    std::uint64_t nodes() const noexcept { return nodes_; }

private:
    void extend(GroupId v, const std::vector<GroupId>& cand) {
        if (static_cast<double>(++nodes_) > budget_)
            throw BudgetExceeded("clique search nodes", static_cast<double>(nodes_), budget_);
        const std::size_t touched_mark = touched_.size();
        r_.push_back(v);
        in_r_[v] = 1;
        if (g_.multiplicity(v) >= 2) ++multi_;
        for (auto h : g_.neighbors(v))
            if (cnt_[h]++ == 0) touched_.push_back(h);

        const std::uint64_t r = r_.size();
        if (multi_ == 0 || !beta_.exceeds(r - 1, r)) {
            if (r >= min_size_ && outsiders_ok()) (*found_)(r_);
            if (!cand.empty() && !hopeless(cand)) {
                std::vector<GroupId> next;
                for (std::size_t i = 0; i < cand.size(); ++i) {
                    const GroupId u = cand[i];
                    next.clear();
                    auto nb = g_.neighbors(u);
                    std::set_intersection(cand.begin() + static_cast<std::ptrdiff_t>(i) + 1, cand.end(), nb.begin(),
                                          nb.end(), std::back_inserter(next));
                    extend(u, next);
                }
            }
        }

        for (auto h : g_.neighbors(v)) --cnt_[h];
        touched_.resize(touched_mark);
        if (g_.multiplicity(v) >= 2) --multi_;
        in_r_[v] = 0;
        r_.pop_back();
    }

    bool outsiders_ok() const {
        const std::uint64_t r = r_.size();
        for (auto h : touched_)
            if (!in_r_[h] && beta_.exceeds(cnt_[h], r)) return false;
        return true;
    }

    bool hopeless(const std::vector<GroupId>& cand) {
        const std::uint64_t r = r_.size(), p = cand.size();
        for (auto u : cand) in_p_[u] = 1;
        bool cut = false;
        for (auto h : touched_) {
            if (in_r_[h] || in_p_[h]) continue;
            const std::uint64_t c = cnt_[h];
            if (!beta_.exceeds(c, r)) continue;
            if (beta_.exceeds(c, r + p)) {
                cut = true;
                break;
            }
            auto nb = g_.neighbors(h);
            std::uint64_t common = 0;
            auto a = cand.begin();
            auto b = nb.begin();
            while (a != cand.end() && b != nb.end()) {
                if (*a < *b) ++a;
                else if (*b < *a) ++b;
                else {
                    ++common;
                    ++a;
                    ++b;
                }
            }
            if (beta_.exceeds(c, r + p - common)) {
                cut = true;
                break;
            }
        }
        for (auto u : cand) in_p_[u] = 0;
        return cut;
    }

    const CommunityGraph& g_;
    BetaCmp beta_;
    std::uint64_t min_size_;
    double budget_;
    std::vector<std::uint32_t> cnt_;
    std::vector<char> in_r_, in_p_;
    std::vector<GroupId> r_, touched_;
    std::size_t multi_ = 0;
    std::uint64_t nodes_ = 0;
    const std::function<void(const std::vector<GroupId>&)>* found_ = nullptr;
};

inline const CommunityGraph& explicit_view(const CommunityGraph& g, CommunityGraph& storage, double budget) {
    if (!g.is_oracle()) return g;
    storage = g.materialize(static_cast<std::uint64_t>(budget));
    return storage;
}

} // namespace detail

/// Visits every community count vector (unordered). α = 1 runs a clique
/// search whose node count is charged to the budget; α < 1 scans all
/// Π(m_g+1) count vectors.
inline void visit_communities(const CommunityGraph& graph, const Rational& alpha, const Rational& beta,
                              std::uint64_t min_size, const CommunityVisitor& visit, double budget = default_budget()) {
    CommunityGraph storage;
    const CommunityGraph& g = detail::explicit_view(graph, storage, budget);
    if (alpha > Rational(1)) return;
    if (alpha == Rational(1)) {
        detail::CliqueCommunitySearch search(g, beta, min_size, budget);
        SubsetSelection s = SubsetSelection::none(g.group_count());
        search.run([&](const std::vector<GroupId>& r) {
            for (auto v : r) s.counts[v] = 1;
            visit(s);
            for (auto v : r) s.counts[v] = 0;
        });
        return;
    }
    require_within_budget("community enumeration (count vectors)", count_vector_space(g), budget);
    detail::for_each_count_vector(g, [&](const SubsetSelection& s, const std::vector<std::uint64_t>& in) {
        if (s.size() >= min_size && satisfies(profile_from_counts(g, s, in), alpha, beta)) visit(s);
    });
}

/// All community count vectors in lexicographic order.
inline std::vector<SubsetSelection> enumerate_communities(const CommunityGraph& g, const Rational& alpha,
                                                          const Rational& beta, std::uint64_t min_size = 1,
                                                          double budget = default_budget()) {
    std::vector<SubsetSelection> out;
    visit_communities(g, alpha, beta, min_size, [&](const SubsetSelection& s) { out.push_back(s); }, budget);
    std::sort(out.begin(), out.end());
    return out;
}

/// Number of labeled vertex subsets that are (α,β)-communities.
inline BigCount count_communities(const CommunityGraph& graph, const Rational& alpha, const Rational& beta,
                                  std::uint64_t min_size = 1, double budget = default_budget()) {
    CommunityGraph storage;
    const CommunityGraph& g = detail::explicit_view(graph, storage, budget);
    BigCount total = 0;
    if (alpha == Rational(1)) {
        visit_communities(g, alpha, beta, min_size, [&](const SubsetSelection& s) { total += labeled_weight(g, s); },
                          budget);
        return total;
    }
    // Merging twins keeps the labeled vertex set, so counts carry over.
    const auto tc = compress_twins(g);
    visit_communities(tc.graph, alpha, beta, min_size,
                      [&](const SubsetSelection& s) { total += labeled_weight(tc.graph, s); }, budget);
    return total;
}

struct GapResult {
    Rational epsilon;
    SubsetSelection witness;
    CommunityProfile profile;
};

/// ε* = max over nonempty S of alpha_star(S) - beta_star(S). The maximum is
/// attained inside one connected component of the twin-compressed graph, so
/// each component is scanned on its own; the budget covers the sum.
inline GapResult max_gap(const CommunityGraph& graph, double budget = default_budget()) {
    CommunityGraph storage;
    const CommunityGraph& g = detail::explicit_view(graph, storage, budget);
    if (g.group_count() == 0) throw ParameterError("max gap of an empty graph");
    const auto tc = compress_twins(g);
    const auto comps = connected_components(tc.graph);
    double space = 0;
    for (const auto& comp : comps) {
        double c = 1;
        for (auto id : comp) c *= static_cast<double>(tc.graph.multiplicity(id)) + 1;
        space += c;
    }
    require_within_budget("max gap (count vectors over components)", space, budget);

    bool have = false;
    Rational best;
    SubsetSelection best_local;
    const std::vector<GroupId>* best_comp = nullptr;
    for (const auto& comp : comps) {
        const auto sub = induced_subgraph(tc.graph, comp);
        detail::for_each_count_vector(sub, [&](const SubsetSelection& s, const std::vector<std::uint64_t>& in) {
            const auto p = profile_from_counts(sub, s, in);
            const Rational gap = p.gap();
            if (!have || gap > best) {
                have = true;
                best = gap;
                best_local = s;
                best_comp = &comp;
            }
        });
    }
    auto compressed = SubsetSelection::none(tc.graph.group_count());
    for (std::size_t i = 0; i < best_comp->size(); ++i) compressed.counts[(*best_comp)[i]] = best_local.counts[i];
    GapResult res;
    res.epsilon = best;
    res.witness = tc.expand(compressed, g);
    res.profile = profile(g, res.witness);
    return res;
}

} // namespace communitylab
