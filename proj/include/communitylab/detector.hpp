#pragma once

// Tuple-threshold community detection. A tuple is a multiset of k groups; its
// candidate is every group whose score, the number of tuple entries it is
// adjacent to (plus entries equal to itself under the closed convention),
// reaches θ·k. Candidates are selected as whole groups and re-verified
// exactly. Exhaustive mode walks all k-multisets; sampled mode draws tuples
// from a seeded stream.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "communitylab/budget.hpp"
#include "communitylab/community.hpp"
#include "communitylab/community_graph.hpp"
#include "communitylab/error.hpp"
#include "communitylab/rational.hpp"
#include "communitylab/rng.hpp"

namespace communitylab {

enum class DetectorMode { exhaustive, sampled };

/// neighborhood: a uniform anchor vertex, then k-1 vertices drawn uniformly
/// from the anchor's closed neighborhood. uniform: k independent vertices.
enum class TupleSampler { neighborhood, uniform };

struct DetectorConfig {
    std::uint32_t k = 1;
    std::optional<Rational> theta; ///< default (α+β)/2
    DetectorMode mode = DetectorMode::exhaustive;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 0;
    TupleSampler sampler = TupleSampler::neighborhood;
    bool closed = true;  ///< a tuple entry counts toward its own group
    bool strict = false; ///< score > θk instead of ≥
    std::uint64_t min_size = 1;
    unsigned threads = 1;
    double budget = default_budget();
};

struct DetectedCommunity {
    SubsetSelection selection;
    CommunityProfile profile;
};

struct DetectionResult {
    std::vector<DetectedCommunity> communities; ///< sorted by count vector
    std::uint64_t tuples = 0;
    std::uint64_t distinct_candidates = 0;
};

/// ⌈C·ln n / (α-β)²⌉, at least 1.
inline std::uint32_t default_tuple_size(std::uint64_t n, const Rational& alpha, const Rational& beta, double c = 1.0) {
    const double gap = (alpha - beta).to_double();
    if (gap <= 0) throw ParameterError("tuple size formula needs α > β");
    const double k = std::ceil(c * std::log(static_cast<double>(std::max<std::uint64_t>(n, 1))) / (gap * gap));
    return static_cast<std::uint32_t>(std::max(1.0, k));
}

inline double multiset_count(std::uint64_t n, std::uint64_t k) {
    double r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n + i - 1) / static_cast<double>(i);
    return r;
}

namespace detail {

struct Threshold {
    __int128 num, den, k;
    bool strict;
    Threshold(const Rational& theta, std::uint64_t k_, bool strict_)
        : num(theta.num()), den(theta.den()), k(static_cast<__int128>(k_)), strict(strict_) {}
    bool passes(std::uint64_t score) const {
        const __int128 lhs = static_cast<__int128>(score) * den, rhs = num * k;
        return strict ? lhs > rhs : lhs >= rhs;
    }
};

inline Rational resolve_theta(const DetectorConfig& cfg, const Rational& alpha, const Rational& beta) {
    Rational theta = cfg.theta ? *cfg.theta : (alpha + beta) * Rational(1, 2);
    if (theta < Rational(0) || theta > Rational(1)) throw ParameterError("threshold θ must lie in [0,1]");
    return theta;
}

// Scores for a tuple given as per-group multiplicities.
class TupleScorer {
public:
    TupleScorer(const CommunityGraph& g, bool closed) : g_(g), closed_(closed), score_(g.group_count(), 0) {}

    void add(GroupId t, std::int64_t times = 1) {
        for (auto h : g_.neighbors(t)) score_[h] += times;
        if (closed_) score_[t] += times;
    }
    std::uint64_t score(GroupId h) const { return static_cast<std::uint64_t>(score_[h]); }
    const std::vector<std::int64_t>& scores() const noexcept { return score_; }

private:
    const CommunityGraph& g_;
    bool closed_;
    std::vector<std::int64_t> score_;
};

// Deduplicates candidates by their group set and verifies each once.
template <class Key>
class CandidateCache {
public:
    CandidateCache(const CommunityGraph& g, const Rational& alpha, const Rational& beta, std::uint64_t min_size)
        : g_(g), alpha_(alpha), beta_(beta), min_size_(min_size) {}

    template <class MakeGroups>
    void offer(const Key& key, MakeGroups&& groups) {
        auto [it, fresh] = seen_.try_emplace(key, false);
        if (!fresh) return;
        const auto ids = groups();
        if (ids.empty()) return;
        auto s = SubsetSelection::whole_groups(g_, ids);
        if (s.size() < min_size_) return;
        const auto p = profile(g_, s);
        if (satisfies(p, alpha_, beta_)) found_.emplace(std::move(s), p);
    }

    const std::unordered_map<Key, bool>& seen() const noexcept { return seen_; }
    std::map<SubsetSelection, CommunityProfile>& found() noexcept { return found_; }

private:
    const CommunityGraph& g_;
    Rational alpha_, beta_;
    std::uint64_t min_size_;
    std::unordered_map<Key, bool> seen_;
    std::map<SubsetSelection, CommunityProfile> found_;
};

// Workers may meet the same candidate; count it once.
template <class Key>
std::uint64_t count_distinct(const std::vector<CandidateCache<Key>>& caches) {
    if (caches.size() == 1) return caches.front().seen().size();
    std::unordered_map<Key, bool> all;
    for (const auto& c : caches) all.insert(c.seen().begin(), c.seen().end());
    return all.size();
}

inline std::string bitset_key(const std::vector<std::int64_t>& scores, const Threshold& th) {
    std::string key((scores.size() + 7) / 8, '\0');
    for (std::size_t h = 0; h < scores.size(); ++h)
        if (th.passes(static_cast<std::uint64_t>(scores[h]))) key[h / 8] = static_cast<char>(key[h / 8] | (1 << (h % 8)));
    return key;
}

inline std::vector<GroupId> groups_passing(const std::vector<std::int64_t>& scores, const Threshold& th) {
    std::vector<GroupId> out;
    for (std::size_t h = 0; h < scores.size(); ++h)
        if (th.passes(static_cast<std::uint64_t>(scores[h]))) out.push_back(static_cast<GroupId>(h));
    return out;
}

// Walks all k-multisets whose first entry lies in [first_lo, first_hi).
template <class Key, class KeyFn>
void exhaustive_range(const CommunityGraph& g, const DetectorConfig& cfg, const Threshold& th, GroupId first_lo,
                      GroupId first_hi, CandidateCache<Key>& cache, std::uint64_t& tuples, KeyFn&& key_of) {
    TupleScorer sc(g, cfg.closed);
    const auto n = static_cast<GroupId>(g.group_count());
    auto rec = [&](auto&& self, GroupId from, GroupId to, std::uint32_t left) -> void {
        for (GroupId t = from; t < to; ++t) {
            sc.add(t);
            if (left == 1) {
                ++tuples;
                cache.offer(key_of(sc.scores()), [&] { return groups_passing(sc.scores(), th); });
            } else {
                self(self, t, n, left - 1);
            }
            sc.add(t, -1);
        }
    };
    rec(rec, first_lo, first_hi, cfg.k);
}

template <class Key, class KeyFn>
DetectionResult run_exhaustive(const CommunityGraph& g, const Rational& alpha, const Rational& beta,
                               const DetectorConfig& cfg, const Threshold& th, KeyFn key_of) {
    const auto n = static_cast<GroupId>(g.group_count());
    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, n));
    std::vector<CandidateCache<Key>> caches;
    for (unsigned w = 0; w < workers; ++w) caches.emplace_back(g, alpha, beta, cfg.min_size);
    std::vector<std::uint64_t> tuples(workers, 0);
    // First entries are dealt round-robin so the (front-heavy) work spreads.
    auto work = [&](unsigned w) {
        for (GroupId first = w; first < n; first += workers)
            exhaustive_range(g, cfg, th, first, first + 1, caches[w], tuples[w], key_of);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    DetectionResult res;
    std::map<SubsetSelection, CommunityProfile> merged;
    for (unsigned w = 0; w < workers; ++w) {
        res.tuples += tuples[w];
        for (auto& [s, p] : caches[w].found()) merged.emplace(s, p);
    }
    res.distinct_candidates = count_distinct(caches);
    for (auto& [s, p] : merged) res.communities.push_back({s, p});
    return res;
}

// Group chosen with probability proportional to multiplicity.
class WeightedGroups {
public:
    explicit WeightedGroups(const CommunityGraph& g) {
        std::uint64_t acc = 0;
        for (GroupId h = 0; h < g.group_count(); ++h) {
            acc += g.multiplicity(h);
            prefix_.push_back(acc);
        }
    }
    GroupId draw(Rng& rng) const {
        const auto x = rng.below(prefix_.back());
        return static_cast<GroupId>(std::upper_bound(prefix_.begin(), prefix_.end(), x) - prefix_.begin());
    }

private:
    std::vector<std::uint64_t> prefix_;
};

inline std::vector<GroupId> sample_tuple(const CommunityGraph& g, const WeightedGroups& all, TupleSampler sampler,
                                         std::uint32_t k, Rng& rng) {
    std::vector<GroupId> tuple;
    tuple.reserve(k);
    if (sampler == TupleSampler::uniform) {
        for (std::uint32_t i = 0; i < k; ++i) tuple.push_back(all.draw(rng));
        return tuple;
    }
    const GroupId anchor = all.draw(rng);
    tuple.push_back(anchor);
    // Closed neighborhood of the anchor copy: itself plus every copy of each neighbor group.
    auto nb = g.neighbors(anchor);
    std::vector<std::uint64_t> prefix{1};
    for (auto h : nb) prefix.push_back(prefix.back() + g.multiplicity(h));
    for (std::uint32_t i = 1; i < k; ++i) {
        const auto x = rng.below(prefix.back());
        const auto pos = static_cast<std::size_t>(std::upper_bound(prefix.begin(), prefix.end(), x) - prefix.begin());
        tuple.push_back(pos == 0 ? anchor : nb[pos - 1]);
    }
    return tuple;
}

} // namespace detail

/// Groups whose score against the tuple reaches θ·|tuple|.
inline SubsetSelection candidate_from_tuple(const CommunityGraph& graph, const std::vector<GroupId>& tuple,
                                            const Rational& theta, bool closed = true, bool strict = false) {
    if (tuple.empty()) throw ParameterError("candidate of an empty tuple");
    CommunityGraph storage;
    const CommunityGraph& g = detail::explicit_view(graph, storage, default_budget());
    detail::TupleScorer sc(g, closed);
    for (auto t : tuple) {
        if (t >= g.group_count()) throw ParameterError("tuple entry out of range");
        sc.add(t);
    }
    const detail::Threshold th(theta, tuple.size(), strict);
    return SubsetSelection::whole_groups(g, detail::groups_passing(sc.scores(), th));
}

inline DetectionResult detect(const CommunityGraph& graph, const Rational& alpha, const Rational& beta,
                              const DetectorConfig& cfg) {
    if (cfg.k == 0) throw ParameterError("tuple size must be at least 1");
    CommunityGraph storage;
    const CommunityGraph& g = detail::explicit_view(graph, storage, cfg.budget);
    if (g.group_count() == 0) return {};
    const Rational theta = detail::resolve_theta(cfg, alpha, beta);
    const detail::Threshold th(theta, cfg.k, cfg.strict);
    const std::size_t n = g.group_count();

    if (cfg.mode == DetectorMode::exhaustive) {
        const double space = multiset_count(n, cfg.k);
        if (space > cfg.budget)
            throw BudgetExceeded("exhaustive tuple enumeration (use sampled mode)", space, cfg.budget);
        if (n <= 64) {
            return detail::run_exhaustive<std::uint64_t>(g, alpha, beta, cfg, th, [&th](const std::vector<std::int64_t>& s) {
                std::uint64_t mask = 0;
                for (std::size_t h = 0; h < s.size(); ++h)
                    if (th.passes(static_cast<std::uint64_t>(s[h]))) mask |= std::uint64_t{1} << h;
                return mask;
            });
        }
        return detail::run_exhaustive<std::string>(
            g, alpha, beta, cfg, th, [&th](const std::vector<std::int64_t>& s) { return detail::bitset_key(s, th); });
    }

    // Sampled: trial i draws from derive_seed(stage seed, i), so the tuple
    // sequence does not depend on the worker split.
    const std::uint64_t stage = derive_seed(cfg.seed, "detect-sampled");
    const detail::WeightedGroups all(g);
    const unsigned workers = std::max(1u, cfg.threads);
    std::vector<detail::CandidateCache<std::string>> caches;
    for (unsigned w = 0; w < workers; ++w) caches.emplace_back(g, alpha, beta, cfg.min_size);
    auto work = [&](unsigned w) {
        for (std::uint64_t i = w; i < cfg.trials; i += workers) {
            Rng rng(derive_seed(stage, i));
            const auto tuple = detail::sample_tuple(g, all, cfg.sampler, cfg.k, rng);
            detail::TupleScorer sc(g, cfg.closed);
            for (auto t : tuple) sc.add(t);
            caches[w].offer(detail::bitset_key(sc.scores(), th), [&] { return detail::groups_passing(sc.scores(), th); });
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    DetectionResult res;
    res.tuples = cfg.trials;
    std::map<SubsetSelection, CommunityProfile> merged;
    for (auto& c : caches)
        for (auto& [s, p] : c.found()) merged.emplace(s, p);
    res.distinct_candidates = detail::count_distinct(caches);
    for (auto& [s, p] : merged) res.communities.push_back({s, p});
    return res;
}

/// Every verified candidate over all k-multisets.
inline std::vector<SubsetSelection> enumerate_all_via_detector(const CommunityGraph& g, const Rational& alpha,
                                                               const Rational& beta, std::uint32_t k,
                                                               std::uint64_t min_size = 1,
                                                               double budget = default_budget()) {
    DetectorConfig cfg;
    cfg.k = k;
    cfg.mode = DetectorMode::exhaustive;
    cfg.min_size = min_size;
    cfg.budget = budget;
    std::vector<SubsetSelection> out;
    for (auto& c : detect(g, alpha, beta, cfg).communities) out.push_back(std::move(c.selection));
    return out;
}

} // namespace communitylab
