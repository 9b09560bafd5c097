#pragma once

// Label Cover instances, labelings and their valuation, the counting-preserving
// reduction from 3SAT, and backtracking satisfiability/counting oracles.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "communitylab/budget.hpp"
#include "communitylab/error.hpp"
#include "communitylab/rational.hpp"

namespace communitylab {

using Label = std::uint32_t;

/// 3-CNF formula. Literals are signed, 1-based variable indices.
struct Cnf3 {
    std::uint32_t num_vars = 0;
    std::vector<std::array<int, 3>> clauses;

    void validate() const {
        for (std::size_t c = 0; c < clauses.size(); ++c)
            for (int lit : clauses[c])
                if (lit == 0 || static_cast<std::uint32_t>(std::abs(lit)) > num_vars)
                    throw ParameterError("clause " + std::to_string(c) + " has literal " + std::to_string(lit) +
                                         " outside [1, " + std::to_string(num_vars) + "]");
    }

    bool satisfied_by(const std::vector<bool>& assignment) const {
        for (const auto& clause : clauses) {
            bool ok = false;
            for (int lit : clause) ok = ok || (assignment[std::abs(lit) - 1] == (lit > 0));
            if (!ok) return false;
        }
        return true;
    }
};

struct LcEdge {
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::vector<Label> projection; ///< projection[σ_A] = required σ_B
};

struct LabelCoverInstance {
    std::uint32_t n_A = 0;
    std::uint32_t n_B = 0;
    std::uint32_t sigma_A = 1;
    std::uint32_t sigma_B = 1;
    std::vector<LcEdge> edges;

    void validate() const {
        if (sigma_A == 0 || sigma_B == 0) throw ParameterError("label cover alphabets must be nonempty");
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const auto& e = edges[i];
            if (e.a >= n_A || e.b >= n_B)
                throw ParameterError("label cover edge " + std::to_string(i) + " has an endpoint out of range");
            if (e.projection.size() != sigma_A)
                throw ParameterError("label cover edge " + std::to_string(i) + " projection is not total on Σ_A");
            for (Label l : e.projection)
                if (l >= sigma_B)
                    throw ParameterError("label cover edge " + std::to_string(i) + " projects outside Σ_B");
        }
    }

    std::vector<std::uint32_t> degrees_A() const {
        std::vector<std::uint32_t> d(n_A, 0);
        for (const auto& e : edges) ++d[e.a];
        return d;
    }
    std::vector<std::uint32_t> degrees_B() const {
        std::vector<std::uint32_t> d(n_B, 0);
        for (const auto& e : edges) ++d[e.b];
        return d;
    }

    /// Common A-degree if every A vertex has the same degree.
    std::optional<std::uint32_t> regular_degree_A() const {
        auto d = degrees_A();
        if (d.empty()) return std::nullopt;
        for (auto x : d)
            if (x != d.front()) return std::nullopt;
        return d.front();
    }

    /// (d_A, d_B) when the instance is bi-regular.
    std::optional<std::pair<std::uint32_t, std::uint32_t>> biregular_degrees() const {
        auto da = regular_degree_A();
        auto db = degrees_B();
        if (!da || db.empty()) return std::nullopt;
        for (auto x : db)
            if (x != db.front()) return std::nullopt;
        return std::make_pair(*da, db.front());
    }
};

/// Per-vertex labels; each slot may be unassigned, a valid label, or flagged
/// invalid (a decoded value that names no label).
class Labeling {
public:
    enum class State : std::uint8_t { unassigned, assigned, invalid };
    struct Slot {
        State state = State::unassigned;
        Label value = 0;
        friend bool operator==(const Slot&, const Slot&) = default;
    };

    Labeling() = default;
    Labeling(std::uint32_t n_A, std::uint32_t n_B) : a_(n_A), b_(n_B) {}

    static Labeling total(const std::vector<Label>& a, const std::vector<Label>& b) {
        Labeling l(static_cast<std::uint32_t>(a.size()), static_cast<std::uint32_t>(b.size()));
        for (std::size_t i = 0; i < a.size(); ++i) l.assign_a(static_cast<std::uint32_t>(i), a[i]);
        for (std::size_t i = 0; i < b.size(); ++i) l.assign_b(static_cast<std::uint32_t>(i), b[i]);
        return l;
    }

    std::uint32_t n_A() const noexcept { return static_cast<std::uint32_t>(a_.size()); }
    std::uint32_t n_B() const noexcept { return static_cast<std::uint32_t>(b_.size()); }

    void assign_a(std::uint32_t i, Label v) { a_.at(i) = Slot{State::assigned, v}; }
    void assign_b(std::uint32_t i, Label v) { b_.at(i) = Slot{State::assigned, v}; }
    void mark_invalid_a(std::uint32_t i) { a_.at(i) = Slot{State::invalid, 0}; }
    void mark_invalid_b(std::uint32_t i) { b_.at(i) = Slot{State::invalid, 0}; }

    const Slot& a(std::uint32_t i) const { return a_.at(i); }
    const Slot& b(std::uint32_t i) const { return b_.at(i); }

    bool is_total() const noexcept {
        for (const auto& s : a_)
            if (s.state != State::assigned) return false;
        for (const auto& s : b_)
            if (s.state != State::assigned) return false;
        return true;
    }

    bool empty() const noexcept {
        for (const auto& s : a_)
            if (s.state != State::unassigned) return false;
        for (const auto& s : b_)
            if (s.state != State::unassigned) return false;
        return true;
    }

    std::vector<Label> values_A() const {
        std::vector<Label> v;
        for (const auto& s : a_) v.push_back(s.value);
        return v;
    }
    std::vector<Label> values_B() const {
        std::vector<Label> v;
        for (const auto& s : b_) v.push_back(s.value);
        return v;
    }

    friend bool operator==(const Labeling&, const Labeling&) = default;

private:
    std::vector<Slot> a_;
    std::vector<Slot> b_;
};

struct EdgeTally {
    std::size_t satisfied = 0;
    std::size_t violated = 0;
    std::size_t undetermined = 0;
    friend bool operator==(const EdgeTally&, const EdgeTally&) = default;
};

/// Classify every constraint under a possibly partial labeling. An edge with an
/// invalid endpoint is violated; otherwise it is undetermined when an endpoint
/// is unassigned.
inline EdgeTally lc_partial_violations(const LabelCoverInstance& inst, const Labeling& lab) {
    using S = Labeling::State;
    EdgeTally t;
    for (const auto& e : inst.edges) {
        const auto& sa = lab.a(e.a);
        const auto& sb = lab.b(e.b);
        if (sa.state == S::invalid || sb.state == S::invalid) {
            ++t.violated;
        } else if (sa.state == S::unassigned || sb.state == S::unassigned) {
            ++t.undetermined;
        } else if (sa.value < e.projection.size() && e.projection[sa.value] == sb.value) {
            ++t.satisfied;
        } else {
            ++t.violated;
        }
    }
    return t;
}

/// True when no constraint is violated by the union of two partial labelings
/// that agree wherever both are assigned (x takes precedence otherwise).
inline bool union_violation_free(const LabelCoverInstance& inst, const Labeling& x, const Labeling& y) {
    using S = Labeling::State;
    for (const auto& e : inst.edges) {
        const auto& sa = x.a(e.a).state != S::unassigned ? x.a(e.a) : y.a(e.a);
        const auto& sb = x.b(e.b).state != S::unassigned ? x.b(e.b) : y.b(e.b);
        if (sa.state == S::invalid || sb.state == S::invalid) return false;
        if (sa.state == S::unassigned || sb.state == S::unassigned) continue;
        if (sa.value >= e.projection.size() || e.projection[sa.value] != sb.value) return false;
    }
    return true;
}

/// Fraction of satisfied constraints under a total labeling (1 for an instance without edges).
inline Rational lc_value(const LabelCoverInstance& inst, const Labeling& lab) {
    if (!lab.is_total()) throw ParameterError("lc_value needs a total labeling; use lc_partial_violations");
    if (lab.n_A() != inst.n_A || lab.n_B() != inst.n_B) throw ParameterError("labeling size mismatch");
    for (std::uint32_t i = 0; i < inst.n_A; ++i)
        if (lab.a(i).value >= inst.sigma_A) throw ParameterError("A label outside Σ_A");
    for (std::uint32_t i = 0; i < inst.n_B; ++i)
        if (lab.b(i).value >= inst.sigma_B) throw ParameterError("B label outside Σ_B");
    if (inst.edges.empty()) return Rational(1);
    const auto t = lc_partial_violations(inst, lab);
    return Rational(static_cast<std::int64_t>(t.satisfied), static_cast<std::int64_t>(inst.edges.size()));
}

// 3SAT reduction. A holds one vertex per clause with Σ_A the seven satisfying
// local assignments; B holds one vertex per variable with Σ_B = {0,1}. Clause
// label k encodes the literal truth bits k+1 (bit j = literal j true). One
// edge per literal occurrence projects the clause label to the variable value
// that makes literal j take the encoded truth value.
inline constexpr std::uint32_t kClauseLabels = 7;

inline bool clause_literal_true(Label clause_label, int position) {
    return (((clause_label + 1) >> position) & 1u) != 0;
}

inline LabelCoverInstance reduce_3sat(const Cnf3& f) {
    f.validate();
    LabelCoverInstance inst;
    inst.n_A = static_cast<std::uint32_t>(f.clauses.size());
    inst.n_B = f.num_vars;
    inst.sigma_A = kClauseLabels;
    inst.sigma_B = 2;
    for (std::uint32_t c = 0; c < f.clauses.size(); ++c) {
        for (int j = 0; j < 3; ++j) {
            const int lit = f.clauses[c][j];
            LcEdge e;
            e.a = c;
            e.b = static_cast<std::uint32_t>(std::abs(lit) - 1);
            e.projection.resize(kClauseLabels);
            for (Label k = 0; k < kClauseLabels; ++k) {
                const bool truth = clause_literal_true(k, j);
                e.projection[k] = (lit > 0) == truth ? 1u : 0u;
            }
            inst.edges.push_back(std::move(e));
        }
    }
    return inst;
}

/// Labeling of reduce_3sat(f) induced by a variable assignment. Clauses the
/// assignment falsifies have no valid label and are left unassigned.
inline Labeling labeling_from_assignment(const Cnf3& f, const std::vector<bool>& assignment) {
    Labeling lab(static_cast<std::uint32_t>(f.clauses.size()), f.num_vars);
    for (std::uint32_t v = 0; v < f.num_vars; ++v) lab.assign_b(v, assignment.at(v) ? 1 : 0);
    for (std::uint32_t c = 0; c < f.clauses.size(); ++c) {
        std::uint32_t bits = 0;
        for (int j = 0; j < 3; ++j) {
            const int lit = f.clauses[c][j];
            if (assignment[std::abs(lit) - 1] == (lit > 0)) bits |= 1u << j;
        }
        if (bits != 0) lab.assign_a(c, bits - 1);
    }
    return lab;
}

inline std::vector<bool> assignment_from_labeling(const Cnf3& f, const Labeling& lab) {
    std::vector<bool> out(f.num_vars);
    for (std::uint32_t v = 0; v < f.num_vars; ++v) out[v] = lab.b(v).value == 1;
    return out;
}

namespace detail {

// Backtracking over A; every B vertex with edges is forced by its first
// assigned neighbor, and B vertices without edges are free.
class LabelingSearch {
public:
    LabelingSearch(const LabelCoverInstance& inst, double budget) : inst_(inst), by_a_(inst.n_A) {
        inst.validate();
        const double space = std::pow(static_cast<double>(inst.sigma_A), inst.n_A) *
                             std::pow(static_cast<double>(inst.sigma_B), inst.n_B);
        require_within_budget("label cover brute force", space, budget);
        for (std::size_t i = 0; i < inst.edges.size(); ++i) by_a_[inst.edges[i].a].push_back(i);
        forced_.assign(inst.n_B, -1);
        label_a_.assign(inst.n_A, 0);
    }

    template <class OnComplete>
    void run(OnComplete&& on_complete) {
        recurse(0, on_complete);
    }

    const std::vector<Label>& labels_A() const { return label_a_; }
    const std::vector<std::int64_t>& forced_B() const { return forced_; }

private:
    template <class OnComplete>
    void recurse(std::uint32_t a, OnComplete& on_complete) {
        if (a == inst_.n_A) {
            on_complete();
            return;
        }
        for (Label l = 0; l < inst_.sigma_A; ++l) {
            std::vector<std::uint32_t> newly_forced;
            bool ok = true;
            for (std::size_t ei : by_a_[a]) {
                const auto& e = inst_.edges[ei];
                const Label want = e.projection[l];
                if (forced_[e.b] < 0) {
                    forced_[e.b] = want;
                    newly_forced.push_back(e.b);
                } else if (forced_[e.b] != static_cast<std::int64_t>(want)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                label_a_[a] = l;
                recurse(a + 1, on_complete);
            }
            for (auto b : newly_forced) forced_[b] = -1;
        }
    }

    const LabelCoverInstance& inst_;
    std::vector<std::vector<std::size_t>> by_a_;
    std::vector<std::int64_t> forced_;
    std::vector<Label> label_a_;
};

} // namespace detail

/// Number of labelings satisfying every constraint.
inline std::uint64_t count_labelings_bruteforce(const LabelCoverInstance& inst, double budget = default_budget()) {
    detail::LabelingSearch search(inst, budget);
    std::uint64_t total = 0;
    search.run([&] {
        std::uint64_t ways = 1;
        for (auto f : search.forced_B())
            if (f < 0) ways *= inst.sigma_B;
        total += ways;
    });
    return total;
}

/// Calls `sink` with every satisfying labeling, A labels in lexicographic order
/// and free B labels enumerated beneath them.
inline void enumerate_satisfying(const LabelCoverInstance& inst, const std::function<void(const Labeling&)>& sink,
                                 double budget = default_budget()) {
    detail::LabelingSearch search(inst, budget);
    search.run([&] {
        const auto& forced = search.forced_B();
        std::vector<std::uint32_t> free;
        for (std::uint32_t b = 0; b < inst.n_B; ++b)
            if (forced[b] < 0) free.push_back(b);
        std::vector<Label> b_labels(inst.n_B);
        for (std::uint32_t b = 0; b < inst.n_B; ++b) b_labels[b] = forced[b] < 0 ? 0 : static_cast<Label>(forced[b]);
        while (true) {
            sink(Labeling::total(search.labels_A(), b_labels));
            std::size_t k = 0;
            while (k < free.size() && ++b_labels[free[k]] == inst.sigma_B) b_labels[free[k++]] = 0;
            if (k == free.size()) break;
        }
    });
}

inline std::vector<Labeling> enumerate_satisfying(const LabelCoverInstance& inst, double budget = default_budget()) {
    std::vector<Labeling> out;
    enumerate_satisfying(inst, [&](const Labeling& l) { out.push_back(l); }, budget);
    return out;
}

} // namespace communitylab
