#pragma once

// Balanced partition of A against a fixed partition T_1..T_k of B: every block
// S_i has size within ρ/2 of ρ and every pair (S_i, T_j) carries within half
// of d_A·ρ²/n_B constraints. Blocks are drawn uniformly at random and the
// result is certified by verify_partition; failed draws are retried with
// derived seeds.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "communitylab/error.hpp"
#include "communitylab/label_cover.hpp"
#include "communitylab/rational.hpp"
#include "communitylab/rng.hpp"

namespace communitylab {

using Blocks = std::vector<std::vector<std::uint32_t>>;

struct Partition {
    Blocks blocks;
    std::uint32_t rho = 0;
    std::uint64_t seed = 0; ///< seed of the draw that produced the blocks
};

struct PartitionReport {
    std::uint32_t rho = 0;
    std::vector<std::size_t> block_sizes;
    std::vector<std::vector<std::uint64_t>> pair_counts; ///< [i][j] = |(S_i x T_j) ∩ E|
    Rational target;                                     ///< d_A ρ² / n_B
    std::size_t size_violations = 0;
    std::size_t mass_violations = 0;
    bool pass = false;
    std::vector<std::string> notes;

    std::size_t violations() const noexcept { return size_violations + mass_violations; }

    bool size_ok(std::size_t i) const noexcept {
        const auto s = static_cast<std::int64_t>(block_sizes[i]);
        return 2 * std::llabs(s - rho) < rho;
    }
    bool mass_ok(std::size_t i, std::size_t j) const noexcept {
        const Rational dev = Rational(static_cast<std::int64_t>(pair_counts[i][j])) - target;
        const Rational half = target * Rational(1, 2);
        return (dev < Rational(0) ? -dev : dev) < half;
    }
};

class PartitionFailed : public Error {
public:
    PartitionFailed(const std::string& what, PartitionReport best) : Error(what), best_(std::move(best)) {}
    const PartitionReport& best_report() const noexcept { return best_; }

private:
    PartitionReport best_;
};

/// Consecutive blocks of size rho (the last one may be shorter).
inline Blocks contiguous_blocks(std::uint32_t n, std::uint32_t rho) {
    if (rho == 0) throw ParameterError("block size must be positive");
    Blocks out;
    for (std::uint32_t start = 0; start < n; start += rho) {
        std::vector<std::uint32_t> block;
        for (std::uint32_t v = start; v < std::min(n, start + rho); ++v) block.push_back(v);
        out.push_back(std::move(block));
    }
    return out;
}

inline PartitionReport verify_partition(const LabelCoverInstance& inst, const Blocks& partition, const Blocks& t_blocks,
                                        std::uint32_t rho) {
    if (rho == 0) throw ParameterError("ρ must be positive");
    const auto d_A = inst.regular_degree_A();
    if (!d_A) throw ParameterError("partition verification needs every A vertex to have the same degree");

    std::vector<std::int64_t> block_of(inst.n_A, -1);
    for (std::size_t i = 0; i < partition.size(); ++i)
        for (auto a : partition[i]) {
            if (a >= inst.n_A) throw ParameterError("partition names an A vertex out of range");
            if (block_of[a] >= 0) throw ParameterError("partition blocks are not disjoint");
            block_of[a] = static_cast<std::int64_t>(i);
        }
    for (std::uint32_t a = 0; a < inst.n_A; ++a)
        if (block_of[a] < 0) throw ParameterError("partition does not cover A");
    std::vector<std::int64_t> t_of(inst.n_B, -1);
    for (std::size_t j = 0; j < t_blocks.size(); ++j)
        for (auto b : t_blocks[j]) {
            if (b >= inst.n_B || t_of[b] >= 0) throw ParameterError("T is not a partition of B");
            t_of[b] = static_cast<std::int64_t>(j);
        }

    PartitionReport r;
    r.rho = rho;
    r.target = inst.n_B == 0 ? Rational(0)
                             : Rational(static_cast<std::int64_t>(*d_A) * rho * rho, static_cast<std::int64_t>(inst.n_B));
    for (const auto& block : partition) r.block_sizes.push_back(block.size());
    r.pair_counts.assign(partition.size(), std::vector<std::uint64_t>(t_blocks.size(), 0));
    for (const auto& e : inst.edges)
        if (t_of[e.b] >= 0) ++r.pair_counts[block_of[e.a]][t_of[e.b]];

    for (std::size_t i = 0; i < partition.size(); ++i) {
        if (!r.size_ok(i)) ++r.size_violations;
        for (std::size_t j = 0; j < t_blocks.size(); ++j)
            if (!r.mass_ok(i, j)) ++r.mass_violations;
    }
    if (r.target == Rational(0))
        r.notes.push_back("constraint target d_A·ρ²/n_B is 0; the strict mass condition cannot hold");
    if (r.size_violations) r.notes.push_back(std::to_string(r.size_violations) + " block(s) violate the size condition");
    if (r.mass_violations)
        r.notes.push_back(std::to_string(r.mass_violations) + " block pair(s) violate the constraint-mass condition");
    r.pass = r.violations() == 0 && r.target != Rational(0);
    return r;
}

/// Assign each A vertex to one of ceil(n_A/ρ) blocks uniformly at random until
/// the certificate passes. Attempt r draws from derive_seed(seed, r).
inline std::pair<Partition, PartitionReport> random_partition(const LabelCoverInstance& inst, const Blocks& t_blocks,
                                                              std::uint32_t rho, std::uint64_t seed,
                                                              std::uint32_t max_retries) {
    if (rho == 0) throw ParameterError("ρ must be positive");
    if (inst.n_A < rho) throw ParameterError("n_A/ρ must be at least 1");
    const std::uint32_t k = (inst.n_A + rho - 1) / rho;

    PartitionReport best;
    bool have_best = false;
    for (std::uint32_t attempt = 0; attempt < std::max<std::uint32_t>(max_retries, 1); ++attempt) {
        const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(attempt));
        Rng rng(s);
        Partition part;
        part.rho = rho;
        part.seed = s;
        part.blocks.assign(k, {});
        for (std::uint32_t a = 0; a < inst.n_A; ++a) part.blocks[rng.below(k)].push_back(a);
        PartitionReport report = verify_partition(inst, part.blocks, t_blocks, rho);
        if (report.pass) return {std::move(part), std::move(report)};
        if (!have_best || report.violations() < best.violations()) {
            best = std::move(report);
            have_best = true;
        }
    }
    throw PartitionFailed("no balanced partition found in " + std::to_string(max_retries) + " attempt(s)", best);
}

} // namespace communitylab
