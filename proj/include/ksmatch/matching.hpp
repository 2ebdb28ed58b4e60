#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ksmatch/model.hpp"
#include "ksmatch/rng.hpp"

// Karp-Sipser two-phase greedy matching, an exact maximum-matching oracle
// (layered augmenting paths), a brute-force oracle for small instances, and
// matching verification. The greedy routines mutate the graph they are
// given; callers keep their own copy when the original is still needed.

namespace ksmatch {

struct Matching {
    std::vector<std::pair<std::int32_t, std::int32_t>> pairs; // (left, right)
    std::int64_t size() const { return static_cast<std::int64_t>(pairs.size()); }
};

struct KSResult {
    Matching matching;
    std::int64_t tau1 = 0;        // edges matched before the first random-edge step
    std::int64_t phase2_size = 0; // everything after, degree-1 re-entries included
    std::vector<std::pair<std::int64_t, DegreeState>> trace; // Phase-1 checkpoints
    std::int64_t core_left = 0;  // |L1| at Phase-1 end
    std::int64_t core_right = 0; // |R1| at Phase-1 end, isolated rights excluded
};

std::int64_t default_checkpoint_every(std::int64_t n);

/// Phase 1 only: while any vertex has degree exactly one, match a uniformly
/// random such vertex's unique edge and remove both endpoints. Leaves g as
/// the core graph (min degree >= 2 over non-isolated vertices).
KSResult karp_sipser_phase1(BipartiteGraph& g, Rng& rng,
                            std::int64_t checkpoint_every = 0);

/// Full algorithm: Phase 1, then uniformly random remaining edges whenever
/// no degree-one vertex exists, re-entering degree-one processing as it
/// arises. Runs until no edges remain.
KSResult karp_sipser(BipartiteGraph& g, Rng& rng,
                     std::int64_t checkpoint_every = 0);

/// Continues a Phase-1-finished graph through Phase 2; returns the edges
/// matched and appends them to result.
std::int64_t karp_sipser_phase2(BipartiteGraph& g, Rng& rng, KSResult& result);

/// Maximum-cardinality matching by layered BFS + augmenting DFS
/// (Hopcroft-Karp). Deterministic given the graph. Does not mutate.
Matching max_matching(const BipartiteGraph& g);

/// Exact maximum matching size by bitmask DP over right subsets.
/// Guarded to n <= 12 and m <= 12.
std::int64_t brute_force_matching(const BipartiteGraph& g);

/// True iff every pair is a live edge of g and no endpoint repeats.
bool verify_matching(const BipartiteGraph& g, const Matching& matching);

/// Cycle detection over the live edges, parallel edges counted as cycles.
bool is_forest(const BipartiteGraph& g);

} // namespace ksmatch
