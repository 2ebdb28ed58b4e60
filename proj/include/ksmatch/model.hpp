#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ksmatch/rng.hpp"

// Random bipartite allocation multigraph: n left vertices each holding a
// block of d right-vertex choices (with replacement), plus the post-peeling
// core sampler built on the configuration model with truncated-Poisson
// right degrees.

namespace ksmatch {

struct ModelParams {
    std::int64_t n = 0;      // left vertices
    std::int64_t m = 0;      // right vertices
    int d = 0;               // choices per left vertex, >= 2
    std::uint64_t seed = 0;  // master seed

    double alpha() const { return static_cast<double>(n) / static_cast<double>(m); }
    void validate() const; // throws std::invalid_argument
};

struct DegreeState {
    std::int64_t w = 0;  // live left vertices
    std::int64_t v1 = 0; // right vertices of degree exactly 1
    std::int64_t v = 0;  // right vertices of degree >= 2

    bool operator==(const DegreeState&) const = default;
};

// Mutable multigraph in block form. Each left vertex owns d slots holding
// right ids; a slot of -1 is a deleted edge and a dead block stands for a
// left vertex removed from the graph. Degrees count multiplicity. The
// (w, v1, v) summary and the live edge count are maintained incrementally.
class BipartiteGraph {
public:
    BipartiteGraph(std::int64_t n, std::int64_t m, int d);

    std::int64_t n() const { return n_; }
    std::int64_t m() const { return m_; }
    int d() const { return d_; }

    bool left_alive(std::int64_t j) const { return left_alive_[j] != 0; }
    int left_degree(std::int64_t j) const { return left_degree_[j]; }
    std::int64_t right_degree(std::int64_t r) const { return right_degree_[r]; }
    std::int32_t slot(std::int64_t s) const { return slots_[s]; }

    std::int64_t live_left_count() const { return live_left_; }
    std::int64_t live_edge_count() const { return live_edges_; }
    DegreeState degree_state() const { return {live_left_, v1_, v_}; }

    // Removes a left vertex: all its remaining edges die and the block is
    // marked dead.
    void delete_left(std::int64_t j);

    // Removes every remaining occurrence of right vertex r. Does not touch
    // block liveness.
    void delete_right(std::int64_t r);

    // Occurrence list of r (slot indices); entries whose slot no longer
    // holds r are stale and must be skipped.
    const std::int32_t* occurrences(std::int64_t r) const;
    std::int64_t occurrence_count(std::int64_t r) const;

    // Blocks that still carry at least one live edge, in unspecified order.
    const std::vector<std::int32_t>& blocks_with_edges() const { return live_blocks_; }

    // Text dump, one line per left vertex in id order.
    std::string dump() const;

    bool operator==(const BipartiteGraph& other) const;

    // Called by samplers after filling slots_ directly.
    void rebuild_indices();
    std::vector<std::int32_t>& raw_slots() { return slots_; }

private:
    void kill_slot(std::int64_t s);
    void bump_right(std::int64_t r, int delta);

    std::int64_t n_ = 0;
    std::int64_t m_ = 0;
    int d_ = 0;
    std::vector<std::int32_t> slots_;       // n*d entries, -1 = deleted
    std::vector<std::uint8_t> left_alive_;  // block liveness (the sigma marker)
    std::vector<std::int32_t> left_degree_; // live slots per block
    std::vector<std::int64_t> right_degree_;
    std::vector<std::int64_t> occ_offset_;  // CSR occurrence index, per right id
    std::vector<std::int32_t> occ_data_;
    std::vector<std::int32_t> live_blocks_; // swap-remove set
    std::vector<std::int32_t> live_block_pos_;
    std::int64_t live_left_ = 0;
    std::int64_t live_edges_ = 0;
    std::int64_t v1_ = 0;
    std::int64_t v_ = 0;
};

/// Fresh allocation graph: every left block holds d independent uniform
/// draws from [0, m).
BipartiteGraph sample_graph(const ModelParams& params, Rng& rng);

/// m degrees, all >= 2, summing exactly to `total`, marginally truncated
/// Poisson at the parameter solving the mean-degree equation. Throws when
/// total < 2m.
std::vector<std::int64_t> sample_core_degrees(std::int64_t m, std::int64_t total,
                                              Rng& rng);

/// Post-peeling core graph: left degrees all d, right degrees >= 2, edges by
/// uniform pairing of configuration points. Requires d*n >= 2m.
BipartiteGraph sample_core_graph(std::int64_t n, std::int64_t m, int d, Rng& rng);

/// Recomputed-from-scratch (w, v1, v); the oracle counterpart of the
/// incrementally maintained BipartiteGraph::degree_state().
DegreeState recompute_degree_state(const BipartiteGraph& g);

} // namespace ksmatch
