#include "ksmatch/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ksmatch/analysis.hpp"

namespace ksmatch {

void ModelParams::validate() const {
    if (n < 0) throw std::invalid_argument("n must be nonnegative");
    if (m < 1) throw std::invalid_argument("m must be positive");
    if (d < 2) throw std::invalid_argument("d must be at least 2");
}

BipartiteGraph::BipartiteGraph(std::int64_t n, std::int64_t m, int d)
    : n_(n), m_(m), d_(d) {
    if (n < 0 || m < 1 || d < 2) throw std::invalid_argument("bad graph shape");
    slots_.assign(static_cast<std::size_t>(n) * d, -1);
    left_alive_.assign(n, 1);
    left_degree_.assign(n, 0);
    right_degree_.assign(m, 0);
    occ_offset_.assign(m + 1, 0);
    live_block_pos_.assign(n, -1);
    live_left_ = n;
}

void BipartiteGraph::rebuild_indices() {
    const std::int64_t total = n_ * d_;
    left_alive_.assign(n_, 1);
    live_left_ = n_;
    left_degree_.assign(n_, 0);
    right_degree_.assign(m_, 0);
    live_edges_ = 0;
    for (std::int64_t s = 0; s < total; ++s) {
        const std::int32_t r = slots_[s];
        if (r < 0) continue;
        ++left_degree_[s / d_];
        ++right_degree_[r];
        ++live_edges_;
    }
    v1_ = v_ = 0;
    for (std::int64_t r = 0; r < m_; ++r) {
        if (right_degree_[r] == 1) ++v1_;
        else if (right_degree_[r] >= 2) ++v_;
    }
    // Counting-sort slots into per-right occurrence lists.
    occ_offset_.assign(m_ + 1, 0);
    for (std::int64_t s = 0; s < total; ++s) {
        if (slots_[s] >= 0) ++occ_offset_[slots_[s] + 1];
    }
    std::partial_sum(occ_offset_.begin(), occ_offset_.end(), occ_offset_.begin());
    occ_data_.assign(live_edges_, 0);
    std::vector<std::int64_t> cursor(occ_offset_.begin(), occ_offset_.end() - 1);
    for (std::int64_t s = 0; s < total; ++s) {
        if (slots_[s] >= 0) occ_data_[cursor[slots_[s]]++] = static_cast<std::int32_t>(s);
    }
    live_blocks_.clear();
    live_block_pos_.assign(n_, -1);
    for (std::int64_t j = 0; j < n_; ++j) {
        if (left_degree_[j] > 0) {
            live_block_pos_[j] = static_cast<std::int32_t>(live_blocks_.size());
            live_blocks_.push_back(static_cast<std::int32_t>(j));
        }
    }
}

void BipartiteGraph::bump_right(std::int64_t r, int delta) {
    const std::int64_t before = right_degree_[r];
    const std::int64_t after = before + delta;
    right_degree_[r] = after;
    if (before == 1) --v1_;
    else if (before >= 2) --v_;
    if (after == 1) ++v1_;
    else if (after >= 2) ++v_;
}

void BipartiteGraph::kill_slot(std::int64_t s) {
    const std::int32_t r = slots_[s];
    slots_[s] = -1;
    bump_right(r, -1);
    --live_edges_;
    const std::int64_t j = s / d_;
    if (--left_degree_[j] == 0) {
        // swap-remove from the blocks-with-edges set
        const std::int32_t pos = live_block_pos_[j];
        const std::int32_t last = live_blocks_.back();
        live_blocks_[pos] = last;
        live_block_pos_[last] = pos;
        live_blocks_.pop_back();
        live_block_pos_[j] = -1;
    }
}

void BipartiteGraph::delete_left(std::int64_t j) {
    if (!left_alive_[j]) throw std::logic_error("left vertex already deleted");
    for (std::int64_t s = j * d_; s < (j + 1) * d_; ++s) {
        if (slots_[s] >= 0) kill_slot(s);
    }
    left_alive_[j] = 0;
    --live_left_;
}

void BipartiteGraph::delete_right(std::int64_t r) {
    const std::int64_t lo = occ_offset_[r];
    const std::int64_t hi = occ_offset_[r + 1];
    for (std::int64_t i = lo; i < hi; ++i) {
        const std::int32_t s = occ_data_[i];
        if (slots_[s] == r) kill_slot(s); // stale entries skipped
    }
}

const std::int32_t* BipartiteGraph::occurrences(std::int64_t r) const {
    return occ_data_.data() + occ_offset_[r];
}

std::int64_t BipartiteGraph::occurrence_count(std::int64_t r) const {
    return occ_offset_[r + 1] - occ_offset_[r];
}

std::string BipartiteGraph::dump() const {
    std::ostringstream out;
    for (std::int64_t j = 0; j < n_; ++j) {
        out << j << ':';
        if (!left_alive_[j]) {
            out << " deleted";
        } else {
            for (std::int64_t s = j * d_; s < (j + 1) * d_; ++s) {
                if (slots_[s] >= 0) out << ' ' << slots_[s];
                else out << " *";
            }
        }
        out << '\n';
    }
    return out.str();
}

bool BipartiteGraph::operator==(const BipartiteGraph& other) const {
    return n_ == other.n_ && m_ == other.m_ && d_ == other.d_ &&
           slots_ == other.slots_ && left_alive_ == other.left_alive_;
}

BipartiteGraph sample_graph(const ModelParams& params, Rng& rng) {
    params.validate();
    BipartiteGraph g(params.n, params.m, params.d);
    auto& slots = g.raw_slots();
    for (auto& s : slots) {
        s = static_cast<std::int32_t>(uniform_index(rng, params.m));
    }
    g.rebuild_indices();
    return g;
}

namespace {

// Poisson conditioned to be >= 2, by sequential inversion from k = 2.
std::int64_t draw_truncated_poisson(double z, double fz, Rng& rng) {
    const double u = uniform01(rng);
    double p = z * z / (2.0 * fz);
    double acc = p;
    std::int64_t k = 2;
    while (u > acc) {
        ++k;
        p *= z / static_cast<double>(k);
        acc += p;
        if (p < 1e-18 && k > z) break; // tail exhausted by rounding
    }
    return k;
}

} // namespace

std::vector<std::int64_t> sample_core_degrees(std::int64_t m, std::int64_t total,
                                              Rng& rng) {
    if (m < 1) throw std::invalid_argument("m must be positive");
    if (total < 2 * m) {
        throw std::invalid_argument("core degrees infeasible: total < 2m");
    }
    std::vector<std::int64_t> deg(m, 2);
    const double gamma = static_cast<double>(total) / static_cast<double>(m);
    const double z = zeta_of_ratio(gamma);
    std::int64_t sum = 2 * m;
    if (z > 0.0) {
        const double fz = f_func(z);
        sum = 0;
        for (auto& dgi : deg) {
            dgi = draw_truncated_poisson(z, fz, rng);
            sum += dgi;
        }
    }
    // Exact-sum correction: unit steps at random positions, never below 2.
    while (sum > total) {
        const std::int64_t i = uniform_index(rng, m);
        if (deg[i] > 2) {
            --deg[i];
            --sum;
        }
    }
    while (sum < total) {
        ++deg[uniform_index(rng, m)];
        ++sum;
    }
    return deg;
}

BipartiteGraph sample_core_graph(std::int64_t n, std::int64_t m, int d, Rng& rng) {
    if (n < 1 || m < 1) throw std::invalid_argument("n and m must be positive");
    if (d < 2) throw std::invalid_argument("d must be at least 2");
    const std::int64_t points = n * d;
    if (points < 2 * m) {
        throw std::invalid_argument("core graph infeasible: d*n < 2m");
    }
    const auto degrees = sample_core_degrees(m, points, rng);
    // Right configuration points, then a uniform pairing via Fisher-Yates.
    std::vector<std::int32_t> owner(points);
    std::int64_t p = 0;
    for (std::int64_t r = 0; r < m; ++r) {
        for (std::int64_t k = 0; k < degrees[r]; ++k) owner[p++] = static_cast<std::int32_t>(r);
    }
    for (std::int64_t i = points - 1; i > 0; --i) {
        std::swap(owner[i], owner[uniform_index(rng, i + 1)]);
    }
    BipartiteGraph g(n, m, d);
    g.raw_slots() = std::move(owner);
    g.rebuild_indices();
    return g;
}

DegreeState recompute_degree_state(const BipartiteGraph& g) {
    DegreeState st;
    std::vector<std::int64_t> deg(g.m(), 0);
    for (std::int64_t j = 0; j < g.n(); ++j) {
        if (!g.left_alive(j)) continue;
        ++st.w;
        for (std::int64_t s = j * g.d(); s < (j + 1) * g.d(); ++s) {
            if (g.slot(s) >= 0) ++deg[g.slot(s)];
        }
    }
    for (std::int64_t r = 0; r < g.m(); ++r) {
        if (deg[r] == 1) ++st.v1;
        else if (deg[r] >= 2) ++st.v;
    }
    return st;
}

} // namespace ksmatch
