#include "ksmatch/matching.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <stdexcept>

namespace ksmatch {

std::int64_t default_checkpoint_every(std::int64_t n) {
    return n <= 0 ? 1 : (n + 99) / 100;
}

namespace {

// Uniform-selection pool of degree-one vertices, both sides. Swap-remove
// with position maps keeps insert/remove/pick O(1).
class DegreeOnePool {
public:
    DegreeOnePool(std::int64_t n, std::int64_t m)
        : pos_left_(n, -1), pos_right_(m, -1) {}

    bool empty() const { return items_.empty(); }

    // handle: left j -> j, right r -> left_count + r
    std::int64_t pick(Rng& rng) const {
        return items_[uniform_index(rng, static_cast<std::int64_t>(items_.size()))];
    }

    void sync_left(const BipartiteGraph& g, std::int64_t j) {
        const bool want = g.left_alive(j) && g.left_degree(j) == 1;
        set(pos_left_[j], j, want);
    }

    void sync_right(const BipartiteGraph& g, std::int64_t r) {
        const bool want = g.right_degree(r) == 1;
        set(pos_right_[r], g.n() + r, want);
    }

private:
    void set(std::int64_t& pos, std::int64_t handle, bool want) {
        if (want == (pos >= 0)) return;
        if (want) {
            pos = static_cast<std::int64_t>(items_.size());
            items_.push_back(handle);
        } else {
            const std::int64_t last = items_.back();
            items_[pos] = last;
            position_of(last) = pos;
            items_.pop_back();
            pos = -1;
        }
    }

    std::int64_t& position_of(std::int64_t handle) {
        const std::int64_t n = static_cast<std::int64_t>(pos_left_.size());
        return handle < n ? pos_left_[handle] : pos_right_[handle - n];
    }

    std::vector<std::int64_t> items_;
    std::vector<std::int64_t> pos_left_;
    std::vector<std::int64_t> pos_right_;
};

struct KSDriver {
    BipartiteGraph& g;
    Rng& rng;
    std::int64_t checkpoint_every;
    KSResult res;
    DegreeOnePool pool;
    bool phase2_started = false;
    bool core_recorded = false;
    std::vector<std::int64_t> touched_rights_;
    std::vector<std::int64_t> touched_lefts_;

    KSDriver(BipartiteGraph& graph, Rng& r, std::int64_t ck)
        : g(graph), rng(r),
          checkpoint_every(ck > 0 ? ck : default_checkpoint_every(graph.n())),
          pool(graph.n(), graph.m()) {
        for (std::int64_t j = 0; j < g.n(); ++j) pool.sync_left(g, j);
        for (std::int64_t r = 0; r < g.m(); ++r) pool.sync_right(g, r);
        res.trace.emplace_back(0, g.degree_state());
    }

    // Unique live neighbour of a degree-one right vertex.
    std::int64_t partner_of_right(std::int64_t r) const {
        const auto* occ = g.occurrences(r);
        for (std::int64_t i = 0, cnt = g.occurrence_count(r); i < cnt; ++i) {
            if (g.slot(occ[i]) == r) return occ[i] / g.d();
        }
        throw std::logic_error("degree-one right vertex without a live edge");
    }

    // Unique live neighbour of a degree-one left vertex.
    std::int64_t partner_of_left(std::int64_t j) const {
        for (std::int64_t s = j * g.d(); s < (j + 1) * g.d(); ++s) {
            if (g.slot(s) >= 0) return g.slot(s);
        }
        throw std::logic_error("degree-one left vertex without a live edge");
    }

    void match_and_remove(std::int64_t j, std::int64_t r) {
        res.matching.pairs.emplace_back(static_cast<std::int32_t>(j),
                                        static_cast<std::int32_t>(r));
        touched_rights_.clear();
        touched_lefts_.clear();
        for (std::int64_t s = j * g.d(); s < (j + 1) * g.d(); ++s) {
            if (g.slot(s) >= 0) touched_rights_.push_back(g.slot(s));
        }
        const auto* occ = g.occurrences(r);
        for (std::int64_t i = 0, cnt = g.occurrence_count(r); i < cnt; ++i) {
            if (g.slot(occ[i]) == r) touched_lefts_.push_back(occ[i] / g.d());
        }
        g.delete_left(j);
        g.delete_right(r);
        for (std::int64_t rr : touched_rights_) pool.sync_right(g, rr);
        for (std::int64_t jj : touched_lefts_) pool.sync_left(g, jj);
    }

    void record_core() {
        core_recorded = true;
        const DegreeState st = g.degree_state();
        res.core_left =
            static_cast<std::int64_t>(g.blocks_with_edges().size());
        res.core_right = st.v1 + st.v;
        const std::int64_t t = res.tau1;
        if (res.trace.back().first != t) res.trace.emplace_back(t, st);
    }

    std::pair<std::int64_t, std::int64_t> pick_random_edge() {
        const auto& blocks = g.blocks_with_edges();
        const std::int64_t count = static_cast<std::int64_t>(blocks.size());
        while (true) {
            const std::int64_t j = blocks[uniform_index(rng, count)];
            const std::int64_t s = j * g.d() + uniform_index(rng, g.d());
            if (g.slot(s) >= 0) return {j, g.slot(s)};
        }
    }

    void run(bool phase1_only) {
        while (true) {
            if (!pool.empty()) {
                const std::int64_t handle = pool.pick(rng);
                std::int64_t j, r;
                if (handle < g.n()) {
                    j = handle;
                    r = partner_of_left(j);
                } else {
                    r = handle - g.n();
                    j = partner_of_right(r);
                }
                match_and_remove(j, r);
                if (!phase2_started) {
                    ++res.tau1;
                    if (res.tau1 % checkpoint_every == 0) {
                        res.trace.emplace_back(res.tau1, g.degree_state());
                    }
                } else {
                    ++res.phase2_size;
                }
            } else {
                if (!core_recorded) record_core();
                if (phase1_only || g.live_edge_count() == 0) break;
                phase2_started = true;
                const auto [j, r] = pick_random_edge();
                match_and_remove(j, r);
                ++res.phase2_size;
            }
        }
        if (!core_recorded) record_core();
    }
};

} // namespace

KSResult karp_sipser_phase1(BipartiteGraph& g, Rng& rng,
                            std::int64_t checkpoint_every) {
    KSDriver driver(g, rng, checkpoint_every);
    driver.run(/*phase1_only=*/true);
    return std::move(driver.res);
}

KSResult karp_sipser(BipartiteGraph& g, Rng& rng, std::int64_t checkpoint_every) {
    KSDriver driver(g, rng, checkpoint_every);
    driver.run(/*phase1_only=*/false);
    return std::move(driver.res);
}

std::int64_t karp_sipser_phase2(BipartiteGraph& g, Rng& rng, KSResult& result) {
    KSDriver driver(g, rng, 0);
    driver.phase2_started = true;
    driver.core_recorded = true;
    driver.run(/*phase1_only=*/false);
    result.phase2_size += driver.res.phase2_size;
    result.matching.pairs.insert(result.matching.pairs.end(),
                                 driver.res.matching.pairs.begin(),
                                 driver.res.matching.pairs.end());
    return driver.res.phase2_size;
}

Matching max_matching(const BipartiteGraph& g) {
    const std::int64_t n = g.n();
    const std::int64_t m = g.m();
    const int d = g.d();

    // CSR adjacency over live edges, parallel copies collapsed per block.
    std::vector<std::int64_t> off(n + 1, 0);
    std::vector<std::int32_t> adj;
    adj.reserve(g.live_edge_count());
    std::vector<std::int32_t> block;
    for (std::int64_t j = 0; j < n; ++j) {
        block.clear();
        if (g.left_alive(j)) {
            for (std::int64_t s = j * d; s < (j + 1) * d; ++s) {
                if (g.slot(s) >= 0) block.push_back(g.slot(s));
            }
            std::sort(block.begin(), block.end());
            block.erase(std::unique(block.begin(), block.end()), block.end());
        }
        adj.insert(adj.end(), block.begin(), block.end());
        off[j + 1] = static_cast<std::int64_t>(adj.size());
    }

    std::vector<std::int32_t> pair_left(n, -1), pair_right(m, -1);
    std::vector<std::int32_t> dist(n);
    std::deque<std::int32_t> queue;
    constexpr std::int32_t kInf = INT32_MAX;

    const auto bfs = [&]() {
        bool reachable_free_right = false;
        queue.clear();
        for (std::int64_t j = 0; j < n; ++j) {
            if (pair_left[j] < 0 && off[j] < off[j + 1]) {
                dist[j] = 0;
                queue.push_back(static_cast<std::int32_t>(j));
            } else {
                dist[j] = kInf;
            }
        }
        while (!queue.empty()) {
            const std::int32_t j = queue.front();
            queue.pop_front();
            for (std::int64_t i = off[j]; i < off[j + 1]; ++i) {
                const std::int32_t r = adj[i];
                const std::int32_t j2 = pair_right[r];
                if (j2 < 0) {
                    reachable_free_right = true;
                } else if (dist[j2] == kInf) {
                    dist[j2] = dist[j] + 1;
                    queue.push_back(j2);
                }
            }
        }
        return reachable_free_right;
    };

    const std::function<bool(std::int32_t)> dfs = [&](std::int32_t j) {
        for (std::int64_t i = off[j]; i < off[j + 1]; ++i) {
            const std::int32_t r = adj[i];
            const std::int32_t j2 = pair_right[r];
            if (j2 < 0 || (dist[j2] == dist[j] + 1 && dfs(j2))) {
                pair_left[j] = r;
                pair_right[r] = j;
                return true;
            }
        }
        dist[j] = kInf;
        return false;
    };

    while (bfs()) {
        for (std::int64_t j = 0; j < n; ++j) {
            if (pair_left[j] < 0 && dist[j] == 0) dfs(static_cast<std::int32_t>(j));
        }
    }

    Matching result;
    for (std::int64_t j = 0; j < n; ++j) {
        if (pair_left[j] >= 0) {
            result.pairs.emplace_back(static_cast<std::int32_t>(j), pair_left[j]);
        }
    }
    return result;
}

std::int64_t brute_force_matching(const BipartiteGraph& g) {
    const std::int64_t n = g.n();
    const std::int64_t m = g.m();
    if (n > 12 || m > 12) {
        throw std::invalid_argument("brute_force_matching limited to n, m <= 12");
    }
    const int d = g.d();
    std::vector<std::uint16_t> right_mask(n, 0);
    for (std::int64_t j = 0; j < n; ++j) {
        if (!g.left_alive(j)) continue;
        for (std::int64_t s = j * d; s < (j + 1) * d; ++s) {
            if (g.slot(s) >= 0) right_mask[j] |= static_cast<std::uint16_t>(1u << g.slot(s));
        }
    }
    const std::int64_t masks = std::int64_t{1} << m;
    // dp[mask] = best matching among left vertices j..n-1 given used rights.
    std::vector<std::int8_t> dp(masks, 0), next(masks, 0);
    for (std::int64_t j = n - 1; j >= 0; --j) {
        std::swap(dp, next);
        for (std::int64_t mask = 0; mask < masks; ++mask) {
            std::int8_t best = next[mask];
            std::uint16_t avail = right_mask[j] & static_cast<std::uint16_t>(~mask);
            while (avail) {
                const std::uint16_t bit = avail & static_cast<std::uint16_t>(-avail);
                avail ^= bit;
                best = std::max<std::int8_t>(best, 1 + next[mask | bit]);
            }
            dp[mask] = best;
        }
    }
    return n == 0 ? 0 : dp[0];
}

bool verify_matching(const BipartiteGraph& g, const Matching& matching) {
    std::vector<std::uint8_t> left_used(g.n(), 0), right_used(g.m(), 0);
    for (const auto& [j, r] : matching.pairs) {
        if (j < 0 || j >= g.n() || r < 0 || r >= g.m()) return false;
        if (left_used[j] || right_used[r]) return false;
        left_used[j] = right_used[r] = 1;
        if (!g.left_alive(j)) return false;
        bool found = false;
        for (std::int64_t s = static_cast<std::int64_t>(j) * g.d();
             s < static_cast<std::int64_t>(j + 1) * g.d(); ++s) {
            if (g.slot(s) == r) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

bool is_forest(const BipartiteGraph& g) {
    // union-find; a parallel edge closes a 2-cycle
    std::vector<std::int32_t> parent(g.n() + g.m());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<std::int32_t>(i);
    const auto find = [&](std::int32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::int64_t j = 0; j < g.n(); ++j) {
        if (!g.left_alive(j)) continue;
        for (std::int64_t s = j * g.d(); s < (j + 1) * g.d(); ++s) {
            if (g.slot(s) < 0) continue;
            const std::int32_t a = find(static_cast<std::int32_t>(j));
            const std::int32_t b = find(static_cast<std::int32_t>(g.n() + g.slot(s)));
            if (a == b) return false;
            parent[a] = b;
        }
    }
    return true;
}

} // namespace ksmatch
