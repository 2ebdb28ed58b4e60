#include "ksmatch/matching.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "test_util.hpp"

using namespace ksmatch;

namespace {

BipartiteGraph make_graph(std::int64_t n, std::int64_t m, int d,
                          const std::vector<std::int32_t>& slots) {
    BipartiteGraph g(n, m, d);
    g.raw_slots() = slots;
    g.rebuild_indices();
    return g;
}

BipartiteGraph random_small(std::int64_t n, std::int64_t m, int d, Rng& rng) {
    ModelParams p;
    p.n = n;
    p.m = m;
    p.d = d;
    return sample_graph(p, rng);
}

bool no_degree_one_vertex(const BipartiteGraph& g) {
    for (std::int64_t r = 0; r < g.m(); ++r) {
        if (g.right_degree(r) == 1) return false;
    }
    for (std::int64_t j = 0; j < g.n(); ++j) {
        if (g.left_alive(j) && g.left_degree(j) == 1) return false;
    }
    return true;
}

void test_brute_force_basics() {
    CHECK(brute_force_matching(BipartiteGraph(0, 1, 2)) == 0);
    // three parallel blocks over two rights
    const auto g = make_graph(3, 3, 2, {0, 1, 0, 1, 0, 1});
    CHECK(brute_force_matching(g) == 2);
    CHECK_THROWS(brute_force_matching(BipartiteGraph(13, 5, 2)));
    CHECK_THROWS(brute_force_matching(BipartiteGraph(5, 13, 2)));
}

void test_max_matching_small_cases() {
    // two left blocks all pointing at the single right vertex
    const auto g = make_graph(2, 1, 3, {0, 0, 0, 0, 0, 0});
    CHECK(max_matching(g).size() == 1);
    CHECK(brute_force_matching(g) == 1);
}

void test_exact_agreement_with_brute_force() {
    // layered matcher equals exhaustive enumeration, and its output verifies
    int agreements = 0;
    for (int t = 0; t < 1000; ++t) {
        Rng rng(mix_seed(101, t));
        const std::int64_t n = 1 + uniform_index(rng, 6);
        const std::int64_t m = 1 + uniform_index(rng, 6);
        const int d = 2 + static_cast<int>(uniform_index(rng, 2));
        const BipartiteGraph g = random_small(n, m, d, rng);
        const Matching mm = max_matching(g);
        CHECK(verify_matching(g, mm));
        if (mm.size() == brute_force_matching(g)) ++agreements;
    }
    CHECK(agreements == 1000);
}

void test_verify_matching() {
    const auto g = make_graph(2, 3, 2, {0, 1, 1, 2});
    CHECK(verify_matching(g, Matching{}));
    Matching good;
    good.pairs = {{0, 0}, {1, 2}};
    CHECK(verify_matching(g, good));
    Matching not_an_edge;
    not_an_edge.pairs = {{0, 2}};
    CHECK(!verify_matching(g, not_an_edge));
    Matching repeated_right;
    repeated_right.pairs = {{0, 1}, {1, 1}};
    CHECK(!verify_matching(g, repeated_right));
    Matching repeated_left;
    repeated_left.pairs = {{0, 0}, {0, 1}};
    CHECK(!verify_matching(g, repeated_left));
}

void test_phase1_examples() {
    {
        // one block over three degree-1 rights: one step empties the graph
        auto g = make_graph(1, 3, 3, {0, 1, 2});
        Rng rng(5);
        const KSResult res = karp_sipser_phase1(g, rng);
        CHECK(res.tau1 == 1);
        CHECK(res.phase2_size == 0);
        CHECK(g.live_edge_count() == 0);
        CHECK(res.core_left == 0 && res.core_right == 0);
    }
    {
        // no degree-1 vertex: Phase 1 ends immediately
        auto g = make_graph(2, 1, 3, {0, 0, 0, 0, 0, 0});
        Rng rng(5);
        const KSResult res = karp_sipser_phase1(g, rng);
        CHECK(res.tau1 == 0);
        CHECK(g.live_edge_count() == 6);
        CHECK(res.core_left == 2 && res.core_right == 1);
    }
}

void test_full_ks_on_cycle() {
    // 2-regular 4-cycle: Phase 1 idle, Phase 2 resolves both edges
    auto g = make_graph(2, 2, 2, {0, 1, 0, 1});
    Rng rng(7);
    const KSResult res = karp_sipser(g, rng);
    CHECK(res.tau1 == 0);
    CHECK(res.phase2_size == 2);
    CHECK(res.matching.size() == 2);
    CHECK(g.live_edge_count() == 0);
}

void test_trace_shape() {
    Rng rng(mix_seed(55, 1));
    auto g = random_small(500, 600, 3, rng);
    const KSResult res = karp_sipser_phase1(g, rng, 10);
    CHECK(!res.trace.empty());
    CHECK(res.trace.front().first == 0);
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
        CHECK(res.trace[i].first > res.trace[i - 1].first);
    }
    CHECK(res.matching.size() == res.tau1 + res.phase2_size);
}

void test_phase1_termination_state() {
    for (int t = 0; t < 200; ++t) {
        Rng rng(mix_seed(301, t));
        const std::int64_t n = 1 + uniform_index(rng, 40);
        const std::int64_t m = 1 + uniform_index(rng, 40);
        auto g = random_small(n, m, 2 + static_cast<int>(uniform_index(rng, 2)), rng);
        const BipartiteGraph original = g;
        const KSResult res = karp_sipser_phase1(g, rng);
        CHECK(no_degree_one_vertex(g));
        CHECK(verify_matching(original, res.matching));
        // core sizes match a direct scan
        std::int64_t lefts = 0, rights = 0;
        for (std::int64_t j = 0; j < g.n(); ++j) {
            if (g.left_alive(j) && g.left_degree(j) > 0) ++lefts;
        }
        for (std::int64_t r = 0; r < g.m(); ++r) {
            if (g.right_degree(r) > 0) ++rights;
        }
        CHECK(res.core_left == lefts);
        CHECK(res.core_right == rights);
    }
}

void test_matching_identity_small_instances() {
    // mu(G) = tau1 + mu(Gamma1) exactly; exercised on 10^4 brute-forceable
    // instances, which is also the degree-1 safety property
    int held = 0;
    const int total = 10000;
    for (int t = 0; t < total; ++t) {
        Rng rng(mix_seed(401, t));
        const std::int64_t n = 1 + uniform_index(rng, 12);
        const std::int64_t m = 1 + uniform_index(rng, 12);
        const int d = 2 + static_cast<int>(uniform_index(rng, 3));
        const BipartiteGraph g = random_small(n, m, d, rng);
        const std::int64_t mu = brute_force_matching(g);
        BipartiteGraph work = g;
        const KSResult phase1 = karp_sipser_phase1(work, rng);
        const std::int64_t mu_core = brute_force_matching(work);
        if (mu == phase1.tau1 + mu_core) ++held;
    }
    CHECK(held == total);
}

void test_greedy_bounded_by_maximum() {
    for (int t = 0; t < 500; ++t) {
        Rng rng(mix_seed(501, t));
        const std::int64_t n = 1 + uniform_index(rng, 7);
        const std::int64_t m = 1 + uniform_index(rng, 7);
        const BipartiteGraph g = random_small(n, m, 3, rng);
        const std::int64_t mu = brute_force_matching(g);
        BipartiteGraph work = g;
        const KSResult res = karp_sipser(work, rng);
        CHECK(res.matching.size() <= mu);
        CHECK(verify_matching(g, res.matching));
        CHECK(res.matching.size() == res.tau1 + res.phase2_size);
    }
}

void test_mean_greedy_close_to_maximum() {
    // per instance: mean greedy size over independent runs stays within
    // [mu - 2, mu]; exact whenever the Phase-1 core is a forest (which at
    // min degree >= 2 means edgeless)
    for (int t = 0; t < 200; ++t) {
        Rng rng(mix_seed(601, t));
        const std::int64_t n = 1 + uniform_index(rng, 7);
        const std::int64_t m = 1 + uniform_index(rng, 7);
        const BipartiteGraph g = random_small(n, m, 3, rng);
        const std::int64_t mu = brute_force_matching(g);
        double sum = 0.0;
        const int runs = 20;
        for (int k = 0; k < runs; ++k) {
            Rng run_rng(mix_seed(701, t * 100 + k));
            BipartiteGraph work = g;
            KSResult phase1 = karp_sipser_phase1(work, run_rng);
            const bool core_forest = is_forest(work);
            const bool core_empty = work.live_edge_count() == 0;
            CHECK(core_forest == core_empty);
            karp_sipser_phase2(work, run_rng, phase1);
            const auto size = phase1.tau1 + phase1.phase2_size;
            if (core_forest) CHECK(size == mu);
            sum += static_cast<double>(size);
        }
        const double mean = sum / runs;
        CHECK(mean <= static_cast<double>(mu) + 1e-9);
        CHECK(mean >= static_cast<double>(mu) - 2.0);
    }
}

void test_exact_on_forests() {
    // sparse instances filtered to forests; the greedy is exact there
    int found = 0;
    int t = 0;
    while (found < 300 && t < 20000) {
        Rng rng(mix_seed(801, t++));
        const std::int64_t n = 1 + uniform_index(rng, 5);
        const std::int64_t m = 8 + uniform_index(rng, 5);
        const BipartiteGraph g = random_small(n, m, 2, rng);
        if (!is_forest(g)) continue;
        ++found;
        const std::int64_t mu = brute_force_matching(g);
        BipartiteGraph work = g;
        const KSResult res = karp_sipser(work, rng);
        CHECK_MSG(res.matching.size() == mu, "forest instance " + std::to_string(t));
        // a forest is consumed entirely by degree-one steps
        CHECK(res.phase2_size == 0);
    }
    CHECK(found == 300);
}

void test_is_forest() {
    CHECK(is_forest(make_graph(2, 3, 2, {0, 1, 1, 2})));   // path
    CHECK(!is_forest(make_graph(2, 2, 2, {0, 1, 0, 1})));  // 4-cycle
    CHECK(!is_forest(make_graph(1, 2, 2, {0, 0})));        // parallel edge
    CHECK(is_forest(BipartiteGraph(0, 1, 2)));
}

void test_determinism() {
    Rng sample_rng(mix_seed(901, 0));
    const BipartiteGraph g = random_small(300, 300, 3, sample_rng);
    BipartiteGraph g1 = g, g2 = g;
    Rng r1(12345), r2(12345);
    const KSResult a = karp_sipser(g1, r1);
    const KSResult b = karp_sipser(g2, r2);
    CHECK(a.matching.pairs == b.matching.pairs);
    CHECK(a.tau1 == b.tau1);
    CHECK(a.phase2_size == b.phase2_size);
    const Matching m1 = max_matching(g);
    const Matching m2 = max_matching(g);
    CHECK(m1.pairs == m2.pairs);
}

} // namespace

int main() {
    test_brute_force_basics();
    test_max_matching_small_cases();
    test_exact_agreement_with_brute_force();
    test_verify_matching();
    test_phase1_examples();
    test_full_ks_on_cycle();
    test_trace_shape();
    test_phase1_termination_state();
    test_matching_identity_small_instances();
    test_greedy_bounded_by_maximum();
    test_mean_greedy_close_to_maximum();
    test_exact_on_forests();
    test_is_forest();
    test_determinism();
    return testutil::summary("matching");
}
