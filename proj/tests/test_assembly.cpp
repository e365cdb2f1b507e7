#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "shadowcast/assembly.hpp"
#include "shadowcast/error.hpp"
#include "shadowcast/walks.hpp"
#include "testutil.hpp"

using namespace shadowcast;

namespace {

using PairKey = std::pair<std::uint32_t, std::uint32_t>;

// Exhaustive enumeration of the two-stage selection on K4 with uniform
// scores and target 3, mirroring the documented procedure: every node draws
// one incident edge, overshoot trims a uniformly random removable edge,
// shortfall fills uniformly. Returns inclusion probability per pair.
std::map<PairKey, double> enumerate_k4_target3() {
    const std::vector<PairKey> pairs = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    const std::vector<std::vector<std::size_t>> incident = {
        {0, 1, 2},  // node 0: pairs (0,1),(0,2),(0,3)
        {0, 3, 4},  // node 1
        {1, 3, 5},  // node 2
        {2, 4, 5},  // node 3
    };
    std::map<PairKey, double> prob;
    for (const auto& p : pairs) prob[p] = 0.0;

    auto add_outcome = [&](const std::set<std::size_t>& sel, double p) {
        for (std::size_t i : sel) prob[pairs[i]] += p;
    };

    // choice[v] in {0,1,2} indexes incident[v]
    for (std::size_t c0 = 0; c0 < 3; ++c0) {
        for (std::size_t c1 = 0; c1 < 3; ++c1) {
            for (std::size_t c2 = 0; c2 < 3; ++c2) {
                for (std::size_t c3 = 0; c3 < 3; ++c3) {
                    const double base = 1.0 / 81.0;
                    std::set<std::size_t> sel = {incident[0][c0], incident[1][c1], incident[2][c2],
                                                 incident[3][c3]};
                    if (sel.size() == 3) {
                        add_outcome(sel, base);
                    } else if (sel.size() == 4) {
                        // trim: uniform among edges whose endpoints keep degree >= 2
                        std::map<std::uint32_t, int> deg;
                        for (std::size_t i : sel) {
                            ++deg[pairs[i].first];
                            ++deg[pairs[i].second];
                        }
                        std::vector<std::size_t> removable;
                        for (std::size_t i : sel) {
                            if (deg[pairs[i].first] >= 2 && deg[pairs[i].second] >= 2) removable.push_back(i);
                        }
                        for (std::size_t r : removable) {
                            std::set<std::size_t> out = sel;
                            out.erase(r);
                            add_outcome(out, base / static_cast<double>(removable.size()));
                        }
                    } else {  // size 2: a perfect matching; fill one of the other 4 uniformly
                        std::vector<std::size_t> rest;
                        for (std::size_t i = 0; i < 6; ++i) {
                            if (!sel.count(i)) rest.push_back(i);
                        }
                        for (std::size_t r : rest) {
                            std::set<std::size_t> out = sel;
                            out.insert(r);
                            add_outcome(out, base / static_cast<double>(rest.size()));
                        }
                    }
                }
            }
        }
    }
    return prob;
}

ScoreMatrix uniform_k4_scores() {
    ScoreMatrix s = ScoreMatrix::empty(4);
    for (std::uint32_t u = 0; u < 4; ++u) {
        for (std::uint32_t v = u + 1; v < 4; ++v) s.counts[ScoreMatrix::key(u, v, 4)] = 10;
    }
    s.symmetric = true;
    return s;
}

}  // namespace

TEST_CASE("accumulate: hand-counted directed transitions") {
    std::vector<std::uint32_t> walks = {0, 1, 2, 1, 2, 0};
    ScoreMatrix s = accumulate(3, walks, 3);
    CHECK(s.at(0, 1) == 1);
    CHECK(s.at(1, 2) == 2);
    CHECK(s.at(2, 0) == 1);
    CHECK(s.at(1, 0) == 0);
    CHECK(s.nonzeros() == 3);
}

TEST_CASE("accumulate: empty input gives the zero matrix") {
    ScoreMatrix s = accumulate(5, std::vector<std::uint32_t>{}, 4);
    CHECK(s.nonzeros() == 0);
}

TEST_CASE("accumulate: self-transitions dropped, bad index raises") {
    std::vector<std::uint32_t> walk = {1, 1, 2};
    ScoreMatrix s = ScoreMatrix::empty(3);
    accumulate_walk(s, walk);
    CHECK(s.at(1, 1) == 0);
    CHECK(s.at(1, 2) == 1);

    std::vector<std::uint32_t> bad = {0, 9};
    CHECK_THROWS_AS(accumulate_walk(s, bad), ConfigError);
}

TEST_CASE("symmetrize: max rule, idempotent") {
    ScoreMatrix s = ScoreMatrix::empty(3);
    s.counts[ScoreMatrix::key(0, 1, 3)] = 3;
    s.counts[ScoreMatrix::key(1, 0, 3)] = 5;
    ScoreMatrix sym = symmetrize(s);
    CHECK(sym.at(0, 1) == 5);
    CHECK(sym.nonzeros() == 1);

    ScoreMatrix again = symmetrize(sym);
    CHECK(again.at(0, 1) == 5);
    CHECK(again.nonzeros() == 1);
}

TEST_CASE("binarize: forced outcome when scores equal the target") {
    ScoreMatrix s = ScoreMatrix::empty(5);
    s.counts[ScoreMatrix::key(0, 1, 5)] = 7;
    s.counts[ScoreMatrix::key(1, 2, 5)] = 1;
    s.counts[ScoreMatrix::key(3, 4, 5)] = 2;
    s.symmetric = true;
    BinarizeResult r = binarize(s, 3, 99);
    CHECK(r.target_met);
    REQUIRE(r.edges.size() == 3);
    CHECK(r.edges[0] == PairKey{0, 1});
    CHECK(r.edges[1] == PairKey{1, 2});
    CHECK(r.edges[2] == PairKey{3, 4});
}

TEST_CASE("binarize: star scores keep every node covered") {
    ScoreMatrix s = ScoreMatrix::empty(6);
    for (std::uint32_t leaf = 1; leaf <= 5; ++leaf) s.counts[ScoreMatrix::key(0, leaf, 6)] = 100;
    s.symmetric = true;
    BinarizeResult r = binarize(s, 5, 7);
    REQUIRE(r.edges.size() == 5);
    std::vector<int> deg(6, 0);
    for (auto [u, v] : r.edges) {
        ++deg[u];
        ++deg[v];
    }
    for (int d : deg) CHECK(d >= 1);
}

TEST_CASE("binarize: zero matrix and zero target are rejected") {
    ScoreMatrix s = ScoreMatrix::empty(4);
    s.symmetric = true;
    CHECK_THROWS_AS(binarize(s, 3, 1), ConfigError);
    ScoreMatrix u = uniform_k4_scores();
    CHECK_THROWS_AS(binarize(u, 0, 1), ConfigError);
    ScoreMatrix not_sym = ScoreMatrix::empty(4);
    not_sym.counts[ScoreMatrix::key(0, 1, 4)] = 1;
    CHECK_THROWS_AS(binarize(not_sym, 1, 1), ConfigError);
}

TEST_CASE("binarize: K4 selection frequencies match the enumerated oracle") {
    auto oracle = enumerate_k4_target3();
    // symmetry sanity: every pair should land at exactly 1/2
    for (const auto& [pair, p] : oracle) {
        CAPTURE(pair.first);
        CHECK(p == doctest::Approx(0.5).epsilon(1e-9));
    }

    ScoreMatrix s = uniform_k4_scores();
    std::map<PairKey, double> freq;
    const int trials = 10000;
    for (int seed = 0; seed < trials; ++seed) {
        BinarizeResult r = binarize(s, 3, static_cast<std::uint64_t>(seed));
        REQUIRE(r.edges.size() == 3);
        for (auto e : r.edges) freq[e] += 1.0;
    }
    for (auto& [pair, count] : freq) {
        CAPTURE(pair.first);
        CAPTURE(pair.second);
        CHECK(std::abs(count / trials - oracle[pair]) < 0.02);
    }
}

TEST_CASE("binarize: randomized score matrices hold the core properties") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng = Rng::stream(seed, 0, 0xa5);
        const std::size_t n = 6 + rng.uniform_int(20);
        ScoreMatrix s = ScoreMatrix::empty(n);
        for (std::uint32_t u = 0; u < n; ++u) {
            for (std::uint32_t v = u + 1; v < n; ++v) {
                if (rng.uniform() < 0.4) s.counts[ScoreMatrix::key(u, v, n)] = 1 + rng.uniform_int(50);
            }
        }
        if (s.counts.empty()) continue;
        s.symmetric = true;
        const std::size_t target = std::max<std::size_t>(n / 2 + 1, s.nonzeros() / 2);

        BinarizeResult r = binarize(s, target, seed);
        const std::size_t expect = std::min(target, s.nonzeros());

        std::set<PairKey> seen;
        std::vector<int> deg(n, 0);
        for (auto [u, v] : r.edges) {
            CHECK(u < v);
            CHECK(seen.insert({u, v}).second);  // no duplicates
            CHECK(s.at(u, v) > 0);              // only scored pairs
            ++deg[u];
            ++deg[v];
        }
        if (r.target_met) CHECK(r.edges.size() == expect);
        for (std::uint32_t v = 0; v < n; ++v) {
            bool scored = false;
            for (std::uint32_t u = 0; u < n && !scored; ++u) {
                scored = u != v && (s.at(std::min(u, v), std::max(u, v)) > 0);
            }
            if (scored) CHECK(deg[v] >= 1);
        }

        BinarizeResult r2 = binarize(s, target, seed);
        CHECK(r.edges == r2.edges);  // determinism
    }
}

TEST_CASE("binarize: threshold and top-k strategies") {
    ScoreMatrix s = ScoreMatrix::empty(5);
    s.counts[ScoreMatrix::key(0, 1, 5)] = 50;
    s.counts[ScoreMatrix::key(0, 2, 5)] = 40;
    s.counts[ScoreMatrix::key(1, 2, 5)] = 30;
    s.counts[ScoreMatrix::key(2, 3, 5)] = 20;
    s.counts[ScoreMatrix::key(3, 4, 5)] = 10;
    s.symmetric = true;

    BinarizeResult top = binarize(s, 2, 1, BinarizeStrategy::top_k);
    REQUIRE(top.edges.size() == 2);
    CHECK(top.edges[0] == PairKey{0, 1});
    CHECK(top.edges[1] == PairKey{0, 2});

    BinarizeResult thr = binarize(s, 3, 1, BinarizeStrategy::threshold);
    REQUIRE(thr.edges.size() == 3);
    CHECK(thr.edges[2] == PairKey{1, 2});
}

TEST_CASE("dump_scores: sorted stable text output") {
    testutil::TempDir tmp;
    ScoreMatrix s = ScoreMatrix::empty(4);
    s.counts[ScoreMatrix::key(2, 3, 4)] = 5;
    s.counts[ScoreMatrix::key(0, 1, 4)] = 2;
    s.counts[ScoreMatrix::key(0, 3, 4)] = 9;
    dump_scores(s, tmp.file("scores.txt"));
    std::ifstream in(tmp.file("scores.txt"));
    std::string l1, l2, l3;
    std::getline(in, l1);
    std::getline(in, l2);
    std::getline(in, l3);
    CHECK(l1 == "0 1 2");
    CHECK(l2 == "0 3 9");
    CHECK(l3 == "2 3 5");
}

TEST_CASE("accumulate: large stream stays sparse") {
    // 100k walks of length 16 over 50 nodes: the map can hold at most one
    // entry per ordered pair
    auto g = testutil::sbm_graph(50, 2, 0.3, 0.05, 9);
    WalkConfig cfg;
    cfg.walk_length = 16;
    cfg.batch_size = 100000;
    cfg.rng_seed = 5;
    WalkBatch batch = sample_walks(g, cfg);
    ScoreMatrix s = accumulate(50, batch.nodes, 16);
    CHECK(s.nonzeros() <= 50 * 49);
    std::uint64_t total = 0;
    for (const auto& [k, c] : s.counts) total += c;
    CHECK(total == 100000 * 15);
}
