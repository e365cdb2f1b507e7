#include <doctest.h>

#include <cmath>
#include <map>

#include "shadowcast/error.hpp"
#include "shadowcast/walks.hpp"
#include "testutil.hpp"

using namespace shadowcast;

namespace {

LabeledGraph five_node_graph() {
    // triangle 0-1-2 with a tail 2-3-4: exercises return, triangle and
    // distance-2 weight classes
    testutil::EdgeList edges = {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}};
    return LabeledGraph::from_edges(5, edges, std::vector<std::uint32_t>{0, 0, 1, 1, 1}, 2);
}

std::vector<double> exact_second_order(const LabeledGraph& g, std::uint32_t prev, std::uint32_t cur, double p,
                                       double q) {
    std::vector<double> w(g.num_nodes(), 0.0);
    double total = 0.0;
    for (std::uint32_t x : g.neighbors(cur)) {
        double weight;
        if (x == prev) {
            weight = 1.0 / p;
        } else if (g.has_edge(prev, x)) {
            weight = 1.0;
        } else {
            weight = 1.0 / q;
        }
        w[x] = weight;
        total += weight;
    }
    for (double& x : w) x /= total;
    return w;
}

// worst-case total variation between empirical second-order transitions and
// the exact distribution, over (prev, cur) pairs with enough samples
double max_tv_distance(const LabeledGraph& g, double p, double q, std::size_t num_walks, std::uint64_t seed,
                       std::size_t min_samples) {
    WalkConfig cfg;
    cfg.walk_length = 16;
    cfg.batch_size = num_walks;
    cfg.p = p;
    cfg.q = q;
    cfg.rng_seed = seed;
    WalkBatch batch = sample_walks(g, cfg);

    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::size_t>> counts;
    for (std::size_t i = 0; i < batch.m; ++i) {
        for (std::size_t t = 2; t < batch.t; ++t) {
            auto key = std::make_pair(batch.node(i, t - 2), batch.node(i, t - 1));
            auto& c = counts[key];
            if (c.empty()) c.assign(g.num_nodes(), 0);
            ++c[batch.node(i, t)];
        }
    }
    double worst = 0.0;
    std::size_t pairs_checked = 0;
    for (const auto& [key, c] : counts) {
        std::size_t total = 0;
        for (std::size_t x : c) total += x;
        if (total < min_samples) continue;
        std::vector<double> exact = exact_second_order(g, key.first, key.second, p, q);
        double tv = 0.0;
        for (std::size_t x = 0; x < c.size(); ++x) {
            tv += std::abs(static_cast<double>(c[x]) / static_cast<double>(total) - exact[x]);
        }
        worst = std::max(worst, 0.5 * tv);
        ++pairs_checked;
    }
    REQUIRE(pairs_checked > 0);
    return worst;
}

}  // namespace

TEST_CASE("sample_walks: consecutive nodes are always adjacent") {
    auto tri = testutil::complete_graph(3);
    WalkConfig cfg;
    cfg.walk_length = 3;
    cfg.batch_size = 200;
    cfg.rng_seed = 42;
    WalkBatch batch = sample_walks(tri, cfg);
    for (std::size_t i = 0; i < batch.m; ++i) {
        for (std::size_t t = 0; t + 1 < batch.t; ++t) {
            CHECK(tri.has_edge(batch.node(i, t), batch.node(i, t + 1)));
        }
    }

    auto g = testutil::sbm_graph(40, 2, 0.3, 0.05, 1);
    cfg.walk_length = 16;
    cfg.batch_size = 10000;
    WalkBatch big = sample_walks(g, cfg);
    std::size_t violations = 0;
    for (std::size_t i = 0; i < big.m; ++i) {
        for (std::size_t t = 0; t + 1 < big.t; ++t) {
            if (!g.has_edge(big.node(i, t), big.node(i, t + 1))) ++violations;
        }
        for (std::size_t t = 0; t < big.t; ++t) {
            if (big.label(i, t) != g.label(big.node(i, t))) ++violations;
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("sample_walks: huge return parameter forbids backtracking") {
    auto path = testutil::path_graph(3);
    WalkConfig cfg;
    cfg.walk_length = 8;
    cfg.batch_size = 2000;
    cfg.p = 1e6;
    cfg.q = 1.0;
    cfg.rng_seed = 7;
    WalkBatch batch = sample_walks(path, cfg);
    std::size_t from_mid = 0, returned = 0;
    for (std::size_t i = 0; i < batch.m; ++i) {
        for (std::size_t t = 2; t < batch.t; ++t) {
            if (batch.node(i, t - 1) == 1) {
                ++from_mid;
                if (batch.node(i, t) == batch.node(i, t - 2)) ++returned;
            }
        }
    }
    REQUIRE(from_mid > 1000);
    CHECK(static_cast<double>(returned) / static_cast<double>(from_mid) < 1e-3);
}

TEST_CASE("sample_walks: unbiased walk matches uniform neighbor choice") {
    auto g = five_node_graph();
    // 3 sigma of a binomial proportion at ~20k samples is well under 0.02
    CHECK(max_tv_distance(g, 1.0, 1.0, 20000, 11, 2000) < 0.02);
}

TEST_CASE("sample_walks: second-order distribution matches enumeration") {
    auto g = five_node_graph();
    CHECK(max_tv_distance(g, 4.0, 0.25, 20000, 12, 2000) < 0.02);
    CHECK(max_tv_distance(g, 0.25, 4.0, 20000, 13, 2000) < 0.02);
}

TEST_CASE("sample_walks: deterministic and shard-invariant") {
    auto g = testutil::sbm_graph(30, 3, 0.4, 0.05, 2);
    WalkConfig cfg;
    cfg.walk_length = 16;
    cfg.batch_size = 64;
    cfg.rng_seed = 99;
    WalkBatch a = sample_walks(g, cfg);
    WalkBatch b = sample_walks(g, cfg);
    WalkBatch c = sample_walks(g, cfg, /*threads=*/4);
    CHECK(a.nodes == b.nodes);
    CHECK(a.nodes == c.nodes);
    CHECK(a.labels == c.labels);
}

TEST_CASE("sample_walks: config validation") {
    auto g = testutil::complete_graph(3);
    WalkConfig cfg;
    cfg.walk_length = 1;
    CHECK_THROWS_AS(sample_walks(g, cfg), ConfigError);
    cfg.walk_length = 4;
    cfg.p = 0.0;
    CHECK_THROWS_AS(sample_walks(g, cfg), ConfigError);
}

TEST_CASE("to_one_hot: slices are unit rows, argmax inverts") {
    auto g = five_node_graph();
    WalkConfig cfg;
    cfg.walk_length = 6;
    cfg.batch_size = 50;
    cfg.rng_seed = 3;
    WalkBatch batch = sample_walks(g, cfg);
    auto [nodes, labels] = to_one_hot(batch, g.num_nodes(), g.num_labels());
    const std::size_t n = g.num_nodes(), k = g.num_labels();
    for (std::size_t i = 0; i < batch.m; ++i) {
        for (std::size_t t = 0; t < batch.t; ++t) {
            double sum = 0.0;
            std::size_t arg = 0;
            for (std::size_t x = 0; x < n; ++x) {
                const double v = nodes.data[(i * batch.t + t) * n + x];
                sum += v;
                if (v == 1.0) arg = x;
            }
            CHECK(sum == 1.0);
            CHECK(arg == batch.node(i, t));
            double lsum = 0.0;
            for (std::size_t x = 0; x < k; ++x) lsum += labels.data[(i * batch.t + t) * k + x];
            CHECK(lsum == 1.0);
        }
    }
}

TEST_CASE("to_one_hot: out-of-range index is reported with its position") {
    WalkBatch bad;
    bad.m = 1;
    bad.t = 2;
    bad.nodes = {0, 5};
    bad.labels = {0, 0};
    CHECK_THROWS_WITH_AS(to_one_hot(bad, 3, 1), doctest::Contains("out of range"), ConfigError);
}
