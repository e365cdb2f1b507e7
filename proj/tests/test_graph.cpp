#include <doctest.h>

#include <set>

#include "shadowcast/error.hpp"
#include "shadowcast/graph.hpp"
#include "testutil.hpp"

using namespace shadowcast;
using testutil::TempDir;
using testutil::write_file;

namespace {

std::multiset<std::size_t> degree_multiset(const LabeledGraph& g) {
    std::multiset<std::size_t> out;
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) out.insert(g.degree(v));
    return out;
}

}  // namespace

TEST_CASE("load_edge_list: minimal graph") {
    TempDir tmp;
    write_file(tmp.file("e.txt"), "0 1\n");
    write_file(tmp.file("l.txt"), "0 0\n1 0\n");
    auto [g, report] = load_edge_list(tmp.file("e.txt"), tmp.file("l.txt"));
    CHECK(g.num_nodes() == 2);
    CHECK(g.num_edges() == 1);
    CHECK(g.num_labels() == 1);
    CHECK(report.nodes == 2);
    CHECK(report.edges == 1);
    CHECK(report.k == 1);
}

TEST_CASE("load_edge_list: reversed duplicate collapses to one edge") {
    TempDir tmp;
    write_file(tmp.file("e.txt"), "0 1\n1 0\n");
    write_file(tmp.file("l.txt"), "0 0\n1 1\n");
    auto [g, report] = load_edge_list(tmp.file("e.txt"), tmp.file("l.txt"));
    CHECK(g.num_edges() == 1);
    CHECK(report.duplicates_dropped == 1);
}

TEST_CASE("load_edge_list: self-loops dropped and counted") {
    TempDir tmp;
    write_file(tmp.file("e.txt"), "0 0\n0 1\n1 1\n");
    write_file(tmp.file("l.txt"), "0 0\n1 0\n");
    auto [g, report] = load_edge_list(tmp.file("e.txt"), tmp.file("l.txt"));
    CHECK(g.num_edges() == 1);
    CHECK(report.self_loops_dropped == 2);
}

TEST_CASE("load_edge_list: sparse ids are remapped, comments allowed") {
    TempDir tmp;
    write_file(tmp.file("e.txt"), "# header\n1000 7\n7 530\n");
    write_file(tmp.file("l.txt"), "7 4\n530 4\n1000 9\n");
    auto [g, report] = load_edge_list(tmp.file("e.txt"), tmp.file("l.txt"));
    CHECK(g.num_nodes() == 3);
    CHECK(g.num_labels() == 2);  // label values 4 and 9 remapped to 0 and 1
    CHECK(g.node_name(0) == 7);
    CHECK(g.node_name(2) == 1000);
    CHECK(g.label_name(0) == 4);
    CHECK(g.label_name(1) == 9);
    CHECK(report.label_histogram[0] == 2);
}

TEST_CASE("load_edge_list: missing label names the node") {
    TempDir tmp;
    write_file(tmp.file("e.txt"), "0 1\n1 42\n");
    write_file(tmp.file("l.txt"), "0 0\n1 0\n");
    CHECK_THROWS_WITH_AS(load_edge_list(tmp.file("e.txt"), tmp.file("l.txt")),
                         doctest::Contains("missing label for node 42"), IngestError);
}

TEST_CASE("load_edge_list: parse error carries line number") {
    TempDir tmp;
    write_file(tmp.file("e.txt"), "0 1\nx 2\n");
    write_file(tmp.file("l.txt"), "0 0\n");
    CHECK_THROWS_WITH_AS(load_edge_list(tmp.file("e.txt"), tmp.file("l.txt")), doctest::Contains(":2:"),
                         IngestError);
}

TEST_CASE("load_edge_list: labels for absent nodes are ignored") {
    TempDir tmp;
    write_file(tmp.file("e.txt"), "0 1\n");
    write_file(tmp.file("l.txt"), "0 0\n1 0\n99 1\n");
    auto [g, report] = load_edge_list(tmp.file("e.txt"), tmp.file("l.txt"));
    CHECK(g.num_nodes() == 2);
    CHECK(g.num_labels() == 1);
}

TEST_CASE("lcc: tie broken by smallest original id") {
    // two triangles plus an isolated-ish third component
    testutil::EdgeList edges = {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {6, 7}};
    auto g = LabeledGraph::from_edges(8, edges, std::vector<std::uint32_t>(8, 0), 1);
    LabeledGraph c = lcc(g);
    CHECK(c.num_nodes() == 3);
    CHECK(c.node_name(0) == 0);
    CHECK(c.node_name(2) == 2);
}

TEST_CASE("lcc: connected graph unchanged up to identity") {
    auto g = testutil::two_clique_graph();
    LabeledGraph c = lcc(g);
    CHECK(c.num_nodes() == g.num_nodes());
    CHECK(c.num_edges() == g.num_edges());
    CHECK(c.labels() == g.labels());
}

TEST_CASE("lcc: matches brute-force component sizes and keeps label histogram") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto g = testutil::random_graph(120, 0.012, 3, seed);
        LabeledGraph c = lcc(g);

        // brute-force BFS component sizes
        const std::size_t n = g.num_nodes();
        std::vector<int> comp(n, -1);
        int nc = 0;
        std::size_t best_size = 0;
        for (std::uint32_t s = 0; s < n; ++s) {
            if (comp[s] >= 0) continue;
            std::vector<std::uint32_t> stack = {s};
            comp[s] = nc;
            std::size_t size = 0;
            while (!stack.empty()) {
                std::uint32_t u = stack.back();
                stack.pop_back();
                ++size;
                for (std::uint32_t v : g.neighbors(u)) {
                    if (comp[v] < 0) {
                        comp[v] = nc;
                        stack.push_back(v);
                    }
                }
            }
            best_size = std::max(best_size, size);
            ++nc;
        }
        REQUIRE(c.num_nodes() == best_size);

        // label histogram of the kept nodes
        std::vector<std::uint32_t> expect(g.num_labels(), 0);
        for (std::uint32_t v = 0; v < c.num_nodes(); ++v) {
            ++expect[g.label(static_cast<std::uint32_t>(c.node_name(v)))];
        }
        CHECK(c.label_histogram() == expect);
    }
}

TEST_CASE("degree_sequence basics") {
    CHECK(degree_sequence(testutil::complete_graph(3)).degrees == std::vector<std::uint32_t>{2, 2, 2});
    CHECK(degree_sequence(testutil::path_graph(4)).degrees == std::vector<std::uint32_t>{1, 2, 2, 1});

    testutil::EdgeList star = {{0, 1}, {0, 2}, {0, 3}, {0, 4}};
    auto g = LabeledGraph::from_edges(5, star, std::vector<std::uint32_t>(5, 0), 1);
    CHECK(degree_sequence(g).degrees == std::vector<std::uint32_t>{4, 1, 1, 1, 1});

    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto r = testutil::random_graph(40, 0.1, 2, seed);
        std::size_t total = 0;
        for (auto d : degree_sequence(r).degrees) total += d;
        CHECK(total == 2 * r.num_edges());
    }
}

TEST_CASE("save/load round trip preserves structure") {
    TempDir tmp;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        // restrict to the LCC: the edge-list format cannot carry isolated nodes
        auto g = lcc(testutil::random_graph(50, 0.08, 3, seed));
        save_edge_list(g, tmp.file("e.txt"), tmp.file("l.txt"));
        auto [h, report] = load_edge_list(tmp.file("e.txt"), tmp.file("l.txt"));
        CHECK(h.num_nodes() == g.num_nodes());
        CHECK(h.num_edges() == g.num_edges());
        CHECK(degree_multiset(h) == degree_multiset(g));
        CHECK(h.label_histogram() == g.label_histogram());
    }
}

TEST_CASE("save rejects empty edge sets") {
    TempDir tmp;
    LabeledGraph g;
    CHECK_THROWS_AS(save_edge_list(g, tmp.file("e.txt"), tmp.file("l.txt")), ConfigError);
}

TEST_CASE("dataset fixtures reproduce the published LCC sizes") {
    struct Row {
        const char* dir;
        std::size_t n, e;
        std::uint32_t k;
    };
    const Row rows[] = {
        {"data/enron", 154, 1843, 3},
        {"data/eucore-top", 348, 3342, 5},
        {"data/cora-ml", 2810, 7981, 7},
    };
    for (const Row& row : rows) {
        CAPTURE(row.dir);
        auto [g, report] = load_edge_list(std::string(row.dir) + "/edges.txt", std::string(row.dir) + "/labels.txt");
        LabeledGraph c = lcc(g);
        CHECK(c.num_nodes() == row.n);
        CHECK(c.num_edges() == row.e);
        CHECK(c.num_labels() == row.k);
        std::set<std::uint32_t> present(c.labels().begin(), c.labels().end());
        CHECK(present.size() == row.k);
    }
}

TEST_CASE("enron load-save-load keeps statistics") {
    TempDir tmp;
    auto [g, r1] = load_edge_list("data/enron/edges.txt", "data/enron/labels.txt");
    LabeledGraph c = lcc(g);
    save_edge_list(c, tmp.file("e.txt"), tmp.file("l.txt"));
    auto [h, r2] = load_edge_list(tmp.file("e.txt"), tmp.file("l.txt"));
    CHECK(h.num_nodes() == c.num_nodes());
    CHECK(h.num_edges() == c.num_edges());
    CHECK(degree_multiset(h) == degree_multiset(c));
    CHECK(h.label_histogram() == c.label_histogram());
}
