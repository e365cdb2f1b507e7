#include "shadowcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "shadowcast/error.hpp"
#include "shadowcast/rng.hpp"

namespace shadowcast {

namespace {

std::optional<double> assortativity(const LabeledGraph& g) {
    // Pearson correlation of endpoint degrees over all edges, both orientations.
    double sx = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::uint32_t u = 0; u < g.num_nodes(); ++u) {
        const double du = static_cast<double>(g.degree(u));
        for (std::uint32_t v : g.neighbors(u)) {
            const double dv = static_cast<double>(g.degree(v));
            sx += du;
            sxx += du * du;
            sxy += du * dv;
            ++m;
        }
    }
    if (m == 0) return std::nullopt;
    const double n = static_cast<double>(m);
    const double mean = sx / n;
    const double var = sxx / n - mean * mean;
    const double cov = sxy / n - mean * mean;
    if (var <= 1e-12) return std::nullopt;  // degree-constant graph: undefined
    return cov / var;
}

// Exact triangle count via sorted-neighbor intersection per edge.
std::uint64_t triangle_count(const LabeledGraph& g) {
    std::uint64_t three_tc = 0;
    for (std::uint32_t u = 0; u < g.num_nodes(); ++u) {
        const auto& nu = g.neighbors(u);
        for (std::uint32_t v : nu) {
            if (v <= u) continue;
            const auto& nv = g.neighbors(v);
            auto a = nu.begin();
            auto b = nv.begin();
            while (a != nu.end() && b != nv.end()) {
                if (*a < *b) {
                    ++a;
                } else if (*b < *a) {
                    ++b;
                } else {
                    ++three_tc;
                    ++a;
                    ++b;
                }
            }
        }
    }
    return three_tc / 3;
}

// Independent route: closed wedges counted node by node. Equals 3 * TC.
std::uint64_t closed_wedge_count(const LabeledGraph& g) {
    std::uint64_t closed = 0;
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) {
        const auto& nv = g.neighbors(v);
        for (std::size_t i = 0; i < nv.size(); ++i) {
            for (std::size_t j = i + 1; j < nv.size(); ++j) {
                if (g.has_edge(nv[i], nv[j])) ++closed;
            }
        }
    }
    return closed;
}

// Mean shortest-path length over unordered connected pairs (BFS from every node).
double characteristic_path_length(const LabeledGraph& g) {
    const std::size_t n = g.num_nodes();
    double total = 0.0;
    std::uint64_t pairs = 0;
    std::vector<std::int32_t> dist(n);
    std::vector<std::uint32_t> frontier;
    for (std::uint32_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[s] = 0;
        frontier.assign(1, s);
        std::int32_t d = 0;
        while (!frontier.empty()) {
            std::vector<std::uint32_t> next;
            ++d;
            for (std::uint32_t u : frontier) {
                for (std::uint32_t v : g.neighbors(u)) {
                    if (dist[v] < 0) {
                        dist[v] = d;
                        next.push_back(v);
                        total += d;
                        ++pairs;
                    }
                }
            }
            frontier.swap(next);
        }
    }
    if (pairs == 0) return 0.0;
    return total / static_cast<double>(pairs);  // ordered-pair mean == unordered-pair mean
}

double gini_index(const std::vector<std::uint32_t>& degrees) {
    // mean absolute difference form, computed literally
    const std::size_t n = degrees.size();
    if (n == 0) return 0.0;
    double sum = 0.0;
    for (std::uint32_t d : degrees) sum += d;
    if (sum == 0.0) return 0.0;
    double mad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double di = degrees[i];
        for (std::size_t j = 0; j < n; ++j) mad += std::abs(di - static_cast<double>(degrees[j]));
    }
    const double mean_deg = sum / static_cast<double>(n);
    return mad / (2.0 * static_cast<double>(n) * static_cast<double>(n) * mean_deg);
}

}  // namespace

GraphStats stats(const LabeledGraph& g) {
    GraphStats out;
    const std::size_t n = g.num_nodes();
    if (n == 0) throw ConfigError("stats of empty graph");

    std::vector<std::uint32_t> degrees;
    degrees.reserve(n);
    double wedges = 0.0;
    for (std::uint32_t v = 0; v < n; ++v) {
        const auto d = static_cast<std::uint32_t>(g.degree(v));
        degrees.push_back(d);
        wedges += 0.5 * static_cast<double>(d) * static_cast<double>(d - (d > 0 ? 1 : 0));
        out.md = std::max(out.md, d);
    }

    out.tc = triangle_count(g);
    if (wedges > 0.0) {
        const double a = 3.0 * static_cast<double>(out.tc) / wedges;
        const double b = static_cast<double>(closed_wedge_count(g)) / wedges;
        if (std::abs(a - b) > 1e-12) throw NumericFault("clustering coefficient identity violated");
        out.clust = a;
    }

    out.asst = assortativity(g);
    out.gini = gini_index(degrees);

    if (g.connected()) {
        out.cpl = characteristic_path_length(g);
    } else {
        out.cpl = characteristic_path_length(lcc(g));
        out.cpl_on_lcc = true;
    }
    return out;
}

LabelMixStats label_mix(const LabeledGraph& g) {
    const std::uint32_t k = g.num_labels();
    LabelMixStats out;
    out.intra_fraction.assign(k, 0.0);
    out.inter_matrix.assign(k, std::vector<double>(k, 0.0));
    const auto edges = g.edges();
    if (edges.empty()) return out;
    const double e = static_cast<double>(edges.size());
    for (auto [u, v] : edges) {
        const std::uint32_t a = g.label(u);
        const std::uint32_t b = g.label(v);
        if (a == b) {
            out.intra_fraction[a] += 1.0;
            out.inter_matrix[a][b] += 1.0;
        } else {
            out.inter_matrix[a][b] += 0.5;
            out.inter_matrix[b][a] += 0.5;
        }
    }
    for (auto& x : out.intra_fraction) x /= e;
    for (auto& row : out.inter_matrix) {
        for (auto& x : row) x /= e;
    }
    return out;
}

StatsDiff compare(const GraphStats& real, const GraphStats& generated) {
    StatsDiff d;
    if (real.asst && generated.asst) d.asst = std::abs(*real.asst - *generated.asst);
    d.clust = std::abs(real.clust - generated.clust);
    d.cpl = std::abs(real.cpl - generated.cpl);
    d.gini = std::abs(real.gini - generated.gini);
    d.md = std::abs(static_cast<double>(real.md) - static_cast<double>(generated.md));
    d.tc = std::abs(static_cast<double>(real.tc) - static_cast<double>(generated.tc));
    return d;
}

RewireResult random_rewire_baseline(const LabeledGraph& g, std::uint32_t label, double move_fraction,
                                    std::uint64_t seed) {
    if (label >= g.num_labels()) throw ConfigError("rewire label out of range");
    if (move_fraction < 0.0 || move_fraction > 1.0) throw ConfigError("move_fraction must be in [0,1]");

    auto edges = g.edges();
    std::vector<std::size_t> inter_idx;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto [u, v] = edges[i];
        const bool touches = g.label(u) == label || g.label(v) == label;
        if (touches && g.label(u) != g.label(v)) inter_idx.push_back(i);
    }
    const auto requested = static_cast<std::size_t>(std::llround(move_fraction * static_cast<double>(inter_idx.size())));

    // candidate intra-label non-edges
    std::vector<std::uint32_t> members;
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) {
        if (g.label(v) == label) members.push_back(v);
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> non_edges;
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            if (!g.has_edge(members[i], members[j])) non_edges.emplace_back(members[i], members[j]);
        }
    }

    Rng rng = Rng::stream(seed, 0, /*tag=*/0x7e);
    const std::size_t moved = std::min(requested, non_edges.size());

    // pick edges to drop and pairs to add, both without replacement
    for (std::size_t i = 0; i + 1 < inter_idx.size(); ++i) {
        std::size_t j = i + rng.uniform_int(inter_idx.size() - i);
        std::swap(inter_idx[i], inter_idx[j]);
    }
    for (std::size_t i = 0; i + 1 < non_edges.size(); ++i) {
        std::size_t j = i + rng.uniform_int(non_edges.size() - i);
        std::swap(non_edges[i], non_edges[j]);
    }

    std::vector<char> drop(edges.size(), 0);
    for (std::size_t i = 0; i < moved; ++i) drop[inter_idx[i]] = 1;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out_edges;
    out_edges.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (!drop[i]) out_edges.push_back(edges[i]);
    }
    for (std::size_t i = 0; i < moved; ++i) out_edges.push_back(non_edges[i]);

    LabeledGraph rewired = LabeledGraph::from_edges(g.num_nodes(), out_edges, g.labels(), g.num_labels());
    return {std::move(rewired), requested, moved};
}

}  // namespace shadowcast
