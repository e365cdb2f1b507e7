#include "shadowcast/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "shadowcast/error.hpp"

namespace shadowcast {

namespace {

struct RawPairs {
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
};

std::int64_t parse_id(const std::string& token, const std::string& path, std::size_t line_no) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || value < 0) {
        throw IngestError(path + ":" + std::to_string(line_no) + ": expected non-negative integer, got '" +
                          token + "'");
    }
    return value;
}

// Reads "a b" pair lines; '#' starts a comment, blank lines are skipped.
RawPairs read_pair_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    RawPairs out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string a, b, extra;
        if (!(ss >> a)) continue;
        if (!(ss >> b) || (ss >> extra)) {
            throw IngestError(path + ":" + std::to_string(line_no) + ": expected two tokens per line");
        }
        out.pairs.emplace_back(parse_id(a, path, line_no), parse_id(b, path, line_no));
    }
    return out;
}

}  // namespace

LabeledGraph LabeledGraph::from_edges(std::size_t num_nodes,
                                      const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                                      std::vector<std::uint32_t> labels, std::uint32_t num_labels) {
    if (labels.size() != num_nodes) {
        throw ConfigError("label count " + std::to_string(labels.size()) + " != node count " +
                          std::to_string(num_nodes));
    }
    if (num_labels == 0) throw ConfigError("num_labels must be >= 1");
    for (std::uint32_t k : labels) {
        if (k >= num_labels) throw ConfigError("label " + std::to_string(k) + " out of range");
    }
    LabeledGraph g;
    g.adj_.assign(num_nodes, {});
    for (auto [u, v] : edges) {
        if (u == v) throw ConfigError("self-loop at node " + std::to_string(u));
        if (u >= num_nodes || v >= num_nodes) throw ConfigError("edge endpoint out of range");
        g.adj_[u].push_back(v);
        g.adj_[v].push_back(u);
    }
    for (auto& nbrs : g.adj_) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    std::size_t total = 0;
    for (const auto& nbrs : g.adj_) total += nbrs.size();
    g.num_edges_ = total / 2;
    g.labels_ = std::move(labels);
    g.num_labels_ = num_labels;
    g.node_names_.resize(num_nodes);
    for (std::size_t i = 0; i < num_nodes; ++i) g.node_names_[i] = static_cast<std::int64_t>(i);
    g.label_names_.resize(num_labels);
    for (std::uint32_t k = 0; k < num_labels; ++k) g.label_names_[k] = k;
    return g;
}

bool LabeledGraph::has_edge(std::uint32_t u, std::uint32_t v) const {
    const auto& nbrs = adj_[u];
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> LabeledGraph::edges() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    out.reserve(num_edges_);
    for (std::uint32_t u = 0; u < adj_.size(); ++u) {
        for (std::uint32_t v : adj_[u]) {
            if (u < v) out.emplace_back(u, v);
        }
    }
    return out;
}

std::vector<std::uint32_t> LabeledGraph::label_histogram() const {
    std::vector<std::uint32_t> hist(num_labels_, 0);
    for (std::uint32_t k : labels_) ++hist[k];
    return hist;
}

bool LabeledGraph::connected() const {
    if (adj_.empty()) return false;
    std::vector<char> seen(adj_.size(), 0);
    std::queue<std::uint32_t> q;
    q.push(0);
    seen[0] = 1;
    std::size_t count = 1;
    while (!q.empty()) {
        std::uint32_t u = q.front();
        q.pop();
        for (std::uint32_t v : adj_[u]) {
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                q.push(v);
            }
        }
    }
    return count == adj_.size();
}

IngestResult load_edge_list(const std::string& edge_path, const std::string& label_path) {
    RawPairs raw_edges = read_pair_file(edge_path);
    RawPairs raw_labels = read_pair_file(label_path);

    IngestReport report;

    // contiguous internal ids in ascending original-id order
    std::vector<std::int64_t> names;
    names.reserve(raw_edges.pairs.size() * 2);
    for (auto [u, v] : raw_edges.pairs) {
        if (u == v) continue;
        names.push_back(u);
        names.push_back(v);
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    if (names.empty()) throw IngestError(edge_path + ": no edges found");

    std::unordered_map<std::int64_t, std::uint32_t> to_internal;
    to_internal.reserve(names.size());
    for (std::uint32_t i = 0; i < names.size(); ++i) to_internal.emplace(names[i], i);

    const std::size_t n = names.size();
    std::vector<std::vector<std::uint32_t>> adj(n);
    std::size_t kept = 0;
    for (auto [a, b] : raw_edges.pairs) {
        if (a == b) {
            ++report.self_loops_dropped;
            continue;
        }
        std::uint32_t u = to_internal[a];
        std::uint32_t v = to_internal[b];
        adj[u].push_back(v);
        adj[v].push_back(u);
        ++kept;
    }
    for (auto& nbrs : adj) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    std::size_t total_deg = 0;
    for (const auto& nbrs : adj) total_deg += nbrs.size();
    const std::size_t num_edges = total_deg / 2;
    report.duplicates_dropped = kept - num_edges;

    // labels keyed by original node id; values remapped by ascending original value
    std::unordered_map<std::int64_t, std::int64_t> label_of;
    label_of.reserve(raw_labels.pairs.size());
    for (auto [u, k] : raw_labels.pairs) label_of[u] = k;

    std::vector<std::int64_t> label_values;
    for (std::int64_t name : names) {
        auto it = label_of.find(name);
        if (it == label_of.end()) {
            throw IngestError(label_path + ": missing label for node " + std::to_string(name));
        }
        label_values.push_back(it->second);
    }
    std::vector<std::int64_t> label_names = label_values;
    std::sort(label_names.begin(), label_names.end());
    label_names.erase(std::unique(label_names.begin(), label_names.end()), label_names.end());
    std::map<std::int64_t, std::uint32_t> label_to_internal;
    for (std::uint32_t k = 0; k < label_names.size(); ++k) label_to_internal.emplace(label_names[k], k);

    LabeledGraph g;
    g.adj_ = std::move(adj);
    g.num_edges_ = num_edges;
    g.node_names_ = std::move(names);
    g.labels_.reserve(n);
    for (std::int64_t v : label_values) g.labels_.push_back(label_to_internal[v]);
    g.label_names_ = std::move(label_names);
    g.num_labels_ = static_cast<std::uint32_t>(g.label_names_.size());

    report.nodes = g.num_nodes();
    report.edges = g.num_edges();
    report.k = g.num_labels();
    report.label_histogram = g.label_histogram();
    return {std::move(g), std::move(report)};
}

LabeledGraph lcc(const LabeledGraph& g) {
    const std::size_t n = g.num_nodes();
    if (n == 0) throw ConfigError("lcc of empty graph");
    std::vector<std::int32_t> comp(n, -1);
    std::int32_t num_comp = 0;
    for (std::uint32_t s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        comp[s] = num_comp;
        std::queue<std::uint32_t> q;
        q.push(s);
        while (!q.empty()) {
            std::uint32_t u = q.front();
            q.pop();
            for (std::uint32_t v : g.adj_[u]) {
                if (comp[v] < 0) {
                    comp[v] = num_comp;
                    q.push(v);
                }
            }
        }
        ++num_comp;
    }

    std::vector<std::size_t> size(num_comp, 0);
    std::vector<std::int64_t> min_name(num_comp, INT64_MAX);
    for (std::uint32_t v = 0; v < n; ++v) {
        ++size[comp[v]];
        min_name[comp[v]] = std::min(min_name[comp[v]], g.node_names_[v]);
    }
    std::int32_t best = 0;
    for (std::int32_t c = 1; c < num_comp; ++c) {
        if (size[c] > size[best] || (size[c] == size[best] && min_name[c] < min_name[best])) best = c;
    }

    std::vector<std::uint32_t> old_to_new(n, UINT32_MAX);
    std::vector<std::uint32_t> kept;
    for (std::uint32_t v = 0; v < n; ++v) {
        if (comp[v] == best) {
            old_to_new[v] = static_cast<std::uint32_t>(kept.size());
            kept.push_back(v);
        }
    }

    LabeledGraph out;
    out.adj_.resize(kept.size());
    for (std::uint32_t nv = 0; nv < kept.size(); ++nv) {
        for (std::uint32_t w : g.adj_[kept[nv]]) out.adj_[nv].push_back(old_to_new[w]);
        std::sort(out.adj_[nv].begin(), out.adj_[nv].end());
    }
    std::size_t total = 0;
    for (const auto& nbrs : out.adj_) total += nbrs.size();
    out.num_edges_ = total / 2;
    out.labels_.reserve(kept.size());
    out.node_names_.reserve(kept.size());
    for (std::uint32_t v : kept) {
        out.labels_.push_back(g.labels_[v]);
        out.node_names_.push_back(g.node_names_[v]);
    }
    out.label_names_ = g.label_names_;
    out.num_labels_ = g.num_labels_;
    return out;
}

DegreeSequence degree_sequence(const LabeledGraph& g) {
    DegreeSequence ds;
    ds.degrees.reserve(g.num_nodes());
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) ds.degrees.push_back(static_cast<std::uint32_t>(g.degree(v)));
    return ds;
}

void save_edge_list(const LabeledGraph& g, const std::string& edge_path, const std::string& label_path,
                    const std::string& comment) {
    if (g.num_edges() == 0) throw ConfigError("refusing to save a graph with no edges");
    std::ofstream ef(edge_path);
    if (!ef) throw IoError("cannot write " + edge_path);
    std::ofstream lf(label_path);
    if (!lf) throw IoError("cannot write " + label_path);
    if (!comment.empty()) {
        ef << "# " << comment << "\n";
        lf << "# " << comment << "\n";
    }
    for (auto [u, v] : g.edges()) ef << g.node_name(u) << " " << g.node_name(v) << "\n";
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) lf << g.node_name(v) << " " << g.label(v) << "\n";
    if (!ef || !lf) throw IoError("short write to " + edge_path + " or " + label_path);
}

}  // namespace shadowcast
