#ifndef SHADOWCAST_GRAPH_HPP
#define SHADOWCAST_GRAPH_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace shadowcast {

struct IngestResult;

/// Undirected simple graph with one class label per node.
///
/// Internal node ids are contiguous 0..N-1; the original file ids are kept in
/// node_names. Labels are contiguous 0..K-1; the original label values are
/// kept in label_names. Immutable after construction, safe to share across
/// threads read-only.
class LabeledGraph {
  public:
    LabeledGraph() = default;

    // Validating constructor; edges are internal-id pairs, deduplicated here.
    // Self-loops are rejected (file ingestion drops them before reaching this).
    static LabeledGraph from_edges(std::size_t num_nodes,
                                   const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                                   std::vector<std::uint32_t> labels, std::uint32_t num_labels);

    std::size_t num_nodes() const { return adj_.size(); }
    std::size_t num_edges() const { return num_edges_; }
    std::uint32_t num_labels() const { return num_labels_; }

    const std::vector<std::uint32_t>& neighbors(std::uint32_t v) const { return adj_[v]; }
    std::size_t degree(std::uint32_t v) const { return adj_[v].size(); }
    bool has_edge(std::uint32_t u, std::uint32_t v) const;

    std::uint32_t label(std::uint32_t v) const { return labels_[v]; }
    const std::vector<std::uint32_t>& labels() const { return labels_; }

    std::int64_t node_name(std::uint32_t v) const { return node_names_[v]; }
    const std::vector<std::int64_t>& node_names() const { return node_names_; }
    std::int64_t label_name(std::uint32_t k) const { return label_names_[k]; }

    // Unordered edge list with u < v, sorted lexicographically.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const;

    std::vector<std::uint32_t> label_histogram() const;
    bool connected() const;

    friend LabeledGraph lcc(const LabeledGraph& g);
    friend IngestResult load_edge_list(const std::string& edge_path, const std::string& label_path);

  private:
    std::vector<std::vector<std::uint32_t>> adj_;
    std::vector<std::uint32_t> labels_;
    std::vector<std::int64_t> node_names_;
    std::vector<std::int64_t> label_names_;
    std::uint32_t num_labels_ = 0;
    std::size_t num_edges_ = 0;
};

struct DegreeSequence {
    std::vector<std::uint32_t> degrees;
};

struct IngestReport {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t self_loops_dropped = 0;
    std::size_t duplicates_dropped = 0;
    std::uint32_t k = 0;
    std::vector<std::uint32_t> label_histogram;
};

struct IngestResult {
    LabeledGraph graph;
    IngestReport report;
};

/// Load a graph from "u v" edge lines and "u k" label lines.
///
/// Node and label ids in the files may be arbitrary non-negative integers;
/// both are remapped to contiguous ids in ascending original order. '#' starts
/// a comment. Duplicate and reversed edges are deduplicated, self-loops
/// dropped and counted. Every node referenced by an edge must have a label;
/// label lines for nodes absent from the edge list are ignored.
IngestResult load_edge_list(const std::string& edge_path, const std::string& label_path);

/// Induced subgraph on the largest connected component, re-indexed
/// contiguously. Ties between equal-size components go to the one containing
/// the smallest original node id. Label space is preserved.
LabeledGraph lcc(const LabeledGraph& g);

DegreeSequence degree_sequence(const LabeledGraph& g);

/// Write "u v" edge lines and "u k" label lines using original node ids.
/// Rejects graphs with no edges. An optional comment is emitted as a '#'
/// header on both files.
void save_edge_list(const LabeledGraph& g, const std::string& edge_path, const std::string& label_path,
                    const std::string& comment = "");

}  // namespace shadowcast

#endif
