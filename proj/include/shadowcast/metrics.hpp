#ifndef SHADOWCAST_METRICS_HPP
#define SHADOWCAST_METRICS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "shadowcast/graph.hpp"

namespace shadowcast {

/// The six headline statistics. asst is undefined (nullopt) on
/// degree-constant graphs rather than silently 0.
struct GraphStats {
    std::optional<double> asst;  // degree assortativity (Pearson over edge endpoints)
    double clust = 0.0;          // global clustering coefficient (transitivity)
    double cpl = 0.0;            // characteristic path length
    double gini = 0.0;           // Gini index of the degree sequence
    std::uint32_t md = 0;        // maximum degree
    std::uint64_t tc = 0;        // triangle count
    bool cpl_on_lcc = false;     // true when the input was disconnected and CPL used its LCC
};

struct LabelMixStats {
    std::vector<double> intra_fraction;             // per label: fraction of edges inside it
    std::vector<std::vector<double>> inter_matrix;  // symmetric, entries sum to 1
};

struct StatsDiff {
    std::optional<double> asst;  // nullopt when undefined on either side
    double clust = 0.0;
    double cpl = 0.0;
    double gini = 0.0;
    double md = 0.0;
    double tc = 0.0;
};

GraphStats stats(const LabeledGraph& g);
LabelMixStats label_mix(const LabeledGraph& g);
StatsDiff compare(const GraphStats& real, const GraphStats& generated);

/// Naive what-if baseline: remove a fraction of the inter-label edges incident
/// to `label` uniformly at random and add the same number of random new
/// intra-label pairs. Edge count is preserved; if not enough non-edges exist
/// inside the label the move is partial.
struct RewireResult {
    LabeledGraph graph;
    std::size_t requested = 0;
    std::size_t moved = 0;
};
RewireResult random_rewire_baseline(const LabeledGraph& g, std::uint32_t label, double move_fraction,
                                    std::uint64_t seed);

}  // namespace shadowcast

#endif
