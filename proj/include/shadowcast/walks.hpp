#ifndef SHADOWCAST_WALKS_HPP
#define SHADOWCAST_WALKS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "shadowcast/graph.hpp"
#include "shadowcast/rng.hpp"
#include "shadowcast/tensor.hpp"

namespace shadowcast {

struct WalkConfig {
    std::size_t walk_length = 16;  // T
    std::size_t batch_size = 128;  // m
    double p = 1.0;                // return parameter
    double q = 1.0;                // in-out parameter
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// Batch of node walks with the aligned label (shadow) walks.
struct WalkBatch {
    std::size_t m = 0;
    std::size_t t = 0;
    std::vector<std::uint32_t> nodes;   // m x t, row-major
    std::vector<std::uint32_t> labels;  // m x t, labels[i][s] = label of nodes[i][s]

    std::uint32_t node(std::size_t i, std::size_t s) const { return nodes[i * t + s]; }
    std::uint32_t label(std::size_t i, std::size_t s) const { return labels[i * t + s]; }
};

/// Biased second-order random walks. Start node uniform, first step uniform
/// over neighbors, then node2vec weights: 1/p to return, 1 to a neighbor of
/// the previous node, 1/q otherwise. Each walk runs on its own RNG stream
/// derived from (seed, walk index), so sharded sampling is identical to
/// serial.
WalkBatch sample_walks(const LabeledGraph& g, const WalkConfig& cfg, std::size_t threads = 1);

/// One walk of length t appended via `out`; exposed for tests.
void sample_one_walk(const LabeledGraph& g, std::size_t t, double p, double q, Rng& rng,
                     std::vector<std::uint32_t>& out);

/// One-hot encodings: (m x t x n) node tensor and (m x t x k) label tensor.
std::pair<Tensor, Tensor> to_one_hot(const WalkBatch& batch, std::size_t n, std::size_t k);

}  // namespace shadowcast

#endif
