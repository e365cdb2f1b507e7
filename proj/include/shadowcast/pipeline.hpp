#ifndef SHADOWCAST_PIPELINE_HPP
#define SHADOWCAST_PIPELINE_HPP

#include <cstdint>

#include "shadowcast/assembly.hpp"
#include "shadowcast/markov.hpp"
#include "shadowcast/model.hpp"

namespace shadowcast {

struct GenerationConfig {
    std::size_t walk_budget = 10000000;  // graph walks to generate
    std::size_t shadow_walks = 10000;    // condition sequences sampled from the chain
    std::size_t walk_length = 16;
    std::size_t target_edges = 0;  // 0: use the training graph's edge count
    std::uint64_t seed = 0;
    double tau = 1.0;
    BinarizeStrategy strategy = BinarizeStrategy::probabilistic;

    void validate() const;
};

struct GenerationResult {
    LabeledGraph graph;     // binarized generated graph, labels inherited
    ScoreMatrix scores;     // symmetrized edge-visit counts
    BinarizeResult bin;
    std::size_t walks_generated = 0;
};

/// Control chain -> caster -> generator -> score accumulation -> symmetrize
/// -> probabilistic binarization. Walks stream through the score matrix in
/// chunks, so memory stays bounded by the condition pool, not the walk
/// budget. Conditions cycle through the pool; noise is fresh per walk.
GenerationResult generate_graph(const Models& models, const LabeledGraph& training_graph,
                                const MarkovControl& control, const GenerationConfig& cfg);

}  // namespace shadowcast

#endif
