#ifndef SHADOWCAST_ASSEMBLY_HPP
#define SHADOWCAST_ASSEMBLY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace shadowcast {

/// Sparse edge-visit counts accumulated from walks. Directed while
/// accumulating; symmetrize() max-merges the two directions into u < v keys.
struct ScoreMatrix {
    std::size_t n = 0;
    bool symmetric = false;
    std::unordered_map<std::uint64_t, std::uint64_t> counts;

    static ScoreMatrix empty(std::size_t n);
    static std::uint64_t key(std::uint32_t u, std::uint32_t v, std::size_t n) {
        return static_cast<std::uint64_t>(u) * n + v;
    }
    std::uint64_t at(std::uint32_t u, std::uint32_t v) const;
    std::size_t nonzeros() const { return counts.size(); }
};

/// Count every consecutive pair of one walk; self-transitions are dropped.
void accumulate_walk(ScoreMatrix& s, std::span<const std::uint32_t> walk);

/// Count a whole batch given as m rows of length t.
ScoreMatrix accumulate(std::size_t n, std::span<const std::uint32_t> walks_flat, std::size_t t);

/// s_ij = s_ji = max(s_ij, s_ji); idempotent.
ScoreMatrix symmetrize(const ScoreMatrix& s);

enum class BinarizeStrategy { probabilistic, threshold, top_k };

struct BinarizeResult {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    bool target_met = true;
    std::string warning;
};

/// Turn a symmetric score matrix into a simple edge set of (up to)
/// target_edges edges.
///
/// The probabilistic strategy runs two stages: first every node with a
/// nonzero score draws one incident edge proportionally to its scores (no
/// node is left as a singleton), then remaining edges are drawn without
/// replacement proportionally to scores until the target is reached. When
/// stage one overshoots the target, lowest-score edges whose removal keeps
/// all scored nodes covered are trimmed (uniformly at random among ties).
///
/// threshold keeps pairs with score >= target-implied cutoff so that about
/// target_edges survive; top_k takes the target_edges highest scores.
BinarizeResult binarize(const ScoreMatrix& s, std::size_t target_edges, std::uint64_t seed,
                        BinarizeStrategy strategy = BinarizeStrategy::probabilistic);

/// Text dump, one "i j count" line per pair, lexicographically sorted.
void dump_scores(const ScoreMatrix& s, const std::string& path, const std::string& comment = "");

}  // namespace shadowcast

#endif
