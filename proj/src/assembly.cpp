#include "shadowcast/assembly.hpp"

#include <algorithm>
#include <fstream>

#include "shadowcast/error.hpp"
#include "shadowcast/rng.hpp"

namespace shadowcast {

namespace {

// Fenwick tree over nonnegative weights for O(log n) sampling without replacement.
class WeightTree {
  public:
    explicit WeightTree(const std::vector<double>& weights) : tree_(weights.size() + 1, 0.0) {
        for (std::size_t i = 0; i < weights.size(); ++i) add(i, weights[i]);
    }

    void add(std::size_t i, double delta) {
        for (std::size_t x = i + 1; x < tree_.size(); x += x & (~x + 1)) tree_[x] += delta;
    }

    double total() const {
        double sum = 0.0;
        for (std::size_t x = tree_.size() - 1; x > 0; x -= x & (~x + 1)) sum += tree_[x];
        return sum;
    }

    // smallest index with prefix sum > target
    std::size_t find(double target) const {
        std::size_t pos = 0;
        std::size_t mask = 1;
        while (mask * 2 < tree_.size()) mask *= 2;
        for (; mask > 0; mask /= 2) {
            const std::size_t next = pos + mask;
            if (next < tree_.size() && tree_[next] <= target) {
                target -= tree_[next];
                pos = next;
            }
        }
        return pos;  // 0-based element index
    }

  private:
    std::vector<double> tree_;
};

}  // namespace

ScoreMatrix ScoreMatrix::empty(std::size_t n) {
    ScoreMatrix s;
    s.n = n;
    return s;
}

std::uint64_t ScoreMatrix::at(std::uint32_t u, std::uint32_t v) const {
    auto it = counts.find(key(u, v, n));
    return it == counts.end() ? 0 : it->second;
}

void accumulate_walk(ScoreMatrix& s, std::span<const std::uint32_t> walk) {
    for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
        const std::uint32_t u = walk[i];
        const std::uint32_t v = walk[i + 1];
        if (u == v) continue;
        if (u >= s.n || v >= s.n) throw ConfigError("walk index out of range in accumulate");
        ++s.counts[ScoreMatrix::key(u, v, s.n)];
    }
}

ScoreMatrix accumulate(std::size_t n, std::span<const std::uint32_t> walks_flat, std::size_t t) {
    ScoreMatrix s = ScoreMatrix::empty(n);
    if (t < 2) throw ConfigError("walks must have length >= 2");
    for (std::size_t off = 0; off + t <= walks_flat.size(); off += t) {
        accumulate_walk(s, walks_flat.subspan(off, t));
    }
    return s;
}

ScoreMatrix symmetrize(const ScoreMatrix& s) {
    ScoreMatrix out = ScoreMatrix::empty(s.n);
    out.symmetric = true;
    out.counts.reserve(s.counts.size());
    for (const auto& [k, c] : s.counts) {
        const auto u = static_cast<std::uint32_t>(k / s.n);
        const auto v = static_cast<std::uint32_t>(k % s.n);
        const std::uint64_t kk = u < v ? ScoreMatrix::key(u, v, s.n) : ScoreMatrix::key(v, u, s.n);
        auto& slot = out.counts[kk];
        slot = std::max(slot, c);
    }
    return out;
}

BinarizeResult binarize(const ScoreMatrix& s, std::size_t target_edges, std::uint64_t seed,
                        BinarizeStrategy strategy) {
    if (!s.symmetric) throw ConfigError("binarize requires a symmetrized score matrix");
    if (s.counts.empty()) throw ConfigError("binarize: score matrix is all zero");
    if (target_edges == 0) throw ConfigError("binarize: target_edges must be >= 1");

    // deterministic pair order
    struct Pair {
        std::uint32_t u, v;
        std::uint64_t count;
    };
    std::vector<Pair> pairs;
    pairs.reserve(s.counts.size());
    for (const auto& [k, c] : s.counts) {
        if (c == 0) continue;
        pairs.push_back({static_cast<std::uint32_t>(k / s.n), static_cast<std::uint32_t>(k % s.n), c});
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return a.u != b.u ? a.u < b.u : a.v < b.v;
    });
    if (pairs.empty()) throw ConfigError("binarize: score matrix is all zero");

    BinarizeResult result;
    auto emit = [&](const std::vector<char>& selected) {
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (selected[i]) result.edges.emplace_back(pairs[i].u, pairs[i].v);
        }
    };

    if (strategy == BinarizeStrategy::top_k) {
        std::vector<std::size_t> order(pairs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return pairs[a].count != pairs[b].count ? pairs[a].count > pairs[b].count : a < b;
        });
        std::vector<char> selected(pairs.size(), 0);
        for (std::size_t i = 0; i < std::min(target_edges, order.size()); ++i) selected[order[i]] = 1;
        if (order.size() < target_edges) {
            result.target_met = false;
            result.warning = "fewer scored pairs than target";
        }
        emit(selected);
        return result;
    }

    if (strategy == BinarizeStrategy::threshold) {
        // largest cutoff keeping at least target_edges pairs; ties all included
        std::vector<std::uint64_t> counts;
        counts.reserve(pairs.size());
        for (const auto& p : pairs) counts.push_back(p.count);
        std::sort(counts.begin(), counts.end(), std::greater<>());
        const std::uint64_t cutoff = counts[std::min(target_edges, counts.size()) - 1];
        std::vector<char> selected(pairs.size(), 0);
        for (std::size_t i = 0; i < pairs.size(); ++i) selected[i] = pairs[i].count >= cutoff;
        if (counts.size() < target_edges) {
            result.target_met = false;
            result.warning = "fewer scored pairs than target";
        }
        emit(selected);
        return result;
    }

    // probabilistic two-stage strategy
    std::vector<std::vector<std::size_t>> incident(s.n);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        incident[pairs[i].u].push_back(i);
        incident[pairs[i].v].push_back(i);
    }

    Rng rng = Rng::stream(seed, 0, /*tag=*/0xb1);
    std::vector<char> selected(pairs.size(), 0);
    std::vector<std::size_t> sel_deg(s.n, 0);
    std::size_t sel_count = 0;

    auto select = [&](std::size_t i) {
        if (selected[i]) return;
        selected[i] = 1;
        ++sel_count;
        ++sel_deg[pairs[i].u];
        ++sel_deg[pairs[i].v];
    };

    // stage 1: every scored node draws one incident edge
    std::vector<double> weights;
    for (std::uint32_t v = 0; v < s.n; ++v) {
        if (incident[v].empty()) continue;
        weights.clear();
        for (std::size_t i : incident[v]) weights.push_back(static_cast<double>(pairs[i].count));
        select(incident[v][rng.categorical(weights)]);
    }

    // stage 1 may overshoot small targets; trim lowest-score edges that keep
    // every covered node covered
    while (sel_count > target_edges) {
        std::uint64_t min_count = UINT64_MAX;
        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (!selected[i]) continue;
            if (sel_deg[pairs[i].u] < 2 || sel_deg[pairs[i].v] < 2) continue;
            if (pairs[i].count < min_count) {
                min_count = pairs[i].count;
                candidates.clear();
            }
            if (pairs[i].count == min_count) candidates.push_back(i);
        }
        if (candidates.empty()) {
            result.warning = "node coverage requires more than target_edges edges";
            result.target_met = false;
            break;
        }
        const std::size_t drop = candidates[rng.uniform_int(candidates.size())];
        selected[drop] = 0;
        --sel_count;
        --sel_deg[pairs[drop].u];
        --sel_deg[pairs[drop].v];
    }

    // stage 2: fill proportionally to scores, without replacement
    if (sel_count < target_edges) {
        std::vector<double> w(pairs.size(), 0.0);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (!selected[i]) w[i] = static_cast<double>(pairs[i].count);
        }
        WeightTree tree(w);
        const std::size_t attainable = std::min(target_edges, pairs.size());
        while (sel_count < attainable) {
            const double total = tree.total();
            if (total <= 0.0) break;
            const std::size_t i = tree.find(rng.uniform() * total);
            tree.add(i, -w[i]);
            w[i] = 0.0;
            select(i);
        }
        if (sel_count < target_edges) {
            result.target_met = false;
            result.warning = "scores exhausted before reaching target_edges";
        }
    }

    emit(selected);
    return result;
}

void dump_scores(const ScoreMatrix& s, const std::string& path, const std::string& comment) {
    std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>> rows;
    rows.reserve(s.counts.size());
    for (const auto& [k, c] : s.counts) {
        rows.emplace_back(static_cast<std::uint32_t>(k / s.n), static_cast<std::uint32_t>(k % s.n), c);
    }
    std::sort(rows.begin(), rows.end());
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    if (!comment.empty()) out << "# " << comment << "\n";
    for (const auto& [u, v, c] : rows) out << u << " " << v << " " << c << "\n";
    if (!out) throw IoError("short write to " + path);
}

}  // namespace shadowcast
