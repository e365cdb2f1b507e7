#include "shadowcast/walks.hpp"

#include <thread>

#include "shadowcast/error.hpp"

namespace shadowcast {

void WalkConfig::validate() const {
    if (walk_length < 2) throw ConfigError("walk_length must be >= 2");
    if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
    if (!(p > 0.0) || !(q > 0.0)) throw ConfigError("p and q must be > 0");
}

void sample_one_walk(const LabeledGraph& g, std::size_t t, double p, double q, Rng& rng,
                     std::vector<std::uint32_t>& out) {
    const auto n = static_cast<std::uint32_t>(g.num_nodes());
    std::uint32_t cur = static_cast<std::uint32_t>(rng.uniform_int(n));
    out.push_back(cur);

    const auto& first_nbrs = g.neighbors(cur);
    std::uint32_t prev = cur;
    cur = first_nbrs[rng.uniform_int(first_nbrs.size())];
    out.push_back(cur);

    std::vector<double> weights;
    for (std::size_t step = 2; step < t; ++step) {
        const auto& nbrs = g.neighbors(cur);
        weights.clear();
        for (std::uint32_t x : nbrs) {
            if (x == prev) {
                weights.push_back(1.0 / p);
            } else if (g.has_edge(prev, x)) {
                weights.push_back(1.0);
            } else {
                weights.push_back(1.0 / q);
            }
        }
        const std::uint32_t next = nbrs[rng.categorical(weights)];
        prev = cur;
        cur = next;
        out.push_back(cur);
    }
}

WalkBatch sample_walks(const LabeledGraph& g, const WalkConfig& cfg, std::size_t threads) {
    cfg.validate();
    for (std::uint32_t v = 0; v < g.num_nodes(); ++v) {
        if (g.degree(v) == 0) throw ConfigError("graph has an isolated node; run lcc() first");
    }

    WalkBatch batch;
    batch.m = cfg.batch_size;
    batch.t = cfg.walk_length;
    batch.nodes.resize(batch.m * batch.t);
    batch.labels.resize(batch.m * batch.t);

    auto run_range = [&](std::size_t lo, std::size_t hi) {
        std::vector<std::uint32_t> walk;
        for (std::size_t i = lo; i < hi; ++i) {
            Rng rng = Rng::stream(cfg.rng_seed, i, /*tag=*/0x11);
            walk.clear();
            sample_one_walk(g, batch.t, cfg.p, cfg.q, rng, walk);
            for (std::size_t s = 0; s < batch.t; ++s) {
                batch.nodes[i * batch.t + s] = walk[s];
                batch.labels[i * batch.t + s] = g.label(walk[s]);
            }
        }
    };

    if (threads <= 1 || batch.m < 2 * threads) {
        run_range(0, batch.m);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (batch.m + threads - 1) / threads;
        for (std::size_t tix = 0; tix < threads; ++tix) {
            const std::size_t lo = tix * chunk;
            const std::size_t hi = std::min(batch.m, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run_range, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return batch;
}

std::pair<Tensor, Tensor> to_one_hot(const WalkBatch& batch, std::size_t n, std::size_t k) {
    Tensor nodes(std::vector<std::size_t>{batch.m, batch.t, n});
    Tensor labels(std::vector<std::size_t>{batch.m, batch.t, k});
    for (std::size_t i = 0; i < batch.m; ++i) {
        for (std::size_t s = 0; s < batch.t; ++s) {
            const std::uint32_t nv = batch.node(i, s);
            const std::uint32_t lv = batch.label(i, s);
            if (nv >= n) {
                throw ConfigError("node index " + std::to_string(nv) + " out of range at walk " +
                                  std::to_string(i) + " step " + std::to_string(s));
            }
            if (lv >= k) {
                throw ConfigError("label index " + std::to_string(lv) + " out of range at walk " +
                                  std::to_string(i) + " step " + std::to_string(s));
            }
            nodes.data[(i * batch.t + s) * n + nv] = 1.0;
            labels.data[(i * batch.t + s) * k + lv] = 1.0;
        }
    }
    return {std::move(nodes), std::move(labels)};
}

}  // namespace shadowcast
