#ifndef SHADOWCAST_MODEL_HPP
#define SHADOWCAST_MODEL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shadowcast/graph.hpp"
#include "shadowcast/markov.hpp"
#include "shadowcast/nn.hpp"
#include "shadowcast/tensor.hpp"
#include "shadowcast/walks.hpp"

namespace shadowcast {

/// Sequence-to-sequence label smoother: LSTM over one-hot label walks with a
/// softmax head, trained to reproduce its input sequence step by step.
struct ShadowCaster {
    std::uint32_t k = 0;
    nn::LstmCell lstm;  // k -> hidden
    nn::Dense head;     // hidden -> k

    static ShadowCaster init(std::uint32_t k, std::size_t hidden, Rng& rng);
    std::vector<Tensor*> params();
    std::vector<std::string> param_names() const;
};

/// Conditional walk generator: noise z maps through a tanh dense layer to the
/// initial LSTM state, then each step consumes the condition and the
/// previously emitted node.
struct Generator {
    std::size_t n = 0;       // node count (one-hot width)
    std::uint32_t k = 0;     // condition width
    std::size_t z_dim = 16;
    std::size_t hidden = 50;
    nn::Dense init_map;   // z_dim -> 2*hidden, tanh
    nn::LstmCell lstm;    // (k + n) -> hidden
    nn::Dense node_head;  // hidden -> n

    static Generator init(std::size_t n, std::uint32_t k, std::size_t z_dim, std::size_t hidden, Rng& rng);
    std::vector<Tensor*> params();
    std::vector<std::string> param_names() const;
};

/// Sequence classifier: walk steps concatenated with conditions, final hidden
/// state through a logistic head.
struct Discriminator {
    std::size_t n = 0;
    std::uint32_t k = 0;
    std::size_t hidden = 40;
    nn::LstmCell lstm;  // (n + k) -> hidden
    nn::Dense head;     // hidden -> 1

    static Discriminator init(std::size_t n, std::uint32_t k, std::size_t hidden, Rng& rng);
    std::vector<Tensor*> params();
    std::vector<std::string> param_names() const;
};

struct Models {
    ShadowCaster caster;
    Generator generator;
    Discriminator discriminator;
};

struct TrainConfig {
    std::size_t iterations = 20000;
    std::size_t batch_size = 128;  // m
    std::size_t walk_length = 16;  // T
    std::size_t omega = 3;         // discriminator steps per iteration
    double lr_caster = 0.01;
    double lr_gan = 0.0002;
    double tau_start = 1.0;
    double tau_end = 1.0;  // linear anneal when different from tau_start
    double walk_p = 1.0;
    double walk_q = 1.0;
    std::uint64_t seed = 0;
    std::size_t caster_hidden = 10;
    std::size_t generator_hidden = 50;
    std::size_t discriminator_hidden = 40;
    std::size_t z_dim = 16;
    std::size_t checkpoint_interval = 500;
    std::size_t probe_interval = 500;   // best-checkpoint selection probe
    std::size_t probe_walks = 100000;   // walks per probe
    std::size_t markov_fit_walks = 10000;
    double markov_alpha = 0.01;
    // Pair real walks with their own one-hot shadows instead of the
    // caster-generated batch conditions.
    bool real_cond_true_shadow = false;
    bool pretrain_caster = false;
    std::size_t pretrain_iters = 200;
    bool preflight_grad_check = true;

    void validate() const;
};

struct LossRow {
    std::size_t iter = 0;
    double loss_c = 0.0;
    double loss_g = 0.0;
    double loss_d = 0.0;
};

struct Optimizers {
    nn::AdamState caster;
    nn::AdamState generator;
    nn::AdamState discriminator;
};

struct TrainSnapshot {
    Models models;
    Optimizers opts;
    std::size_t iter = 0;
};

struct TrainResult {
    Models final_models;
    Models best_models;   // lowest |generated CLUST - real CLUST| probe
    std::size_t best_iter = 0;
    double best_gap = 0.0;
    std::vector<LossRow> losses;
    MarkovControl empirical;  // chain fitted from training shadow walks
    bool aborted = false;
    std::string fault;
};

struct GeneratedWalks {
    std::size_t m = 0;
    std::size_t t = 0;
    std::vector<std::uint32_t> nodes;  // m x t

    std::uint32_t at(std::size_t i, std::size_t s) const { return nodes[i * t + s]; }
};

/// Teacher-forced soft reconstruction of one-hot label walks; output row t is
/// the label distribution for step t given steps 1..t.
Tensor caster_forward(const ShadowCaster& c, const Tensor& s_onehot);

/// One Adam step on the mean per-step categorical cross-entropy; returns the
/// pre-update loss.
double caster_train_step(ShadowCaster& c, const LabelSequences& s, nn::AdamState& opt);

/// Run the generative recursion under soft conditions. Noise and Gumbel draws
/// stream from (seed, walk index), so results do not depend on batching.
GeneratedWalks generate_walks(const Generator& g, const Tensor& conds, std::uint64_t seed, double tau = 1.0);

/// Per-sequence probability that (walk, condition) came from the data.
std::vector<double> discriminate(const Discriminator& d, const Tensor& nodes_onehot, const Tensor& conds);

/// One Adam step of the discriminator on a real batch vs a fake batch, both
/// given as (m, T, n) one-hot node tensors with (m, T, k) conditions; returns
/// the pre-update loss.
double discriminator_train_step(Discriminator& d, nn::AdamState& opt, const Tensor& real_nodes,
                                const Tensor& real_conds, const Tensor& fake_nodes, const Tensor& fake_conds);

/// Minibatch training: per iteration one caster step, one generator step and
/// omega discriminator steps, following the conditional GAN objective.
TrainResult train(const LabeledGraph& g, const TrainConfig& cfg,
                  const std::function<void(const TrainSnapshot&)>& checkpoint_cb = nullptr,
                  const TrainSnapshot* resume = nullptr);

/// Pre-flight finite-difference checks for the three models on a frozen tiny
/// batch; returns the worst report.
nn::GradCheckReport preflight_grad_check(const LabeledGraph& g, const TrainConfig& cfg);

}  // namespace shadowcast

#endif
