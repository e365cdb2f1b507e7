#ifndef SHADOWCAST_NN_HPP
#define SHADOWCAST_NN_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "shadowcast/autodiff.hpp"
#include "shadowcast/rng.hpp"
#include "shadowcast/tensor.hpp"

namespace shadowcast::nn {

/// Single LSTM cell. Gate weights are hidden x (input + hidden); inputs are
/// row-batched, so steps compute [x,h] * W^T + b per gate. Forget-gate bias
/// starts at 1.0.
struct LstmCell {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    Tensor w_i, w_f, w_o, w_g;  // hidden x (input+hidden)
    Tensor b_i, b_f, b_o, b_g;  // hidden

    static LstmCell init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);
    std::vector<Tensor*> params();
    std::vector<std::string> param_names(const std::string& prefix) const;
};

struct Dense {
    Tensor w;  // out x in
    Tensor b;  // out

    static Dense init(std::size_t in, std::size_t out, Rng& rng);
    std::vector<Tensor*> params();
    std::vector<std::string> param_names(const std::string& prefix) const;
};

/// Tape-side handles for a cell's parameters within one loss evaluation.
struct LstmVars {
    ad::Var w_i, w_f, w_o, w_g, b_i, b_f, b_o, b_g;
};
LstmVars lstm_vars(ad::Tape& tape, const LstmCell& cell, bool needs_grad = true);

struct DenseVars {
    ad::Var w, b;
};
DenseVars dense_vars(ad::Tape& tape, const Dense& d, bool needs_grad = true);

struct LstmState {
    ad::Var h, c;
};

/// One LSTM step on a row batch x_t (m x input):
/// i,f,o = sigmoid(W.[x,h]+b), g = tanh(...), c = f.c_prev + i.g, h = o.tanh(c)
LstmState lstm_step(ad::Tape& tape, const LstmVars& cell, ad::Var x_t, LstmState prev);

/// y = x * W^T + b for a row batch.
ad::Var dense(ad::Tape& tape, const DenseVars& d, ad::Var x);

/// Plain-value softmax with max-subtraction.
std::vector<double> softmax(std::span<const double> v);

struct GumbelSample {
    std::vector<double> soft;  // valid distribution
    std::vector<double> hard;  // one-hot at argmax(soft)
    std::size_t index = 0;
};

/// soft = softmax((logits + Gumbel noise) / tau); hard = one-hot(argmax soft).
GumbelSample gumbel_softmax_sample(std::span<const double> logits, double tau, Rng& rng);

/// Binary cross-entropy pair for GAN probabilities, clamped to
/// [1e-7, 1-1e-7]. loss_g is the non-saturating -log d_fake.
struct BceLosses {
    double loss_d = 0.0;
    double loss_g = 0.0;
};
BceLosses bce_losses(double d_real, double d_fake);

/// Adam optimizer state over a fixed parameter list.
struct AdamState {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::int64_t t = 0;
    std::vector<Tensor> m;
    std::vector<Tensor> v;

    static AdamState init(std::span<Tensor* const> params, double learning_rate);
};

/// One bias-corrected Adam update; grads[i] must shape-match params[i].
void adam_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads, AdamState& state);

/// Finite-difference gradient checker. `forward` rebuilds the loss from the
/// current parameter values and must be deterministic (freeze any sampling
/// noise outside). At most `max_checked` coordinates are probed, chosen by a
/// seeded shuffle across all parameters.
struct GradCheckReport {
    double max_rel_err = 0.0;
    std::size_t checked = 0;
    std::string worst;  // parameter/coordinate of the max error
};

struct GradCheckable {
    std::vector<Tensor*> params;
    std::vector<std::string> names;  // aligned with params; optional
    // Builds the loss from the current parameter tensors. Must register one
    // tape leaf per entry of `params`, in the same order, into `leaves`.
    std::function<ad::Var(ad::Tape&, std::vector<ad::Var>& leaves)> forward;
};

GradCheckReport grad_check(GradCheckable& model, double step = 1e-5, std::size_t max_checked = 500,
                           std::uint64_t seed = 0);

}  // namespace shadowcast::nn

#endif
