#include "shadowcast/nn.hpp"

#include <algorithm>
#include <cmath>

#include "shadowcast/error.hpp"

namespace shadowcast::nn {

namespace {

Tensor uniform_init(std::size_t rows, std::size_t cols, double bound, Rng& rng) {
    Tensor t(std::vector<std::size_t>{rows, cols});
    for (double& x : t.data) x = (2.0 * rng.uniform() - 1.0) * bound;
    return t;
}

}  // namespace

LstmCell LstmCell::init(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
    LstmCell cell;
    cell.input_dim = input_dim;
    cell.hidden_dim = hidden_dim;
    const std::size_t fan_in = input_dim + hidden_dim;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    cell.w_i = uniform_init(hidden_dim, fan_in, bound, rng);
    cell.w_f = uniform_init(hidden_dim, fan_in, bound, rng);
    cell.w_o = uniform_init(hidden_dim, fan_in, bound, rng);
    cell.w_g = uniform_init(hidden_dim, fan_in, bound, rng);
    cell.b_i = Tensor(std::vector<std::size_t>{hidden_dim});
    cell.b_f = Tensor::full({hidden_dim}, 1.0);
    cell.b_o = Tensor(std::vector<std::size_t>{hidden_dim});
    cell.b_g = Tensor(std::vector<std::size_t>{hidden_dim});
    return cell;
}

std::vector<Tensor*> LstmCell::params() { return {&w_i, &w_f, &w_o, &w_g, &b_i, &b_f, &b_o, &b_g}; }

std::vector<std::string> LstmCell::param_names(const std::string& prefix) const {
    return {prefix + ".w_i", prefix + ".w_f", prefix + ".w_o", prefix + ".w_g",
            prefix + ".b_i", prefix + ".b_f", prefix + ".b_o", prefix + ".b_g"};
}

Dense Dense::init(std::size_t in, std::size_t out, Rng& rng) {
    Dense d;
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    d.w = uniform_init(out, in, bound, rng);
    d.b = Tensor(std::vector<std::size_t>{out});
    return d;
}

std::vector<Tensor*> Dense::params() { return {&w, &b}; }

std::vector<std::string> Dense::param_names(const std::string& prefix) const {
    return {prefix + ".w", prefix + ".b"};
}

LstmVars lstm_vars(ad::Tape& tape, const LstmCell& cell, bool needs_grad) {
    LstmVars v;
    v.w_i = tape.leaf(cell.w_i, needs_grad);
    v.w_f = tape.leaf(cell.w_f, needs_grad);
    v.w_o = tape.leaf(cell.w_o, needs_grad);
    v.w_g = tape.leaf(cell.w_g, needs_grad);
    v.b_i = tape.leaf(cell.b_i, needs_grad);
    v.b_f = tape.leaf(cell.b_f, needs_grad);
    v.b_o = tape.leaf(cell.b_o, needs_grad);
    v.b_g = tape.leaf(cell.b_g, needs_grad);
    return v;
}

DenseVars dense_vars(ad::Tape& tape, const Dense& d, bool needs_grad) {
    return {tape.leaf(d.w, needs_grad), tape.leaf(d.b, needs_grad)};
}

LstmState lstm_step(ad::Tape& tape, const LstmVars& cell, ad::Var x_t, LstmState prev) {
    ad::Var xh = tape.concat_cols(x_t, prev.h);
    ad::Var i = tape.sigmoid(tape.add_rowvec(tape.matmul_nt(xh, cell.w_i), cell.b_i));
    ad::Var f = tape.sigmoid(tape.add_rowvec(tape.matmul_nt(xh, cell.w_f), cell.b_f));
    ad::Var o = tape.sigmoid(tape.add_rowvec(tape.matmul_nt(xh, cell.w_o), cell.b_o));
    ad::Var g = tape.tanh(tape.add_rowvec(tape.matmul_nt(xh, cell.w_g), cell.b_g));
    ad::Var c = tape.add(tape.mul(f, prev.c), tape.mul(i, g));
    ad::Var h = tape.mul(o, tape.tanh(c));
    return {h, c};
}

ad::Var dense(ad::Tape& tape, const DenseVars& d, ad::Var x) {
    return tape.add_rowvec(tape.matmul_nt(x, d.w), d.b);
}

std::vector<double> softmax(std::span<const double> v) {
    std::vector<double> out(v.begin(), v.end());
    double mx = out[0];
    for (double x : out) mx = std::max(mx, x);
    double sum = 0.0;
    for (double& x : out) {
        x = std::exp(x - mx);
        sum += x;
    }
    for (double& x : out) x /= sum;
    return out;
}

GumbelSample gumbel_softmax_sample(std::span<const double> logits, double tau, Rng& rng) {
    if (!(tau > 0.0)) throw ConfigError("gumbel temperature must be > 0");
    GumbelSample s;
    std::vector<double> perturbed(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        const double gumbel = -std::log(-std::log(u));
        perturbed[i] = (logits[i] + gumbel) / tau;
    }
    s.soft = softmax(perturbed);
    s.index = static_cast<std::size_t>(
        std::max_element(s.soft.begin(), s.soft.end()) - s.soft.begin());
    s.hard.assign(logits.size(), 0.0);
    s.hard[s.index] = 1.0;
    return s;
}

BceLosses bce_losses(double d_real, double d_fake) {
    const double lo = 1e-7;
    const double hi = 1.0 - 1e-7;
    const double pr = std::clamp(d_real, lo, hi);
    const double pf = std::clamp(d_fake, lo, hi);
    BceLosses out;
    out.loss_d = -(std::log(pr) + std::log(1.0 - pf));
    out.loss_g = -std::log(pf);
    return out;
}

AdamState AdamState::init(std::span<Tensor* const> params, double learning_rate) {
    AdamState s;
    s.learning_rate = learning_rate;
    s.m.reserve(params.size());
    s.v.reserve(params.size());
    for (const Tensor* p : params) {
        s.m.emplace_back(Tensor(p->shape));
        s.v.emplace_back(Tensor(p->shape));
    }
    return s;
}

void adam_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw ConfigError("adam_step: parameter/gradient/state count mismatch");
    }
    state.t += 1;
    const double b1 = state.beta1;
    const double b2 = state.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& theta = *params[p];
        const Tensor& g = *grads[p];
        if (!theta.same_shape(g)) throw ConfigError("adam_step: gradient shape mismatch");
        check_finite(g, "adam gradient");
        Tensor& m = state.m[p];
        Tensor& v = state.v[p];
        for (std::size_t i = 0; i < theta.numel(); ++i) {
            m.data[i] = b1 * m.data[i] + (1.0 - b1) * g.data[i];
            v.data[i] = b2 * v.data[i] + (1.0 - b2) * g.data[i] * g.data[i];
            const double mhat = m.data[i] / corr1;
            const double vhat = v.data[i] / corr2;
            theta.data[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
        }
    }
}

GradCheckReport grad_check(GradCheckable& model, double step, std::size_t max_checked, std::uint64_t seed) {
    // analytic pass
    std::vector<Tensor> analytic;
    {
        ad::Tape tape;
        std::vector<ad::Var> leaves;
        ad::Var loss = model.forward(tape, leaves);
        if (leaves.size() != model.params.size()) {
            throw ConfigError("grad_check: forward registered " + std::to_string(leaves.size()) +
                              " leaves for " + std::to_string(model.params.size()) + " params");
        }
        tape.backward(loss);
        for (ad::Var v : leaves) analytic.push_back(tape.grad(v));
    }

    auto loss_value = [&]() {
        ad::Tape tape;
        std::vector<ad::Var> leaves;
        ad::Var loss = model.forward(tape, leaves);
        return tape.value(loss).data[0];
    };

    // flat coordinate index space over all params
    std::vector<std::pair<std::size_t, std::size_t>> coords;
    for (std::size_t p = 0; p < model.params.size(); ++p) {
        for (std::size_t i = 0; i < model.params[p]->numel(); ++i) coords.emplace_back(p, i);
    }
    Rng rng = Rng::stream(seed, 0, /*tag=*/0x6c);
    for (std::size_t i = 0; i + 1 < coords.size(); ++i) {
        std::size_t j = i + rng.uniform_int(coords.size() - i);
        std::swap(coords[i], coords[j]);
    }
    const std::size_t n = std::min(max_checked, coords.size());

    GradCheckReport report;
    for (std::size_t c = 0; c < n; ++c) {
        auto [p, i] = coords[c];
        double& theta = model.params[p]->data[i];
        const double saved = theta;
        theta = saved + step;
        const double up = loss_value();
        theta = saved - step;
        const double down = loss_value();
        theta = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double exact = analytic[p].data[i];
        const double denom = std::max({std::abs(numeric), std::abs(exact), 1e-4});
        const double rel = std::abs(numeric - exact) / denom;
        if (rel > report.max_rel_err) {
            report.max_rel_err = rel;
            const std::string name = p < model.names.size() ? model.names[p] : ("param" + std::to_string(p));
            report.worst = name + "[" + std::to_string(i) + "]";
        }
    }
    report.checked = n;
    return report;
}

}  // namespace shadowcast::nn
