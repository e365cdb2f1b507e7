#include "shadowcast/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shadowcast/assembly.hpp"
#include "shadowcast/error.hpp"
#include "shadowcast/metrics.hpp"

namespace shadowcast {

namespace {

constexpr std::uint64_t kRoleWalks = 1;
constexpr std::uint64_t kRoleMarkov = 2;
constexpr std::uint64_t kRoleNoise = 3;
constexpr std::uint64_t kRoleGumbel = 4;
constexpr std::uint64_t kRoleProbe = 5;
constexpr std::uint64_t kRolePreflight = 6;
constexpr std::uint64_t kRoleInit = 7;

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t iter, std::uint64_t role) {
    return Rng::mix(Rng::mix(seed) ^ Rng::mix(iter + 0x51ed2701ULL) ^ Rng::mix(role + 0xa11ce5ULL));
}

Tensor onehot_labels_step(const LabelSequences& s, std::size_t step, std::uint32_t k) {
    Tensor t(std::vector<std::size_t>{s.m, k});
    for (std::size_t i = 0; i < s.m; ++i) t.data[i * k + s.at(i, step)] = 1.0;
    return t;
}

Tensor onehot_nodes_step(const WalkBatch& b, std::size_t step, std::size_t n) {
    Tensor t(std::vector<std::size_t>{b.m, n});
    for (std::size_t i = 0; i < b.m; ++i) t.data[i * n + b.node(i, step)] = 1.0;
    return t;
}

Tensor onehot_generated_step(const GeneratedWalks& w, std::size_t step, std::size_t n) {
    Tensor t(std::vector<std::size_t>{w.m, n});
    for (std::size_t i = 0; i < w.m; ++i) t.data[i * n + w.at(i, step)] = 1.0;
    return t;
}

// (m, T, K) -> (m, K) at one timestep
Tensor slice_step(const Tensor& t3, std::size_t step) {
    const std::size_t m = t3.shape[0], tt = t3.shape[1], k = t3.shape[2];
    Tensor out(std::vector<std::size_t>{m, k});
    for (std::size_t i = 0; i < m; ++i) std::copy_n(&t3.data[(i * tt + step) * k], k, &out.data[i * k]);
    return out;
}

// stack real rows on top of fake rows
Tensor vstack(const Tensor& a, const Tensor& b) {
    Tensor out(std::vector<std::size_t>{a.rows() + b.rows(), a.cols()});
    std::copy(a.data.begin(), a.data.end(), out.data.begin());
    std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(a.numel()));
    return out;
}

struct CasterVars {
    nn::LstmVars lstm;
    nn::DenseVars head;
};

CasterVars caster_vars(ad::Tape& tape, const ShadowCaster& c, bool needs_grad) {
    return {nn::lstm_vars(tape, c.lstm, needs_grad), nn::dense_vars(tape, c.head, needs_grad)};
}

// soft output distribution per step, teacher-forced on the input sequence
std::vector<ad::Var> caster_steps(ad::Tape& tape, const CasterVars& vars, const ShadowCaster& c,
                                  const std::vector<Tensor>& input_steps) {
    const std::size_t m = input_steps.front().rows();
    nn::LstmState state{tape.leaf(Tensor(std::vector<std::size_t>{m, c.lstm.hidden_dim}), false),
                        tape.leaf(Tensor(std::vector<std::size_t>{m, c.lstm.hidden_dim}), false)};
    std::vector<ad::Var> probs;
    probs.reserve(input_steps.size());
    for (const Tensor& x : input_steps) {
        state = nn::lstm_step(tape, vars.lstm, tape.leaf(x, false), state);
        probs.push_back(tape.softmax_rows(nn::dense(tape, vars.head, state.h)));
    }
    return probs;
}

// mean per-step categorical cross-entropy against the input itself
ad::Var caster_loss(ad::Tape& tape, const std::vector<ad::Var>& probs, const std::vector<Tensor>& targets) {
    ad::Var total{-1};
    for (std::size_t t = 0; t < probs.size(); ++t) {
        ad::Var term = tape.sum_all(tape.mul_const(tape.log_clamped(probs[t], 1e-12), targets[t]));
        total = t == 0 ? term : tape.add(total, term);
    }
    const double m = static_cast<double>(targets.front().rows());
    const double steps = static_cast<double>(targets.size());
    return tape.scale(total, -1.0 / (m * steps));
}

struct GenVars {
    nn::DenseVars init_map;
    nn::LstmVars lstm;
    nn::DenseVars node_head;
};

GenVars gen_vars(ad::Tape& tape, const Generator& g, bool needs_grad) {
    return {nn::dense_vars(tape, g.init_map, needs_grad), nn::lstm_vars(tape, g.lstm, needs_grad),
            nn::dense_vars(tape, g.node_head, needs_grad)};
}

struct DiscVars {
    nn::LstmVars lstm;
    nn::DenseVars head;
};

DiscVars disc_vars(ad::Tape& tape, const Discriminator& d, bool needs_grad) {
    return {nn::lstm_vars(tape, d.lstm, needs_grad), nn::dense_vars(tape, d.head, needs_grad)};
}

struct GenUnroll {
    std::vector<ad::Var> outputs;       // per step: m x n, one-hot (hard) or soft
    std::vector<std::uint32_t> indices; // m x T sampled nodes
};

// The generative recursion: m_0 = tanh(dense(z)), then per step the LSTM
// consumes [condition, previous node] and emits node logits; nodes are drawn
// with Gumbel-softmax. `hard` uses the straight-through estimator, otherwise
// the relaxed soft sample flows on (used by gradient checks).
GenUnroll generator_unroll(ad::Tape& tape, const GenVars& vars, const Generator& g, const Tensor& conds,
                           const Tensor& z, const Tensor& gumbel, double tau, bool hard) {
    if (!(tau > 0.0)) throw ConfigError("generator temperature must be > 0");
    const std::size_t m = conds.shape[0];
    const std::size_t steps = conds.shape[1];
    const std::size_t n = g.n;

    GenUnroll out;
    out.indices.resize(m * steps);

    ad::Var zv = tape.leaf(z, false);
    ad::Var m0 = tape.tanh(nn::dense(tape, vars.init_map, zv));
    nn::LstmState state{tape.slice_cols(m0, 0, g.hidden), tape.slice_cols(m0, g.hidden, 2 * g.hidden)};

    ad::Var v_prev = tape.leaf(Tensor(std::vector<std::size_t>{m, n}), false);
    for (std::size_t t = 0; t < steps; ++t) {
        ad::Var x = tape.concat_cols(tape.leaf(slice_step(conds, t), false), v_prev);
        state = nn::lstm_step(tape, vars.lstm, x, state);
        ad::Var logits = nn::dense(tape, vars.node_head, state.h);

        Tensor gt(std::vector<std::size_t>{m, n});
        for (std::size_t i = 0; i < m; ++i) {
            std::copy_n(&gumbel.data[(i * steps + t) * n], n, &gt.data[i * n]);
        }
        ad::Var soft = tape.softmax_rows(tape.scale(tape.add_const(logits, std::move(gt)), 1.0 / tau));

        const Tensor& sv = tape.value(soft);
        Tensor hard_t(std::vector<std::size_t>{m, n});
        for (std::size_t i = 0; i < m; ++i) {
            const double* row = &sv.data[i * n];
            std::size_t arg = 0;
            for (std::size_t j = 1; j < n; ++j) {
                if (row[j] > row[arg]) arg = j;
            }
            hard_t.data[i * n + arg] = 1.0;
            out.indices[i * steps + t] = static_cast<std::uint32_t>(arg);
        }

        ad::Var v = hard ? tape.straight_through(soft, std::move(hard_t)) : soft;
        out.outputs.push_back(v);
        v_prev = v;
    }
    return out;
}

// final-state logistic head over [node, condition] sequences
ad::Var discriminator_prob(ad::Tape& tape, const DiscVars& vars, const Discriminator& d,
                           const std::vector<ad::Var>& node_steps, const std::vector<ad::Var>& cond_steps) {
    const std::size_t m = tape.value(node_steps.front()).rows();
    nn::LstmState state{tape.leaf(Tensor(std::vector<std::size_t>{m, d.hidden}), false),
                        tape.leaf(Tensor(std::vector<std::size_t>{m, d.hidden}), false)};
    for (std::size_t t = 0; t < node_steps.size(); ++t) {
        ad::Var x = tape.concat_cols(node_steps[t], cond_steps[t]);
        state = nn::lstm_step(tape, vars.lstm, x, state);
    }
    return tape.sigmoid(nn::dense(tape, vars.head, state.h));
}

Tensor gaussian_noise(std::size_t rows, std::size_t cols, std::uint64_t seed, std::size_t row_offset,
                      std::uint64_t role) {
    Tensor z(std::vector<std::size_t>{rows, cols});
    for (std::size_t i = 0; i < rows; ++i) {
        Rng rng = Rng::stream(seed, row_offset + i, role);
        for (std::size_t j = 0; j < cols; ++j) z.data[i * cols + j] = rng.gaussian();
    }
    return z;
}

Tensor gumbel_noise(std::size_t rows, std::size_t steps, std::size_t n, std::uint64_t seed,
                    std::size_t row_offset) {
    Tensor g(std::vector<std::size_t>{rows, steps, n});
    for (std::size_t i = 0; i < rows; ++i) {
        Rng rng = Rng::stream(seed, row_offset + i, kRoleGumbel);
        for (std::size_t s = 0; s < steps * n; ++s) {
            double u = rng.uniform();
            while (u <= 0.0) u = rng.uniform();
            g.data[i * steps * n + s] = -std::log(-std::log(u));
        }
    }
    return g;
}

std::vector<Tensor> grads_of(ad::Tape& tape, const std::vector<ad::Var>& leaves) {
    std::vector<Tensor> out;
    out.reserve(leaves.size());
    for (ad::Var v : leaves) out.push_back(tape.grad(v));
    return out;
}

std::vector<ad::Var> collect_vars(const CasterVars& v) {
    return {v.lstm.w_i, v.lstm.w_f, v.lstm.w_o, v.lstm.w_g, v.lstm.b_i, v.lstm.b_f, v.lstm.b_o, v.lstm.b_g,
            v.head.w, v.head.b};
}

std::vector<ad::Var> collect_vars(const GenVars& v) {
    return {v.init_map.w, v.init_map.b, v.lstm.w_i, v.lstm.w_f, v.lstm.w_o, v.lstm.w_g,
            v.lstm.b_i, v.lstm.b_f, v.lstm.b_o, v.lstm.b_g, v.node_head.w, v.node_head.b};
}

std::vector<ad::Var> collect_vars(const DiscVars& v) {
    return {v.lstm.w_i, v.lstm.w_f, v.lstm.w_o, v.lstm.w_g, v.lstm.b_i, v.lstm.b_f, v.lstm.b_o, v.lstm.b_g,
            v.head.w, v.head.b};
}

void apply_adam(std::vector<Tensor*> params, const std::vector<Tensor>& grads, nn::AdamState& opt) {
    std::vector<const Tensor*> gp;
    gp.reserve(grads.size());
    for (const Tensor& g : grads) gp.push_back(&g);
    nn::adam_step(params, gp, opt);
}

std::vector<Tensor> label_steps_onehot(const LabelSequences& s, std::uint32_t k) {
    std::vector<Tensor> steps;
    steps.reserve(s.t);
    for (std::size_t t = 0; t < s.t; ++t) steps.push_back(onehot_labels_step(s, t, k));
    return steps;
}

}  // namespace

void TrainConfig::validate() const {
    if (iterations == 0) throw ConfigError("iterations must be >= 1");
    if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
    if (walk_length < 2) throw ConfigError("walk_length must be >= 2");
    if (omega == 0) throw ConfigError("omega must be >= 1");
    if (!(lr_caster > 0.0) || !(lr_gan > 0.0)) throw ConfigError("learning rates must be > 0");
    if (!(tau_start > 0.0) || !(tau_end > 0.0)) throw ConfigError("tau must be > 0");
    if (!(walk_p > 0.0) || !(walk_q > 0.0)) throw ConfigError("walk p and q must be > 0");
    if (z_dim == 0 || caster_hidden == 0 || generator_hidden == 0 || discriminator_hidden == 0) {
        throw ConfigError("model widths must be >= 1");
    }
}

ShadowCaster ShadowCaster::init(std::uint32_t k, std::size_t hidden, Rng& rng) {
    ShadowCaster c;
    c.k = k;
    c.lstm = nn::LstmCell::init(k, hidden, rng);
    c.head = nn::Dense::init(hidden, k, rng);
    return c;
}

std::vector<Tensor*> ShadowCaster::params() {
    auto p = lstm.params();
    auto h = head.params();
    p.insert(p.end(), h.begin(), h.end());
    return p;
}

std::vector<std::string> ShadowCaster::param_names() const {
    auto p = lstm.param_names("caster.lstm");
    auto h = head.param_names("caster.head");
    p.insert(p.end(), h.begin(), h.end());
    return p;
}

Generator Generator::init(std::size_t n, std::uint32_t k, std::size_t z_dim, std::size_t hidden, Rng& rng) {
    Generator g;
    g.n = n;
    g.k = k;
    g.z_dim = z_dim;
    g.hidden = hidden;
    g.init_map = nn::Dense::init(z_dim, 2 * hidden, rng);
    g.lstm = nn::LstmCell::init(k + n, hidden, rng);
    g.node_head = nn::Dense::init(hidden, n, rng);
    return g;
}

std::vector<Tensor*> Generator::params() {
    std::vector<Tensor*> p = init_map.params();
    auto l = lstm.params();
    auto h = node_head.params();
    p.insert(p.end(), l.begin(), l.end());
    p.insert(p.end(), h.begin(), h.end());
    return p;
}

std::vector<std::string> Generator::param_names() const {
    auto p = init_map.param_names("generator.init_map");
    auto l = lstm.param_names("generator.lstm");
    auto h = node_head.param_names("generator.node_head");
    p.insert(p.end(), l.begin(), l.end());
    p.insert(p.end(), h.begin(), h.end());
    return p;
}

Discriminator Discriminator::init(std::size_t n, std::uint32_t k, std::size_t hidden, Rng& rng) {
    Discriminator d;
    d.n = n;
    d.k = k;
    d.hidden = hidden;
    d.lstm = nn::LstmCell::init(n + k, hidden, rng);
    d.head = nn::Dense::init(hidden, 1, rng);
    return d;
}

std::vector<Tensor*> Discriminator::params() {
    auto p = lstm.params();
    auto h = head.params();
    p.insert(p.end(), h.begin(), h.end());
    return p;
}

std::vector<std::string> Discriminator::param_names() const {
    auto p = lstm.param_names("discriminator.lstm");
    auto h = head.param_names("discriminator.head");
    p.insert(p.end(), h.begin(), h.end());
    return p;
}

Tensor caster_forward(const ShadowCaster& c, const Tensor& s_onehot) {
    if (s_onehot.rank() != 3 || s_onehot.shape[2] != c.k) throw ConfigError("caster_forward: bad input shape");
    const std::size_t total = s_onehot.shape[0], steps = s_onehot.shape[1];
    Tensor out(std::vector<std::size_t>{total, steps, static_cast<std::size_t>(c.k)});

    const std::size_t chunk = 512;
    for (std::size_t lo = 0; lo < total; lo += chunk) {
        const std::size_t m = std::min(chunk, total - lo);
        std::vector<Tensor> input_steps;
        input_steps.reserve(steps);
        for (std::size_t t = 0; t < steps; ++t) {
            Tensor x(std::vector<std::size_t>{m, static_cast<std::size_t>(c.k)});
            for (std::size_t i = 0; i < m; ++i) {
                std::copy_n(&s_onehot.data[((lo + i) * steps + t) * c.k], c.k, &x.data[i * c.k]);
            }
            input_steps.push_back(std::move(x));
        }
        ad::Tape tape;
        CasterVars vars = caster_vars(tape, c, false);
        std::vector<ad::Var> probs = caster_steps(tape, vars, c, input_steps);
        for (std::size_t t = 0; t < steps; ++t) {
            const Tensor& pt = tape.value(probs[t]);
            for (std::size_t i = 0; i < m; ++i) {
                std::copy_n(&pt.data[i * c.k], c.k, &out.data[((lo + i) * steps + t) * c.k]);
            }
        }
    }
    return out;
}

double caster_train_step(ShadowCaster& c, const LabelSequences& s, nn::AdamState& opt) {
    std::vector<Tensor> steps = label_steps_onehot(s, c.k);
    ad::Tape tape;
    CasterVars vars = caster_vars(tape, c, true);
    ad::Var loss = caster_loss(tape, caster_steps(tape, vars, c, steps), steps);
    const double value = tape.value(loss).data[0];
    tape.backward(loss);
    apply_adam(c.params(), grads_of(tape, collect_vars(vars)), opt);
    return value;
}

GeneratedWalks generate_walks(const Generator& g, const Tensor& conds, std::uint64_t seed, double tau) {
    if (conds.rank() != 3 || conds.shape[2] != g.k) throw ConfigError("generate_walks: bad condition shape");
    const std::size_t total = conds.shape[0];
    const std::size_t steps = conds.shape[1];
    GeneratedWalks out;
    out.m = total;
    out.t = steps;
    out.nodes.resize(total * steps);

    const std::size_t chunk = 512;
    for (std::size_t lo = 0; lo < total; lo += chunk) {
        const std::size_t rows = std::min(chunk, total - lo);
        Tensor conds_chunk(std::vector<std::size_t>{rows, steps, static_cast<std::size_t>(g.k)});
        std::copy_n(&conds.data[lo * steps * g.k], rows * steps * g.k, conds_chunk.data.begin());
        Tensor z = gaussian_noise(rows, g.z_dim, seed, lo, kRoleNoise);
        Tensor gn = gumbel_noise(rows, steps, g.n, seed, lo);

        ad::Tape tape;
        GenVars vars = gen_vars(tape, g, false);
        GenUnroll unroll = generator_unroll(tape, vars, g, conds_chunk, z, gn, tau, /*hard=*/true);
        std::copy_n(unroll.indices.begin(), rows * steps, out.nodes.begin() + static_cast<std::ptrdiff_t>(lo * steps));
    }
    return out;
}

std::vector<double> discriminate(const Discriminator& d, const Tensor& nodes_onehot, const Tensor& conds) {
    if (nodes_onehot.rank() != 3 || conds.rank() != 3 || nodes_onehot.shape[0] != conds.shape[0] ||
        nodes_onehot.shape[1] != conds.shape[1] || nodes_onehot.shape[2] != d.n || conds.shape[2] != d.k) {
        throw ConfigError("discriminate: shape mismatch");
    }
    const std::size_t m = nodes_onehot.shape[0], steps = nodes_onehot.shape[1];
    ad::Tape tape;
    DiscVars vars = disc_vars(tape, d, false);
    std::vector<ad::Var> node_steps, cond_steps;
    for (std::size_t t = 0; t < steps; ++t) {
        node_steps.push_back(tape.leaf(slice_step(nodes_onehot, t), false));
        cond_steps.push_back(tape.leaf(slice_step(conds, t), false));
    }
    ad::Var probs = discriminator_prob(tape, vars, d, node_steps, cond_steps);
    const Tensor& pv = tape.value(probs);
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) out[i] = pv.data[i];
    return out;
}

namespace {

// one generator Adam step; returns the pre-update loss
double gen_step(Generator& g, const Discriminator& d, nn::AdamState& opt, const Tensor& conds, const Tensor& z,
                const Tensor& gn, double tau) {
    const std::size_t steps = conds.shape[1];
    ad::Tape tape;
    GenVars gvars = gen_vars(tape, g, true);
    GenUnroll unroll = generator_unroll(tape, gvars, g, conds, z, gn, tau, /*hard=*/true);
    DiscVars dvars = disc_vars(tape, d, false);
    std::vector<ad::Var> cond_steps;
    cond_steps.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) cond_steps.push_back(tape.leaf(slice_step(conds, t), false));
    ad::Var probs = discriminator_prob(tape, dvars, d, unroll.outputs, cond_steps);
    ad::Var loss = tape.scale(tape.mean_all(tape.log_clamped(probs, 1e-7)), -1.0);
    const double value = tape.value(loss).data[0];
    tape.backward(loss);
    apply_adam(g.params(), grads_of(tape, collect_vars(gvars)), opt);
    return value;
}

// one discriminator Adam step on stacked [real; fake] rows; returns pre-update loss
double disc_step(Discriminator& d, nn::AdamState& opt, const std::vector<Tensor>& real_node_steps,
                 const std::vector<Tensor>& real_cond_steps, const std::vector<Tensor>& fake_node_steps,
                 const std::vector<Tensor>& fake_cond_steps) {
    const std::size_t m = real_node_steps.front().rows();
    const std::size_t steps = real_node_steps.size();
    ad::Tape tape;
    DiscVars dvars = disc_vars(tape, d, true);
    std::vector<ad::Var> node_steps, cond_steps;
    node_steps.reserve(steps);
    cond_steps.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
        node_steps.push_back(tape.leaf(vstack(real_node_steps[t], fake_node_steps[t]), false));
        cond_steps.push_back(tape.leaf(vstack(real_cond_steps[t], fake_cond_steps[t]), false));
    }
    ad::Var probs = discriminator_prob(tape, dvars, d, node_steps, cond_steps);

    // -mean log p on the real half, -mean log(1-p) on the fake half
    Tensor mask_real(std::vector<std::size_t>{2 * m, 1});
    Tensor mask_fake(std::vector<std::size_t>{2 * m, 1});
    for (std::size_t i = 0; i < m; ++i) {
        mask_real.data[i] = -1.0 / static_cast<double>(m);
        mask_fake.data[m + i] = -1.0 / static_cast<double>(m);
    }
    ad::Var log_p = tape.log_clamped(probs, 1e-7);
    Tensor ones(std::vector<std::size_t>{2 * m, 1});
    for (double& x : ones.data) x = 1.0;
    ad::Var log_q = tape.log_clamped(tape.add_const(tape.scale(probs, -1.0), std::move(ones)), 1e-7);
    ad::Var loss = tape.add(tape.sum_all(tape.mul_const(log_p, std::move(mask_real))),
                            tape.sum_all(tape.mul_const(log_q, std::move(mask_fake))));
    const double value = tape.value(loss).data[0];
    tape.backward(loss);
    apply_adam(d.params(), grads_of(tape, collect_vars(dvars)), opt);
    return value;
}

std::vector<Tensor> tensor3_steps(const Tensor& t3) {
    std::vector<Tensor> steps;
    steps.reserve(t3.shape[1]);
    for (std::size_t t = 0; t < t3.shape[1]; ++t) steps.push_back(slice_step(t3, t));
    return steps;
}

}  // namespace

double discriminator_train_step(Discriminator& d, nn::AdamState& opt, const Tensor& real_nodes,
                                const Tensor& real_conds, const Tensor& fake_nodes, const Tensor& fake_conds) {
    if (real_nodes.rank() != 3 || real_nodes.shape[0] != fake_nodes.shape[0] ||
        real_nodes.shape[1] != fake_nodes.shape[1]) {
        throw ConfigError("discriminator_train_step: real/fake shape mismatch");
    }
    return disc_step(d, opt, tensor3_steps(real_nodes), tensor3_steps(real_conds), tensor3_steps(fake_nodes),
                     tensor3_steps(fake_conds));
}

nn::GradCheckReport preflight_grad_check(const LabeledGraph& g, const TrainConfig& cfg) {
    const std::size_t m = 4;
    const std::size_t steps = std::min<std::size_t>(cfg.walk_length, 3);
    const auto n = g.num_nodes();
    const auto k = g.num_labels();
    const std::uint64_t seed = derived_seed(cfg.seed, 0, kRolePreflight);

    Rng init_rng = Rng::stream(cfg.seed, 0, kRoleInit);
    ShadowCaster caster = ShadowCaster::init(k, cfg.caster_hidden, init_rng);
    Generator gen = Generator::init(n, k, cfg.z_dim, cfg.generator_hidden, init_rng);
    Discriminator disc = Discriminator::init(n, k, cfg.discriminator_hidden, init_rng);

    WalkConfig wcfg{steps, m, cfg.walk_p, cfg.walk_q, seed};
    WalkBatch batch = sample_walks(g, wcfg);
    LabelSequences labels{batch.m, batch.t, batch.labels};
    std::vector<Tensor> label_steps = label_steps_onehot(labels, k);
    std::vector<Tensor> node_steps;
    for (std::size_t t = 0; t < steps; ++t) node_steps.push_back(onehot_nodes_step(batch, t, n));

    Tensor conds(std::vector<std::size_t>{m, steps, static_cast<std::size_t>(k)});
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t i = 0; i < m; ++i) {
            std::copy_n(&label_steps[t].data[i * k], k, &conds.data[(i * steps + t) * k]);
        }
    }
    Tensor z = gaussian_noise(m, gen.z_dim, seed, 0, kRoleNoise);
    Tensor gn = gumbel_noise(m, steps, n, seed, 0);

    nn::GradCheckReport worst;
    auto update = [&worst](const nn::GradCheckReport& r) {
        if (r.max_rel_err > worst.max_rel_err) {
            worst.max_rel_err = r.max_rel_err;
            worst.worst = r.worst;
        }
        worst.checked += r.checked;
    };

    {
        nn::GradCheckable chk;
        chk.params = caster.params();
        chk.names = caster.param_names();
        chk.forward = [&](ad::Tape& tape, std::vector<ad::Var>& leaves) {
            CasterVars vars = caster_vars(tape, caster, true);
            leaves = collect_vars(vars);
            return caster_loss(tape, caster_steps(tape, vars, caster, label_steps), label_steps);
        };
        update(nn::grad_check(chk, 1e-5, 170, seed));
    }
    {
        nn::GradCheckable chk;
        chk.params = gen.params();
        chk.names = gen.param_names();
        chk.forward = [&](ad::Tape& tape, std::vector<ad::Var>& leaves) {
            GenVars gvars = gen_vars(tape, gen, true);
            leaves = collect_vars(gvars);
            GenUnroll unroll = generator_unroll(tape, gvars, gen, conds, z, gn, 1.0, /*hard=*/false);
            DiscVars dvars = disc_vars(tape, disc, false);
            std::vector<ad::Var> cond_steps;
            for (std::size_t t = 0; t < steps; ++t) cond_steps.push_back(tape.leaf(label_steps[t], false));
            ad::Var probs = discriminator_prob(tape, dvars, disc, unroll.outputs, cond_steps);
            return tape.scale(tape.mean_all(tape.log_clamped(probs, 1e-7)), -1.0);
        };
        update(nn::grad_check(chk, 1e-5, 170, seed + 1));
    }
    {
        nn::GradCheckable chk;
        chk.params = disc.params();
        chk.names = disc.param_names();
        chk.forward = [&](ad::Tape& tape, std::vector<ad::Var>& leaves) {
            DiscVars dvars = disc_vars(tape, disc, true);
            leaves = collect_vars(dvars);
            std::vector<ad::Var> ns, cs;
            for (std::size_t t = 0; t < steps; ++t) {
                ns.push_back(tape.leaf(node_steps[t], false));
                cs.push_back(tape.leaf(label_steps[t], false));
            }
            ad::Var probs = discriminator_prob(tape, dvars, disc, ns, cs);
            return tape.scale(tape.mean_all(tape.log_clamped(probs, 1e-7)), -1.0);
        };
        update(nn::grad_check(chk, 1e-5, 170, seed + 2));
    }
    return worst;
}

TrainResult train(const LabeledGraph& g, const TrainConfig& cfg,
                  const std::function<void(const TrainSnapshot&)>& checkpoint_cb, const TrainSnapshot* resume) {
    cfg.validate();
    if (!g.connected()) throw ConfigError("training graph must be connected; run lcc() first");
    const auto n = g.num_nodes();
    const auto k = g.num_labels();

    TrainResult result;

    Models models;
    Optimizers opts;
    std::size_t start_iter = 0;
    if (resume != nullptr) {
        models = resume->models;
        opts = resume->opts;
        start_iter = resume->iter;
    } else {
        Rng init_rng = Rng::stream(cfg.seed, 0, kRoleInit);
        models.caster = ShadowCaster::init(k, cfg.caster_hidden, init_rng);
        models.generator = Generator::init(n, k, cfg.z_dim, cfg.generator_hidden, init_rng);
        models.discriminator = Discriminator::init(n, k, cfg.discriminator_hidden, init_rng);
        opts.caster = nn::AdamState::init(models.caster.params(), cfg.lr_caster);
        opts.generator = nn::AdamState::init(models.generator.params(), cfg.lr_gan);
        opts.discriminator = nn::AdamState::init(models.discriminator.params(), cfg.lr_gan);
    }

    if (cfg.preflight_grad_check && resume == nullptr) {
        nn::GradCheckReport report = preflight_grad_check(g, cfg);
        if (report.max_rel_err > 1e-5) {
            throw NumericFault("pre-flight gradient check failed at " + report.worst + " (rel err " +
                               std::to_string(report.max_rel_err) + ")");
        }
    }

    // the empirical chain bridging training shadows and control-time inputs
    {
        WalkConfig fit_cfg{cfg.walk_length, cfg.markov_fit_walks, cfg.walk_p, cfg.walk_q,
                           derived_seed(cfg.seed, 0, kRoleMarkov)};
        WalkBatch fit_batch = sample_walks(g, fit_cfg);
        result.empirical = empirical_markov(fit_batch, k, cfg.markov_alpha);
    }

    const double real_clust = stats(g).clust;
    const std::size_t target_edges = g.num_edges();

    if (cfg.pretrain_caster && resume == nullptr) {
        for (std::size_t it = 0; it < cfg.pretrain_iters; ++it) {
            WalkConfig wcfg{cfg.walk_length, cfg.batch_size, cfg.walk_p, cfg.walk_q,
                            derived_seed(cfg.seed, it, kRoleWalks + 100)};
            WalkBatch batch = sample_walks(g, wcfg);
            LabelSequences labels{batch.m, batch.t, batch.labels};
            caster_train_step(models.caster, labels, opts.caster);
        }
    }

    TrainSnapshot last_good{models, opts, start_iter};
    result.best_models = models;
    result.best_iter = start_iter;
    result.best_gap = std::numeric_limits<double>::infinity();

    auto probe_gap = [&](std::size_t iter) {
        const std::size_t walks = std::max<std::size_t>(cfg.probe_walks, 1);
        LabelSequences seq =
            sample_label_sequences(result.empirical, walks, cfg.walk_length, derived_seed(cfg.seed, iter, kRoleMarkov));
        Tensor onehot(std::vector<std::size_t>{seq.m, seq.t, static_cast<std::size_t>(k)});
        for (std::size_t i = 0; i < seq.m; ++i) {
            for (std::size_t t = 0; t < seq.t; ++t) onehot.data[(i * seq.t + t) * k + seq.at(i, t)] = 1.0;
        }
        Tensor stilde = caster_forward(models.caster, onehot);
        GeneratedWalks gw =
            generate_walks(models.generator, stilde, derived_seed(cfg.seed, iter, kRoleProbe), cfg.tau_end);
        ScoreMatrix scores = accumulate(n, gw.nodes, gw.t);
        ScoreMatrix sym = symmetrize(scores);
        BinarizeResult bin = binarize(sym, target_edges, derived_seed(cfg.seed, iter, kRoleProbe + 10));
        LabeledGraph gen_graph = LabeledGraph::from_edges(n, bin.edges, g.labels(), k);
        return std::abs(stats(gen_graph).clust - real_clust);
    };

    const double tau_span = cfg.tau_end - cfg.tau_start;
    for (std::size_t iter = start_iter; iter < cfg.iterations; ++iter) {
        const double tau =
            cfg.iterations <= 1 ? cfg.tau_start
                                : cfg.tau_start + tau_span * static_cast<double>(iter) /
                                                      static_cast<double>(cfg.iterations - 1);
        try {
            // (1) real walks and their shadows
            WalkConfig wcfg{cfg.walk_length, cfg.batch_size, cfg.walk_p, cfg.walk_q,
                            derived_seed(cfg.seed, iter, kRoleWalks)};
            WalkBatch batch = sample_walks(g, wcfg);
            LabelSequences shadows{batch.m, batch.t, batch.labels};

            // (2) caster step
            const double loss_c = caster_train_step(models.caster, shadows, opts.caster);

            // (3) conditions from the empirical chain through the caster
            LabelSequences markov_seq = sample_label_sequences(result.empirical, cfg.batch_size, cfg.walk_length,
                                                               derived_seed(cfg.seed, iter, kRoleMarkov));
            Tensor markov_onehot(std::vector<std::size_t>{markov_seq.m, markov_seq.t, static_cast<std::size_t>(k)});
            for (std::size_t i = 0; i < markov_seq.m; ++i) {
                for (std::size_t t = 0; t < markov_seq.t; ++t) {
                    markov_onehot.data[(i * markov_seq.t + t) * k + markov_seq.at(i, t)] = 1.0;
                }
            }
            Tensor stilde = caster_forward(models.caster, markov_onehot);

            // (4) generator step
            const std::uint64_t iter_seed = derived_seed(cfg.seed, iter, kRoleNoise);
            Tensor z = gaussian_noise(cfg.batch_size, models.generator.z_dim, iter_seed, 0, kRoleNoise);
            Tensor gn = gumbel_noise(cfg.batch_size, cfg.walk_length, n, iter_seed, 0);
            const double loss_g = gen_step(models.generator, models.discriminator, opts.generator, stilde, z, gn, tau);

            // (5) omega discriminator steps against the updated generator
            GeneratedWalks fake;
            {
                ad::Tape tape;
                GenVars gvars = gen_vars(tape, models.generator, false);
                GenUnroll unroll = generator_unroll(tape, gvars, models.generator, stilde, z, gn, tau, true);
                fake.m = cfg.batch_size;
                fake.t = cfg.walk_length;
                fake.nodes = std::move(unroll.indices);
            }
            std::vector<Tensor> fake_node_steps;
            for (std::size_t t = 0; t < cfg.walk_length; ++t) {
                fake_node_steps.push_back(onehot_generated_step(fake, t, n));
            }
            std::vector<Tensor> real_node_steps;
            for (std::size_t t = 0; t < cfg.walk_length; ++t) {
                real_node_steps.push_back(onehot_nodes_step(batch, t, n));
            }
            std::vector<Tensor> stilde_steps = tensor3_steps(stilde);
            std::vector<Tensor> real_cond_steps =
                cfg.real_cond_true_shadow ? label_steps_onehot(shadows, k) : stilde_steps;

            double loss_d_sum = 0.0;
            for (std::size_t w = 0; w < cfg.omega; ++w) {
                loss_d_sum += disc_step(models.discriminator, opts.discriminator, real_node_steps, real_cond_steps,
                                        fake_node_steps, stilde_steps);
            }

            result.losses.push_back({iter, loss_c, loss_g, loss_d_sum / static_cast<double>(cfg.omega)});
        } catch (const NumericFault& fault) {
            result.aborted = true;
            result.fault = fault.what();
            models = last_good.models;
            opts = last_good.opts;
            break;
        }

        const std::size_t done = iter + 1;
        if (cfg.probe_interval > 0 && (done % cfg.probe_interval == 0 || done == cfg.iterations)) {
            const double gap = probe_gap(done);
            if (gap < result.best_gap) {
                result.best_gap = gap;
                result.best_models = models;
                result.best_iter = done;
            }
        }
        if (cfg.checkpoint_interval > 0 && (done % cfg.checkpoint_interval == 0 || done == cfg.iterations)) {
            last_good = TrainSnapshot{models, opts, done};
            if (checkpoint_cb) checkpoint_cb(last_good);
        }
    }

    result.final_models = models;
    if (!std::isfinite(result.best_gap)) {
        result.best_models = models;
        result.best_gap = 0.0;
    }
    return result;
}

}  // namespace shadowcast
