#include "shadowcast/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "shadowcast/error.hpp"

namespace shadowcast::ad {

void matmul_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * k;
        double* ci = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ai[p];
            if (av == 0.0) continue;
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

void matmul_nt_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * k;
        double* ci = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
            ci[j] += acc;
        }
    }
}

void matmul_tn_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a + i * k;
        const double* bi = b + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ai[p];
            if (av == 0.0) continue;
            double* cp = c + p * n;
            for (std::size_t j = 0; j < n; ++j) cp[j] += av * bi[j];
        }
    }
}

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw ConfigError(std::string("autodiff: ") + msg);
}

}  // namespace

Var Tape::push(Tensor value, bool needs_grad, std::function<void(Tape&, const Tensor&)> back, const char* op) {
    check_finite(value, op);
    Node node;
    node.value = std::move(value);
    node.needs_grad = needs_grad;
    node.back = std::move(back);
    if (needs_grad) node.grad = Tensor(node.value.shape);
    nodes_.push_back(std::move(node));
    return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
}

Var Tape::leaf(Tensor value, bool needs_grad) {
    return push(std::move(value), needs_grad, nullptr, "leaf");
}

Var Tape::matmul(Var a, Var b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    require(ta.rank() == 2 && tb.rank() == 2 && ta.cols() == tb.rows(), "matmul shape mismatch");
    const std::size_t m = ta.rows(), k = ta.cols(), n = tb.cols();
    Tensor out(std::vector<std::size_t>{m, n});
    matmul_acc(ta.data.data(), tb.data.data(), out.data.data(), m, k, n);
    const bool ng = needs(a) || needs(b);
    return push(std::move(out), ng, [a, b, m, k, n](Tape& t, const Tensor& g) {
        if (t.needs(a)) matmul_nt_acc(g.data.data(), t.value(b).data.data(), t.grad_ref(a).data.data(), m, n, k);
        if (t.needs(b)) matmul_tn_acc(t.value(a).data.data(), g.data.data(), t.grad_ref(b).data.data(), m, k, n);
    }, "matmul");
}

Var Tape::matmul_nt(Var a, Var b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    require(ta.rank() == 2 && tb.rank() == 2 && ta.cols() == tb.cols(), "matmul_nt shape mismatch");
    const std::size_t m = ta.rows(), k = ta.cols(), n = tb.rows();
    Tensor out(std::vector<std::size_t>{m, n});
    matmul_nt_acc(ta.data.data(), tb.data.data(), out.data.data(), m, k, n);
    const bool ng = needs(a) || needs(b);
    return push(std::move(out), ng, [a, b, m, k, n](Tape& t, const Tensor& g) {
        // C = A * B^T: dA += G * B ; dB += G^T * A
        if (t.needs(a)) matmul_acc(g.data.data(), t.value(b).data.data(), t.grad_ref(a).data.data(), m, n, k);
        if (t.needs(b)) matmul_tn_acc(g.data.data(), t.value(a).data.data(), t.grad_ref(b).data.data(), m, n, k);
    }, "matmul_nt");
}

Var Tape::add(Var a, Var b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    require(ta.same_shape(tb), "add shape mismatch");
    Tensor out = ta;
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] += tb.data[i];
    return push(std::move(out), needs(a) || needs(b), [a, b](Tape& t, const Tensor& g) {
        if (t.needs(a)) {
            auto& ga = t.grad_ref(a).data;
            for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g.data[i];
        }
        if (t.needs(b)) {
            auto& gb = t.grad_ref(b).data;
            for (std::size_t i = 0; i < g.numel(); ++i) gb[i] += g.data[i];
        }
    }, "add");
}

Var Tape::add_rowvec(Var m, Var row) {
    const Tensor& tm = value(m);
    const Tensor& tr = value(row);
    require(tm.rank() == 2 && tr.rank() == 1 && tm.cols() == tr.shape[0], "add_rowvec shape mismatch");
    Tensor out = tm;
    const std::size_t rows = tm.rows(), cols = tm.cols();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) out.data[i * cols + j] += tr.data[j];
    }
    return push(std::move(out), needs(m) || needs(row), [m, row, rows, cols](Tape& t, const Tensor& g) {
        if (t.needs(m)) {
            auto& gm = t.grad_ref(m).data;
            for (std::size_t i = 0; i < g.numel(); ++i) gm[i] += g.data[i];
        }
        if (t.needs(row)) {
            auto& gr = t.grad_ref(row).data;
            for (std::size_t i = 0; i < rows; ++i) {
                for (std::size_t j = 0; j < cols; ++j) gr[j] += g.data[i * cols + j];
            }
        }
    }, "add_rowvec");
}

Var Tape::mul(Var a, Var b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    require(ta.same_shape(tb), "mul shape mismatch");
    Tensor out = ta;
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] *= tb.data[i];
    return push(std::move(out), needs(a) || needs(b), [a, b](Tape& t, const Tensor& g) {
        if (t.needs(a)) {
            auto& ga = t.grad_ref(a).data;
            const auto& vb = t.value(b).data;
            for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g.data[i] * vb[i];
        }
        if (t.needs(b)) {
            auto& gb = t.grad_ref(b).data;
            const auto& va = t.value(a).data;
            for (std::size_t i = 0; i < g.numel(); ++i) gb[i] += g.data[i] * va[i];
        }
    }, "mul");
}

Var Tape::mul_const(Var a, Tensor c) {
    const Tensor& ta = value(a);
    require(ta.same_shape(c), "mul_const shape mismatch");
    Tensor out = ta;
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] *= c.data[i];
    auto shared = std::make_shared<Tensor>(std::move(c));
    return push(std::move(out), needs(a), [a, shared](Tape& t, const Tensor& g) {
        if (t.needs(a)) {
            auto& ga = t.grad_ref(a).data;
            for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g.data[i] * shared->data[i];
        }
    }, "mul_const");
}

Var Tape::add_const(Var a, Tensor c) {
    const Tensor& ta = value(a);
    require(ta.same_shape(c), "add_const shape mismatch");
    Tensor out = ta;
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] += c.data[i];
    return push(std::move(out), needs(a), [a](Tape& t, const Tensor& g) {
        if (t.needs(a)) {
            auto& ga = t.grad_ref(a).data;
            for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g.data[i];
        }
    }, "add_const");
}

Var Tape::scale(Var a, double s) {
    Tensor out = value(a);
    for (double& x : out.data) x *= s;
    return push(std::move(out), needs(a), [a, s](Tape& t, const Tensor& g) {
        if (t.needs(a)) {
            auto& ga = t.grad_ref(a).data;
            for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g.data[i] * s;
        }
    }, "scale");
}

Var Tape::concat_cols(Var a, Var b) {
    const Tensor& ta = value(a);
    const Tensor& tb = value(b);
    require(ta.rank() == 2 && tb.rank() == 2 && ta.rows() == tb.rows(), "concat_cols shape mismatch");
    const std::size_t rows = ta.rows(), na = ta.cols(), nb = tb.cols();
    Tensor out(std::vector<std::size_t>{rows, na + nb});
    for (std::size_t i = 0; i < rows; ++i) {
        std::copy_n(&ta.data[i * na], na, &out.data[i * (na + nb)]);
        std::copy_n(&tb.data[i * nb], nb, &out.data[i * (na + nb) + na]);
    }
    return push(std::move(out), needs(a) || needs(b), [a, b, rows, na, nb](Tape& t, const Tensor& g) {
        if (t.needs(a)) {
            auto& ga = t.grad_ref(a).data;
            for (std::size_t i = 0; i < rows; ++i) {
                for (std::size_t j = 0; j < na; ++j) ga[i * na + j] += g.data[i * (na + nb) + j];
            }
        }
        if (t.needs(b)) {
            auto& gb = t.grad_ref(b).data;
            for (std::size_t i = 0; i < rows; ++i) {
                for (std::size_t j = 0; j < nb; ++j) gb[i * nb + j] += g.data[i * (na + nb) + na + j];
            }
        }
    }, "concat_cols");
}

Var Tape::slice_cols(Var a, std::size_t lo, std::size_t hi) {
    const Tensor& ta = value(a);
    require(ta.rank() == 2 && lo < hi && hi <= ta.cols(), "slice_cols out of range");
    const std::size_t rows = ta.rows(), cols = ta.cols(), w = hi - lo;
    Tensor out(std::vector<std::size_t>{rows, w});
    for (std::size_t i = 0; i < rows; ++i) std::copy_n(&ta.data[i * cols + lo], w, &out.data[i * w]);
    return push(std::move(out), needs(a), [a, rows, cols, lo, w](Tape& t, const Tensor& g) {
        if (!t.needs(a)) return;
        auto& ga = t.grad_ref(a).data;
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < w; ++j) ga[i * cols + lo + j] += g.data[i * w + j];
        }
    }, "slice_cols");
}

Var Tape::sigmoid(Var a) {
    Tensor out = value(a);
    for (double& x : out.data) x = 1.0 / (1.0 + std::exp(-x));
    Var self{static_cast<std::int32_t>(nodes_.size())};
    return push(std::move(out), needs(a), [a, self](Tape& t, const Tensor& g) {
        if (t.needs(a)) {
            auto& ga = t.grad_ref(a).data;
            const auto& y = t.value(self).data;
            for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g.data[i] * y[i] * (1.0 - y[i]);
        }
    }, "sigmoid");
}

Var Tape::tanh(Var a) {
    Tensor out = value(a);
    for (double& x : out.data) x = std::tanh(x);
    Var self{static_cast<std::int32_t>(nodes_.size())};
    return push(std::move(out), needs(a), [a, self](Tape& t, const Tensor& g) {
        if (t.needs(a)) {
            auto& ga = t.grad_ref(a).data;
            const auto& y = t.value(self).data;
            for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g.data[i] * (1.0 - y[i] * y[i]);
        }
    }, "tanh");
}

Var Tape::softmax_rows(Var a) {
    const Tensor& ta = value(a);
    require(ta.rank() == 2, "softmax_rows needs a matrix");
    const std::size_t rows = ta.rows(), cols = ta.cols();
    Tensor out = ta;
    for (std::size_t i = 0; i < rows; ++i) {
        double* row = &out.data[i * cols];
        double mx = row[0];
        for (std::size_t j = 1; j < cols; ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
        }
        for (std::size_t j = 0; j < cols; ++j) row[j] /= sum;
    }
    Var self{static_cast<std::int32_t>(nodes_.size())};
    return push(std::move(out), needs(a), [a, self, rows, cols](Tape& t, const Tensor& g) {
        if (!t.needs(a)) return;
        auto& ga = t.grad_ref(a).data;
        const auto& y = t.value(self).data;
        for (std::size_t i = 0; i < rows; ++i) {
            const double* yi = &y[i * cols];
            const double* gi = &g.data[i * cols];
            double dot = 0.0;
            for (std::size_t j = 0; j < cols; ++j) dot += yi[j] * gi[j];
            for (std::size_t j = 0; j < cols; ++j) ga[i * cols + j] += yi[j] * (gi[j] - dot);
        }
    }, "softmax_rows");
}

Var Tape::log_clamped(Var a, double lo) {
    const Tensor& ta = value(a);
    Tensor out = ta;
    for (double& x : out.data) x = std::log(std::max(x, lo));
    return push(std::move(out), needs(a), [a, lo](Tape& t, const Tensor& g) {
        if (!t.needs(a)) return;
        auto& ga = t.grad_ref(a).data;
        const auto& x = t.value(a).data;
        for (std::size_t i = 0; i < g.numel(); ++i) {
            if (x[i] > lo) ga[i] += g.data[i] / x[i];
        }
    }, "log_clamped");
}

Var Tape::sum_all(Var a) {
    double sum = 0.0;
    for (double x : value(a).data) sum += x;
    Tensor out(std::vector<std::size_t>{1});
    out.data[0] = sum;
    return push(std::move(out), needs(a), [a](Tape& t, const Tensor& g) {
        if (!t.needs(a)) return;
        auto& ga = t.grad_ref(a).data;
        for (double& x : ga) x += g.data[0];
    }, "sum_all");
}

Var Tape::mean_all(Var a) {
    const double inv = 1.0 / static_cast<double>(value(a).numel());
    double sum = 0.0;
    for (double x : value(a).data) sum += x;
    Tensor out(std::vector<std::size_t>{1});
    out.data[0] = sum * inv;
    return push(std::move(out), needs(a), [a, inv](Tape& t, const Tensor& g) {
        if (!t.needs(a)) return;
        auto& ga = t.grad_ref(a).data;
        for (double& x : ga) x += g.data[0] * inv;
    }, "mean_all");
}

Var Tape::straight_through(Var soft, Tensor hard) {
    require(value(soft).same_shape(hard), "straight_through shape mismatch");
    return push(std::move(hard), needs(soft), [soft](Tape& t, const Tensor& g) {
        if (!t.needs(soft)) return;
        auto& gs = t.grad_ref(soft).data;
        for (std::size_t i = 0; i < g.numel(); ++i) gs[i] += g.data[i];
    }, "straight_through");
}

void Tape::backward(Var loss) {
    require(value(loss).numel() == 1, "backward needs a scalar loss");
    require(nodes_[loss.id].needs_grad, "loss does not depend on any parameter");
    grad_ref(loss).data[0] = 1.0;
    for (std::int32_t i = loss.id; i >= 0; --i) {
        Node& node = nodes_[i];
        if (!node.needs_grad || !node.back) continue;
        node.back(*this, node.grad);
    }
}

}  // namespace shadowcast::ad
