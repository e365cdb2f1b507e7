#ifndef SHADOWCAST_AUTODIFF_HPP
#define SHADOWCAST_AUTODIFF_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "shadowcast/tensor.hpp"

namespace shadowcast::ad {

class Tape;

struct Var {
    std::int32_t id = -1;
};

/// Reverse-mode tape over Tensor values. Ops append nodes in topological
/// order; backward() walks the tape in reverse. Every op checks its output for
/// NaN/Inf. Build one tape per loss evaluation.
class Tape {
  public:
    Var leaf(Tensor value, bool needs_grad);

    const Tensor& value(Var v) const { return nodes_[v.id].value; }
    const Tensor& grad(Var v) const { return nodes_[v.id].grad; }

    // C = A (m,k) * B (k,n)
    Var matmul(Var a, Var b);
    // C = A (m,k) * B(n,k)^T  -> (m,n)
    Var matmul_nt(Var a, Var b);
    Var add(Var a, Var b);              // same shape
    Var add_rowvec(Var m, Var row);     // (m,n) + (n,)
    Var mul(Var a, Var b);              // elementwise
    Var mul_const(Var a, Tensor c);     // elementwise by constant
    Var add_const(Var a, Tensor c);     // elementwise plus constant
    Var scale(Var a, double s);
    Var concat_cols(Var a, Var b);      // (m,na) ++ (m,nb)
    Var slice_cols(Var a, std::size_t lo, std::size_t hi);  // columns [lo, hi)
    Var sigmoid(Var a);
    Var tanh(Var a);
    Var softmax_rows(Var a);            // stable, per-row
    Var log_clamped(Var a, double lo);  // log(max(x, lo)); zero gradient below lo
    Var sum_all(Var a);                 // -> scalar
    Var mean_all(Var a);                // -> scalar

    // Forward value is `hard` (a constant); gradients pass through to `soft`
    // unchanged. The straight-through estimator for discrete sampling.
    Var straight_through(Var soft, Tensor hard);

    void backward(Var loss);
    std::size_t size() const { return nodes_.size(); }

  private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool needs_grad = false;
        std::function<void(Tape&, const Tensor&)> back;  // accumulate into parents
    };

    Var push(Tensor value, bool needs_grad, std::function<void(Tape&, const Tensor&)> back, const char* op);
    Tensor& grad_ref(Var v) { return nodes_[v.id].grad; }
    bool needs(Var v) const { return nodes_[v.id].needs_grad; }

    std::vector<Node> nodes_;
};

// C += A (m,k) * B (k,n); raw row-major kernels shared with backward passes
void matmul_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);
// C += A (m,k) * B (n,k)^T
void matmul_nt_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);
// C += A (m,k)^T * B (m,n)  -> (k,n)
void matmul_tn_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n);

}  // namespace shadowcast::ad

#endif
