#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ad/tensor.hpp"

namespace vdea::ad {

class Tape;
namespace detail {
struct Ops;
}

// Cheap handle into a Tape node.
class Var {
public:
    Var() = default;
    const Tensor& val() const;
    std::size_t rows() const { return val().rows(); }
    std::size_t cols() const { return val().cols(); }
    double item() const { return val().item(); }
    bool valid() const { return tape_ != nullptr; }

private:
    friend class Tape;
    friend struct detail::Ops;
    Var(Tape* t, int n) : tape_(t), node_(n) {}
    Tape* tape_ = nullptr;
    int node_ = -1;
};

// Reverse-mode tape. Single-writer: one graph is recorded, backward() runs
// once, and the recorded graph is cleared (Vars from a cleared tape are
// invalid). All loops use a fixed order, so results are bitwise deterministic
// for identical inputs.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Tensor t);
    Var scalar(double v) { return constant(Tensor::scalar(v)); }

    // Leaf bound to externally owned storage; gradients land in external.grad.
    Var param(Tensor& external);

    // Computes d(loss)/d(leaf) for every requires_grad leaf via the chain
    // rule, writes each bound tensor's .grad, and clears the tape.
    void backward(Var loss);

    std::size_t node_count() const { return nodes_.size(); }
    const Tensor& value(int node) const;

private:
    friend struct detail::Ops;

    struct Node {
        Tensor owned;                // result for computed nodes and constants
        Tensor* external = nullptr;  // bound storage for param leaves
        std::vector<int> parents;
        std::function<void(Tape&, int)> backprop;  // pulls self adjoint into parents
        std::vector<double> adj;
        bool needs_grad = false;

        const Tensor& val() const { return external ? *external : owned; }
    };

    int push(Node n);
    std::vector<double>& adjoint(int node);

    std::vector<Node> nodes_;
};

// Op set. Elementwise binary ops broadcast either operand along any axis of
// size 1 (scalars, row vectors, column vectors).
Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var divide(Var a, Var b);
Var add_scalar(Var a, double s);
Var mul_scalar(Var a, double s);
Var neg(Var a);
Var exp(Var a);
Var log(Var a);
Var sigmoid(Var a);
Var tanh(Var a);
Var softplus(Var a);
Var square(Var a);
Var sqrt(Var a);
Var clamp(Var a, double lo, double hi);
Var row_sum(Var a);                // RxC -> Rx1
Var col_sum(Var a);                // RxC -> 1xC
Var sum(Var a);                    // -> 1x1
Var mean(Var a);                   // -> 1x1
Var softmax(Var a, int axis);      // axis 1: rows sum to 1; axis 0: columns
Var concat_rows(std::span<const Var> parts);
Var concat_cols(std::span<const Var> parts);
Var slice(Var a, std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1);

}  // namespace vdea::ad
