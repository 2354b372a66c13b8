#pragma once

#include "rstgcn/tensor.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

// Minimal reverse-mode differentiation over dense tensors. A Tape records
// every value produced during one forward pass; backward() walks it in
// reverse, accumulating gradients into nodes that depend on a parameter.
namespace rstgcn::ad {

class Tape;

struct Var {
    Tape* tape = nullptr;
    std::size_t id = 0;

    const Tensor& value() const;
    const Shape& shape() const { return value().shape(); }
};

class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Tensor value);
    Var parameter(Tensor value);

    const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
    bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }

    /// Gradient accumulated into v by the last backward(); zeros if none reached it.
    Tensor grad(Var v) const;

    /// Seeds d(root) = seed and propagates to every parameter.
    void backward(Var root, const Tensor& seed);
    /// Scalar root with unit seed.
    void backward(Var root);

    std::size_t size() const noexcept { return nodes_.size(); }

    // Used by op implementations.
    using BackwardFn = std::function<void(Tape&, const Tensor& upstream)>;
    Var record(Tensor value, std::vector<Var> inputs, BackwardFn back);
    void accumulate(Var v, const Tensor& g);
    void accumulate(Var v, std::span<const double> g);

private:
    struct Node {
        Tensor value;
        Tensor grad;
        bool requires_grad = false;
        BackwardFn back;
    };
    std::vector<Node> nodes_;
};

// 2-D ops
Var matmul(Var a, Var b);
Var transpose(Var a);

// shape ops
Var reshape(Var a, Shape shape);
/// out.dim(i) = in.dim(axes[i]) for rank-3 tensors.
Var permute(Var a, std::array<std::size_t, 3> axes);

/// a[index] along the first axis.
Var select(Var a, std::size_t index);

// elementwise ops
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var mul_const(Var a, const Tensor& c);
/// a: m×n, bias: length n added to every row.
Var add_row_bias(Var a, Var bias);
Var sigmoid(Var a);
Var relu(Var a);
Var softmax_rows(Var a);

/// 1×3 temporal convolution with zero padding over x: N×C_in×T.
/// kernel: C_out×C_in×3, bias: C_out. Output N×C_out×T (pre-activation).
Var temporal_conv(Var x, Var kernel, Var bias);

/// Σ mask·(pred−target)² · scale, returned as a 1-element tensor.
Var masked_sse(Var pred, const Tensor& target, const Tensor& mask, double scale);

} // namespace rstgcn::ad
