#include "rstgcn/autodiff.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rstgcn::ad {

const Tensor& Var::value() const {
    return tape->value(*this);
}

Var Tape::constant(Tensor value) {
    nodes_.push_back(Node{std::move(value), {}, false, {}});
    return Var{this, nodes_.size() - 1};
}

Var Tape::parameter(Tensor value) {
    nodes_.push_back(Node{std::move(value), {}, true, {}});
    return Var{this, nodes_.size() - 1};
}

Tensor Tape::grad(Var v) const {
    const Node& node = nodes_.at(v.id);
    if (node.grad.empty() && !node.value.empty()) return Tensor::zeros_like(node.value);
    return node.grad;
}

Var Tape::record(Tensor value, std::vector<Var> inputs, BackwardFn back) {
    bool needs = false;
    for (const Var& in : inputs) needs = needs || nodes_.at(in.id).requires_grad;
    nodes_.push_back(Node{std::move(value), {}, needs, needs ? std::move(back) : BackwardFn{}});
    return Var{this, nodes_.size() - 1};
}

void Tape::accumulate(Var v, std::span<const double> g) {
    Node& node = nodes_.at(v.id);
    if (!node.requires_grad) return;
    if (g.size() != node.value.size()) {
        throw std::logic_error("gradient size mismatch on node " + std::to_string(v.id));
    }
    if (node.grad.empty()) node.grad = Tensor::zeros_like(node.value);
    double* dst = node.grad.data().data();
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
}

void Tape::accumulate(Var v, const Tensor& g) {
    accumulate(v, g.data());
}

void Tape::backward(Var root, const Tensor& seed) {
    for (Node& n : nodes_) n.grad = Tensor();
    if (seed.size() != value(root).size()) throw std::invalid_argument("backward: seed shape mismatch");
    accumulate(root, seed.data());
    for (std::size_t i = root.id + 1; i-- > 0;) {
        Node& node = nodes_[i];
        if (!node.back || node.grad.empty()) continue;
        // Copy: the callback may accumulate into earlier nodes only, but keep
        // the upstream gradient independent of any reallocation.
        const Tensor upstream = node.grad;
        node.back(*this, upstream);
    }
}

void Tape::backward(Var root) {
    if (value(root).size() != 1) throw std::invalid_argument("backward: root must be scalar");
    backward(root, Tensor(value(root).shape(), 1.0));
}

namespace {

void require_same(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                                    shape_string(b.shape()));
    }
}

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const Mat>;

Eigen::Index idx(std::size_t v) {
    return static_cast<Eigen::Index>(v);
}

// out += a · bᵀ  (a: m×k, b: n×k, out: m×n)
void gemm_abt(const double* a, const double* b, double* out, std::size_t m, std::size_t k, std::size_t n) {
    Eigen::Map<Mat> mo(out, idx(m), idx(n));
    mo.noalias() += ConstMap(a, idx(m), idx(k)) * ConstMap(b, idx(n), idx(k)).transpose();
}

// out += aᵀ · b  (a: k×m, b: k×n, out: m×n)
void gemm_atb(const double* a, const double* b, double* out, std::size_t k, std::size_t m, std::size_t n) {
    Eigen::Map<Mat> mo(out, idx(m), idx(n));
    mo.noalias() += ConstMap(a, idx(k), idx(m)).transpose() * ConstMap(b, idx(k), idx(n));
}

} // namespace

Var matmul(Var a, Var b) {
    Tape& tape = *a.tape;
    Tensor out = rstgcn::matmul(a.value(), b.value());
    const std::size_t m = a.value().dim(0), k = a.value().dim(1), n = b.value().dim(1);
    return tape.record(std::move(out), {a, b}, [a, b, m, k, n](Tape& t, const Tensor& up) {
        if (t.requires_grad(a)) {
            Tensor ga({m, k});
            gemm_abt(up.data().data(), t.value(b).data().data(), ga.data().data(), m, n, k);
            t.accumulate(a, ga);
        }
        if (t.requires_grad(b)) {
            Tensor gb({k, n});
            gemm_atb(t.value(a).data().data(), up.data().data(), gb.data().data(), m, k, n);
            t.accumulate(b, gb);
        }
    });
}

Var transpose(Var a) {
    return a.tape->record(transpose2d(a.value()), {a},
                          [a](Tape& t, const Tensor& up) { t.accumulate(a, transpose2d(up)); });
}

Var reshape(Var a, Shape shape) {
    if (shape_size(shape) != a.value().size()) {
        throw std::invalid_argument("reshape: " + shape_string(a.shape()) + " -> " + shape_string(shape));
    }
    return a.tape->record(a.value().reshaped(std::move(shape)), {a},
                          [a](Tape& t, const Tensor& up) { t.accumulate(a, up.data()); });
}

namespace {

Tensor permute3(const Tensor& in, std::array<std::size_t, 3> axes) {
    if (in.rank() != 3) throw std::invalid_argument("permute: rank must be 3");
    const Shape& s = in.shape();
    Shape os{s[axes[0]], s[axes[1]], s[axes[2]]};
    Tensor out(os);
    std::array<std::size_t, 3> in_stride{s[1] * s[2], s[2], 1};
    std::array<std::size_t, 3> st{in_stride[axes[0]], in_stride[axes[1]], in_stride[axes[2]]};
    const double* src = in.data().data();
    double* dst = out.data().data();
    std::size_t o = 0;
    for (std::size_t i = 0; i < os[0]; ++i)
        for (std::size_t j = 0; j < os[1]; ++j)
            for (std::size_t k = 0; k < os[2]; ++k) dst[o++] = src[i * st[0] + j * st[1] + k * st[2]];
    return out;
}

} // namespace

Var permute(Var a, std::array<std::size_t, 3> axes) {
    std::array<std::size_t, 3> inverse{};
    for (std::size_t i = 0; i < 3; ++i) inverse[axes[i]] = i;
    return a.tape->record(permute3(a.value(), axes), {a},
                          [a, inverse](Tape& t, const Tensor& up) { t.accumulate(a, permute3(up, inverse)); });
}

Var select(Var a, std::size_t index) {
    const Tensor& av = a.value();
    if (av.rank() < 2 || index >= av.dim(0)) throw std::invalid_argument("select: index out of range");
    Shape sub(av.shape().begin() + 1, av.shape().end());
    const std::size_t stride = shape_size(sub);
    const auto first = av.data().begin() + static_cast<std::ptrdiff_t>(index * stride);
    Tensor out(sub, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(stride)));
    return a.tape->record(std::move(out), {a}, [a, index, stride](Tape& t, const Tensor& up) {
        Tensor g = Tensor::zeros_like(t.value(a));
        std::copy(up.data().begin(), up.data().end(), g.data().begin() + static_cast<std::ptrdiff_t>(index * stride));
        t.accumulate(a, g);
    });
}

Var add(Var a, Var b) {
    require_same(a.value(), b.value(), "add");
    Tensor out = a.value();
    const auto bv = b.value().data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    return a.tape->record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& up) {
        t.accumulate(a, up);
        t.accumulate(b, up);
    });
}

Var sub(Var a, Var b) {
    require_same(a.value(), b.value(), "sub");
    Tensor out = a.value();
    const auto bv = b.value().data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
    return a.tape->record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& up) {
        t.accumulate(a, up);
        if (t.requires_grad(b)) {
            Tensor neg = up;
            for (double& v : neg.storage()) v = -v;
            t.accumulate(b, neg);
        }
    });
}

Var mul(Var a, Var b) {
    require_same(a.value(), b.value(), "mul");
    Tensor out = a.value();
    const auto bv = b.value().data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
    return a.tape->record(std::move(out), {a, b}, [a, b](Tape& t, const Tensor& up) {
        if (t.requires_grad(a)) {
            Tensor g = up;
            const auto bv = t.value(b).data();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] *= bv[i];
            t.accumulate(a, g);
        }
        if (t.requires_grad(b)) {
            Tensor g = up;
            const auto av = t.value(a).data();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] *= av[i];
            t.accumulate(b, g);
        }
    });
}

Var mul_const(Var a, const Tensor& c) {
    require_same(a.value(), c, "mul_const");
    Tensor out = a.value();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c[i];
    return a.tape->record(std::move(out), {a}, [a, c](Tape& t, const Tensor& up) {
        Tensor g = up;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] *= c[i];
        t.accumulate(a, g);
    });
}

Var add_row_bias(Var a, Var bias) {
    const Tensor& av = a.value();
    if (av.rank() != 2 || bias.value().size() != av.dim(1)) {
        throw std::invalid_argument("add_row_bias: bias length must equal column count");
    }
    const std::size_t m = av.dim(0), n = av.dim(1);
    Tensor out = av;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out.at(i, j) += bias.value()[j];
    return a.tape->record(std::move(out), {a, bias}, [a, bias, m, n](Tape& t, const Tensor& up) {
        t.accumulate(a, up);
        if (t.requires_grad(bias)) {
            Tensor g(t.value(bias).shape());
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) g[j] += up.at(i, j);
            t.accumulate(bias, g);
        }
    });
}

Var sigmoid(Var a) {
    Tensor out = a.value();
    for (double& v : out.storage()) v = 1.0 / (1.0 + std::exp(-v));
    Tensor saved = out;
    return a.tape->record(std::move(out), {a}, [a, saved = std::move(saved)](Tape& t, const Tensor& up) {
        Tensor g = up;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] *= saved[i] * (1.0 - saved[i]);
        t.accumulate(a, g);
    });
}

Var relu(Var a) {
    Tensor out = a.value();
    for (double& v : out.storage()) v = v > 0.0 ? v : 0.0;
    return a.tape->record(std::move(out), {a}, [a](Tape& t, const Tensor& up) {
        const auto x = t.value(a).data();
        Tensor g = up;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = x[i] > 0.0 ? g[i] : 0.0;
        t.accumulate(a, g);
    });
}

namespace {

Tensor softmax_rows_value(const Tensor& x) {
    if (x.rank() != 2) throw std::invalid_argument("softmax_rows: rank must be 2");
    const std::size_t m = x.dim(0), n = x.dim(1);
    Tensor out({m, n});
    for (std::size_t i = 0; i < m; ++i) {
        double mx = x.at(i, 0);
        for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, x.at(i, j));
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            out.at(i, j) = std::exp(x.at(i, j) - mx);
            sum += out.at(i, j);
        }
        for (std::size_t j = 0; j < n; ++j) out.at(i, j) /= sum;
    }
    return out;
}

} // namespace

Var softmax_rows(Var a) {
    Tensor out = softmax_rows_value(a.value());
    const std::size_t m = out.dim(0), n = out.dim(1);
    Tensor saved = out;
    return a.tape->record(std::move(out), {a}, [a, saved = std::move(saved), m, n](Tape& t, const Tensor& up) {
        Tensor g({m, n});
        for (std::size_t i = 0; i < m; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < n; ++j) dot += up.at(i, j) * saved.at(i, j);
            for (std::size_t j = 0; j < n; ++j) g.at(i, j) = saved.at(i, j) * (up.at(i, j) - dot);
        }
        t.accumulate(a, g);
    });
}

namespace {

// col[(i·3 + s), (n·T + t)] = x[n, i, t + s − 1], zero outside the series.
Tensor im2col3(const Tensor& x) {
    const std::size_t nodes = x.dim(0), cin = x.dim(1), steps = x.dim(2);
    const std::size_t cols = nodes * steps;
    Tensor col({cin * 3, cols});
    double* pc = col.data().data();
    const double* px = x.data().data();
    for (std::size_t n = 0; n < nodes; ++n)
        for (std::size_t i = 0; i < cin; ++i) {
            const double* xi = px + (n * cin + i) * steps;
            for (std::size_t s = 0; s < 3; ++s) {
                double* row = pc + (i * 3 + s) * cols + n * steps;
                for (std::size_t t = 0; t < steps; ++t) {
                    const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + s) - 1;
                    row[t] = src >= 0 && src < static_cast<std::ptrdiff_t>(steps) ? xi[src] : 0.0;
                }
            }
        }
    return col;
}

void col2im3(const Tensor& col, double* gx, std::size_t nodes, std::size_t cin, std::size_t steps) {
    const std::size_t cols = nodes * steps;
    const double* pc = col.data().data();
    for (std::size_t n = 0; n < nodes; ++n)
        for (std::size_t i = 0; i < cin; ++i) {
            double* gi = gx + (n * cin + i) * steps;
            for (std::size_t s = 0; s < 3; ++s) {
                const double* row = pc + (i * 3 + s) * cols + n * steps;
                for (std::size_t t = 0; t < steps; ++t) {
                    const std::ptrdiff_t dst = static_cast<std::ptrdiff_t>(t + s) - 1;
                    if (dst >= 0 && dst < static_cast<std::ptrdiff_t>(steps)) gi[dst] += row[t];
                }
            }
        }
}

} // namespace

Var temporal_conv(Var x, Var kernel, Var bias) {
    const Tensor& xv = x.value();
    const Tensor& kv = kernel.value();
    if (xv.rank() != 3 || kv.rank() != 3 || kv.dim(1) != xv.dim(1) || kv.dim(2) != 3 ||
        bias.value().size() != kv.dim(0)) {
        throw std::invalid_argument("temporal_conv: input " + shape_string(xv.shape()) + " incompatible with kernel " +
                                    shape_string(kv.shape()));
    }
    const std::size_t nodes = xv.dim(0), cin = xv.dim(1), steps = xv.dim(2), cout = kv.dim(0);
    const std::size_t cols = nodes * steps;
    Tensor col = im2col3(xv);
    // kernel viewed as cout × (cin·3); result laid out cout × (nodes·steps)
    Mat y = ConstMap(kv.data().data(), idx(cout), idx(cin * 3)) * ConstMap(col.data().data(), idx(cin * 3), idx(cols));
    Tensor out({nodes, cout, steps});
    const double* pb = bias.value().data().data();
    for (std::size_t n = 0; n < nodes; ++n)
        for (std::size_t o = 0; o < cout; ++o)
            for (std::size_t t = 0; t < steps; ++t) out.at(n, o, t) = y(idx(o), idx(n * steps + t)) + pb[o];
    return x.tape->record(
        std::move(out), {x, kernel, bias},
        [x, kernel, bias, nodes, cin, steps, cout, cols, col = std::move(col)](Tape& t, const Tensor& up) {
            Mat u(idx(cout), idx(cols));
            for (std::size_t n = 0; n < nodes; ++n)
                for (std::size_t o = 0; o < cout; ++o)
                    for (std::size_t s = 0; s < steps; ++s) u(idx(o), idx(n * steps + s)) = up.at(n, o, s);
            if (t.requires_grad(kernel)) {
                Tensor gk(t.value(kernel).shape());
                Eigen::Map<Mat>(gk.data().data(), idx(cout), idx(cin * 3)).noalias() =
                    u * ConstMap(col.data().data(), idx(cin * 3), idx(cols)).transpose();
                t.accumulate(kernel, gk);
            }
            if (t.requires_grad(bias)) {
                Tensor gb(t.value(bias).shape());
                for (std::size_t o = 0; o < cout; ++o) gb[o] = u.row(idx(o)).sum();
                t.accumulate(bias, gb);
            }
            if (t.requires_grad(x)) {
                Tensor gcol({cin * 3, cols});
                Eigen::Map<Mat>(gcol.data().data(), idx(cin * 3), idx(cols)).noalias() =
                    ConstMap(t.value(kernel).data().data(), idx(cout), idx(cin * 3)).transpose() * u;
                Tensor gx(t.value(x).shape());
                col2im3(gcol, gx.data().data(), nodes, cin, steps);
                t.accumulate(x, gx);
            }
        });
}

Var masked_sse(Var pred, const Tensor& target, const Tensor& mask, double scale) {
    require_same(pred.value(), target, "masked_sse");
    require_same(pred.value(), mask, "masked_sse");
    const auto p = pred.value().data();
    double sse = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (mask[i] == 0.0) continue;
        const double d = p[i] - target[i];
        sse += mask[i] * d * d;
    }
    return pred.tape->record(Tensor({1}, sse * scale), {pred},
                             [pred, target, mask, scale](Tape& t, const Tensor& up) {
                                 const auto p = t.value(pred).data();
                                 Tensor g(t.value(pred).shape());
                                 for (std::size_t i = 0; i < g.size(); ++i) {
                                     if (mask[i] == 0.0) continue;
                                     g[i] = 2.0 * scale * mask[i] * (p[i] - target[i]) * up[0];
                                 }
                                 t.accumulate(pred, g);
                             });
}

} // namespace rstgcn::ad
