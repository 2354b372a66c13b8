#pragma once

#include "rstgcn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace rstgcn::testing {

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(shape));
    std::uniform_real_distribution<double> u(lo, hi);
    for (auto& v : t.storage()) v = u(rng);
    return t;
}

inline Tensor random_mask(Shape shape, std::mt19937_64& rng, double p = 0.7) {
    Tensor t(std::move(shape));
    std::bernoulli_distribution b(p);
    for (auto& v : t.storage()) v = b(rng) ? 1.0 : 0.0;
    return t;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const Tensor& a) {
    double m = 0.0;
    for (double v : a.storage()) m = std::max(m, std::abs(v));
    return m;
}

/// Relative error with a floor on the denominator so tiny gradients compare absolutely.
inline double rel_err(double a, double b, double floor = 1e-6) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

} // namespace rstgcn::testing
