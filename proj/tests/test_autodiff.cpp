#include "rstgcn/autodiff.hpp"

#include "support.hpp"

#include <doctest.h>

#include <functional>

using namespace rstgcn;
using rstgcn::testing::random_tensor;
using rstgcn::testing::rel_err;

namespace {

using Build = std::function<ad::Var(ad::Tape&, const std::vector<ad::Var>&)>;

double weighted_sum(const Tensor& y, const Tensor& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * w[i];
    return s;
}

// Checks d<w, f(inputs)>/d inputs against central differences.
void check_gradients(const Build& f, std::vector<Tensor> inputs, std::mt19937_64& rng, double eps = 1e-6,
                     double tol = 1e-6) {
    ad::Tape tape;
    std::vector<ad::Var> vars;
    for (const auto& t : inputs) vars.push_back(tape.parameter(t));
    ad::Var out = f(tape, vars);
    Tensor w = random_tensor(out.shape(), rng);
    tape.backward(out, w);
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        Tensor g = tape.grad(vars[k]);
        for (std::size_t i = 0; i < inputs[k].size(); ++i) {
            auto eval_at = [&](double delta) {
                std::vector<Tensor> shifted = inputs;
                shifted[k][i] += delta;
                ad::Tape t2;
                std::vector<ad::Var> v2;
                for (const auto& s : shifted) v2.push_back(t2.constant(s));
                return weighted_sum(f(t2, v2).value(), w);
            };
            const double fd = (eval_at(eps) - eval_at(-eps)) / (2 * eps);
            CHECK_MESSAGE(rel_err(g[i], fd, 1e-4) < tol, "input ", k, " index ", i, ": ", g[i], " vs ", fd);
        }
    }
}

} // namespace

TEST_CASE("forward values of elementwise ops") {
    ad::Tape t;
    auto a = t.constant(Tensor({3}, std::vector<double>{-1.0, 0.0, 2.0}));
    auto b = t.constant(Tensor({3}, std::vector<double>{1.0, 2.0, 3.0}));
    CHECK(ad::add(a, b).value().storage() == std::vector<double>{0.0, 2.0, 5.0});
    CHECK(ad::sub(a, b).value().storage() == std::vector<double>{-2.0, -2.0, -1.0});
    CHECK(ad::mul(a, b).value().storage() == std::vector<double>{-1.0, 0.0, 6.0});
    CHECK(ad::relu(a).value().storage() == std::vector<double>{0.0, 0.0, 2.0});
    CHECK(ad::sigmoid(a).value()[1] == 0.5);
}

TEST_CASE("softmax rows sum to one and survive large inputs") {
    ad::Tape t;
    auto a = t.constant(Tensor({2, 3}, std::vector<double>{1000.0, 1000.0, 1000.0, -5.0, 0.0, 5.0}));
    Tensor s = ad::softmax_rows(a).value();
    CHECK(s.all_finite());
    CHECK(s.at(0, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(s.at(1, 0) + s.at(1, 1) + s.at(1, 2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("permute and select move the expected entries") {
    ad::Tape t;
    Tensor x({2, 3, 4});
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
    auto v = t.constant(x);
    Tensor p = ad::permute(v, {2, 0, 1}).value();
    REQUIRE(p.shape() == Shape{4, 2, 3});
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t k = 0; k < 4; ++k) CHECK(p.at(k, i, j) == x.at(i, j, k));
    Tensor s = ad::select(v, 1).value();
    REQUIRE(s.shape() == Shape{3, 4});
    CHECK(s.at(2, 3) == x.at(1, 2, 3));
}

TEST_CASE("temporal convolution matches a direct loop") {
    std::mt19937_64 rng(11);
    Tensor x = random_tensor({3, 2, 5}, rng), k = random_tensor({4, 2, 3}, rng), b = random_tensor({4}, rng);
    ad::Tape t;
    Tensor y = ad::temporal_conv(t.constant(x), t.constant(k), t.constant(b)).value();
    REQUIRE(y.shape() == Shape{3, 4, 5});
    for (std::size_t n = 0; n < 3; ++n)
        for (std::size_t o = 0; o < 4; ++o)
            for (std::size_t s = 0; s < 5; ++s) {
                double acc = b[o];
                for (std::size_t i = 0; i < 2; ++i)
                    for (std::size_t j = 0; j < 3; ++j) {
                        const long src = static_cast<long>(s + j) - 1;
                        if (src >= 0 && src < 5) acc += k.at(o, i, j) * x.at(n, i, static_cast<std::size_t>(src));
                    }
                CHECK(y.at(n, o, s) == doctest::Approx(acc).epsilon(1e-12));
            }
}

TEST_CASE("gradients match finite differences for every op") {
    std::mt19937_64 rng(5);
    SUBCASE("matmul") {
        check_gradients([](ad::Tape&, const auto& v) { return ad::matmul(v[0], v[1]); },
                        {random_tensor({3, 4}, rng), random_tensor({4, 2}, rng)}, rng);
    }
    SUBCASE("transpose and reshape") {
        check_gradients([](ad::Tape&, const auto& v) { return ad::reshape(ad::transpose(v[0]), {2, 6}); },
                        {random_tensor({3, 4}, rng)}, rng);
    }
    SUBCASE("permute") {
        check_gradients([](ad::Tape&, const auto& v) { return ad::permute(v[0], {1, 2, 0}); },
                        {random_tensor({2, 3, 4}, rng)}, rng);
    }
    SUBCASE("select") {
        check_gradients([](ad::Tape&, const auto& v) { return ad::select(v[0], 2); },
                        {random_tensor({3, 2, 2}, rng)}, rng);
    }
    SUBCASE("add sub mul") {
        check_gradients(
            [](ad::Tape&, const auto& v) { return ad::mul(ad::add(v[0], v[1]), ad::sub(v[0], v[1])); },
            {random_tensor({2, 3}, rng), random_tensor({2, 3}, rng)}, rng);
    }
    SUBCASE("mul_const and row bias") {
        Tensor c = random_tensor({3, 2}, rng);
        check_gradients([c](ad::Tape&, const auto& v) { return ad::add_row_bias(ad::mul_const(v[0], c), v[1]); },
                        {random_tensor({3, 2}, rng), random_tensor({2}, rng)}, rng);
    }
    SUBCASE("sigmoid") {
        check_gradients([](ad::Tape&, const auto& v) { return ad::sigmoid(v[0]); }, {random_tensor({4, 3}, rng, -3, 3)},
                        rng);
    }
    SUBCASE("relu away from the kink") {
        Tensor x = random_tensor({10}, rng);
        for (auto& e : x.storage()) e += e >= 0 ? 0.1 : -0.1;
        check_gradients([](ad::Tape&, const auto& v) { return ad::relu(v[0]); }, {x}, rng);
    }
    SUBCASE("softmax_rows") {
        check_gradients([](ad::Tape&, const auto& v) { return ad::softmax_rows(v[0]); },
                        {random_tensor({3, 4}, rng, -2, 2)}, rng);
    }
    SUBCASE("temporal_conv") {
        check_gradients([](ad::Tape&, const auto& v) { return ad::temporal_conv(v[0], v[1], v[2]); },
                        {random_tensor({2, 3, 4}, rng), random_tensor({2, 3, 3}, rng), random_tensor({2}, rng)}, rng);
    }
    SUBCASE("masked_sse") {
        Tensor target = random_tensor({3, 3}, rng), mask = rstgcn::testing::random_mask({3, 3}, rng);
        check_gradients([&](ad::Tape&, const auto& v) { return ad::masked_sse(v[0], target, mask, 0.5); },
                        {random_tensor({3, 3}, rng)}, rng);
    }
}

TEST_CASE("shared subexpressions accumulate gradients") {
    ad::Tape t;
    auto x = t.parameter(Tensor({1}, 3.0));
    auto y = ad::mul(x, x);  // x²
    auto z = ad::add(y, x);  // x² + x
    t.backward(z);
    CHECK(t.grad(x)[0] == doctest::Approx(7.0));
}

TEST_CASE("constants receive no gradient and unreached parameters read zero") {
    ad::Tape t;
    auto c = t.constant(Tensor({2}, 1.0));
    auto p = t.parameter(Tensor({2}, 2.0));
    auto unused = t.parameter(Tensor({2}, 5.0));
    auto out = ad::mul(c, p);
    CHECK_FALSE(t.requires_grad(c));
    t.backward(out, Tensor({2}, 1.0));
    CHECK(t.grad(p).storage() == std::vector<double>{1.0, 1.0});
    CHECK(t.grad(unused).storage() == std::vector<double>{0.0, 0.0});
}

TEST_CASE("shape errors are reported") {
    ad::Tape t;
    auto a = t.constant(Tensor({2, 3}));
    CHECK_THROWS(ad::matmul(a, a));
    CHECK_THROWS(ad::add(a, t.constant(Tensor({3, 2}))));
    CHECK_THROWS(ad::reshape(a, {5}));
}
