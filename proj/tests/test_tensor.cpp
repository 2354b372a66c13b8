#include "rstgcn/tensor.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace rstgcn;
using rstgcn::testing::random_tensor;

TEST_CASE("shape helpers") {
    CHECK(shape_size({}) == 1);
    CHECK(shape_size({2, 3, 4}) == 24);
    CHECK(shape_size({2, 0}) == 0);
    CHECK(shape_string({2, 3}) == "[2x3]");
}

TEST_CASE("construction and indexing") {
    Tensor t({2, 3}, 1.5);
    CHECK(t.size() == 6);
    CHECK(t.rank() == 2);
    CHECK(t.at(1, 2) == 1.5);
    t.at(1, 2) = 4.0;
    CHECK(t[5] == 4.0);

    Tensor c({2, 2, 2});
    c.at(1, 0, 1) = 7.0;
    CHECK(c[5] == 7.0);

    CHECK_THROWS_AS(Tensor({2, 2}, std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST_CASE("reshape keeps data and checks size") {
    Tensor t({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
    Tensor r = t.reshaped({3, 2});
    CHECK(r.at(2, 1) == 6.0);
    CHECK(r.storage() == t.storage());
    CHECK_THROWS(t.reshaped({4, 2}));
}

TEST_CASE("all_finite flags NaN and infinity") {
    Tensor t({3}, 0.0);
    CHECK(t.all_finite());
    t[1] = std::nan("");
    CHECK_FALSE(t.all_finite());
    t[1] = INFINITY;
    CHECK_FALSE(t.all_finite());
}

TEST_CASE("matmul matches triple loop") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 1 + rng() % 7, k = 1 + rng() % 7, n = 1 + rng() % 7;
        Tensor a = random_tensor({m, k}, rng), b = random_tensor({k, n}, rng);
        Tensor c = matmul(a, b);
        REQUIRE(c.shape() == Shape{m, n});
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t p = 0; p < k; ++p) s += a.at(i, p) * b.at(p, j);
                CHECK(c.at(i, j) == doctest::Approx(s).epsilon(1e-12));
            }
    }
    CHECK_THROWS(matmul(Tensor({2, 3}), Tensor({2, 3})));
}

TEST_CASE("transpose and identity") {
    Tensor a({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
    Tensor t = transpose2d(a);
    CHECK(t.shape() == Shape{3, 2});
    CHECK(t.at(2, 0) == 3.0);
    CHECK(transpose2d(t) == a);
    CHECK(matmul(identity(2), a) == a);
}

TEST_CASE("require_shape reports mismatch") {
    Tensor t({2, 2});
    CHECK_NOTHROW(require_shape(t, {2, 2}, "t"));
    CHECK_THROWS(require_shape(t, {2, 3}, "t"));
}
