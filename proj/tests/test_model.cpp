#include "rstgcn/model.hpp"

#include "model_oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>

using namespace rstgcn;
using rstgcn::testing::random_tensor;

namespace {

railnet::RailGraph random_graph(std::size_t n, std::mt19937_64& rng) {
    std::vector<railnet::Station> st;
    for (std::size_t i = 0; i < n; ++i) st.push_back({"S" + std::to_string(i), "", "Z", i});
    auto g = railnet::make_graph(st);
    for (std::size_t i = 1; i < n; ++i)
        railnet::set_edge(g, rng() % i, i, 10.0 + static_cast<double>(rng() % 40), 1.0 + static_cast<double>(rng() % 5));
    return g;
}

windows::Sample random_sample(std::size_t n, const windows::WindowConfig& w, std::mt19937_64& rng) {
    windows::Sample s;
    s.X_h = random_tensor({n, 5, w.t_h}, rng, 0.0, 1.0);
    s.X_d = random_tensor({n, 5, w.t_d}, rng, 0.0, 1.0);
    s.X_w = random_tensor({n, 5, w.t_w}, rng, 0.0, 1.0);
    s.Y = random_tensor({n, w.t_p}, rng, 0.0, 1.0);
    s.mask = testing::random_mask({n, w.t_p}, rng);
    return s;
}

model::ModelConfig tiny_config() {
    model::ModelConfig c;
    c.channels = 4;
    c.blocks = 1;
    return c;
}

double row_sum_error(const Tensor& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.dim(0); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.dim(1); ++j) s += m.at(i, j);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

} // namespace

TEST_CASE("config validation and feature sets") {
    CHECK(model::parse_feature_set("all") == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK(model::parse_feature_set("avg") == std::vector<std::size_t>{0, 1});
    CHECK(model::parse_feature_set("avg+headway") == std::vector<std::size_t>{0, 1, 4});
    CHECK(model::parse_feature_set("avg,tot") == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(model::feature_set_name({0, 1, 4}) == "avg+headway");
    CHECK_THROWS(model::parse_feature_set("tot"));
    CHECK_THROWS(model::parse_feature_set("speed"));
    model::ModelConfig c;
    c.cheb_order = 0;
    CHECK_THROWS(c.validate());
    const auto back = model::model_config_from_json(model::to_json(tiny_config()));
    CHECK(back.channels == 4);
    CHECK(back.blocks == 1);
}

TEST_CASE("Chebyshev recurrence equals dense polynomial evaluation") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng() % 8, order = 1 + rng() % 5;
        Tensor l = random_tensor({n, n}, rng);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j) l.at(j, i) = l.at(i, j);
        const auto t = model::chebyshev_polynomials(l, order);
        REQUIRE(t.size() == order);
        // closed forms: T2 = 2L² − I, T3 = 4L³ − 3L, T4 = 8L⁴ − 8L² + I
        const Tensor l2 = matmul(l, l), l3 = matmul(l2, l), l4 = matmul(l3, l);
        const Tensor id = identity(n);
        for (std::size_t k = 0; k < order; ++k)
            for (std::size_t i = 0; i < n * n; ++i) {
                double want = 0.0;
                switch (k) {
                case 0: want = id[i]; break;
                case 1: want = l[i]; break;
                case 2: want = 2 * l2[i] - id[i]; break;
                case 3: want = 4 * l3[i] - 3 * l[i]; break;
                default: want = 8 * l4[i] - 8 * l2[i] + id[i]; break;
                }
                CHECK(testing::rel_err(t[k][i], want, 1.0) < 1e-10);
            }
    }
}

TEST_CASE("zero attention parameters give uniform Z' and Q") {
    std::mt19937_64 rng(1);
    const auto cfg = tiny_config();
    auto params = model::zeros_like(model::init_params(cfg, 4, 1));
    const auto art = model::make_artifacts(random_graph(4, rng), cfg);
    ad::Tape tape;
    auto vars = model::bind(tape, params, false);
    auto x = tape.constant(random_tensor({4, 5, 3}, rng));
    const auto& b = vars.components[0].blocks[0];
    const Tensor z = model::temporal_attention(x, b).value();
    for (double v : z.storage()) CHECK(v == doctest::Approx(1.0 / 3.0));
    const Tensor q = model::spatial_attention(x, b, art.spatial_weights).value();
    for (double v : q.storage()) CHECK(v == doctest::Approx(0.25));
}

TEST_CASE("attention rows sum to one") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng() % 6;
        const auto cfg = tiny_config();
        const auto params = model::init_params(cfg, n, rng());
        const auto art = model::make_artifacts(random_graph(n, rng), cfg);
        ad::Tape tape;
        auto vars = model::bind(tape, params, false);
        auto x = tape.constant(random_tensor({n, 5, 3}, rng, -2, 2));
        const auto& b = vars.components[0].blocks[0];
        auto z = model::temporal_attention(x, b);
        CHECK(row_sum_error(z.value()) < 1e-9);
        CHECK(row_sum_error(model::spatial_attention(model::apply_temporal_attention(x, z), b, art.spatial_weights)
                                .value()) < 1e-9);
    }
}

TEST_CASE("minimal temporal attention by hand") {
    // N=2, F=1, T=2. X[0] = (1, 2), X[1] = (3, 4); U1 = (1, 1), U2 = (1, 0), U3 = 1, b_t = 0, V_t = I.
    // Xᵀ U1 = (4, 6) per time step; lhs = [[4, 0], [6, 0]]; rhs = X = [[1, 2], [3, 4]];
    // lhs·rhs = [[4, 8], [6, 12]]; Z' row a = softmax(sigmoid(row a)).
    model::BlockParams p;
    p.U1 = Tensor({2}, std::vector<double>{1, 1});
    p.U2 = Tensor({1, 2}, std::vector<double>{1, 0});
    p.U3 = Tensor({1}, std::vector<double>{1});
    p.V_t = identity(2);
    p.b_t = Tensor({2, 2});
    ad::Tape tape;
    model::BlockVars v;
    v.U1 = tape.constant(p.U1), v.U2 = tape.constant(p.U2), v.U3 = tape.constant(p.U3);
    v.V_t = tape.constant(p.V_t), v.b_t = tape.constant(p.b_t);
    auto x = tape.constant(Tensor({2, 1, 2}, std::vector<double>{1, 2, 3, 4}));
    const Tensor z = model::temporal_attention(x, v).value();
    auto sig = [](double a) { return 1.0 / (1.0 + std::exp(-a)); };
    auto soft = [](double a, double b) { return std::exp(a) / (std::exp(a) + std::exp(b)); };
    CHECK(z.at(0, 0) == doctest::Approx(soft(sig(4), sig(8))).epsilon(1e-14));
    CHECK(z.at(1, 0) == doctest::Approx(soft(sig(6), sig(12))).epsilon(1e-14));
    CHECK(z.at(0, 1) == doctest::Approx(1.0 - soft(sig(4), sig(8))).epsilon(1e-14));
}

TEST_CASE("isolated node gets a uniform spatial attention row") {
    std::mt19937_64 rng(3);
    std::vector<railnet::Station> st{{"A", "", "Z", 0}, {"B", "", "Z", 1}, {"C", "", "Z", 2}};
    auto g = railnet::make_graph(st);
    railnet::set_edge(g, 0, 1, 10, 2);
    const auto cfg = tiny_config();
    const auto art = model::make_artifacts(g, cfg);
    ad::Tape tape;
    auto vars = model::bind(tape, model::init_params(cfg, 3, 5), false);
    const Tensor q =
        model::spatial_attention(tape.constant(random_tensor({3, 5, 3}, rng)), vars.components[0].blocks[0],
                                 art.spatial_weights)
            .value();
    for (std::size_t j = 0; j < 3; ++j) CHECK(q.at(2, j) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("equal frequencies reduce Q bitwise to distance-only weighting; doubling frequencies changes nothing") {
    std::mt19937_64 rng(4);
    auto g = random_graph(6, rng);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            if (g.adjacency.at(i, j) != 0.0) g.frequency.at(i, j) = 7.0;
    auto cfg = tiny_config();
    const auto params = model::init_params(cfg, 6, 9);
    const auto with = model::make_artifacts(g, cfg);
    cfg.use_frequency_weight = false;
    const auto without = model::make_artifacts(g, cfg);
    ad::Tape tape;
    auto vars = model::bind(tape, params, false);
    auto x = tape.constant(random_tensor({6, 5, 3}, rng));
    const auto& b = vars.components[0].blocks[0];
    CHECK(model::spatial_attention(x, b, with.spatial_weights).value() ==
          model::spatial_attention(x, b, without.spatial_weights).value());

    auto g2 = random_graph(6, rng);
    auto g3 = g2;
    for (double& f : g3.frequency.storage()) f *= 2.0;
    cfg.use_frequency_weight = true;
    CHECK(model::spatial_attention(x, b, model::make_artifacts(g2, cfg).spatial_weights).value() ==
          model::spatial_attention(x, b, model::make_artifacts(g3, cfg).spatial_weights).value());
}

TEST_CASE("Chebyshev convolution: identity term, linearity") {
    std::mt19937_64 rng(5);
    const std::size_t n = 3, f = 2, t = 4;
    Tensor xv = random_tensor({n, f, t}, rng);
    ad::Tape tape;
    auto x = tape.constant(xv);
    auto ones = tape.constant(Tensor({n, n}, 1.0));
    Tensor theta({1, f, f});
    for (std::size_t c = 0; c < f; ++c) theta.at(0, c, c) = 1.0;
    const std::vector<Tensor> cheb{identity(n)};
    CHECK(model::cheb_graph_conv(x, ones, cheb, tape.constant(theta)).value() == xv);
    auto zero = tape.constant(Tensor({n, f, t}));
    const Tensor y = model::cheb_graph_conv(zero, ones, cheb, tape.constant(random_tensor({1, f, 3}, rng))).value();
    for (double v : y.storage()) CHECK(v == 0.0);
}

TEST_CASE("temporal convolution: center tap identity and negative pre-activation") {
    std::mt19937_64 rng(6);
    const std::size_t c = 3;
    Tensor xv = random_tensor({2, c, 5}, rng);
    Tensor phi({c, c, 3});
    for (std::size_t i = 0; i < c; ++i) phi.at(i, i, 1) = 1.0;
    ad::Tape tape;
    const Tensor y = model::temporal_conv(tape.constant(xv), tape.constant(phi), tape.constant(Tensor({c}))).value();
    for (std::size_t i = 0; i < xv.size(); ++i) CHECK(y[i] == std::max(0.0, xv[i]));
    const Tensor neg =
        model::temporal_conv(tape.constant(xv), tape.constant(Tensor({c, c, 3})), tape.constant(Tensor({c}, -1.0)))
            .value();
    for (double v : neg.storage()) CHECK(v == 0.0);
}

TEST_CASE("fusion") {
    ad::Tape tape;
    auto m1 = tape.constant(Tensor({2, 3}, -1.0));
    auto one = tape.constant(Tensor({2, 3}, 1.0));
    const std::vector<ad::Var> outs{m1, m1, m1}, ws{one, one, one};
    for (double v : model::fuse(outs, ws, true).value().storage()) CHECK(v == 0.0);
    for (double v : model::fuse(outs, ws, false).value().storage()) CHECK(v == -3.0);

    std::mt19937_64 rng(7);
    std::vector<Tensor> y, w;
    std::vector<ad::Var> yv, wv;
    for (int c = 0; c < 3; ++c) {
        y.push_back(random_tensor({4, 3}, rng));
        w.push_back(c == 0 ? Tensor({4, 3}, 1.0) : Tensor({4, 3}, 0.0));
        yv.push_back(tape.constant(y.back()));
        wv.push_back(tape.constant(w.back()));
    }
    const Tensor only_h = model::fuse(yv, wv, true).value();
    for (std::size_t i = 0; i < 12; ++i) CHECK(only_h[i] == std::max(0.0, y[0][i]));

    for (int c = 0; c < 3; ++c) wv[c] = tape.constant(w[c] = random_tensor({4, 3}, rng));
    const Tensor mixed = model::fuse(yv, wv, false).value();
    for (std::size_t i = 0; i < 12; ++i)
        CHECK(mixed[i] == doctest::Approx(w[0][i] * y[0][i] + w[1][i] * y[1][i] + w[2][i] * y[2][i]).epsilon(1e-14));
}

TEST_CASE("forward matches the naive-loop oracle") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + rng() % 5;
        auto cfg = tiny_config();
        cfg.blocks = 1 + rng() % 2;
        cfg.cheb_order = 1 + rng() % 3;
        cfg.use_final_relu = rng() % 2;
        cfg.use_frequency_weight = rng() % 2;
        cfg.features = trial % 2 ? std::vector<std::size_t>{0, 1, 4} : std::vector<std::size_t>{0, 1, 2, 3, 4};
        const auto params = model::init_params(cfg, n, rng());
        const auto art = model::make_artifacts(random_graph(n, rng), cfg);
        const auto s = random_sample(n, cfg.windows, rng);
        const Tensor got = model::forward(s, params, cfg, art);
        const Tensor want = testing::naive_forward(s, params, cfg, art);
        REQUIRE(got.shape() == Shape{n, 3});
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
    }
}

TEST_CASE("zero input with zero biases gives the fc bias mix") {
    std::mt19937_64 rng(9);
    auto cfg = tiny_config();
    cfg.use_final_relu = false;
    auto params = model::init_params(cfg, 3, 4);
    params.visit([](const std::string& name, Tensor& t) {
        if (name.find("phi_bias") != std::string::npos || name.find("b_t") != std::string::npos ||
            name.find("b_s") != std::string::npos)
            t.fill(0.0);
    });
    const auto art = model::make_artifacts(random_graph(3, rng), cfg);
    windows::Sample s;
    s.X_h = Tensor({3, 5, 3}), s.X_d = Tensor({3, 5, 3}), s.X_w = Tensor({3, 5, 3});
    const Tensor y = model::forward(s, params, cfg, art);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 3; ++k) {
            double want = 0.0;
            for (std::size_t c = 0; c < 3; ++c)
                want += params.components[c].fusion.at(i, k) * params.components[c].fc_bias[k];
            CHECK(y.at(i, k) == doctest::Approx(want).epsilon(1e-14));
        }
}

TEST_CASE("depth matters and forward is deterministic") {
    std::mt19937_64 rng(10);
    auto cfg = tiny_config();
    const auto art = model::make_artifacts(random_graph(4, rng), cfg);
    const auto s = random_sample(4, cfg.windows, rng);
    cfg.use_final_relu = false;
    const auto one = model::forward(s, model::init_params(cfg, 4, 3), cfg, art);
    CHECK(one == model::forward(s, model::init_params(cfg, 4, 3), cfg, art));
    cfg.blocks = 2;
    CHECK_FALSE(one == model::forward(s, model::init_params(cfg, 4, 3), cfg, art));
}

TEST_CASE("output is nonnegative with the final ReLU") {
    std::mt19937_64 rng(11);
    auto cfg = tiny_config();
    for (int trial = 0; trial < 30; ++trial) {
        auto params = model::init_params(cfg, 5, rng());
        params.visit([&](const std::string&, Tensor& t) { t = random_tensor(t.shape(), rng); });
        const auto art = model::make_artifacts(random_graph(5, rng), cfg);
        const Tensor y = model::forward(random_sample(5, cfg.windows, rng), params, cfg, art);
        CHECK(*std::min_element(y.storage().begin(), y.storage().end()) >= 0.0);
    }
}

TEST_CASE("gradients match central differences on a tiny model") {
    std::mt19937_64 rng(12);
    const std::size_t n = 5;
    auto cfg = tiny_config();
    for (int seed = 0; seed < 3; ++seed) {
        const auto params = model::init_params(cfg, n, 100 + seed);
        const auto art = model::make_artifacts(random_graph(n, rng), cfg);
        const auto s = random_sample(n, cfg.windows, rng);
        const Tensor w = random_tensor({n, 3}, rng);
        const auto grad = model::backward(s, params, cfg, art, w);
        auto objective = [&](const model::ModelParams& p) {
            const Tensor y = model::forward(s, p, cfg, art);
            double v = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) v += w[i] * y[i];
            return v;
        };
        std::vector<std::pair<std::string, const Tensor*>> g;
        grad.visit([&](const std::string& name, const Tensor& t) { g.emplace_back(name, &t); });
        std::size_t k = 0;
        auto probe = params;
        probe.visit([&](const std::string& name, Tensor& t) {
            const Tensor& gt = *g[k++].second;
            for (std::size_t i = 0; i < t.size(); ++i) {
                const double keep = t[i];
                t[i] = keep + 1e-4;
                const double up = objective(probe);
                t[i] = keep - 1e-4;
                const double down = objective(probe);
                t[i] = keep;
                const double fd = (up - down) / 2e-4;
                CHECK_MESSAGE(testing::rel_err(gt[i], fd, 1e-6) < 1e-3, name, "[", i, "] ", gt[i], " vs ", fd);
            }
        });
    }
}

TEST_CASE("zero loss gradient gives zero parameter gradients") {
    std::mt19937_64 rng(13);
    auto cfg = tiny_config();
    const auto params = model::init_params(cfg, 4, 1);
    const auto art = model::make_artifacts(random_graph(4, rng), cfg);
    const auto grad = model::backward(random_sample(4, cfg.windows, rng), params, cfg, art, Tensor({4, 3}));
    grad.visit([](const std::string&, const Tensor& t) {
        for (double v : t.storage()) CHECK(v == 0.0);
    });
}

TEST_CASE("fusion gradient equals upstream times ReLU' times component output") {
    std::mt19937_64 rng(14);
    auto cfg = tiny_config();
    const std::size_t n = 4;
    const auto params = model::init_params(cfg, n, 21);
    const auto art = model::make_artifacts(random_graph(n, rng), cfg);
    const auto s = random_sample(n, cfg.windows, rng);
    const Tensor up = random_tensor({n, 3}, rng);
    const auto grad = model::backward(s, params, cfg, art, up);
    const Tensor y = model::forward(s, params, cfg, art);
    const Tensor* inputs[3] = {&s.X_h, &s.X_d, &s.X_w};
    for (std::size_t c = 0; c < 3; ++c) {
        const Tensor yc = testing::naive_component(model::select_features(*inputs[c], cfg.features),
                                                   params.components[c], art);
        for (std::size_t i = 0; i < yc.size(); ++i) {
            const double relu_grad = y[i] > 0.0 ? 1.0 : 0.0;
            CHECK(grad.components[c].fusion[i] == doctest::Approx(up[i] * relu_grad * yc[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("relabeling stations permutes the output") {
    std::mt19937_64 rng(15);
    const std::size_t n = 5;
    auto cfg = tiny_config();
    cfg.use_final_relu = false;
    const auto g = random_graph(n, rng);
    const auto params = model::init_params(cfg, n, 77);
    const auto s = random_sample(n, cfg.windows, rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);  // new index i holds old node perm[i]

    auto pg = railnet::make_graph(g.stations);
    for (std::size_t i = 0; i < n; ++i) pg.stations[i] = g.stations[perm[i]], pg.stations[i].index = i;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (g.adjacency.at(perm[i], perm[j]) != 0.0 && i < j)
                railnet::set_edge(pg, i, j, g.distance.at(perm[i], perm[j]), g.frequency.at(perm[i], perm[j]));

    auto rows = [&](const Tensor& t) {
        Tensor out(t.shape());
        const std::size_t inner = t.size() / n;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < inner; ++k) out[i * inner + k] = t[perm[i] * inner + k];
        return out;
    };
    auto both = [&](const Tensor& t) {
        Tensor out(t.shape());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out.at(i, j) = t.at(perm[i], perm[j]);
        return out;
    };
    auto cols = [&](const Tensor& t) {
        Tensor out(t.shape());
        for (std::size_t r = 0; r < t.dim(0); ++r)
            for (std::size_t j = 0; j < n; ++j) out.at(r, j) = t.at(r, perm[j]);
        return out;
    };
    auto pp = params;
    for (std::size_t c = 0; c < 3; ++c) {
        for (auto& b : pp.components[c].blocks) {
            b.U1 = rows(b.U1);
            b.U2 = cols(b.U2);
            b.V_s = both(b.V_s);
            b.b_s = both(b.b_s);
        }
        pp.components[c].fusion = rows(pp.components[c].fusion);
    }
    auto ps = s;
    ps.X_h = rows(s.X_h), ps.X_d = rows(s.X_d), ps.X_w = rows(s.X_w);

    const Tensor y = model::forward(s, params, cfg, model::make_artifacts(g, cfg));
    const Tensor py = model::forward(ps, pp, cfg, model::make_artifacts(pg, cfg));
    const Tensor want = rows(y);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(py[i] == doctest::Approx(want[i]).epsilon(1e-9));
}

TEST_CASE("non-finite input is reported") {
    std::mt19937_64 rng(16);
    auto cfg = tiny_config();
    const auto art = model::make_artifacts(random_graph(3, rng), cfg);
    auto s = random_sample(3, cfg.windows, rng);
    s.X_h[0] = std::nan("");
    CHECK_THROWS_WITH(model::forward(s, model::init_params(cfg, 3, 1), cfg, art), doctest::Contains("non-finite"));
}

TEST_CASE("parameter layout") {
    auto cfg = tiny_config();
    cfg.windows.t_w = 0;
    const auto p = model::init_params(cfg, 5, 1);
    CHECK(p.enabled[0]);
    CHECK_FALSE(p.enabled[2]);
    std::vector<std::string> names;
    p.visit([&](const std::string& name, const Tensor&) { names.push_back(name); });
    CHECK(names.front() == "recent.block0.U1");
    CHECK(names.back() == "daily.fusion");
    // per block 5+25+5+9+9+3+15+5+25+25+60+48+4, then fc 12·3+3 and fusion 15
    CHECK(model::parameter_count(p) == 2 * (238 + 39 + 15));
    CHECK(p.components[0].fusion[0] == 0.5);
}

TEST_CASE("checkpoint round trip") {
    auto cfg = tiny_config();
    cfg.use_frequency_weight = false;
    cfg.features = {0, 1, 4};
    const auto params = model::init_params(cfg, 4, 5);
    const auto path = (std::filesystem::temp_directory_path() / "rstgcn_test_model.ckpt").string();
    model::save_checkpoint(path, params, cfg, 4, {{"note", "x"}});
    const auto ck = model::load_checkpoint(path);
    CHECK(ck.stations == 4);
    CHECK(ck.extra.at("note") == "x");
    CHECK(ck.config.features == cfg.features);
    CHECK_FALSE(ck.config.use_frequency_weight);
    std::vector<Tensor> a, b;
    params.visit([&](const std::string&, const Tensor& t) { a.push_back(t); });
    ck.params.visit([&](const std::string&, const Tensor& t) { b.push_back(t); });
    CHECK(a == b);
    CHECK(std::filesystem::exists(path + ".json"));

    std::ofstream(path, std::ios::binary) << "garbage";
    CHECK_THROWS(model::load_checkpoint(path));
}
