#include "rstgcn/baselines.hpp"
#include "rstgcn/synth.hpp"
#include "rstgcn/train.hpp"

#include "support.hpp"

#include <doctest.h>

#include <filesystem>

using namespace rstgcn;
using rstgcn::testing::random_tensor;

namespace {

struct Fixture {
    synth::SynthCube data;
    windows::Split split;
    model::ModelConfig mcfg;
    model::GraphArtifacts art;
};

Fixture small_fixture() {
    synth::SynthConfig sc;
    sc.stations = 5;
    sc.days = 10;
    Fixture f{synth::generate_cube(sc), {}, {}, {}};
    f.mcfg.channels = 4;
    f.mcfg.blocks = 1;
    f.split = windows::split_dataset(f.data.cube, f.mcfg.windows);
    f.art = model::make_artifacts(f.data.graph, f.mcfg);
    return f;
}

std::vector<Tensor> flatten(const model::ModelParams& p) {
    std::vector<Tensor> out;
    p.visit([&](const std::string&, const Tensor& t) { out.push_back(t); });
    return out;
}

} // namespace

TEST_CASE("masked MSE") {
    Tensor y({2, 3}, 0.5), m({2, 3}, 1.0);
    CHECK(train::masked_mse(y, y, m) == 0.0);
    Tensor p({2, 3}, 1.5);
    CHECK(train::masked_mse(p, y, m) == 1.0);
    CHECK(train::masked_mse(p, y, Tensor({2, 3})) == 0.0);

    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor a = random_tensor({4, 3}, rng), b = random_tensor({4, 3}, rng), mask = testing::random_mask({4, 3}, rng);
        double sse = 0.0, n = 0.0;
        for (std::size_t i = 0; i < 12; ++i)
            if (mask[i] != 0.0) sse += (a[i] - b[i]) * (a[i] - b[i]), n += 1.0;
        CHECK(train::masked_mse(a, b, mask) == doctest::Approx(n > 0 ? sse / n : 0.0).epsilon(1e-14));
    }
    CHECK_THROWS(train::masked_mse(Tensor({2}), Tensor({3}), Tensor({2})));
}

TEST_CASE("config parsing and validation") {
    CHECK(train::parse_optimizer("sgd") == train::OptimizerKind::Sgd);
    CHECK_THROWS(train::parse_optimizer("rmsprop"));
    train::TrainConfig c;
    c.batch_size = 0;
    CHECK_THROWS(c.validate());
    const auto j = train::to_json(train::TrainConfig{});
    CHECK(j.at("batch_size") == 4);
    CHECK(j.at("learning_rate") == 0.001);
}

TEST_CASE("optimizer reduces a convex linear surrogate loss every epoch") {
    // y = X·w*, fit w by mini-batch steps on the exact gradient of the mean squared error
    std::mt19937_64 rng(2);
    const std::size_t n = 64, d = 4;
    const Tensor x = random_tensor({n, d}, rng), w_star = random_tensor({d, 1}, rng);
    const Tensor y = matmul(x, w_star);
    for (auto kind : {train::OptimizerKind::Adam, train::OptimizerKind::Sgd}) {
        train::TrainConfig cfg;
        cfg.optimizer = kind;
        cfg.learning_rate = kind == train::OptimizerKind::Adam ? 0.01 : 0.1;
        train::Optimizer opt(cfg);
        Tensor w({d, 1});
        auto loss = [&] {
            const Tensor p = matmul(x, w);
            return train::masked_mse(p, y, Tensor(p.shape(), 1.0));
        };
        double prev = loss();
        for (int epoch = 0; epoch < 8; ++epoch) {
            const Tensor r = matmul(x, w);
            Tensor g({d, 1});
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < d; ++k) g[k] += 2.0 * (r[i] - y[i]) * x.at(i, k) / static_cast<double>(n);
            opt.step({&w}, {&g});
            const double now = loss();
            CHECK(now < prev);
            prev = now;
        }
    }
}

TEST_CASE("gradient clipping") {
    model::ModelConfig cfg;
    cfg.channels = 2;
    cfg.blocks = 1;
    auto g = model::init_params(cfg, 3, 1);
    double sq = 0.0;
    for (const auto& t : flatten(g))
        for (double v : t.storage()) sq += v * v;
    const double norm = train::clip_global_norm(g, 0.5);
    CHECK(norm == doctest::Approx(std::sqrt(sq)));
    double after = 0.0;
    for (const auto& t : flatten(g))
        for (double v : t.storage()) after += v * v;
    CHECK(std::sqrt(after) == doctest::Approx(0.5));
    CHECK(train::clip_global_norm(g, 10.0) == doctest::Approx(0.5));
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
    auto f = small_fixture();
    train::TrainConfig cfg;
    cfg.learning_rate = 0.0;
    auto params = model::init_params(f.mcfg, 5, 3);
    const auto before = flatten(params);
    train::Optimizer opt(cfg);
    const auto samples = train::build_samples(f.data.cube, f.split.train, f.mcfg.windows, std::nullopt);
    train::train_epoch(params, opt, samples, f.mcfg, f.art, cfg);
    CHECK(flatten(params) == before);
    CHECK(opt.steps() > 0);
}

TEST_CASE("fully masked batches give zero gradient and no step") {
    auto f = small_fixture();
    auto samples = train::build_samples(f.data.cube, f.split.train, f.mcfg.windows, std::nullopt);
    for (auto& s : samples) s.mask.fill(0.0);
    auto params = model::init_params(f.mcfg, 5, 4);
    auto grad = model::zeros_like(params);
    CHECK(model::accumulate_sse_gradient(samples[0], params, f.mcfg, f.art, 1.0, grad) == 0.0);
    for (const auto& t : flatten(grad))
        for (double v : t.storage()) CHECK(v == 0.0);
    train::TrainConfig cfg;
    train::Optimizer opt(cfg);
    const auto before = flatten(params);
    CHECK(train::train_epoch(params, opt, samples, f.mcfg, f.art, cfg) == 0.0);
    CHECK(flatten(params) == before);
    CHECK(opt.steps() == 0);
}

TEST_CASE("one epoch is bitwise repeatable") {
    auto f = small_fixture();
    const auto samples = train::build_samples(f.data.cube, f.split.train, f.mcfg.windows, std::nullopt);
    train::TrainConfig cfg;
    std::vector<std::vector<Tensor>> runs;
    std::vector<double> losses;
    for (int r = 0; r < 2; ++r) {
        auto params = model::init_params(f.mcfg, 5, 11);
        train::Optimizer opt(cfg);
        losses.push_back(train::train_epoch(params, opt, samples, f.mcfg, f.art, cfg));
        runs.push_back(flatten(params));
    }
    CHECK(runs[0] == runs[1]);
    CHECK(losses[0] == losses[1]);
    CHECK_FALSE(runs[0] == flatten(model::init_params(f.mcfg, 5, 11)));
}

TEST_CASE("non-finite loss restores the epoch-start parameters") {
    auto f = small_fixture();
    auto samples = train::build_samples(f.data.cube, f.split.train, f.mcfg.windows, std::nullopt);
    samples[6].Y.fill(std::nan(""));
    samples[6].mask.fill(1.0);
    train::TrainConfig cfg;
    auto params = model::init_params(f.mcfg, 5, 5);
    const auto before = flatten(params);
    train::Optimizer opt(cfg);
    CHECK_THROWS_WITH(train::train_epoch(params, opt, samples, f.mcfg, f.art, cfg), doctest::Contains("restored"));
    CHECK(flatten(params) == before);
    CHECK(opt.steps() == 0);
}

TEST_CASE("fit: patience 0 stops at the first non-improving epoch") {
    auto f = small_fixture();
    train::TrainConfig cfg;
    cfg.patience = 0;
    cfg.max_epochs = 40;
    cfg.learning_rate = 0.05;
    const auto res = train::fit(f.data.cube, f.split, f.mcfg, f.art, cfg);
    const auto& ep = res.report.epochs;
    REQUIRE_FALSE(ep.empty());
    double best = INFINITY;
    for (std::size_t i = 0; i + 1 < ep.size(); ++i) {
        CHECK(ep[i].val_loss < best);
        best = ep[i].val_loss;
    }
    if (res.report.stopped_early) {
        CHECK(ep.back().val_loss >= best);
        CHECK(res.report.best_epoch == ep.size() - 1);
    } else {
        CHECK(ep.size() == 40);
    }
}

TEST_CASE("fit beats the historical average and its best parameters reload to the same validation loss") {
    auto f = small_fixture();
    train::TrainConfig cfg;
    cfg.max_epochs = 100;
    std::vector<nlohmann::json> events;
    const auto res =
        train::fit(f.data.cube, f.split, f.mcfg, f.art, cfg, [&](const nlohmann::json& e) { events.push_back(e); });
    REQUIRE(events.size() == res.report.epochs.size() + 2);
    CHECK(events.front().at("event") == "start");
    CHECK(events.back().at("event") == "done");

    const auto val = train::build_samples(f.data.cube, f.split.val, f.mcfg.windows, std::nullopt);
    double ha_sse = 0.0, cells = 0.0;
    for (const auto& s : val) {
        const Tensor p = baselines::ha_predict(s);
        for (std::size_t i = 0; i < p.size(); ++i)
            if (s.mask[i] != 0.0) ha_sse += (p[i] - s.Y[i]) * (p[i] - s.Y[i]), cells += 1.0;
    }
    CHECK(res.report.best_val_loss < ha_sse / cells);

    const auto path = (std::filesystem::temp_directory_path() / "rstgcn_test_train.ckpt").string();
    model::save_checkpoint(path, res.params, f.mcfg, 5);
    const auto ck = model::load_checkpoint(path);
    CHECK(train::evaluate_loss(ck.params, val, ck.config, f.art) == res.report.best_val_loss);
}

TEST_CASE("fit is deterministic under a fixed seed") {
    auto f = small_fixture();
    train::TrainConfig cfg;
    cfg.max_epochs = 3;
    cfg.standardize_inputs = true;
    const auto a = train::fit(f.data.cube, f.split, f.mcfg, f.art, cfg);
    const auto b = train::fit(f.data.cube, f.split, f.mcfg, f.art, cfg);
    CHECK(flatten(a.params) == flatten(b.params));
    REQUIRE(a.scaler.has_value());
    CHECK(a.scaler->mean == b.scaler->mean);
    for (std::size_t i = 0; i < a.report.epochs.size(); ++i)
        CHECK(a.report.epochs[i].val_loss == b.report.epochs[i].val_loss);
    const auto back = train::scaler_from_json(train::to_json(*a.scaler));
    CHECK(back.stddev == a.scaler->stddev);
}
