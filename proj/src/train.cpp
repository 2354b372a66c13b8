#include "rstgcn/train.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rstgcn::train {

void TrainConfig::validate() const {
    if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument("train config: learning_rate must be finite and nonnegative");
    }
    if (max_epochs < 1) throw std::invalid_argument("train config: max_epochs must be >= 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
        throw std::invalid_argument("train config: invalid moment parameters");
    }
    if (!(clip_norm >= 0.0)) throw std::invalid_argument("train config: clip_norm must be >= 0");
}

std::string optimizer_name(OptimizerKind kind) {
    return kind == OptimizerKind::Adam ? "adam" : "sgd";
}

OptimizerKind parse_optimizer(const std::string& name) {
    if (name == "adam") return OptimizerKind::Adam;
    if (name == "sgd") return OptimizerKind::Sgd;
    throw std::invalid_argument("unknown optimizer '" + name + "' (expected adam or sgd)");
}

nlohmann::json to_json(const TrainConfig& cfg) {
    return {{"batch_size", cfg.batch_size},
            {"learning_rate", cfg.learning_rate},
            {"max_epochs", cfg.max_epochs},
            {"patience", cfg.patience},
            {"optimizer", optimizer_name(cfg.optimizer)},
            {"beta1", cfg.beta1},
            {"beta2", cfg.beta2},
            {"epsilon", cfg.epsilon},
            {"clip_norm", cfg.clip_norm},
            {"seed", cfg.seed},
            {"standardize_inputs", cfg.standardize_inputs}};
}

double masked_mse(const Tensor& pred, const Tensor& target, const Tensor& mask) {
    if (pred.shape() != target.shape() || pred.shape() != mask.shape()) {
        throw std::invalid_argument("masked_mse: shapes " + shape_string(pred.shape()) + ", " +
                                    shape_string(target.shape()) + ", " + shape_string(mask.shape()) + " differ");
    }
    double sse = 0.0, count = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (mask[i] == 0.0) continue;
        const double d = pred[i] - target[i];
        sse += mask[i] * d * d;
        count += mask[i];
    }
    return count > 0.0 ? sse / count : 0.0;
}

void Optimizer::step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads) {
    if (params.size() != grads.size()) throw std::invalid_argument("optimizer: parameter/gradient count mismatch");
    ++t_;
    if (cfg_.optimizer == OptimizerKind::Sgd) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            Tensor& p = *params[i];
            const Tensor& g = *grads[i];
            for (std::size_t j = 0; j < p.size(); ++j) p[j] -= cfg_.learning_rate * g[j];
        }
        return;
    }
    if (m_.empty()) {
        for (const Tensor* g : grads) {
            m_.push_back(Tensor::zeros_like(*g));
            v_.push_back(Tensor::zeros_like(*g));
        }
    }
    if (m_.size() != params.size()) throw std::invalid_argument("optimizer: parameter list changed between steps");
    const double b1 = cfg_.beta1, b2 = cfg_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        const Tensor& g = *grads[i];
        Tensor& m = m_[i];
        Tensor& v = v_[i];
        if (p.size() != g.size() || m.size() != g.size()) throw std::invalid_argument("optimizer: tensor size mismatch");
        for (std::size_t j = 0; j < p.size(); ++j) {
            m[j] = b1 * m[j] + (1.0 - b1) * g[j];
            v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
            const double mhat = m[j] / c1;
            const double vhat = v[j] / c2;
            p[j] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
        }
    }
}

void Optimizer::step(model::ModelParams& params, const model::ModelParams& grad) {
    std::vector<Tensor*> ps;
    std::vector<const Tensor*> gs;
    params.visit([&](const std::string&, Tensor& t) { ps.push_back(&t); });
    grad.visit([&](const std::string&, const Tensor& t) { gs.push_back(&t); });
    step(ps, gs);
}

double clip_global_norm(model::ModelParams& grad, double max_norm) {
    double sq = 0.0;
    grad.visit([&](const std::string&, const Tensor& t) {
        for (double v : t.data()) sq += v * v;
    });
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double s = max_norm / norm;
        grad.visit([&](const std::string&, Tensor& t) {
            for (double& v : t.storage()) v *= s;
        });
    }
    return norm;
}

double evaluate_loss(const model::ModelParams& params, const std::vector<windows::Sample>& samples,
                     const model::ModelConfig& mcfg, const model::GraphArtifacts& graph) {
    double sse = 0.0, count = 0.0;
    for (const auto& s : samples) {
        const Tensor pred = model::forward(s, params, mcfg, graph);
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (s.mask[i] == 0.0) continue;
            const double d = pred[i] - s.Y[i];
            sse += s.mask[i] * d * d;
            count += s.mask[i];
        }
    }
    return count > 0.0 ? sse / count : 0.0;
}

double train_epoch(model::ModelParams& params, Optimizer& opt, const std::vector<windows::Sample>& samples,
                   const model::ModelConfig& mcfg, const model::GraphArtifacts& graph, const TrainConfig& cfg) {
    cfg.validate();
    if (samples.empty()) throw std::invalid_argument("train_epoch: no samples");
    const model::ModelParams snapshot = params;
    const Optimizer opt_snapshot = opt;
    double total = 0.0;
    std::size_t batches = 0;
    try {
        for (std::size_t start = 0; start < samples.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(samples.size(), start + cfg.batch_size);
            double count = 0.0;
            for (std::size_t i = start; i < end; ++i)
                for (double m : samples[i].mask.data()) count += m;
            double loss = 0.0;
            if (count > 0.0) {
                model::ModelParams grad = model::zeros_like(params);
                double sse = 0.0;
                for (std::size_t i = start; i < end; ++i)
                    sse += model::accumulate_sse_gradient(samples[i], params, mcfg, graph, 1.0 / count, grad);
                loss = sse / count;
                if (!std::isfinite(loss)) throw std::runtime_error("non-finite training loss");
                clip_global_norm(grad, cfg.clip_norm);
                opt.step(params, grad);
            }
            total += loss;
            ++batches;
        }
    } catch (const std::runtime_error& e) {
        params = snapshot;
        opt = opt_snapshot;
        throw std::runtime_error(std::string("training diverged (") + e.what() +
                                 "); parameters restored to the start of the epoch");
    }
    return total / static_cast<double>(batches);
}

nlohmann::json to_json(const TrainReport& report) {
    nlohmann::json epochs = nlohmann::json::array();
    for (const auto& e : report.epochs) {
        epochs.push_back(
            {{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_loss", e.val_loss}, {"seconds", e.seconds}});
    }
    return {{"epochs", epochs},
            {"best_epoch", report.best_epoch},
            {"best_val_loss", report.best_val_loss},
            {"wall_seconds", report.wall_seconds},
            {"stopped_early", report.stopped_early}};
}

std::vector<windows::Sample> build_samples(const ingest::FeatureCube& cube, const std::vector<std::size_t>& anchors,
                                           const windows::WindowConfig& wcfg,
                                           const std::optional<windows::ChannelScaler>& scaler) {
    auto samples = windows::enumerate_samples(cube, anchors, wcfg);
    if (scaler)
        for (auto& s : samples) scaler->apply(s);
    return samples;
}

nlohmann::json to_json(const windows::ChannelScaler& scaler) {
    return {{"mean", scaler.mean}, {"stddev", scaler.stddev}};
}

windows::ChannelScaler scaler_from_json(const nlohmann::json& doc) {
    windows::ChannelScaler s;
    s.mean = doc.at("mean").get<std::vector<double>>();
    s.stddev = doc.at("stddev").get<std::vector<double>>();
    return s;
}

FitResult fit(const ingest::FeatureCube& cube, const windows::Split& split, const model::ModelConfig& mcfg,
              const model::GraphArtifacts& graph, const TrainConfig& cfg, const EventSink& events) {
    cfg.validate();
    mcfg.validate();
    if (split.train.empty() || split.val.empty()) throw std::invalid_argument("fit: empty train or validation split");
    if (graph.spatial_weights.dim(0) != cube.stations()) {
        throw std::invalid_argument("fit: graph has " + std::to_string(graph.spatial_weights.dim(0)) +
                                    " stations but cube has " + std::to_string(cube.stations()));
    }
    using Clock = std::chrono::steady_clock;
    const auto t_begin = Clock::now();
    auto emit = [&](nlohmann::json ev) {
        if (events) events(ev);
    };

    FitResult result;
    if (cfg.standardize_inputs) result.scaler = windows::ChannelScaler::fit(cube, split.train, mcfg.windows);
    const auto train = build_samples(cube, split.train, mcfg.windows, result.scaler);
    const auto val = build_samples(cube, split.val, mcfg.windows, result.scaler);

    model::ModelParams params = model::init_params(mcfg, cube.stations(), cfg.seed);
    Optimizer opt(cfg);
    result.params = params;
    result.report.best_val_loss = std::numeric_limits<double>::infinity();
    emit({{"event", "start"},
          {"train_samples", train.size()},
          {"val_samples", val.size()},
          {"parameters", model::parameter_count(params)}});

    std::size_t since_best = 0;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto t0 = Clock::now();
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = train_epoch(params, opt, train, mcfg, graph, cfg);
        rec.val_loss = evaluate_loss(params, val, mcfg, graph);
        rec.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        result.report.epochs.push_back(rec);
        const bool improved = rec.val_loss < result.report.best_val_loss;
        if (improved) {
            result.report.best_val_loss = rec.val_loss;
            result.report.best_epoch = epoch;
            result.params = params;
            since_best = 0;
        } else {
            ++since_best;
        }
        emit({{"event", "epoch"},
              {"epoch", epoch},
              {"train_loss", rec.train_loss},
              {"val_loss", rec.val_loss},
              {"best", improved},
              {"seconds", rec.seconds}});
        if (since_best > cfg.patience) {
            result.report.stopped_early = true;
            break;
        }
    }
    result.report.wall_seconds = std::chrono::duration<double>(Clock::now() - t_begin).count();
    emit({{"event", "done"},
          {"best_epoch", result.report.best_epoch},
          {"best_val_loss", result.report.best_val_loss},
          {"epochs", result.report.epochs.size()},
          {"wall_seconds", result.report.wall_seconds}});
    return result;
}

} // namespace rstgcn::train
