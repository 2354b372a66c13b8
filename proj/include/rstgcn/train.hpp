#pragma once

#include "rstgcn/ingest.hpp"
#include "rstgcn/model.hpp"
#include "rstgcn/tensor.hpp"
#include "rstgcn/windows.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace rstgcn::train {

enum class OptimizerKind { Adam, Sgd };

struct TrainConfig {
    std::size_t batch_size = 4;
    double learning_rate = 0.001;
    std::size_t max_epochs = 100;
    /// Non-improving epochs tolerated before stopping.
    std::size_t patience = 10;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    /// Global gradient norm cap; 0 disables clipping.
    double clip_norm = 5.0;
    std::uint64_t seed = 0;
    /// Standardize input channels with statistics of the training anchors.
    bool standardize_inputs = false;

    void validate() const;
};

nlohmann::json to_json(const TrainConfig& cfg);
std::string optimizer_name(OptimizerKind kind);
OptimizerKind parse_optimizer(const std::string& name);

/// Σ mask·(Ŷ−Y)² / Σ mask, 0 when nothing is masked.
double masked_mse(const Tensor& pred, const Tensor& target, const Tensor& mask);

/// First-order optimizer over an ordered list of tensors.
class Optimizer {
public:
    explicit Optimizer(const TrainConfig& cfg) : cfg_(cfg) {}

    void step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads);
    void step(model::ModelParams& params, const model::ModelParams& grad);

    std::size_t steps() const noexcept { return t_; }

private:
    TrainConfig cfg_;
    std::vector<Tensor> m_, v_;
    std::size_t t_ = 0;
};

/// Rescales grad in place so its global L2 norm is at most max_norm; returns the norm before clipping.
double clip_global_norm(model::ModelParams& grad, double max_norm);

/// Pooled masked MSE of the model over samples.
double evaluate_loss(const model::ModelParams& params, const std::vector<windows::Sample>& samples,
                     const model::ModelConfig& mcfg, const model::GraphArtifacts& graph);

/// One chronological pass in batches of batch_size with one optimizer step per batch.
/// Returns the mean batch loss. On a non-finite loss the parameters and optimizer state
/// are restored to their values at the start of the epoch and std::runtime_error is thrown.
double train_epoch(model::ModelParams& params, Optimizer& opt, const std::vector<windows::Sample>& samples,
                   const model::ModelConfig& mcfg, const model::GraphArtifacts& graph, const TrainConfig& cfg);

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
    double seconds = 0.0;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;
    double best_val_loss = 0.0;
    double wall_seconds = 0.0;
    bool stopped_early = false;
};

nlohmann::json to_json(const TrainReport& report);

struct FitResult {
    model::ModelParams params;  // parameters of the best validation epoch
    TrainReport report;
    std::optional<windows::ChannelScaler> scaler;
};

/// Receives one JSON object per progress event.
using EventSink = std::function<void(const nlohmann::json&)>;

/// Builds samples for the split, trains up to max_epochs with validation-based selection.
FitResult fit(const ingest::FeatureCube& cube, const windows::Split& split, const model::ModelConfig& mcfg,
              const model::GraphArtifacts& graph, const TrainConfig& cfg, const EventSink& events = {});

/// Sample builder shared by training and evaluation; applies the scaler when given.
std::vector<windows::Sample> build_samples(const ingest::FeatureCube& cube, const std::vector<std::size_t>& anchors,
                                           const windows::WindowConfig& wcfg,
                                           const std::optional<windows::ChannelScaler>& scaler);

nlohmann::json to_json(const windows::ChannelScaler& scaler);
windows::ChannelScaler scaler_from_json(const nlohmann::json& doc);

} // namespace rstgcn::train
