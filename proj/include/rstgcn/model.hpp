#pragma once

#include "rstgcn/autodiff.hpp"
#include "rstgcn/railnet.hpp"
#include "rstgcn/tensor.hpp"
#include "rstgcn/windows.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace rstgcn::model {

/// Network shape and ablation switches. Turning off both the frequency weight and
/// the final ReLU gives the distance-only (TSTGCN-style) architecture.
struct ModelConfig {
    windows::WindowConfig windows;
    std::size_t cheb_order = 3;
    std::size_t channels = 64;
    std::size_t blocks = 2;
    bool use_frequency_weight = true;
    bool use_final_relu = true;
    /// Indices into the feature cube's channels; must contain channel 0 (the target).
    std::vector<std::size_t> features{0, 1, 2, 3, 4};

    void validate() const;
    std::size_t t_p() const { return windows.t_p; }
};

/// "all", or a comma list of groups: avg (channels 0,1), tot (2,3), headway (4).
std::vector<std::size_t> parse_feature_set(const std::string& spec);
std::string feature_set_name(const std::vector<std::size_t>& features);

nlohmann::json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& doc);

enum Component : std::size_t { kRecent = 0, kDaily = 1, kWeekly = 2 };
inline constexpr std::array<const char*, 3> kComponentNames{"recent", "daily", "weekly"};

/// Learnable tensors of one spatio-temporal block, templated so the same layout
/// holds values (Tensor) or tape handles (ad::Var).
template <typename T>
struct BlockParamsT {
    T U1, U2, U3, V_t, b_t;  // temporal attention
    T W1, W2, W3, V_s, b_s;  // spatial attention
    T theta;                 // K×F_in×C Chebyshev coefficients
    T phi, phi_bias;         // C×C×3 temporal kernel and its bias

    template <typename Fn>
    void visit(const std::string& prefix, Fn&& fn) { each(*this, prefix, fn); }
    template <typename Fn>
    void visit(const std::string& prefix, Fn&& fn) const { each(*this, prefix, fn); }

private:
    template <typename Self, typename Fn>
    static void each(Self& s, const std::string& prefix, Fn& fn) {
        fn(prefix + "U1", s.U1), fn(prefix + "U2", s.U2), fn(prefix + "U3", s.U3), fn(prefix + "V_t", s.V_t),
            fn(prefix + "b_t", s.b_t), fn(prefix + "W1", s.W1), fn(prefix + "W2", s.W2), fn(prefix + "W3", s.W3),
            fn(prefix + "V_s", s.V_s), fn(prefix + "b_s", s.b_s), fn(prefix + "theta", s.theta),
            fn(prefix + "phi", s.phi), fn(prefix + "phi_bias", s.phi_bias);
    }
};

template <typename T>
struct ComponentParamsT {
    std::vector<BlockParamsT<T>> blocks;
    T fc_weight;  // (C·T_in)×t_p
    T fc_bias;    // t_p
    T fusion;     // N×t_p

    template <typename Fn>
    void visit(const std::string& prefix, Fn&& fn) { each(*this, prefix, fn); }
    template <typename Fn>
    void visit(const std::string& prefix, Fn&& fn) const { each(*this, prefix, fn); }

private:
    template <typename Self, typename Fn>
    static void each(Self& s, const std::string& prefix, Fn& fn) {
        for (std::size_t b = 0; b < s.blocks.size(); ++b) s.blocks[b].visit(prefix + "block" + std::to_string(b) + ".", fn);
        fn(prefix + "fc_weight", s.fc_weight), fn(prefix + "fc_bias", s.fc_bias), fn(prefix + "fusion", s.fusion);
    }
};

template <typename T>
struct ModelParamsT {
    /// Indexed by Component; a component with a zero-length window has no blocks.
    std::array<ComponentParamsT<T>, 3> components;
    std::array<bool, 3> enabled{false, false, false};

    /// Visits every tensor in a fixed order with a stable dotted name.
    template <typename Fn>
    void visit(Fn&& fn) {
        for (std::size_t c = 0; c < 3; ++c)
            if (enabled[c]) components[c].visit(std::string(kComponentNames[c]) + ".", fn);
    }
    template <typename Fn>
    void visit(Fn&& fn) const {
        for (std::size_t c = 0; c < 3; ++c)
            if (enabled[c]) components[c].visit(std::string(kComponentNames[c]) + ".", fn);
    }
};

using BlockParams = BlockParamsT<Tensor>;
using ComponentParams = ComponentParamsT<Tensor>;
using ModelParams = ModelParamsT<Tensor>;
using BlockVars = BlockParamsT<ad::Var>;
using ComponentVars = ComponentParamsT<ad::Var>;
using ModelVars = ModelParamsT<ad::Var>;

/// Uniform(±sqrt(1/fan_in)) initialization, seeded.
ModelParams init_params(const ModelConfig& cfg, std::size_t stations, std::uint64_t seed);
/// Zero tensors with the same layout.
ModelParams zeros_like(const ModelParams& params);
std::size_t parameter_count(const ModelParams& params);
/// Places every tensor on the tape; as parameters when trainable, else as constants.
ModelVars bind(ad::Tape& tape, const ModelParams& params, bool trainable = true);

/// Precomputed graph operators consumed by the forward pass.
struct GraphArtifacts {
    Tensor scaled_laplacian;
    std::vector<Tensor> cheb;  // T_0 … T_{K−1} of the scaled Laplacian
    Tensor spatial_weights;    // M
};

GraphArtifacts make_artifacts(const railnet::RailGraph& graph, const ModelConfig& cfg);
/// T_0 = I, T_1 = L, T_k = 2·L·T_{k−1} − T_{k−2}.
std::vector<Tensor> chebyshev_polynomials(const Tensor& laplacian, std::size_t order);

// ---- forward building blocks (tape level) --------------------------------

/// Row-stochastic T×T time attention Z' of x: N×F×T.
ad::Var temporal_attention(ad::Var x, const BlockVars& p);
/// x reordered by Z' along time: reshape to (N·F)×T and right-multiply by Z'ᵀ.
ad::Var apply_temporal_attention(ad::Var x, ad::Var z);
/// Q = row-softmax(C ⊙ M), with C the N×N correlation of x_z.
ad::Var spatial_attention(ad::Var x_z, const BlockVars& p, const Tensor& spatial_weights);
/// Σ_k (T_k ⊙ Q)·X_t·θ_k for every time slice; returns N×C×T before activation.
ad::Var cheb_graph_conv(ad::Var x, ad::Var q, const std::vector<Tensor>& cheb, ad::Var theta);
/// ReLU(Φ * x) with a 1×3 kernel along time and same padding.
ad::Var temporal_conv(ad::Var x, ad::Var phi, ad::Var bias);
ad::Var block_forward(ad::Var x, const BlockVars& p, const GraphArtifacts& graph);
/// Blocks then the fully connected map (C·T) → t_p per node.
ad::Var component_forward(ad::Var x, const ComponentVars& p, const GraphArtifacts& graph);
ad::Var fuse(const std::vector<ad::Var>& outputs, const std::vector<ad::Var>& weights, bool use_final_relu);
ad::Var forward(ad::Tape& tape, const windows::Sample& sample, const ModelVars& vars, const ModelConfig& cfg,
                const GraphArtifacts& graph);

/// Channel subset of a window, in cfg.features order.
Tensor select_features(const Tensor& window, const std::vector<std::size_t>& features);

// ---- value-level entry points ------------------------------------------

Tensor forward(const windows::Sample& sample, const ModelParams& params, const ModelConfig& cfg,
               const GraphArtifacts& graph);

/// Parameter gradients of <loss_grad, Ŷ>; throws if any gradient is non-finite.
ModelParams backward(const windows::Sample& sample, const ModelParams& params, const ModelConfig& cfg,
                     const GraphArtifacts& graph, const Tensor& loss_grad);

/// Adds scale·∇(Σ mask·(Ŷ−Y)²) into grad and returns the unscaled masked SSE.
double accumulate_sse_gradient(const windows::Sample& sample, const ModelParams& params, const ModelConfig& cfg,
                               const GraphArtifacts& graph, double scale, ModelParams& grad);

// ---- checkpoints ---------------------------------------------------------

/// Binary: magic "RSTGCNCK", u32 version, u64 header length, JSON header (config echo,
/// tensor manifest, extra metadata), then every tensor as little-endian f64 in manifest
/// order. A readable copy of the header is written to path + ".json".
void save_checkpoint(const std::string& path, const ModelParams& params, const ModelConfig& cfg, std::size_t stations,
                     const nlohmann::json& extra = nlohmann::json::object());

struct Checkpoint {
    ModelConfig config;
    ModelParams params;
    std::size_t stations = 0;
    nlohmann::json extra;
};

Checkpoint load_checkpoint(const std::string& path);

} // namespace rstgcn::model
