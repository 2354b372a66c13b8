#pragma once

#include "rstgcn/ingest.hpp"
#include "rstgcn/tensor.hpp"

#include <cstddef>
#include <vector>

#include <json.hpp>

namespace rstgcn::windows {

/// Slot geometry of the recent/daily/weekly inputs. t_d and t_w are multiples of t_p;
/// zero disables a component.
struct WindowConfig {
    std::size_t q = 24;
    std::size_t t_p = 3;
    std::size_t t_h = 3;
    std::size_t t_d = 3;
    std::size_t t_w = 3;
    /// Leading slots used only as history (seven days at hourly sampling).
    std::size_t history_prefix = 168;

    void validate() const;
    /// Smallest anchor with every window inside the series.
    std::size_t earliest_anchor() const;
};

/// Slot indices, oldest first.
std::vector<std::size_t> recent_indices(std::size_t t0, const WindowConfig& cfg);
std::vector<std::size_t> daily_indices(std::size_t t0, const WindowConfig& cfg);
std::vector<std::size_t> weekly_indices(std::size_t t0, const WindowConfig& cfg);

/// N×F×|indices| gather from the cube.
Tensor gather_slots(const ingest::FeatureCube& cube, const std::vector<std::size_t>& indices);

Tensor recent_window(const ingest::FeatureCube& cube, std::size_t t0, const WindowConfig& cfg);
Tensor daily_window(const ingest::FeatureCube& cube, std::size_t t0, const WindowConfig& cfg);
Tensor weekly_window(const ingest::FeatureCube& cube, std::size_t t0, const WindowConfig& cfg);

struct Sample {
    Tensor X_h;
    Tensor X_d;
    Tensor X_w;
    Tensor Y;     // N×t_p
    Tensor mask;  // N×t_p
    std::size_t t0 = 0;
};

Sample make_sample(const ingest::FeatureCube& cube, std::size_t t0, const WindowConfig& cfg);
std::vector<Sample> enumerate_samples(const ingest::FeatureCube& cube, const std::vector<std::size_t>& anchors,
                                      const WindowConfig& cfg);

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

/// Every anchor with full history (and past the history prefix) and a full target.
std::vector<std::size_t> valid_anchors(std::size_t slots, const WindowConfig& cfg);
/// Chronological split: last 20% of anchors (floor) to test, last 20% of the rest to validation.
Split split_anchors(const std::vector<std::size_t>& anchors);
Split split_dataset(const ingest::FeatureCube& cube, const WindowConfig& cfg);

nlohmann::json to_json(const Split& split);
Split split_from_json(const nlohmann::json& doc);

/// Per-channel standardization fitted on the slots of a set of anchors. Only inputs are
/// rescaled; targets stay in hours.
struct ChannelScaler {
    std::vector<double> mean;
    std::vector<double> stddev;

    static ChannelScaler fit(const ingest::FeatureCube& cube, const std::vector<std::size_t>& anchors,
                             const WindowConfig& cfg);
    void apply(Tensor& window) const;
    void apply(Sample& sample) const;
};

} // namespace rstgcn::windows
