#pragma once

#include "rstgcn/railnet.hpp"
#include "rstgcn/tensor.hpp"
#include "rstgcn/windows.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace rstgcn::eval {

/// Mean absolute error over masked cells, in hours; absent when nothing is masked.
std::optional<double> mae(const Tensor& pred, const Tensor& actual, const Tensor& mask);
/// Percent error over masked cells. A cell with actual > 0 contributes |p−a|/a; a cell
/// with actual = 0 contributes |p−a| itself. The mean of the terms is multiplied by 100.
std::optional<double> mape(const Tensor& pred, const Tensor& actual, const Tensor& mask);
std::optional<double> rmse(const Tensor& pred, const Tensor& actual, const Tensor& mask);

struct Metrics {
    std::optional<double> mae;
    std::optional<double> mape;
    std::optional<double> rmse;
    std::size_t cells = 0;
};

struct HorizonMetrics {
    std::vector<Metrics> per_horizon;  // index h−1
    /// Entry i−1 is the mean of per-horizon values 1..i.
    std::vector<Metrics> cumulative;
};

struct MetricReport {
    std::size_t horizons = 0;
    /// "ALL" plus one row per zone when a graph is supplied.
    std::map<std::string, HorizonMetrics> rows;
};

inline constexpr const char* kAllRow = "ALL";

/// Metrics from precomputed predictions (one N×t_p tensor per sample).
MetricReport horizon_report(const std::vector<Tensor>& predictions, const std::vector<windows::Sample>& samples,
                            const railnet::RailGraph* graph = nullptr);

using Predictor = std::function<Tensor(const windows::Sample&)>;
MetricReport horizon_report(const Predictor& predictor, const std::vector<windows::Sample>& samples,
                            const railnet::RailGraph* graph = nullptr);

nlohmann::json to_json(const MetricReport& report);

/// Rows zone|ALL, columns MAE (h), MAPE (%), RMSE (h); each cell "h1 / h2 / … ".
std::string report_csv(const MetricReport& report);
/// One line per horizon i with the cumulative ALL metrics.
std::string cumulative_csv(const MetricReport& report);

} // namespace rstgcn::eval
