#pragma once

#include "rstgcn/tensor.hpp"
#include "rstgcn/windows.hpp"

#include <string>

namespace rstgcn::baselines {

enum class BaselineKind { HistoricalAverage, Persistence };

BaselineKind parse_baseline(const std::string& name);  // "ha" or "persistence"
std::string baseline_name(BaselineKind kind);

/// Per station, the mean of channel 0 over every slot of X_h, X_d and X_w (or X_h alone),
/// repeated for each of the t_p horizons.
Tensor ha_predict(const windows::Sample& sample, bool recent_only = false);

/// Last slot of the recent window's channel 0, repeated for each horizon.
Tensor persistence_predict(const windows::Sample& sample);

Tensor predict(BaselineKind kind, const windows::Sample& sample, bool recent_only = false);

} // namespace rstgcn::baselines
