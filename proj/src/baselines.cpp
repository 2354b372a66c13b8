#include "rstgcn/baselines.hpp"

#include <stdexcept>

namespace rstgcn::baselines {

BaselineKind parse_baseline(const std::string& name) {
    if (name == "ha" || name == "historical_average") return BaselineKind::HistoricalAverage;
    if (name == "persistence") return BaselineKind::Persistence;
    throw std::invalid_argument("unknown baseline '" + name + "' (expected ha or persistence)");
}

std::string baseline_name(BaselineKind kind) {
    return kind == BaselineKind::HistoricalAverage ? "ha" : "persistence";
}

namespace {

std::size_t horizons(const windows::Sample& s) {
    if (s.Y.rank() != 2) throw std::invalid_argument("baseline: sample target must be N×t_p");
    return s.Y.dim(1);
}

} // namespace

Tensor ha_predict(const windows::Sample& sample, bool recent_only) {
    const std::size_t n = sample.Y.dim(0), t_p = horizons(sample);
    std::vector<const Tensor*> windows{&sample.X_h};
    if (!recent_only) {
        windows.push_back(&sample.X_d);
        windows.push_back(&sample.X_w);
    }
    Tensor out({n, t_p});
    std::size_t slots = 0;
    for (const Tensor* w : windows)
        if (!w->empty()) slots += w->dim(2);
    if (slots == 0) throw std::invalid_argument("ha_predict: sample has no input slots");
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (const Tensor* w : windows) {
            if (w->empty()) continue;
            for (std::size_t k = 0; k < w->dim(2); ++k) sum += w->at(i, 0, k);
        }
        const double mean = sum / static_cast<double>(slots);
        for (std::size_t h = 0; h < t_p; ++h) out.at(i, h) = mean;
    }
    return out;
}

Tensor persistence_predict(const windows::Sample& sample) {
    if (sample.X_h.empty()) throw std::invalid_argument("persistence_predict: recent window is empty");
    const std::size_t n = sample.Y.dim(0), t_p = horizons(sample), last = sample.X_h.dim(2) - 1;
    Tensor out({n, t_p});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t h = 0; h < t_p; ++h) out.at(i, h) = sample.X_h.at(i, 0, last);
    return out;
}

Tensor predict(BaselineKind kind, const windows::Sample& sample, bool recent_only) {
    return kind == BaselineKind::HistoricalAverage ? ha_predict(sample, recent_only) : persistence_predict(sample);
}

} // namespace rstgcn::baselines
