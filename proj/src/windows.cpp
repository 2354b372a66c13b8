#include "rstgcn/windows.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace rstgcn::windows {

void WindowConfig::validate() const {
    if (t_p < 1 || q < t_p) throw std::invalid_argument("window config: need q >= t_p >= 1");
    if (t_d % t_p != 0 || t_w % t_p != 0) throw std::invalid_argument("window config: t_d and t_w must be multiples of t_p");
    if (t_h == 0 && t_d == 0 && t_w == 0) throw std::invalid_argument("window config: all components disabled");
}

std::size_t WindowConfig::earliest_anchor() const {
    std::size_t need = t_h > 0 ? t_h - 1 : 0;
    if (t_d > 0) need = std::max(need, (t_d / t_p) * q - 1);
    if (t_w > 0) need = std::max(need, 7 * (t_w / t_p) * q - 1);
    return need;
}

namespace {

void require_history(std::size_t t0, std::size_t span, const char* what) {
    if (t0 + 1 < span) {
        throw std::out_of_range(std::string(what) + " window needs t0 >= " + std::to_string(span - 1) + ", got t0 = " +
                                std::to_string(t0));
    }
}

std::vector<std::size_t> periodic_indices(std::size_t t0, std::size_t groups, std::size_t period, std::size_t t_p,
                                          const char* what) {
    std::vector<std::size_t> out;
    if (groups == 0) return out;
    require_history(t0, groups * period, what);
    for (std::size_t m = groups; m >= 1; --m) {
        const std::size_t first = t0 - m * period + 1;
        for (std::size_t k = 0; k < t_p; ++k) out.push_back(first + k);
    }
    return out;
}

} // namespace

std::vector<std::size_t> recent_indices(std::size_t t0, const WindowConfig& cfg) {
    std::vector<std::size_t> out;
    if (cfg.t_h == 0) return out;
    require_history(t0, cfg.t_h, "recent");
    for (std::size_t s = t0 + 1 - cfg.t_h; s <= t0; ++s) out.push_back(s);
    return out;
}

std::vector<std::size_t> daily_indices(std::size_t t0, const WindowConfig& cfg) {
    return periodic_indices(t0, cfg.t_d / cfg.t_p, cfg.q, cfg.t_p, "daily");
}

std::vector<std::size_t> weekly_indices(std::size_t t0, const WindowConfig& cfg) {
    return periodic_indices(t0, cfg.t_w / cfg.t_p, 7 * cfg.q, cfg.t_p, "weekly");
}

Tensor gather_slots(const ingest::FeatureCube& cube, const std::vector<std::size_t>& indices) {
    const std::size_t n = cube.stations(), f = cube.features(), w = indices.size();
    Tensor out({n, f, w});
    for (std::size_t s : indices) {
        if (s >= cube.slots()) {
            throw std::out_of_range("window slot " + std::to_string(s) + " beyond series of " +
                                    std::to_string(cube.slots()) + " slots");
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < f; ++c)
            for (std::size_t k = 0; k < w; ++k) out.at(i, c, k) = cube.X.at(i, c, indices[k]);
    return out;
}

Tensor recent_window(const ingest::FeatureCube& cube, std::size_t t0, const WindowConfig& cfg) {
    return gather_slots(cube, recent_indices(t0, cfg));
}

Tensor daily_window(const ingest::FeatureCube& cube, std::size_t t0, const WindowConfig& cfg) {
    return gather_slots(cube, daily_indices(t0, cfg));
}

Tensor weekly_window(const ingest::FeatureCube& cube, std::size_t t0, const WindowConfig& cfg) {
    return gather_slots(cube, weekly_indices(t0, cfg));
}

Sample make_sample(const ingest::FeatureCube& cube, std::size_t t0, const WindowConfig& cfg) {
    if (t0 + cfg.t_p >= cube.slots()) {
        throw std::out_of_range("anchor " + std::to_string(t0) + " has no full target within " +
                                std::to_string(cube.slots()) + " slots");
    }
    Sample s;
    s.t0 = t0;
    s.X_h = recent_window(cube, t0, cfg);
    s.X_d = daily_window(cube, t0, cfg);
    s.X_w = weekly_window(cube, t0, cfg);
    const std::size_t n = cube.stations();
    s.Y = Tensor({n, cfg.t_p});
    s.mask = Tensor({n, cfg.t_p});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < cfg.t_p; ++k) {
            s.Y.at(i, k) = cube.Y.at(i, t0 + 1 + k);
            s.mask.at(i, k) = cube.mask.at(i, t0 + 1 + k);
        }
    return s;
}

std::vector<Sample> enumerate_samples(const ingest::FeatureCube& cube, const std::vector<std::size_t>& anchors,
                                      const WindowConfig& cfg) {
    std::vector<Sample> out;
    out.reserve(anchors.size());
    for (std::size_t t0 : anchors) out.push_back(make_sample(cube, t0, cfg));
    return out;
}

std::vector<std::size_t> valid_anchors(std::size_t slots, const WindowConfig& cfg) {
    cfg.validate();
    std::size_t first = cfg.earliest_anchor();
    if (cfg.history_prefix > 0) first = std::max(first, cfg.history_prefix - 1);
    std::vector<std::size_t> out;
    for (std::size_t t0 = first; t0 + cfg.t_p < slots; ++t0) out.push_back(t0);
    return out;
}

Split split_anchors(const std::vector<std::size_t>& anchors) {
    const std::size_t n = anchors.size();
    const std::size_t n_test = n / 5;
    const std::size_t rest = n - n_test;
    const std::size_t n_val = rest / 5;
    const std::size_t n_train = rest - n_val;
    if (n_test == 0 || n_val == 0 || n_train == 0) {
        throw std::invalid_argument("split: " + std::to_string(n) +
                                    " valid anchors are too few for nonempty train/validation/test sets");
    }
    Split s;
    s.train.assign(anchors.begin(), anchors.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.val.assign(anchors.begin() + static_cast<std::ptrdiff_t>(n_train),
                 anchors.begin() + static_cast<std::ptrdiff_t>(rest));
    s.test.assign(anchors.begin() + static_cast<std::ptrdiff_t>(rest), anchors.end());
    return s;
}

Split split_dataset(const ingest::FeatureCube& cube, const WindowConfig& cfg) {
    if (cube.slots() <= cfg.history_prefix + cfg.t_p) {
        throw std::invalid_argument("split: series of " + std::to_string(cube.slots()) + " slots must exceed " +
                                    std::to_string(cfg.history_prefix + cfg.t_p));
    }
    return split_anchors(valid_anchors(cube.slots(), cfg));
}

nlohmann::json to_json(const Split& split) {
    return {{"train", split.train}, {"val", split.val}, {"test", split.test}};
}

Split split_from_json(const nlohmann::json& doc) {
    Split s;
    s.train = doc.at("train").get<std::vector<std::size_t>>();
    s.val = doc.at("val").get<std::vector<std::size_t>>();
    s.test = doc.at("test").get<std::vector<std::size_t>>();
    return s;
}

ChannelScaler ChannelScaler::fit(const ingest::FeatureCube& cube, const std::vector<std::size_t>& anchors,
                                 const WindowConfig& cfg) {
    std::set<std::size_t> slots;
    for (std::size_t t0 : anchors) {
        for (auto s : recent_indices(t0, cfg)) slots.insert(s);
        for (auto s : daily_indices(t0, cfg)) slots.insert(s);
        for (auto s : weekly_indices(t0, cfg)) slots.insert(s);
    }
    const std::size_t f = cube.features(), n = cube.stations();
    ChannelScaler sc;
    sc.mean.assign(f, 0.0);
    sc.stddev.assign(f, 1.0);
    if (slots.empty()) return sc;
    const double count = static_cast<double>(slots.size() * n);
    for (std::size_t c = 0; c < f; ++c) {
        double sum = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t s : slots) {
                const double v = cube.X.at(i, c, s);
                sum += v;
                sq += v * v;
            }
        const double mean = sum / count;
        const double var = std::max(sq / count - mean * mean, 0.0);
        sc.mean[c] = mean;
        sc.stddev[c] = var > 1e-12 ? std::sqrt(var) : 1.0;
    }
    return sc;
}

void ChannelScaler::apply(Tensor& w) const {
    if (w.empty()) return;
    const std::size_t n = w.dim(0), f = w.dim(1), t = w.dim(2);
    if (f != mean.size()) throw std::invalid_argument("channel scaler: channel count mismatch");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < f; ++c)
            for (std::size_t k = 0; k < t; ++k) w.at(i, c, k) = (w.at(i, c, k) - mean[c]) / stddev[c];
}

void ChannelScaler::apply(Sample& sample) const {
    apply(sample.X_h);
    apply(sample.X_d);
    apply(sample.X_w);
}

} // namespace rstgcn::windows
