#include "rstgcn/eval.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rstgcn::eval {

namespace {

void require_same(const Tensor& pred, const Tensor& actual, const Tensor& mask, const char* what) {
    if (pred.shape() != actual.shape() || pred.shape() != mask.shape()) {
        throw std::invalid_argument(std::string(what) + ": shapes " + shape_string(pred.shape()) + ", " +
                                    shape_string(actual.shape()) + ", " + shape_string(mask.shape()) + " differ");
    }
}

// Running sums for one group of cells.
struct Accum {
    double abs = 0.0, pct = 0.0, sq = 0.0, weight = 0.0;
    std::size_t cells = 0;

    void add(double p, double a, double m) {
        if (m == 0.0) return;
        const double e = std::abs(p - a);
        abs += m * e;
        pct += m * (a > 0.0 ? e / a : e);
        sq += m * e * e;
        weight += m;
        ++cells;
    }

    Metrics metrics() const {
        Metrics out;
        out.cells = cells;
        if (weight > 0.0) {
            out.mae = abs / weight;
            out.mape = 100.0 * pct / weight;
            out.rmse = std::sqrt(sq / weight);
        }
        return out;
    }
};

Accum accumulate(const Tensor& pred, const Tensor& actual, const Tensor& mask) {
    Accum acc;
    for (std::size_t i = 0; i < pred.size(); ++i) acc.add(pred[i], actual[i], mask[i]);
    return acc;
}

std::optional<double> mean_of(const std::vector<Metrics>& ms, std::size_t upto, std::optional<double> Metrics::*field) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < upto; ++i) {
        if (const auto& v = ms[i].*field) {
            sum += *v;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

HorizonMetrics finish(const std::vector<Accum>& per_h) {
    HorizonMetrics hm;
    for (const auto& a : per_h) hm.per_horizon.push_back(a.metrics());
    for (std::size_t i = 1; i <= per_h.size(); ++i) {
        Metrics c;
        c.mae = mean_of(hm.per_horizon, i, &Metrics::mae);
        c.mape = mean_of(hm.per_horizon, i, &Metrics::mape);
        c.rmse = mean_of(hm.per_horizon, i, &Metrics::rmse);
        for (std::size_t k = 0; k < i; ++k) c.cells += hm.per_horizon[k].cells;
        hm.cumulative.push_back(c);
    }
    return hm;
}

std::string fmt(const std::optional<double>& v) {
    if (!v) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

nlohmann::json metrics_json(const Metrics& m) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"mae", opt(m.mae)}, {"mape", opt(m.mape)}, {"rmse", opt(m.rmse)}, {"cells", m.cells}};
}

} // namespace

std::optional<double> mae(const Tensor& pred, const Tensor& actual, const Tensor& mask) {
    require_same(pred, actual, mask, "mae");
    return accumulate(pred, actual, mask).metrics().mae;
}

std::optional<double> mape(const Tensor& pred, const Tensor& actual, const Tensor& mask) {
    require_same(pred, actual, mask, "mape");
    return accumulate(pred, actual, mask).metrics().mape;
}

std::optional<double> rmse(const Tensor& pred, const Tensor& actual, const Tensor& mask) {
    require_same(pred, actual, mask, "rmse");
    return accumulate(pred, actual, mask).metrics().rmse;
}

MetricReport horizon_report(const std::vector<Tensor>& predictions, const std::vector<windows::Sample>& samples,
                            const railnet::RailGraph* graph) {
    if (samples.empty()) throw std::invalid_argument("horizon_report: no samples");
    if (predictions.size() != samples.size()) {
        throw std::invalid_argument("horizon_report: " + std::to_string(predictions.size()) + " predictions for " +
                                    std::to_string(samples.size()) + " samples");
    }
    const std::size_t n = samples.front().Y.dim(0), t_p = samples.front().Y.dim(1);
    if (graph && graph->stations.size() != n) {
        throw std::invalid_argument("horizon_report: graph has " + std::to_string(graph->stations.size()) +
                                    " stations but samples have " + std::to_string(n));
    }
    std::map<std::string, std::vector<Accum>> acc;
    acc[kAllRow].resize(t_p);
    if (graph)
        for (const auto& st : graph->stations) acc[st.zone].resize(t_p);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const Tensor& p = predictions[s];
        const windows::Sample& smp = samples[s];
        require_same(p, smp.Y, smp.mask, "horizon_report");
        if (p.dim(0) != n || p.dim(1) != t_p) throw std::invalid_argument("horizon_report: inconsistent sample shapes");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t h = 0; h < t_p; ++h) {
                acc[kAllRow][h].add(p.at(i, h), smp.Y.at(i, h), smp.mask.at(i, h));
                if (graph) acc[graph->stations[i].zone][h].add(p.at(i, h), smp.Y.at(i, h), smp.mask.at(i, h));
            }
    }
    MetricReport report;
    report.horizons = t_p;
    for (const auto& [row, per_h] : acc) report.rows[row] = finish(per_h);
    return report;
}

MetricReport horizon_report(const Predictor& predictor, const std::vector<windows::Sample>& samples,
                            const railnet::RailGraph* graph) {
    std::vector<Tensor> preds;
    preds.reserve(samples.size());
    for (const auto& s : samples) preds.push_back(predictor(s));
    return horizon_report(preds, samples, graph);
}

nlohmann::json to_json(const MetricReport& report) {
    nlohmann::json rows = nlohmann::json::object();
    for (const auto& [name, hm] : report.rows) {
        nlohmann::json per = nlohmann::json::array(), cum = nlohmann::json::array();
        for (const auto& m : hm.per_horizon) per.push_back(metrics_json(m));
        for (const auto& m : hm.cumulative) cum.push_back(metrics_json(m));
        rows[name] = {{"per_horizon", per}, {"cumulative", cum}};
    }
    return {{"horizons", report.horizons}, {"units", {{"mae", "hours"}, {"mape", "percent"}, {"rmse", "hours"}}},
            {"rows", rows}};
}

std::string report_csv(const MetricReport& report) {
    std::ostringstream out;
    out << "row,MAE (h),MAPE (%),RMSE (h)\n";
    auto cell = [](const HorizonMetrics& hm, std::optional<double> Metrics::*field) {
        std::string s;
        for (std::size_t h = 0; h < hm.per_horizon.size(); ++h) {
            if (h > 0) s += " / ";
            s += fmt(hm.per_horizon[h].*field);
        }
        return s;
    };
    auto write_row = [&](const std::string& name, const HorizonMetrics& hm) {
        out << name << ',' << cell(hm, &Metrics::mae) << ',' << cell(hm, &Metrics::mape) << ','
            << cell(hm, &Metrics::rmse) << '\n';
    };
    if (auto it = report.rows.find(kAllRow); it != report.rows.end()) write_row(it->first, it->second);
    for (const auto& [name, hm] : report.rows)
        if (name != kAllRow) write_row(name, hm);
    return out.str();
}

std::string cumulative_csv(const MetricReport& report) {
    std::ostringstream out;
    out << "horizon,MAE (h),MAPE (%),RMSE (h)\n";
    const auto it = report.rows.find(kAllRow);
    if (it == report.rows.end()) return out.str();
    for (std::size_t i = 0; i < it->second.cumulative.size(); ++i) {
        const Metrics& m = it->second.cumulative[i];
        out << (i + 1) << ',' << fmt(m.mae) << ',' << fmt(m.mape) << ',' << fmt(m.rmse) << '\n';
    }
    return out.str();
}

} // namespace rstgcn::eval
