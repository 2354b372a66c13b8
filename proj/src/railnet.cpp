#include "rstgcn/railnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace rstgcn::railnet {

std::size_t RailGraph::edge_count() const {
    std::size_t edges = 0;
    const std::size_t n = station_count();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (adjacency.at(i, j) != 0.0) ++edges;
    return edges;
}

double RailGraph::average_degree() const {
    if (stations.empty()) return 0.0;
    return 2.0 * static_cast<double>(edge_count()) / static_cast<double>(station_count());
}

double RailGraph::average_distance() const {
    const std::size_t n = station_count();
    double total = 0.0;
    std::size_t edges = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (adjacency.at(i, j) != 0.0) {
                total += distance.at(i, j);
                ++edges;
            }
    return edges ? total / static_cast<double>(edges) : 0.0;
}

double RailGraph::average_trains_per_edge() const {
    const std::size_t n = station_count();
    double total = 0.0;
    std::size_t edges = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (adjacency.at(i, j) != 0.0) {
                total += frequency.at(i, j);
                ++edges;
            }
    return edges ? total / static_cast<double>(edges) : 0.0;
}

std::vector<std::string> RailGraph::zones() const {
    std::set<std::string> tags;
    for (const auto& s : stations) tags.insert(s.zone);
    return {tags.begin(), tags.end()};
}

std::size_t RailGraph::index_of(const std::string& code) const {
    for (const auto& s : stations)
        if (s.code == code) return s.index;
    throw std::out_of_range("unknown station code '" + code + "'");
}

bool RailGraph::contains(const std::string& code) const {
    return std::any_of(stations.begin(), stations.end(), [&](const Station& s) { return s.code == code; });
}

void RailGraph::validate() const {
    const std::size_t n = station_count();
    const Shape square{n, n};
    require_shape(adjacency, square, "adjacency");
    require_shape(distance, square, "distance");
    require_shape(frequency, square, "frequency");
    std::set<std::string> codes;
    for (std::size_t i = 0; i < n; ++i) {
        if (stations[i].index != i) throw std::logic_error("station index not dense at " + std::to_string(i));
        if (!codes.insert(stations[i].code).second) {
            throw std::logic_error("duplicate station code '" + stations[i].code + "'");
        }
        if (adjacency.at(i, i) != 0.0 || distance.at(i, i) != 0.0 || frequency.at(i, i) != 0.0) {
            throw std::logic_error("nonzero diagonal at station " + stations[i].code);
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (adjacency.at(i, j) != adjacency.at(j, i) || distance.at(i, j) != distance.at(j, i) ||
                frequency.at(i, j) != frequency.at(j, i)) {
                throw std::logic_error("asymmetric graph matrices at (" + std::to_string(i) + ", " +
                                       std::to_string(j) + ")");
            }
            const bool a = adjacency.at(i, j) == 1.0;
            if (adjacency.at(i, j) != 0.0 && !a) throw std::logic_error("adjacency must be binary");
            if (a != (frequency.at(i, j) >= 1.0) || a != (distance.at(i, j) > 0.0)) {
                throw std::logic_error("adjacency/frequency/distance supports differ at (" + std::to_string(i) +
                                       ", " + std::to_string(j) + ")");
            }
        }
    }
}

RailGraph make_graph(std::vector<Station> stations) {
    RailGraph g;
    const std::size_t n = stations.size();
    for (std::size_t i = 0; i < n; ++i) stations[i].index = i;
    g.stations = std::move(stations);
    g.adjacency = Tensor({n, n});
    g.distance = Tensor({n, n});
    g.frequency = Tensor({n, n});
    return g;
}

void set_edge(RailGraph& graph, std::size_t i, std::size_t j, double distance_km, double trains) {
    if (i == j) throw std::invalid_argument("self-loop edge at station " + std::to_string(i));
    graph.adjacency.at(i, j) = graph.adjacency.at(j, i) = 1.0;
    graph.distance.at(i, j) = graph.distance.at(j, i) = distance_km;
    graph.frequency.at(i, j) = graph.frequency.at(j, i) = trains;
}

namespace {

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::optional<Minutes> stop_time(const RunRecord& r) {
    return r.sched_arr ? r.sched_arr : r.sched_dep;
}

struct EdgeObservations {
    std::vector<double> distances;
    std::set<std::string> trains;
};

} // namespace

RailGraph build_graph(const std::vector<RunRecord>& records, const ZoneMap& zones, BuildDiagnostics* diagnostics) {
    if (records.empty()) throw std::invalid_argument("build_graph: no records");
    BuildDiagnostics local;
    BuildDiagnostics& diag = diagnostics ? *diagnostics : local;
    diag = BuildDiagnostics{};

    std::map<std::string, std::string> names;
    std::map<std::pair<std::chrono::sys_days, std::string>, std::vector<const RunRecord*>> runs;
    for (const auto& r : records) {
        auto [it, inserted] = names.emplace(r.station_code, r.station_name);
        if (!inserted && it->second.empty()) it->second = r.station_name;
        runs[{std::chrono::sys_days(r.date), r.train_no}].push_back(&r);
    }

    std::vector<Station> stations;
    for (const auto& [code, name] : names) {
        Station s;
        s.code = code;
        s.name = name;
        if (auto z = zones.find(code); z != zones.end()) s.zone = z->second;
        stations.push_back(std::move(s));
    }
    RailGraph graph = make_graph(std::move(stations));
    std::map<std::string, std::size_t> index;
    for (const auto& s : graph.stations) index[s.code] = s.index;

    std::map<std::pair<std::size_t, std::size_t>, EdgeObservations> edges;
    for (auto& [key, stops] : runs) {
        ++diag.runs;
        std::sort(stops.begin(), stops.end(), [](const RunRecord* a, const RunRecord* b) {
            if (a->distance_km != b->distance_km) return a->distance_km < b->distance_km;
            return a->station_code < b->station_code;
        });
        bool ok = true;
        for (std::size_t k = 1; k < stops.size() && ok; ++k) {
            const RunRecord& prev = *stops[k - 1];
            const RunRecord& cur = *stops[k];
            if (cur.station_code == prev.station_code || cur.distance_km <= prev.distance_km) ok = false;
            const auto tp = stop_time(prev), tc = stop_time(cur);
            if (tp && tc && *tc < *tp) ok = false;
        }
        if (!ok) {
            ++diag.rejected_runs;
            diag.warnings.push_back("rejected run of train " + key.second +
                                    ": distance column not monotone along the schedule");
            continue;
        }
        for (std::size_t k = 1; k < stops.size(); ++k) {
            std::size_t a = index.at(stops[k - 1]->station_code);
            std::size_t b = index.at(stops[k]->station_code);
            if (a > b) std::swap(a, b);
            auto& obs = edges[{a, b}];
            obs.distances.push_back(std::abs(stops[k]->distance_km - stops[k - 1]->distance_km));
            obs.trains.insert(key.second);
        }
    }

    for (const auto& [ij, obs] : edges) {
        const double d = median(obs.distances);
        const auto [lo, hi] = std::minmax_element(obs.distances.begin(), obs.distances.end());
        if (*hi - *lo > 0.1 * d) {
            ++diag.inconsistent_distance_edges;
            diag.warnings.push_back("edge " + graph.stations[ij.first].code + "-" + graph.stations[ij.second].code +
                                    ": observed distances differ by more than 10%, using median");
        }
        set_edge(graph, ij.first, ij.second, d, static_cast<double>(obs.trains.size()));
    }
    return graph;
}

SpatialWeights spatial_weight_matrix(const RailGraph& graph, bool use_frequency) {
    const std::size_t n = graph.station_count();
    SpatialWeights w;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (graph.adjacency.at(i, j) != 0.0) w.k_max = std::max(w.k_max, graph.frequency.at(i, j));
    if (w.k_max <= 0.0) throw std::invalid_argument("spatial_weight_matrix: graph has no edges");
    w.matrix = Tensor({n, n});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (graph.adjacency.at(i, j) == 0.0) continue;
            const double d = graph.distance.at(i, j);
            if (!(d > 0.0)) {
                throw std::invalid_argument("spatial_weight_matrix: zero-distance edge " + graph.stations[i].code +
                                            "-" + graph.stations[j].code);
            }
            w.matrix.at(i, j) = use_frequency ? (1.0 / d) * (graph.frequency.at(i, j) / w.k_max) : 1.0 / d;
        }
    }
    return w;
}

RailGraph zone_subgraph(const RailGraph& graph, const std::string& zone) {
    std::vector<std::size_t> keep;
    for (const auto& s : graph.stations)
        if (s.zone == zone) keep.push_back(s.index);
    if (keep.empty()) {
        std::string valid;
        for (const auto& z : graph.zones()) valid += (valid.empty() ? "" : ", ") + z;
        throw std::invalid_argument("unknown zone '" + zone + "'; valid zones: " + valid);
    }
    std::vector<Station> stations;
    for (std::size_t i : keep) stations.push_back(graph.stations[i]);
    RailGraph sub = make_graph(std::move(stations));
    for (std::size_t a = 0; a < keep.size(); ++a)
        for (std::size_t b = a + 1; b < keep.size(); ++b)
            if (graph.adjacency.at(keep[a], keep[b]) != 0.0) {
                set_edge(sub, a, b, graph.distance.at(keep[a], keep[b]), graph.frequency.at(keep[a], keep[b]));
            }
    return sub;
}

namespace {

Tensor normalized_laplacian(const RailGraph& graph) {
    const std::size_t n = graph.station_count();
    std::vector<double> inv_sqrt_deg(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < n; ++j) deg += graph.adjacency.at(i, j);
        inv_sqrt_deg[i] = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
    }
    Tensor lap({n, n});
    for (std::size_t i = 0; i < n; ++i) {
        lap.at(i, i) = inv_sqrt_deg[i] > 0.0 ? 1.0 : 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) lap.at(i, j) = -graph.adjacency.at(i, j) * inv_sqrt_deg[i] * inv_sqrt_deg[j];
    }
    return lap;
}

} // namespace

double laplacian_lambda_max(const RailGraph& graph) {
    const std::size_t n = graph.station_count();
    if (n == 0) return 0.0;
    const Tensor lap = normalized_laplacian(graph);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = lap.at(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("laplacian eigen-decomposition failed");
    return solver.eigenvalues().maxCoeff();
}

Tensor scaled_laplacian(const RailGraph& graph) {
    const std::size_t n = graph.station_count();
    Tensor lap = normalized_laplacian(graph);
    double lambda = graph.edge_count() == 0 ? 2.0 : laplacian_lambda_max(graph);
    if (lambda <= 0.0) lambda = 2.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) lap.at(i, j) = (2.0 / lambda) * lap.at(i, j) - (i == j ? 1.0 : 0.0);
    return lap;
}

nlohmann::json to_json(const RailGraph& graph) {
    nlohmann::json doc;
    doc["stations"] = nlohmann::json::array();
    for (const auto& s : graph.stations) {
        doc["stations"].push_back({{"index", s.index}, {"code", s.code}, {"name", s.name}, {"zone", s.zone}});
    }
    doc["edges"] = nlohmann::json::array();
    const std::size_t n = graph.station_count();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (graph.adjacency.at(i, j) != 0.0) {
                doc["edges"].push_back({i, j, graph.distance.at(i, j), static_cast<long long>(graph.frequency.at(i, j))});
            }
    doc["statistics"] = {{"stations", graph.station_count()},
                         {"edges", graph.edge_count()},
                         {"average_degree", graph.average_degree()},
                         {"average_distance_km", graph.average_distance()},
                         {"average_trains_per_edge", graph.average_trains_per_edge()}};
    return doc;
}

RailGraph graph_from_json(const nlohmann::json& doc) {
    std::vector<Station> stations;
    for (const auto& js : doc.at("stations")) {
        Station s;
        s.index = js.at("index").get<std::size_t>();
        s.code = js.at("code").get<std::string>();
        s.name = js.value("name", std::string{});
        s.zone = js.value("zone", std::string(kUnknownZone));
        stations.push_back(std::move(s));
    }
    std::sort(stations.begin(), stations.end(), [](const Station& a, const Station& b) { return a.index < b.index; });
    for (std::size_t i = 0; i < stations.size(); ++i) {
        if (stations[i].index != i) throw std::invalid_argument("graph JSON: station indices are not 0..N-1");
    }
    RailGraph g = make_graph(std::move(stations));
    const std::size_t n = g.station_count();
    for (const auto& e : doc.at("edges")) {
        const auto i = e.at(0).get<std::size_t>();
        const auto j = e.at(1).get<std::size_t>();
        if (i >= n || j >= n) throw std::invalid_argument("graph JSON: edge index out of range");
        set_edge(g, i, j, e.at(2).get<double>(), e.at(3).get<double>());
    }
    g.validate();
    return g;
}

void save_graph(const RailGraph& graph, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write graph file '" + path + "'");
    out << to_json(graph).dump(2) << '\n';
}

RailGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read graph file '" + path + "'");
    return graph_from_json(nlohmann::json::parse(in));
}

ZoneMap load_zone_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read zone map '" + path + "'");
    ZoneMap zones;
    std::string line;
    std::size_t row = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r\"");
        const auto e = s.find_last_not_of(" \t\r\"");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("zone map row " + std::to_string(row) + ": expected 'station_code,zone'");
        }
        const std::string code = trim(line.substr(0, comma));
        const std::string zone = trim(line.substr(comma + 1));
        if (row == 1 && code == "station_code") continue;
        zones[code] = zone;
    }
    return zones;
}

} // namespace rstgcn::railnet
