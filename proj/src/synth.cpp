#include "rstgcn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rstgcn::synth {

namespace {

// Independent random streams so that, e.g., changing coverage leaves the topology alone.
enum Stream : std::uint64_t { kTopology = 1, kRecordNoise = 2, kFieldNoise = 3, kMask = 4, kCounts = 5 };

std::mt19937_64 stream(const SynthConfig& cfg, Stream s) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(s)};
    return std::mt19937_64(seq);
}

std::string padded(const char* fmt, std::size_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

} // namespace

Topology parse_topology(const std::string& name) {
    if (name == "path") return Topology::Path;
    if (name == "grid") return Topology::Grid;
    if (name == "random-tree") return Topology::RandomTree;
    throw std::invalid_argument("unknown topology '" + name + "' (expected path, grid or random-tree)");
}

std::string topology_name(Topology t) {
    switch (t) {
    case Topology::Path: return "path";
    case Topology::Grid: return "grid";
    case Topology::RandomTree: return "random-tree";
    }
    return "path";
}

void SynthConfig::validate() const {
    if (stations < 2) throw std::invalid_argument("synth: need at least 2 stations");
    if (stations > 999) throw std::invalid_argument("synth: at most 999 stations");
    if (days < 1) throw std::invalid_argument("synth: need at least one day");
    if (trains_per_day < 1 || trains_per_day > 99) throw std::invalid_argument("synth: trains_per_day must be 1..99");
    if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("synth: rho must lie in [0, 1)");
    if (base_delay < 0.0 || noise < 0.0 || daily_amplitude < 0.0 || weekly_amplitude < 0.0) {
        throw std::invalid_argument("synth: delay terms must be nonnegative");
    }
    if (!(coverage > 0.0 && coverage <= 1.0)) throw std::invalid_argument("synth: coverage must lie in (0, 1]");
    if (zones < 1) throw std::invalid_argument("synth: need at least one zone");
    if (!start.ok()) throw std::invalid_argument("synth: invalid start date");
    if (initial_delay && *initial_delay < 0.0) throw std::invalid_argument("synth: initial delay must be >= 0");
}

Minutes SynthConfig::t_start() const {
    return make_minutes(start, 0, 0);
}

double SynthConfig::seasonal(double h) const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return base_delay + daily_amplitude * std::sin(two_pi * h / 24.0) + weekly_amplitude * std::sin(two_pi * h / 168.0);
}

nlohmann::json to_json(const SynthConfig& cfg) {
    nlohmann::json j = {{"seed", cfg.seed},
                        {"stations", cfg.stations},
                        {"days", cfg.days},
                        {"trains_per_day", cfg.trains_per_day},
                        {"topology", topology_name(cfg.topology)},
                        {"rho", cfg.rho},
                        {"base_delay_h", cfg.base_delay},
                        {"daily_amplitude_h", cfg.daily_amplitude},
                        {"weekly_amplitude_h", cfg.weekly_amplitude},
                        {"noise_h", cfg.noise},
                        {"coverage", cfg.coverage},
                        {"zones", cfg.zones},
                        {"start", format_timestamp(cfg.t_start())}};
    j["initial_delay_h"] = cfg.initial_delay ? nlohmann::json(*cfg.initial_delay) : nlohmann::json(nullptr);
    return j;
}

Network make_network(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.stations;
    std::vector<railnet::Station> stations;
    for (std::size_t i = 0; i < n; ++i) {
        stations.push_back({padded("S%03zu", i), "Station " + std::to_string(i),
                            "Z" + std::to_string(1 + i * cfg.zones / n), i});
    }
    Network net;
    net.graph = railnet::make_graph(std::move(stations));
    auto rng = stream(cfg, kTopology);
    std::uniform_int_distribution<int> km(15, 60);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<std::vector<std::size_t>> lines;

    switch (cfg.topology) {
    case Topology::Path: {
        std::vector<std::size_t> line;
        for (std::size_t i = 0; i < n; ++i) {
            line.push_back(i);
            if (i > 0) edges.emplace_back(i - 1, i);
        }
        lines.push_back(line);
        break;
    }
    case Topology::Grid: {
        const auto rows = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
        const std::size_t cols = (n + rows - 1) / rows;
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<std::size_t> line;
            for (std::size_t c = 0; c < cols && r * cols + c < n; ++c) {
                line.push_back(r * cols + c);
                if (c > 0) edges.emplace_back(r * cols + c - 1, r * cols + c);
            }
            lines.push_back(line);
        }
        for (std::size_t c = 0; c < cols; ++c) {
            std::vector<std::size_t> line;
            for (std::size_t r = 0; r < rows && r * cols + c < n; ++r) {
                line.push_back(r * cols + c);
                if (r > 0) edges.emplace_back((r - 1) * cols + c, r * cols + c);
            }
            lines.push_back(line);
        }
        break;
    }
    case Topology::RandomTree: {
        std::vector<std::size_t> parent(n, 0);
        std::vector<bool> has_child(n, false);
        for (std::size_t i = 1; i < n; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i - std::min<std::size_t>(i, 3), i - 1);
            parent[i] = pick(rng);
            has_child[parent[i]] = true;
            edges.emplace_back(parent[i], i);
        }
        for (std::size_t leaf = 1; leaf < n; ++leaf) {
            if (has_child[leaf]) continue;
            std::vector<std::size_t> line{leaf};
            while (line.back() != 0) line.push_back(parent[line.back()]);
            std::reverse(line.begin(), line.end());
            lines.push_back(line);
        }
        break;
    }
    }

    for (const auto& [a, b] : edges) railnet::set_edge(net.graph, a, b, static_cast<double>(km(rng)), 0.0);
    for (const auto& line : lines) {
        if (line.size() < 2) continue;
        net.routes.push_back(line);
        net.routes.emplace_back(line.rbegin(), line.rend());
    }
    const auto trains = static_cast<double>(cfg.trains_per_day);
    for (const auto& route : net.routes)
        for (std::size_t k = 0; k + 1 < route.size(); ++k) {
            const std::size_t a = route[k], b = route[k + 1];
            railnet::set_edge(net.graph, a, b, net.graph.distance.at(a, b), net.graph.frequency.at(a, b) + trains);
        }
    net.graph.validate();
    return net;
}

SynthRecords generate_records(const SynthConfig& cfg) {
    Network net = make_network(cfg);
    auto rng = stream(cfg, kRecordNoise);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Minutes t0 = cfg.t_start();
    const std::size_t spacing = 1440 / cfg.trains_per_day;
    const auto& g = net.graph;
    SynthRecords out;

    for (std::size_t day = 0; day < cfg.days; ++day) {
        const auto date = std::chrono::year_month_day{std::chrono::sys_days{cfg.start} + std::chrono::days{day}};
        for (std::size_t r = 0; r < net.routes.size(); ++r) {
            const auto& route = net.routes[r];
            for (std::size_t k = 0; k < cfg.trains_per_day; ++k) {
                const std::string train_no = std::to_string(10000 + r * 100 + k);
                const std::string train_name = "SYN EXP " + std::to_string(r) + "-" + std::to_string(k);
                const auto offset = static_cast<long>(day * 1440 + k * spacing + (r * 17) % spacing);
                Minutes sched_dep = t0 + std::chrono::minutes{offset};
                auto hour_of = [&](Minutes t) { return static_cast<double>((t - t0).count()) / 60.0; };
                auto noise_min = [&] { return cfg.noise > 0.0 ? 60.0 * cfg.noise * gauss(rng) : 0.0; };

                const double initial =
                    cfg.initial_delay ? *cfg.initial_delay : cfg.seasonal(hour_of(sched_dep)) / (1.0 - cfg.rho);
                int delay = static_cast<int>(std::lround(std::max(0.0, 60.0 * initial + noise_min())));
                double km = 0.0;

                RunRecord origin;
                origin.date = date;
                origin.train_no = train_no;
                origin.train_name = train_name;
                origin.station_code = g.stations[route[0]].code;
                origin.station_name = g.stations[route[0]].name;
                origin.distance_km = 0.0;
                origin.sched_dep = sched_dep;
                origin.act_dep = sched_dep + std::chrono::minutes{delay};
                origin.dep_delay_min = delay;
                out.records.push_back(origin);

                for (std::size_t j = 1; j < route.size(); ++j) {
                    const double hop = g.distance.at(route[j - 1], route[j]);
                    km += hop;
                    const Minutes sched_arr = sched_dep + std::chrono::minutes{static_cast<long>(hop)};
                    const double next = cfg.rho * delay + 60.0 * cfg.seasonal(hour_of(sched_arr)) + noise_min();
                    delay = static_cast<int>(std::lround(std::max(0.0, next)));
                    RunRecord rec;
                    rec.date = date;
                    rec.train_no = train_no;
                    rec.train_name = train_name;
                    rec.station_code = g.stations[route[j]].code;
                    rec.station_name = g.stations[route[j]].name;
                    rec.distance_km = km;
                    rec.sched_arr = sched_arr;
                    rec.act_arr = sched_arr + std::chrono::minutes{delay};
                    rec.arr_delay_min = delay;
                    if (j + 1 < route.size()) {
                        sched_dep = sched_arr + std::chrono::minutes{2};
                        rec.sched_dep = sched_dep;
                        rec.act_dep = sched_dep + std::chrono::minutes{delay};
                        rec.dep_delay_min = delay;
                    }
                    out.records.push_back(rec);
                }
            }
        }
    }
    out.graph = std::move(net.graph);
    out.routes = std::move(net.routes);
    return out;
}

SynthCube generate_cube(const SynthConfig& cfg) {
    Network net = make_network(cfg);
    const std::size_t n = cfg.stations, slots = cfg.slots();
    const Tensor m = railnet::spatial_weight_matrix(net.graph, true).matrix;
    Tensor w({n, n});
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += m.at(i, j);
        if (row > 0.0)
            for (std::size_t j = 0; j < n; ++j) w.at(i, j) = m.at(i, j) / row;
    }

    auto noise_rng = stream(cfg, kFieldNoise);
    std::normal_distribution<double> gauss(0.0, 1.0);
    constexpr std::size_t kBurnIn = 168;
    std::vector<double> prev(n, cfg.base_delay / (1.0 - cfg.rho)), cur(n);
    SynthCube out;
    out.latent = Tensor({n, slots});
    for (std::size_t step = 0; step < kBurnIn + slots; ++step) {
        const double h = static_cast<double>(step) - static_cast<double>(kBurnIn);
        const double s = cfg.seasonal(h);
        for (std::size_t i = 0; i < n; ++i) {
            double spread = 0.0;
            for (std::size_t j = 0; j < n; ++j) spread += w.at(i, j) * prev[j];
            const double eps = cfg.noise > 0.0 ? cfg.noise * gauss(noise_rng) : 0.0;
            cur[i] = std::max(0.0, s + cfg.rho * spread + eps);
        }
        prev.swap(cur);
        if (step >= kBurnIn)
            for (std::size_t i = 0; i < n; ++i) out.latent.at(i, step - kBurnIn) = prev[i];
    }

    // Exactly round(coverage·N·T) observed cells.
    std::vector<std::size_t> cells(n * slots);
    for (std::size_t c = 0; c < cells.size(); ++c) cells[c] = c;
    auto mask_rng = stream(cfg, kMask);
    std::shuffle(cells.begin(), cells.end(), mask_rng);
    const auto observed = static_cast<std::size_t>(std::lround(cfg.coverage * static_cast<double>(cells.size())));

    ingest::FeatureCube& cube = out.cube;
    cube = ingest::FeatureCube::zeros(n, slots, cfg.t_start());
    for (const auto& st : net.graph.stations) cube.station_codes.push_back(st.code);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < slots; ++t) cube.X.at(i, ingest::kHeadway, t) = 1.0;
    auto count_rng = stream(cfg, kCounts);
    std::poisson_distribution<int> extra(1.0);
    for (std::size_t c = 0; c < observed; ++c) {
        const std::size_t i = cells[c] / slots, t = cells[c] % slots;
        const double v = out.latent.at(i, t);
        const auto count = static_cast<double>(1 + extra(count_rng));
        cube.mask.at(i, t) = 1.0;
        cube.Y.at(i, t) = v;
        cube.X.at(i, ingest::kAvgArrDelay, t) = v;
        cube.X.at(i, ingest::kAvgDepDelay, t) = v;
        cube.X.at(i, ingest::kTotArrDelay, t) = v * count;
        cube.X.at(i, ingest::kTotDepDelay, t) = v * count;
        cube.X.at(i, ingest::kHeadway, t) = 1.0 / count;
    }
    out.graph = std::move(net.graph);
    cube.validate();
    return out;
}

nlohmann::json ground_truth(const SynthConfig& cfg, const railnet::RailGraph& graph,
                            const std::vector<std::vector<std::size_t>>& routes) {
    return {{"config", to_json(cfg)}, {"graph", railnet::to_json(graph)}, {"routes", routes}};
}

std::string zone_map_csv(const railnet::RailGraph& graph) {
    std::ostringstream out;
    out << "station_code,zone\n";
    for (const auto& s : graph.stations) out << s.code << ',' << s.zone << '\n';
    return out.str();
}

} // namespace rstgcn::synth
