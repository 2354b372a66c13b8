#pragma once

#include "rstgcn/ingest.hpp"
#include "rstgcn/railnet.hpp"
#include "rstgcn/run_record.hpp"
#include "rstgcn/tensor.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace rstgcn::synth {

enum class Topology { Path, Grid, RandomTree };

Topology parse_topology(const std::string& name);  // "path", "grid", "random-tree"
std::string topology_name(Topology t);

/// Delay terms are in hours. seasonal(h) = base + daily·sin(2πh/24) + weekly·sin(2πh/168),
/// with h the hour index since the start of the series.
struct SynthConfig {
    std::uint64_t seed = 7;
    std::size_t stations = 30;
    std::size_t days = 14;
    std::size_t trains_per_day = 8;  // per route and direction
    Topology topology = Topology::RandomTree;
    double rho = 0.5;
    double base_delay = 0.3;
    double daily_amplitude = 0.2;
    double weekly_amplitude = 0.1;
    double noise = 0.05;
    /// Fraction of station-hours with at least one arrival (cube generator).
    double coverage = 0.8;
    std::size_t zones = 3;
    std::chrono::year_month_day start{std::chrono::year{2024}, std::chrono::September, std::chrono::day{1}};
    /// Delay at each run's origin in hours; the stationary mean of the recurrence when unset.
    std::optional<double> initial_delay;

    void validate() const;
    std::size_t slots() const { return days * 24; }
    Minutes t_start() const;
    double seasonal(double hour_index) const;
};

nlohmann::json to_json(const SynthConfig& cfg);

/// Stations, edges and the ordered station lists of every route.
struct Network {
    railnet::RailGraph graph;
    std::vector<std::vector<std::size_t>> routes;
};

/// Deterministic topology; edge frequency counts the distinct train numbers using each edge.
Network make_network(const SynthConfig& cfg);

struct SynthRecords {
    std::vector<RunRecord> records;
    railnet::RailGraph graph;  // ground truth
    std::vector<std::vector<std::size_t>> routes;
};

/// Timetabled runs over every route. Along a run the delay follows
/// d_next = max(0, ρ·d_prev + seasonal(hour) + noise), in whole minutes.
SynthRecords generate_records(const SynthConfig& cfg);

struct SynthCube {
    ingest::FeatureCube cube;
    railnet::RailGraph graph;
    /// Noise-free-of-masking delay field v (N×T); Y equals v on masked cells.
    Tensor latent;
};

/// v_i(t) = max(0, seasonal(t) + ρ·Σ_j w_ij v_j(t−1) + noise), w the row-normalized
/// spatial weight matrix; a fixed fraction (coverage) of cells is marked as observed.
SynthCube generate_cube(const SynthConfig& cfg);

/// Graph, routes and planted parameters.
nlohmann::json ground_truth(const SynthConfig& cfg, const railnet::RailGraph& graph,
                            const std::vector<std::vector<std::size_t>>& routes);

/// station_code,zone lines for the zone assignment of a synthetic graph.
std::string zone_map_csv(const railnet::RailGraph& graph);

} // namespace rstgcn::synth
