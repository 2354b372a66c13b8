#pragma once

#include "rstgcn/run_record.hpp"
#include "rstgcn/tensor.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace rstgcn::railnet {

inline constexpr const char* kUnknownZone = "UNKNOWN";

struct Station {
    std::string code;
    std::string name;
    std::string zone = kUnknownZone;
    std::size_t index = 0;
};

/// Undirected station graph. adjacency, distance (km) and frequency (distinct
/// trains per edge) are N×N, symmetric, zero on the diagonal, and share one support.
struct RailGraph {
    std::vector<Station> stations;
    Tensor adjacency;
    Tensor distance;
    Tensor frequency;

    std::size_t station_count() const noexcept { return stations.size(); }
    std::size_t edge_count() const;
    double average_degree() const;
    double average_distance() const;
    double average_trains_per_edge() const;
    std::vector<std::string> zones() const;

    /// Throws std::out_of_range for an unknown code.
    std::size_t index_of(const std::string& code) const;
    bool contains(const std::string& code) const;

    /// Checks symmetry, zero diagonal, shared support and dense indexing.
    void validate() const;
};

/// Empty graph with N stations and no edges.
RailGraph make_graph(std::vector<Station> stations);
/// Adds or overwrites the undirected edge (i, j).
void set_edge(RailGraph& graph, std::size_t i, std::size_t j, double distance_km, double trains);

/// Station code -> zone tag.
using ZoneMap = std::map<std::string, std::string>;

struct BuildDiagnostics {
    std::size_t runs = 0;
    std::size_t rejected_runs = 0;
    /// Edges whose observed distances spread more than 10% around the median.
    std::size_t inconsistent_distance_edges = 0;
    std::vector<std::string> warnings;
};

/// One node per station code (indexed in code order), an edge between stations that
/// are consecutive on some run, median inter-station distance and distinct-train counts.
RailGraph build_graph(const std::vector<RunRecord>& records, const ZoneMap& zones = {},
                      BuildDiagnostics* diagnostics = nullptr);

struct SpatialWeights {
    Tensor matrix;
    double k_max = 0.0;
};

/// M_ij = (1/d_ij)·(k_ij/k_max) on edges, 0 elsewhere. With use_frequency = false the
/// frequency ratio is dropped (pure inverse distance).
SpatialWeights spatial_weight_matrix(const RailGraph& graph, bool use_frequency = true);

/// Induced subgraph on the stations tagged with zone; indices re-densified.
RailGraph zone_subgraph(const RailGraph& graph, const std::string& zone);

/// Largest eigenvalue of the symmetric normalized Laplacian D^{-1/2}(D−A)D^{-1/2}.
double laplacian_lambda_max(const RailGraph& graph);

/// (2/λ_max)·L − I, with λ_max replaced by 2 for a graph without edges.
Tensor scaled_laplacian(const RailGraph& graph);

nlohmann::json to_json(const RailGraph& graph);
RailGraph graph_from_json(const nlohmann::json& doc);
void save_graph(const RailGraph& graph, const std::string& path);
RailGraph load_graph(const std::string& path);

/// Two-column CSV (station_code, zone); a header row is optional.
ZoneMap load_zone_map(const std::string& path);

} // namespace rstgcn::railnet
