#pragma once

#include "rstgcn/railnet.hpp"
#include "rstgcn/run_record.hpp"
#include "rstgcn/tensor.hpp"

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace rstgcn::ingest {

/// Column headers of a running-status CSV. Lookup is case-insensitive.
struct RecordFormat {
    std::string date = "Date";
    std::string train_no = "Train No.";
    std::string train_name = "Train Name";
    std::string station_code = "Code";
    std::string station_name = "Station";
    std::string distance = "Dist.";
    std::string sched_arr = "Sch. Arr.";
    std::string act_arr = "Act. Arr.";
    std::string arr_delay = "Arr. Delay";
    std::string sched_dep = "Sch. Dep.";
    std::string act_dep = "Act. Dep.";
    std::string dep_delay = "Dep. Delay";
};

struct ParseResult {
    std::vector<RunRecord> records;
    std::size_t rows = 0;
    std::size_t rejected = 0;
    std::vector<std::string> errors;
};

/// Parses running records; unparseable rows are skipped and counted. Throws when
/// more than 10% of the data rows are rejected or the header lacks a column.
ParseResult parse_records(std::istream& in, const RecordFormat& format = {});
ParseResult parse_records_file(const std::string& path, const RecordFormat& format = {});

/// CSV line writer matching RecordFormat's default header.
std::string records_csv_header();
std::string to_csv_row(const RunRecord& record);

// Field parsers, exposed for reuse and testing.
std::optional<std::chrono::year_month_day> parse_date(std::string_view text);
/// "03:55 PM", "00:20 AM" or "16:19"; nullopt for a terminal placeholder, throws if malformed.
std::optional<std::chrono::minutes> parse_clock(std::string_view text);
/// "24M Late", "1H 5M Late", "3M Early", "On Time"; nullopt when absent, throws if malformed.
std::optional<int> parse_delay(std::string_view text);

enum Channel : std::size_t { kAvgArrDelay = 0, kAvgDepDelay, kTotArrDelay, kTotDepDelay, kHeadway, kChannelCount };

inline constexpr std::array<const char*, kChannelCount> kChannelNames{
    "avg_arr_delay", "avg_dep_delay", "tot_arr_delay", "tot_dep_delay", "headway"};

/// Hourly per-station features. X: N×F×T (hours), Y: N×T, mask: N×T of 0/1.
struct FeatureCube {
    Tensor X;
    Tensor Y;
    Tensor mask;
    Minutes t_start{};
    std::vector<std::string> station_codes;

    std::size_t stations() const { return X.dim(0); }
    std::size_t features() const { return X.dim(1); }
    std::size_t slots() const { return X.dim(2); }

    static FeatureCube zeros(std::size_t stations, std::size_t slots, Minutes t_start);
    /// X[:,0,:] = Y, masked-out cells carry zero delay channels, delays nonnegative.
    void validate() const;
};

enum class HeadwaySource { Actual, Scheduled };

struct FeatureOptions {
    HeadwaySource headway_source = HeadwaySource::Actual;
    double default_headway_h = 1.0;
};

/// Mean gap between consecutive sorted arrival times, in hours; default_h with < 2 arrivals.
double hourly_headway(std::span<const Minutes> sorted_arrivals, double default_h = 1.0);

/// Aggregates records into hourly slots [t_start, t_start + slots·1h). Delays are clamped
/// at zero and converted to hours; records outside the window are ignored.
FeatureCube hourly_features(const std::vector<RunRecord>& records, const railnet::RailGraph& graph, Minutes t_start,
                            std::size_t slots, const FeatureOptions& options = {});

struct DelaySummary {
    std::size_t masked_cells = 0;
    double mask_density = 0.0;
    double mean_min = 0.0;
    double median_min = 0.0;
    double max_min = 0.0;
};

struct CubeStats {
    DelaySummary overall;
    std::map<std::string, DelaySummary> zones;
};

/// Masked statistics of Y in minutes; zone breakdown when a graph is supplied.
CubeStats cube_stats(const FeatureCube& cube, const railnet::RailGraph* graph = nullptr);
nlohmann::json to_json(const CubeStats& stats);

/// Binary layout: u64 N, u64 F, u64 T, i64 t_start (unix seconds), then X, Y as
/// little-endian f64 row-major and the mask as N·T bytes. The sidecar goes to path + ".json".
void save_cube(const FeatureCube& cube, const std::string& path);
FeatureCube load_cube(const std::string& path);
nlohmann::json cube_sidecar(const FeatureCube& cube);

} // namespace rstgcn::ingest
