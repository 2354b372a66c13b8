#pragma once

#include "rstgcn/eval.hpp"
#include "rstgcn/ingest.hpp"
#include "rstgcn/model.hpp"
#include "rstgcn/railnet.hpp"
#include "rstgcn/synth.hpp"
#include "rstgcn/train.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

// Library side of the command-line tool: each command reads and writes files, prints a
// short human summary to `log`, and writes a run manifest next to its primary output.
namespace rstgcn::cli {

namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "0.1.0";
/// Environment variable naming the default data directory.
inline constexpr const char* kDataDirEnv = "RSTGCN_DATA_DIR";

/// $RSTGCN_DATA_DIR when set, else "data".
fs::path default_data_dir();

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);
/// Hash of a file's bytes.
std::string file_hash(const fs::path& path);

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    double seconds = 0.0;

    /// Hash of config.dump().
    std::string config_hash() const;
    nlohmann::json to_json() const;
    /// Writes to <primary output>.manifest.json and returns that path.
    fs::path write(const fs::path& primary_output) const;
};

// ---- synth ----------------------------------------------------------------

enum class SynthMode { Records, Cube, Both };
SynthMode parse_synth_mode(const std::string& name);

struct SynthOptions {
    synth::SynthConfig config;
    SynthMode mode = SynthMode::Both;
    fs::path out_dir = "data";
};

struct SynthOutputs {
    std::optional<fs::path> records;  // records.csv
    std::optional<fs::path> zones;    // zones.csv
    std::optional<fs::path> cube;     // cube.bin
    std::optional<fs::path> graph;    // graph.json (cube mode: the generator's graph)
    fs::path ground_truth;            // ground_truth.json
};

SynthOutputs cmd_synth(const SynthOptions& opts, std::ostream& log);

// ---- build-graph ----------------------------------------------------------

struct BuildGraphOptions {
    fs::path records;
    std::optional<fs::path> zone_map;
    fs::path out = "data/graph.json";
};

/// Statistics block printed by build-graph.
nlohmann::json graph_statistics(const railnet::RailGraph& graph);

railnet::RailGraph cmd_build_graph(const BuildGraphOptions& opts, std::ostream& log);

// ---- featurize ------------------------------------------------------------

struct FeaturizeOptions {
    fs::path records;
    fs::path graph;
    fs::path out = "data/cube.bin";
    /// First slot; defaults to midnight of the earliest record date.
    std::optional<Minutes> start;
    /// Slot count; defaults to whole days through the latest record date.
    std::optional<std::size_t> slots;
    ingest::FeatureOptions features;
};

ingest::FeatureCube cmd_featurize(const FeaturizeOptions& opts, std::ostream& log);

// ---- train ----------------------------------------------------------------

struct TrainOptions {
    fs::path cube;
    fs::path graph;
    fs::path checkpoint = "data/model.ckpt";
    /// Training report JSON; defaults to <checkpoint>.report.json.
    std::optional<fs::path> report;
    model::ModelConfig model;
    train::TrainConfig train;
    /// Stream for line-delimited JSON progress events; none when null.
    std::ostream* events = nullptr;
};

struct TrainOutputs {
    fs::path checkpoint;
    fs::path report;
    fs::path split;
    train::TrainReport train_report;
};

TrainOutputs cmd_train(const TrainOptions& opts, std::ostream& log);

// ---- evaluate -------------------------------------------------------------

struct EvaluateOptions {
    std::optional<fs::path> checkpoint;
    std::optional<std::string> baseline;  // "ha" or "persistence"
    bool ha_recent_only = false;
    fs::path cube;
    fs::path graph;
    /// Output stem: writes <out>.csv and <out>.json (and <out>.cumulative.csv).
    fs::path out = "data/metrics";
    /// Window geometry for baselines; a checkpoint carries its own.
    windows::WindowConfig windows;
    /// Predict this many hours ahead and report cumulative averages 1..N.
    std::optional<std::size_t> long_horizon;
    /// "test" or "val".
    std::string subset = "test";
};

struct EvaluateOutputs {
    fs::path csv;
    fs::path json;
    std::optional<fs::path> cumulative_csv;
    eval::MetricReport report;
};

EvaluateOutputs cmd_evaluate(const EvaluateOptions& opts, std::ostream& log);

} // namespace rstgcn::cli
