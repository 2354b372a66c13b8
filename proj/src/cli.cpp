#include "rstgcn/cli.hpp"

#include "rstgcn/baselines.hpp"
#include "rstgcn/windows.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rstgcn::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void ensure_parent(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void require_file(const fs::path& path, const char* what) {
    if (!fs::exists(path)) throw std::runtime_error(std::string(what) + " not found: " + path.string());
}

std::string utc_now() {
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    const auto day = std::chrono::floor<std::chrono::days>(now);
    const std::chrono::year_month_day ymd{day};
    const std::chrono::hh_mm_ss hms{now - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

} // namespace

fs::path default_data_dir() {
    if (const char* env = std::getenv(kDataDirEnv); env && *env) return env;
    return "data";
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string file_hash(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return hex64(fnv1a64(ss.str()));
}

std::string RunManifest::config_hash() const {
    return hex64(fnv1a64(config.dump()));
}

nlohmann::json RunManifest::to_json() const {
    return {{"command", command},
            {"config_hash", config_hash()},
            {"seed", seed},
            {"inputs", inputs},
            {"outputs", outputs},
            {"tool_version", kToolVersion},
            {"finished_at", utc_now()},
            {"seconds", seconds},
            {"config", config}};
}

fs::path RunManifest::write(const fs::path& primary_output) const {
    fs::path path = primary_output;
    path += ".manifest.json";
    write_text(path, to_json().dump(2) + "\n");
    return path;
}

// ---- synth ----------------------------------------------------------------

SynthMode parse_synth_mode(const std::string& name) {
    if (name == "records") return SynthMode::Records;
    if (name == "cube") return SynthMode::Cube;
    if (name == "both") return SynthMode::Both;
    throw std::invalid_argument("unknown synth mode '" + name + "' (expected records, cube or both)");
}

SynthOutputs cmd_synth(const SynthOptions& opts, std::ostream& log) {
    const auto t0 = Clock::now();
    opts.config.validate();
    fs::create_directories(opts.out_dir);
    SynthOutputs out;
    RunManifest manifest;
    manifest.command = "synth";
    manifest.seed = opts.config.seed;
    manifest.config = {{"synth", synth::to_json(opts.config)},
                       {"mode", opts.mode == SynthMode::Records ? "records"
                                : opts.mode == SynthMode::Cube  ? "cube"
                                                                : "both"}};

    railnet::RailGraph truth_graph;
    std::vector<std::vector<std::size_t>> routes;
    if (opts.mode != SynthMode::Cube) {
        const auto gen = synth::generate_records(opts.config);
        std::string csv = ingest::records_csv_header() + "\n";
        for (const auto& r : gen.records) csv += ingest::to_csv_row(r) + "\n";
        out.records = opts.out_dir / "records.csv";
        write_text(*out.records, csv);
        out.zones = opts.out_dir / "zones.csv";
        write_text(*out.zones, synth::zone_map_csv(gen.graph));
        manifest.outputs.push_back(out.records->string());
        manifest.outputs.push_back(out.zones->string());
        log << "wrote " << gen.records.size() << " records for " << gen.graph.station_count() << " stations to "
            << out.records->string() << '\n';
        truth_graph = gen.graph;
        routes = gen.routes;
    }
    if (opts.mode != SynthMode::Records) {
        const auto gen = synth::generate_cube(opts.config);
        out.cube = opts.out_dir / "cube.bin";
        ingest::save_cube(gen.cube, out.cube->string());
        out.graph = opts.out_dir / "graph.json";
        railnet::save_graph(gen.graph, out.graph->string());
        manifest.outputs.push_back(out.cube->string());
        manifest.outputs.push_back(out.graph->string());
        log << "wrote cube " << gen.cube.stations() << "x" << gen.cube.features() << "x" << gen.cube.slots()
            << " to " << out.cube->string() << '\n';
        if (routes.empty()) {
            truth_graph = gen.graph;
            routes = synth::make_network(opts.config).routes;
        }
    }
    out.ground_truth = opts.out_dir / "ground_truth.json";
    write_text(out.ground_truth, synth::ground_truth(opts.config, truth_graph, routes).dump(2) + "\n");
    manifest.outputs.push_back(out.ground_truth.string());
    manifest.seconds = seconds_since(t0);
    manifest.write(out.ground_truth);
    return out;
}

// ---- build-graph ----------------------------------------------------------

nlohmann::json graph_statistics(const railnet::RailGraph& graph) {
    return {{"stations", graph.station_count()},
            {"edges", graph.edge_count()},
            {"average_degree", graph.average_degree()},
            {"average_distance_km", graph.average_distance()},
            {"average_trains_per_edge", graph.average_trains_per_edge()}};
}

railnet::RailGraph cmd_build_graph(const BuildGraphOptions& opts, std::ostream& log) {
    const auto t0 = Clock::now();
    require_file(opts.records, "records file");
    const auto parsed = ingest::parse_records_file(opts.records.string());
    for (const auto& e : parsed.errors) log << "warning: " << e << '\n';
    if (parsed.records.empty()) {
        throw std::runtime_error("no usable records in " + opts.records.string() + " (" +
                                 std::to_string(parsed.rows) + " data rows)");
    }
    railnet::ZoneMap zones;
    if (opts.zone_map) zones = railnet::load_zone_map(opts.zone_map->string());
    railnet::BuildDiagnostics diag;
    railnet::RailGraph graph = railnet::build_graph(parsed.records, zones, &diag);
    for (const auto& w : diag.warnings) log << "warning: " << w << '\n';
    ensure_parent(opts.out);
    railnet::save_graph(graph, opts.out.string());

    const auto stats = graph_statistics(graph);
    log << "stations                 " << graph.station_count() << '\n'
        << "edges                    " << graph.edge_count() << '\n'
        << std::fixed << std::setprecision(2) << "average degree           " << graph.average_degree() << '\n'
        << "average distance (km)    " << graph.average_distance() << '\n'
        << "average trains per edge  " << graph.average_trains_per_edge() << '\n'
        << std::defaultfloat;

    RunManifest m;
    m.command = "build-graph";
    m.config = {{"records", opts.records.string()},
                {"zone_map", opts.zone_map ? opts.zone_map->string() : ""},
                {"rows", parsed.rows},
                {"rejected_rows", parsed.rejected},
                {"runs", diag.runs},
                {"rejected_runs", diag.rejected_runs},
                {"statistics", stats}};
    m.inputs.push_back(opts.records.string());
    if (opts.zone_map) m.inputs.push_back(opts.zone_map->string());
    m.outputs.push_back(opts.out.string());
    m.seconds = seconds_since(t0);
    m.write(opts.out);
    return graph;
}

// ---- featurize ------------------------------------------------------------

ingest::FeatureCube cmd_featurize(const FeaturizeOptions& opts, std::ostream& log) {
    const auto t0 = Clock::now();
    require_file(opts.records, "records file");
    require_file(opts.graph, "graph file");
    const auto parsed = ingest::parse_records_file(opts.records.string());
    for (const auto& e : parsed.errors) log << "warning: " << e << '\n';
    const railnet::RailGraph graph = railnet::load_graph(opts.graph.string());

    Minutes start{};
    std::size_t slots = 0;
    if (opts.start) {
        start = *opts.start;
    } else if (!parsed.records.empty()) {
        auto first = parsed.records.front().date;
        for (const auto& r : parsed.records) first = std::min(first, r.date, [](auto a, auto b) {
                return std::chrono::sys_days{a} < std::chrono::sys_days{b};
            });
        start = make_minutes(first, 0, 0);
    } else {
        throw std::runtime_error("featurize: no records and no --start to anchor the series");
    }
    if (opts.slots) {
        slots = *opts.slots;
    } else {
        if (parsed.records.empty()) throw std::runtime_error("featurize: no records and no --slots given");
        std::chrono::sys_days last{parsed.records.front().date};
        for (const auto& r : parsed.records) last = std::max(last, std::chrono::sys_days{r.date});
        const auto end = Minutes{last + std::chrono::days{1}};
        if (end <= start) throw std::runtime_error("featurize: --start lies after the last record date");
        slots = static_cast<std::size_t>((end - start).count() / 60);
    }

    ingest::FeatureCube cube = ingest::hourly_features(parsed.records, graph, start, slots, opts.features);
    double observed = 0.0;
    for (double m : cube.mask.data()) observed += m;
    if (observed == 0.0) log << "warning: no arrivals fall inside the requested range; mask is all zero\n";
    ensure_parent(opts.out);
    ingest::save_cube(cube, opts.out.string());

    const auto stats = ingest::cube_stats(cube, &graph);
    log << "cube " << cube.stations() << " stations x " << cube.features() << " channels x " << cube.slots()
        << " hours from " << format_timestamp(cube.t_start) << '\n'
        << std::fixed << std::setprecision(4) << "masked cells " << stats.overall.masked_cells << " (density "
        << stats.overall.mask_density << "), mean delay " << stats.overall.mean_min << " min, median "
        << stats.overall.median_min << " min, max " << stats.overall.max_min << " min\n"
        << std::defaultfloat;

    RunManifest m;
    m.command = "featurize";
    m.config = {{"records", opts.records.string()},
                {"graph", opts.graph.string()},
                {"start", format_timestamp(start)},
                {"slots", slots},
                {"headway_source", opts.features.headway_source == ingest::HeadwaySource::Actual ? "actual"
                                                                                                 : "scheduled"},
                {"default_headway_h", opts.features.default_headway_h},
                {"statistics", ingest::to_json(stats)}};
    m.inputs = {opts.records.string(), opts.graph.string()};
    m.outputs = {opts.out.string(), opts.out.string() + ".json"};
    m.seconds = seconds_since(t0);
    m.write(opts.out);
    return cube;
}

// ---- train ----------------------------------------------------------------

namespace {

void require_same_stations(const ingest::FeatureCube& cube, const railnet::RailGraph& graph) {
    if (cube.stations() != graph.station_count()) {
        throw std::invalid_argument("cube has N = " + std::to_string(cube.stations()) + " stations but graph has N = " +
                                    std::to_string(graph.station_count()));
    }
    for (std::size_t i = 0; i < cube.station_codes.size() && i < graph.stations.size(); ++i) {
        if (cube.station_codes[i] != graph.stations[i].code) {
            throw std::invalid_argument("cube station " + std::to_string(i) + " is " + cube.station_codes[i] +
                                        " but graph station is " + graph.stations[i].code);
        }
    }
}

} // namespace

TrainOutputs cmd_train(const TrainOptions& opts, std::ostream& log) {
    const auto t0 = Clock::now();
    require_file(opts.cube, "cube file");
    require_file(opts.graph, "graph file");
    opts.model.validate();
    opts.train.validate();
    const ingest::FeatureCube cube = ingest::load_cube(opts.cube.string());
    const railnet::RailGraph graph = railnet::load_graph(opts.graph.string());
    require_same_stations(cube, graph);
    for (std::size_t f : opts.model.features) {
        if (f >= cube.features()) throw std::invalid_argument("feature " + std::to_string(f) + " not in cube");
    }

    const windows::Split split = windows::split_dataset(cube, opts.model.windows);
    const model::GraphArtifacts artifacts = model::make_artifacts(graph, opts.model);
    log << "training on " << split.train.size() << " samples, validating on " << split.val.size() << ", holding out "
        << split.test.size() << " for test\n";
    train::EventSink sink;
    if (opts.events) sink = [&](const nlohmann::json& ev) { *opts.events << ev.dump() << '\n' << std::flush; };
    const train::FitResult fit = train::fit(cube, split, opts.model, artifacts, opts.train, sink);

    nlohmann::json extra = {{"train_config", train::to_json(opts.train)},
                            {"split", windows::to_json(split)},
                            {"best_epoch", fit.report.best_epoch},
                            {"best_val_loss", fit.report.best_val_loss},
                            {"cube_hash", file_hash(opts.cube)},
                            {"graph_hash", file_hash(opts.graph)}};
    extra["scaler"] = fit.scaler ? train::to_json(*fit.scaler) : nlohmann::json(nullptr);
    ensure_parent(opts.checkpoint);
    model::save_checkpoint(opts.checkpoint.string(), fit.params, opts.model, cube.stations(), extra);

    TrainOutputs out;
    out.checkpoint = opts.checkpoint;
    out.train_report = fit.report;
    if (opts.report) {
        out.report = *opts.report;
    } else {
        out.report = opts.checkpoint;
        out.report += ".report.json";
    }
    nlohmann::json report = train::to_json(fit.report);
    report["model_config"] = model::to_json(opts.model);
    report["train_config"] = train::to_json(opts.train);
    write_text(out.report, report.dump(2) + "\n");
    out.split = opts.checkpoint;
    out.split += ".split.json";
    write_text(out.split, windows::to_json(split).dump() + "\n");

    log << "best epoch " << fit.report.best_epoch << " of " << fit.report.epochs.size() << ", validation MSE "
        << fit.report.best_val_loss << "; checkpoint " << opts.checkpoint.string() << '\n';

    RunManifest m;
    m.command = "train";
    m.seed = opts.train.seed;
    m.config = {{"model", model::to_json(opts.model)}, {"train", train::to_json(opts.train)}};
    m.inputs = {opts.cube.string(), opts.graph.string()};
    m.outputs = {out.checkpoint.string(), out.checkpoint.string() + ".json", out.report.string(), out.split.string()};
    m.seconds = seconds_since(t0);
    m.write(opts.checkpoint);
    return out;
}

// ---- evaluate -------------------------------------------------------------

EvaluateOutputs cmd_evaluate(const EvaluateOptions& opts, std::ostream& log) {
    const auto t0 = Clock::now();
    if (opts.checkpoint.has_value() == opts.baseline.has_value()) {
        throw std::invalid_argument("evaluate: give exactly one of a checkpoint or a baseline");
    }
    if (opts.subset != "test" && opts.subset != "val") {
        throw std::invalid_argument("evaluate: subset must be test or val");
    }
    require_file(opts.cube, "cube file");
    require_file(opts.graph, "graph file");
    const ingest::FeatureCube cube = ingest::load_cube(opts.cube.string());
    const railnet::RailGraph graph = railnet::load_graph(opts.graph.string());
    require_same_stations(cube, graph);

    std::optional<model::Checkpoint> ck;
    std::optional<windows::ChannelScaler> scaler;
    windows::WindowConfig wcfg = opts.windows;
    if (opts.checkpoint) {
        require_file(*opts.checkpoint, "checkpoint");
        ck = model::load_checkpoint(opts.checkpoint->string());
        if (ck->stations != cube.stations()) {
            throw std::invalid_argument("checkpoint was trained for N = " + std::to_string(ck->stations) +
                                        " stations but the cube has N = " + std::to_string(cube.stations()));
        }
        for (std::size_t f : ck->config.features) {
            if (f >= cube.features()) throw std::invalid_argument("checkpoint feature " + std::to_string(f) + " not in cube");
        }
        wcfg = ck->config.windows;
        if (ck->extra.contains("scaler") && !ck->extra["scaler"].is_null()) {
            scaler = train::scaler_from_json(ck->extra["scaler"]);
        }
        if (opts.long_horizon && *opts.long_horizon != wcfg.t_p) {
            throw std::invalid_argument("checkpoint predicts t_p = " + std::to_string(wcfg.t_p) +
                                        " hours; retrain with t_p = " + std::to_string(*opts.long_horizon) +
                                        " for that horizon");
        }
    } else if (opts.long_horizon) {
        // One daily and one weekly group of the longer length.
        const std::size_t h = *opts.long_horizon;
        if (h < 1) throw std::invalid_argument("evaluate: long horizon must be >= 1");
        wcfg.t_p = h;
        if (wcfg.t_d > 0) wcfg.t_d = h;
        if (wcfg.t_w > 0) wcfg.t_w = h;
        wcfg.q = std::max(wcfg.q, h);
    }
    wcfg.validate();

    const windows::Split split = windows::split_dataset(cube, wcfg);
    const auto& anchors = opts.subset == "test" ? split.test : split.val;
    const auto samples = train::build_samples(cube, anchors, wcfg, std::nullopt);

    eval::MetricReport report;
    std::string source;
    if (ck) {
        const model::GraphArtifacts artifacts = model::make_artifacts(graph, ck->config);
        auto scaled = samples;
        if (scaler)
            for (auto& s : scaled) scaler->apply(s);
        std::vector<Tensor> preds;
        for (const auto& s : scaled) preds.push_back(model::forward(s, ck->params, ck->config, artifacts));
        report = eval::horizon_report(preds, samples, &graph);
        source = "checkpoint " + opts.checkpoint->string();
    } else {
        const auto kind = baselines::parse_baseline(*opts.baseline);
        report = eval::horizon_report(
            [&](const windows::Sample& s) { return baselines::predict(kind, s, opts.ha_recent_only); }, samples,
            &graph);
        source = "baseline " + baselines::baseline_name(kind) + (opts.ha_recent_only ? " (recent window only)" : "");
    }

    EvaluateOutputs out;
    out.report = report;
    out.csv = opts.out;
    out.csv += ".csv";
    out.json = opts.out;
    out.json += ".json";
    write_text(out.csv, eval::report_csv(report));
    nlohmann::json doc = eval::to_json(report);
    doc["source"] = ck ? "checkpoint" : "baseline";
    doc["subset"] = opts.subset;
    doc["samples"] = samples.size();
    write_text(out.json, doc.dump(2) + "\n");
    if (opts.long_horizon) {
        out.cumulative_csv = opts.out;
        *out.cumulative_csv += ".cumulative.csv";
        write_text(*out.cumulative_csv, eval::cumulative_csv(report));
    }
    log << source << " on " << samples.size() << " " << opts.subset << " samples\n" << eval::report_csv(report);

    RunManifest m;
    m.command = "evaluate";
    m.seed = ck ? ck->extra.value("train_config", nlohmann::json::object()).value("seed", std::uint64_t{0}) : 0;
    m.config = {{"source", source},
                {"subset", opts.subset},
                {"windows",
                 {{"q", wcfg.q}, {"t_p", wcfg.t_p}, {"t_h", wcfg.t_h}, {"t_d", wcfg.t_d}, {"t_w", wcfg.t_w}}},
                {"long_horizon", opts.long_horizon ? nlohmann::json(*opts.long_horizon) : nlohmann::json(nullptr)}};
    m.inputs = {opts.cube.string(), opts.graph.string()};
    if (opts.checkpoint) m.inputs.push_back(opts.checkpoint->string());
    m.outputs = {out.csv.string(), out.json.string()};
    if (out.cumulative_csv) m.outputs.push_back(out.cumulative_csv->string());
    m.seconds = seconds_since(t0);
    m.write(opts.out);
    return out;
}

} // namespace rstgcn::cli
