// rstgcn: synthetic data, graph construction, featurization, training and evaluation.
#include "rstgcn/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

using namespace rstgcn;
namespace fs = std::filesystem;

namespace {

// Empty flag value means "<data dir>/<name>".
fs::path resolve(const std::string& value, const fs::path& data_dir, const char* name) {
    return value.empty() ? data_dir / name : fs::path(value);
}

Minutes parse_start(const std::string& text) {
    // YYYY-MM-DD or YYYY-MM-DDTHH:MM
    int y = 0, mo = 0, d = 0, h = 0, mi = 0;
    const int n = std::sscanf(text.c_str(), "%d-%d-%dT%d:%d", &y, &mo, &d, &h, &mi);
    if (n != 3 && n != 5) throw std::invalid_argument("--start must be YYYY-MM-DD or YYYY-MM-DDTHH:MM");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw std::invalid_argument("--start is not a valid date: " + text);
    return make_minutes(ymd, h, mi);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Railway delay forecasting with attention-based spatio-temporal graph convolution"};
    app.set_config("--config", "", "Keyed config file (INI/TOML; one [section] per subcommand)");
    app.require_subcommand(1);
    std::string data_dir = cli::default_data_dir().string();
    app.add_option("--data-dir", data_dir, "Directory for default input/output files")
        ->envname(cli::kDataDirEnv)
        ->capture_default_str();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic records and/or a feature cube");
    cli::SynthOptions synth_opts;
    std::string synth_mode = "both", topology = "random-tree", synth_out;
    std::optional<double> initial_delay;
    auto& sc = synth_opts.config;
    synth_cmd->add_option("--mode", synth_mode, "records, cube or both")->capture_default_str();
    synth_cmd->add_option("--out-dir", synth_out, "Output directory (default: data dir)");
    synth_cmd->add_option("--seed", sc.seed)->capture_default_str();
    synth_cmd->add_option("--stations", sc.stations)->capture_default_str();
    synth_cmd->add_option("--days", sc.days)->capture_default_str();
    synth_cmd->add_option("--trains-per-day", sc.trains_per_day, "Per route and direction")->capture_default_str();
    synth_cmd->add_option("--topology", topology, "path, grid or random-tree")->capture_default_str();
    synth_cmd->add_option("--rho", sc.rho, "Propagation coefficient in [0,1)")->capture_default_str();
    synth_cmd->add_option("--base-delay", sc.base_delay, "Hours")->capture_default_str();
    synth_cmd->add_option("--daily-amplitude", sc.daily_amplitude, "Hours")->capture_default_str();
    synth_cmd->add_option("--weekly-amplitude", sc.weekly_amplitude, "Hours")->capture_default_str();
    synth_cmd->add_option("--noise", sc.noise, "Hours")->capture_default_str();
    synth_cmd->add_option("--coverage", sc.coverage, "Observed fraction of station-hours")->capture_default_str();
    synth_cmd->add_option("--zones", sc.zones)->capture_default_str();
    synth_cmd->add_option("--initial-delay", initial_delay, "Origin delay in hours");

    // build-graph
    auto* graph_cmd = app.add_subcommand("build-graph", "Build the station graph from running records");
    std::string bg_records, bg_zones, bg_out;
    graph_cmd->add_option("--records", bg_records, "Records CSV (default: <data dir>/records.csv)");
    graph_cmd->add_option("--zones", bg_zones, "station_code,zone CSV");
    graph_cmd->add_option("--out", bg_out, "Graph JSON (default: <data dir>/graph.json)");

    // featurize
    auto* feat_cmd = app.add_subcommand("featurize", "Aggregate records into hourly station features");
    std::string ft_records, ft_graph, ft_out, ft_start, headway = "actual";
    std::optional<std::size_t> ft_slots;
    double default_headway = 1.0;
    feat_cmd->add_option("--records", ft_records);
    feat_cmd->add_option("--graph", ft_graph);
    feat_cmd->add_option("--out", ft_out, "Cube file (default: <data dir>/cube.bin)");
    feat_cmd->add_option("--start", ft_start, "First slot, YYYY-MM-DD[THH:MM]; default midnight of the first record");
    feat_cmd->add_option("--slots", ft_slots, "Number of hourly slots; default through the last record day");
    feat_cmd->add_option("--headway-source", headway, "actual or scheduled")->capture_default_str();
    feat_cmd->add_option("--default-headway", default_headway, "Hours, for slots with fewer than two arrivals")
        ->capture_default_str();

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the model; JSON progress events go to stdout");
    cli::TrainOptions tr;
    std::string tr_cube, tr_graph, tr_ckpt, tr_report, features = "all", optimizer = "adam";
    bool no_freq = false, no_relu = false;
    auto& w = tr.model.windows;
    train_cmd->add_option("--cube", tr_cube);
    train_cmd->add_option("--graph", tr_graph);
    train_cmd->add_option("--checkpoint", tr_ckpt, "Default: <data dir>/model.ckpt");
    train_cmd->add_option("--report", tr_report, "Default: <checkpoint>.report.json");
    train_cmd->add_option("--q", w.q, "Slots per day")->capture_default_str();
    train_cmd->add_option("--t-p", w.t_p, "Prediction horizon (slots)")->capture_default_str();
    train_cmd->add_option("--t-h", w.t_h, "Recent window length")->capture_default_str();
    train_cmd->add_option("--t-d", w.t_d, "Daily window length, multiple of t_p")->capture_default_str();
    train_cmd->add_option("--t-w", w.t_w, "Weekly window length, multiple of t_p")->capture_default_str();
    train_cmd->add_option("--history-prefix", w.history_prefix)->capture_default_str();
    train_cmd->add_option("--cheb-order", tr.model.cheb_order)->capture_default_str();
    train_cmd->add_option("--channels", tr.model.channels)->capture_default_str();
    train_cmd->add_option("--blocks", tr.model.blocks, "Blocks per component")->capture_default_str();
    train_cmd->add_flag("--no-frequency-weight", no_freq, "Distance-only spatial weights");
    train_cmd->add_flag("--no-final-relu", no_relu, "Drop the output ReLU");
    train_cmd->add_option("--features", features, "all, avg, avg+headway, avg+tot, ...")->capture_default_str();
    train_cmd->add_option("--batch-size", tr.train.batch_size)->capture_default_str();
    train_cmd->add_option("--lr", tr.train.learning_rate)->capture_default_str();
    train_cmd->add_option("--epochs", tr.train.max_epochs)->capture_default_str();
    train_cmd->add_option("--patience", tr.train.patience)->capture_default_str();
    train_cmd->add_option("--optimizer", optimizer, "adam or sgd")->capture_default_str();
    train_cmd->add_option("--clip-norm", tr.train.clip_norm, "0 disables")->capture_default_str();
    train_cmd->add_option("--seed", tr.train.seed)->capture_default_str();
    train_cmd->add_flag("--standardize", tr.train.standardize_inputs, "Standardize input channels");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Score a checkpoint or a baseline on the held-out split");
    cli::EvaluateOptions ev;
    std::string ev_ckpt, ev_baseline, ev_cube, ev_graph, ev_out;
    std::optional<std::size_t> long_horizon;
    auto* ck_opt = eval_cmd->add_option("--checkpoint", ev_ckpt);
    auto* bl_opt = eval_cmd->add_option("--baseline", ev_baseline, "ha or persistence");
    ck_opt->excludes(bl_opt);
    eval_cmd->add_flag("--ha-recent-only", ev.ha_recent_only, "HA over the recent window only");
    eval_cmd->add_option("--cube", ev_cube);
    eval_cmd->add_option("--graph", ev_graph);
    eval_cmd->add_option("--out", ev_out, "Output stem (default: <data dir>/metrics)");
    eval_cmd->add_option("--subset", ev.subset, "test or val")->capture_default_str();
    eval_cmd->add_option("--long-horizon", long_horizon, "Cumulative metrics for 1..N hours");
    eval_cmd->add_option("--t-h", ev.windows.t_h, "Baseline recent window")->capture_default_str();
    eval_cmd->add_option("--t-d", ev.windows.t_d, "Baseline daily window")->capture_default_str();
    eval_cmd->add_option("--t-w", ev.windows.t_w, "Baseline weekly window")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        const fs::path dir = data_dir;
        if (*synth_cmd) {
            sc.topology = synth::parse_topology(topology);
            sc.initial_delay = initial_delay;
            synth_opts.mode = cli::parse_synth_mode(synth_mode);
            synth_opts.out_dir = synth_out.empty() ? dir : fs::path(synth_out);
            cli::cmd_synth(synth_opts, std::cout);
        } else if (*graph_cmd) {
            cli::BuildGraphOptions o;
            o.records = resolve(bg_records, dir, "records.csv");
            if (!bg_zones.empty()) o.zone_map = bg_zones;
            o.out = resolve(bg_out, dir, "graph.json");
            cli::cmd_build_graph(o, std::cout);
        } else if (*feat_cmd) {
            cli::FeaturizeOptions o;
            o.records = resolve(ft_records, dir, "records.csv");
            o.graph = resolve(ft_graph, dir, "graph.json");
            o.out = resolve(ft_out, dir, "cube.bin");
            if (!ft_start.empty()) o.start = parse_start(ft_start);
            o.slots = ft_slots;
            if (headway == "actual") o.features.headway_source = ingest::HeadwaySource::Actual;
            else if (headway == "scheduled") o.features.headway_source = ingest::HeadwaySource::Scheduled;
            else throw std::invalid_argument("--headway-source must be actual or scheduled");
            o.features.default_headway_h = default_headway;
            cli::cmd_featurize(o, std::cout);
        } else if (*train_cmd) {
            tr.cube = resolve(tr_cube, dir, "cube.bin");
            tr.graph = resolve(tr_graph, dir, "graph.json");
            tr.checkpoint = resolve(tr_ckpt, dir, "model.ckpt");
            if (!tr_report.empty()) tr.report = tr_report;
            tr.model.use_frequency_weight = !no_freq;
            tr.model.use_final_relu = !no_relu;
            tr.model.features = model::parse_feature_set(features);
            tr.train.optimizer = train::parse_optimizer(optimizer);
            tr.events = &std::cout;
            cli::cmd_train(tr, std::cerr);
        } else if (*eval_cmd) {
            if (!ev_ckpt.empty()) ev.checkpoint = ev_ckpt;
            if (!ev_baseline.empty()) ev.baseline = ev_baseline;
            if (!ev.checkpoint && !ev.baseline) ev.checkpoint = dir / "model.ckpt";
            ev.cube = resolve(ev_cube, dir, "cube.bin");
            ev.graph = resolve(ev_graph, dir, "graph.json");
            ev.out = resolve(ev_out, dir, "metrics");
            ev.long_horizon = long_horizon;
            cli::cmd_evaluate(ev, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
