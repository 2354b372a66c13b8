#include "rstgcn/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rstgcn::model {

void ModelConfig::validate() const {
    windows.validate();
    if (cheb_order < 1) throw std::invalid_argument("model config: cheb_order must be >= 1");
    if (channels < 1) throw std::invalid_argument("model config: channels must be >= 1");
    if (blocks < 1) throw std::invalid_argument("model config: blocks must be >= 1");
    if (features.empty() || features.front() != ingest::kAvgArrDelay) {
        throw std::invalid_argument("model config: feature list must start with the average arrival delay channel");
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i] >= ingest::kChannelCount) {
            throw std::invalid_argument("model config: feature index " + std::to_string(features[i]) + " out of range");
        }
        for (std::size_t j = 0; j < i; ++j)
            if (features[j] == features[i]) throw std::invalid_argument("model config: duplicate feature index");
    }
}

std::vector<std::size_t> parse_feature_set(const std::string& spec) {
    std::string s;
    for (char c : spec) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "all") return {0, 1, 2, 3, 4};
    bool avg = false, tot = false, headway = false;
    std::stringstream in(s);
    std::string part;
    while (std::getline(in, part, '+')) {
        std::stringstream sub(part);
        std::string tok;
        while (std::getline(sub, tok, ',')) {
            if (tok == "avg") avg = true;
            else if (tok == "tot") tot = true;
            else if (tok == "headway") headway = true;
            else throw std::invalid_argument("unknown feature group '" + tok + "' (expected avg, tot, headway or all)");
        }
    }
    if (!avg) throw std::invalid_argument("feature set must include avg (the prediction target)");
    std::vector<std::size_t> out{ingest::kAvgArrDelay, ingest::kAvgDepDelay};
    if (tot) out.insert(out.end(), {ingest::kTotArrDelay, ingest::kTotDepDelay});
    if (headway) out.push_back(ingest::kHeadway);
    return out;
}

std::string feature_set_name(const std::vector<std::size_t>& features) {
    auto has = [&](std::size_t c) { return std::find(features.begin(), features.end(), c) != features.end(); };
    std::string name = "avg";
    if (has(ingest::kTotArrDelay) && has(ingest::kTotDepDelay) && has(ingest::kHeadway)) return "all";
    if (has(ingest::kHeadway)) name += "+headway";
    if (has(ingest::kTotArrDelay)) name += "+tot";
    return name;
}

nlohmann::json to_json(const ModelConfig& cfg) {
    const auto& w = cfg.windows;
    return {{"q", w.q},
            {"t_p", w.t_p},
            {"t_h", w.t_h},
            {"t_d", w.t_d},
            {"t_w", w.t_w},
            {"history_prefix", w.history_prefix},
            {"cheb_order", cfg.cheb_order},
            {"channels", cfg.channels},
            {"blocks", cfg.blocks},
            {"use_frequency_weight", cfg.use_frequency_weight},
            {"use_final_relu", cfg.use_final_relu},
            {"features", cfg.features},
            {"feature_set", feature_set_name(cfg.features)}};
}

ModelConfig model_config_from_json(const nlohmann::json& doc) {
    ModelConfig cfg;
    cfg.windows.q = doc.at("q").get<std::size_t>();
    cfg.windows.t_p = doc.at("t_p").get<std::size_t>();
    cfg.windows.t_h = doc.at("t_h").get<std::size_t>();
    cfg.windows.t_d = doc.at("t_d").get<std::size_t>();
    cfg.windows.t_w = doc.at("t_w").get<std::size_t>();
    cfg.windows.history_prefix = doc.at("history_prefix").get<std::size_t>();
    cfg.cheb_order = doc.at("cheb_order").get<std::size_t>();
    cfg.channels = doc.at("channels").get<std::size_t>();
    cfg.blocks = doc.at("blocks").get<std::size_t>();
    cfg.use_frequency_weight = doc.at("use_frequency_weight").get<bool>();
    cfg.use_final_relu = doc.at("use_final_relu").get<bool>();
    cfg.features = doc.at("features").get<std::vector<std::size_t>>();
    cfg.validate();
    return cfg;
}

// ---- parameters ---------------------------------------------------------

namespace {

std::array<std::size_t, 3> component_lengths(const windows::WindowConfig& w) {
    return {w.t_h, w.t_d, w.t_w};
}

Tensor uniform(Shape shape, double fan_in, std::mt19937_64& rng) {
    const double bound = std::sqrt(1.0 / fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    Tensor t(std::move(shape));
    for (double& v : t.storage()) v = dist(rng);
    return t;
}

BlockParams init_block(std::size_t n, std::size_t f_in, std::size_t t_in, std::size_t k, std::size_t c,
                       std::mt19937_64& rng) {
    const auto N = static_cast<double>(n), F = static_cast<double>(f_in), T = static_cast<double>(t_in);
    BlockParams b;
    b.U1 = uniform({n}, N, rng);
    b.U2 = uniform({f_in, n}, F, rng);
    b.U3 = uniform({f_in}, F, rng);
    b.V_t = uniform({t_in, t_in}, T, rng);
    b.b_t = uniform({t_in, t_in}, T, rng);
    b.W1 = uniform({t_in}, T, rng);
    b.W2 = uniform({f_in, t_in}, F, rng);
    b.W3 = uniform({f_in}, F, rng);
    b.V_s = uniform({n, n}, N, rng);
    b.b_s = uniform({n, n}, N, rng);
    b.theta = uniform({k, f_in, c}, F, rng);
    b.phi = uniform({c, c, 3}, static_cast<double>(3 * c), rng);
    b.phi_bias = uniform({c}, static_cast<double>(3 * c), rng);
    return b;
}

} // namespace

ModelParams init_params(const ModelConfig& cfg, std::size_t stations, std::uint64_t seed) {
    cfg.validate();
    if (stations == 0) throw std::invalid_argument("init_params: zero stations");
    std::mt19937_64 rng(seed);
    ModelParams p;
    const auto lengths = component_lengths(cfg.windows);
    std::size_t active = 0;
    for (std::size_t len : lengths) active += len > 0 ? 1 : 0;
    const std::size_t n = stations, t_p = cfg.t_p();
    for (std::size_t c = 0; c < 3; ++c) {
        if (lengths[c] == 0) continue;
        p.enabled[c] = true;
        ComponentParams& comp = p.components[c];
        std::size_t f_in = cfg.features.size();
        for (std::size_t b = 0; b < cfg.blocks; ++b) {
            comp.blocks.push_back(init_block(n, f_in, lengths[c], cfg.cheb_order, cfg.channels, rng));
            f_in = cfg.channels;
        }
        const std::size_t flat = cfg.channels * lengths[c];
        comp.fc_weight = uniform({flat, t_p}, static_cast<double>(flat), rng);
        comp.fc_bias = uniform({t_p}, static_cast<double>(flat), rng);
        // Equal positive mixing at start so the final ReLU is not dead from the outset.
        comp.fusion = Tensor({n, t_p}, 1.0 / static_cast<double>(active));
    }
    return p;
}

ModelParams zeros_like(const ModelParams& params) {
    ModelParams z = params;
    z.visit([](const std::string&, Tensor& t) { t.fill(0.0); });
    return z;
}

std::size_t parameter_count(const ModelParams& params) {
    std::size_t n = 0;
    params.visit([&](const std::string&, const Tensor& t) { n += t.size(); });
    return n;
}

ModelVars bind(ad::Tape& tape, const ModelParams& params, bool trainable) {
    ModelVars vars;
    vars.enabled = params.enabled;
    for (std::size_t c = 0; c < 3; ++c) {
        if (!params.enabled[c]) continue;
        const ComponentParams& cp = params.components[c];
        ComponentVars& cv = vars.components[c];
        cv.blocks.resize(cp.blocks.size());
        // Both layouts visit their tensors in the same order.
        std::vector<const Tensor*> sources;
        cp.visit("", [&](const std::string&, const Tensor& t) { sources.push_back(&t); });
        std::size_t i = 0;
        cv.visit("", [&](const std::string&, ad::Var& v) {
            v = trainable ? tape.parameter(*sources[i]) : tape.constant(*sources[i]);
            ++i;
        });
    }
    return vars;
}

// ---- graph operators ------------------------------------------------------

std::vector<Tensor> chebyshev_polynomials(const Tensor& laplacian, std::size_t order) {
    if (laplacian.rank() != 2 || laplacian.dim(0) != laplacian.dim(1)) {
        throw std::invalid_argument("chebyshev_polynomials: Laplacian must be square");
    }
    if (order < 1) throw std::invalid_argument("chebyshev_polynomials: order must be >= 1");
    const std::size_t n = laplacian.dim(0);
    std::vector<Tensor> out;
    out.push_back(identity(n));
    if (order > 1) out.push_back(laplacian);
    for (std::size_t k = 2; k < order; ++k) {
        Tensor next = matmul(laplacian, out[k - 1]);
        for (std::size_t i = 0; i < next.size(); ++i) next[i] = 2.0 * next[i] - out[k - 2][i];
        out.push_back(std::move(next));
    }
    return out;
}

GraphArtifacts make_artifacts(const railnet::RailGraph& graph, const ModelConfig& cfg) {
    GraphArtifacts a;
    a.scaled_laplacian = railnet::scaled_laplacian(graph);
    a.cheb = chebyshev_polynomials(a.scaled_laplacian, cfg.cheb_order);
    a.spatial_weights = railnet::spatial_weight_matrix(graph, cfg.use_frequency_weight).matrix;
    return a;
}

// ---- forward --------------------------------------------------------------

namespace {

void require_finite(const ad::Var& v, const char* what) {
    if (!v.value().all_finite()) throw std::runtime_error(std::string(what) + " produced a non-finite value");
}

ad::Var as_row(ad::Var v) {
    return ad::reshape(v, {1, v.value().size()});
}

ad::Var as_column(ad::Var v) {
    return ad::reshape(v, {v.value().size(), 1});
}

} // namespace

ad::Var temporal_attention(ad::Var x, const BlockVars& p) {
    const Tensor& xv = x.value();
    if (xv.rank() != 3) throw std::invalid_argument("temporal_attention: input must be N×F×T");
    const std::size_t n = xv.dim(0), f = xv.dim(1), t = xv.dim(2);
    if (p.U1.value().size() != n || p.U2.shape() != Shape{f, n} || p.U3.value().size() != f ||
        p.V_t.shape() != Shape{t, t}) {
        throw std::invalid_argument("temporal_attention: parameters do not match input " + shape_string(xv.shape()));
    }
    // (Xᵀ U1) U2 : T×N
    ad::Var xt = ad::reshape(ad::permute(x, {2, 1, 0}), {t * f, n});
    ad::Var lhs = ad::matmul(ad::reshape(ad::matmul(xt, as_column(p.U1)), {t, f}), p.U2);
    // U3 X : N×T
    ad::Var xf = ad::reshape(ad::permute(x, {1, 0, 2}), {f, n * t});
    ad::Var rhs = ad::reshape(ad::matmul(as_row(p.U3), xf), {n, t});
    ad::Var score = ad::add(ad::matmul(lhs, rhs), p.b_t);
    ad::Var z = ad::softmax_rows(ad::matmul(p.V_t, ad::sigmoid(score)));
    require_finite(z, "temporal attention");
    return z;
}

ad::Var apply_temporal_attention(ad::Var x, ad::Var z) {
    const Shape s = x.shape();
    ad::Var flat = ad::reshape(x, {s[0] * s[1], s[2]});
    return ad::reshape(ad::matmul(flat, ad::transpose(z)), s);
}

ad::Var spatial_attention(ad::Var x_z, const BlockVars& p, const Tensor& spatial_weights) {
    const Tensor& xv = x_z.value();
    if (xv.rank() != 3) throw std::invalid_argument("spatial_attention: input must be N×F×T");
    const std::size_t n = xv.dim(0), f = xv.dim(1), t = xv.dim(2);
    if (spatial_weights.shape() != Shape{n, n}) {
        throw std::invalid_argument("spatial_attention: weight matrix " + shape_string(spatial_weights.shape()) +
                                    " does not match " + std::to_string(n) + " stations");
    }
    if (p.W1.value().size() != t || p.W2.shape() != Shape{f, t} || p.W3.value().size() != f ||
        p.V_s.shape() != Shape{n, n}) {
        throw std::invalid_argument("spatial_attention: parameters do not match input " + shape_string(xv.shape()));
    }
    // (X W1) W2 : N×T
    ad::Var flat = ad::reshape(x_z, {n * f, t});
    ad::Var lhs = ad::matmul(ad::reshape(ad::matmul(flat, as_column(p.W1)), {n, f}), p.W2);
    // W3 X : T×N
    ad::Var xf = ad::reshape(ad::permute(x_z, {1, 2, 0}), {f, t * n});
    ad::Var rhs = ad::reshape(ad::matmul(as_row(p.W3), xf), {t, n});
    ad::Var score = ad::add(ad::matmul(lhs, rhs), p.b_s);
    ad::Var c = ad::matmul(p.V_s, ad::sigmoid(score));
    ad::Var q = ad::softmax_rows(ad::mul_const(c, spatial_weights));
    require_finite(q, "spatial attention");
    return q;
}

ad::Var cheb_graph_conv(ad::Var x, ad::Var q, const std::vector<Tensor>& cheb, ad::Var theta) {
    const Tensor& xv = x.value();
    const Tensor& th = theta.value();
    if (xv.rank() != 3) throw std::invalid_argument("cheb_graph_conv: input must be N×F×T");
    const std::size_t n = xv.dim(0), f = xv.dim(1), t = xv.dim(2);
    if (th.rank() != 3 || th.dim(0) != cheb.size() || th.dim(1) != f) {
        throw std::invalid_argument("cheb_graph_conv: theta " + shape_string(th.shape()) + " does not match order " +
                                    std::to_string(cheb.size()) + " and " + std::to_string(f) + " input channels");
    }
    const std::size_t c = th.dim(2);
    // Node-major layout so every time slice is multiplied by the same N×N operator at once.
    ad::Var xn = ad::reshape(ad::permute(x, {0, 2, 1}), {n, t * f});
    ad::Var acc{};
    for (std::size_t k = 0; k < cheb.size(); ++k) {
        ad::Var op = ad::mul_const(q, cheb[k]);
        ad::Var mixed = ad::reshape(ad::matmul(op, xn), {n * t, f});
        ad::Var term = ad::matmul(mixed, ad::select(theta, k));
        acc = k == 0 ? term : ad::add(acc, term);
    }
    return ad::permute(ad::reshape(acc, {n, t, c}), {0, 2, 1});
}

ad::Var temporal_conv(ad::Var x, ad::Var phi, ad::Var bias) {
    return ad::relu(ad::temporal_conv(x, phi, bias));
}

ad::Var block_forward(ad::Var x, const BlockVars& p, const GraphArtifacts& graph) {
    ad::Var z = temporal_attention(x, p);
    ad::Var x_z = apply_temporal_attention(x, z);
    ad::Var q = spatial_attention(x_z, p, graph.spatial_weights);
    ad::Var g = ad::relu(cheb_graph_conv(x, q, graph.cheb, p.theta));
    return model::temporal_conv(g, p.phi, p.phi_bias);
}

ad::Var component_forward(ad::Var x, const ComponentVars& p, const GraphArtifacts& graph) {
    ad::Var h = x;
    for (const BlockVars& b : p.blocks) h = block_forward(h, b, graph);
    const Shape s = h.shape();
    ad::Var flat = ad::reshape(h, {s[0], s[1] * s[2]});
    return ad::add_row_bias(ad::matmul(flat, p.fc_weight), p.fc_bias);
}

ad::Var fuse(const std::vector<ad::Var>& outputs, const std::vector<ad::Var>& weights, bool use_final_relu) {
    if (outputs.empty() || outputs.size() != weights.size()) {
        throw std::invalid_argument("fuse: need one weight per component output");
    }
    ad::Var acc = ad::mul(weights[0], outputs[0]);
    for (std::size_t i = 1; i < outputs.size(); ++i) acc = ad::add(acc, ad::mul(weights[i], outputs[i]));
    return use_final_relu ? ad::relu(acc) : acc;
}

Tensor select_features(const Tensor& window, const std::vector<std::size_t>& features) {
    if (window.rank() != 3) throw std::invalid_argument("select_features: window must be N×F×T");
    const std::size_t n = window.dim(0), t = window.dim(2);
    Tensor out({n, features.size(), t});
    for (std::size_t c = 0; c < features.size(); ++c) {
        if (features[c] >= window.dim(1)) {
            throw std::invalid_argument("select_features: channel " + std::to_string(features[c]) +
                                        " not in window with " + std::to_string(window.dim(1)) + " channels");
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < features.size(); ++c)
            for (std::size_t k = 0; k < t; ++k) out.at(i, c, k) = window.at(i, features[c], k);
    return out;
}

ad::Var forward(ad::Tape& tape, const windows::Sample& sample, const ModelVars& vars, const ModelConfig& cfg,
                const GraphArtifacts& graph) {
    const std::array<const Tensor*, 3> inputs{&sample.X_h, &sample.X_d, &sample.X_w};
    const auto lengths = component_lengths(cfg.windows);
    std::vector<ad::Var> outputs, weights;
    for (std::size_t c = 0; c < 3; ++c) {
        if (!vars.enabled[c]) continue;
        const Tensor& w = *inputs[c];
        if (w.rank() != 3 || w.dim(2) != lengths[c]) {
            throw std::invalid_argument(std::string(kComponentNames[c]) + " window " + shape_string(w.shape()) +
                                        " does not match length " + std::to_string(lengths[c]));
        }
        ad::Var x = tape.constant(select_features(w, cfg.features));
        outputs.push_back(component_forward(x, vars.components[c], graph));
        weights.push_back(vars.components[c].fusion);
    }
    return fuse(outputs, weights, cfg.use_final_relu);
}

Tensor forward(const windows::Sample& sample, const ModelParams& params, const ModelConfig& cfg,
               const GraphArtifacts& graph) {
    ad::Tape tape;
    ModelVars vars = bind(tape, params, false);
    return forward(tape, sample, vars, cfg, graph).value();
}

namespace {

ModelParams collect_gradients(const ad::Tape& tape, const ModelParams& params, ModelVars& vars) {
    ModelParams grad = params;
    std::vector<Tensor*> dst;
    std::vector<std::string> names;
    grad.visit([&](const std::string& name, Tensor& t) {
        dst.push_back(&t);
        names.push_back(name);
    });
    std::size_t i = 0;
    vars.visit([&](const std::string&, ad::Var& v) {
        *dst[i] = tape.grad(v);
        if (!dst[i]->all_finite()) throw std::runtime_error("non-finite gradient in parameter " + names[i]);
        ++i;
    });
    return grad;
}

} // namespace

ModelParams backward(const windows::Sample& sample, const ModelParams& params, const ModelConfig& cfg,
                     const GraphArtifacts& graph, const Tensor& loss_grad) {
    ad::Tape tape;
    ModelVars vars = bind(tape, params, true);
    ad::Var out = forward(tape, sample, vars, cfg, graph);
    if (out.shape() != loss_grad.shape()) {
        throw std::invalid_argument("backward: loss gradient " + shape_string(loss_grad.shape()) +
                                    " does not match output " + shape_string(out.shape()));
    }
    tape.backward(out, loss_grad);
    return collect_gradients(tape, params, vars);
}

double accumulate_sse_gradient(const windows::Sample& sample, const ModelParams& params, const ModelConfig& cfg,
                               const GraphArtifacts& graph, double scale, ModelParams& grad) {
    ad::Tape tape;
    ModelVars vars = bind(tape, params, true);
    ad::Var out = forward(tape, sample, vars, cfg, graph);
    double sse = 0.0;
    for (std::size_t i = 0; i < out.value().size(); ++i) {
        if (sample.mask[i] == 0.0) continue;
        const double d = out.value()[i] - sample.Y[i];
        sse += sample.mask[i] * d * d;
    }
    tape.backward(ad::masked_sse(out, sample.Y, sample.mask, scale));
    const ModelParams g = collect_gradients(tape, params, vars);
    std::vector<Tensor*> dst;
    grad.visit([&](const std::string&, Tensor& t) { dst.push_back(&t); });
    std::size_t i = 0;
    g.visit([&](const std::string& name, const Tensor& t) {
        if (i >= dst.size() || dst[i]->shape() != t.shape()) {
            throw std::invalid_argument("accumulate_sse_gradient: gradient buffer layout differs at " + name);
        }
        for (std::size_t j = 0; j < t.size(); ++j) (*dst[i])[j] += t[j];
        ++i;
    });
    return sse;
}

// ---- checkpoints ----------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'R', 'S', 'T', 'G', 'C', 'N', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint payloads assume a little-endian host");

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::string& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("checkpoint " + path + ": truncated header");
    return v;
}

nlohmann::json checkpoint_header(const ModelParams& params, const ModelConfig& cfg, std::size_t stations,
                                 const nlohmann::json& extra) {
    nlohmann::json tensors = nlohmann::json::array();
    params.visit([&](const std::string& name, const Tensor& t) {
        tensors.push_back({{"name", name}, {"shape", t.shape()}});
    });
    return {{"format", "rstgcn-checkpoint"},
            {"version", kVersion},
            {"config", to_json(cfg)},
            {"stations", stations},
            {"components", {params.enabled[0], params.enabled[1], params.enabled[2]}},
            {"parameter_count", parameter_count(params)},
            {"tensors", tensors},
            {"extra", extra}};
}

} // namespace

void save_checkpoint(const std::string& path, const ModelParams& params, const ModelConfig& cfg, std::size_t stations,
                     const nlohmann::json& extra) {
    const nlohmann::json header = checkpoint_header(params, cfg, stations, extra);
    const std::string text = header.dump();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path);
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kVersion);
    write_pod(out, static_cast<std::uint64_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    params.visit([&](const std::string&, const Tensor& t) {
        out.write(reinterpret_cast<const char*>(t.data().data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
    });
    if (!out) throw std::runtime_error("failed writing checkpoint " + path);
    std::ofstream side(path + ".json", std::ios::trunc);
    if (!side) throw std::runtime_error("cannot write checkpoint manifest " + path + ".json");
    side << header.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error(path + " is not an rstgcn checkpoint");
    }
    const auto version = read_pod<std::uint32_t>(in, path);
    if (version != kVersion) {
        throw std::runtime_error("checkpoint " + path + ": unsupported version " + std::to_string(version));
    }
    const auto len = read_pod<std::uint64_t>(in, path);
    std::string text(len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(len));
    if (!in) throw std::runtime_error("checkpoint " + path + ": truncated header");
    const nlohmann::json header = nlohmann::json::parse(text);

    Checkpoint ck;
    ck.config = model_config_from_json(header.at("config"));
    ck.stations = header.at("stations").get<std::size_t>();
    ck.extra = header.value("extra", nlohmann::json::object());
    ck.params = init_params(ck.config, ck.stations, 0);
    const auto& manifest = header.at("tensors");
    std::size_t i = 0;
    ck.params.visit([&](const std::string& name, Tensor& t) {
        if (i >= manifest.size() || manifest[i].at("name") != name ||
            manifest[i].at("shape").get<Shape>() != t.shape()) {
            throw std::runtime_error("checkpoint " + path + ": tensor manifest does not match configuration at " + name);
        }
        in.read(reinterpret_cast<char*>(t.data().data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
        if (!in) throw std::runtime_error("checkpoint " + path + ": truncated payload at " + name);
        ++i;
    });
    if (i != manifest.size()) throw std::runtime_error("checkpoint " + path + ": extra tensors in manifest");
    return ck;
}

} // namespace rstgcn::model
