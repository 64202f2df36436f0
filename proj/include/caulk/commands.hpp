#ifndef CAULK_COMMANDS_HPP
#define CAULK_COMMANDS_HPP

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "caulk/caulking.hpp"
#include "caulk/config.hpp"
#include "caulk/csv.hpp"
#include "caulk/function_spaces.hpp"
#include "caulk/manifest.hpp"
#include "caulk/rates.hpp"
#include "caulk/svg.hpp"
#include "caulk/verify_suite.hpp"

namespace caulk {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

// ---------------------------------------------------------------------------
// Config-block parsers
// ---------------------------------------------------------------------------

inline CompositionSpec parse_composition(const ConfigNode& root) {
    const ConfigNode& comp = root.block("composition");
    CompositionSpec spec;
    spec.seed = comp.has("seed") ? comp.u64("seed") : 0;
    auto layer_blocks = comp.blocks_named("layer");
    if (layer_blocks.empty()) throw ConfigError("config: composition block has no 'layer' blocks");
    int idx = 1;
    for (const ConfigNode* lb : layer_blocks) {
        SmoothLayerSpec ls;
        ls.layer_index = idx++;
        ls.in_dim = int(lb->integer("in_dim"));
        ls.out_dim = int(lb->integer("out_dim"));
        ls.active_vars = int(lb->integer("active_vars"));
        ls.beta = lb->num("beta");
        std::string mode = lb->str("mode");
        if (mode == "kink")
            ls.mode = RoughnessMode::kink;
        else if (mode == "polynomial")
            ls.mode = RoughnessMode::polynomial;
        else
            throw ConfigError("config: layer mode must be 'kink' or 'polynomial', got '" + mode + "'");
        spec.layers.push_back(ls);
    }
    try {
        spec.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return spec;
}

inline ConfigNode composition_echo(const CompositionSpec& spec) {
    ConfigNode comp;
    comp.name = "composition";
    comp.set("seed", {std::to_string(spec.seed)});
    for (const auto& ls : spec.layers) {
        ConfigNode layer;
        layer.name = "layer";
        layer.set("in_dim", {std::to_string(ls.in_dim)});
        layer.set("out_dim", {std::to_string(ls.out_dim)});
        layer.set("active_vars", {std::to_string(ls.active_vars)});
        layer.set("beta", {format_double(ls.beta)});
        layer.set("mode", {to_string(ls.mode)});
        comp.blocks.push_back(layer);
    }
    return comp;
}

inline FitConfig parse_fit(const ConfigNode& root, const std::string& block = "fit") {
    FitConfig fc;
    if (!root.has_block(block)) return fc;
    const ConfigNode& b = root.block(block);
    fc.learning_rate = b.num_or("learning_rate", fc.learning_rate);
    fc.max_epochs = int(b.integer_or("max_epochs", fc.max_epochs));
    fc.batch_size = int(b.integer_or("batch_size", fc.batch_size));
    fc.restarts = int(b.integer_or("restarts", fc.restarts));
    fc.patience = int(b.integer_or("patience", fc.patience));
    fc.project_every = int(b.integer_or("project_every", fc.project_every));
    try {
        fc.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return fc;
}

inline CovariateDistribution parse_dist(const ConfigNode& root, int dim, const std::string& block) {
    if (!root.has_block(block)) return CovariateDistribution::uniform();
    const ConfigNode& b = root.block(block);
    std::string kind = b.str_or("kind", "uniform_cube");
    if (kind == "uniform_cube") return CovariateDistribution::uniform();
    if (kind != "affine_warp")
        throw ConfigError("config: dist kind must be 'uniform_cube' or 'affine_warp', got '" + kind +
                          "'");
    Vec offsets, slopes;
    if (b.has("offsets")) {
        offsets = b.num_list("offsets");
        slopes = b.num_list("slopes");
    } else {
        offsets.assign(std::size_t(dim), 0.05);
        slopes.assign(std::size_t(dim), 0.9);
    }
    try {
        return CovariateDistribution::warp(offsets, slopes);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

inline AdapterSpec parse_adapter(const ConfigNode& root) {
    AdapterSpec spec;
    if (!root.has_block("adapter")) return spec;
    const ConfigNode& b = root.block("adapter");
    spec.depth = int(b.integer_or("depth", 0));
    spec.width = int(b.integer_or("width", 4));
    if (b.has("sparsity_budget") || b.has("weight_bound")) {
        double S = b.num_or("sparsity_budget", 1e9);
        double B = b.num_or("weight_bound", 1e9);
        spec.constraints = {{S, B}};
    }
    return spec;
}

struct SplitSpec {
    int i_e = 1;
    int i_h = 1;
};

inline SplitSpec parse_split(const ConfigNode& root) {
    const ConfigNode& b = root.block("split");
    return {int(b.integer("i_e")), int(b.integer("i_h"))};
}

inline PretrainedModel build_pretrained(const ConfigNode& root, const TargetFunction& f, int i_e,
                                        int i_h, std::uint64_t master_seed) {
    std::string mode = "oracle";
    if (root.has_block("pretrain")) mode = root.block("pretrain").str_or("mode", "oracle");
    if (mode == "oracle") return pretrain_oracle(f, i_e, i_h);
    if (mode != "empirical")
        throw ConfigError("config: pretrain mode must be 'oracle' or 'empirical', got '" + mode + "'");
    const ConfigNode& b = root.block("pretrain");
    int m = int(b.integer("m"));
    ReluNetworkSpec net_spec;
    net_spec.height = f.depth();
    net_spec.width = int(b.integer_or("width", 8));
    net_spec.in_dim = f.input_dim();
    net_spec.out_dim = 1;
    FitConfig fit = parse_fit(b, "fit");
    fit.seed = derive_seed(master_seed, "pretrain", std::uint64_t(m));
    CovariateDistribution source = parse_dist(b, f.input_dim(), "source_dist");
    return pretrain_empirical(f, source, m, net_spec, i_e, i_h, fit,
                              b.num_or("noise_sigma", 0.0));
}

// ---------------------------------------------------------------------------
// Shared command scaffolding
// ---------------------------------------------------------------------------

struct CommandInput {
    ConfigNode root;
    std::string hash;
    std::filesystem::path output_dir;
    std::uint64_t master_seed = 0;
};

inline CommandInput prepare(const ConfigNode& root) {
    CommandInput in;
    in.root = root;
    in.hash = config_hash(root);
    if (!root.has("output_dir")) throw ConfigError("config: missing key 'output_dir'");
    in.output_dir = root.str("output_dir");
    if (!root.has("master_seed")) throw ConfigError("config: missing key 'master_seed'");
    in.master_seed = root.u64("master_seed");
    return in;
}

inline std::string rate_table_csv(const RateTable& table) {
    CsvWriter csv({"n", "trials", "mean_error", "std_error"});
    for (const auto& r : table.rows) {
        csv.cell(r.n).cell(r.trials).cell(r.mean_error).cell(r.std_error);
        csv.end_row();
    }
    return csv.str();
}

inline nlohmann::ordered_json exponent_json(const RateTable& table, const ConfigNode& root,
                                            const std::string& hash, bool restricted_range) {
    nlohmann::ordered_json j;
    bool positive = true;
    for (const auto& r : table.rows) positive = positive && r.mean_error > 0.0;
    if (positive && table.rows.size() >= 3) {
        ExponentFit fit = fit_power_law(table);
        j["exponent"] = fit.exponent;
        j["r_squared"] = fit.r_squared;
        j["intercept"] = fit.intercept;
        j["n_lo"] = fit.n_lo;
        j["n_hi"] = fit.n_hi;
    } else {
        j["exponent"] = nullptr;
        j["r_squared"] = nullptr;
        j["note"] = "power-law fit skipped: needs >= 3 rows with positive mean errors";
    }
    if (root.has_block("composition")) {
        CompositionSpec spec = parse_composition(root);
        std::vector<std::pair<double, int>> layers;
        for (const auto& ls : spec.layers) layers.emplace_back(ls.beta, ls.active_vars);
        int lo = 1, hi = int(layers.size());
        if (restricted_range && root.has_block("split")) {
            SplitSpec split = parse_split(root);
            lo = split.i_e;
            hi = split.i_h;
        }
        auto comp_min = composition_exponents(layers, lo, hi, AlphaConvention::min);
        auto comp_max = composition_exponents(layers, lo, hi, AlphaConvention::max);
        j["theoretical"] = -comp_min.worst;
        j["theoretical_max_convention"] = -comp_max.worst;
    }
    j["model_kind"] = table.model_kind;
    j["config_hash"] = hash;
    return j;
}

inline std::string rate_svg(const RateTable& table) {
    PlotSpec spec;
    spec.title = "L2 error vs n (" + table.model_kind + ")";
    spec.x_label = "n";
    spec.y_label = "mean L2 error";
    spec.log_x = spec.log_y = true;
    PlotSeries s;
    s.label = table.model_kind;
    bool positive = true;
    for (const auto& r : table.rows) {
        s.x.push_back(double(r.n));
        s.y.push_back(r.mean_error);
        s.yerr.push_back(r.std_error);
        positive = positive && r.mean_error > 0.0;
    }
    spec.series.push_back(s);
    if (positive && table.rows.size() >= 3) {
        ExponentFit fit = fit_power_law(table);
        spec.with_line = true;
        spec.line_slope = fit.exponent;
        spec.line_intercept = fit.intercept / std::log(10.0);
        char buf[64];
        std::snprintf(buf, sizeof(buf), "fit slope %.3f", fit.exponent);
        spec.line_label = buf;
    }
    return render_svg(spec);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline int cmd_gen_target(const ConfigNode& root) {
    CommandInput in = prepare(root);
    CompositionSpec spec = parse_composition(root);
    TargetFunction f = make_composition(spec);
    OutputDir out(in.output_dir, "gen-target", in.hash);
    out.emit("target.txt", serialize_target(f));
    out.emit("spec.txt", config_text(composition_echo(spec)));
    out.finalize();
    return kExitOk;
}

inline int cmd_pretrain(const ConfigNode& root) {
    CommandInput in = prepare(root);
    TargetFunction f = make_composition(parse_composition(root));
    SplitSpec split = parse_split(root);
    PretrainedModel model = build_pretrained(root, f, split.i_e, split.i_h, in.master_seed);
    OutputDir out(in.output_dir, "pretrain", in.hash);
    out.emit("target.txt", serialize_target(f));
    nlohmann::ordered_json j;
    j["i_e"] = model.i_e;
    j["i_h"] = model.i_h;
    j["provenance"] = model.provenance.describe();
    j["adapter_in_dim"] = model.adapter_in_dim();
    j["adapter_out_dim"] = model.adapter_out_dim();
    j["config_hash"] = in.hash;
    if (model.extractor.kind == MapPart::Kind::relu_slice ||
        model.head.kind == MapPart::Kind::relu_slice) {
        ReluNetwork parts;  // reassembled for the record: extractor then head maps
        ReluNetworkSpec ps;
        ps.height = int(model.extractor.W.size() + model.head.W.size());
        if (ps.height > 0) {
            std::vector<Matrix> W = model.extractor.W;
            std::vector<Vec> b = model.extractor.b;
            W.insert(W.end(), model.head.W.begin(), model.head.W.end());
            b.insert(b.end(), model.head.b.begin(), model.head.b.end());
            ps.in_dim = int(W.front().cols);
            ps.out_dim = int(W.back().rows);
            ps.width = int(W.front().rows);
            parts.spec = ps;
            parts.weights = W;
            parts.biases = b;
            out.emit("frozen_parts.txt", serialize_network(parts));
            j["frozen_parts"] = "frozen_parts.txt";
        }
    }
    out.emit("pretrain.json", j.dump(2) + "\n");
    out.finalize();
    return kExitOk;
}

namespace detail {

inline ModelBuilder caulk_builder(const PretrainedModel& pre, AdapterSpec aspec, FitConfig fit) {
    aspec.in_dim = pre.adapter_in_dim();
    aspec.out_dim = pre.adapter_out_dim();
    return [pre, aspec, fit](const RegressionSample& sample, std::uint64_t seed) {
        FitConfig fc = fit;
        fc.seed = seed;
        auto [model, trace] = caulk_fit(pre, aspec, sample, fc);
        (void)trace;
        return model.as_fn();
    };
}

inline ReluNetworkSpec scratch_spec(const ConfigNode& root, const TargetFunction& f) {
    ReluNetworkSpec spec;
    spec.in_dim = f.input_dim();
    spec.out_dim = 1;
    spec.height = 3;
    spec.width = 8;
    if (root.has_block("scratch")) {
        const ConfigNode& b = root.block("scratch");
        spec.height = int(b.integer_or("height", spec.height));
        spec.width = int(b.integer_or("width", spec.width));
        spec.sparsity_budget = b.num_or("sparsity_budget", spec.sparsity_budget);
        spec.weight_bound = b.num_or("weight_bound", spec.weight_bound);
    }
    return spec;
}

inline ModelBuilder scratch_builder(const ReluNetworkSpec& spec, FitConfig fit) {
    return [spec, fit](const RegressionSample& sample, std::uint64_t seed) {
        FitConfig fc = fit;
        fc.seed = seed;
        auto [net, trace] = scratch_fit(spec, sample, fc);
        (void)trace;
        ReluNetwork owned = std::move(net);
        return ScalarFn([owned](const Vec& x) { return owned.forward(x)[0]; });
    };
}

}  // namespace detail

inline int cmd_fit_single(const ConfigNode& root, bool caulked) {
    CommandInput in = prepare(root);
    TargetFunction f = make_composition(parse_composition(root));
    const ConfigNode& sample_block = root.block("sample");
    int n = int(sample_block.integer("n"));
    double noise = sample_block.num_or("noise_sigma", 0.1);
    CovariateDistribution q = parse_dist(root, f.input_dim(), "dist");
    RegressionSample sample =
        make_regression_sample(f, q, n, noise, derive_seed(in.master_seed, "single-sample"));
    FitConfig fit = parse_fit(root);
    fit.seed = derive_seed(in.master_seed, "single-fit");
    int n_mc = int(root.integer_or("n_mc", 4096));

    OutputDir out(in.output_dir, caulked ? "caulk" : "scratch", in.hash);
    ScalarFn model_fn;
    FitTrace trace;
    nlohmann::ordered_json meta;
    if (caulked) {
        SplitSpec split = parse_split(root);
        PretrainedModel pre = build_pretrained(root, f, split.i_e, split.i_h, in.master_seed);
        AdapterSpec aspec = parse_adapter(root);
        aspec.in_dim = pre.adapter_in_dim();
        aspec.out_dim = pre.adapter_out_dim();
        auto [model, tr] = caulk_fit(pre, aspec, sample, fit);
        trace = tr;
        out.emit("adapter.txt", serialize_network(model.adapter));
        meta["i_e"] = pre.i_e;
        meta["i_h"] = pre.i_h;
        meta["provenance"] = pre.provenance.describe();
        meta["adapter"] = "adapter.txt";
        model_fn = model.as_fn();
    } else {
        auto [net, tr] = scratch_fit(detail::scratch_spec(root, f), sample, fit);
        trace = tr;
        out.emit("network.txt", serialize_network(net));
        meta["network"] = "network.txt";
        ReluNetwork owned = std::move(net);
        model_fn = [owned](const Vec& x) { return owned.forward(x)[0]; };
    }
    meta["final_loss"] = trace.final_loss;
    meta["epochs_run"] = trace.epochs_run;
    meta["restart_index"] = trace.restart_index;
    meta["config_hash"] = in.hash;

    ErrorEstimate l2 = l2_error(model_fn, f, q, n_mc, derive_seed(in.master_seed, "single-mc"));
    ErrorEstimate excess = excess_error(plugin_classify(model_fn), f, q, n_mc,
                                        derive_seed(in.master_seed, "single-excess"));
    {
        CsvWriter csv({"model_id", "n", "seed", "l2_estimate", "l2_stderr", "excess_estimate"});
        csv.cell(std::string(caulked ? "caulk-" : "scratch-") + in.hash.substr(0, 8));
        csv.cell(n);
        csv.cell(std::to_string(in.master_seed));
        csv.cell(l2.estimate);
        csv.cell(l2.std_error);
        csv.cell(excess.estimate);
        csv.end_row();
        out.emit("result.csv", csv.str());
    }
    {
        CsvWriter csv({"epoch", "loss"});
        for (std::size_t e = 0; e < trace.losses.size(); ++e) {
            csv.cell(int(e)).cell(trace.losses[e]);
            csv.end_row();
        }
        out.emit("trace.csv", csv.str());
    }
    out.emit("model.json", meta.dump(2) + "\n");
    out.finalize();
    return kExitOk;
}

inline int cmd_caulk(const ConfigNode& root) { return cmd_fit_single(root, true); }
inline int cmd_scratch(const ConfigNode& root) { return cmd_fit_single(root, false); }

inline int cmd_rate_sweep(const ConfigNode& root) {
    CommandInput in = prepare(root);
    TargetFunction f = make_composition(parse_composition(root));
    const ConfigNode& sweep = root.block("sweep");

    RateSweepSetup setup;
    setup.target = f;
    setup.q = parse_dist(root, f.input_dim(), "dist");
    setup.n_grid = sweep.int_list("n");
    setup.trials = int(sweep.integer_or("trials", 10));
    setup.noise_sigma = sweep.num_or("noise_sigma", 0.1);
    setup.n_mc = int(sweep.integer_or("n_mc", 4096));
    setup.config_hash = in.hash;
    setup.model_kind = sweep.str_or("model", "caulk");

    FitConfig fit = parse_fit(root);
    bool caulked = setup.model_kind == "caulk";
    if (caulked) {
        SplitSpec split = parse_split(root);
        PretrainedModel pre = build_pretrained(root, f, split.i_e, split.i_h, in.master_seed);
        setup.build_model = detail::caulk_builder(pre, parse_adapter(root), fit);
    } else if (setup.model_kind == "scratch") {
        setup.build_model = detail::scratch_builder(detail::scratch_spec(root, f), fit);
    } else {
        throw ConfigError("config: sweep model must be 'caulk' or 'scratch', got '" +
                          setup.model_kind + "'");
    }

    RateTable table = run_rate_sweep(setup, in.master_seed);
    OutputDir out(in.output_dir, "rate-sweep", in.hash);
    out.emit("rate.csv", rate_table_csv(table));
    out.emit("exponent.json", exponent_json(table, root, in.hash, caulked).dump(2) + "\n");
    out.emit("rate.svg", rate_svg(table));
    out.finalize();
    return kExitOk;
}

inline int cmd_depth_sweep(const ConfigNode& root) {
    CommandInput in = prepare(root);
    TargetFunction f = make_composition(parse_composition(root));
    const ConfigNode& ds = root.block("depth_sweep");

    DepthSweepSetup setup;
    setup.target = f;
    setup.q = parse_dist(root, f.input_dim(), "dist");
    setup.depths = ds.int_list("depths");
    setup.adapter_width = int(parse_adapter(root).width);
    setup.n = int(ds.integer_or("n", 512));
    setup.trials = int(ds.integer_or("trials", 5));
    setup.noise_sigma = ds.num_or("noise_sigma", 0.05);
    setup.n_mc = int(ds.integer_or("n_mc", 4096));
    setup.fit = parse_fit(root);

    auto variant_blocks = ds.blocks_named("variant");
    if (variant_blocks.empty()) throw ConfigError("config: depth_sweep has no 'variant' blocks");
    for (const ConfigNode* vb : variant_blocks) {
        DepthSweepVariant v;
        v.name = vb->str("name");
        int i_e = int(vb->integer("i_e"));
        int i_h = int(vb->integer("i_h"));
        v.pretrained = build_pretrained(root, f, i_e, i_h, in.master_seed);
        setup.variants.push_back(std::move(v));
    }

    auto rows = run_depth_sweep(setup, in.master_seed);
    OutputDir out(in.output_dir, "depth-sweep", in.hash);
    {
        CsvWriter csv({"variant", "depth", "mean_error", "std_error", "is_min"});
        for (const auto& r : rows) {
            csv.cell(r.variant).cell(r.depth).cell(r.mean_error).cell(r.std_error).cell(
                r.is_min ? 1 : 0);
            csv.end_row();
        }
        out.emit("depth.csv", csv.str());
    }
    {
        PlotSpec spec;
        spec.title = "L2 error vs adapter depth";
        spec.x_label = "adapter depth";
        spec.y_label = "mean L2 error";
        spec.log_y = true;
        for (const auto& v : setup.variants) {
            PlotSeries s;
            s.label = v.name;
            for (const auto& r : rows)
                if (r.variant == v.name) {
                    s.x.push_back(double(r.depth));
                    s.y.push_back(r.mean_error);
                    s.yerr.push_back(r.std_error);
                    s.emphasize.push_back(r.is_min);
                }
            spec.series.push_back(s);
        }
        out.emit("depth.svg", render_svg(spec));
    }
    out.finalize();
    return kExitOk;
}

inline int cmd_m_sweep(const ConfigNode& root) {
    CommandInput in = prepare(root);
    TargetFunction f = make_composition(parse_composition(root));
    const ConfigNode& ms = root.block("m_sweep");
    SplitSpec split = parse_split(root);

    MSweepSetup setup;
    setup.target = f;
    setup.i_e = split.i_e;
    setup.i_h = split.i_h;
    setup.q = parse_dist(root, f.input_dim(), "dist");
    for (const std::string& tok : ms.values("m")) {
        if (tok == "oracle") {
            setup.m_grid.push_back(-1);
        } else {
            char* end = nullptr;
            long v = std::strtol(tok.c_str(), &end, 10);
            if (end == tok.c_str() || *end != '\0' || v < 1)
                throw ConfigError("config: m_sweep m entries must be positive integers or 'oracle'");
            setup.m_grid.push_back(int(v));
        }
    }
    setup.n_grid = ms.int_list("n");
    setup.trials = int(ms.integer_or("trials", 5));
    setup.noise_sigma = ms.num_or("noise_sigma", 0.1);
    setup.n_mc = int(ms.integer_or("n_mc", 4096));

    const ConfigNode& pb = root.block("pretrain");
    setup.pretrain_spec.height = f.depth();
    setup.pretrain_spec.width = int(pb.integer_or("width", 8));
    setup.pretrain_spec.in_dim = f.input_dim();
    setup.pretrain_spec.out_dim = 1;
    setup.pretrain_fit = parse_fit(pb, "fit");
    setup.source = parse_dist(pb, f.input_dim(), "source_dist");
    setup.adapter = parse_adapter(root);
    setup.adapter_fit = parse_fit(root);

    auto rows = run_m_sweep(setup, in.master_seed);
    OutputDir out(in.output_dir, "m-sweep", in.hash);
    {
        CsvWriter csv({"m", "exponent", "r_squared"});
        for (const auto& r : rows) {
            csv.cell(r.m == -1 ? std::string("oracle") : std::to_string(r.m));
            csv.cell(r.exponent).cell(r.r_squared);
            csv.end_row();
        }
        out.emit("msweep.csv", csv.str());
    }
    {
        PlotSpec spec;
        spec.title = "Fitted rate exponent vs source size m";
        spec.x_label = "m (oracle drawn at 4x max m)";
        spec.y_label = "fitted exponent";
        spec.log_x = true;
        PlotSeries s;
        s.label = "caulk";
        int max_m = 1;
        for (const auto& r : rows)
            if (r.m > max_m) max_m = r.m;
        for (const auto& r : rows) {
            s.x.push_back(r.m == -1 ? 4.0 * double(max_m) : double(r.m));
            s.y.push_back(r.exponent);
        }
        spec.series.push_back(s);
        out.emit("msweep.svg", render_svg(spec));
    }
    out.finalize();
    return kExitOk;
}

inline int cmd_verify(const ConfigNode& root) {
    CommandInput in = prepare(root);
    VerifySuiteConfig cfg;
    cfg.seed = in.master_seed;
    if (root.has_block("verify")) {
        const ConfigNode& b = root.block("verify");
        cfg.prop4_instances = int(b.integer_or("prop4_instances", cfg.prop4_instances));
        cfg.prop5_instances = int(b.integer_or("prop5_instances", cfg.prop5_instances));
        cfg.eq38_triples = int(b.integer_or("eq38_triples", cfg.eq38_triples));
        cfg.c_alpha_scale = b.num_or("c_alpha_scale", cfg.c_alpha_scale);
        cfg.covering_smoke = b.integer_or("covering_smoke", 1) != 0;
        if (b.has_block("lemma10")) {
            const ConfigNode& l = b.block("lemma10");
            if (l.has("n_values")) cfg.lemma_n = l.int_list("n_values");
            if (l.has("sigmas")) {
                cfg.lemma_sigma.clear();
                for (double s : l.num_list("sigmas")) cfg.lemma_sigma.push_back(s);
            }
            cfg.lemma_trials = int(l.integer_or("trials", cfg.lemma_trials));
            cfg.lemma_f_scale = l.num_or("f_scale", cfg.lemma_f_scale);
        }
    }
    if (cfg.empty()) throw ConfigError("config: verify suite is empty");

    VerifySuiteResult res = run_verify_suite(cfg);

    // optional oracle-inequality diagnostic from a previous rate sweep
    if (root.has_block("verify") && root.block("verify").has_block("bound_consistency")) {
        const ConfigNode& bc = root.block("verify").block("bound_consistency");
        CsvTable t = parse_csv(read_file(bc.str("rate_csv")));
        std::vector<BoundConsistencyInput> grid;
        int n_col = t.column("n"), e_col = t.column("mean_error");
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            BoundConsistencyInput g;
            g.n = int(t.num(r, n_col));
            g.realized_mse = t.num(r, e_col);
            g.approx_error_proxy = bc.num_or("approx_error_proxy", 0.0);
            g.log_cover_proxy = bc.num_or("log_cover_proxy", 1.0);
            grid.push_back(g);
        }
        BoundConsistencyReport rep = bound_consistency_report(grid);
        nlohmann::ordered_json j;
        j["c_hats"] = rep.c_hats;
        j["max_c_hat"] = rep.max_c_hat;
        j["diverging"] = rep.diverging;
        j["note"] = "diagnostic only; the oracle-inequality constant is unknown";
        res.report["bound_consistency"] = j;
    }

    OutputDir out(in.output_dir, "verify", in.hash);
    out.emit("verify.json", res.report.dump(2) + "\n");
    for (std::size_t i = 0; i < res.counterexamples.size(); ++i)
        out.emit("counterexample_" + std::to_string(i) + ".json",
                 res.counterexamples[i].dump(2) + "\n");
    out.finalize();
    return res.all_probative_pass ? kExitOk : kExitVerifyFailure;
}

// ---------------------------------------------------------------------------
// Plot
// ---------------------------------------------------------------------------

inline std::string plot_csv(const CsvTable& t) {
    auto header_is = [&](std::initializer_list<const char*> cols) {
        if (t.header.size() != cols.size()) return false;
        std::size_t i = 0;
        for (const char* c : cols)
            if (t.header[i++] != c) return false;
        return true;
    };

    if (header_is({"n", "trials", "mean_error", "std_error"})) {
        PlotSpec spec;
        spec.title = "L2 error vs n";
        spec.x_label = "n";
        spec.y_label = "mean L2 error";
        spec.log_x = spec.log_y = true;
        PlotSeries s;
        s.label = "mean_error";
        int nc = t.column("n"), ec = t.column("mean_error"), sc = t.column("std_error");
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            s.x.push_back(t.num(r, nc));
            s.y.push_back(t.num(r, ec));
            s.yerr.push_back(t.num(r, sc));
        }
        spec.series.push_back(s);
        return render_svg(spec);
    }
    if (header_is({"variant", "depth", "mean_error", "std_error", "is_min"})) {
        PlotSpec spec;
        spec.title = "L2 error vs adapter depth";
        spec.x_label = "adapter depth";
        spec.y_label = "mean L2 error";
        spec.log_y = true;
        int vc = t.column("variant"), dc = t.column("depth"), ec = t.column("mean_error"),
            sc = t.column("std_error"), mc = t.column("is_min");
        std::vector<std::string> variants;
        for (const auto& row : t.rows)
            if (std::find(variants.begin(), variants.end(), row[std::size_t(vc)]) == variants.end())
                variants.push_back(row[std::size_t(vc)]);
        for (const auto& v : variants) {
            PlotSeries s;
            s.label = v;
            for (std::size_t r = 0; r < t.rows.size(); ++r)
                if (t.rows[r][std::size_t(vc)] == v) {
                    s.x.push_back(t.num(r, dc));
                    s.y.push_back(t.num(r, ec));
                    s.yerr.push_back(t.num(r, sc));
                    s.emphasize.push_back(t.num(r, mc) != 0.0);
                }
            spec.series.push_back(s);
        }
        return render_svg(spec);
    }
    if (header_is({"m", "exponent", "r_squared"})) {
        PlotSpec spec;
        spec.title = "Fitted exponent vs m";
        spec.x_label = "m (oracle drawn at 4x max m)";
        spec.y_label = "fitted exponent";
        spec.log_x = true;
        PlotSeries s;
        s.label = "exponent";
        int mc = t.column("m"), ec = t.column("exponent");
        double max_m = 1.0;
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            if (t.rows[r][std::size_t(mc)] != "oracle") max_m = std::max(max_m, t.num(r, mc));
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            bool oracle = t.rows[r][std::size_t(mc)] == "oracle";
            s.x.push_back(oracle ? 4.0 * max_m : t.num(r, mc));
            s.y.push_back(t.num(r, ec));
        }
        spec.series.push_back(s);
        return render_svg(spec);
    }
    if (header_is({"epoch", "loss"})) {
        PlotSpec spec;
        spec.title = "Training loss";
        spec.x_label = "epoch";
        spec.y_label = "loss";
        spec.log_y = true;
        PlotSeries s;
        s.label = "loss";
        int ec = t.column("epoch"), lc = t.column("loss");
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            double loss = t.num(r, lc);
            if (loss <= 0.0) continue;  // log axis
            s.x.push_back(t.num(r, ec));
            s.y.push_back(loss);
        }
        spec.series.push_back(s);
        return render_svg(spec);
    }
    std::string header;
    for (std::size_t i = 0; i < t.header.size(); ++i) header += (i ? "," : "") + t.header[i];
    throw ConfigError("plot: unknown CSV schema with header '" + header + "'");
}

inline int cmd_plot(const std::string& csv_path, const std::string& out_path) {
    CsvTable t = parse_csv(read_file(csv_path));
    write_file(out_path, plot_csv(t));
    return kExitOk;
}

// ---------------------------------------------------------------------------
// CLI dispatch
// ---------------------------------------------------------------------------

inline void print_usage(std::ostream& os) {
    os << "usage: caulk <command> <config> [--set key=value]...\n"
          "       caulk plot <csv> [--out <svg>]\n"
          "commands: gen-target pretrain caulk scratch rate-sweep depth-sweep m-sweep verify plot\n"
          "exit codes: 0 ok, 1 probative verification failure, 2 config error, 3 runtime failure\n";
}

inline int run_cli(const std::vector<std::string>& args) {
    try {
        if (args.empty()) {
            print_usage(std::cerr);
            return kExitConfigError;
        }
        const std::string& command = args[0];
        if (command == "plot") {
            if (args.size() < 2) throw ConfigError("plot: missing CSV path");
            std::string out_path;
            for (std::size_t i = 2; i < args.size(); ++i)
                if (args[i] == "--out" && i + 1 < args.size()) out_path = args[++i];
            if (out_path.empty()) {
                out_path = args[1];
                auto dot = out_path.rfind('.');
                out_path = (dot == std::string::npos ? out_path : out_path.substr(0, dot)) + ".svg";
            }
            return cmd_plot(args[1], out_path);
        }
        if (args.size() < 2) throw ConfigError(command + ": missing config path");
        ConfigNode root = parse_config(read_file(args[1]));
        for (std::size_t i = 2; i < args.size(); ++i) {
            if (args[i] == "--set" && i + 1 < args.size()) {
                apply_override(root, args[++i]);
            } else {
                throw ConfigError("unknown argument '" + args[i] + "'");
            }
        }
        if (command == "gen-target") return cmd_gen_target(root);
        if (command == "pretrain") return cmd_pretrain(root);
        if (command == "caulk") return cmd_caulk(root);
        if (command == "scratch") return cmd_scratch(root);
        if (command == "rate-sweep") return cmd_rate_sweep(root);
        if (command == "depth-sweep") return cmd_depth_sweep(root);
        if (command == "m-sweep") return cmd_m_sweep(root);
        if (command == "verify") return cmd_verify(root);
        print_usage(std::cerr);
        throw ConfigError("unknown command '" + command + "'");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
}

}  // namespace caulk

#endif  // CAULK_COMMANDS_HPP
