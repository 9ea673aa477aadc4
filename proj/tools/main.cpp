// prk: generate benchmarks, train the ranking model, evaluate it, run the
// two-stage pragma search, and collate reports. Every subcommand is a thin
// layer over the pipeline functions; all randomness flows from --seed.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pragmarank/design/serialize.hpp"
#include "pragmarank/pipeline.hpp"

using nlohmann::json;
using namespace prk;

namespace {

// defaults <- config file <- dotted-key overrides ("train.lr=0.0005")
json layer_config(json defaults, const std::string& config_path,
                  const std::vector<std::string>& sets) {
    if (!config_path.empty()) defaults.merge_patch(load_json_file(config_path));
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("override must look like key.path=value: " + kv);
        std::string ptr = "/" + kv.substr(0, eq);
        for (auto& c : ptr)
            if (c == '.') c = '/';
        const std::string raw = kv.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (const json::exception&) {
            value = raw;  // bare strings need no quoting
        }
        defaults[json::json_pointer(ptr)] = std::move(value);
    }
    return defaults;
}

TrainConfig train_from(const json& j) { return TrainConfig::from_json(j.at("train")); }

ModelConfig model_from(const json& j) {
    const json& m = j.at("model");
    ModelConfig cfg;
    cfg.feat_dim = m.at("feat_dim").get<std::size_t>();
    cfg.encoder.layers = m.at("layers").get<std::size_t>();
    cfg.encoder.hidden_dim = m.at("hidden_dim").get<std::size_t>();
    cfg.encoder.layer_kind = m.at("attention_aggregate").get<bool>()
                                 ? EncoderConfig::LayerKind::AttentionAggregate
                                 : EncoderConfig::LayerKind::MeanAggregate;
    cfg.encoder.pragma_mlp_dims = m.at("pragma_mlp_dims").get<std::vector<std::size_t>>();
    return cfg;
}

json model_defaults() {
    ModelConfig d;
    return {{"feat_dim", d.feat_dim},
            {"layers", d.encoder.layers},
            {"hidden_dim", d.encoder.hidden_dim},
            {"attention_aggregate", false},
            {"pragma_mlp_dims", d.encoder.pragma_mlp_dims}};
}

int run(int argc, char** argv) {
    CLI::App app{"pragma-ranking design space exploration"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", data_dir, checkpoint, profile = "small";
    std::vector<std::string> sets, dse_results;
    std::uint64_t seed = 7, kernel_seed = 7000, init_seed = 1;
    std::size_t n_kernels = 3, samples = 200;
    std::size_t k1 = 100, k2 = 10, batch = 512, budget = 2000;
    bool stage1_only = false, random_baseline = false;

    auto common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--set", sets, "dotted-key override, e.g. train.lr=0.0005");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--out", out_dir, "output directory");
    };

    auto* gen = app.add_subcommand("gen", "generate a synthetic kernel benchmark");
    common(gen);
    gen->add_option("--kernels", n_kernels, "number of kernels");
    gen->add_option("--samples", samples, "designs sampled per kernel");
    gen->add_option("--profile", profile, "kernel size profile: small|medium");

    auto* train = app.add_subcommand("train", "train the ranking model");
    common(train);
    train->add_option("--data", data_dir, "benchmark directory from gen")->required();
    train->add_option("--init-seed", init_seed, "parameter init seed");

    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
    common(eval);
    eval->add_option("--data", data_dir, "benchmark directory")->required();
    eval->add_option("--checkpoint", checkpoint, "checkpoint.json path")->required();

    auto* dse = app.add_subcommand("dse", "two-stage search over one kernel's pragma space");
    common(dse);
    dse->add_option("--checkpoint", checkpoint, "checkpoint.json path");
    dse->add_option("--kernel-seed", kernel_seed, "kernel generator seed");
    dse->add_option("--profile", profile, "kernel size profile: small|medium");
    dse->add_option("--k1", k1, "stage-1 survivor count");
    dse->add_option("--k2", k2, "final survivor count");
    dse->add_option("--batch", batch, "comparator batch size");
    dse->add_option("--budget", budget, "candidate enumeration budget");
    dse->add_flag("--stage1-only", stage1_only, "skip pairwise elimination (ablation)");
    dse->add_flag("--random-baseline", random_baseline, "random k2 survivors, no model");

    auto* report = app.add_subcommand("report", "metrics + latency tables from prior runs");
    common(report);
    report->add_option("--data", data_dir, "benchmark directory")->required();
    report->add_option("--checkpoint", checkpoint, "checkpoint.json path")->required();
    report->add_option("--dse-result", dse_results, "dse output json (repeatable)");

    auto* sweep = app.add_subcommand("sweep-alpha", "train across the loss-weight grid");
    common(sweep);
    sweep->add_option("--data", data_dir, "benchmark directory")->required();
    sweep->add_option("--init-seed", init_seed, "parameter init seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: category=usage " << e.what() << "\n";
        return 2;
    }

    if (gen->parsed()) {
        GenOptions opts;
        json cfg = layer_config({{"seed", seed},
                                 {"n_kernels", n_kernels},
                                 {"profile", profile},
                                 {"samples_per_kernel", samples}},
                                config_path, sets);
        opts.seed = cfg.at("seed").get<std::uint64_t>();
        opts.n_kernels = cfg.at("n_kernels").get<std::size_t>();
        opts.profile = profile_parse(cfg.at("profile").get<std::string>());
        opts.samples_per_kernel = cfg.at("samples_per_kernel").get<std::size_t>();
        opts.out_dir = out_dir;
        gen_run(opts);
        std::cout << "wrote benchmark to " << out_dir << "\n";
        return 0;
    }

    if (train->parsed()) {
        TrainConfig td;
        td.seed = seed;
        json cfg = layer_config(
            {{"train", td.to_json()}, {"model", model_defaults()}, {"init_seed", init_seed}},
            config_path, sets);
        if (train->count("--seed")) cfg["train"]["seed"] = seed;
        TrainOptions opts;
        opts.data_dir = data_dir;
        opts.out_dir = out_dir;
        opts.train = train_from(cfg);
        opts.model = model_from(cfg);
        opts.init_seed = cfg.at("init_seed").get<std::uint64_t>();
        FitResult r = train_run(opts);
        std::printf("best val loss %.6f at epoch %zu; checkpoint in %s\n", r.best_val_loss,
                    r.best_epoch, out_dir.c_str());
        return 0;
    }

    if (eval->parsed()) {
        EvalOptions opts{checkpoint, data_dir, out_dir};
        EvalReport r = eval_run(opts);
        std::printf("rmse %.4f  acc_all %.4f  tau_pooled %.4f\n", r.rmse, r.acc_all.accuracy,
                    r.tau_pooled);
        return 0;
    }

    if (dse->parsed()) {
        if (stage1_only && random_baseline)
            throw ConfigError("--stage1-only and --random-baseline are mutually exclusive");
        DseRunOptions opts;
        json cfg = layer_config({{"k1", k1}, {"k2", k2}, {"batch", batch}, {"budget", budget}},
                                config_path, sets);
        opts.checkpoint = checkpoint;
        opts.kernel = {kernel_seed, profile_parse(profile)};
        opts.explore.k1 = cfg.at("k1").get<std::size_t>();
        opts.explore.k2 = cfg.at("k2").get<std::size_t>();
        opts.explore.batch = cfg.at("batch").get<std::size_t>();
        opts.explore.budget = cfg.at("budget").get<std::size_t>();
        opts.explore.seed = seed;
        opts.mode = random_baseline ? DseMode::RandomBaseline
                    : stage1_only  ? DseMode::Stage1Only
                                   : DseMode::TwoStage;
        if (opts.mode != DseMode::RandomBaseline && checkpoint.empty())
            throw ConfigError("dse needs --checkpoint unless --random-baseline");
        opts.out_dir = out_dir;
        json result = dse_run(opts);
        std::printf("%s survivors: %zu, best true latency %.2f\n", dse_mode_name(opts.mode),
                    result.at("survivors").size(),
                    result.at("best_true_latency").get<double>());
        return 0;
    }

    if (report->parsed()) {
        ReportOptions opts;
        opts.checkpoint = checkpoint;
        opts.data_dir = data_dir;
        for (const auto& p : dse_results) opts.dse_results.emplace_back(p);
        opts.out_dir = out_dir;
        opts.seed = seed;
        EvalReport r = report_run(opts);
        std::printf("rmse %.4f  acc_all %.4f  tau_pooled %.4f; report in %s\n", r.rmse,
                    r.acc_all.accuracy, r.tau_pooled, out_dir.c_str());
        return 0;
    }

    if (sweep->parsed()) {
        TrainConfig td;
        td.seed = seed;
        SweepOptions opts;
        json cfg = layer_config({{"train", td.to_json()},
                                 {"model", model_defaults()},
                                 {"init_seed", init_seed},
                                 {"alphas", opts.alphas}},
                                config_path, sets);
        if (sweep->count("--seed")) cfg["train"]["seed"] = seed;
        opts.data_dir = data_dir;
        opts.out_dir = out_dir;
        opts.train = train_from(cfg);
        opts.model = model_from(cfg);
        opts.init_seed = cfg.at("init_seed").get<std::uint64_t>();
        opts.alphas = cfg.at("alphas").get<std::vector<double>>();
        auto rows = sweep_alpha_run(opts);
        std::printf("swept %zu alpha values; table in %s\n", rows.size(), out_dir.c_str());
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const IoError& e) {
        std::cerr << "error: category=io " << e.what() << "\n";
        return 3;
    } catch (const SchemaError& e) {
        std::cerr << "error: category=schema " << e.what() << "\n";
        return 4;
    } catch (const ConfigError& e) {
        std::cerr << "error: category=config " << e.what() << "\n";
        return 5;
    } catch (const ValidityError& e) {
        std::cerr << "error: category=validity " << e.what() << "\n";
        return 5;
    } catch (const ContractError& e) {
        std::cerr << "error: category=contract " << e.what() << "\n";
        return 5;
    } catch (const DimensionError& e) {
        std::cerr << "error: category=dimension " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: category=internal " << e.what() << "\n";
        return 6;
    }
}
