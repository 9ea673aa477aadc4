#include "pragmarank/pipeline.hpp"

#include <algorithm>
#include <random>

#include "pragmarank/design/serialize.hpp"
#include "pragmarank/model/checkpoint.hpp"
#include "pragmarank/util/hash.hpp"

namespace prk {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<KernelSpec> GenOptions::kernel_specs() const {
    std::vector<KernelSpec> specs;
    for (std::size_t i = 0; i < n_kernels; ++i)
        specs.push_back({seed * 1000 + i, profile});
    return specs;
}

void gen_run(const GenOptions& opts) {
    fs::create_directories(opts.out_dir / "templates");

    std::vector<GeneratedKernel> kernels;
    json manifest_kernels = json::array();
    for (const auto& spec : opts.kernel_specs()) {
        GeneratedKernel k = gen_kernel(spec.seed, spec.profile);
        save_json_file(opts.out_dir / "templates" / (k.tmpl->kernel_id + ".json"),
                       template_to_json(*k.tmpl));
        manifest_kernels.push_back(
            {{"seed", spec.seed}, {"profile", profile_name(spec.profile)}});
        kernels.push_back(std::move(k));
    }

    Dataset ds = build_dataset(kernels, opts.samples_per_kernel, opts.fracs, opts.seed);
    save_dataset_jsonl(opts.out_dir / "dataset.jsonl", ds);

    json manifest = {{"schema_version", kSchemaVersion},
                     {"kernels", manifest_kernels},
                     {"dataset_seed", opts.seed},
                     {"samples_per_kernel", opts.samples_per_kernel},
                     {"split_fractions", {opts.fracs.train, opts.fracs.val, opts.fracs.test}}};
    save_json_file(opts.out_dir / "manifest.json", manifest);

    std::vector<fs::path> artifacts = {opts.out_dir / "manifest.json",
                                       opts.out_dir / "dataset.jsonl"};
    for (const auto& k : kernels)
        artifacts.push_back(opts.out_dir / "templates" / (k.tmpl->kernel_id + ".json"));
    write_run_manifest(opts.out_dir, "gen",
                       {{"seed", opts.seed},
                        {"n_kernels", opts.n_kernels},
                        {"profile", profile_name(opts.profile)},
                        {"samples_per_kernel", opts.samples_per_kernel}},
                       artifacts);
}

LoadedBenchmark load_benchmark(const fs::path& dir) {
    json manifest = load_json_file(dir / "manifest.json");
    check_schema_version(manifest, "benchmark manifest");

    LoadedBenchmark bench;
    for (const auto& kj : manifest.at("kernels")) {
        GeneratedKernel k = gen_kernel(kj.at("seed").get<std::uint64_t>(),
                                       profile_parse(kj.at("profile").get<std::string>()));
        bench.by_id[k.tmpl->kernel_id] = k;
        bench.kernels.push_back(std::move(k));
    }
    bench.dataset = load_dataset_jsonl(dir / "dataset.jsonl", bench.by_id);
    return bench;
}

FitResult train_run(const TrainOptions& opts) {
    fs::create_directories(opts.out_dir);
    LoadedBenchmark bench = load_benchmark(opts.data_dir);

    opts.model.encoder.validate();
    RankModel model(opts.model, opts.init_seed);
    FitResult result = fit(model, bench.dataset, opts.train);

    save_json_file(opts.out_dir / "checkpoint.json", result.checkpoint);
    write_loss_curve(opts.out_dir / "loss_curve.csv", result.curve);
    write_run_manifest(opts.out_dir, "train",
                       {{"data_dir", opts.data_dir.string()},
                        {"train", opts.train.to_json()},
                        {"model", model_config_to_json(opts.model)},
                        {"init_seed", opts.init_seed}},
                       {opts.out_dir / "checkpoint.json", opts.out_dir / "loss_curve.csv"});
    return result;
}

EvalReport eval_run(const EvalOptions& opts) {
    fs::create_directories(opts.out_dir);
    LoadedBenchmark bench = load_benchmark(opts.data_dir);
    RankModel model = load_checkpoint(opts.checkpoint);

    EvalReport report = evaluate(model, bench.dataset, Split::Test);
    write_metrics_csv(opts.out_dir / "metrics.csv", report);
    json rj = report_to_json(report);
    rj["checkpoint_hash"] = file_hash_hex(opts.checkpoint.string());
    save_json_file(opts.out_dir / "report.json", rj);
    write_run_manifest(opts.out_dir, "eval",
                       {{"checkpoint", opts.checkpoint.string()},
                        {"data_dir", opts.data_dir.string()}},
                       {opts.out_dir / "metrics.csv", opts.out_dir / "report.json"});
    return report;
}

const char* dse_mode_name(DseMode m) {
    switch (m) {
        case DseMode::TwoStage: return "two-stage";
        case DseMode::Stage1Only: return "stage1-only";
        case DseMode::RandomBaseline: return "random";
    }
    return "two-stage";
}

std::vector<ScoredConfig> random_survivors(const GeneratedKernel& kernel, std::size_t k2,
                                           std::size_t budget, std::uint64_t seed) {
    auto candidates = enumerate_valid(kernel.tmpl->pragma_space, budget);
    std::mt19937_64 rng(fnv1a(kernel.tmpl->kernel_id, seed ^ 0x7a4dull));
    std::shuffle(candidates.begin(), candidates.end(), rng);
    if (candidates.size() > k2) candidates.resize(k2);
    std::vector<ScoredConfig> out;
    for (auto& c : candidates) out.push_back({std::move(c), 0.0});
    return out;
}

json dse_run(const DseRunOptions& opts) {
    fs::create_directories(opts.out_dir);
    GeneratedKernel kernel = gen_kernel(opts.kernel.seed, opts.kernel.profile);

    json result;
    if (opts.mode == DseMode::RandomBaseline) {
        auto survivors =
            random_survivors(kernel, opts.explore.k2, opts.explore.budget, opts.explore.seed);
        DseResult r;
        r.survivors = std::move(survivors);
        r.stage1_only = false;
        result = dse_result_to_json(r, kernel, opts.explore);
    } else {
        RankModel model = load_checkpoint(opts.checkpoint);
        ExploreOptions eo = opts.explore;
        eo.stage1_only = opts.mode == DseMode::Stage1Only;
        result = dse_result_to_json(explore(kernel, model, eo), kernel, eo);
    }
    result["mode"] = dse_mode_name(opts.mode);

    const fs::path out = opts.out_dir / ("dse_" + kernel.tmpl->kernel_id + "_" +
                                         dse_mode_name(opts.mode) + ".json");
    save_json_file(out, result);
    write_run_manifest(opts.out_dir, "dse",
                       {{"checkpoint", opts.checkpoint.string()},
                        {"kernel_seed", opts.kernel.seed},
                        {"profile", profile_name(opts.kernel.profile)},
                        {"k1", opts.explore.k1},
                        {"k2", opts.explore.k2},
                        {"batch", opts.explore.batch},
                        {"budget", opts.explore.budget},
                        {"mode", dse_mode_name(opts.mode)}},
                       {out});
    return result;
}

EvalReport report_run(const ReportOptions& opts) {
    fs::create_directories(opts.out_dir);
    LoadedBenchmark bench = load_benchmark(opts.data_dir);
    RankModel model = load_checkpoint(opts.checkpoint);

    EvalReport report = evaluate(model, bench.dataset, Split::Test);
    write_metrics_csv(opts.out_dir / "metrics.csv", report);

    // collate DSE results by kernel; absent modes stay at 0 and are
    // filtered out of the latency table
    std::map<std::string, DseLatencyRow> rows;
    for (const auto& path : opts.dse_results) {
        json j = load_json_file(path);
        check_schema_version(j, "dse result");
        const auto kernel = j.at("kernel").get<std::string>();
        const auto mode = j.at("mode").get<std::string>();
        const double best = j.at("best_true_latency").get<double>();
        auto& row = rows[kernel];
        row.kernel = kernel;
        if (mode == "two-stage")
            row.two_stage = best;
        else if (mode == "stage1-only")
            row.stage1_only = best;
        else if (mode == "random")
            row.random_baseline = best;
    }
    std::vector<DseLatencyRow> complete;
    for (auto& [k, row] : rows)
        if (row.two_stage > 0 && row.stage1_only > 0 && row.random_baseline > 0)
            complete.push_back(row);
    std::vector<fs::path> artifacts = {opts.out_dir / "metrics.csv", opts.out_dir / "report.json"};
    if (!complete.empty()) {
        write_dse_latency_csv(opts.out_dir / "dse_latency.csv", complete);
        artifacts.push_back(opts.out_dir / "dse_latency.csv");
    }

    json rj = report_to_json(report);
    rj["seed"] = opts.seed;
    rj["checkpoint_hash"] = file_hash_hex(opts.checkpoint.string());
    save_json_file(opts.out_dir / "report.json", rj);

    write_run_manifest(opts.out_dir, "report",
                       {{"checkpoint", opts.checkpoint.string()},
                        {"data_dir", opts.data_dir.string()},
                        {"seed", opts.seed}},
                       artifacts);
    return report;
}

std::vector<AlphaSweepRow> sweep_alpha_run(const SweepOptions& opts) {
    fs::create_directories(opts.out_dir);
    LoadedBenchmark bench = load_benchmark(opts.data_dir);

    std::vector<AlphaSweepRow> rows;
    std::vector<fs::path> artifacts;
    for (double alpha : opts.alphas) {
        TrainConfig cfg = opts.train;
        cfg.alpha = alpha;
        RankModel model(opts.model, opts.init_seed);
        FitResult result = fit(model, bench.dataset, cfg);

        char tag[32];
        std::snprintf(tag, sizeof(tag), "%g", alpha);
        const fs::path ckpt = opts.out_dir / (std::string("checkpoint_alpha_") + tag + ".json");
        save_json_file(ckpt, result.checkpoint);
        artifacts.push_back(ckpt);

        RankModel best = checkpoint_from_json(result.checkpoint);
        EvalReport report = evaluate(best, bench.dataset, Split::Test);
        rows.push_back({alpha, report.rmse, report.acc_all.accuracy, report.tau_pooled});
    }
    write_alpha_sweep_csv(opts.out_dir / "alpha_sweep.csv", rows);
    artifacts.push_back(opts.out_dir / "alpha_sweep.csv");
    write_run_manifest(opts.out_dir, "sweep-alpha",
                       {{"data_dir", opts.data_dir.string()},
                        {"train", opts.train.to_json()},
                        {"model", model_config_to_json(opts.model)},
                        {"alphas", opts.alphas}},
                       artifacts);
    return rows;
}

void write_run_manifest(const fs::path& out_dir, const std::string& command,
                        const json& resolved_config,
                        const std::vector<fs::path>& artifacts) {
    json hashes = json::object();
    for (const auto& a : artifacts) hashes[a.filename().string()] = file_hash_hex(a.string());
    save_json_file(out_dir / "run_manifest.json",
                   {{"schema_version", kSchemaVersion},
                    {"command", command},
                    {"config", resolved_config},
                    {"artifacts", hashes}});
}

}  // namespace prk
