#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "pragmarank/dse/dse.hpp"
#include "pragmarank/evalrep/metrics.hpp"
#include "pragmarank/train/trainer.hpp"

namespace prk {

// End-to-end run steps. The CLI is a thin wrapper over these, and the
// acceptance suite drives them directly; every artifact they write is
// deterministic in the options.

struct KernelSpec {
    std::uint64_t seed = 0;
    SizeProfile profile = SizeProfile::Small;
};

struct GenOptions {
    std::uint64_t seed = 7;
    std::size_t n_kernels = 3;
    SizeProfile profile = SizeProfile::Small;
    std::size_t samples_per_kernel = 200;
    SplitFractions fracs;
    std::filesystem::path out_dir;

    // kernel seeds derived from the run seed unless given explicitly
    std::vector<KernelSpec> kernel_specs() const;
};

void gen_run(const GenOptions& opts);

struct LoadedBenchmark {
    std::vector<GeneratedKernel> kernels;
    std::map<std::string, GeneratedKernel> by_id;
    Dataset dataset;
};

LoadedBenchmark load_benchmark(const std::filesystem::path& dir);

struct TrainOptions {
    std::filesystem::path data_dir;
    std::filesystem::path out_dir;
    TrainConfig train;
    ModelConfig model;
    std::uint64_t init_seed = 1;
};

FitResult train_run(const TrainOptions& opts);

struct EvalOptions {
    std::filesystem::path checkpoint;
    std::filesystem::path data_dir;
    std::filesystem::path out_dir;
};

EvalReport eval_run(const EvalOptions& opts);

enum class DseMode { TwoStage, Stage1Only, RandomBaseline };
const char* dse_mode_name(DseMode m);

struct DseRunOptions {
    std::filesystem::path checkpoint;
    KernelSpec kernel;
    ExploreOptions explore;
    DseMode mode = DseMode::TwoStage;
    std::filesystem::path out_dir;
};

nlohmann::json dse_run(const DseRunOptions& opts);

// k2 uniformly random valid configs; the baseline a learned search must beat.
std::vector<ScoredConfig> random_survivors(const GeneratedKernel& kernel, std::size_t k2,
                                           std::size_t budget, std::uint64_t seed);

struct ReportOptions {
    std::filesystem::path checkpoint;
    std::filesystem::path data_dir;
    std::vector<std::filesystem::path> dse_results;
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
};

EvalReport report_run(const ReportOptions& opts);

struct SweepOptions {
    std::filesystem::path data_dir;
    std::filesystem::path out_dir;
    TrainConfig train;
    ModelConfig model;
    std::uint64_t init_seed = 1;
    std::vector<double> alphas = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
};

std::vector<AlphaSweepRow> sweep_alpha_run(const SweepOptions& opts);

// Writes run_manifest.json: resolved config, seeds, and a hash per artifact.
void write_run_manifest(const std::filesystem::path& out_dir, const std::string& command,
                        const nlohmann::json& resolved_config,
                        const std::vector<std::filesystem::path>& artifacts);

}  // namespace prk
