#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "pragmarank/model/model.hpp"
#include "pragmarank/surrogate/surrogate.hpp"

namespace prk {

struct TrainConfig {
    std::size_t epochs = 200;     // desk-scale default; 1600 at full scale
    std::size_t batch_size = 32;  // pairs per optimizer step; 128 at full scale
    double lr = 0.001;
    double alpha = 1.0;
    std::uint64_t seed = 0;
    std::size_t pairs_per_kernel_per_epoch = 64;
    double weight_decay = 0.01;

    void validate() const;
    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);
};

struct PairSample {
    const DatasetRecord* first;
    const DatasetRecord* second;
};

// Uniform same-kernel pairs without replacement, at most `budget_per_kernel`
// per kernel. Kernels with fewer than two records in the split are skipped.
std::vector<PairSample> sample_pairs(const Dataset& ds, Split split,
                                     std::size_t budget_per_kernel, std::uint64_t seed);

// Half-cosine decay from lr0 at step 0 to 0 at total_steps.
double cosine_lr(std::size_t step, std::size_t total_steps, double lr0);

// Adam with decoupled weight decay. Moment state is keyed by parameter
// creation order.
class AdamW {
public:
    AdamW(std::vector<Parameter*> params, double weight_decay);
    void step(double lr);

private:
    std::vector<Parameter*> params_;
    std::vector<Tensor> m_, v_;
    double weight_decay_;
    std::size_t t_ = 0;
    static constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
};

struct EpochLoss {
    double total = 0.0, point = 0.0, pair = 0.0;
};

// One pass over the epoch's sampled pairs: one optimizer update per batch,
// cosine-scheduled lr at the running global step. Returns epoch means.
EpochLoss train_epoch(RankModel& model, std::span<const PairSample> pairs,
                      const TrainConfig& cfg, AdamW& optimizer, std::size_t& global_step,
                      std::size_t total_steps);

// Forward-only mean hybrid loss.
EpochLoss eval_pairs(RankModel& model, std::span<const PairSample> pairs, double alpha);

struct FitResult {
    nlohmann::json checkpoint;  // best-validation-loss parameters
    std::vector<EpochLoss> curve;
    std::size_t best_epoch = 0;  // 1-based
    double best_val_loss = 0.0;
};

FitResult fit(RankModel& model, const Dataset& ds, const TrainConfig& cfg);

// CSV: epoch,total,point,pair, one row per epoch.
void write_loss_curve(const std::filesystem::path& path, const std::vector<EpochLoss>& curve);
std::vector<EpochLoss> read_loss_curve(const std::filesystem::path& path);

}  // namespace prk
