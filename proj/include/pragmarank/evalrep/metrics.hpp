#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pragmarank/model/model.hpp"
#include "pragmarank/surrogate/surrogate.hpp"

namespace prk {

double rmse(std::span<const double> predicted, std::span<const double> truth);

// Kendall's τ_b by exhaustive pair enumeration, tie-adjusted:
// (C − D) / sqrt((C+D+Tx)(C+D+Ty)).
double kendall_tau(std::span<const double> predicted, std::span<const double> truth);

struct BucketAccuracy {
    double accuracy = 0.0;
    std::size_t count = 0;
};

struct EvalReport {
    double rmse = 0.0;
    std::size_t rmse_count = 0;
    std::map<std::size_t, BucketAccuracy> acc_by_degree;  // degrees 1, 2, 3
    BucketAccuracy acc_all;                               // every degree
    std::map<std::string, double> tau_per_kernel;
    double tau_pooled = 0.0;       // over all test designs jointly
    double tau_kernel_mean = 0.0;  // mean of per-kernel values
};

// Pointwise RMSE over the test split, pairwise accuracy over every
// same-kernel unordered test pair (decision rule: p > 0.5 predicts the
// first design; ties predict the second), and Kendall's τ between predicted
// and true performance.
EvalReport evaluate(RankModel& model, const Dataset& ds, Split split = Split::Test);

nlohmann::json report_to_json(const EvalReport& r);
void write_metrics_csv(const std::filesystem::path& path, const EvalReport& r);

struct DseLatencyRow {
    std::string kernel;
    double two_stage = 0.0;
    double stage1_only = 0.0;
    double random_baseline = 0.0;
};

// Per-kernel best true latencies plus geometric-mean summary rows.
void write_dse_latency_csv(const std::filesystem::path& path,
                           const std::vector<DseLatencyRow>& rows);
double geometric_mean(std::span<const double> xs);

struct AlphaSweepRow {
    double alpha = 0.0;
    double rmse = 0.0;
    double acc_all = 0.0;
    double tau_pooled = 0.0;
};

void write_alpha_sweep_csv(const std::filesystem::path& path,
                           const std::vector<AlphaSweepRow>& rows);

}  // namespace prk
