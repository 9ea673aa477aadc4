#include "pragmarank/dse/dse.hpp"

#include <algorithm>
#include <iostream>
#include <random>

#include "pragmarank/design/serialize.hpp"
#include "pragmarank/util/hash.hpp"

namespace prk {

using nlohmann::json;

ScoreMatrix::ScoreMatrix(std::size_t size) : size_(size) {
    if (size < 2) throw ContractError("ScoreMatrix: need at least 2 candidates");
    upper_.assign(size * (size - 1) / 2, 0.0);
}

std::size_t ScoreMatrix::offset(std::size_t i, std::size_t j) const {
    if (i >= j || j >= size_) throw ContractError("ScoreMatrix: need i < j < size");
    // row i starts after the triangle above it
    return i * size_ - i * (i + 1) / 2 + (j - i - 1);
}

void ScoreMatrix::set(std::size_t i, std::size_t j, double p) {
    if (p < 0.0 || p > 1.0) throw ContractError("ScoreMatrix: probability out of [0,1]");
    upper_[offset(i, j)] = p;
}

double ScoreMatrix::get(std::size_t i, std::size_t j) const { return upper_[offset(i, j)]; }

double ScoreMatrix::credit(std::size_t a, std::size_t b) const {
    return a < b ? get(a, b) : 1.0 - get(b, a);
}

std::vector<ScoredConfig> stage1_prune(const std::vector<PragmaConfig>& candidates,
                                       RankModel& model,
                                       const std::shared_ptr<const KernelTemplate>& tmpl,
                                       std::size_t k1) {
    if (candidates.empty()) throw ContractError("stage1_prune: no candidates");
    if (k1 == 0) throw ContractError("stage1_prune: k1 must be positive");

    std::vector<ScoredConfig> scored;
    scored.reserve(candidates.size());
    for (const auto& cfg : candidates)
        scored.push_back({cfg, model.predict_point(instantiate(tmpl, cfg))});

    std::sort(scored.begin(), scored.end(), [](const ScoredConfig& a, const ScoredConfig& b) {
        if (a.predicted != b.predicted) return a.predicted > b.predicted;
        return a.config < b.config;
    });
    if (scored.size() > k1) scored.resize(k1);
    return scored;
}

ScoreMatrix score_matrix(const std::vector<ScoredConfig>& designs, RankModel& model,
                         const std::shared_ptr<const KernelTemplate>& tmpl, std::size_t batch,
                         std::size_t& comparator_calls) {
    const std::size_t k = designs.size();
    if (k < 2) throw ContractError("score_matrix: need at least 2 designs");
    if (batch == 0) throw ContractError("score_matrix: batch must be positive");

    std::vector<DesignGraph> graphs;
    graphs.reserve(k);
    for (const auto& d : designs) graphs.push_back(instantiate(tmpl, d.config));

    std::vector<std::pair<std::size_t, std::size_t>> pending;
    pending.reserve(k * (k - 1) / 2);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) pending.emplace_back(i, j);

    ScoreMatrix scores(k);
    for (std::size_t start = 0; start < pending.size(); start += batch) {
        const std::size_t end = std::min(start + batch, pending.size());
        for (std::size_t p = start; p < end; ++p) {
            const auto [i, j] = pending[p];
            scores.set(i, j, model.pair_probability(graphs[i], graphs[j]));
            ++comparator_calls;
        }
    }
    return scores;
}

DseResult rcv_eliminate(const ScoreMatrix& scores, const std::vector<ScoredConfig>& designs,
                        std::size_t k2) {
    if (k2 < 1 || k2 > designs.size())
        throw ContractError("rcv_eliminate: k2 out of range [1, " +
                            std::to_string(designs.size()) + "]");
    if (scores.size() != designs.size())
        throw ContractError("rcv_eliminate: score matrix size mismatch");

    DseResult result;
    std::vector<std::size_t> remain(designs.size());
    for (std::size_t i = 0; i < remain.size(); ++i) remain[i] = i;

    while (remain.size() > k2) {
        std::vector<double> points(remain.size(), 0.0);
        for (std::size_t a = 0; a < remain.size(); ++a)
            for (std::size_t b = a + 1; b < remain.size(); ++b) {
                const double p = scores.get(remain[a], remain[b]);
                points[a] += p;
                points[b] += 1.0 - p;
            }

        const double min_points = *std::min_element(points.begin(), points.end());
        // among point-minimal designs, drop the lexicographically largest config
        std::size_t drop = remain.size();
        for (std::size_t a = 0; a < remain.size(); ++a) {
            if (points[a] != min_points) continue;
            if (drop == remain.size() ||
                designs[remain[drop]].config < designs[remain[a]].config)
                drop = a;
        }

        result.elimination_trace.push_back({points, remain[drop]});
        remain.erase(remain.begin() + static_cast<std::ptrdiff_t>(drop));
    }

    for (std::size_t idx : remain) result.survivors.push_back(designs[idx]);
    return result;
}

DseResult explore(const GeneratedKernel& kernel, RankModel& model, const ExploreOptions& opts) {
    if (opts.k2 > opts.k1) throw ContractError("explore: k2 must not exceed k1");

    auto candidates = enumerate_valid(kernel.tmpl->pragma_space, opts.budget + 1);
    if (candidates.size() > opts.budget) {
        // space larger than the count budget: seeded uniform sample
        candidates = enumerate_valid(kernel.tmpl->pragma_space);
        std::mt19937_64 rng(fnv1a(kernel.tmpl->kernel_id, opts.seed ^ 0xd5eull));
        std::shuffle(candidates.begin(), candidates.end(), rng);
        candidates.resize(opts.budget);
    }

    if (candidates.size() < opts.k2)
        std::cerr << "warning: valid space of " << kernel.tmpl->kernel_id << " has only "
                  << candidates.size() << " configs, returning all\n";

    auto ranked = stage1_prune(candidates, model, kernel.tmpl, opts.k1);

    DseResult result;
    if (opts.stage1_only || ranked.size() <= opts.k2) {
        result.survivors.assign(ranked.begin(),
                                ranked.begin() + static_cast<std::ptrdiff_t>(
                                                     std::min(opts.k2, ranked.size())));
        result.stage1_only = true;
    } else {
        ScoreMatrix scores =
            score_matrix(ranked, model, kernel.tmpl, opts.batch, result.comparator_calls);
        DseResult rcv = rcv_eliminate(scores, ranked, opts.k2);
        result.survivors = std::move(rcv.survivors);
        result.elimination_trace = std::move(rcv.elimination_trace);
    }
    result.stage1_ranking = std::move(ranked);
    return result;
}

json dse_result_to_json(const DseResult& r, const GeneratedKernel& kernel,
                        const ExploreOptions& opts) {
    json survivors = json::array();
    for (const auto& s : r.survivors) {
        const double lat = kernel.oracle->latency(s.config);
        survivors.push_back({{"config", config_to_json(s.config)},
                             {"predicted", s.predicted},
                             {"true_latency", lat},
                             {"true_y", performance(lat, kernel.oracle->base_latency())}});
    }
    json ranking = json::array();
    for (const auto& s : r.stage1_ranking)
        ranking.push_back({{"config", config_to_json(s.config)}, {"predicted", s.predicted}});
    json trace = json::array();
    for (const auto& round : r.elimination_trace)
        trace.push_back({{"points", round.points}, {"eliminated", round.eliminated}});

    double best_latency = std::numeric_limits<double>::infinity();
    for (const auto& s : survivors) best_latency = std::min(best_latency, s.at("true_latency").get<double>());

    return {{"schema_version", kSchemaVersion},
            {"kernel", kernel.tmpl->kernel_id},
            {"k1", opts.k1},
            {"k2", opts.k2},
            {"batch", opts.batch},
            {"budget", opts.budget},
            {"stage1_only", r.stage1_only},
            {"survivors", std::move(survivors)},
            {"stage1_ranking", std::move(ranking)},
            {"elimination_trace", std::move(trace)},
            {"comparator_calls", r.comparator_calls},
            {"best_true_latency", best_latency}};
}

}  // namespace prk
