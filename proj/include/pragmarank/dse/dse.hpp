#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "pragmarank/model/model.hpp"
#include "pragmarank/surrogate/surrogate.hpp"

namespace prk {

// Upper-triangular win-probability matrix over candidates: entry (i, j)
// with i < j is P(candidate i outperforms candidate j).
class ScoreMatrix {
public:
    explicit ScoreMatrix(std::size_t size);

    std::size_t size() const { return size_; }
    void set(std::size_t i, std::size_t j, double p);
    double get(std::size_t i, std::size_t j) const;
    // win credit of a against b for any a ≠ b
    double credit(std::size_t a, std::size_t b) const;

private:
    std::size_t size_;
    std::vector<double> upper_;  // packed i<j
    std::size_t offset(std::size_t i, std::size_t j) const;
};

struct ScoredConfig {
    PragmaConfig config;
    double predicted = 0.0;
};

struct EliminationRound {
    std::vector<double> points;   // aligned with the round's remaining list
    std::size_t eliminated = 0;   // index into the original candidate list
};

struct DseResult {
    std::vector<ScoredConfig> survivors;
    std::vector<ScoredConfig> stage1_ranking;  // full pruned list, best first
    std::vector<EliminationRound> elimination_trace;
    std::size_t comparator_calls = 0;
    bool stage1_only = false;
};

// Pointwise scoring and pruning: descending predicted performance, ties
// broken by lexicographic config order, truncated to k1.
std::vector<ScoredConfig> stage1_prune(const std::vector<PragmaConfig>& candidates,
                                       RankModel& model,
                                       const std::shared_ptr<const KernelTemplate>& tmpl,
                                       std::size_t k1);

// All-pairs comparator probabilities, evaluated in batches of `batch`.
// Exactly K₁(K₁−1)/2 comparator calls; comparator_calls is incremented.
ScoreMatrix score_matrix(const std::vector<ScoredConfig>& designs, RankModel& model,
                         const std::shared_ptr<const KernelTemplate>& tmpl, std::size_t batch,
                         std::size_t& comparator_calls);

// Iterated elimination of the lowest-point candidate until k2 remain.
// Ties remove exactly one design, the one with lexicographically largest
// config. Points and the eliminated design are recorded per round.
DseResult rcv_eliminate(const ScoreMatrix& scores, const std::vector<ScoredConfig>& designs,
                        std::size_t k2);

struct ExploreOptions {
    std::size_t k1 = 100;
    std::size_t k2 = 10;
    std::size_t batch = 512;
    std::size_t budget = 2000;  // max candidates drawn from the valid space
    std::uint64_t seed = 0;     // used only when the space exceeds budget
    bool stage1_only = false;
};

DseResult explore(const GeneratedKernel& kernel, RankModel& model, const ExploreOptions& opts);

nlohmann::json dse_result_to_json(const DseResult& r, const GeneratedKernel& kernel,
                                  const ExploreOptions& opts);

}  // namespace prk
