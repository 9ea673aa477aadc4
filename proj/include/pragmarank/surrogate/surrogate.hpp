#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pragmarank/design/graph.hpp"

namespace prk {

enum class SizeProfile { Small, Medium };

const char* profile_name(SizeProfile p);
SizeProfile profile_parse(const std::string& s);

// Deterministic stand-in for a synthesis tool: latency is a product of a
// base cycle count, one monotone response per slot, and bounded pairwise
// interaction multipliers.
class SurrogateOracle {
public:
    struct SlotEffect {
        std::string slot_id;
        PragmaKind kind = PragmaKind::UnrollFactor;
        std::int64_t neutral = 1;   // minimum legal value, response 1 there
        std::int64_t max_value = 1;
        double strength = 0.0;      // exponent for unroll/tile, gain for pipeline
    };
    struct Interaction {
        std::string slot_a, slot_b;
        double coupling = 0.0;  // multiplier exp(coupling·u_a·u_b), clamped to [0.5, 2]
    };

    SurrogateOracle(std::string kernel_id, double base_latency, std::vector<SlotEffect> effects,
                    std::vector<Interaction> interactions, const PragmaSpace& space);

    double latency(const PragmaConfig& config) const;
    double base_latency() const { return base_latency_; }
    const std::string& kernel_id() const { return kernel_id_; }
    const std::vector<Interaction>& interactions() const { return interactions_; }
    const std::vector<SlotEffect>& slot_effects() const { return effects_; }

private:
    double normalized_level(const SlotEffect& e, std::int64_t v) const;

    std::string kernel_id_;
    double base_latency_ = 1.0;
    std::vector<SlotEffect> effects_;
    std::vector<Interaction> interactions_;
    const PragmaSpace* space_ = nullptr;  // owned by the kernel template
};

// y = ln(base / latency): 0 at base, larger is better.
double performance(double latency, double base);

struct GeneratedKernel {
    std::shared_ptr<const KernelTemplate> tmpl;
    std::shared_ptr<const SurrogateOracle> oracle;
};

// Deterministic in (seed, profile). Small: 20–60 nodes, 3–5 slots;
// medium: 60–200 nodes, 5–8 slots. Every kernel gets at least one
// interaction term.
GeneratedKernel gen_kernel(std::uint64_t seed, SizeProfile profile);

enum class Split { Train, Val, Test };
const char* split_name(Split s);
Split split_parse(const std::string& s);

struct DatasetRecord {
    DesignGraph graph;
    double latency = 0.0;
    double y = 0.0;
    Split split = Split::Train;
};

struct Dataset {
    std::vector<DatasetRecord> records;

    std::vector<std::string> kernel_ids() const;
    std::vector<const DatasetRecord*> of(const std::string& kernel_id, Split split) const;
    std::vector<const DatasetRecord*> of_split(Split split) const;
};

struct SplitFractions {
    double train = 0.9034, val = 0.0483, test = 0.0483;
};

// Uniform sampling without replacement from each kernel's valid space
// (entire space if small), split per kernel by the given fractions.
// Enumeration of very large spaces is capped at enumeration_cap configs.
Dataset build_dataset(const std::vector<GeneratedKernel>& kernels,
                      std::size_t samples_per_kernel, const SplitFractions& fracs,
                      std::uint64_t seed, std::size_t enumeration_cap = 200000);

// JSON Lines: one (kernel_id, config, latency, y, split) record per line.
void save_dataset_jsonl(const std::filesystem::path& path, const Dataset& ds);
Dataset load_dataset_jsonl(const std::filesystem::path& path,
                           const std::map<std::string, GeneratedKernel>& kernels);

}  // namespace prk
