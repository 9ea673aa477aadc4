#include "pragmarank/surrogate/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>

#include <json.hpp>

#include "pragmarank/design/serialize.hpp"
#include "pragmarank/util/hash.hpp"

namespace prk {

using nlohmann::json;

const char* profile_name(SizeProfile p) { return p == SizeProfile::Small ? "small" : "medium"; }

SizeProfile profile_parse(const std::string& s) {
    if (s == "small") return SizeProfile::Small;
    if (s == "medium") return SizeProfile::Medium;
    throw ConfigError("unknown size profile: " + s);
}

const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "train";
}

Split split_parse(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Val;
    if (s == "test") return Split::Test;
    throw SchemaError("unknown split: " + s);
}

SurrogateOracle::SurrogateOracle(std::string kernel_id, double base_latency,
                                 std::vector<SlotEffect> effects,
                                 std::vector<Interaction> interactions, const PragmaSpace& space)
    : kernel_id_(std::move(kernel_id)), base_latency_(base_latency),
      effects_(std::move(effects)), interactions_(std::move(interactions)), space_(&space) {
    if (base_latency_ <= 0.0) throw ContractError("oracle: base latency must be positive");
}

double SurrogateOracle::normalized_level(const SlotEffect& e, std::int64_t v) const {
    if (e.max_value <= e.neutral) return 0.0;
    if (e.kind == PragmaKind::PipelineToggle)
        return static_cast<double>(v - e.neutral) / static_cast<double>(e.max_value - e.neutral);
    return std::log2(static_cast<double>(v) / static_cast<double>(e.neutral)) /
           std::log2(static_cast<double>(e.max_value) / static_cast<double>(e.neutral));
}

double SurrogateOracle::latency(const PragmaConfig& config) const {
    space_->require_valid(config);
    double lat = base_latency_;
    for (const auto& e : effects_) {
        const std::int64_t v = config.get(e.slot_id);
        if (e.kind == PragmaKind::PipelineToggle) {
            if (v != e.neutral) lat *= e.strength;  // gain in (0,1]
        } else {
            lat *= std::pow(static_cast<double>(v) / static_cast<double>(e.neutral), -e.strength);
        }
    }
    for (const auto& it : interactions_) {
        const SlotEffect* ea = nullptr;
        const SlotEffect* eb = nullptr;
        for (const auto& e : effects_) {
            if (e.slot_id == it.slot_a) ea = &e;
            if (e.slot_id == it.slot_b) eb = &e;
        }
        const double ua = normalized_level(*ea, config.get(it.slot_a));
        const double ub = normalized_level(*eb, config.get(it.slot_b));
        lat *= std::clamp(std::exp(it.coupling * ua * ub), 0.5, 2.0);
    }
    return lat;
}

double performance(double latency, double base) {
    if (latency <= 0.0 || base <= 0.0)
        throw ContractError("performance: latency and base must be positive");
    return std::log(base / latency);
}

GeneratedKernel gen_kernel(std::uint64_t seed, SizeProfile profile) {
    std::mt19937_64 rng(fnv1a(profile_name(profile), seed ^ 0x9e3779b97f4a7c15ull));
    auto uniform_int = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    auto uniform_real = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };

    const bool small = profile == SizeProfile::Small;
    const std::size_t n_slots = static_cast<std::size_t>(small ? uniform_int(3, 5) : uniform_int(5, 8));
    const std::size_t total_lo = small ? 20 : 60;
    const std::size_t total_hi = small ? 60 : 200;
    const std::size_t n_prog = static_cast<std::size_t>(
        uniform_int(static_cast<std::int64_t>(total_lo - n_slots),
                    static_cast<std::int64_t>(total_hi - n_slots)));
    const std::size_t n_nodes = n_prog + n_slots;
    constexpr std::size_t kFeatDim = 8;

    auto t = std::make_shared<KernelTemplate>();
    t->kernel_id = std::string("k") + std::to_string(seed) + (small ? "s" : "m");
    t->node_features = Tensor(n_nodes, kFeatDim);

    auto fill_node = [&](std::size_t idx, NodeKind kind) {
        t->node_kinds.push_back(kind);
        t->node_features.at(idx, static_cast<std::size_t>(kind)) = 1.0;
        for (std::size_t c = 4; c < kFeatDim; ++c)
            t->node_features.at(idx, c) = uniform_real(0.0, 1.0);
    };

    for (std::size_t i = 0; i < n_prog; ++i) {
        const auto roll = uniform_int(0, 9);
        fill_node(i, roll < 5 ? NodeKind::Op : roll < 8 ? NodeKind::Memory : NodeKind::Control);
    }
    // a connected backbone plus some extra control edges
    for (std::size_t i = 1; i < n_prog; ++i)
        t->edges.push_back({static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1)),
                            i, EdgeKind::Data});
    for (std::size_t e = 0; e < n_prog / 2; ++e) {
        const auto a = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n_prog) - 1));
        const auto b = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n_prog) - 1));
        if (a != b) t->edges.push_back({std::min(a, b), std::max(a, b), EdgeKind::Control});
    }

    std::vector<SurrogateOracle::SlotEffect> effects;
    for (std::size_t s = 0; s < n_slots; ++s) {
        PragmaSlot slot;
        // slot 1 is always a pipeline toggle so every kernel has a
        // constraint-free slot with at least two latencies
        PragmaKind kind;
        if (s == 1) {
            kind = PragmaKind::PipelineToggle;
        } else {
            kind = uniform_int(0, 1) == 0 ? PragmaKind::UnrollFactor : PragmaKind::TileSize;
        }
        slot.kind = kind;
        switch (kind) {
            case PragmaKind::UnrollFactor:
                slot.id = "s" + std::to_string(s) + "_unroll";
                slot.legal_values = uniform_int(0, 1) ? std::vector<std::int64_t>{1, 2, 4, 8, 16}
                                                      : std::vector<std::int64_t>{1, 2, 4, 8};
                break;
            case PragmaKind::PipelineToggle:
                slot.id = "s" + std::to_string(s) + "_pipe";
                slot.legal_values = {0, 1};
                break;
            case PragmaKind::TileSize:
                slot.id = "s" + std::to_string(s) + "_tile";
                slot.legal_values = uniform_int(0, 1) ? std::vector<std::int64_t>{1, 2, 4, 8}
                                                      : std::vector<std::int64_t>{1, 2, 4};
                break;
        }
        slot.attached_node = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n_prog) - 1));

        const std::size_t pragma_node = n_prog + s;
        fill_node(pragma_node, NodeKind::Pragma);
        t->edges.push_back({pragma_node, slot.attached_node, EdgeKind::PragmaAttach});
        t->slot_node[slot.id] = pragma_node;

        SurrogateOracle::SlotEffect eff;
        eff.slot_id = slot.id;
        eff.kind = kind;
        eff.neutral = slot.legal_values.front();
        eff.max_value = slot.legal_values.back();
        switch (kind) {
            case PragmaKind::UnrollFactor: eff.strength = uniform_real(0.2, 0.9); break;
            case PragmaKind::PipelineToggle: eff.strength = uniform_real(0.4, 0.95); break;
            case PragmaKind::TileSize: eff.strength = uniform_real(0.1, 0.5); break;
        }
        effects.push_back(std::move(eff));
        t->pragma_space.slots.push_back(std::move(slot));
    }

    // validity constraints: occasional divisibility on unroll slots, and one
    // product bound over the factor-like slots
    std::vector<std::string> factor_slots;
    for (const auto& slot : t->pragma_space.slots) {
        if (slot.kind == PragmaKind::PipelineToggle) continue;
        factor_slots.push_back(slot.id);
        if (slot.kind == PragmaKind::UnrollFactor && uniform_int(0, 9) < 4)
            t->pragma_space.validity_constraints.push_back(
                {Constraint::Kind::Divides, {slot.id}, uniform_int(0, 1) ? 8 : 16});
    }
    if (factor_slots.size() >= 2 && uniform_int(0, 9) < 6)
        t->pragma_space.validity_constraints.push_back(
            {Constraint::Kind::ProductBound, factor_slots, std::int64_t{1} << uniform_int(3, 8)});

    // pairwise couplings make joint maxing of two slots suboptimal
    std::vector<SurrogateOracle::Interaction> interactions;
    const std::size_t n_inter = 1 + static_cast<std::size_t>(n_slots >= 4 ? uniform_int(0, 1) : 0);
    for (std::size_t i = 0; i < n_inter; ++i) {
        std::size_t a = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n_slots) - 1));
        std::size_t b = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n_slots) - 1));
        if (a == b) b = (b + 1) % n_slots;
        double coupling = uniform_real(0.15, 0.7) * (uniform_int(0, 1) ? 1.0 : -1.0);
        interactions.push_back({t->pragma_space.slots[a].id, t->pragma_space.slots[b].id, coupling});
    }

    const double base = uniform_real(1e4, 1e6);
    t->validate();
    GeneratedKernel out;
    out.oracle = std::make_shared<SurrogateOracle>(t->kernel_id, base, std::move(effects),
                                                   std::move(interactions), t->pragma_space);
    out.tmpl = std::move(t);
    return out;
}

std::vector<std::string> Dataset::kernel_ids() const {
    std::vector<std::string> ids;
    for (const auto& r : records)
        if (std::find(ids.begin(), ids.end(), r.graph.kernel_id()) == ids.end())
            ids.push_back(r.graph.kernel_id());
    return ids;
}

std::vector<const DatasetRecord*> Dataset::of(const std::string& kernel_id, Split split) const {
    std::vector<const DatasetRecord*> out;
    for (const auto& r : records)
        if (r.split == split && r.graph.kernel_id() == kernel_id) out.push_back(&r);
    return out;
}

std::vector<const DatasetRecord*> Dataset::of_split(Split split) const {
    std::vector<const DatasetRecord*> out;
    for (const auto& r : records)
        if (r.split == split) out.push_back(&r);
    return out;
}

Dataset build_dataset(const std::vector<GeneratedKernel>& kernels, std::size_t samples_per_kernel,
                      const SplitFractions& fracs, std::uint64_t seed,
                      std::size_t enumeration_cap) {
    const double frac_sum = fracs.train + fracs.val + fracs.test;
    if (std::abs(frac_sum - 1.0) > 1e-6)
        throw ContractError("build_dataset: split fractions must sum to 1");

    Dataset ds;
    for (const auto& kernel : kernels) {
        auto configs = enumerate_valid(kernel.tmpl->pragma_space, enumeration_cap);
        std::size_t take = samples_per_kernel;
        if (take > configs.size()) {
            std::cerr << "warning: kernel " << kernel.tmpl->kernel_id << " has only "
                      << configs.size() << " valid configs, clamping sample count\n";
            take = configs.size();
        }
        std::mt19937_64 rng(fnv1a(kernel.tmpl->kernel_id, seed));
        std::shuffle(configs.begin(), configs.end(), rng);
        configs.resize(take);

        const auto n_train = static_cast<std::size_t>(std::llround(fracs.train * static_cast<double>(take)));
        auto n_val = static_cast<std::size_t>(std::llround(fracs.val * static_cast<double>(take)));
        if (n_train + n_val > take) n_val = take - n_train;

        for (std::size_t i = 0; i < take; ++i) {
            DatasetRecord rec;
            rec.graph = instantiate(kernel.tmpl, configs[i]);
            rec.latency = kernel.oracle->latency(configs[i]);
            rec.y = performance(rec.latency, kernel.oracle->base_latency());
            rec.split = i < n_train ? Split::Train : i < n_train + n_val ? Split::Val : Split::Test;
            ds.records.push_back(std::move(rec));
        }
    }
    return ds;
}

void save_dataset_jsonl(const std::filesystem::path& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& r : ds.records) {
        json line = {{"kernel_id", r.graph.kernel_id()},
                     {"config", config_to_json(r.graph.config)},
                     {"latency", r.latency},
                     {"y", r.y},
                     {"split", split_name(r.split)}};
        out << line.dump() << "\n";
    }
}

Dataset load_dataset_jsonl(const std::filesystem::path& path,
                           const std::map<std::string, GeneratedKernel>& kernels) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    Dataset ds;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        const auto kid = j.at("kernel_id").get<std::string>();
        auto it = kernels.find(kid);
        if (it == kernels.end()) throw SchemaError("dataset references unknown kernel " + kid);
        DatasetRecord rec;
        rec.graph = instantiate(it->second.tmpl, config_from_json(j.at("config")));
        rec.latency = j.at("latency").get<double>();
        rec.y = j.at("y").get<double>();
        if (!std::isfinite(rec.latency) || !std::isfinite(rec.y))
            throw ContractError("dataset: non-finite value for kernel " + kid);
        rec.split = split_parse(j.at("split").get<std::string>());
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

}  // namespace prk
