#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pragmarank/errors.hpp"

namespace prk {

enum class PragmaKind { UnrollFactor, PipelineToggle, TileSize };

// One tunable directive: where it attaches and which values are legal.
struct PragmaSlot {
    std::string id;
    PragmaKind kind = PragmaKind::UnrollFactor;
    std::vector<std::int64_t> legal_values;  // non-empty, strictly increasing
    std::size_t attached_node = 0;           // program node the directive annotates

    std::int64_t max_legal() const { return legal_values.back(); }
};

// Legality constraints beyond per-slot value lists.
struct Constraint {
    enum class Kind { Divides, ProductBound };
    Kind kind = Kind::Divides;
    std::vector<std::string> slot_ids;  // Divides uses exactly one
    std::int64_t bound = 1;

    std::string describe() const;
};

class PragmaConfig {
public:
    PragmaConfig() = default;

    void set(const std::string& slot_id, std::int64_t value) { assignments_[slot_id] = value; }

    std::int64_t get(const std::string& slot_id) const {
        auto it = assignments_.find(slot_id);
        if (it == assignments_.end()) throw ContractError("config: unassigned slot " + slot_id);
        return it->second;
    }

    bool has(const std::string& slot_id) const { return assignments_.count(slot_id) != 0; }
    std::size_t size() const { return assignments_.size(); }
    const std::map<std::string, std::int64_t>& assignments() const { return assignments_; }

    std::string describe() const;

    // Lexicographic over (slot id, value) pairs in id order; used for all
    // deterministic tie-breaking.
    friend auto operator<=>(const PragmaConfig& a, const PragmaConfig& b) = default;

private:
    std::map<std::string, std::int64_t> assignments_;
};

struct PragmaSpace {
    std::vector<PragmaSlot> slots;
    std::vector<Constraint> validity_constraints;

    const PragmaSlot* find_slot(const std::string& id) const;

    // Returns the description of the first violated rule, or nullopt.
    std::optional<std::string> violation(const PragmaConfig& config) const;
    bool is_valid(const PragmaConfig& config) const { return !violation(config); }
    void require_valid(const PragmaConfig& config) const;
};

// Deterministic enumeration: odometer over slots in listed order, values
// ascending, filtered by the validity constraints. limit truncates.
std::vector<PragmaConfig> enumerate_valid(const PragmaSpace& space,
                                          std::optional<std::size_t> limit = std::nullopt);

}  // namespace prk
