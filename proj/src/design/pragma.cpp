#include "pragmarank/design/pragma.hpp"

#include <algorithm>

namespace prk {

std::string Constraint::describe() const {
    if (kind == Kind::Divides)
        return slot_ids.at(0) + " divides " + std::to_string(bound);
    std::string s = "product(";
    for (std::size_t i = 0; i < slot_ids.size(); ++i) s += (i ? "," : "") + slot_ids[i];
    return s + ") <= " + std::to_string(bound);
}

std::string PragmaConfig::describe() const {
    std::string s = "{";
    bool first = true;
    for (const auto& [id, v] : assignments_) {
        if (!first) s += ", ";
        s += id + "=" + std::to_string(v);
        first = false;
    }
    return s + "}";
}

const PragmaSlot* PragmaSpace::find_slot(const std::string& id) const {
    for (const auto& s : slots)
        if (s.id == id) return &s;
    return nullptr;
}

std::optional<std::string> PragmaSpace::violation(const PragmaConfig& config) const {
    if (config.size() != slots.size())
        return "config assigns " + std::to_string(config.size()) + " slots, space has " +
               std::to_string(slots.size());
    for (const auto& slot : slots) {
        if (!config.has(slot.id)) return "slot " + slot.id + " unassigned";
        const std::int64_t v = config.get(slot.id);
        if (!std::binary_search(slot.legal_values.begin(), slot.legal_values.end(), v))
            return "value " + std::to_string(v) + " not legal for slot " + slot.id;
    }
    for (const auto& c : validity_constraints) {
        switch (c.kind) {
            case Constraint::Kind::Divides: {
                const std::int64_t v = config.get(c.slot_ids.at(0));
                if (v == 0 || c.bound % v != 0) return "violated: " + c.describe();
                break;
            }
            case Constraint::Kind::ProductBound: {
                std::int64_t prod = 1;
                for (const auto& id : c.slot_ids) prod *= config.get(id);
                if (prod > c.bound) return "violated: " + c.describe();
                break;
            }
        }
    }
    return std::nullopt;
}

void PragmaSpace::require_valid(const PragmaConfig& config) const {
    if (auto why = violation(config)) throw ValidityError("invalid config: " + *why);
}

std::vector<PragmaConfig> enumerate_valid(const PragmaSpace& space,
                                          std::optional<std::size_t> limit) {
    std::vector<PragmaConfig> out;
    if (limit && *limit == 0) return out;
    if (space.slots.empty()) return out;

    std::vector<std::size_t> odo(space.slots.size(), 0);
    while (true) {
        PragmaConfig cfg;
        for (std::size_t i = 0; i < space.slots.size(); ++i)
            cfg.set(space.slots[i].id, space.slots[i].legal_values[odo[i]]);
        if (space.is_valid(cfg)) {
            out.push_back(std::move(cfg));
            if (limit && out.size() >= *limit) break;
        }
        // advance odometer, last slot fastest
        std::size_t i = space.slots.size();
        while (i > 0) {
            --i;
            if (++odo[i] < space.slots[i].legal_values.size()) break;
            odo[i] = 0;
            if (i == 0) return out;
        }
    }
    return out;
}

}  // namespace prk
