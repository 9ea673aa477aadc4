#include "pragmarank/design/graph.hpp"

#include <cmath>

namespace prk {

void KernelTemplate::validate() const {
    if (node_features.rows() != node_kinds.size())
        throw ContractError("template " + kernel_id + ": feature rows != node count");
    for (const auto& e : edges)
        if (e.src >= node_count() || e.dst >= node_count())
            throw ContractError("template " + kernel_id + ": edge endpoint out of range");
    for (const auto& slot : pragma_space.slots) {
        if (slot.attached_node >= node_count())
            throw ContractError("template " + kernel_id + ": slot " + slot.id +
                                " attached to missing node");
        if (slot.legal_values.empty())
            throw ContractError("template " + kernel_id + ": slot " + slot.id +
                                " has no legal values");
        for (std::size_t i = 1; i < slot.legal_values.size(); ++i)
            if (slot.legal_values[i] <= slot.legal_values[i - 1])
                throw ContractError("template " + kernel_id + ": slot " + slot.id +
                                    " legal values not strictly increasing");
        auto it = slot_node.find(slot.id);
        if (it == slot_node.end() || it->second >= node_count() ||
            node_kinds[it->second] != NodeKind::Pragma)
            throw ContractError("template " + kernel_id + ": slot " + slot.id +
                                " lacks a pragma node");
    }
}

DesignGraph instantiate(std::shared_ptr<const KernelTemplate> tmpl, const PragmaConfig& config) {
    tmpl->pragma_space.require_valid(config);
    DesignGraph g;
    g.config = config;
    for (const auto& slot : tmpl->pragma_space.slots) {
        const auto v = static_cast<double>(config.get(slot.id));
        const std::size_t node = tmpl->slot_node.at(slot.id);
        g.pragma_values[node] = {v, std::log2(std::max(v, 1.0)),
                                 v / static_cast<double>(slot.max_legal())};
    }
    g.tmpl = std::move(tmpl);
    return g;
}

std::size_t pragma_difference_degree(const DesignGraph& a, const DesignGraph& b) {
    if (a.kernel_id() != b.kernel_id())
        throw ContractError("pragma_difference_degree: different kernels " + a.kernel_id() +
                            " vs " + b.kernel_id());
    std::size_t degree = 0;
    for (const auto& [slot, value] : a.config.assignments())
        if (b.config.get(slot) != value) ++degree;
    return degree;
}

}  // namespace prk
