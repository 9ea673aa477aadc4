#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pragmarank/design/pragma.hpp"
#include "pragmarank/numerics/tensor.hpp"

namespace prk {

enum class NodeKind { Op, Memory, Control, Pragma };
enum class EdgeKind { Control, Data, PragmaAttach };

struct Edge {
    std::size_t src = 0;
    std::size_t dst = 0;
    EdgeKind kind = EdgeKind::Data;
};

// Static (config-independent) description of a kernel: program graph,
// per-node features, and its pragma space. Pragma slots appear as dedicated
// Pragma nodes wired to the node they annotate.
struct KernelTemplate {
    std::string kernel_id;
    std::vector<NodeKind> node_kinds;
    Tensor node_features;  // node_count × feat_dim, shared static schema
    std::vector<Edge> edges;
    PragmaSpace pragma_space;
    std::map<std::string, std::size_t> slot_node;  // slot id → its Pragma node

    std::size_t node_count() const { return node_kinds.size(); }
    std::size_t feat_dim() const { return node_features.cols(); }
    void validate() const;
};

// Number of extra feature channels a Pragma node gains from its value.
inline constexpr std::size_t kPragmaValueFeatures = 3;

// A kernel with one concrete pragma assignment. Two designs of the same
// kernel share the template and differ only in the pragma-node values.
struct DesignGraph {
    std::shared_ptr<const KernelTemplate> tmpl;
    PragmaConfig config;
    // node index → [value, log2(max(value,1)), value / max legal]
    std::map<std::size_t, std::array<double, kPragmaValueFeatures>> pragma_values;

    std::size_t node_count() const { return tmpl->node_count(); }
    const std::string& kernel_id() const { return tmpl->kernel_id; }
};

DesignGraph instantiate(std::shared_ptr<const KernelTemplate> tmpl, const PragmaConfig& config);

// Hamming distance over pragma slots; both designs must share a kernel.
std::size_t pragma_difference_degree(const DesignGraph& a, const DesignGraph& b);

}  // namespace prk
