#include "pragmarank/design/serialize.hpp"

#include <fstream>

namespace prk {

using nlohmann::json;

namespace {

const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Op: return "op";
        case NodeKind::Memory: return "memory";
        case NodeKind::Control: return "control";
        case NodeKind::Pragma: return "pragma";
    }
    return "op";
}

NodeKind node_kind_parse(const std::string& s) {
    if (s == "op") return NodeKind::Op;
    if (s == "memory") return NodeKind::Memory;
    if (s == "control") return NodeKind::Control;
    if (s == "pragma") return NodeKind::Pragma;
    throw SchemaError("unknown node kind: " + s);
}

const char* edge_kind_name(EdgeKind k) {
    switch (k) {
        case EdgeKind::Control: return "control";
        case EdgeKind::Data: return "data";
        case EdgeKind::PragmaAttach: return "pragma-attachment";
    }
    return "data";
}

EdgeKind edge_kind_parse(const std::string& s) {
    if (s == "control") return EdgeKind::Control;
    if (s == "data") return EdgeKind::Data;
    if (s == "pragma-attachment") return EdgeKind::PragmaAttach;
    throw SchemaError("unknown edge kind: " + s);
}

const char* pragma_kind_name(PragmaKind k) {
    switch (k) {
        case PragmaKind::UnrollFactor: return "unroll-factor";
        case PragmaKind::PipelineToggle: return "pipeline-toggle";
        case PragmaKind::TileSize: return "tile-size";
    }
    return "unroll-factor";
}

PragmaKind pragma_kind_parse(const std::string& s) {
    if (s == "unroll-factor") return PragmaKind::UnrollFactor;
    if (s == "pipeline-toggle") return PragmaKind::PipelineToggle;
    if (s == "tile-size") return PragmaKind::TileSize;
    throw SchemaError("unknown pragma kind: " + s);
}

}  // namespace

json template_to_json(const KernelTemplate& t) {
    json nodes = json::array();
    for (std::size_t i = 0; i < t.node_count(); ++i) {
        json feats = json::array();
        for (std::size_t c = 0; c < t.feat_dim(); ++c) feats.push_back(t.node_features.at(i, c));
        nodes.push_back({{"kind", node_kind_name(t.node_kinds[i])}, {"features", feats}});
    }
    json edges = json::array();
    for (const auto& e : t.edges)
        edges.push_back({{"src", e.src}, {"dst", e.dst}, {"kind", edge_kind_name(e.kind)}});

    json slots = json::array();
    for (const auto& s : t.pragma_space.slots)
        slots.push_back({{"id", s.id},
                         {"kind", pragma_kind_name(s.kind)},
                         {"legal_values", s.legal_values},
                         {"attached_node", s.attached_node},
                         {"pragma_node", t.slot_node.at(s.id)}});
    json constraints = json::array();
    for (const auto& c : t.pragma_space.validity_constraints)
        constraints.push_back(
            {{"kind", c.kind == Constraint::Kind::Divides ? "divides" : "product-bound"},
             {"slots", c.slot_ids},
             {"bound", c.bound}});

    return {{"schema_version", kSchemaVersion},
            {"kernel", t.kernel_id},
            {"nodes", nodes},
            {"edges", edges},
            {"pragma_space", {{"slots", slots}, {"constraints", constraints}}}};
}

KernelTemplate template_from_json(const json& j) {
    check_schema_version(j, "kernel template");
    KernelTemplate t;
    t.kernel_id = j.at("kernel").get<std::string>();

    const auto& nodes = j.at("nodes");
    if (nodes.empty()) throw SchemaError("kernel template has no nodes");
    const std::size_t d = nodes.front().at("features").size();
    std::vector<double> flat;
    flat.reserve(nodes.size() * d);
    for (const auto& n : nodes) {
        t.node_kinds.push_back(node_kind_parse(n.at("kind").get<std::string>()));
        const auto& f = n.at("features");
        if (f.size() != d) throw SchemaError("node feature dims differ within template");
        for (const auto& v : f) flat.push_back(v.get<double>());
    }
    t.node_features = Tensor::from_external({nodes.size(), d}, std::move(flat));

    for (const auto& e : j.at("edges"))
        t.edges.push_back({e.at("src").get<std::size_t>(), e.at("dst").get<std::size_t>(),
                           edge_kind_parse(e.at("kind").get<std::string>())});

    for (const auto& s : j.at("pragma_space").at("slots")) {
        PragmaSlot slot;
        slot.id = s.at("id").get<std::string>();
        slot.kind = pragma_kind_parse(s.at("kind").get<std::string>());
        slot.legal_values = s.at("legal_values").get<std::vector<std::int64_t>>();
        slot.attached_node = s.at("attached_node").get<std::size_t>();
        t.slot_node[slot.id] = s.at("pragma_node").get<std::size_t>();
        t.pragma_space.slots.push_back(std::move(slot));
    }
    for (const auto& c : j.at("pragma_space").at("constraints")) {
        Constraint con;
        const auto kind = c.at("kind").get<std::string>();
        if (kind == "divides")
            con.kind = Constraint::Kind::Divides;
        else if (kind == "product-bound")
            con.kind = Constraint::Kind::ProductBound;
        else
            throw SchemaError("unknown constraint kind: " + kind);
        con.slot_ids = c.at("slots").get<std::vector<std::string>>();
        con.bound = c.at("bound").get<std::int64_t>();
        t.pragma_space.validity_constraints.push_back(std::move(con));
    }
    t.validate();
    return t;
}

json config_to_json(const PragmaConfig& c) {
    json j = json::object();
    for (const auto& [slot, v] : c.assignments()) j[slot] = v;
    return j;
}

PragmaConfig config_from_json(const json& j) {
    PragmaConfig c;
    for (const auto& [slot, v] : j.items()) c.set(slot, v.get<std::int64_t>());
    return c;
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw IoError("cannot parse " + path.string() + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

void check_schema_version(const json& j, const std::string& what) {
    if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kSchemaVersion)
        throw SchemaError(what + ": schema_version mismatch, expected " +
                          std::to_string(kSchemaVersion));
}

}  // namespace prk
