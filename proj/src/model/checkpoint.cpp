#include "pragmarank/model/checkpoint.hpp"

#include "pragmarank/design/serialize.hpp"

namespace prk {

using nlohmann::json;

json model_config_to_json(const ModelConfig& cfg) {
    return {{"layers", cfg.encoder.layers},
            {"hidden_dim", cfg.encoder.hidden_dim},
            {"layer_kind",
             cfg.encoder.layer_kind == EncoderConfig::LayerKind::MeanAggregate ? "mean-aggregate"
                                                                               : "attention-aggregate"},
            {"pragma_mlp_dims", cfg.encoder.pragma_mlp_dims},
            {"feat_dim", cfg.feat_dim}};
}

ModelConfig model_config_from_json(const json& j) {
    ModelConfig cfg;
    cfg.encoder.layers = j.at("layers").get<std::size_t>();
    cfg.encoder.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    const auto kind = j.at("layer_kind").get<std::string>();
    if (kind == "mean-aggregate")
        cfg.encoder.layer_kind = EncoderConfig::LayerKind::MeanAggregate;
    else if (kind == "attention-aggregate")
        cfg.encoder.layer_kind = EncoderConfig::LayerKind::AttentionAggregate;
    else
        throw SchemaError("unknown layer_kind: " + kind);
    cfg.encoder.pragma_mlp_dims = j.at("pragma_mlp_dims").get<std::vector<std::size_t>>();
    cfg.feat_dim = j.at("feat_dim").get<std::size_t>();
    return cfg;
}

json checkpoint_to_json(RankModel& model, const json& meta) {
    json params = json::array();
    for (Parameter* p : model.params().all()) {
        json data = json::array();
        for (std::size_t i = 0; i < p->value.size(); ++i) data.push_back(p->value[i]);
        params.push_back({{"name", p->name},
                          {"shape", {p->value.rows(), p->value.cols()}},
                          {"data", std::move(data)}});
    }
    return {{"schema_version", kSchemaVersion},
            {"model", model_config_to_json(model.config())},
            {"params", std::move(params)},
            {"meta", meta}};
}

void save_checkpoint(const std::filesystem::path& path, RankModel& model, const json& meta) {
    save_json_file(path, checkpoint_to_json(model, meta));
}

RankModel checkpoint_from_json(const json& j, json* meta_out) {
    check_schema_version(j, "checkpoint");
    RankModel model(model_config_from_json(j.at("model")), /*init_seed=*/0);
    std::size_t loaded = 0;
    for (const auto& pj : j.at("params")) {
        const auto name = pj.at("name").get<std::string>();
        if (!model.params().has(name)) throw SchemaError("checkpoint parameter unknown: " + name);
        Parameter& p = model.params().get(name);
        const auto shape = pj.at("shape").get<std::vector<std::size_t>>();
        const auto data = pj.at("data").get<std::vector<double>>();
        p.value = Tensor::from_external(shape, data);
        p.grad = Tensor(p.value.rows(), p.value.cols());
        ++loaded;
    }
    if (loaded != model.params().count())
        throw SchemaError("checkpoint is missing parameters for this model config");
    if (meta_out) *meta_out = j.value("meta", json::object());
    return model;
}

RankModel load_checkpoint(const std::filesystem::path& path, json* meta_out) {
    return checkpoint_from_json(load_json_file(path), meta_out);
}

}  // namespace prk
