#include "pragmarank/model/model.hpp"

#include <cmath>

namespace prk {

void EncoderConfig::validate() const {
    if (layers < 1) throw ConfigError("encoder: layers must be >= 1");
    if (hidden_dim < 1) throw ConfigError("encoder: hidden_dim must be >= 1");
}

RankModel::RankModel(ModelConfig cfg, std::uint64_t init_seed) : cfg_(std::move(cfg)) {
    const std::size_t d = cfg_.feat_dim;
    const std::size_t h = cfg_.encoder.hidden_dim;
    std::mt19937_64 rng(init_seed);

    proj_w_ = &params_.create("encoder/proj/W", d, h);
    params_.init_uniform(*proj_w_, d, rng);
    proj_b_ = &params_.create("encoder/proj/b", 1, h);
    params_.init_uniform(*proj_b_, d, rng);

    std::vector<std::size_t> pragma_dims = {d + kPragmaValueFeatures};
    pragma_dims.insert(pragma_dims.end(), cfg_.encoder.pragma_mlp_dims.begin(),
                       cfg_.encoder.pragma_mlp_dims.end());
    pragma_dims.push_back(h);
    pragma_mlp_ = make_mlp("encoder/pragma", pragma_dims, rng);

    const bool attn = cfg_.encoder.layer_kind == EncoderConfig::LayerKind::AttentionAggregate;
    for (std::size_t l = 0; l < cfg_.encoder.layers; ++l) {
        const std::string p = "encoder/gnn" + std::to_string(l) + "/";
        GnnLayer layer{};
        layer.w_self = &params_.create(p + "W_self", h, h);
        params_.init_uniform(*layer.w_self, h, rng);
        layer.w_nbr = &params_.create(p + "W_nbr", h, h);
        params_.init_uniform(*layer.w_nbr, h, rng);
        layer.bias = &params_.create(p + "b", 1, h);
        params_.init_uniform(*layer.bias, h, rng);
        if (attn) {
            layer.w_query = &params_.create(p + "W_q", h, h);
            params_.init_uniform(*layer.w_query, h, rng);
            layer.w_key = &params_.create(p + "W_k", h, h);
            params_.init_uniform(*layer.w_key, h, rng);
        }
        gnn_.push_back(layer);
    }

    nda_net_ = make_mlp("nda", {3 * h, h, h, 1}, rng);
    pair_mlp_ = make_mlp("head_pair", {2 * h, h, h, 2}, rng);
    point_mlp_ = make_mlp("head_point", {h, h, h, 1}, rng);
}

RankModel::Mlp RankModel::make_mlp(const std::string& prefix, const std::vector<std::size_t>& dims,
                                   std::mt19937_64& rng) {
    Mlp mlp;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const std::string p = prefix + "/" + std::to_string(l) + "/";
        Parameter& w = params_.create(p + "W", dims[l], dims[l + 1]);
        params_.init_uniform(w, dims[l], rng);
        Parameter& b = params_.create(p + "b", 1, dims[l + 1]);
        params_.init_uniform(b, dims[l], rng);
        mlp.weights.push_back(&w);
        mlp.biases.push_back(&b);
    }
    return mlp;
}

NodeId RankModel::apply_mlp(Tape& tape, const Mlp& mlp, NodeId x) {
    NodeId h = x;
    for (std::size_t l = 0; l < mlp.weights.size(); ++l) {
        h = tape.add_rowvec(tape.matmul(h, tape.param(*mlp.weights[l])),
                            tape.param(*mlp.biases[l]));
        if (l + 1 < mlp.weights.size()) h = tape.relu(h);
    }
    return h;
}

NodeId RankModel::encode_features(Tape& tape, const DesignGraph& g) {
    const KernelTemplate& t = *g.tmpl;
    const std::size_t n = t.node_count();
    const std::size_t d = t.feat_dim();
    if (d != cfg_.feat_dim)
        throw ConfigError("encode_features: template feature dim " + std::to_string(d) +
                          " != model feature dim " + std::to_string(cfg_.feat_dim));

    std::vector<std::size_t> prog_nodes, pragma_nodes;
    for (std::size_t i = 0; i < n; ++i)
        (t.node_kinds[i] == NodeKind::Pragma ? pragma_nodes : prog_nodes).push_back(i);

    // Per-group feature matrices plus 0/1 selection matrices that scatter
    // encoded rows back into node order.
    NodeId scattered_prog = -1, scattered_pragma = -1;
    if (!prog_nodes.empty()) {
        Tensor feats(prog_nodes.size(), d);
        Tensor select(n, prog_nodes.size());
        for (std::size_t r = 0; r < prog_nodes.size(); ++r) {
            for (std::size_t c = 0; c < d; ++c) feats.at(r, c) = t.node_features.at(prog_nodes[r], c);
            select.at(prog_nodes[r], r) = 1.0;
        }
        NodeId enc = tape.add_rowvec(tape.matmul(tape.input(std::move(feats)), tape.param(*proj_w_)),
                                     tape.param(*proj_b_));
        scattered_prog = tape.matmul(tape.input(std::move(select)), enc);
    }
    if (!pragma_nodes.empty()) {
        Tensor feats(pragma_nodes.size(), d + kPragmaValueFeatures);
        Tensor select(n, pragma_nodes.size());
        for (std::size_t r = 0; r < pragma_nodes.size(); ++r) {
            const std::size_t node = pragma_nodes[r];
            for (std::size_t c = 0; c < d; ++c) feats.at(r, c) = t.node_features.at(node, c);
            const auto& extra = g.pragma_values.at(node);
            for (std::size_t c = 0; c < kPragmaValueFeatures; ++c) feats.at(r, d + c) = extra[c];
            select.at(node, r) = 1.0;
        }
        NodeId enc = apply_mlp(tape, pragma_mlp_, tape.input(std::move(feats)));
        scattered_pragma = tape.matmul(tape.input(std::move(select)), enc);
    }
    if (scattered_prog < 0) return scattered_pragma;
    if (scattered_pragma < 0) return scattered_prog;
    return tape.add(scattered_prog, scattered_pragma);
}

EncoderOutput RankModel::gnn_forward(Tape& tape, NodeId features, const DesignGraph& g,
                                     std::size_t layers_override) {
    const KernelTemplate& t = *g.tmpl;
    const std::size_t n = t.node_count();
    const std::size_t h = cfg_.encoder.hidden_dim;
    const std::size_t n_layers = layers_override == SIZE_MAX ? gnn_.size() : layers_override;
    const bool attn = cfg_.encoder.layer_kind == EncoderConfig::LayerKind::AttentionAggregate;

    // aggregation structure, shared by all layers
    std::vector<std::size_t> indeg(n, 0);
    for (const auto& e : t.edges) {
        if (e.src >= n || e.dst >= n) throw ContractError("gnn_forward: edge index out of range");
        ++indeg[e.dst];
    }
    NodeId mean_mat = -1, mask_bias = -1, row_keep = -1;
    if (!attn) {
        // row v holds 1/indeg(v) at in-neighbors; isolated nodes aggregate zero
        Tensor m(n, n);
        for (const auto& e : t.edges) m.at(e.dst, e.src) += 1.0 / static_cast<double>(indeg[e.dst]);
        mean_mat = tape.input(std::move(m));
    } else {
        Tensor bias(n, n, -1e9);  // additive mask: only in-neighbors stay finite
        Tensor keep(n, n);
        for (const auto& e : t.edges) bias.at(e.dst, e.src) = 0.0;
        for (std::size_t v = 0; v < n; ++v)
            if (indeg[v] > 0)
                for (std::size_t u = 0; u < n; ++u) keep.at(v, u) = 1.0;
        mask_bias = tape.input(std::move(bias));
        row_keep = tape.input(std::move(keep));
    }

    NodeId H = features;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const GnnLayer& layer = gnn_.at(l);
        NodeId agg;
        if (!attn) {
            agg = tape.matmul(mean_mat, H);
        } else {
            NodeId q = tape.matmul(H, tape.param(*layer.w_query));
            NodeId k = tape.matmul(H, tape.param(*layer.w_key));
            NodeId scores = tape.scale(tape.matmul(q, tape.transpose(k)),
                                       1.0 / std::sqrt(static_cast<double>(h)));
            NodeId weights = tape.row_softmax(tape.add(scores, mask_bias));
            agg = tape.matmul(tape.hadamard(weights, row_keep), H);
        }
        NodeId z = tape.add_rowvec(tape.add(tape.matmul(H, tape.param(*layer.w_self)),
                                            tape.matmul(agg, tape.param(*layer.w_nbr))),
                                   tape.param(*layer.bias));
        H = tape.relu(z);
    }
    return {H, tape.sum_rows(H)};
}

EncoderOutput RankModel::encode(Tape& tape, const DesignGraph& g) {
    return gnn_forward(tape, encode_features(tape, g), g);
}

NodeId RankModel::node_diff(Tape& tape, NodeId H_i, NodeId H_j) {
    const Tensor& a = tape.value(H_i);
    const Tensor& b = tape.value(H_j);
    if (!a.same_shape(b))
        throw ContractError("node_diff: embedding shapes differ (cross-kernel pair?) " +
                            a.shape_str() + " vs " + b.shape_str());
    return tape.sub(H_i, H_j);
}

NdaOutput RankModel::nda_forward(Tape& tape, NodeId H_i, NodeId H_j) {
    NdaOutput out;
    out.D = node_diff(tape, H_i, H_j);
    NodeId cat = tape.concat_cols(tape.concat_cols(H_i, H_j), out.D);
    out.s = apply_mlp(tape, nda_net_, cat);       // |G| × 1
    out.a = tape.row_softmax(tape.transpose(out.s));  // softmax over nodes
    out.h_diff = tape.matmul(out.a, out.D);
    return out;
}

PairLogits RankModel::pair_head(Tape& tape, NodeId h_Gi, NodeId h_Gj, NodeId h_diff) {
    NodeId in = tape.concat_cols(tape.hadamard(h_Gi, h_Gj), h_diff);
    return {apply_mlp(tape, pair_mlp_, in)};
}

NodeId RankModel::point_head(Tape& tape, NodeId h_G) {
    return apply_mlp(tape, point_mlp_, h_G);
}

NodeId RankModel::pair_loss(Tape& tape, const PairLogits& logits, double y_i, double y_j) {
    if (std::isnan(y_i) || std::isnan(y_j)) throw ContractError("pair_loss: NaN label");
    return tape.softmax_xent(logits.z, y_i > y_j ? 0 : 1);
}

NodeId RankModel::point_loss(Tape& tape, NodeId z_i, NodeId z_j, double y_i, double y_j) {
    NodeId e_i = tape.sub(z_i, tape.input(Tensor::scalar(y_i)));
    NodeId e_j = tape.sub(z_j, tape.input(Tensor::scalar(y_j)));
    NodeId sq = tape.add(tape.hadamard(e_i, e_i), tape.hadamard(e_j, e_j));
    return tape.scale(sq, 0.5);
}

NodeId RankModel::hybrid_loss(Tape& tape, NodeId point, NodeId pair, double alpha) {
    if (alpha < 0.0) throw ConfigError("hybrid_loss: alpha must be nonnegative");
    return tape.add(point, tape.scale(pair, alpha));
}

double RankModel::predict_point(const DesignGraph& g) {
    Tape tape;
    EncoderOutput enc = encode(tape, g);
    return tape.value(point_head(tape, enc.h_G)).item();
}

double RankModel::pair_probability(const DesignGraph& g_i, const DesignGraph& g_j) {
    Tape tape;
    EncoderOutput enc_i = encode(tape, g_i);
    EncoderOutput enc_j = encode(tape, g_j);
    NdaOutput nda = nda_forward(tape, enc_i.H, enc_j.H);
    PairLogits logits = pair_head(tape, enc_i.h_G, enc_j.h_G, nda.h_diff);
    NodeId p = tape.row_softmax(logits.z);
    return tape.value(p)[0];
}

}  // namespace prk
