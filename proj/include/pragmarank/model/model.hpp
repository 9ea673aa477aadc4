#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pragmarank/design/graph.hpp"
#include "pragmarank/numerics/gradcheck.hpp"
#include "pragmarank/numerics/tape.hpp"

namespace prk {

struct EncoderConfig {
    enum class LayerKind { MeanAggregate, AttentionAggregate };

    std::size_t layers = 3;       // desk-scale default; 7 at full scale
    std::size_t hidden_dim = 32;  // d'; 64 at full scale
    LayerKind layer_kind = LayerKind::MeanAggregate;
    std::vector<std::size_t> pragma_mlp_dims = {32};  // hidden widths of the pragma MLP

    void validate() const;
};

struct ModelConfig {
    EncoderConfig encoder;
    std::size_t feat_dim = 8;
};

struct EncoderOutput {
    NodeId H = -1;    // |G| × d′ node embeddings
    NodeId h_G = -1;  // 1 × d′ sum-pooled design embedding
};

struct NdaOutput {
    NodeId D = -1;       // |G| × d′ per-node differences
    NodeId s = -1;       // |G| × 1 raw attention scores
    NodeId a = -1;       // 1 × |G| softmax attention weights
    NodeId h_diff = -1;  // 1 × d′ attended difference embedding
};

struct PairLogits {
    NodeId z = -1;  // 1 × 2 raw logits
};

// GNN encoder + difference attention + pairwise/pointwise MLP heads over
// one shared parameter store. All forward passes build onto a caller-owned
// Tape; training and inference use the same code path.
class RankModel {
public:
    RankModel(ModelConfig cfg, std::uint64_t init_seed);

    const ModelConfig& config() const { return cfg_; }
    ParamStore& params() { return params_; }

    // Per-node input encoding: shared linear projection for program nodes,
    // a dedicated MLP for pragma nodes. Rows follow node order.
    NodeId encode_features(Tape& tape, const DesignGraph& g);

    // Message passing over encoded features, then sum pooling.
    EncoderOutput gnn_forward(Tape& tape, NodeId features, const DesignGraph& g,
                              std::size_t layers_override = SIZE_MAX);

    EncoderOutput encode(Tape& tape, const DesignGraph& g);

    NodeId node_diff(Tape& tape, NodeId H_i, NodeId H_j);
    NdaOutput nda_forward(Tape& tape, NodeId H_i, NodeId H_j);

    PairLogits pair_head(Tape& tape, NodeId h_Gi, NodeId h_Gj, NodeId h_diff);
    NodeId point_head(Tape& tape, NodeId h_G);

    // −log p of the true class; ties label the second class.
    NodeId pair_loss(Tape& tape, const PairLogits& logits, double y_i, double y_j);
    // mean of the two squared pointwise errors
    NodeId point_loss(Tape& tape, NodeId z_i, NodeId z_j, double y_i, double y_j);
    // L_point + α·L_pair
    NodeId hybrid_loss(Tape& tape, NodeId point, NodeId pair, double alpha);

    // Inference conveniences (tape built and discarded internally).
    double predict_point(const DesignGraph& g);
    // P(design i outperforms design j), the first softmax component.
    double pair_probability(const DesignGraph& g_i, const DesignGraph& g_j);

private:
    struct Mlp {
        std::vector<Parameter*> weights;
        std::vector<Parameter*> biases;
    };

    Mlp make_mlp(const std::string& prefix, const std::vector<std::size_t>& dims,
                 std::mt19937_64& rng);
    NodeId apply_mlp(Tape& tape, const Mlp& mlp, NodeId x);

    ModelConfig cfg_;
    ParamStore params_;
    Mlp pragma_mlp_, nda_net_, pair_mlp_, point_mlp_;
    Parameter* proj_w_ = nullptr;
    Parameter* proj_b_ = nullptr;
    struct GnnLayer {
        Parameter* w_self;
        Parameter* w_nbr;
        Parameter* bias;
        Parameter* w_query;  // attention-aggregate only
        Parameter* w_key;
    };
    std::vector<GnnLayer> gnn_;
};

}  // namespace prk
