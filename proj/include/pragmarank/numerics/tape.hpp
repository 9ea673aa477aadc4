#pragma once

#include <cstdint>
#include <vector>

#include "pragmarank/numerics/param.hpp"
#include "pragmarank/numerics/tensor.hpp"

namespace prk {

using NodeId = std::int32_t;

enum class OpKind : std::uint8_t {
    Input,        // leaf constant
    Param,        // leaf backed by a Parameter
    MatMul,
    Add,
    Sub,
    Hadamard,
    Relu,
    RowSoftmax,
    SumRows,
    SumAll,
    MeanAll,
    ConcatCols,
    AddRowVec,    // x[m×n] + row vector b[1×n] added to every row
    Scale,        // c * x, constant c
    Transpose,
    SoftmaxXent,  // cross-entropy of softmax(logits[1×n]) against a class index
};

enum class ElemKind { Add, Sub, Hadamard, Relu };
enum class ReduceKind { SumRows, SumAll, MeanAll };

// One forward pass: a tape of compute nodes, built eagerly and discarded
// after backward. Node inputs always have smaller ids, so the tape is
// acyclic by construction and reverse order is a topological order.
class Tape {
public:
    NodeId input(Tensor value);
    NodeId param(Parameter& p);

    NodeId matmul(NodeId a, NodeId b);
    NodeId elementwise(ElemKind kind, NodeId a, NodeId b = -1);
    NodeId add(NodeId a, NodeId b) { return elementwise(ElemKind::Add, a, b); }
    NodeId sub(NodeId a, NodeId b) { return elementwise(ElemKind::Sub, a, b); }
    NodeId hadamard(NodeId a, NodeId b) { return elementwise(ElemKind::Hadamard, a, b); }
    NodeId relu(NodeId a) { return elementwise(ElemKind::Relu, a); }
    NodeId row_softmax(NodeId a);
    NodeId reduce(ReduceKind kind, NodeId a);
    NodeId sum_rows(NodeId a) { return reduce(ReduceKind::SumRows, a); }
    NodeId sum_all(NodeId a) { return reduce(ReduceKind::SumAll, a); }
    NodeId mean_all(NodeId a) { return reduce(ReduceKind::MeanAll, a); }
    NodeId concat_cols(NodeId a, NodeId b);
    NodeId add_rowvec(NodeId x, NodeId b);
    NodeId scale(NodeId a, double c);
    NodeId transpose(NodeId a);
    NodeId softmax_xent(NodeId logits, std::size_t target);

    const Tensor& value(NodeId id) const { return nodes_[check(id)].value; }

    // Only valid after backward().
    const Tensor& grad(NodeId id) const { return nodes_[check(id)].grad; }

    // Reverse-topological accumulation from a scalar loss. Gradients of
    // Param leaves are added into their Parameter::grad. A second call on
    // the same tape is rejected.
    void backward(NodeId loss);

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        OpKind op;
        NodeId in0 = -1, in1 = -1;
        Tensor value;
        Tensor grad;
        double scalar_aux = 0.0;     // Scale factor / MeanAll divisor
        std::size_t index_aux = 0;   // SoftmaxXent target / ConcatCols split
        Parameter* parameter = nullptr;
    };

    NodeId push(Node n);
    NodeId check(NodeId id) const;

    std::vector<Node> nodes_;
    bool backward_done_ = false;
};

}  // namespace prk
