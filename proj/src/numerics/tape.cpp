#include "pragmarank/numerics/tape.hpp"

#include <cmath>

#include "pragmarank/kernels/kernels.hpp"

namespace prk {

namespace {
const kernels::Kernels& K() { return kernels::active_kernels(); }
}

NodeId Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Tape::check(NodeId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
        throw InternalError("Tape: node id out of range");
    return id;
}

NodeId Tape::input(Tensor value) {
    Node n;
    n.op = OpKind::Input;
    n.value = std::move(value);
    return push(std::move(n));
}

NodeId Tape::param(Parameter& p) {
    Node n;
    n.op = OpKind::Param;
    n.value = p.value;
    n.parameter = &p;
    return push(std::move(n));
}

NodeId Tape::matmul(NodeId a, NodeId b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    if (av.cols() != bv.rows())
        throw DimensionError("matmul: inner extents differ, " + av.shape_str() + " x " +
                             bv.shape_str());
    Node n;
    n.op = OpKind::MatMul;
    n.in0 = a;
    n.in1 = b;
    n.value = Tensor(av.rows(), bv.cols());
    K().matmul_nn(av.data(), bv.data(), n.value.data(), av.rows(), av.cols(), bv.cols(), false);
    return push(std::move(n));
}

NodeId Tape::elementwise(ElemKind kind, NodeId a, NodeId b) {
    const Tensor& av = value(a);
    if (kind == ElemKind::Relu) {
        Node n;
        n.op = OpKind::Relu;
        n.in0 = a;
        n.value = Tensor(av.rows(), av.cols());
        K().relu(av.data(), n.value.data(), av.size());
        return push(std::move(n));
    }
    const Tensor& bv = value(b);
    if (!av.same_shape(bv))
        throw DimensionError("elementwise: shape mismatch, " + av.shape_str() + " vs " +
                             bv.shape_str());
    Node n;
    n.in0 = a;
    n.in1 = b;
    n.value = Tensor(av.rows(), av.cols());
    switch (kind) {
        case ElemKind::Add:
            n.op = OpKind::Add;
            K().add(av.data(), bv.data(), n.value.data(), av.size());
            break;
        case ElemKind::Sub:
            n.op = OpKind::Sub;
            K().sub(av.data(), bv.data(), n.value.data(), av.size());
            break;
        case ElemKind::Hadamard:
            n.op = OpKind::Hadamard;
            K().mul(av.data(), bv.data(), n.value.data(), av.size());
            break;
        default:
            throw InternalError("elementwise: bad kind");
    }
    return push(std::move(n));
}

NodeId Tape::row_softmax(NodeId a) {
    const Tensor& av = value(a);
    Node n;
    n.op = OpKind::RowSoftmax;
    n.in0 = a;
    n.value = Tensor(av.rows(), av.cols());
    const std::size_t cols = av.cols();
    for (std::size_t r = 0; r < av.rows(); ++r) {
        const double* x = av.data() + r * cols;
        double* y = n.value.data() + r * cols;
        const double m = K().max(x, cols);
        for (std::size_t j = 0; j < cols; ++j) y[j] = x[j] - m;
        K().exp_(y, y, cols);
        const double s = K().sum(y, cols);
        K().scale(y, 1.0 / s, y, cols);
    }
    return push(std::move(n));
}

NodeId Tape::reduce(ReduceKind kind, NodeId a) {
    const Tensor& av = value(a);
    Node n;
    n.in0 = a;
    switch (kind) {
        case ReduceKind::SumRows: {
            n.op = OpKind::SumRows;
            n.value = Tensor(1, av.cols());
            for (std::size_t r = 0; r < av.rows(); ++r)
                K().axpy(1.0, av.data() + r * av.cols(), n.value.data(), av.cols());
            break;
        }
        case ReduceKind::SumAll:
            n.op = OpKind::SumAll;
            n.value = Tensor::scalar(K().sum(av.data(), av.size()));
            break;
        case ReduceKind::MeanAll:
            n.op = OpKind::MeanAll;
            n.scalar_aux = 1.0 / static_cast<double>(av.size());
            n.value = Tensor::scalar(K().sum(av.data(), av.size()) * n.scalar_aux);
            break;
    }
    return push(std::move(n));
}

NodeId Tape::concat_cols(NodeId a, NodeId b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    if (av.rows() != bv.rows())
        throw DimensionError("concat_cols: row counts differ, " + av.shape_str() + " vs " +
                             bv.shape_str());
    Node n;
    n.op = OpKind::ConcatCols;
    n.in0 = a;
    n.in1 = b;
    n.index_aux = av.cols();
    n.value = Tensor(av.rows(), av.cols() + bv.cols());
    for (std::size_t r = 0; r < av.rows(); ++r) {
        double* out = n.value.data() + r * n.value.cols();
        std::copy(av.data() + r * av.cols(), av.data() + (r + 1) * av.cols(), out);
        std::copy(bv.data() + r * bv.cols(), bv.data() + (r + 1) * bv.cols(), out + av.cols());
    }
    return push(std::move(n));
}

NodeId Tape::add_rowvec(NodeId x, NodeId b) {
    const Tensor& xv = value(x);
    const Tensor& bv = value(b);
    if (bv.rows() != 1 || bv.cols() != xv.cols())
        throw DimensionError("add_rowvec: bias " + bv.shape_str() + " does not match " +
                             xv.shape_str());
    Node n;
    n.op = OpKind::AddRowVec;
    n.in0 = x;
    n.in1 = b;
    n.value = Tensor(xv.rows(), xv.cols());
    for (std::size_t r = 0; r < xv.rows(); ++r)
        K().add(xv.data() + r * xv.cols(), bv.data(), n.value.data() + r * xv.cols(), xv.cols());
    return push(std::move(n));
}

NodeId Tape::scale(NodeId a, double c) {
    const Tensor& av = value(a);
    Node n;
    n.op = OpKind::Scale;
    n.in0 = a;
    n.scalar_aux = c;
    n.value = Tensor(av.rows(), av.cols());
    K().scale(av.data(), c, n.value.data(), av.size());
    return push(std::move(n));
}

NodeId Tape::transpose(NodeId a) {
    const Tensor& av = value(a);
    Node n;
    n.op = OpKind::Transpose;
    n.in0 = a;
    n.value = Tensor(av.cols(), av.rows());
    for (std::size_t r = 0; r < av.rows(); ++r)
        for (std::size_t c = 0; c < av.cols(); ++c) n.value.at(c, r) = av.at(r, c);
    return push(std::move(n));
}

NodeId Tape::softmax_xent(NodeId logits, std::size_t target) {
    const Tensor& z = value(logits);
    if (z.rows() != 1) throw DimensionError("softmax_xent: logits must be 1×n, got " + z.shape_str());
    if (target >= z.cols()) throw ContractError("softmax_xent: target index out of range");
    // loss = logsumexp(z) - z[target], computed with max-shift
    const double m = K().max(z.data(), z.cols());
    double s = 0.0;
    for (std::size_t j = 0; j < z.cols(); ++j) s += std::exp(z[j] - m);
    Node n;
    n.op = OpKind::SoftmaxXent;
    n.in0 = logits;
    n.index_aux = target;
    n.value = Tensor::scalar(m + std::log(s) - z[target]);
    return push(std::move(n));
}

void Tape::backward(NodeId loss) {
    check(loss);
    if (backward_done_) throw ContractError("Tape::backward: already run on this tape");
    if (nodes_[loss].value.size() != 1)
        throw ContractError("Tape::backward: loss must be scalar, got " +
                            nodes_[loss].value.shape_str());
    backward_done_ = true;

    for (NodeId i = 0; i <= loss; ++i) {
        const Tensor& v = nodes_[i].value;
        nodes_[i].grad = Tensor(v.rows(), v.cols());
    }
    nodes_[loss].grad[0] = 1.0;

    for (NodeId i = loss; i >= 0; --i) {
        Node& n = nodes_[i];
        const Tensor& g = n.grad;
        switch (n.op) {
            case OpKind::Input:
                break;
            case OpKind::Param:
                K().axpy(1.0, g.data(), n.parameter->grad.data(), g.size());
                break;
            case OpKind::MatMul: {
                const Tensor& a = nodes_[n.in0].value;
                const Tensor& b = nodes_[n.in1].value;
                // dA += G·Bᵀ ; dB += Aᵀ·G
                K().matmul_nt(g.data(), b.data(), nodes_[n.in0].grad.data(), a.rows(), b.cols(),
                              a.cols(), true);
                K().matmul_tn(a.data(), g.data(), nodes_[n.in1].grad.data(), a.cols(), a.rows(),
                              b.cols(), true);
                break;
            }
            case OpKind::Add:
                K().axpy(1.0, g.data(), nodes_[n.in0].grad.data(), g.size());
                K().axpy(1.0, g.data(), nodes_[n.in1].grad.data(), g.size());
                break;
            case OpKind::Sub:
                K().axpy(1.0, g.data(), nodes_[n.in0].grad.data(), g.size());
                K().axpy(-1.0, g.data(), nodes_[n.in1].grad.data(), g.size());
                break;
            case OpKind::Hadamard: {
                Tensor tmp(g.rows(), g.cols());
                K().mul(g.data(), nodes_[n.in1].value.data(), tmp.data(), g.size());
                K().axpy(1.0, tmp.data(), nodes_[n.in0].grad.data(), g.size());
                K().mul(g.data(), nodes_[n.in0].value.data(), tmp.data(), g.size());
                K().axpy(1.0, tmp.data(), nodes_[n.in1].grad.data(), g.size());
                break;
            }
            case OpKind::Relu: {
                Tensor tmp(g.rows(), g.cols());
                K().relu_bwd(nodes_[n.in0].value.data(), g.data(), tmp.data(), g.size());
                K().axpy(1.0, tmp.data(), nodes_[n.in0].grad.data(), g.size());
                break;
            }
            case OpKind::RowSoftmax: {
                // per row: dx = y ∘ (g − <g, y>)
                const Tensor& y = n.value;
                Tensor& gx = nodes_[n.in0].grad;
                const std::size_t cols = y.cols();
                for (std::size_t r = 0; r < y.rows(); ++r) {
                    const double* yr = y.data() + r * cols;
                    const double* gr = g.data() + r * cols;
                    double* out = gx.data() + r * cols;
                    const double inner = K().dot(gr, yr, cols);
                    for (std::size_t j = 0; j < cols; ++j) out[j] += yr[j] * (gr[j] - inner);
                }
                break;
            }
            case OpKind::SumRows: {
                Tensor& gx = nodes_[n.in0].grad;
                for (std::size_t r = 0; r < gx.rows(); ++r)
                    K().axpy(1.0, g.data(), gx.data() + r * gx.cols(), gx.cols());
                break;
            }
            case OpKind::SumAll: {
                Tensor& gx = nodes_[n.in0].grad;
                const double gs = g[0];
                for (std::size_t j = 0; j < gx.size(); ++j) gx[j] += gs;
                break;
            }
            case OpKind::MeanAll: {
                Tensor& gx = nodes_[n.in0].grad;
                const double gs = g[0] * n.scalar_aux;
                for (std::size_t j = 0; j < gx.size(); ++j) gx[j] += gs;
                break;
            }
            case OpKind::ConcatCols: {
                Tensor& ga = nodes_[n.in0].grad;
                Tensor& gb = nodes_[n.in1].grad;
                const std::size_t split = n.index_aux;
                for (std::size_t r = 0; r < g.rows(); ++r) {
                    const double* row = g.data() + r * g.cols();
                    K().axpy(1.0, row, ga.data() + r * ga.cols(), split);
                    K().axpy(1.0, row + split, gb.data() + r * gb.cols(), g.cols() - split);
                }
                break;
            }
            case OpKind::AddRowVec: {
                Tensor& gx = nodes_[n.in0].grad;
                Tensor& gb = nodes_[n.in1].grad;
                K().axpy(1.0, g.data(), gx.data(), g.size());
                for (std::size_t r = 0; r < g.rows(); ++r)
                    K().axpy(1.0, g.data() + r * g.cols(), gb.data(), g.cols());
                break;
            }
            case OpKind::Scale:
                K().axpy(n.scalar_aux, g.data(), nodes_[n.in0].grad.data(), g.size());
                break;
            case OpKind::Transpose: {
                Tensor& gx = nodes_[n.in0].grad;
                for (std::size_t r = 0; r < g.rows(); ++r)
                    for (std::size_t c = 0; c < g.cols(); ++c) gx.at(c, r) += g.at(r, c);
                break;
            }
            case OpKind::SoftmaxXent: {
                // dz = softmax(z) − onehot(target), scaled by upstream
                const Tensor& z = nodes_[n.in0].value;
                Tensor& gz = nodes_[n.in0].grad;
                const double m = K().max(z.data(), z.cols());
                double s = 0.0;
                for (std::size_t j = 0; j < z.cols(); ++j) s += std::exp(z[j] - m);
                const double gs = g[0];
                for (std::size_t j = 0; j < z.cols(); ++j) {
                    double p = std::exp(z[j] - m) / s;
                    gz[j] += gs * (p - (j == n.index_aux ? 1.0 : 0.0));
                }
                break;
            }
        }
    }
}

}  // namespace prk
