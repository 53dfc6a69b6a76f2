#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "dagseg/params.hpp"
#include "dagseg/tensor.hpp"

namespace dagseg {

enum class Op : std::uint8_t {
    Input,    // constant leaf
    ParamRef, // leaf view of a Param; backward accumulates into Param::grad
    Row,      // one row of a Param matrix, as a vector; backward scatters
    MatVec,   // W (r x c) * x (c) -> r
    Add,      // elementwise, same shape
    Sub,
    Mul,      // elementwise product
    Sum,      // n-ary vector sum; singleton is the identity (returns the input node)
    Concat,   // vector concatenation
    Sigmoid,
    Tanh,
    Elem,     // single element as a 1x1 scalar; backward scatters
    AddConst, // x + c, c constant
    Hinge,    // max(0, x), scalar
};

const char* op_name(Op k);

using NodeId = int;

// Dynamically built computation graph with reverse-mode differentiation.
// Nodes are appended in evaluation order, so creation order is a topological
// order and backward() is a single reverse sweep. A graph is built per
// sentence and discarded afterwards; backward may run at most once.
class Graph {
public:
    NodeId input(Tensor t);
    NodeId zeros(int n) { return input(Tensor::vec(n)); }
    NodeId param(Param& p); // memoized per Param
    NodeId row(Param& table, int r);
    NodeId matvec(NodeId w, NodeId x);
    NodeId add(NodeId a, NodeId b);
    NodeId sub(NodeId a, NodeId b);
    NodeId mul(NodeId a, NodeId b);
    NodeId sum(const std::vector<NodeId>& xs);
    NodeId concat(const std::vector<NodeId>& xs);
    NodeId sigmoid(NodeId x);
    NodeId tanh(NodeId x);
    NodeId elem(NodeId m, int i, int j);
    NodeId add_const(NodeId x, double c);
    NodeId hinge(NodeId x);

    const Tensor& value(NodeId id) const;
    double scalar(NodeId id) const;

    // Accumulates d(seed * loss)/d(param) into every referenced Param's grad.
    void backward(NodeId loss, double seed = 1.0);

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t count_op(Op k) const;

private:
    struct Node {
        Op kind;
        Tensor value;
        NodeId a = -1, b = -1;    // binary inputs
        std::vector<NodeId> ins;  // n-ary inputs
        Param* param = nullptr;   // ParamRef / Row / Elem-on-ParamRef target
        int row = -1;             // Row
        int ei = -1, ej = -1;     // Elem
        double c = 0.0;           // AddConst
    };

    std::vector<Node> nodes_;
    std::unordered_map<const Param*, NodeId> param_nodes_;
    bool backward_done_ = false;

    NodeId push(Node n, const char* what);
    const Node& node(NodeId id) const;
    void require_vector(NodeId id, const char* what) const;
};

} // namespace dagseg
