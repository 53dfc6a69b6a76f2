#include "dagseg/graph.hpp"

#include <cmath>
#include <stdexcept>

#include "dagseg/errors.hpp"

namespace dagseg {

const char* op_name(Op k) {
    switch (k) {
    case Op::Input: return "Input";
    case Op::ParamRef: return "ParamRef";
    case Op::Row: return "Row";
    case Op::MatVec: return "MatVec";
    case Op::Add: return "Add";
    case Op::Sub: return "Sub";
    case Op::Mul: return "Mul";
    case Op::Sum: return "Sum";
    case Op::Concat: return "Concat";
    case Op::Sigmoid: return "Sigmoid";
    case Op::Tanh: return "Tanh";
    case Op::Elem: return "Elem";
    case Op::AddConst: return "AddConst";
    case Op::Hinge: return "Hinge";
    }
    return "?";
}

const Graph::Node& Graph::node(NodeId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
        throw GraphError("graph: node id " + std::to_string(id) + " out of range");
    return nodes_[static_cast<std::size_t>(id)];
}

void Graph::require_vector(NodeId id, const char* what) const {
    const Node& n = node(id);
    if (n.value.cols != 1)
        throw GraphError(std::string("graph: ") + what + " expects a vector, got " +
                         std::to_string(n.value.rows) + "x" + std::to_string(n.value.cols));
}

NodeId Graph::push(Node n, const char* what) {
    if (!n.value.finite())
        throw NumericError(std::string("non-finite value in node ") +
                           std::to_string(nodes_.size()) + " (" + what + ")");
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size()) - 1;
}

NodeId Graph::input(Tensor t) {
    Node n;
    n.kind = Op::Input;
    n.value = std::move(t);
    return push(std::move(n), "Input");
}

NodeId Graph::param(Param& p) {
    auto it = param_nodes_.find(&p);
    if (it != param_nodes_.end()) return it->second;
    Node n;
    n.kind = Op::ParamRef;
    n.value = p.value;
    n.param = &p;
    NodeId id = push(std::move(n), "ParamRef");
    param_nodes_.emplace(&p, id);
    return id;
}

NodeId Graph::row(Param& table, int r) {
    if (r < 0 || r >= table.value.rows)
        throw GraphError("graph: row " + std::to_string(r) + " out of range for " +
                         table.name + " (" + std::to_string(table.value.rows) + " rows)");
    Node n;
    n.kind = Op::Row;
    n.value = Tensor::vec(table.value.cols);
    for (int j = 0; j < table.value.cols; ++j) n.value[j] = table.value.at(r, j);
    n.param = &table;
    n.row = r;
    return push(std::move(n), "Row");
}

NodeId Graph::matvec(NodeId w, NodeId x) {
    const Node& wn = node(w);
    require_vector(x, "MatVec rhs");
    const Node& xn = node(x);
    if (wn.value.cols != xn.value.rows)
        throw GraphError("graph: MatVec shape mismatch " + std::to_string(wn.value.rows) +
                         "x" + std::to_string(wn.value.cols) + " * " +
                         std::to_string(xn.value.rows));
    Node n;
    n.kind = Op::MatVec;
    n.value = Tensor::vec(wn.value.rows);
    for (int i = 0; i < wn.value.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < wn.value.cols; ++j) s += wn.value.at(i, j) * xn.value[j];
        n.value[i] = s;
    }
    n.a = w;
    n.b = x;
    return push(std::move(n), "MatVec");
}

NodeId Graph::add(NodeId a, NodeId b) {
    const Node& an = node(a);
    const Node& bn = node(b);
    if (!an.value.same_shape(bn.value)) throw GraphError("graph: Add shape mismatch");
    Node n;
    n.kind = Op::Add;
    n.value = an.value;
    for (std::size_t i = 0; i < n.value.v.size(); ++i) n.value.v[i] += bn.value.v[i];
    n.a = a;
    n.b = b;
    return push(std::move(n), "Add");
}

NodeId Graph::sub(NodeId a, NodeId b) {
    const Node& an = node(a);
    const Node& bn = node(b);
    if (!an.value.same_shape(bn.value)) throw GraphError("graph: Sub shape mismatch");
    Node n;
    n.kind = Op::Sub;
    n.value = an.value;
    for (std::size_t i = 0; i < n.value.v.size(); ++i) n.value.v[i] -= bn.value.v[i];
    n.a = a;
    n.b = b;
    return push(std::move(n), "Sub");
}

NodeId Graph::mul(NodeId a, NodeId b) {
    const Node& an = node(a);
    const Node& bn = node(b);
    if (!an.value.same_shape(bn.value)) throw GraphError("graph: Mul shape mismatch");
    Node n;
    n.kind = Op::Mul;
    n.value = an.value;
    for (std::size_t i = 0; i < n.value.v.size(); ++i) n.value.v[i] *= bn.value.v[i];
    n.a = a;
    n.b = b;
    return push(std::move(n), "Mul");
}

NodeId Graph::sum(const std::vector<NodeId>& xs) {
    if (xs.empty()) throw GraphError("graph: Sum of zero terms");
    if (xs.size() == 1) {
        node(xs[0]); // validate the id
        return xs[0];
    }
    const Node& first = node(xs[0]);
    Node n;
    n.kind = Op::Sum;
    n.value = first.value;
    for (std::size_t k = 1; k < xs.size(); ++k) {
        const Node& xk = node(xs[k]);
        if (!xk.value.same_shape(first.value)) throw GraphError("graph: Sum shape mismatch");
        for (std::size_t i = 0; i < n.value.v.size(); ++i) n.value.v[i] += xk.value.v[i];
    }
    n.ins = xs;
    return push(std::move(n), "Sum");
}

NodeId Graph::concat(const std::vector<NodeId>& xs) {
    if (xs.empty()) throw GraphError("graph: Concat of zero parts");
    int total = 0;
    for (NodeId x : xs) {
        require_vector(x, "Concat part");
        total += node(x).value.rows;
    }
    Node n;
    n.kind = Op::Concat;
    n.value = Tensor::vec(total);
    int at = 0;
    for (NodeId x : xs) {
        const Node& xn = node(x);
        for (int i = 0; i < xn.value.rows; ++i) n.value[at++] = xn.value[i];
    }
    n.ins = xs;
    return push(std::move(n), "Concat");
}

NodeId Graph::sigmoid(NodeId x) {
    const Node& xn = node(x);
    Node n;
    n.kind = Op::Sigmoid;
    n.value = xn.value;
    for (double& v : n.value.v) v = 1.0 / (1.0 + std::exp(-v));
    n.a = x;
    return push(std::move(n), "Sigmoid");
}

NodeId Graph::tanh(NodeId x) {
    const Node& xn = node(x);
    Node n;
    n.kind = Op::Tanh;
    n.value = xn.value;
    for (double& v : n.value.v) v = std::tanh(v);
    n.a = x;
    return push(std::move(n), "Tanh");
}

NodeId Graph::elem(NodeId m, int i, int j) {
    const Node& mn = node(m);
    if (i < 0 || i >= mn.value.rows || j < 0 || j >= mn.value.cols)
        throw GraphError("graph: Elem (" + std::to_string(i) + "," + std::to_string(j) +
                         ") out of range for " + std::to_string(mn.value.rows) + "x" +
                         std::to_string(mn.value.cols));
    Node n;
    n.kind = Op::Elem;
    n.value = Tensor::vec(1);
    n.value[0] = mn.value.at(i, j);
    n.a = m;
    n.ei = i;
    n.ej = j;
    return push(std::move(n), "Elem");
}

NodeId Graph::add_const(NodeId x, double c) {
    const Node& xn = node(x);
    Node n;
    n.kind = Op::AddConst;
    n.value = xn.value;
    for (double& v : n.value.v) v += c;
    n.a = x;
    n.c = c;
    return push(std::move(n), "AddConst");
}

NodeId Graph::hinge(NodeId x) {
    const Node& xn = node(x);
    if (xn.value.rows != 1 || xn.value.cols != 1)
        throw GraphError("graph: Hinge expects a scalar");
    Node n;
    n.kind = Op::Hinge;
    n.value = Tensor::vec(1);
    n.value[0] = xn.value[0] > 0.0 ? xn.value[0] : 0.0;
    n.a = x;
    return push(std::move(n), "Hinge");
}

const Tensor& Graph::value(NodeId id) const { return node(id).value; }

double Graph::scalar(NodeId id) const {
    const Node& n = node(id);
    if (n.value.rows != 1 || n.value.cols != 1)
        throw GraphError("graph: scalar() on a " + std::to_string(n.value.rows) + "x" +
                         std::to_string(n.value.cols) + " node");
    return n.value[0];
}

void Graph::backward(NodeId loss, double seed) {
    if (backward_done_) throw GraphError("graph: backward called twice");
    backward_done_ = true;
    const Node& ln = node(loss);
    if (ln.value.rows != 1 || ln.value.cols != 1)
        throw GraphError("graph: backward expects a scalar loss");

    std::vector<Tensor> grad(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        grad[i] = nodes_[i].value;
        grad[i].fill(0.0);
    }
    grad[static_cast<std::size_t>(loss)][0] = seed;

    for (NodeId id = loss; id >= 0; --id) {
        Node& n = nodes_[static_cast<std::size_t>(id)];
        Tensor& g = grad[static_cast<std::size_t>(id)];
        if (!g.finite())
            throw NumericError("non-finite gradient at node " + std::to_string(id) + " (" +
                               op_name(n.kind) + ")");
        switch (n.kind) {
        case Op::Input:
            break;
        case Op::ParamRef:
            if (n.param->trainable)
                for (std::size_t i = 0; i < g.v.size(); ++i) n.param->grad.v[i] += g.v[i];
            break;
        case Op::Row:
            if (n.param->trainable)
                for (int j = 0; j < g.rows; ++j)
                    n.param->grad.at(n.row, j) += g[j];
            break;
        case Op::MatVec: {
            Tensor& gw = grad[static_cast<std::size_t>(n.a)];
            Tensor& gx = grad[static_cast<std::size_t>(n.b)];
            const Tensor& w = nodes_[static_cast<std::size_t>(n.a)].value;
            const Tensor& x = nodes_[static_cast<std::size_t>(n.b)].value;
            for (int i = 0; i < w.rows; ++i) {
                double gi = g[i];
                if (gi == 0.0) continue;
                for (int j = 0; j < w.cols; ++j) {
                    gw.at(i, j) += gi * x[j];
                    gx[j] += w.at(i, j) * gi;
                }
            }
            break;
        }
        case Op::Add: {
            Tensor& ga = grad[static_cast<std::size_t>(n.a)];
            Tensor& gb = grad[static_cast<std::size_t>(n.b)];
            for (std::size_t i = 0; i < g.v.size(); ++i) {
                ga.v[i] += g.v[i];
                gb.v[i] += g.v[i];
            }
            break;
        }
        case Op::Sub: {
            Tensor& ga = grad[static_cast<std::size_t>(n.a)];
            Tensor& gb = grad[static_cast<std::size_t>(n.b)];
            for (std::size_t i = 0; i < g.v.size(); ++i) {
                ga.v[i] += g.v[i];
                gb.v[i] -= g.v[i];
            }
            break;
        }
        case Op::Mul: {
            Tensor& ga = grad[static_cast<std::size_t>(n.a)];
            Tensor& gb = grad[static_cast<std::size_t>(n.b)];
            const Tensor& a = nodes_[static_cast<std::size_t>(n.a)].value;
            const Tensor& b = nodes_[static_cast<std::size_t>(n.b)].value;
            for (std::size_t i = 0; i < g.v.size(); ++i) {
                ga.v[i] += g.v[i] * b.v[i];
                gb.v[i] += g.v[i] * a.v[i];
            }
            break;
        }
        case Op::Sum:
            for (NodeId x : n.ins) {
                Tensor& gx = grad[static_cast<std::size_t>(x)];
                for (std::size_t i = 0; i < g.v.size(); ++i) gx.v[i] += g.v[i];
            }
            break;
        case Op::Concat: {
            int at = 0;
            for (NodeId x : n.ins) {
                Tensor& gx = grad[static_cast<std::size_t>(x)];
                for (int i = 0; i < gx.rows; ++i) gx[i] += g[at++];
            }
            break;
        }
        case Op::Sigmoid: {
            Tensor& gx = grad[static_cast<std::size_t>(n.a)];
            for (std::size_t i = 0; i < g.v.size(); ++i) {
                double y = n.value.v[i];
                gx.v[i] += g.v[i] * y * (1.0 - y);
            }
            break;
        }
        case Op::Tanh: {
            Tensor& gx = grad[static_cast<std::size_t>(n.a)];
            for (std::size_t i = 0; i < g.v.size(); ++i) {
                double y = n.value.v[i];
                gx.v[i] += g.v[i] * (1.0 - y * y);
            }
            break;
        }
        case Op::Elem:
            grad[static_cast<std::size_t>(n.a)].at(n.ei, n.ej) += g[0];
            break;
        case Op::AddConst: {
            Tensor& gx = grad[static_cast<std::size_t>(n.a)];
            for (std::size_t i = 0; i < g.v.size(); ++i) gx.v[i] += g.v[i];
            break;
        }
        case Op::Hinge:
            if (nodes_[static_cast<std::size_t>(n.a)].value[0] > 0.0)
                grad[static_cast<std::size_t>(n.a)][0] += g[0];
            break;
        }
    }

    for (const Node& n : nodes_) {
        if (n.param && n.param->trainable && !n.param->grad.finite())
            throw NumericError("non-finite gradient in parameter " + n.param->name);
    }
}

std::size_t Graph::count_op(Op k) const {
    std::size_t c = 0;
    for (const Node& n : nodes_)
        if (n.kind == k) ++c;
    return c;
}

} // namespace dagseg
