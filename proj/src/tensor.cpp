#include "gfnlab/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace gfnlab {

namespace {

Eigen::Index shape_rows(const std::vector<int>& shape) {
    return shape.size() >= 2 ? shape[0] : 1;
}

Eigen::Index shape_cols(const std::vector<int>& shape) {
    if (shape.empty()) return 1;
    return shape.size() >= 2 ? shape[1] : shape[0];
}

}  // namespace

Parameter& ParamStore::create(const std::string& name, std::vector<int> shape, bool requires_grad) {
    if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
    if (shape.empty() || shape.size() > 2)
        throw std::invalid_argument("parameter rank must be 1 or 2: " + name);
    for (int d : shape)
        if (d <= 0) throw std::invalid_argument("parameter dimensions must be positive: " + name);
    auto p = std::make_unique<Parameter>();
    p->name = name;
    p->shape = std::move(shape);
    p->value = Matrix::Zero(shape_rows(p->shape), shape_cols(p->shape));
    p->grad = Matrix::Zero(p->value.rows(), p->value.cols());
    p->requires_grad = requires_grad;
    index_[name] = params_.size();
    params_.push_back(std::move(p));
    return *params_.back();
}

Parameter& ParamStore::at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("unknown parameter: " + name);
    return *params_[it->second];
}

const Parameter& ParamStore::at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::invalid_argument("unknown parameter: " + name);
    return *params_[it->second];
}

std::vector<Parameter*> ParamStore::all() {
    std::vector<Parameter*> out;
    out.reserve(params_.size());
    for (auto& p : params_) out.push_back(p.get());
    return out;
}

std::vector<const Parameter*> ParamStore::all() const {
    std::vector<const Parameter*> out;
    out.reserve(params_.size());
    for (auto& p : params_) out.push_back(p.get());
    return out;
}

std::vector<Parameter*> ParamStore::trainable() {
    std::vector<Parameter*> out;
    for (auto& p : params_)
        if (p->requires_grad) out.push_back(p.get());
    return out;
}

const char* op_name(Tape::Op op) {
    switch (op) {
        case Tape::Op::Constant: return "constant";
        case Tape::Op::Leaf: return "leaf";
        case Tape::Op::MatMul: return "matmul";
        case Tape::Op::Add: return "add";
        case Tape::Op::AddRowVec: return "add_rowvec";
        case Tape::Op::Mul: return "mul";
        case Tape::Op::Relu: return "relu";
        case Tape::Op::Square: return "square";
        case Tape::Op::Log: return "log";
        case Tape::Op::Exp: return "exp";
        case Tape::Op::Sum: return "sum";
        case Tape::Op::Mean: return "mean";
        case Tape::Op::LogSoftmaxRows: return "log_softmax_rows";
        case Tape::Op::Rows: return "rows";
        case Tape::Op::Cols: return "cols";
        case Tape::Op::Pick: return "pick";
        case Tape::Op::ConcatRows: return "concat_rows";
        case Tape::Op::ConcatCols: return "concat_cols";
        case Tape::Op::StopGrad: return "stop_gradient";
        case Tape::Op::Scale: return "scale";
        case Tape::Op::AddScalar: return "add_scalar";
    }
    return "?";
}

void Tape::check_finite(const Matrix& m, const char* what) const {
    if (!m.allFinite())
        throw NumericError(std::string("non-finite values in ") + what);
}

Val Tape::push(Node n) {
    check_finite(n.value, op_name(n.op));
    nodes_.push_back(std::move(n));
    return Val{static_cast<int>(nodes_.size()) - 1};
}

Val Tape::constant(Matrix v) {
    Node n;
    n.op = Op::Constant;
    n.value = std::move(v);
    return push(std::move(n));
}

Val Tape::scalar(double v) {
    return constant(Matrix::Constant(1, 1, v));
}

Val Tape::leaf(Parameter& p) {
    Node n;
    n.op = Op::Leaf;
    n.value = p.value;
    n.param = &p;
    n.needs_grad = p.requires_grad;
    return push(std::move(n));
}

Val Tape::matmul(Val a, Val b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (na.value.cols() != nb.value.rows())
        throw std::invalid_argument("matmul: inner dimensions disagree");
    Node n;
    n.op = Op::MatMul;
    n.a = a.i;
    n.b = b.i;
    n.value = na.value * nb.value;
    n.needs_grad = na.needs_grad || nb.needs_grad;
    return push(std::move(n));
}

Val Tape::add(Val a, Val b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (na.value.rows() != nb.value.rows() || na.value.cols() != nb.value.cols())
        throw std::invalid_argument("add: shape mismatch");
    Node n;
    n.op = Op::Add;
    n.a = a.i;
    n.b = b.i;
    n.value = na.value + nb.value;
    n.needs_grad = na.needs_grad || nb.needs_grad;
    return push(std::move(n));
}

Val Tape::sub(Val a, Val b) {
    return add(a, scale(b, -1.0));
}

Val Tape::add_rowvec(Val x, Val bias) {
    const Node& nx = node(x);
    const Node& nb = node(bias);
    if (nb.value.rows() != 1 || nb.value.cols() != nx.value.cols())
        throw std::invalid_argument("add_rowvec: bias must be 1×cols(x)");
    Node n;
    n.op = Op::AddRowVec;
    n.a = x.i;
    n.b = bias.i;
    n.value = nx.value.rowwise() + nb.value.row(0);
    n.needs_grad = nx.needs_grad || nb.needs_grad;
    return push(std::move(n));
}

Val Tape::mul(Val a, Val b) {
    const Node& na = node(a);
    const Node& nb = node(b);
    if (na.value.rows() != nb.value.rows() || na.value.cols() != nb.value.cols())
        throw std::invalid_argument("mul: shape mismatch");
    Node n;
    n.op = Op::Mul;
    n.a = a.i;
    n.b = b.i;
    n.value = na.value.cwiseProduct(nb.value);
    n.needs_grad = na.needs_grad || nb.needs_grad;
    return push(std::move(n));
}

Val Tape::relu(Val x) {
    const Node& nx = node(x);
    Node n;
    n.op = Op::Relu;
    n.a = x.i;
    n.value = nx.value.cwiseMax(0.0);
    n.needs_grad = nx.needs_grad;
    return push(std::move(n));
}

Val Tape::square(Val x) {
    const Node& nx = node(x);
    Node n;
    n.op = Op::Square;
    n.a = x.i;
    n.value = nx.value.array().square();
    n.needs_grad = nx.needs_grad;
    return push(std::move(n));
}

Val Tape::log(Val x) {
    const Node& nx = node(x);
    Node n;
    n.op = Op::Log;
    n.a = x.i;
    n.value = nx.value.array().log();
    n.needs_grad = nx.needs_grad;
    return push(std::move(n));
}

Val Tape::exp(Val x) {
    const Node& nx = node(x);
    Node n;
    n.op = Op::Exp;
    n.a = x.i;
    n.value = nx.value.array().exp();
    n.needs_grad = nx.needs_grad;
    return push(std::move(n));
}

Val Tape::sum(Val x) {
    const Node& nx = node(x);
    Node n;
    n.op = Op::Sum;
    n.a = x.i;
    n.value = Matrix::Constant(1, 1, nx.value.sum());
    n.needs_grad = nx.needs_grad;
    return push(std::move(n));
}

Val Tape::mean(Val x) {
    const Node& nx = node(x);
    Node n;
    n.op = Op::Mean;
    n.a = x.i;
    n.value = Matrix::Constant(1, 1, nx.value.mean());
    n.needs_grad = nx.needs_grad;
    return push(std::move(n));
}

Val Tape::log_softmax_rows(Val x) {
    const Node& nx = node(x);
    Node n;
    n.op = Op::LogSoftmaxRows;
    n.a = x.i;
    n.value.resize(nx.value.rows(), nx.value.cols());
    for (Eigen::Index r = 0; r < nx.value.rows(); ++r) {
        double m = nx.value.row(r).maxCoeff();
        Eigen::ArrayXd shifted = nx.value.row(r).array() - m;
        double lse = std::log(shifted.exp().sum());
        n.value.row(r) = shifted - lse;
    }
    n.needs_grad = nx.needs_grad;
    return push(std::move(n));
}

Val Tape::rows(Val x, int start, int count) {
    const Node& nx = node(x);
    if (start < 0 || count < 0 || start + count > nx.value.rows())
        throw std::invalid_argument("rows: slice out of range");
    Node n;
    n.op = Op::Rows;
    n.a = x.i;
    n.i0 = start;
    n.i1 = count;
    n.value = nx.value.middleRows(start, count);
    n.needs_grad = nx.needs_grad;
    return push(std::move(n));
}

Val Tape::cols(Val x, int start, int count) {
    const Node& nx = node(x);
    if (start < 0 || count < 0 || start + count > nx.value.cols())
        throw std::invalid_argument("cols: slice out of range");
    Node n;
    n.op = Op::Cols;
    n.a = x.i;
    n.i0 = start;
    n.i1 = count;
    n.value = nx.value.middleCols(start, count);
    n.needs_grad = nx.needs_grad;
    return push(std::move(n));
}

Val Tape::pick(Val x, std::vector<std::pair<int, int>> rc) {
    const Node& nx = node(x);
    Node n;
    n.op = Op::Pick;
    n.a = x.i;
    n.value.resize(static_cast<Eigen::Index>(rc.size()), 1);
    for (size_t j = 0; j < rc.size(); ++j) {
        auto [r, c] = rc[j];
        if (r < 0 || r >= nx.value.rows() || c < 0 || c >= nx.value.cols())
            throw std::invalid_argument("pick: index out of range");
        n.value(static_cast<Eigen::Index>(j), 0) = nx.value(r, c);
    }
    n.idx = std::move(rc);
    n.needs_grad = nx.needs_grad;
    return push(std::move(n));
}

Val Tape::concat_rows(const std::vector<Val>& xs) {
    if (xs.empty()) throw std::invalid_argument("concat_rows: empty input");
    Eigen::Index cols = node(xs[0]).value.cols();
    Eigen::Index rows = 0;
    bool needs = false;
    for (Val v : xs) {
        if (node(v).value.cols() != cols) throw std::invalid_argument("concat_rows: column mismatch");
        rows += node(v).value.rows();
        needs = needs || node(v).needs_grad;
    }
    Node n;
    n.op = Op::ConcatRows;
    n.value.resize(rows, cols);
    Eigen::Index at = 0;
    for (Val v : xs) {
        n.value.middleRows(at, node(v).value.rows()) = node(v).value;
        at += node(v).value.rows();
        n.srcs.push_back(v.i);
    }
    n.needs_grad = needs;
    return push(std::move(n));
}

Val Tape::concat_cols(const std::vector<Val>& xs) {
    if (xs.empty()) throw std::invalid_argument("concat_cols: empty input");
    Eigen::Index rows = node(xs[0]).value.rows();
    Eigen::Index cols = 0;
    bool needs = false;
    for (Val v : xs) {
        if (node(v).value.rows() != rows) throw std::invalid_argument("concat_cols: row mismatch");
        cols += node(v).value.cols();
        needs = needs || node(v).needs_grad;
    }
    Node n;
    n.op = Op::ConcatCols;
    n.value.resize(rows, cols);
    Eigen::Index at = 0;
    for (Val v : xs) {
        n.value.middleCols(at, node(v).value.cols()) = node(v).value;
        at += node(v).value.cols();
        n.srcs.push_back(v.i);
    }
    n.needs_grad = needs;
    return push(std::move(n));
}

Val Tape::stop_gradient(Val x) {
    Node n;
    n.op = Op::StopGrad;
    n.a = x.i;
    n.value = node(x).value;
    n.needs_grad = false;
    return push(std::move(n));
}

Val Tape::scale(Val x, double s) {
    const Node& nx = node(x);
    Node n;
    n.op = Op::Scale;
    n.a = x.i;
    n.scalar = s;
    n.value = nx.value * s;
    n.needs_grad = nx.needs_grad;
    return push(std::move(n));
}

Val Tape::add_scalar(Val x, double s) {
    const Node& nx = node(x);
    Node n;
    n.op = Op::AddScalar;
    n.a = x.i;
    n.scalar = s;
    n.value = nx.value.array() + s;
    n.needs_grad = nx.needs_grad;
    return push(std::move(n));
}

void Tape::backward(Val loss) {
    Node& ln = node(loss);
    if (ln.value.rows() != 1 || ln.value.cols() != 1)
        throw std::invalid_argument("backward: loss must be scalar");

    for (Node& n : nodes_)
        if (n.needs_grad) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
    if (!ln.needs_grad) return;  // loss does not depend on any trainable parameter
    ln.grad(0, 0) = 1.0;

    auto touch = [&](int i) -> Matrix* {
        Node& src = nodes_[static_cast<size_t>(i)];
        return src.needs_grad ? &src.grad : nullptr;
    };

    for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
        Node& n = nodes_[static_cast<size_t>(i)];
        if (!n.needs_grad) continue;
        const Matrix& g = n.grad;
        check_finite(g, "backward pass");
        switch (n.op) {
            case Op::Constant:
                break;
            case Op::Leaf:
                n.param->grad += g;
                break;
            case Op::MatMul: {
                const Node& na = nodes_[static_cast<size_t>(n.a)];
                const Node& nb = nodes_[static_cast<size_t>(n.b)];
                if (Matrix* da = touch(n.a)) da->noalias() += g * nb.value.transpose();
                if (Matrix* db = touch(n.b)) db->noalias() += na.value.transpose() * g;
                break;
            }
            case Op::Add:
                if (Matrix* da = touch(n.a)) *da += g;
                if (Matrix* db = touch(n.b)) *db += g;
                break;
            case Op::AddRowVec:
                if (Matrix* da = touch(n.a)) *da += g;
                if (Matrix* db = touch(n.b)) db->row(0) += g.colwise().sum();
                break;
            case Op::Mul: {
                const Node& na = nodes_[static_cast<size_t>(n.a)];
                const Node& nb = nodes_[static_cast<size_t>(n.b)];
                if (Matrix* da = touch(n.a)) da->array() += g.array() * nb.value.array();
                if (Matrix* db = touch(n.b)) db->array() += g.array() * na.value.array();
                break;
            }
            case Op::Relu: {
                const Node& na = nodes_[static_cast<size_t>(n.a)];
                if (Matrix* da = touch(n.a))
                    da->array() += g.array() * (na.value.array() > 0.0).cast<double>();
                break;
            }
            case Op::Square: {
                const Node& na = nodes_[static_cast<size_t>(n.a)];
                if (Matrix* da = touch(n.a)) da->array() += 2.0 * g.array() * na.value.array();
                break;
            }
            case Op::Log: {
                const Node& na = nodes_[static_cast<size_t>(n.a)];
                if (Matrix* da = touch(n.a)) da->array() += g.array() / na.value.array();
                break;
            }
            case Op::Exp:
                if (Matrix* da = touch(n.a)) da->array() += g.array() * n.value.array();
                break;
            case Op::Sum: {
                if (Matrix* da = touch(n.a)) da->array() += g(0, 0);
                break;
            }
            case Op::Mean: {
                if (Matrix* da = touch(n.a))
                    da->array() += g(0, 0) / static_cast<double>(da->size());
                break;
            }
            case Op::LogSoftmaxRows: {
                if (Matrix* da = touch(n.a)) {
                    for (Eigen::Index r = 0; r < g.rows(); ++r) {
                        double gsum = g.row(r).sum();
                        da->row(r).array() +=
                            g.row(r).array() - n.value.row(r).array().exp() * gsum;
                    }
                }
                break;
            }
            case Op::Rows:
                if (Matrix* da = touch(n.a)) da->middleRows(n.i0, n.i1) += g;
                break;
            case Op::Cols:
                if (Matrix* da = touch(n.a)) da->middleCols(n.i0, n.i1) += g;
                break;
            case Op::Pick: {
                if (Matrix* da = touch(n.a))
                    for (size_t j = 0; j < n.idx.size(); ++j)
                        (*da)(n.idx[j].first, n.idx[j].second) += g(static_cast<Eigen::Index>(j), 0);
                break;
            }
            case Op::ConcatRows: {
                Eigen::Index at = 0;
                for (int s : n.srcs) {
                    Eigen::Index r = nodes_[static_cast<size_t>(s)].value.rows();
                    if (Matrix* ds = touch(s)) *ds += g.middleRows(at, r);
                    at += r;
                }
                break;
            }
            case Op::ConcatCols: {
                Eigen::Index at = 0;
                for (int s : n.srcs) {
                    Eigen::Index c = nodes_[static_cast<size_t>(s)].value.cols();
                    if (Matrix* ds = touch(s)) *ds += g.middleCols(at, c);
                    at += c;
                }
                break;
            }
            case Op::StopGrad:
                break;
            case Op::Scale:
                if (Matrix* da = touch(n.a)) *da += g * n.scalar;
                break;
            case Op::AddScalar:
                if (Matrix* da = touch(n.a)) *da += g;
                break;
        }
    }
}

}  // namespace gfnlab
