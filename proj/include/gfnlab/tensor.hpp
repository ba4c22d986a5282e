#pragma once

#include "gfnlab/common.hpp"

#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gfnlab {

// Named, shaped f64 tensor participating in the differentiable graph.
// Rank 1 shapes [n] are stored as a 1×n row vector, rank 2 shapes [r,c]
// as an r×c matrix. Values must stay finite at all times.
struct Parameter {
    std::string name;
    std::vector<int> shape;
    Matrix value;
    Matrix grad;
    bool requires_grad = true;

    Eigen::Index size() const { return value.size(); }
    void zero_grad() { grad.setZero(); }
};

// Owns parameters with stable addresses; iteration follows creation order,
// which also fixes checkpoint blob order.
class ParamStore {
  public:
    Parameter& create(const std::string& name, std::vector<int> shape, bool requires_grad = true);
    Parameter& at(const std::string& name);
    const Parameter& at(const std::string& name) const;
    bool contains(const std::string& name) const { return index_.count(name) > 0; }
    std::vector<Parameter*> all();
    std::vector<const Parameter*> all() const;
    std::vector<Parameter*> trainable();

  private:
    std::vector<std::unique_ptr<Parameter>> params_;
    std::unordered_map<std::string, size_t> index_;
};

// Handle into a Tape.
struct Val {
    int i = -1;
};

// Define-by-run reverse-mode tape over dense f64 matrices. Graphs are built
// per batch and discarded; nodes are immutable once created. Every forward
// and backward result is checked for NaN/Inf and aborts with NumericError.
class Tape {
  public:
    enum class Op {
        Constant,
        Leaf,
        MatMul,
        Add,
        AddRowVec,
        Mul,
        Relu,
        Square,
        Log,
        Exp,
        Sum,
        Mean,
        LogSoftmaxRows,
        Rows,
        Cols,
        Pick,
        ConcatRows,
        ConcatCols,
        StopGrad,
        Scale,
        AddScalar,
    };

    Val constant(Matrix v);
    Val scalar(double v);
    Val leaf(Parameter& p);

    Val matmul(Val a, Val b);
    Val add(Val a, Val b);
    Val sub(Val a, Val b);
    // x (n×c) + bias (1×c), broadcast over rows
    Val add_rowvec(Val x, Val bias);
    Val mul(Val a, Val b);
    Val relu(Val x);
    Val square(Val x);
    Val log(Val x);
    Val exp(Val x);
    Val sum(Val x);
    Val mean(Val x);
    // Numerically stable row-wise log-softmax (shifted max).
    Val log_softmax_rows(Val x);
    // Gather-by-index family: contiguous row/column slices and entry picks.
    Val rows(Val x, int start, int count);
    Val cols(Val x, int start, int count);
    // (row, col) picks, result is len×1
    Val pick(Val x, std::vector<std::pair<int, int>> rc);
    Val concat_rows(const std::vector<Val>& xs);
    Val concat_cols(const std::vector<Val>& xs);
    // Identity in forward, blocks all gradient flow.
    Val stop_gradient(Val x);
    Val scale(Val x, double s);
    Val add_scalar(Val x, double s);

    const Matrix& value(Val v) const { return node(v).value; }
    const Matrix& grad(Val v) const { return node(v).grad; }

    // Reverse sweep from a scalar loss; accumulates into Parameter::grad.
    void backward(Val loss);

    int size() const { return static_cast<int>(nodes_.size()); }

  private:
    struct Node {
        Op op;
        int a = -1;
        int b = -1;
        std::vector<int> srcs;                  // concat inputs
        Matrix value;
        Matrix grad;
        Parameter* param = nullptr;             // Leaf
        double scalar = 0.0;                    // Scale / AddScalar
        int i0 = 0, i1 = 0;                     // Rows / Cols
        std::vector<std::pair<int, int>> idx;   // Pick
        bool needs_grad = false;
    };

    Node& node(Val v) { return nodes_.at(static_cast<size_t>(v.i)); }
    const Node& node(Val v) const { return nodes_.at(static_cast<size_t>(v.i)); }
    Val push(Node n);
    void check_finite(const Matrix& m, const char* what) const;

    std::vector<Node> nodes_;
};

const char* op_name(Tape::Op op);

}  // namespace gfnlab
