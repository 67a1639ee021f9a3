#pragma once

// Define-by-run reverse-mode differentiation over small dense tensors.
//
// A Tape records every op whose inputs are tracked on the tape that is
// active on the current thread (see TapeScope). Node ids are assigned in
// creation order, so inputs always have smaller ids than the node that
// consumes them and the backward pass is a single descending sweep.
//
// Shapes are explicit. The only implicit expansion is scale() by a scalar;
// bias_add() is the one row-broadcasting op and checks its shapes strictly.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarmcl::ad {

using Shape = std::vector<std::size_t>;
using NodeId = std::size_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

std::string to_string(const Shape& shape);
std::size_t element_count(const Shape& shape);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Tape;

class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(Shape shape);
  static Tensor scalar(double value);
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  double operator[](std::size_t i) const { return data_[i]; }
  double at(std::size_t row, std::size_t col) const;
  double item() const;

  bool is_scalar() const { return data_.size() == 1; }
  bool tracked() const { return tape_ != nullptr; }
  const Tape* tape() const { return tape_; }
  NodeId node() const { return node_; }

  // Same values, detached from any tape.
  Tensor detached() const { return Tensor(shape_, data_); }

 private:
  friend class Tape;
  friend struct OpRecorder;

  Shape shape_;
  std::vector<double> data_;
  Tape* tape_ = nullptr;
  NodeId node_ = kNoNode;
};

enum class OpKind : std::uint8_t {
  kLeaf,
  kAdd,
  kSub,
  kMul,
  kMatMul,
  kBatchedMatMul,
  kConcat,
  kSlice,
  kReshape,
  kBiasAdd,
  kSum,
  kMean,
  kTanh,
  kRelu,
  kSoftmax,
  kSquare,
  kSqrt,
  kScale,
};

const char* op_name(OpKind kind);

class Gradients;

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Registers a differentiable leaf.
  Tensor variable(const Tensor& value);
  // Registers a non-differentiable leaf. Ops also do this implicitly for
  // untracked inputs mixed with tracked ones.
  Tensor constant(const Tensor& value);

  std::size_t size() const { return nodes_.size(); }

 private:
  friend struct OpRecorder;
  friend Gradients backward(const Tape& tape, const Tensor& root);

  struct Node {
    OpKind kind = OpKind::kLeaf;
    std::vector<NodeId> inputs;
    Shape shape;
    std::vector<double> value;
    bool requires_grad = false;
    // Op parameters: axis/begin/end for slice and concat, factor for scale.
    std::size_t axis = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
    double factor = 1.0;
  };

  NodeId push(Node node);
  Tensor leaf(const Tensor& value, bool requires_grad);

  std::vector<Node> nodes_;
};

// Makes `tape` the recording target for the current thread until destroyed.
class TapeScope {
 public:
  explicit TapeScope(Tape& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape* previous_;
};

Tape* active_tape();

class Gradients {
 public:
  // Gradient of the root with respect to `t`; zeros when `t` does not
  // influence the root.
  Tensor wrt(const Tensor& t) const;
  std::span<const double> raw(NodeId id) const;

 private:
  friend Gradients backward(const Tape& tape, const Tensor& root);
  const Tape* tape_ = nullptr;
  std::vector<std::vector<double>> grads_;
  std::vector<Shape> shapes_;
};

Gradients backward(const Tape& tape, const Tensor& root);

// Elementwise, identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
// [m x k] * [k x p]
Tensor matmul(const Tensor& a, const Tensor& b);
// [B x m x k] * [B x k x p]
Tensor batched_matmul(const Tensor& a, const Tensor& b);
Tensor concat(std::span<const Tensor> parts, std::size_t axis);
Tensor concat(std::initializer_list<Tensor> parts, std::size_t axis);
// Half-open range [begin, end) along `axis`.
Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end);
Tensor reshape(const Tensor& a, Shape shape);
// [m x n] + [n], added to every row.
Tensor bias_add(const Tensor& a, const Tensor& bias);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
// Over the last axis.
Tensor softmax(const Tensor& a);
Tensor square(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor scale(const Tensor& a, double factor);

}  // namespace swarmcl::ad
