#include "swarmcl/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace swarmcl::ad {

namespace {

thread_local Tape* g_active_tape = nullptr;

struct AxisSplit {
  std::size_t outer = 1;
  std::size_t len = 1;
  std::size_t inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t d = 0; d < axis; ++d) s.outer *= shape[d];
  s.len = shape[axis];
  for (std::size_t d = axis + 1; d < shape.size(); ++d) s.inner *= shape[d];
  return s;
}

[[noreturn]] void shape_error(OpKind kind, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op_name(kind)) + ": incompatible shapes " + to_string(a) +
                   " and " + to_string(b));
}

[[noreturn]] void shape_error(OpKind kind, const Shape& a, const std::string& why) {
  throw ShapeError(std::string(op_name(kind)) + ": " + why + " (shape " + to_string(a) + ")");
}

void require_same_shape(OpKind kind, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) shape_error(kind, a.shape(), b.shape());
}

void require_rank(OpKind kind, const Tensor& a, std::size_t rank) {
  if (a.rank() != rank) shape_error(kind, a.shape(), "expected rank " + std::to_string(rank));
}

void check_finite(OpKind kind, std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NonFiniteError(std::string(op_name(kind)) + ": non-finite value at element " +
                           std::to_string(i));
    }
  }
}

}  // namespace

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kBatchedMatMul: return "batched_matmul";
    case OpKind::kConcat: return "concat";
    case OpKind::kSlice: return "slice";
    case OpKind::kReshape: return "reshape";
    case OpKind::kBiasAdd: return "bias_add";
    case OpKind::kSum: return "sum";
    case OpKind::kMean: return "mean";
    case OpKind::kTanh: return "tanh";
    case OpKind::kRelu: return "relu";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kSquare: return "square";
    case OpKind::kSqrt: return "sqrt";
    case OpKind::kScale: return "scale";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (element_count(shape_) != data_.size()) {
    throw ShapeError("tensor: shape " + to_string(shape_) + " does not match " +
                     std::to_string(data_.size()) + " values");
  }
  check_finite(OpKind::kLeaf, data_);
}

Tensor Tensor::zeros(Shape shape) {
  const std::size_t n = element_count(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::scalar(double value) { return Tensor({}, {value}); }

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

double Tensor::at(std::size_t row, std::size_t col) const {
  if (rank() != 2) throw ShapeError("at(row, col) on tensor of shape " + to_string(shape_));
  return data_.at(row * shape_[1] + col);
}

double Tensor::item() const {
  if (!is_scalar()) throw ShapeError("item() on tensor of shape " + to_string(shape_));
  return data_[0];
}

// ---------------------------------------------------------------------------
// Tape

NodeId Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return nodes_.size() - 1;
}

Tensor Tape::leaf(const Tensor& value, bool requires_grad) {
  if (value.tracked()) {
    throw std::logic_error("tape: tensor is already tracked; use detached() to re-register");
  }
  Node node;
  node.kind = OpKind::kLeaf;
  node.shape = value.shape();
  node.value = value.data_;
  node.requires_grad = requires_grad;
  Tensor out = value;
  out.tape_ = this;
  out.node_ = push(std::move(node));
  return out;
}

Tensor Tape::variable(const Tensor& value) { return leaf(value, true); }

Tensor Tape::constant(const Tensor& value) { return leaf(value, false); }

TapeScope::TapeScope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }

TapeScope::~TapeScope() { g_active_tape = previous_; }

Tape* active_tape() { return g_active_tape; }

struct OpParams {
  std::size_t axis = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  double factor = 1.0;
};

// Builds the result tensor and, when a tape is recording and any input is
// tracked on it, appends the matching node.
struct OpRecorder {
  using Params = OpParams;

  static Tensor make(OpKind kind, std::span<const Tensor* const> inputs, Shape shape,
                     std::vector<double> value, Params params = {}) {
    check_finite(kind, value);
    Tensor out;
    out.shape_ = std::move(shape);
    out.data_ = std::move(value);

    Tape* tape = g_active_tape;
    if (tape == nullptr) return out;

    bool record = false;
    for (const Tensor* in : inputs) {
      if (in->tape_ == tape) {
        record = true;
      } else if (in->tape_ != nullptr) {
        throw std::logic_error(std::string(op_name(kind)) +
                               ": input is tracked on a tape that is not active");
      }
    }
    if (!record) return out;

    Tape::Node node;
    node.kind = kind;
    node.inputs.reserve(inputs.size());
    for (const Tensor* in : inputs) {
      NodeId id = in->node_;
      if (in->tape_ == nullptr) id = tape->constant(*in).node_;
      node.requires_grad = node.requires_grad || tape->nodes_[id].requires_grad;
      node.inputs.push_back(id);
    }
    node.shape = out.shape_;
    node.value = out.data_;
    node.axis = params.axis;
    node.begin = params.begin;
    node.end = params.end;
    node.factor = params.factor;
    out.tape_ = tape;
    out.node_ = tape->push(std::move(node));
    return out;
  }

  static Tensor make(OpKind kind, std::initializer_list<const Tensor*> inputs, Shape shape,
                     std::vector<double> value, Params params = {}) {
    return make(kind, std::span<const Tensor* const>(inputs.begin(), inputs.size()),
                std::move(shape), std::move(value), params);
  }

  static std::span<const double> data(const Tensor& t) { return t.data_; }
};

// ---------------------------------------------------------------------------
// Forward ops

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(OpKind::kAdd, a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return OpRecorder::make(OpKind::kAdd, {&a, &b}, a.shape(), std::move(out));
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(OpKind::kSub, a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return OpRecorder::make(OpKind::kSub, {&a, &b}, a.shape(), std::move(out));
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(OpKind::kMul, a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
  return OpRecorder::make(OpKind::kMul, {&a, &b}, a.shape(), std::move(out));
}

namespace {

// out[m x p] += a[m x k] * b[k x p]
void gemm_acc(const double* a, const double* b, double* out, std::size_t m, std::size_t k,
              std::size_t p) {
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out + i * p;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double aik = a[i * k + kk];
      const double* brow = b + kk * p;
      for (std::size_t j = 0; j < p; ++j) row[j] += aik * brow[j];
    }
  }
}

// ga[m x k] += g[m x p] * b^T
void gemm_grad_a(const double* g, const double* b, double* ga, std::size_t m, std::size_t k,
                 std::size_t p) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t kk = 0; kk < k; ++kk) {
      double acc = 0.0;
      for (std::size_t j = 0; j < p; ++j) acc += g[i * p + j] * b[kk * p + j];
      ga[i * k + kk] += acc;
    }
  }
}

// gb[k x p] += a^T * g[m x p]
void gemm_grad_b(const double* a, const double* g, double* gb, std::size_t m, std::size_t k,
                 std::size_t p) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double aik = a[i * k + kk];
      double* row = gb + kk * p;
      for (std::size_t j = 0; j < p; ++j) row[j] += aik * g[i * p + j];
    }
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(OpKind::kMatMul, a, 2);
  require_rank(OpKind::kMatMul, b, 2);
  if (a.dim(1) != b.dim(0)) shape_error(OpKind::kMatMul, a.shape(), b.shape());
  const std::size_t m = a.dim(0), k = a.dim(1), p = b.dim(1);
  std::vector<double> out(m * p, 0.0);
  gemm_acc(a.data().data(), b.data().data(), out.data(), m, k, p);
  return OpRecorder::make(OpKind::kMatMul, {&a, &b}, {m, p}, std::move(out));
}

Tensor batched_matmul(const Tensor& a, const Tensor& b) {
  require_rank(OpKind::kBatchedMatMul, a, 3);
  require_rank(OpKind::kBatchedMatMul, b, 3);
  if (a.dim(0) != b.dim(0) || a.dim(2) != b.dim(1)) {
    shape_error(OpKind::kBatchedMatMul, a.shape(), b.shape());
  }
  const std::size_t batch = a.dim(0), m = a.dim(1), k = a.dim(2), p = b.dim(2);
  std::vector<double> out(batch * m * p, 0.0);
  for (std::size_t s = 0; s < batch; ++s) {
    gemm_acc(a.data().data() + s * m * k, b.data().data() + s * k * p, out.data() + s * m * p, m,
             k, p);
  }
  return OpRecorder::make(OpKind::kBatchedMatMul, {&a, &b}, {batch, m, p}, std::move(out));
}

Tensor concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Shape& first = parts[0].shape();
  if (axis >= first.size()) shape_error(OpKind::kConcat, first, "axis out of range");
  Shape shape = first;
  shape[axis] = 0;
  for (const Tensor& t : parts) {
    if (t.rank() != first.size()) shape_error(OpKind::kConcat, first, t.shape());
    for (std::size_t d = 0; d < first.size(); ++d) {
      if (d != axis && t.dim(d) != first[d]) shape_error(OpKind::kConcat, first, t.shape());
    }
    shape[axis] += t.dim(axis);
  }
  const AxisSplit out_split = split_at(shape, axis);
  std::vector<double> out(element_count(shape));
  std::size_t offset = 0;
  for (const Tensor& t : parts) {
    const std::size_t len = t.dim(axis);
    for (std::size_t o = 0; o < out_split.outer; ++o) {
      const double* src = t.data().data() + o * len * out_split.inner;
      double* dst = out.data() + (o * out_split.len + offset) * out_split.inner;
      std::copy_n(src, len * out_split.inner, dst);
    }
    offset += len;
  }
  std::vector<const Tensor*> inputs;
  inputs.reserve(parts.size());
  for (const Tensor& t : parts) inputs.push_back(&t);
  return OpRecorder::make(OpKind::kConcat, inputs, std::move(shape), std::move(out),
                          {.axis = axis});
}

Tensor concat(std::initializer_list<Tensor> parts, std::size_t axis) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()), axis);
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end) {
  if (axis >= a.rank()) shape_error(OpKind::kSlice, a.shape(), "axis out of range");
  if (begin > end || end > a.dim(axis)) {
    shape_error(OpKind::kSlice, a.shape(),
                "range [" + std::to_string(begin) + ", " + std::to_string(end) + ") out of bounds");
  }
  const AxisSplit s = split_at(a.shape(), axis);
  Shape shape = a.shape();
  shape[axis] = end - begin;
  std::vector<double> out(element_count(shape));
  const std::size_t chunk = (end - begin) * s.inner;
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(a.data().data() + (o * s.len + begin) * s.inner, chunk, out.data() + o * chunk);
  }
  return OpRecorder::make(OpKind::kSlice, {&a}, std::move(shape), std::move(out),
                          {.axis = axis, .begin = begin, .end = end});
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (element_count(shape) != a.size()) shape_error(OpKind::kReshape, a.shape(), shape);
  std::vector<double> out(a.data().begin(), a.data().end());
  return OpRecorder::make(OpKind::kReshape, {&a}, std::move(shape), std::move(out));
}

Tensor bias_add(const Tensor& a, const Tensor& bias) {
  require_rank(OpKind::kBiasAdd, a, 2);
  require_rank(OpKind::kBiasAdd, bias, 1);
  if (a.dim(1) != bias.dim(0)) shape_error(OpKind::kBiasAdd, a.shape(), bias.shape());
  const std::size_t rows = a.dim(0), cols = a.dim(1);
  std::vector<double> out(a.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = a[r * cols + c] + bias[c];
  }
  return OpRecorder::make(OpKind::kBiasAdd, {&a, &bias}, a.shape(), std::move(out));
}

Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  return OpRecorder::make(OpKind::kSum, {&a}, {}, {acc});
}

Tensor mean(const Tensor& a) {
  if (a.size() == 0) shape_error(OpKind::kMean, a.shape(), "empty tensor");
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  return OpRecorder::make(OpKind::kMean, {&a}, {}, {acc / static_cast<double>(a.size())});
}

Tensor tanh(const Tensor& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(a[i]);
  return OpRecorder::make(OpKind::kTanh, {&a}, a.shape(), std::move(out));
}

Tensor relu(const Tensor& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] > 0.0 ? a[i] : 0.0;
  return OpRecorder::make(OpKind::kRelu, {&a}, a.shape(), std::move(out));
}

Tensor softmax(const Tensor& a) {
  if (a.rank() == 0) shape_error(OpKind::kSoftmax, a.shape(), "needs at least one axis");
  const std::size_t cols = a.shape().back();
  if (cols == 0) shape_error(OpKind::kSoftmax, a.shape(), "empty last axis");
  const std::size_t rows = a.size() / cols;
  std::vector<double> out(a.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = a.data().data() + r * cols;
    double* y = out.data() + r * cols;
    const double peak = *std::max_element(x, x + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      y[c] = std::exp(x[c] - peak);
      total += y[c];
    }
    for (std::size_t c = 0; c < cols; ++c) y[c] /= total;
  }
  return OpRecorder::make(OpKind::kSoftmax, {&a}, a.shape(), std::move(out));
}

Tensor square(const Tensor& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * a[i];
  return OpRecorder::make(OpKind::kSquare, {&a}, a.shape(), std::move(out));
}

Tensor sqrt(const Tensor& a) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (a[i] < 0.0) {
      throw NonFiniteError("sqrt: negative input at element " + std::to_string(i));
    }
    out[i] = std::sqrt(a[i]);
  }
  return OpRecorder::make(OpKind::kSqrt, {&a}, a.shape(), std::move(out));
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * factor;
  return OpRecorder::make(OpKind::kScale, {&a}, a.shape(), std::move(out), {.factor = factor});
}

// ---------------------------------------------------------------------------
// Backward

Tensor Gradients::wrt(const Tensor& t) const {
  if (t.tape() != tape_) throw std::invalid_argument("gradient query for a tensor on another tape");
  const auto& g = grads_.at(t.node());
  if (g.empty()) return Tensor::zeros(t.shape());
  return Tensor(t.shape(), g);
}

std::span<const double> Gradients::raw(NodeId id) const { return grads_.at(id); }

Gradients backward(const Tape& tape, const Tensor& root) {
  if (root.tape() != &tape) throw std::invalid_argument("backward: root is not on this tape");
  if (!root.is_scalar()) {
    throw ShapeError("backward: root must be a scalar, got shape " + to_string(root.shape()));
  }

  const auto& nodes = tape.nodes_;
  Gradients out;
  out.tape_ = &tape;
  out.grads_.resize(nodes.size());
  out.grads_[root.node()] = {1.0};

  auto& grads = out.grads_;
  auto accumulator = [&](NodeId id) -> double* {
    if (!nodes[id].requires_grad) return nullptr;
    auto& g = grads[id];
    if (g.empty()) g.assign(nodes[id].value.size(), 0.0);
    return g.data();
  };

  for (NodeId id = root.node() + 1; id-- > 0;) {
    const auto& node = nodes[id];
    if (grads[id].empty() || !node.requires_grad) continue;
    const std::vector<double>& g = grads[id];
    const std::size_t n = g.size();

    switch (node.kind) {
      case OpKind::kLeaf:
        break;
      case OpKind::kAdd:
      case OpKind::kSub: {
        const double sign = node.kind == OpKind::kSub ? -1.0 : 1.0;
        if (double* ga = accumulator(node.inputs[0])) {
          for (std::size_t i = 0; i < n; ++i) ga[i] += g[i];
        }
        if (double* gb = accumulator(node.inputs[1])) {
          for (std::size_t i = 0; i < n; ++i) gb[i] += sign * g[i];
        }
        break;
      }
      case OpKind::kMul: {
        const auto& a = nodes[node.inputs[0]].value;
        const auto& b = nodes[node.inputs[1]].value;
        if (double* ga = accumulator(node.inputs[0])) {
          for (std::size_t i = 0; i < n; ++i) ga[i] += g[i] * b[i];
        }
        if (double* gb = accumulator(node.inputs[1])) {
          for (std::size_t i = 0; i < n; ++i) gb[i] += g[i] * a[i];
        }
        break;
      }
      case OpKind::kMatMul:
      case OpKind::kBatchedMatMul: {
        const auto& an = nodes[node.inputs[0]];
        const auto& bn = nodes[node.inputs[1]];
        const bool batched = node.kind == OpKind::kBatchedMatMul;
        const std::size_t batch = batched ? an.shape[0] : 1;
        const std::size_t m = an.shape[batched ? 1 : 0];
        const std::size_t k = an.shape[batched ? 2 : 1];
        const std::size_t p = bn.shape[batched ? 2 : 1];
        double* ga = accumulator(node.inputs[0]);
        double* gb = accumulator(node.inputs[1]);
        for (std::size_t s = 0; s < batch; ++s) {
          const double* gs = g.data() + s * m * p;
          if (ga) gemm_grad_a(gs, bn.value.data() + s * k * p, ga + s * m * k, m, k, p);
          if (gb) gemm_grad_b(an.value.data() + s * m * k, gs, gb + s * k * p, m, k, p);
        }
        break;
      }
      case OpKind::kConcat: {
        const AxisSplit out_split = split_at(node.shape, node.axis);
        std::size_t offset = 0;
        for (NodeId in : node.inputs) {
          const std::size_t len = nodes[in].shape[node.axis];
          if (double* gi = accumulator(in)) {
            for (std::size_t o = 0; o < out_split.outer; ++o) {
              const double* src = g.data() + (o * out_split.len + offset) * out_split.inner;
              double* dst = gi + o * len * out_split.inner;
              for (std::size_t e = 0; e < len * out_split.inner; ++e) dst[e] += src[e];
            }
          }
          offset += len;
        }
        break;
      }
      case OpKind::kSlice: {
        if (double* gi = accumulator(node.inputs[0])) {
          const AxisSplit s = split_at(nodes[node.inputs[0]].shape, node.axis);
          const std::size_t chunk = (node.end - node.begin) * s.inner;
          for (std::size_t o = 0; o < s.outer; ++o) {
            double* dst = gi + (o * s.len + node.begin) * s.inner;
            const double* src = g.data() + o * chunk;
            for (std::size_t e = 0; e < chunk; ++e) dst[e] += src[e];
          }
        }
        break;
      }
      case OpKind::kReshape: {
        if (double* gi = accumulator(node.inputs[0])) {
          for (std::size_t i = 0; i < n; ++i) gi[i] += g[i];
        }
        break;
      }
      case OpKind::kBiasAdd: {
        const std::size_t cols = node.shape[1];
        const std::size_t rows = node.shape[0];
        if (double* ga = accumulator(node.inputs[0])) {
          for (std::size_t i = 0; i < n; ++i) ga[i] += g[i];
        }
        if (double* gb = accumulator(node.inputs[1])) {
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) gb[c] += g[r * cols + c];
          }
        }
        break;
      }
      case OpKind::kSum:
      case OpKind::kMean: {
        if (double* gi = accumulator(node.inputs[0])) {
          const std::size_t count = nodes[node.inputs[0]].value.size();
          const double v = node.kind == OpKind::kMean ? g[0] / static_cast<double>(count) : g[0];
          for (std::size_t i = 0; i < count; ++i) gi[i] += v;
        }
        break;
      }
      case OpKind::kTanh: {
        if (double* gi = accumulator(node.inputs[0])) {
          for (std::size_t i = 0; i < n; ++i) {
            const double y = node.value[i];
            gi[i] += g[i] * (1.0 - y * y);
          }
        }
        break;
      }
      case OpKind::kRelu: {
        if (double* gi = accumulator(node.inputs[0])) {
          const auto& x = nodes[node.inputs[0]].value;
          for (std::size_t i = 0; i < n; ++i) gi[i] += x[i] > 0.0 ? g[i] : 0.0;
        }
        break;
      }
      case OpKind::kSoftmax: {
        if (double* gi = accumulator(node.inputs[0])) {
          const std::size_t cols = node.shape.back();
          const std::size_t rows = n / cols;
          for (std::size_t r = 0; r < rows; ++r) {
            const double* y = node.value.data() + r * cols;
            const double* gr = g.data() + r * cols;
            double dot = 0.0;
            for (std::size_t c = 0; c < cols; ++c) dot += y[c] * gr[c];
            for (std::size_t c = 0; c < cols; ++c) gi[r * cols + c] += y[c] * (gr[c] - dot);
          }
        }
        break;
      }
      case OpKind::kSquare: {
        if (double* gi = accumulator(node.inputs[0])) {
          const auto& x = nodes[node.inputs[0]].value;
          for (std::size_t i = 0; i < n; ++i) gi[i] += 2.0 * x[i] * g[i];
        }
        break;
      }
      case OpKind::kSqrt: {
        if (double* gi = accumulator(node.inputs[0])) {
          for (std::size_t i = 0; i < n; ++i) {
            if (node.value[i] == 0.0 && g[i] != 0.0) {
              throw NonFiniteError("sqrt: gradient undefined at zero (element " +
                                   std::to_string(i) + ")");
            }
            if (g[i] != 0.0) gi[i] += g[i] / (2.0 * node.value[i]);
          }
        }
        break;
      }
      case OpKind::kScale: {
        if (double* gi = accumulator(node.inputs[0])) {
          for (std::size_t i = 0; i < n; ++i) gi[i] += node.factor * g[i];
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace swarmcl::ad
