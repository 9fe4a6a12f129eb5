#include "metatag/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Core>

namespace metatag {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using MatrixMap = Eigen::Map<RowMatrix>;

struct MatDims {
  std::size_t rows;
  std::size_t cols;
};

// Rank-1 tensors act as column vectors on the right of a product.
MatDims as_matrix(const Shape& s) {
  if (s.size() == 1) return {s[0], 1};
  return {s[0], s[1]};
}

[[noreturn]] void shape_fail(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_to_string(a) +
                   " and " + shape_to_string(b));
}

}  // namespace

std::size_t numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ',';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

double Rng::gaussian(double mean, double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  return dist(engine_);
}

double Rng::uniform() {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

bool Rng::bernoulli(double p) { return uniform() < p; }

std::size_t Rng::below(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

// ---------------------------------------------------------------------------
// Tensor

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad)
    : shape_(std::move(shape)), values_(std::move(values)), requires_grad_(requires_grad) {
  if (shape_.empty()) throw ShapeError("tensor shape must have at least one dimension");
  for (std::size_t d : shape_) {
    if (d == 0) throw ShapeError("tensor dimensions must be >= 1, got " + shape_to_string(shape_));
  }
  if (numel(shape_) != values_.size()) {
    throw ShapeError("shape " + shape_to_string(shape_) + " needs " +
                     std::to_string(numel(shape_)) + " values, got " +
                     std::to_string(values_.size()));
  }
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  const std::size_t n = numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::gaussian(Shape shape, Rng& rng, double mean, double variance,
                        bool requires_grad) {
  const std::size_t n = numel(shape);
  std::vector<double> values(n);
  const double stddev = std::sqrt(variance);
  for (double& v : values) v = rng.gaussian(mean, stddev);
  return Tensor(std::move(shape), std::move(values), requires_grad);
}

Tensor Tensor::from_values(Shape shape, std::vector<double> values, bool requires_grad) {
  return Tensor(std::move(shape), std::move(values), requires_grad);
}

void Tensor::set_requires_grad(bool on) {
  requires_grad_ = on;
  if (!on) clear_grad();
}

std::span<const double> Tensor::grad() const {
  if (!has_grad_) return {};
  return grad_;
}

void Tensor::accumulate_grad(std::span<const double> delta) {
  if (!requires_grad_) return;
  if (delta.size() != values_.size()) {
    throw ShapeError("gradient size mismatch for tensor '" + name_ + "'");
  }
  if (!has_grad_) {
    grad_.assign(values_.size(), 0.0);
    has_grad_ = true;
  }
  for (std::size_t i = 0; i < delta.size(); ++i) grad_[i] += delta[i];
}

void Tensor::clear_grad() {
  grad_.clear();
  has_grad_ = false;
}

// ---------------------------------------------------------------------------
// Graph

const char* op_name(OpKind kind) {
  switch (kind) {
    case OpKind::kParam: return "param";
    case OpKind::kConstant: return "constant";
    case OpKind::kMatmul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kMul: return "mul";
    case OpKind::kScale: return "scale";
    case OpKind::kConcat: return "concat";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kTanh: return "tanh";
    case OpKind::kElu: return "elu";
    case OpKind::kSum: return "sum";
    case OpKind::kSlice: return "slice";
    case OpKind::kReshape: return "reshape";
    case OpKind::kTranspose: return "transpose";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kSoftmaxXent: return "softmax_xent";
    case OpKind::kGatherRows: return "gather_rows";
  }
  return "?";
}

const Graph::Node& Graph::node(Var v) const {
  if (v.id >= nodes_.size()) throw GraphError("invalid graph variable");
  return nodes_[v.id];
}

std::span<const double> Graph::data(std::size_t id) const {
  const Node& n = nodes_[id];
  if (n.kind == OpKind::kParam) return n.param->values();
  return n.value;
}

std::span<const double> Graph::value(Var v) const {
  node(v);
  return data(v.id);
}

double Graph::scalar(Var v) const {
  auto values = value(v);
  if (values.size() != 1) throw ShapeError("scalar(): tensor has shape " + shape_to_string(shape(v)));
  return values[0];
}

Var Graph::push(Node&& n) {
  for (std::size_t in : n.inputs) {
    if (nodes_[in].needs_grad) {
      n.needs_grad = true;
      break;
    }
  }
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

void Graph::clear() {
  nodes_.clear();
  bound_params_.clear();
  consumed_ = false;
}

Var Graph::bind(const Tensor& t, Tensor* target) {
  if (auto it = bound_params_.find(&t); it != bound_params_.end()) return Var{it->second};
  if (t.size() == 0) throw ShapeError("cannot bind an empty tensor");
  Node n;
  n.kind = OpKind::kParam;
  n.shape = t.shape();
  n.param = &t;
  n.target = target;
  n.needs_grad = target != nullptr && t.requires_grad();
  Var v = push(std::move(n));
  bound_params_.emplace(&t, v.id);
  return v;
}

Var Graph::param(Tensor& t) { return bind(t, &t); }

Var Graph::param(const Tensor& t) { return bind(t, nullptr); }

Var Graph::constant(Shape shape, std::vector<double> values) {
  if (numel(shape) != values.size()) {
    throw ShapeError("constant: shape " + shape_to_string(shape) + " does not match " +
                     std::to_string(values.size()) + " values");
  }
  Node n;
  n.kind = OpKind::kConstant;
  n.shape = std::move(shape);
  n.value = std::move(values);
  return push(std::move(n));
}

Var Graph::constant(const Tensor& t) {
  return constant(t.shape(), std::vector<double>(t.values().begin(), t.values().end()));
}

Var Graph::detach(Var x) {
  auto v = value(x);
  return constant(shape(x), std::vector<double>(v.begin(), v.end()));
}

Var Graph::matmul(Var a, Var b) {
  const Shape& sa = shape(a);
  const Shape& sb = shape(b);
  if (sa.size() != 2 || sb.empty() || sb.size() > 2) shape_fail("matmul", sa, sb);
  const MatDims da = as_matrix(sa);
  const MatDims db = as_matrix(sb);
  if (da.cols != db.rows) shape_fail("matmul", sa, sb);
  Node n;
  n.kind = OpKind::kMatmul;
  n.inputs = {a.id, b.id};
  n.shape = sb.size() == 1 ? Shape{da.rows} : Shape{da.rows, db.cols};
  n.value.resize(da.rows * db.cols);
  if (da.rows * db.cols > 0) {
    MatrixMap out(n.value.data(), da.rows, db.cols);
    if (da.cols == 0) {
      out.setZero();
    } else {
      ConstMatrixMap ma(data(a.id).data(), da.rows, da.cols);
      ConstMatrixMap mb(data(b.id).data(), db.rows, db.cols);
      out.noalias() = ma * mb;
    }
  }
  return push(std::move(n));
}

Var Graph::add(Var a, Var b) {
  if (shape(a) != shape(b)) shape_fail("add", shape(a), shape(b));
  auto va = value(a);
  auto vb = value(b);
  Node n;
  n.kind = OpKind::kAdd;
  n.inputs = {a.id, b.id};
  n.shape = shape(a);
  n.value.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = va[i] + vb[i];
  return push(std::move(n));
}

Var Graph::mul(Var a, Var b) {
  if (shape(a) != shape(b)) shape_fail("mul", shape(a), shape(b));
  auto va = value(a);
  auto vb = value(b);
  Node n;
  n.kind = OpKind::kMul;
  n.inputs = {a.id, b.id};
  n.shape = shape(a);
  n.value.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = va[i] * vb[i];
  return push(std::move(n));
}

Var Graph::scale(Var a, double factor) {
  auto va = value(a);
  Node n;
  n.kind = OpKind::kScale;
  n.inputs = {a.id};
  n.shape = shape(a);
  n.factor = factor;
  n.value.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = va[i] * factor;
  return push(std::move(n));
}

Var Graph::concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Shape& first = shape(parts[0]);
  if (axis >= first.size()) {
    throw ShapeError("concat: axis " + std::to_string(axis) + " out of range for " +
                     shape_to_string(first));
  }
  Shape out_shape = first;
  out_shape[axis] = 0;
  for (Var p : parts) {
    const Shape& s = shape(p);
    if (s.size() != first.size()) shape_fail("concat", first, s);
    for (std::size_t d = 0; d < s.size(); ++d) {
      if (d != axis && s[d] != first[d]) shape_fail("concat", first, s);
    }
    out_shape[axis] += s[axis];
  }
  std::size_t outer = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= first[d];

  Node n;
  n.kind = OpKind::kConcat;
  n.shape = out_shape;
  n.a0 = axis;
  n.value.reserve(numel(out_shape));
  for (std::size_t o = 0; o < outer; ++o) {
    for (Var p : parts) {
      auto v = value(p);
      const std::size_t chunk = v.size() / outer;
      n.value.insert(n.value.end(), v.begin() + o * chunk, v.begin() + (o + 1) * chunk);
    }
  }
  n.inputs.reserve(parts.size());
  for (Var p : parts) n.inputs.push_back(p.id);
  return push(std::move(n));
}

Var Graph::sigmoid(Var a) {
  auto va = value(a);
  Node n;
  n.kind = OpKind::kSigmoid;
  n.inputs = {a.id};
  n.shape = shape(a);
  n.value.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = 1.0 / (1.0 + std::exp(-va[i]));
  return push(std::move(n));
}

Var Graph::tanh(Var a) {
  auto va = value(a);
  Node n;
  n.kind = OpKind::kTanh;
  n.inputs = {a.id};
  n.shape = shape(a);
  n.value.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = std::tanh(va[i]);
  return push(std::move(n));
}

Var Graph::elu(Var a) {
  auto va = value(a);
  Node n;
  n.kind = OpKind::kElu;
  n.inputs = {a.id};
  n.shape = shape(a);
  n.value.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) {
    n.value[i] = va[i] > 0.0 ? va[i] : std::expm1(va[i]);
  }
  return push(std::move(n));
}

Var Graph::sum(Var a) {
  auto va = value(a);
  Node n;
  n.kind = OpKind::kSum;
  n.inputs = {a.id};
  n.shape = {1};
  n.value = {std::accumulate(va.begin(), va.end(), 0.0)};
  return push(std::move(n));
}

Var Graph::slice(Var a, std::size_t begin, std::size_t end) {
  auto va = value(a);
  if (begin >= end || end > va.size()) {
    throw ShapeError("slice: range [" + std::to_string(begin) + "," + std::to_string(end) +
                     ") invalid for " + shape_to_string(shape(a)));
  }
  Node n;
  n.kind = OpKind::kSlice;
  n.inputs = {a.id};
  n.shape = {end - begin};
  n.a0 = begin;
  n.a1 = end;
  n.value.assign(va.begin() + begin, va.begin() + end);
  return push(std::move(n));
}

Var Graph::reshape(Var a, Shape new_shape) {
  if (numel(new_shape) != numel(shape(a))) shape_fail("reshape", shape(a), new_shape);
  auto va = value(a);
  Node n;
  n.kind = OpKind::kReshape;
  n.inputs = {a.id};
  n.shape = std::move(new_shape);
  n.value.assign(va.begin(), va.end());
  return push(std::move(n));
}

Var Graph::transpose(Var a) {
  const Shape& s = shape(a);
  if (s.size() != 2) throw ShapeError("transpose: expected rank 2, got " + shape_to_string(s));
  auto va = value(a);
  Node n;
  n.kind = OpKind::kTranspose;
  n.inputs = {a.id};
  n.shape = {s[1], s[0]};
  n.value.resize(va.size());
  for (std::size_t r = 0; r < s[0]; ++r) {
    for (std::size_t c = 0; c < s[1]; ++c) n.value[c * s[0] + r] = va[r * s[1] + c];
  }
  return push(std::move(n));
}

namespace {

void softmax_into(std::span<const double> in, std::vector<double>& out) {
  out.resize(in.size());
  const double max = *std::max_element(in.begin(), in.end());
  double total = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    out[i] = std::exp(in[i] - max);
    total += out[i];
  }
  for (double& v : out) v /= total;
}

}  // namespace

Var Graph::softmax(Var a) {
  const Shape& s = shape(a);
  if (s.size() != 1 || s[0] == 0) throw ShapeError("softmax: expected nonempty rank 1, got " + shape_to_string(s));
  Node n;
  n.kind = OpKind::kSoftmax;
  n.inputs = {a.id};
  n.shape = s;
  softmax_into(value(a), n.value);
  return push(std::move(n));
}

Var Graph::softmax_xent(Var logits, std::size_t gold) {
  const Shape& s = shape(logits);
  if (s.size() != 1 || s[0] == 0) {
    throw ShapeError("softmax_xent: expected nonempty rank 1 logits, got " + shape_to_string(s));
  }
  if (gold >= s[0]) {
    throw std::out_of_range("softmax_xent: gold index " + std::to_string(gold) +
                            " out of range for " + std::to_string(s[0]) + " classes");
  }
  auto z = value(logits);
  const double max = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - max);
  Node n;
  n.kind = OpKind::kSoftmaxXent;
  n.inputs = {logits.id};
  n.shape = {1};
  n.a0 = gold;
  n.value = {std::log(total) - (z[gold] - max)};
  return push(std::move(n));
}

Var Graph::gather_rows(Var table, std::span<const std::size_t> ids) {
  const Shape& s = shape(table);
  if (s.size() != 2) throw ShapeError("gather_rows: expected rank 2 table, got " + shape_to_string(s));
  const std::size_t cols = s[1];
  auto vt = value(table);
  Node n;
  n.kind = OpKind::kGatherRows;
  n.inputs = {table.id};
  n.shape = {ids.size(), cols};
  n.ids.assign(ids.begin(), ids.end());
  n.value.resize(ids.size() * cols);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] >= s[0]) {
      throw std::out_of_range("gather_rows: id " + std::to_string(ids[r]) + " >= " +
                              std::to_string(s[0]) + " rows");
    }
    std::copy_n(vt.begin() + ids[r] * cols, cols, n.value.begin() + r * cols);
  }
  return push(std::move(n));
}

void Graph::backward(Var loss) {
  if (consumed_) throw GraphError("backward called twice on the same graph; build a new forward pass");
  const Node& root = node(loss);
  if (root.value.size() != 1 && !(root.kind == OpKind::kParam && root.param->size() == 1)) {
    throw GraphError("backward: loss must be a scalar, got shape " + shape_to_string(root.shape));
  }
  consumed_ = true;
  for (Node& n : nodes_) n.grad.clear();
  if (!root.needs_grad) return;
  nodes_[loss.id].grad.assign(1, 1.0);
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& n = nodes_[id];
    if (!n.needs_grad || n.grad.empty()) continue;
    if (n.kind == OpKind::kParam) {
      n.target->accumulate_grad(n.grad);
    } else {
      propagate(id);
    }
  }
}

void Graph::propagate(std::size_t id) {
  const Node& n = nodes_[id];
  const std::vector<double>& g = n.grad;

  auto sink = [this](std::size_t input) -> std::vector<double>* {
    Node& in = nodes_[input];
    if (!in.needs_grad) return nullptr;
    if (in.grad.empty()) in.grad.assign(numel(in.shape), 0.0);
    return &in.grad;
  };

  switch (n.kind) {
    case OpKind::kParam:
    case OpKind::kConstant:
      break;
    case OpKind::kMatmul: {
      const MatDims da = as_matrix(nodes_[n.inputs[0]].shape);
      const MatDims db = as_matrix(nodes_[n.inputs[1]].shape);
      if (da.rows * da.cols * db.cols == 0) break;
      ConstMatrixMap gout(g.data(), da.rows, db.cols);
      if (auto* ga = sink(n.inputs[0])) {
        ConstMatrixMap mb(data(n.inputs[1]).data(), db.rows, db.cols);
        MatrixMap(ga->data(), da.rows, da.cols).noalias() += gout * mb.transpose();
      }
      if (auto* gb = sink(n.inputs[1])) {
        ConstMatrixMap ma(data(n.inputs[0]).data(), da.rows, da.cols);
        MatrixMap(gb->data(), db.rows, db.cols).noalias() += ma.transpose() * gout;
      }
      break;
    }
    case OpKind::kAdd:
      for (std::size_t k = 0; k < 2; ++k) {
        if (auto* gi = sink(n.inputs[k])) {
          for (std::size_t i = 0; i < g.size(); ++i) (*gi)[i] += g[i];
        }
      }
      break;
    case OpKind::kMul: {
      for (std::size_t k = 0; k < 2; ++k) {
        if (auto* gi = sink(n.inputs[k])) {
          auto other = data(n.inputs[1 - k]);
          for (std::size_t i = 0; i < g.size(); ++i) (*gi)[i] += g[i] * other[i];
        }
      }
      break;
    }
    case OpKind::kScale:
      if (auto* gi = sink(n.inputs[0])) {
        for (std::size_t i = 0; i < g.size(); ++i) (*gi)[i] += g[i] * n.factor;
      }
      break;
    case OpKind::kConcat: {
      std::size_t outer = 1;
      for (std::size_t d = 0; d < n.a0; ++d) outer *= n.shape[d];
      std::size_t offset = 0;
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in : n.inputs) {
          const std::size_t chunk = numel(nodes_[in].shape) / outer;
          if (auto* gi = sink(in)) {
            for (std::size_t i = 0; i < chunk; ++i) (*gi)[o * chunk + i] += g[offset + i];
          }
          offset += chunk;
        }
      }
      break;
    }
    case OpKind::kSigmoid:
      if (auto* gi = sink(n.inputs[0])) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double y = n.value[i];
          (*gi)[i] += g[i] * y * (1.0 - y);
        }
      }
      break;
    case OpKind::kTanh:
      if (auto* gi = sink(n.inputs[0])) {
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double y = n.value[i];
          (*gi)[i] += g[i] * (1.0 - y * y);
        }
      }
      break;
    case OpKind::kElu:
      if (auto* gi = sink(n.inputs[0])) {
        auto x = data(n.inputs[0]);
        for (std::size_t i = 0; i < g.size(); ++i) {
          (*gi)[i] += g[i] * (x[i] > 0.0 ? 1.0 : n.value[i] + 1.0);
        }
      }
      break;
    case OpKind::kSum:
      if (auto* gi = sink(n.inputs[0])) {
        for (double& v : *gi) v += g[0];
      }
      break;
    case OpKind::kSlice:
      if (auto* gi = sink(n.inputs[0])) {
        for (std::size_t i = 0; i < g.size(); ++i) (*gi)[n.a0 + i] += g[i];
      }
      break;
    case OpKind::kReshape:
      if (auto* gi = sink(n.inputs[0])) {
        for (std::size_t i = 0; i < g.size(); ++i) (*gi)[i] += g[i];
      }
      break;
    case OpKind::kTranspose:
      if (auto* gi = sink(n.inputs[0])) {
        // n.shape = [cols, rows] of the input.
        const std::size_t rows = n.shape[1];
        const std::size_t cols = n.shape[0];
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < cols; ++c) (*gi)[r * cols + c] += g[c * rows + r];
        }
      }
      break;
    case OpKind::kSoftmax:
      if (auto* gi = sink(n.inputs[0])) {
        double dot = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * n.value[i];
        for (std::size_t i = 0; i < g.size(); ++i) (*gi)[i] += n.value[i] * (g[i] - dot);
      }
      break;
    case OpKind::kSoftmaxXent:
      if (auto* gi = sink(n.inputs[0])) {
        std::vector<double> probs;
        softmax_into(data(n.inputs[0]), probs);
        for (std::size_t i = 0; i < probs.size(); ++i) {
          (*gi)[i] += g[0] * (probs[i] - (i == n.a0 ? 1.0 : 0.0));
        }
      }
      break;
    case OpKind::kGatherRows:
      if (auto* gi = sink(n.inputs[0])) {
        const std::size_t cols = n.shape[1];
        for (std::size_t r = 0; r < n.ids.size(); ++r) {
          double* row = gi->data() + n.ids[r] * cols;
          for (std::size_t c = 0; c < cols; ++c) row[c] += g[r * cols + c];
        }
      }
      break;
  }
}

// ---------------------------------------------------------------------------

double grad_check(const std::function<Var(Graph&)>& build_loss,
                  std::span<const NamedParam> params, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("grad_check: eps must be positive");

  for (const NamedParam& p : params) {
    for (double v : p.tensor->values()) {
      if (!std::isfinite(v)) throw std::domain_error("grad_check: non-finite value in parameter '" + p.name + "'");
    }
    p.tensor->clear_grad();
  }
  {
    Graph graph;
    Var loss = build_loss(graph);
    if (!std::isfinite(graph.scalar(loss))) {
      throw std::domain_error("grad_check: non-finite loss at the unperturbed point");
    }
    graph.backward(loss);
  }

  auto evaluate = [&]() {
    Graph graph;
    return graph.scalar(build_loss(graph));
  };

  double worst = 0.0;
  for (const NamedParam& p : params) {
    std::vector<double> analytic(p.tensor->size(), 0.0);
    if (p.tensor->has_grad()) {
      auto g = p.tensor->grad();
      analytic.assign(g.begin(), g.end());
    }
    auto values = p.tensor->mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double plus = evaluate();
      values[i] = saved - eps;
      const double minus = evaluate();
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * eps);
      if (!std::isfinite(numeric) || !std::isfinite(analytic[i])) {
        throw std::domain_error("grad_check: non-finite value in parameter '" + p.name +
                                "' at index " + std::to_string(i));
      }
      const double denom = std::max({1.0, std::abs(analytic[i]), std::abs(numeric)});
      worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
    p.tensor->clear_grad();
  }
  return worst;
}

}  // namespace metatag
