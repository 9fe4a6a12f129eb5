// Dense double-precision tensors and a define-by-run reverse-mode graph.
//
// Parameters live in `Tensor` objects owned by the models. Each training step
// builds a fresh `Graph`, binds the parameters it touches as leaves, and calls
// `backward` once; gradients are accumulated into the parameter tensors.

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace metatag {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class GraphError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Seeded random source shared by initializers and dropout.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double gaussian(double mean, double stddev);
  double uniform();  // [0, 1)
  bool bernoulli(double p);
  std::size_t below(std::size_t n);  // [0, n)
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

enum class Init { kZeros, kGaussian };

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  /// N(mean, variance) entries drawn from `rng`.
  static Tensor gaussian(Shape shape, Rng& rng, double mean = 0.0,
                         double variance = 1.0, bool requires_grad = false);
  static Tensor from_values(Shape shape, std::vector<double> values,
                            bool requires_grad = false);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool requires_grad() const { return requires_grad_; }
  void set_requires_grad(bool on);

  bool has_grad() const { return has_grad_; }
  /// Empty span when no gradient has been accumulated.
  std::span<const double> grad() const;
  void accumulate_grad(std::span<const double> delta);
  void clear_grad();

  const std::string& name() const { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

 private:
  Tensor(Shape shape, std::vector<double> values, bool requires_grad);

  Shape shape_;
  std::vector<double> values_;
  std::vector<double> grad_;
  bool requires_grad_ = false;
  bool has_grad_ = false;
  std::string name_;
};

/// Handle to a node of a Graph.
struct Var {
  std::size_t id = static_cast<std::size_t>(-1);
  bool valid() const { return id != static_cast<std::size_t>(-1); }
};

enum class OpKind : std::uint8_t {
  kParam,
  kConstant,
  kMatmul,
  kAdd,
  kMul,
  kScale,
  kConcat,
  kSigmoid,
  kTanh,
  kElu,
  kSum,
  kSlice,
  kReshape,
  kTranspose,
  kSoftmax,
  kSoftmaxXent,
  kGatherRows,
};

const char* op_name(OpKind kind);

class Graph {
 public:
  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Leaves.
  /// Binds a parameter tensor. Repeated calls with the same tensor return the
  /// same node. Gradient flows into `t` only if `t.requires_grad()`.
  Var param(Tensor& t);
  /// Read-only binding; never receives gradient.
  Var param(const Tensor& t);
  Var constant(Shape shape, std::vector<double> values);
  Var constant(const Tensor& t);
  /// Copy of `x` that blocks gradient flow.
  Var detach(Var x);

  // Operations.
  Var matmul(Var a, Var b);  // [m,k]x[k,n] -> [m,n]; [m,k]x[k] -> [m]
  Var add(Var a, Var b);
  Var mul(Var a, Var b);     // elementwise
  Var scale(Var a, double factor);
  Var concat(std::span<const Var> parts, std::size_t axis = 0);
  Var concat(std::initializer_list<Var> parts, std::size_t axis = 0) {
    return concat(std::span<const Var>(parts.begin(), parts.size()), axis);
  }
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var elu(Var a);
  Var sum(Var a);
  /// Flat range [begin, end) of the row-major values, as a rank-1 tensor.
  Var slice(Var a, std::size_t begin, std::size_t end);
  Var reshape(Var a, Shape shape);
  Var transpose(Var a);
  Var softmax(Var a);  // rank-1
  /// -log softmax(logits)[gold], max-subtracted.
  Var softmax_xent(Var logits, std::size_t gold);
  /// Rows `ids` of a rank-2 table, as an [ids.size(), cols] matrix.
  Var gather_rows(Var table, std::span<const std::size_t> ids);

  void backward(Var loss);

  std::span<const double> value(Var v) const;
  double scalar(Var v) const;
  const Shape& shape(Var v) const { return node(v).shape; }
  /// Gradient of the last backward pass w.r.t. node `v` (empty if none).
  std::span<const double> grad(Var v) const { return node(v).grad; }
  bool needs_grad(Var v) const { return node(v).needs_grad; }
  OpKind kind(Var v) const { return node(v).kind; }
  std::span<const std::size_t> inputs(Var v) const { return node(v).inputs; }

  std::size_t size() const { return nodes_.size(); }
  void clear();

 private:
  struct Node {
    OpKind kind = OpKind::kConstant;
    std::vector<std::size_t> inputs;
    Shape shape;
    std::vector<double> value;  // empty for kParam
    std::vector<double> grad;
    const Tensor* param = nullptr;
    Tensor* target = nullptr;  // gradient sink for trainable params
    bool needs_grad = false;
    // Op-specific data: slice range, concat axis, gold index, scale factor,
    // gathered ids.
    std::size_t a0 = 0;
    std::size_t a1 = 0;
    double factor = 0.0;
    std::vector<std::size_t> ids;
  };

  const Node& node(Var v) const;
  std::span<const double> data(std::size_t id) const;
  Var push(Node&& node);
  Var bind(const Tensor& t, Tensor* target);
  void propagate(std::size_t id);

  std::deque<Node> nodes_;  // stable references across push
  std::unordered_map<const Tensor*, std::size_t> bound_params_;
  bool consumed_ = false;
};

/// A named parameter tensor, as seen by optimizers and gradient checks.
struct NamedParam {
  std::string name;
  Tensor* tensor;
};

/// Compares analytic gradients with central finite differences.
///
/// `build_loss` must construct a scalar loss in the given graph and be
/// deterministic. Returns the maximum over all entries of
/// |analytic - numeric| / max(1, |analytic|, |numeric|).
double grad_check(const std::function<Var(Graph&)>& build_loss,
                  std::span<const NamedParam> params, double eps = 1e-5);

}  // namespace metatag
