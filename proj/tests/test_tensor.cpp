#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "metatag/tensor.hpp"

using namespace metatag;

namespace {

std::vector<double> vals(const Graph& g, Var v) {
  auto s = g.value(v);
  return {s.begin(), s.end()};
}

std::vector<double> grads(const Tensor& t) {
  auto s = t.grad();
  return {s.begin(), s.end()};
}

}  // namespace

TEST(TensorCreate, Zeros) {
  Tensor t = Tensor::zeros({2, 2});
  EXPECT_EQ(t.shape(), (Shape{2, 2}));
  EXPECT_EQ(std::vector<double>(t.values().begin(), t.values().end()), std::vector<double>(4, 0.0));
}

TEST(TensorCreate, ExplicitValues) {
  Tensor t = Tensor::from_values({3}, {1, 2, 3});
  EXPECT_EQ(t[0], 1);
  EXPECT_EQ(t[2], 3);
}

TEST(TensorCreate, LengthMismatchThrows) {
  EXPECT_THROW(Tensor::from_values({2, 2}, {1, 2, 3}), ShapeError);
  EXPECT_THROW(Tensor::zeros({0, 3}), ShapeError);
}

TEST(TensorCreate, GaussianMoments) {
  Rng rng(123);
  Tensor t = Tensor::gaussian({1000}, rng);
  const auto v = t.values();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / 1000.0;
  double var = 0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= 999.0;
  EXPECT_GE(mean, -0.1);
  EXPECT_LE(mean, 0.1);
  EXPECT_GE(var, 0.85);
  EXPECT_LE(var, 1.15);
}

TEST(TensorCreate, NoGradWithoutRequiresGrad) {
  Tensor t = Tensor::zeros({2});
  std::vector<double> d{1, 1};
  t.accumulate_grad(d);
  EXPECT_FALSE(t.has_grad());
  EXPECT_TRUE(t.grad().empty());
}

TEST(GraphOps, Elu) {
  Graph g;
  Var x = g.constant({3}, {0, -1, 2});
  auto y = vals(g, g.elu(x));
  EXPECT_DOUBLE_EQ(y[0], 0.0);
  EXPECT_NEAR(y[1], std::exp(-1.0) - 1.0, 1e-15);
  EXPECT_NEAR(y[1], -0.6321, 1e-4);
  EXPECT_DOUBLE_EQ(y[2], 2.0);
}

TEST(GraphOps, Concat) {
  Graph g;
  Var y = g.concat({g.constant({2}, {1, 2}), g.constant({1}, {3})});
  EXPECT_EQ(vals(g, y), (std::vector<double>{1, 2, 3}));
}

TEST(GraphOps, ConcatMatricesAlongRows) {
  Graph g;
  Var a = g.constant({1, 2}, {1, 2});
  Var b = g.constant({2, 2}, {3, 4, 5, 6});
  Var y = g.concat({a, b}, 0);
  EXPECT_EQ(g.shape(y), (Shape{3, 2}));
  EXPECT_EQ(vals(g, y), (std::vector<double>{1, 2, 3, 4, 5, 6}));
  Var z = g.concat({b, b}, 1);
  EXPECT_EQ(g.shape(z), (Shape{2, 4}));
  EXPECT_EQ(vals(g, z), (std::vector<double>{3, 4, 3, 4, 5, 6, 5, 6}));
}

TEST(GraphOps, Matmul) {
  Graph g;
  Var a = g.constant({1, 2}, {1, 2});
  Var b = g.constant({2, 1}, {3, 4});
  EXPECT_EQ(vals(g, g.matmul(a, b)), (std::vector<double>{11}));
  Var m = g.constant({2, 2}, {1, 2, 3, 4});
  Var v = g.constant({2}, {1, 1});
  EXPECT_EQ(vals(g, g.matmul(m, v)), (std::vector<double>{3, 7}));
}

TEST(GraphOps, ShapeErrorsNameTheOp) {
  Graph g;
  Var a = g.constant({2, 3}, std::vector<double>(6, 1.0));
  Var b = g.constant({2}, {1, 2});
  try {
    g.matmul(a, b);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("matmul"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("[2,3]"), std::string::npos) << e.what();
  }
  EXPECT_THROW(g.add(a, b), ShapeError);
  EXPECT_THROW(g.mul(a, b), ShapeError);
  EXPECT_THROW(g.concat({a, b}, 0), ShapeError);
  EXPECT_THROW(g.slice(b, 1, 3), ShapeError);
}

TEST(GraphOps, SoftmaxAndTranspose) {
  Graph g;
  auto s = vals(g, g.softmax(g.constant({3}, {0, 0, 0})));
  for (double p : s) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
  Var t = g.transpose(g.constant({2, 3}, {1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(g.shape(t), (Shape{3, 2}));
  EXPECT_EQ(vals(g, t), (std::vector<double>{1, 4, 2, 5, 3, 6}));
}

TEST(Backward, SquareSum) {
  Tensor x = Tensor::from_values({2}, {1, 2}, true);
  Graph g;
  Var v = g.param(x);
  g.backward(g.sum(g.mul(v, v)));
  EXPECT_EQ(grads(x), (std::vector<double>{2, 4}));
}

TEST(Backward, SigmoidAtZero) {
  Tensor x = Tensor::from_values({1}, {0}, true);
  Graph g;
  g.backward(g.sum(g.sigmoid(g.param(x))));
  EXPECT_DOUBLE_EQ(x.grad()[0], 0.25);
}

TEST(Backward, NonScalarLossThrows) {
  Tensor x = Tensor::from_values({2}, {1, 2}, true);
  Graph g;
  Var v = g.param(x);
  EXPECT_THROW(g.backward(g.mul(v, v)), GraphError);
}

TEST(Backward, TwiceThrows) {
  Tensor x = Tensor::from_values({2}, {1, 2}, true);
  Graph g;
  Var loss = g.sum(g.param(x));
  g.backward(loss);
  EXPECT_THROW(g.backward(loss), GraphError);
  g.clear();
  g.backward(g.sum(g.param(x)));
  EXPECT_EQ(grads(x), (std::vector<double>{2, 2}));
}

TEST(Backward, AccumulatesOverUses) {
  // x used three times equals 3 * (single-use gradient).
  Tensor a = Tensor::from_values({3}, {0.3, -0.2, 0.7}, true);
  Tensor b = Tensor::from_values({3}, {0.3, -0.2, 0.7}, true);
  Graph g1;
  Var xa = g1.param(a);
  g1.backward(g1.sum(g1.add(g1.add(g1.tanh(xa), g1.tanh(xa)), g1.tanh(xa))));
  Graph g2;
  g2.backward(g2.scale(g2.sum(g2.tanh(g2.param(b))), 3.0));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a.grad()[i], b.grad()[i], 1e-15);
}

TEST(Backward, DetachBlocksGradient) {
  Tensor x = Tensor::from_values({2}, {1, 2}, true);
  Tensor y = Tensor::from_values({2}, {3, 4}, true);
  Graph g;
  Var d = g.detach(g.param(x));
  g.backward(g.sum(g.mul(d, g.param(y))));
  EXPECT_FALSE(x.has_grad());
  EXPECT_EQ(grads(y), (std::vector<double>{1, 2}));
}

TEST(Backward, ReadOnlyParamGetsNoGradient) {
  Tensor frozen = Tensor::from_values({2}, {1, 2}, true);
  const Tensor& view = frozen;
  Graph g;
  g.backward(g.sum(g.mul(g.param(view), g.param(view))));
  EXPECT_FALSE(frozen.has_grad());
}

TEST(Backward, GatherRowsScatterAdds) {
  Tensor table = Tensor::from_values({2, 2}, {1, 1, 2, 2}, true);
  Graph g;
  std::vector<std::size_t> ids{0, 0};
  g.backward(g.sum(g.gather_rows(g.param(table), ids)));
  EXPECT_EQ(grads(table), (std::vector<double>{2, 2, 0, 0}));
}

TEST(Backward, SoftmaxXentStable) {
  Graph g;
  Var l = g.softmax_xent(g.constant({2}, {1000, 0}), 0);
  EXPECT_NEAR(g.scalar(l), 0.0, 1e-12);
  EXPECT_TRUE(std::isfinite(g.scalar(l)));
  EXPECT_THROW(g.softmax_xent(g.constant({2}, {0, 0}), 2), std::out_of_range);
}

TEST(GradCheck, QuadraticIsExact) {
  Tensor w = Tensor::from_values({3}, {0.5, -1.5, 2.0}, true);
  std::vector<NamedParam> params{{"w", &w}};
  const double err = grad_check([&](Graph& g) {
    Var v = g.param(w);
    return g.sum(g.mul(v, v));
  }, params);
  EXPECT_LT(err, 1e-9);
}

TEST(GradCheck, EveryOp) {
  Rng rng(5);
  Tensor a = Tensor::gaussian({3, 4}, rng, 0, 1, true);
  Tensor b = Tensor::gaussian({4, 2}, rng, 0, 1, true);
  Tensor c = Tensor::gaussian({3, 2}, rng, 0, 1, true);
  Tensor table = Tensor::gaussian({5, 3}, rng, 0, 1, true);
  Tensor s = Tensor::gaussian({6}, rng, 0, 1, true);
  std::vector<NamedParam> params{{"a", &a}, {"b", &b}, {"c", &c}, {"table", &table}, {"s", &s}};
  const std::vector<std::size_t> ids{4, 1, 4};
  const double err = grad_check([&](Graph& g) {
    Var m = g.matmul(g.param(a), g.param(b));                     // [3,2]
    Var h = g.elu(g.add(m, g.mul(g.param(c), g.sigmoid(m))));      // [3,2]
    Var r = g.gather_rows(g.param(table), ids);                    // [3,3]
    Var cat = g.concat({h, r}, 1);                                 // [3,5]
    Var flat = g.reshape(g.transpose(cat), {15});
    Var part = g.slice(flat, 2, 8);                                // [6]
    Var mixed = g.add(g.tanh(part), g.scale(g.param(s), 0.5));
    Var sm = g.softmax(mixed);
    Var l1 = g.softmax_xent(mixed, 3);
    return g.add(l1, g.sum(g.mul(sm, g.param(s))));
  }, params);
  EXPECT_LT(err, 1e-4);
}

TEST(GradCheck, ThreeLayerMlp) {
  Rng rng(9);
  Tensor w1 = Tensor::gaussian({5, 4}, rng, 0, 0.5, true);
  Tensor w2 = Tensor::gaussian({5, 5}, rng, 0, 0.5, true);
  Tensor w3 = Tensor::gaussian({3, 5}, rng, 0, 0.5, true);
  Tensor x = Tensor::gaussian({4}, rng);
  std::vector<NamedParam> params{{"w1", &w1}, {"w2", &w2}, {"w3", &w3}};
  const double err = grad_check([&](Graph& g) {
    Var h = g.elu(g.matmul(g.param(w1), g.constant(x)));
    h = g.tanh(g.matmul(g.param(w2), h));
    return g.softmax_xent(g.matmul(g.param(w3), h), 1);
  }, params);
  EXPECT_LT(err, 1e-4);
}

TEST(GradCheck, NonFiniteNamesParameter) {
  Tensor w = Tensor::from_values({1}, {std::nan("")}, true);
  std::vector<NamedParam> params{{"bad_weight", &w}};
  try {
    grad_check([&](Graph& g) { return g.sum(g.param(w)); }, params);
    FAIL();
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("bad_weight"), std::string::npos);
  }
}

TEST(Determinism, SameSeedSameValuesAndGradients) {
  auto run = [] {
    Rng rng(77);
    Tensor w = Tensor::gaussian({4, 4}, rng, 0, 1, true);
    Tensor x = Tensor::gaussian({4}, rng);
    Graph g;
    Var y = g.tanh(g.matmul(g.param(w), g.constant(x)));
    g.backward(g.sum(g.mul(y, y)));
    std::vector<double> out(g.value(y).begin(), g.value(y).end());
    out.insert(out.end(), w.grad().begin(), w.grad().end());
    return out;
  };
  EXPECT_EQ(run(), run());
}
