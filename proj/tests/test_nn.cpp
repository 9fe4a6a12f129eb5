#include <gtest/gtest.h>

#include <cmath>

#include "metatag/nn.hpp"

using namespace metatag;
using namespace metatag::nn;

namespace {

std::vector<double> vals(const Graph& g, Var v) {
  auto s = g.value(v);
  return {s.begin(), s.end()};
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Independent cell: explicit loops over the stacked [i f o g] blocks.
void reference_cell(const LstmParams& p, const std::vector<double>& x, const std::vector<double>& h,
                    const std::vector<double>& c, std::vector<double>& h_out,
                    std::vector<double>& c_out) {
  const std::size_t H = p.hidden_size;
  const std::size_t I = p.input_size;
  std::vector<double> z(4 * H);
  for (std::size_t r = 0; r < 4 * H; ++r) {
    double acc = p.bias[r];
    for (std::size_t k = 0; k < I; ++k) acc += p.w_input[r * I + k] * x[k];
    for (std::size_t k = 0; k < H; ++k) acc += p.w_hidden[r * H + k] * h[k];
    z[r] = acc;
  }
  h_out.resize(H);
  c_out.resize(H);
  for (std::size_t j = 0; j < H; ++j) {
    const double i = sigmoid(z[j]);
    const double f = sigmoid(z[H + j]);
    const double o = sigmoid(z[2 * H + j]);
    const double gg = std::tanh(z[3 * H + j]);
    c_out[j] = f * c[j] + i * gg;
    h_out[j] = o * std::tanh(c_out[j]);
  }
}

void randomize(LstmParams& p, Rng& rng) {
  for (Tensor* t : {&p.w_input, &p.w_hidden, &p.bias, &p.h0, &p.c0}) {
    for (double& v : t->mutable_values()) v = rng.gaussian(0, 0.7);
  }
}

std::vector<Var> consts(Graph& g, Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<Var> xs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.gaussian(0, 1);
    xs.push_back(g.constant({dim}, v));
  }
  return xs;
}

}  // namespace

TEST(Embedding, LookupRows) {
  Tensor table = Tensor::from_values({2, 2}, {1, 1, 2, 2});
  Graph g;
  std::vector<std::size_t> ids{1, 0, 1};
  Var e = embedding_lookup(g, g.param(table), ids);
  EXPECT_EQ(g.shape(e), (Shape{3, 2}));
  EXPECT_EQ(vals(g, e), (std::vector<double>{2, 2, 1, 1, 2, 2}));
}

TEST(Embedding, EmptyIdsGiveZeroRows) {
  Tensor table = Tensor::from_values({2, 2}, {1, 1, 2, 2});
  Graph g;
  std::vector<std::size_t> ids;
  Var e = embedding_lookup(g, g.param(table), ids);
  EXPECT_EQ(g.shape(e), (Shape{0, 2}));
}

TEST(Embedding, OutOfRangeThrows) {
  Tensor table = Tensor::from_values({2, 2}, {1, 1, 2, 2});
  Graph g;
  std::vector<std::size_t> ids{2};
  EXPECT_THROW(embedding_lookup(g, g.param(table), ids), std::out_of_range);
}

TEST(Dropout, RateZeroAndInferenceAreIdentity) {
  Rng rng(1);
  Graph g;
  Var x = g.constant({4}, {1, 2, 3, 4});
  EXPECT_EQ(dropout(g, x, 0.0, true, &rng).id, x.id);
  EXPECT_EQ(dropout(g, x, 0.33, false, &rng).id, x.id);
}

TEST(Dropout, SurvivorFractionAndScale) {
  Rng rng(2);
  Graph g;
  Var x = g.constant({10000}, std::vector<double>(10000, 1.0));
  auto y = vals(g, dropout(g, x, 0.5, true, &rng));
  std::size_t survivors = 0;
  for (double v : y) {
    if (v != 0.0) {
      ++survivors;
      EXPECT_DOUBLE_EQ(v, 2.0);
    }
  }
  EXPECT_GE(survivors, 4500u);
  EXPECT_LE(survivors, 5500u);
}

TEST(Dropout, BadRateThrows) {
  Rng rng(3);
  Graph g;
  Var x = g.constant({2}, {1, 1});
  EXPECT_THROW(dropout(g, x, 1.0, true, &rng), std::invalid_argument);
  EXPECT_THROW(dropout(g, x, -0.1, true, &rng), std::invalid_argument);
}

TEST(Dropout, SingleMaskSharedAcrossSequence) {
  Rng rng(4);
  Graph g;
  std::vector<Var> xs(5, g.constant({50}, std::vector<double>(50, 1.0)));
  auto single = dropout_sequence(g, xs, 0.5, DropoutMode::kSingleMask, true, &rng);
  for (std::size_t i = 1; i < single.size(); ++i) EXPECT_EQ(vals(g, single[i]), vals(g, single[0]));
  auto per = dropout_sequence(g, xs, 0.5, DropoutMode::kPerPosition, true, &rng);
  bool differs = false;
  for (std::size_t i = 1; i < per.size(); ++i) differs |= vals(g, per[i]) != vals(g, per[0]);
  EXPECT_TRUE(differs);
}

TEST(Lstm, ZeroWeightsGiveZeroState) {
  Rng rng(5);
  LstmParams p = LstmParams::create(3, 2, WeightInit::kScaledGaussian, rng);
  for (Tensor* t : {&p.w_input, &p.w_hidden, &p.bias}) {
    for (double& v : t->mutable_values()) v = 0.0;
  }
  Graph g;
  LstmState s = lstm_step(g, p, g.constant({3}, {5, -2, 7}), g.param(p.h0), g.param(p.c0));
  EXPECT_EQ(vals(g, s.h), (std::vector<double>{0, 0}));
  EXPECT_EQ(vals(g, s.c), (std::vector<double>{0, 0}));
}

TEST(Lstm, UnitCellAtZero) {
  Rng rng(6);
  LstmParams p = LstmParams::create(1, 1, WeightInit::kGaussian, rng);
  for (Tensor* t : {&p.w_input, &p.w_hidden}) {
    for (double& v : t->mutable_values()) v = 1.0;
  }
  Graph g;
  LstmState s = lstm_step(g, p, g.constant({1}, {0}), g.param(p.h0), g.param(p.c0));
  EXPECT_DOUBLE_EQ(g.value(s.c)[0], 0.0);
  EXPECT_DOUBLE_EQ(g.value(s.h)[0], 0.0);
}

TEST(Lstm, MatchesReferenceCell) {
  Rng rng(7);
  LstmParams p = LstmParams::create(4, 4, WeightInit::kGaussian, rng);
  randomize(p, rng);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(4), h(4), c(4);
    for (auto* v : {&x, &h, &c}) {
      for (double& e : *v) e = rng.gaussian(0, 1);
    }
    std::vector<double> h_ref, c_ref;
    reference_cell(p, x, h, c, h_ref, c_ref);
    Graph g;
    LstmState s = lstm_step(g, p, g.constant({4}, x), g.constant({4}, h), g.constant({4}, c));
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_NEAR(g.value(s.h)[j], h_ref[j], 1e-12);
      EXPECT_NEAR(g.value(s.c)[j], c_ref[j], 1e-12);
    }
  }
}

TEST(Lstm, ShapeMismatchThrows) {
  Rng rng(8);
  LstmParams p = LstmParams::create(3, 2, WeightInit::kGaussian, rng);
  Graph g;
  EXPECT_THROW(lstm_step(g, p, g.constant({2}, {1, 1}), g.param(p.h0), g.param(p.c0)), ShapeError);
}

TEST(Lstm, GradCheck) {
  Rng rng(9);
  LstmParams p = LstmParams::create(3, 3, WeightInit::kGaussian, rng);
  randomize(p, rng);
  std::vector<NamedParam> params;
  p.collect("lstm", params);
  const double err = grad_check([&](Graph& g) {
    LstmState s = lstm_step(g, p, g.constant({3}, {0.5, -1, 0.25}), g.param(p.h0), g.param(p.c0));
    s = lstm_step(g, p, g.constant({3}, {-0.3, 0.8, 1}), s.h, s.c);
    return g.sum(g.mul(s.h, s.c));
  }, params);
  EXPECT_LT(err, 1e-4);
}

TEST(BiLstm, DepthOneLengthOneIsTwoCellSteps) {
  Rng rng(10);
  BiLstmStack stack = BiLstmStack::create(3, 2, 1, WeightInit::kGaussian, rng);
  randomize(stack.layers[0].forward, rng);
  randomize(stack.layers[0].backward, rng);
  Graph g;
  std::vector<Var> xs{g.constant({3}, {1, -1, 0.5})};
  BiLstmOutput out = bilstm_stack_run(g, stack, xs, {});
  auto& L = stack.layers[0];
  LstmState f = lstm_step(g, L.forward, xs[0], g.param(L.forward.h0), g.param(L.forward.c0));
  LstmState b = lstm_step(g, L.backward, xs[0], g.param(L.backward.h0), g.param(L.backward.c0));
  EXPECT_EQ(vals(g, out.forward[0]), vals(g, f.h));
  EXPECT_EQ(vals(g, out.backward[0]), vals(g, b.h));
}

TEST(BiLstm, ReversalSymmetry) {
  Rng rng(11);
  BiLstmStack stack = BiLstmStack::create(2, 3, 1, WeightInit::kGaussian, rng);
  randomize(stack.layers[0].forward, rng);
  randomize(stack.layers[0].backward, rng);
  BiLstmStack swapped = stack;
  std::swap(swapped.layers[0].forward, swapped.layers[0].backward);
  Graph g;
  std::vector<Var> xs = consts(g, rng, 5, 2);
  std::vector<Var> rev(xs.rbegin(), xs.rend());
  BiLstmOutput a = bilstm_stack_run(g, stack, xs, {});
  BiLstmOutput b = bilstm_stack_run(g, swapped, rev, {});
  for (std::size_t i = 0; i < 5; ++i) {
    const std::vector<double> fa = vals(g, b.forward[4 - i]);
    const std::vector<double> bb = vals(g, a.backward[i]);
    for (std::size_t k = 0; k < fa.size(); ++k) EXPECT_NEAR(fa[k], bb[k], 1e-14);
  }
}

TEST(BiLstm, ShapesAtTableSizes) {
  Rng rng(12);
  BiLstmStack stack = BiLstmStack::create(100, 400, 3, WeightInit::kScaledGaussian, rng);
  EXPECT_EQ(stack.layers[1].forward.input_size, 800u);
  Graph g;
  BiLstmOutput out = bilstm_stack_run(g, stack, consts(g, rng, 5, 100), {});
  ASSERT_EQ(out.forward.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(g.shape(out.forward[i]), Shape{400});
    EXPECT_EQ(g.shape(out.backward[i]), Shape{400});
  }
}

TEST(BiLstm, EmptySequenceThrows) {
  Rng rng(13);
  BiLstmStack stack = BiLstmStack::create(2, 2, 1, WeightInit::kGaussian, rng);
  Graph g;
  std::vector<Var> none;
  EXPECT_THROW(bilstm_stack_run(g, stack, none, {}), std::invalid_argument);
}

TEST(BiLstm, GradCheckTwoLayersWithDropout) {
  Rng rng(14);
  BiLstmStack stack = BiLstmStack::create(2, 2, 2, WeightInit::kGaussian, rng);
  for (auto& L : stack.layers) {
    randomize(L.forward, rng);
    randomize(L.backward, rng);
  }
  std::vector<NamedParam> params;
  stack.collect("stack", params);
  std::vector<std::vector<double>> inputs{{0.5, -1}, {1, 0.2}, {-0.7, 0.3}};
  const double err = grad_check([&](Graph& g) {
    Rng drop(99);  // same masks at every evaluation
    RecurrentDropout d{0.3, 0.3, 0.3, true, &drop};
    std::vector<Var> xs;
    for (auto& v : inputs) xs.push_back(g.constant({2}, v));
    BiLstmOutput out = bilstm_stack_run(g, stack, xs, d);
    Var acc = g.sum(g.mul(out.forward[0], out.backward[2]));
    for (std::size_t i = 0; i < 3; ++i) acc = g.add(acc, g.sum(g.tanh(g.add(out.forward[i], out.backward[i]))));
    return acc;
  }, params);
  EXPECT_LT(err, 1e-4);
}

TEST(Mlp, IdentityWeights) {
  Rng rng(15);
  MlpParams p = MlpParams::create(2, 2, WeightInit::kGaussian, rng);
  p.weight = Tensor::from_values({2, 2}, {1, 0, 0, 1}, true);
  p.bias = Tensor::zeros({2}, true);
  Graph g;
  auto y = vals(g, mlp_apply(g, p, g.constant({2}, {1, -1})));
  EXPECT_DOUBLE_EQ(y[0], 1.0);
  EXPECT_NEAR(y[1], std::exp(-1.0) - 1.0, 1e-15);
}

TEST(Mlp, ZeroWeightsGiveZero) {
  Rng rng(16);
  MlpParams p = MlpParams::create(3, 2, WeightInit::kGaussian, rng);
  for (double& v : p.weight.mutable_values()) v = 0;
  Graph g;
  EXPECT_EQ(vals(g, mlp_apply(g, p, g.constant({3}, {1, 2, 3}))), (std::vector<double>{0, 0}));
}

TEST(Mlp, GradCheckAndShapeError) {
  Rng rng(17);
  MlpParams mlp = MlpParams::create(4, 3, WeightInit::kGaussian, rng);
  ClassifierParams cls = ClassifierParams::create(3, 5, WeightInit::kScaledGaussian, rng);
  for (double& v : mlp.bias.mutable_values()) v = rng.gaussian(0, 1);
  std::vector<NamedParam> params;
  mlp.collect("mlp", params);
  cls.collect("cls", params);
  const double err = grad_check([&](Graph& g) {
    Var h = mlp_apply(g, mlp, g.constant({4}, {0.2, -0.4, 0.9, -1.2}));
    return softmax_xent(g, classify(g, cls, h), 2);
  }, params);
  EXPECT_LT(err, 1e-4);
  Graph g;
  EXPECT_THROW(mlp_apply(g, mlp, g.constant({3}, {1, 2, 3})), ShapeError);
}

TEST(SoftmaxXent, UniformLogits) {
  Graph g;
  Var l = softmax_xent(g, g.constant({4}, {0, 0, 0, 0}), 1);
  EXPECT_NEAR(g.scalar(l), std::log(4.0), 1e-15);
  EXPECT_NEAR(g.scalar(l), 1.3863, 1e-4);
}

TEST(SoftmaxXent, MatchesDirectFormulaAndShiftInvariant) {
  Rng rng(18);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> z(10);
    for (double& v : z) v = rng.gaussian(0, 3);
    const std::size_t gold = rng.below(10);
    double denom = 0;
    for (double v : z) denom += std::exp(v);
    const double expected = -std::log(std::exp(z[gold]) / denom);
    Graph g;
    const double got = g.scalar(softmax_xent(g, g.constant({10}, z), gold));
    EXPECT_NEAR(got, expected, 1e-12);
    EXPECT_GE(got, 0.0);
    std::vector<double> shifted = z;
    for (double& v : shifted) v += 17.5;
    EXPECT_NEAR(g.scalar(softmax_xent(g, g.constant({10}, shifted), gold)), got, 1e-12);
  }
}

TEST(Argmax, TiesAndScaling) {
  std::vector<double> a{0.1, 0.9, 0.3};
  EXPECT_EQ(argmax(a), 1u);
  std::vector<double> eq{0.5, 0.5, 0.5};
  EXPECT_EQ(argmax(eq), 0u);
  std::vector<double> scaled{1.0, 9.0, 3.0};
  EXPECT_EQ(argmax(scaled), argmax(a));
}

TEST(CharAttention, SingleCharacterDoublesState) {
  Graph g;
  Var score = g.constant({3}, {5, -2, 1});
  std::vector<Var> states{g.constant({3}, {0.1, 0.2, -0.3})};
  EXPECT_EQ(vals(g, char_attention(g, score, states)), (std::vector<double>{0.2, 0.4, -0.6}));
}

TEST(CharAttention, IdenticalStates) {
  Graph g;
  Var score = g.constant({2}, {3, -1});
  std::vector<Var> states(4, g.constant({2}, {0.5, -0.25}));
  auto y = vals(g, char_attention(g, score, states));
  EXPECT_NEAR(y[0], 1.0, 1e-15);
  EXPECT_NEAR(y[1], -0.5, 1e-15);
}

TEST(CharAttention, MatchesDirectFormula) {
  Rng rng(19);
  Graph g;
  std::vector<double> s(4);
  for (double& v : s) v = rng.gaussian(0, 1);
  std::vector<std::vector<double>> h(3, std::vector<double>(4));
  std::vector<Var> states;
  for (auto& row : h) {
    for (double& v : row) v = rng.gaussian(0, 1);
    states.push_back(g.constant({4}, row));
  }
  std::vector<double> e(3);
  double z = 0;
  for (int i = 0; i < 3; ++i) {
    double dot = 0;
    for (int k = 0; k < 4; ++k) dot += s[k] * h[i][k];
    e[i] = std::exp(dot);
    z += e[i];
  }
  auto y = vals(g, char_attention(g, g.constant({4}, s), states));
  for (int k = 0; k < 4; ++k) {
    double expected = h[2][k];
    for (int i = 0; i < 3; ++i) expected += e[i] / z * h[i][k];
    EXPECT_NEAR(y[k], expected, 1e-12);
  }
}

TEST(CharAttention, EmptyThrowsAndGradCheck) {
  Graph g0;
  std::vector<Var> none;
  EXPECT_THROW(char_attention(g0, g0.constant({2}, {1, 1}), none), std::invalid_argument);

  Rng rng(20);
  Tensor score = Tensor::gaussian({3}, rng, 0, 1, true);
  Tensor states = Tensor::gaussian({4, 3}, rng, 0, 1, true);
  std::vector<NamedParam> params{{"score", &score}, {"states", &states}};
  const double err = grad_check([&](Graph& g) {
    std::vector<Var> rs = rows(g, g.param(states));
    return g.sum(g.tanh(char_attention(g, g.param(score), rs)));
  }, params);
  EXPECT_LT(err, 1e-4);
}

TEST(Init, ScaledGaussianVariance) {
  Rng rng(21);
  Tensor w = init_weight(200, 400, WeightInit::kScaledGaussian, rng);
  double ss = 0;
  for (double v : w.values()) ss += v * v;
  EXPECT_NEAR(ss / w.size(), 1.0 / 400.0, 0.1 / 400.0);
  Tensor u = init_weight(100, 100, WeightInit::kGaussian, rng);
  ss = 0;
  for (double v : u.values()) ss += v * v;
  EXPECT_NEAR(ss / u.size(), 1.0, 0.05);
  EXPECT_EQ(parse_weight_init("gaussian"), WeightInit::kGaussian);
  EXPECT_THROW(parse_weight_init("xavier"), std::invalid_argument);
}
