#include "metatag/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace metatag::nn {

WeightInit parse_weight_init(const std::string& text) {
  if (text == "gaussian") return WeightInit::kGaussian;
  if (text == "scaled_gaussian") return WeightInit::kScaledGaussian;
  throw std::invalid_argument("unknown weight init '" + text +
                              "' (expected gaussian or scaled_gaussian)");
}

std::string to_string(WeightInit init) {
  return init == WeightInit::kGaussian ? "gaussian" : "scaled_gaussian";
}

Tensor init_weight(std::size_t rows, std::size_t cols, WeightInit init, Rng& rng) {
  const double variance = init == WeightInit::kGaussian ? 1.0 : 1.0 / static_cast<double>(cols);
  return Tensor::gaussian({rows, cols}, rng, 0.0, variance, /*requires_grad=*/true);
}

// ---------------------------------------------------------------------------

std::vector<double> dropout_mask(std::size_t size, double rate, Rng& rng) {
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(size);
  for (double& m : mask) m = rng.bernoulli(rate) ? 0.0 : keep_scale;
  return mask;
}

namespace {

void check_rate(double rate) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout rate must be in [0, 1), got " + std::to_string(rate));
  }
}

}  // namespace

Var dropout(Graph& g, Var x, double rate, bool training, Rng* rng) {
  check_rate(rate);
  if (!training || rate == 0.0) return x;
  if (rng == nullptr) throw std::invalid_argument("dropout: training mode requires an rng");
  Var mask = g.constant(g.shape(x), dropout_mask(g.value(x).size(), rate, *rng));
  return g.mul(x, mask);
}

std::vector<Var> dropout_sequence(Graph& g, std::span<const Var> xs, double rate,
                                  DropoutMode mode, bool training, Rng* rng) {
  check_rate(rate);
  std::vector<Var> out(xs.begin(), xs.end());
  if (!training || rate == 0.0 || xs.empty()) return out;
  if (rng == nullptr) throw std::invalid_argument("dropout: training mode requires an rng");
  if (mode == DropoutMode::kPerPosition) {
    for (Var& x : out) x = dropout(g, x, rate, training, rng);
    return out;
  }
  Var mask = g.constant(g.shape(xs[0]), dropout_mask(g.value(xs[0]).size(), rate, *rng));
  for (Var& x : out) x = g.mul(x, mask);
  return out;
}

// ---------------------------------------------------------------------------

Var embedding_lookup(Graph& g, Var table, std::span<const std::size_t> ids) {
  return g.gather_rows(table, ids);
}

std::vector<Var> rows(Graph& g, Var matrix) {
  const Shape& s = g.shape(matrix);
  if (s.size() != 2) throw ShapeError("rows: expected a matrix, got " + shape_to_string(s));
  std::vector<Var> out;
  out.reserve(s[0]);
  for (std::size_t r = 0; r < s[0]; ++r) out.push_back(g.slice(matrix, r * s[1], (r + 1) * s[1]));
  return out;
}

// ---------------------------------------------------------------------------

LstmParams LstmParams::create(std::size_t input_size, std::size_t hidden_size, WeightInit init,
                              Rng& rng) {
  if (input_size == 0 || hidden_size == 0) throw ShapeError("LSTM sizes must be positive");
  LstmParams p;
  p.input_size = input_size;
  p.hidden_size = hidden_size;
  p.w_input = init_weight(4 * hidden_size, input_size, init, rng);
  p.w_hidden = init_weight(4 * hidden_size, hidden_size, init, rng);
  p.bias = Tensor::zeros({4 * hidden_size}, true);
  p.h0 = Tensor::zeros({hidden_size}, true);
  p.c0 = Tensor::zeros({hidden_size}, true);
  return p;
}

void LstmParams::collect(const std::string& prefix, std::vector<NamedParam>& out) {
  out.push_back({prefix + ".w_input", &w_input});
  out.push_back({prefix + ".w_hidden", &w_hidden});
  out.push_back({prefix + ".bias", &bias});
  out.push_back({prefix + ".h0", &h0});
  out.push_back({prefix + ".c0", &c0});
}

LstmState lstm_step(Graph& g, LstmParams& params, Var x, Var h_prev, Var c_prev) {
  const std::size_t h = params.hidden_size;
  if (g.shape(x) != Shape{params.input_size}) {
    throw ShapeError("lstm_step: input " + shape_to_string(g.shape(x)) + ", expected [" +
                     std::to_string(params.input_size) + "]");
  }
  if (g.shape(h_prev) != Shape{h} || g.shape(c_prev) != Shape{h}) {
    throw ShapeError("lstm_step: state shapes " + shape_to_string(g.shape(h_prev)) + "/" +
                     shape_to_string(g.shape(c_prev)) + ", expected [" + std::to_string(h) + "]");
  }
  Var pre = g.add(g.add(g.matmul(g.param(params.w_input), x),
                        g.matmul(g.param(params.w_hidden), h_prev)),
                  g.param(params.bias));
  Var i = g.sigmoid(g.slice(pre, 0, h));
  Var f = g.sigmoid(g.slice(pre, h, 2 * h));
  Var o = g.sigmoid(g.slice(pre, 2 * h, 3 * h));
  Var cand = g.tanh(g.slice(pre, 3 * h, 4 * h));
  Var c = g.add(g.mul(f, c_prev), g.mul(i, cand));
  return {g.mul(o, g.tanh(c)), c};
}

BiLstmStack BiLstmStack::create(std::size_t input_size, std::size_t hidden_size, std::size_t depth,
                                WeightInit init, Rng& rng) {
  if (depth == 0) throw std::invalid_argument("BiLSTM depth must be at least 1");
  BiLstmStack stack;
  for (std::size_t layer = 0; layer < depth; ++layer) {
    const std::size_t in = layer == 0 ? input_size : 2 * hidden_size;
    BiLstmLayer l;
    l.forward = LstmParams::create(in, hidden_size, init, rng);
    l.backward = LstmParams::create(in, hidden_size, init, rng);
    stack.layers.push_back(std::move(l));
  }
  return stack;
}

std::size_t BiLstmStack::hidden_size() const { return layers.front().forward.hidden_size; }

std::size_t BiLstmStack::input_size() const { return layers.front().forward.input_size; }

void BiLstmStack::collect(const std::string& prefix, std::vector<NamedParam>& out) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].forward.collect(prefix + ".l" + std::to_string(i) + ".fw", out);
    layers[i].backward.collect(prefix + ".l" + std::to_string(i) + ".bw", out);
  }
}

namespace {

// Runs one direction over `inputs` in the given order; `reverse` reads right
// to left but returns outputs indexed by position.
std::vector<Var> run_direction(Graph& g, LstmParams& params, std::span<const Var> inputs,
                               double input_rate, double state_rate, bool training, Rng* rng,
                               bool reverse) {
  const std::size_t n = inputs.size();
  std::vector<Var> xs =
      dropout_sequence(g, inputs, input_rate, DropoutMode::kSingleMask, training, rng);
  Var state_mask;
  if (training && state_rate > 0.0) {
    state_mask = g.constant({params.hidden_size},
                            dropout_mask(params.hidden_size, state_rate, *rng));
  }
  Var h = g.param(params.h0);
  Var c = g.param(params.c0);
  std::vector<Var> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t t = reverse ? n - 1 - k : k;
    Var h_in = state_mask.valid() ? g.mul(h, state_mask) : h;
    LstmState s = lstm_step(g, params, xs[t], h_in, c);
    h = s.h;
    c = s.c;
    out[t] = h;
  }
  return out;
}

}  // namespace

std::vector<Var> lstm_run(Graph& g, LstmParams& params, std::span<const Var> inputs,
                          const RecurrentDropout& dropout) {
  if (inputs.empty()) throw std::invalid_argument("lstm_run: empty input sequence");
  return run_direction(g, params, inputs, dropout.first_input_rate, dropout.state_rate,
                       dropout.training, dropout.rng, false);
}

BiLstmOutput bilstm_stack_run(Graph& g, BiLstmStack& stack, std::span<const Var> inputs,
                              const RecurrentDropout& dropout) {
  if (inputs.empty()) throw std::invalid_argument("bilstm_stack_run: empty input sequence");
  BiLstmOutput out;
  std::vector<Var> layer_input(inputs.begin(), inputs.end());
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    const double rate = l == 0 ? dropout.first_input_rate : dropout.inner_input_rate;
    out.forward = run_direction(g, stack.layers[l].forward, layer_input, rate, dropout.state_rate,
                                dropout.training, dropout.rng, false);
    out.backward = run_direction(g, stack.layers[l].backward, layer_input, rate,
                                 dropout.state_rate, dropout.training, dropout.rng, true);
    if (l + 1 < stack.layers.size()) {
      for (std::size_t t = 0; t < layer_input.size(); ++t) {
        layer_input[t] = g.concat({out.forward[t], out.backward[t]});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

MlpParams MlpParams::create(std::size_t input_size, std::size_t output_size, WeightInit init,
                            Rng& rng) {
  MlpParams p;
  p.weight = init_weight(output_size, input_size, init, rng);
  p.bias = Tensor::zeros({output_size}, true);
  return p;
}

void MlpParams::collect(const std::string& prefix, std::vector<NamedParam>& out) {
  out.push_back({prefix + ".weight", &weight});
  out.push_back({prefix + ".bias", &bias});
}

Var mlp_apply(Graph& g, MlpParams& params, Var x) {
  return g.elu(g.add(g.matmul(g.param(params.weight), x), g.param(params.bias)));
}

ClassifierParams ClassifierParams::create(std::size_t input_size, std::size_t num_tags,
                                          WeightInit init, Rng& rng) {
  ClassifierParams p;
  p.weight = init_weight(num_tags, input_size, init, rng);
  p.bias = Tensor::zeros({num_tags}, true);
  return p;
}

void ClassifierParams::collect(const std::string& prefix, std::vector<NamedParam>& out) {
  out.push_back({prefix + ".weight", &weight});
  out.push_back({prefix + ".bias", &bias});
}

Var classify(Graph& g, ClassifierParams& params, Var x) {
  return g.add(g.matmul(g.param(params.weight), x), g.param(params.bias));
}

Var softmax_xent(Graph& g, Var logits, std::size_t gold) { return g.softmax_xent(logits, gold); }

std::size_t argmax(std::span<const double> logits) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

// ---------------------------------------------------------------------------

Var char_attention(Graph& g, Var score_vector, std::span<const Var> states) {
  if (states.empty()) throw std::invalid_argument("char_attention: empty state sequence");
  const std::size_t h = g.shape(states[0])[0];
  std::vector<Var> as_rows;
  as_rows.reserve(states.size());
  for (Var s : states) as_rows.push_back(g.reshape(s, {1, h}));
  Var matrix = g.concat(as_rows, 0);                       // [n, h]
  Var weights = g.softmax(g.matmul(matrix, score_vector));  // [n]
  Var attended = g.matmul(g.transpose(matrix), weights);    // [h]
  return g.add(attended, states.back());
}

}  // namespace metatag::nn
