// Neural layers over the tensor graph: embeddings, dropout, LSTM/BiLSTM
// stacks, ELU MLPs, linear classifiers, cross-entropy and character attention.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "metatag/tensor.hpp"

namespace metatag::nn {

/// How randomly initialized weights are drawn.
enum class WeightInit {
  kGaussian,        // N(0, 1)
  kScaledGaussian,  // N(0, 1 / fan_in)
};

WeightInit parse_weight_init(const std::string& text);
std::string to_string(WeightInit init);

/// Gaussian weight matrix [rows, cols] under `init` (fan_in = cols).
Tensor init_weight(std::size_t rows, std::size_t cols, WeightInit init, Rng& rng);

// ---------------------------------------------------------------------------
// Dropout

enum class DropoutMode {
  kSingleMask,   // one mask shared along the sequence
  kPerPosition,  // fresh mask for every call
};

/// Inverted dropout mask: entries are 0 with probability `rate`, else
/// 1 / (1 - rate).
std::vector<double> dropout_mask(std::size_t size, double rate, Rng& rng);

/// Applies inverted dropout to `x`. Identity when `!training` or rate == 0.
Var dropout(Graph& g, Var x, double rate, bool training, Rng* rng);

/// Dropout over a sequence of equally shaped vectors. In kSingleMask mode one
/// mask is drawn and reused at every position.
std::vector<Var> dropout_sequence(Graph& g, std::span<const Var> xs, double rate,
                                  DropoutMode mode, bool training, Rng* rng);

// ---------------------------------------------------------------------------
// Embeddings

/// Row-gathered [ids.size(), dim] matrix; gradients scatter-add into `table`.
Var embedding_lookup(Graph& g, Var table, std::span<const std::size_t> ids);

/// Splits a [n, d] matrix into n rank-1 rows.
std::vector<Var> rows(Graph& g, Var matrix);

// ---------------------------------------------------------------------------
// LSTM

/// Standard LSTM cell without peepholes. Gate blocks are stacked in the order
/// input, forget, output, candidate.
struct LstmParams {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  Tensor w_input;   // [4h, input]
  Tensor w_hidden;  // [4h, h]
  Tensor bias;      // [4h]
  Tensor h0;        // [h], trainable start state
  Tensor c0;        // [h]

  static LstmParams create(std::size_t input_size, std::size_t hidden_size, WeightInit init,
                           Rng& rng);
  void collect(const std::string& prefix, std::vector<NamedParam>& out);
};

struct LstmState {
  Var h;
  Var c;
};

LstmState lstm_step(Graph& g, LstmParams& params, Var x, Var h_prev, Var c_prev);

struct BiLstmLayer {
  LstmParams forward;
  LstmParams backward;
};

struct BiLstmStack {
  std::vector<BiLstmLayer> layers;

  static BiLstmStack create(std::size_t input_size, std::size_t hidden_size, std::size_t depth,
                            WeightInit init, Rng& rng);
  std::size_t depth() const { return layers.size(); }
  std::size_t hidden_size() const;
  std::size_t input_size() const;
  void collect(const std::string& prefix, std::vector<NamedParam>& out);
};

struct RecurrentDropout {
  double first_input_rate = 0.0;  // dropout on the stack's own inputs
  double inner_input_rate = 0.0;  // dropout between layers
  double state_rate = 0.0;        // dropout on h_{t-1} fed to the recurrence
  bool training = false;
  Rng* rng = nullptr;
};

struct BiLstmOutput {
  std::vector<Var> forward;   // top-layer forward outputs, per position
  std::vector<Var> backward;  // top-layer backward outputs, per position
};

/// Runs a stacked BiLSTM. Layer j > 1 consumes concat(f, b) of layer j - 1.
/// Dropout masks are drawn once per sequence, layer and direction.
BiLstmOutput bilstm_stack_run(Graph& g, BiLstmStack& stack, std::span<const Var> inputs,
                              const RecurrentDropout& dropout);

/// Unidirectional run; returns the hidden state at each position.
std::vector<Var> lstm_run(Graph& g, LstmParams& params, std::span<const Var> inputs,
                          const RecurrentDropout& dropout);

// ---------------------------------------------------------------------------
// MLP, classifier, loss

struct MlpParams {
  Tensor weight;  // [out, in]
  Tensor bias;    // [out]

  static MlpParams create(std::size_t input_size, std::size_t output_size, WeightInit init,
                          Rng& rng);
  std::size_t input_size() const { return weight.shape()[1]; }
  std::size_t output_size() const { return weight.shape()[0]; }
  void collect(const std::string& prefix, std::vector<NamedParam>& out);
};

/// elu(W x + b)
Var mlp_apply(Graph& g, MlpParams& params, Var x);

struct ClassifierParams {
  Tensor weight;  // [tags, in]
  Tensor bias;    // [tags]

  static ClassifierParams create(std::size_t input_size, std::size_t num_tags, WeightInit init,
                                 Rng& rng);
  std::size_t num_tags() const { return weight.shape()[0]; }
  void collect(const std::string& prefix, std::vector<NamedParam>& out);
};

/// W x + b
Var classify(Graph& g, ClassifierParams& params, Var x);

/// -log softmax(logits)[gold]
Var softmax_xent(Graph& g, Var logits, std::size_t gold);

/// Index of the largest logit; ties go to the lowest index.
std::size_t argmax(std::span<const double> logits);

// ---------------------------------------------------------------------------
// Character attention

/// Token representation of the token-internal character model: softmax
/// attention over `states` (scores are dot products with `score_vector`),
/// added to the final state.
Var char_attention(Graph& g, Var score_vector, std::span<const Var> states);

}  // namespace metatag::nn
