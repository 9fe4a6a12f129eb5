// Token encoders: sentence-level character BiLSTM, token-internal character
// LSTM with attention (the token-level baseline), and the sentence-level word BiLSTM.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "metatag/data.hpp"
#include "metatag/nn.hpp"
#include "metatag/tensor.hpp"

namespace metatag {

/// Outputs of the sentence character BiLSTM that can be gathered per token.
enum class GatherPoint : std::uint8_t {
  kForwardFirst = 0,
  kForwardLast = 1,
  kBackwardFirst = 2,
  kBackwardLast = 3,
};

/// Nonempty subset of gather points, always concatenated in the order
/// F1st, Flast, B1st, Blast.
class GatherStrategy {
 public:
  static GatherStrategy all();
  /// Comma separated names, e.g. "Flast,B1st". Order does not matter.
  static GatherStrategy parse(const std::string& text);
  static GatherStrategy of(std::initializer_list<GatherPoint> points);

  std::vector<GatherPoint> points() const;
  std::size_t count() const;
  bool contains(GatherPoint p) const { return (mask_ >> static_cast<int>(p)) & 1u; }
  std::string to_string() const;
  bool operator==(const GatherStrategy&) const = default;

 private:
  explicit GatherStrategy(std::uint8_t mask);
  std::uint8_t mask_ = 0xF;
};

std::string gather_point_name(GatherPoint p);

/// The two-point strategies compared in the gather ablation.
std::vector<GatherStrategy> ablation_gather_strategies();

enum class CharModel { kSentence, kToken };
CharModel parse_char_model(const std::string& text);
std::string to_string(CharModel model);

/// Dropout rates of one encoder, plus the random source for training.
struct EncoderDropout {
  double embeddings = 0.0;
  double lstm = 0.0;
  double mlp = 0.0;
};

struct RunMode {
  bool training = false;
  Rng* rng = nullptr;
};

struct TokenEncoding {
  Var rep;      // g_i, o_i, or the attention representation
  Var mlp_out;  // m_i; for the token character model equal to rep
  Var logits;
};

struct InitSchemes {
  nn::WeightInit char_embeddings = nn::WeightInit::kGaussian;
  nn::WeightInit mlp = nn::WeightInit::kGaussian;
  nn::WeightInit lstm = nn::WeightInit::kScaledGaussian;
  nn::WeightInit classifier = nn::WeightInit::kScaledGaussian;
};

/// Embedding table [rows, dim] drawn under `init` (fan_in = dim for scaling).
Tensor init_embeddings(std::size_t rows, std::size_t dim, nn::WeightInit init, Rng& rng);

// ---------------------------------------------------------------------------

struct CharSentEncoderParams {
  Tensor embeddings;  // [chars, dim]
  nn::BiLstmStack stack;
  nn::MlpParams mlp;
  nn::ClassifierParams classifier;
  GatherStrategy gather = GatherStrategy::all();

  static CharSentEncoderParams create(std::size_t num_chars, std::size_t embedding_dim,
                                      std::size_t lstm_size, std::size_t layers,
                                      std::size_t mlp_size, std::size_t num_tags,
                                      GatherStrategy gather, const InitSchemes& init, Rng& rng);
  void collect(const std::string& prefix, std::vector<NamedParam>& out);
};

/// Runs the BiLSTM over the whole character stream (spaces included) and
/// gathers per-token outputs at the first and last character of each token.
std::vector<TokenEncoding> encode_chars_sentence(Graph& g, CharSentEncoderParams& params,
                                                 const data::EncodedSentence& sentence,
                                                 const EncoderDropout& dropout, RunMode mode);

struct CharTokenEncoderParams {
  Tensor embeddings;  // [chars, dim]
  nn::LstmParams lstm;
  Tensor attention;  // [hidden] score vector
  nn::ClassifierParams classifier;

  static CharTokenEncoderParams create(std::size_t num_chars, std::size_t embedding_dim,
                                       std::size_t lstm_size, std::size_t num_tags,
                                       const InitSchemes& init, Rng& rng);
  std::size_t output_size() const { return lstm.hidden_size; }
  void collect(const std::string& prefix, std::vector<NamedParam>& out);
};

/// Left-to-right LSTM over each token's own characters; the representation
/// is the final state plus attention over all states of the token.
std::vector<TokenEncoding> encode_chars_token(Graph& g, CharTokenEncoderParams& params,
                                              const data::EncodedSentence& sentence,
                                              const EncoderDropout& dropout, RunMode mode);

struct WordEncoderParams {
  Tensor embeddings;  // [words, dim], zero initialized, trainable
  Tensor pretrained;  // [words, dim], frozen
  nn::BiLstmStack stack;
  nn::MlpParams mlp;
  nn::ClassifierParams classifier;

  static WordEncoderParams create(std::size_t num_words, Tensor pretrained, std::size_t lstm_size,
                                  std::size_t layers, std::size_t mlp_size, std::size_t num_tags,
                                  const InitSchemes& init, Rng& rng);
  void collect(const std::string& prefix, std::vector<NamedParam>& out);
};

/// in_i = learned[w_i] + pretrained[w_i], BiLSTM over tokens, MLP, classifier.
std::vector<TokenEncoding> encode_words(Graph& g, WordEncoderParams& params,
                                        const data::EncodedSentence& sentence,
                                        const EncoderDropout& dropout, RunMode mode);

}  // namespace metatag
