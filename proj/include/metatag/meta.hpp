// Meta-BiLSTM combiner over the character and word encoders' MLP outputs.

#pragma once

#include <span>
#include <vector>

#include "metatag/encoders.hpp"
#include "metatag/nn.hpp"

namespace metatag {

struct MetaParams {
  nn::BiLstmStack stack;
  nn::MlpParams mlp;
  nn::ClassifierParams classifier;

  static MetaParams create(std::size_t input_size, std::size_t lstm_size, std::size_t layers,
                           std::size_t mlp_size, std::size_t num_tags, const InitSchemes& init,
                           Rng& rng);
  std::size_t input_size() const { return stack.input_size(); }
  void collect(const std::string& prefix, std::vector<NamedParam>& out);
};

struct MetaDropout {
  double lstm = 0.0;
  double mlp = 0.0;
};

struct MetaOutput {
  std::vector<Var> combined;  // m_i^comb
  std::vector<Var> logits;
};

/// cw_i = concat(m_chars[i], m_word[i]); BiLSTM over cw; MLP; classifier.
/// With `detach_inputs` the encoder outputs are cut from their graphs, so the
/// meta loss cannot reach encoder parameters.
MetaOutput combine(Graph& g, MetaParams& params, std::span<const Var> m_chars,
                   std::span<const Var> m_word, bool detach_inputs, const MetaDropout& dropout,
                   RunMode mode);

/// Argmax per token, lowest tag id on ties.
std::vector<std::size_t> predict(const Graph& g, std::span<const Var> logits);

}  // namespace metatag
