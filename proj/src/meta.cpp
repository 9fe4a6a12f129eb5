#include "metatag/meta.hpp"

#include <stdexcept>

namespace metatag {

MetaParams MetaParams::create(std::size_t input_size, std::size_t lstm_size, std::size_t layers,
                              std::size_t mlp_size, std::size_t num_tags,
                              const InitSchemes& init, Rng& rng) {
  MetaParams p;
  p.stack = nn::BiLstmStack::create(input_size, lstm_size, layers, init.lstm, rng);
  p.mlp = nn::MlpParams::create(2 * lstm_size, mlp_size, init.mlp, rng);
  p.classifier = nn::ClassifierParams::create(mlp_size, num_tags, init.classifier, rng);
  return p;
}

void MetaParams::collect(const std::string& prefix, std::vector<NamedParam>& out) {
  stack.collect(prefix + ".lstm", out);
  mlp.collect(prefix + ".mlp", out);
  classifier.collect(prefix + ".classifier", out);
}

MetaOutput combine(Graph& g, MetaParams& params, std::span<const Var> m_chars,
                   std::span<const Var> m_word, bool detach_inputs, const MetaDropout& dropout,
                   RunMode mode) {
  if (m_chars.size() != m_word.size()) {
    throw std::invalid_argument("combine: " + std::to_string(m_chars.size()) +
                                " character encodings vs " + std::to_string(m_word.size()) +
                                " word encodings");
  }
  if (m_chars.empty()) throw std::invalid_argument("combine: empty sentence");

  std::vector<Var> cw(m_chars.size());
  for (std::size_t i = 0; i < cw.size(); ++i) {
    Var c = detach_inputs ? g.detach(m_chars[i]) : m_chars[i];
    Var w = detach_inputs ? g.detach(m_word[i]) : m_word[i];
    cw[i] = g.concat({c, w});
  }
  const nn::RecurrentDropout recurrent{dropout.lstm, dropout.lstm, dropout.lstm, mode.training,
                                       mode.rng};
  const nn::BiLstmOutput states = nn::bilstm_stack_run(g, params.stack, cw, recurrent);

  MetaOutput out;
  for (std::size_t i = 0; i < cw.size(); ++i) {
    Var joined = g.concat({states.forward[i], states.backward[i]});
    Var mlp_in = nn::dropout(g, joined, dropout.mlp, mode.training, mode.rng);
    Var m = nn::mlp_apply(g, params.mlp, mlp_in);
    out.combined.push_back(m);
    out.logits.push_back(nn::classify(g, params.classifier, m));
  }
  return out;
}

std::vector<std::size_t> predict(const Graph& g, std::span<const Var> logits) {
  std::vector<std::size_t> out;
  out.reserve(logits.size());
  for (Var v : logits) out.push_back(nn::argmax(g.value(v)));
  return out;
}

}  // namespace metatag
