#include "metatag/model.hpp"

#include <stdexcept>

namespace metatag {

namespace {

Var mean_loss(Graph& g, std::span<const Var> logits, std::span<const std::size_t> gold) {
  std::vector<Var> terms;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (gold[i] == data::kNoTag) continue;
    terms.push_back(nn::softmax_xent(g, logits[i], gold[i]));
  }
  if (terms.empty()) return Var{};
  Var total = terms.size() == 1 ? terms[0] : g.sum(g.concat(terms));
  return g.scale(total, 1.0 / static_cast<double>(terms.size()));
}

std::vector<Var> logits_of(const std::vector<TokenEncoding>& enc) {
  std::vector<Var> out;
  out.reserve(enc.size());
  for (const TokenEncoding& e : enc) out.push_back(e.logits);
  return out;
}

std::vector<Var> mlp_of(const std::vector<TokenEncoding>& enc) {
  std::vector<Var> out;
  out.reserve(enc.size());
  for (const TokenEncoding& e : enc) out.push_back(e.mlp_out);
  return out;
}

}  // namespace

TaggerModel TaggerModel::create(const TrainConfig& config, const data::Vocabs& vocabs,
                                Tensor pretrained, Rng& rng) {
  config.validate();
  if (vocabs.tags.size() == 0) throw std::invalid_argument("tag vocabulary is empty");
  TaggerModel m;
  m.config_ = config;
  m.num_tags_ = vocabs.tags.size();
  const InitSchemes init = config.init_schemes();
  if (config.char_model == CharModel::kSentence) {
    m.char_sentence = CharSentEncoderParams::create(
        vocabs.chars.size(), config.char_embedding_dim, config.char_lstm_size, config.char_layers,
        config.char_mlp_size, m.num_tags_, config.gather, init, rng);
  } else {
    m.char_token = CharTokenEncoderParams::create(vocabs.chars.size(), config.char_embedding_dim,
                                                  config.char_lstm_size, m.num_tags_, init, rng);
  }
  m.word = WordEncoderParams::create(vocabs.words.size(), std::move(pretrained),
                                     config.word_lstm_size, config.word_layers,
                                     config.word_mlp_size, m.num_tags_, init, rng);
  m.meta = MetaParams::create(m.char_output_size() + config.word_mlp_size, config.meta_lstm_size,
                              config.meta_layers, config.meta_mlp_size, m.num_tags_, init, rng);
  return m;
}

std::size_t TaggerModel::char_output_size() const {
  return char_sentence ? config_.char_mlp_size : char_token->output_size();
}

std::vector<NamedParam> TaggerModel::char_parameters() {
  std::vector<NamedParam> out;
  if (char_sentence) char_sentence->collect("char", out);
  if (char_token) char_token->collect("char", out);
  return out;
}

std::vector<NamedParam> TaggerModel::word_parameters() {
  std::vector<NamedParam> out;
  word.collect("word", out);
  return out;
}

std::vector<NamedParam> TaggerModel::meta_parameters() {
  std::vector<NamedParam> out;
  meta.collect("meta", out);
  return out;
}

std::vector<NamedParam> TaggerModel::trainable_parameters() {
  std::vector<NamedParam> out = char_parameters();
  for (auto& p : word_parameters()) out.push_back(p);
  for (auto& p : meta_parameters()) out.push_back(p);
  return out;
}

std::vector<NamedParam> TaggerModel::all_tensors() {
  std::vector<NamedParam> out = trainable_parameters();
  out.push_back({"word.pretrained", &word.pretrained});
  return out;
}

SentenceForward TaggerModel::forward(Graph& g, const data::EncodedSentence& sentence,
                                     const ForwardOptions& options) {
  if (options.run_meta && !(options.run_char && options.run_word)) {
    throw std::invalid_argument("forward: the meta model needs both encoders");
  }
  const EncoderDropout char_dropout{config_.dropout_char_embeddings, config_.dropout_lstm,
                                    config_.dropout_mlp};
  const EncoderDropout word_dropout{config_.dropout_word_embeddings, config_.dropout_lstm,
                                    config_.dropout_mlp};
  SentenceForward out;
  std::vector<TokenEncoding> chars;
  std::vector<TokenEncoding> words;
  if (options.run_char) {
    chars = char_sentence
                ? encode_chars_sentence(g, *char_sentence, sentence, char_dropout, options.mode)
                : encode_chars_token(g, *char_token, sentence, char_dropout, options.mode);
    out.char_logits = logits_of(chars);
    out.char_loss = mean_loss(g, out.char_logits, sentence.gold);
  }
  if (options.run_word) {
    words = encode_words(g, word, sentence, word_dropout, options.mode);
    out.word_logits = logits_of(words);
    out.word_loss = mean_loss(g, out.word_logits, sentence.gold);
  }
  if (options.run_meta) {
    const std::vector<Var> m_chars = mlp_of(chars);
    const std::vector<Var> m_words = mlp_of(words);
    MetaOutput combined = combine(g, meta, m_chars, m_words, options.detach_meta_inputs,
                                  MetaDropout{config_.dropout_lstm, config_.dropout_mlp},
                                  options.mode);
    out.meta_logits = std::move(combined.logits);
    out.meta_loss = mean_loss(g, out.meta_logits, sentence.gold);
  }
  return out;
}

std::vector<std::size_t> TaggerModel::tag(const data::EncodedSentence& sentence) {
  Graph g;
  ForwardOptions options;
  SentenceForward f = forward(g, sentence, options);
  return predict(g, f.meta_logits);
}

}  // namespace metatag
