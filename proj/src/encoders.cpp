#include "metatag/encoders.hpp"

#include <stdexcept>

namespace metatag {

namespace {

constexpr std::uint8_t kAllPoints = 0xF;

const char* kPointNames[] = {"F1st", "Flast", "B1st", "Blast"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

GatherStrategy::GatherStrategy(std::uint8_t mask) : mask_(mask) {
  if ((mask_ & kAllPoints) == 0) throw std::invalid_argument("gather strategy must not be empty");
}

GatherStrategy GatherStrategy::all() { return GatherStrategy(kAllPoints); }

GatherStrategy GatherStrategy::of(std::initializer_list<GatherPoint> points) {
  std::uint8_t mask = 0;
  for (GatherPoint p : points) mask |= static_cast<std::uint8_t>(1u << static_cast<int>(p));
  return GatherStrategy(mask);
}

GatherStrategy GatherStrategy::parse(const std::string& text) {
  std::uint8_t mask = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string name = trim(text.substr(start, comma - start));
    start = comma + 1;
    if (name.empty()) continue;
    bool found = false;
    for (int i = 0; i < 4; ++i) {
      if (name == kPointNames[i]) {
        mask |= static_cast<std::uint8_t>(1u << i);
        found = true;
      }
    }
    if (!found) {
      throw std::invalid_argument("unknown gather point '" + name +
                                  "' (expected F1st, Flast, B1st, Blast)");
    }
  }
  return GatherStrategy(mask);
}

std::vector<GatherPoint> GatherStrategy::points() const {
  std::vector<GatherPoint> out;
  for (int i = 0; i < 4; ++i) {
    if ((mask_ >> i) & 1u) out.push_back(static_cast<GatherPoint>(i));
  }
  return out;
}

std::size_t GatherStrategy::count() const { return points().size(); }

std::string GatherStrategy::to_string() const {
  std::string out;
  for (GatherPoint p : points()) {
    if (!out.empty()) out += ',';
    out += gather_point_name(p);
  }
  return out;
}

std::string gather_point_name(GatherPoint p) { return kPointNames[static_cast<int>(p)]; }

std::vector<GatherStrategy> ablation_gather_strategies() {
  using P = GatherPoint;
  return {
      GatherStrategy::of({P::kForwardLast, P::kBackwardFirst}),
      GatherStrategy::of({P::kForwardFirst, P::kBackwardLast}),
      GatherStrategy::of({P::kForwardLast, P::kBackwardLast}),
      GatherStrategy::of({P::kForwardFirst, P::kBackwardFirst}),
  };
}

CharModel parse_char_model(const std::string& text) {
  if (text == "sentence") return CharModel::kSentence;
  if (text == "token") return CharModel::kToken;
  throw std::invalid_argument("unknown char model '" + text + "' (expected sentence or token)");
}

std::string to_string(CharModel model) {
  return model == CharModel::kSentence ? "sentence" : "token";
}

Tensor init_embeddings(std::size_t rows, std::size_t dim, nn::WeightInit init, Rng& rng) {
  const double variance = init == nn::WeightInit::kGaussian ? 1.0 : 1.0 / static_cast<double>(dim);
  return Tensor::gaussian({rows, dim}, rng, 0.0, variance, true);
}

// ---------------------------------------------------------------------------

CharSentEncoderParams CharSentEncoderParams::create(std::size_t num_chars,
                                                    std::size_t embedding_dim,
                                                    std::size_t lstm_size, std::size_t layers,
                                                    std::size_t mlp_size, std::size_t num_tags,
                                                    GatherStrategy gather,
                                                    const InitSchemes& init, Rng& rng) {
  CharSentEncoderParams p;
  p.gather = gather;
  p.embeddings = init_embeddings(num_chars, embedding_dim, init.char_embeddings, rng);
  p.stack = nn::BiLstmStack::create(embedding_dim, lstm_size, layers, init.lstm, rng);
  p.mlp = nn::MlpParams::create(gather.count() * lstm_size, mlp_size, init.mlp, rng);
  p.classifier = nn::ClassifierParams::create(mlp_size, num_tags, init.classifier, rng);
  return p;
}

void CharSentEncoderParams::collect(const std::string& prefix, std::vector<NamedParam>& out) {
  out.push_back({prefix + ".embeddings", &embeddings});
  stack.collect(prefix + ".lstm", out);
  mlp.collect(prefix + ".mlp", out);
  classifier.collect(prefix + ".classifier", out);
}

std::vector<TokenEncoding> encode_chars_sentence(Graph& g, CharSentEncoderParams& params,
                                                 const data::EncodedSentence& sentence,
                                                 const EncoderDropout& dropout, RunMode mode) {
  if (sentence.size() == 0) throw std::invalid_argument("encode_chars_sentence: empty sentence");
  const std::size_t n_chars = sentence.char_ids.size();
  for (const data::CharSpan& span : sentence.spans) {
    if (span.first > span.last || span.last >= n_chars) {
      throw std::out_of_range("encode_chars_sentence: token span [" + std::to_string(span.first) +
                              "," + std::to_string(span.last) + "] outside a stream of " +
                              std::to_string(n_chars) + " characters");
    }
  }

  Var table = g.param(params.embeddings);
  std::vector<Var> chars = nn::rows(g, nn::embedding_lookup(g, table, sentence.char_ids));
  chars = nn::dropout_sequence(g, chars, dropout.embeddings, nn::DropoutMode::kSingleMask,
                               mode.training, mode.rng);
  const nn::RecurrentDropout recurrent{0.0, dropout.lstm, dropout.lstm, mode.training, mode.rng};
  const nn::BiLstmOutput states = nn::bilstm_stack_run(g, params.stack, chars, recurrent);

  const std::vector<GatherPoint> points = params.gather.points();
  std::vector<TokenEncoding> out;
  out.reserve(sentence.size());
  std::vector<Var> parts;
  for (const data::CharSpan& span : sentence.spans) {
    parts.clear();
    for (GatherPoint p : points) {
      switch (p) {
        case GatherPoint::kForwardFirst: parts.push_back(states.forward[span.first]); break;
        case GatherPoint::kForwardLast: parts.push_back(states.forward[span.last]); break;
        case GatherPoint::kBackwardFirst: parts.push_back(states.backward[span.first]); break;
        case GatherPoint::kBackwardLast: parts.push_back(states.backward[span.last]); break;
      }
    }
    TokenEncoding enc;
    enc.rep = parts.size() == 1 ? parts[0] : g.concat(parts);
    Var mlp_in = nn::dropout(g, enc.rep, dropout.mlp, mode.training, mode.rng);
    enc.mlp_out = nn::mlp_apply(g, params.mlp, mlp_in);
    enc.logits = nn::classify(g, params.classifier, enc.mlp_out);
    out.push_back(enc);
  }
  return out;
}

// ---------------------------------------------------------------------------

CharTokenEncoderParams CharTokenEncoderParams::create(std::size_t num_chars,
                                                      std::size_t embedding_dim,
                                                      std::size_t lstm_size, std::size_t num_tags,
                                                      const InitSchemes& init, Rng& rng) {
  CharTokenEncoderParams p;
  p.embeddings = init_embeddings(num_chars, embedding_dim, init.char_embeddings, rng);
  p.lstm = nn::LstmParams::create(embedding_dim, lstm_size, init.lstm, rng);
  p.attention = Tensor::gaussian({lstm_size}, rng, 0.0, 1.0 / static_cast<double>(lstm_size), true);
  p.classifier = nn::ClassifierParams::create(lstm_size, num_tags, init.classifier, rng);
  return p;
}

void CharTokenEncoderParams::collect(const std::string& prefix, std::vector<NamedParam>& out) {
  out.push_back({prefix + ".embeddings", &embeddings});
  lstm.collect(prefix + ".lstm", out);
  out.push_back({prefix + ".attention", &attention});
  classifier.collect(prefix + ".classifier", out);
}

std::vector<TokenEncoding> encode_chars_token(Graph& g, CharTokenEncoderParams& params,
                                              const data::EncodedSentence& sentence,
                                              const EncoderDropout& dropout, RunMode mode) {
  if (sentence.size() == 0) throw std::invalid_argument("encode_chars_token: empty sentence");
  Var table = g.param(params.embeddings);
  Var score = g.param(params.attention);
  const nn::RecurrentDropout recurrent{0.0, 0.0, dropout.lstm, mode.training, mode.rng};
  std::vector<TokenEncoding> out;
  out.reserve(sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const auto& ids = sentence.token_chars[i];
    if (ids.empty()) throw std::invalid_argument("encode_chars_token: token " + std::to_string(i) + " is empty");
    std::vector<Var> chars = nn::rows(g, nn::embedding_lookup(g, table, ids));
    chars = nn::dropout_sequence(g, chars, dropout.embeddings, nn::DropoutMode::kSingleMask,
                                 mode.training, mode.rng);
    const std::vector<Var> states = nn::lstm_run(g, params.lstm, chars, recurrent);
    TokenEncoding enc;
    enc.rep = nn::char_attention(g, score, states);
    enc.mlp_out = enc.rep;
    enc.logits = nn::classify(g, params.classifier, enc.rep);
    out.push_back(enc);
  }
  return out;
}

// ---------------------------------------------------------------------------

WordEncoderParams WordEncoderParams::create(std::size_t num_words, Tensor pretrained,
                                            std::size_t lstm_size, std::size_t layers,
                                            std::size_t mlp_size, std::size_t num_tags,
                                            const InitSchemes& init, Rng& rng) {
  if (pretrained.shape().size() != 2 || pretrained.shape()[0] != num_words) {
    throw ShapeError("pretrained matrix " + shape_to_string(pretrained.shape()) +
                     " does not match a word vocabulary of " + std::to_string(num_words));
  }
  WordEncoderParams p;
  const std::size_t dim = pretrained.shape()[1];
  p.embeddings = Tensor::zeros({num_words, dim}, true);
  p.pretrained = std::move(pretrained);
  p.pretrained.set_requires_grad(false);
  p.stack = nn::BiLstmStack::create(dim, lstm_size, layers, init.lstm, rng);
  p.mlp = nn::MlpParams::create(2 * lstm_size, mlp_size, init.mlp, rng);
  p.classifier = nn::ClassifierParams::create(mlp_size, num_tags, init.classifier, rng);
  return p;
}

void WordEncoderParams::collect(const std::string& prefix, std::vector<NamedParam>& out) {
  out.push_back({prefix + ".embeddings", &embeddings});
  stack.collect(prefix + ".lstm", out);
  mlp.collect(prefix + ".mlp", out);
  classifier.collect(prefix + ".classifier", out);
}

std::vector<TokenEncoding> encode_words(Graph& g, WordEncoderParams& params,
                                        const data::EncodedSentence& sentence,
                                        const EncoderDropout& dropout, RunMode mode) {
  if (sentence.size() == 0) throw std::invalid_argument("encode_words: empty sentence");
  const auto& frozen = static_cast<const Tensor&>(params.pretrained);
  Var learned = nn::embedding_lookup(g, g.param(params.embeddings), sentence.word_ids);
  Var pretrained = nn::embedding_lookup(g, g.param(frozen), sentence.word_ids);
  std::vector<Var> words = nn::rows(g, g.add(learned, pretrained));
  words = nn::dropout_sequence(g, words, dropout.embeddings, nn::DropoutMode::kSingleMask,
                               mode.training, mode.rng);
  const nn::RecurrentDropout recurrent{0.0, dropout.lstm, dropout.lstm, mode.training, mode.rng};
  const nn::BiLstmOutput states = nn::bilstm_stack_run(g, params.stack, words, recurrent);

  std::vector<TokenEncoding> out;
  out.reserve(sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    TokenEncoding enc;
    enc.rep = g.concat({states.forward[i], states.backward[i]});
    Var mlp_in = nn::dropout(g, enc.rep, dropout.mlp, mode.training, mode.rng);
    enc.mlp_out = nn::mlp_apply(g, params.mlp, mlp_in);
    enc.logits = nn::classify(g, params.classifier, enc.mlp_out);
    out.push_back(enc);
  }
  return out;
}

}  // namespace metatag
