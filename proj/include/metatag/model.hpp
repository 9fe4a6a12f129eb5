// The full tagger: character encoder, word encoder and meta combiner.

#pragma once

#include <optional>
#include <vector>

#include "metatag/config.hpp"
#include "metatag/data.hpp"
#include "metatag/encoders.hpp"
#include "metatag/meta.hpp"

namespace metatag {

struct ForwardOptions {
  bool run_char = true;
  bool run_word = true;
  bool run_meta = true;  // requires run_char and run_word
  /// Cut the meta inputs from the encoder graphs (separate optimization).
  bool detach_meta_inputs = true;
  RunMode mode;
};

struct SentenceForward {
  std::vector<Var> char_logits;
  std::vector<Var> word_logits;
  std::vector<Var> meta_logits;
  // Mean token cross-entropy; invalid when the model part did not run or no
  // token has a known gold tag.
  Var char_loss;
  Var word_loss;
  Var meta_loss;
};

class TaggerModel {
 public:
  /// `pretrained` must be [word vocab, dim]; the learned word table gets the
  /// same dimension.
  static TaggerModel create(const TrainConfig& config, const data::Vocabs& vocabs,
                            Tensor pretrained, Rng& rng);

  const TrainConfig& config() const { return config_; }
  std::size_t num_tags() const { return num_tags_; }
  std::size_t char_output_size() const;

  std::optional<CharSentEncoderParams> char_sentence;
  std::optional<CharTokenEncoderParams> char_token;
  WordEncoderParams word;
  MetaParams meta;

  std::vector<NamedParam> char_parameters();
  std::vector<NamedParam> word_parameters();
  std::vector<NamedParam> meta_parameters();
  std::vector<NamedParam> trainable_parameters();
  /// Trainable parameters plus the frozen pretrained matrix.
  std::vector<NamedParam> all_tensors();

  SentenceForward forward(Graph& g, const data::EncodedSentence& sentence,
                          const ForwardOptions& options);

  /// Meta-model predictions (tag ids) with dropout off.
  std::vector<std::size_t> tag(const data::EncodedSentence& sentence);

 private:
  TrainConfig config_;
  std::size_t num_tags_ = 0;
};

}  // namespace metatag
