// Small corpora and configs shared by the test binaries.

#pragma once

#include <string>
#include <vector>

#include "metatag/config.hpp"
#include "metatag/data.hpp"

namespace metatag::testing {

inline std::string conllu_line(std::size_t id, const std::string& form, const std::string& xpos,
                               const std::string& feats = "_") {
  return std::to_string(id) + "\t" + form + "\t_\tX\t" + xpos + "\t" + feats + "\t_\t_\t_\t_\n";
}

/// Sentences given as "form/TAG" items.
inline std::vector<data::Sentence> tagged(const std::vector<std::vector<std::string>>& sentences) {
  std::string text;
  for (const auto& items : sentences) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto slash = items[i].rfind('/');
      text += conllu_line(i + 1, items[i].substr(0, slash), items[i].substr(slash + 1));
    }
    text += "\n";
  }
  return data::parse_conllu(text);
}

inline std::vector<data::Sentence> two_sentences() {
  return tagged({{"the/DT", "old/JJ", "dogs/NNS", "bark/VBP"}, {"a/DT", "cat/NN", "sleeps/VBZ"}});
}

/// Every dimension tiny so finite differences stay cheap.
inline TrainConfig tiny_config() {
  TrainConfig c;
  c.char_layers = 2;
  c.word_layers = 2;
  c.meta_layers = 1;
  c.char_lstm_size = 3;
  c.word_lstm_size = 3;
  c.meta_lstm_size = 3;
  c.char_mlp_size = 4;
  c.word_mlp_size = 4;
  c.meta_mlp_size = 4;
  c.char_embedding_dim = 3;
  c.word_embedding_dim = 3;
  c.init_mlp = nn::WeightInit::kScaledGaussian;
  c.init_char_embeddings = nn::WeightInit::kGaussian;
  return c;
}

/// Reduced sizes for end-to-end training tests.
inline TrainConfig small_config(std::size_t size) {
  TrainConfig c;
  c.char_layers = 1;
  c.word_layers = 1;
  c.meta_layers = 1;
  c.char_lstm_size = size;
  c.word_lstm_size = size;
  c.meta_lstm_size = size;
  c.char_mlp_size = size;
  c.word_mlp_size = size;
  c.meta_mlp_size = size;
  c.char_embedding_dim = size / 2 > 0 ? size / 2 : 1;
  c.word_embedding_dim = size / 2 > 0 ? size / 2 : 1;
  c.batch_size = 4;
  return c;
}

}  // namespace metatag::testing
