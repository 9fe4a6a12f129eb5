// Generated languages with a known tagging rule, for directional experiments.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "metatag/data.hpp"

namespace metatag::synthetic {

enum class Plan {
  // Every token is a fresh random stem plus one of K suffixes; a token's tag
  // is the suffix class of the token to its left ("BOS" for the first token).
  kNeighborSuffix,
  // Regular words are a random stem plus a class suffix and are tagged by it.
  // A small lexicon of irregular words carries arbitrary tags and misleading
  // suffixes; they are rare in training but the pretrained vectors encode
  // their class.
  kComplementary,
};

Plan parse_plan(std::string_view name);
std::string_view to_string(Plan plan);

struct Options {
  Plan plan = Plan::kNeighborSuffix;
  std::size_t train_sentences = 400;
  std::size_t dev_sentences = 100;
  std::size_t min_length = 4;
  std::size_t max_length = 10;
  std::size_t classes = 4;
  std::size_t irregular_words = 24;  // complementary only
  double irregular_rate = 0.25;      // share of dev tokens drawn from the lexicon
  std::size_t pretrained_dim = 16;
  std::uint64_t seed = 1;
};

struct Corpus {
  std::vector<data::Sentence> train;
  std::vector<data::Sentence> dev;
  /// word2vec text format; empty for plans without a word signal.
  std::string pretrained;
};

/// Tags are written to both the UPOS and XPOS columns.
Corpus generate(const Options& options);

}  // namespace metatag::synthetic
