// CoNLL-U ingestion, vocabularies, character streams and pretrained vectors.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "metatag/tensor.hpp"

namespace metatag::data {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Which CoNLL-U column is the tagging target.
enum class Task { kXpos, kFeats, kUpos };

Task parse_task(std::string_view name);
std::string_view to_string(Task task);
/// 0-based CoNLL-U column holding the task's tag (UPOS 3, XPOS 4, FEATS 5).
std::size_t task_column(Task task);

/// Inclusive character positions of a token inside the sentence stream.
struct CharSpan {
  std::size_t first = 0;
  std::size_t last = 0;
  bool operator==(const CharSpan&) const = default;
};

inline constexpr std::size_t kConlluColumns = 10;

struct Token {
  std::array<std::string, kConlluColumns> columns;
  std::size_t line_index = 0;  // position in Sentence::lines
  CharSpan span;

  const std::string& form() const { return columns[1]; }
  const std::string& upos() const { return columns[3]; }
  const std::string& xpos() const { return columns[4]; }
  const std::string& feats() const { return columns[5]; }
  /// Gold tag for `task`; FEATS is returned in canonical bundle form.
  std::string tag(Task task) const;
  void set_tag(Task task, std::string value);
};

struct Sentence {
  /// Every raw line of the block (comments, ranges, empty nodes, words),
  /// without the newline. Word lines are regenerated from `tokens`.
  std::vector<std::string> lines;
  std::vector<Token> tokens;
  /// UTF-8 characters of the detokenized sentence, single space separated.
  std::vector<std::string> chars;

  std::vector<std::string> forms() const;
};

std::vector<Sentence> parse_conllu(std::string_view text);
std::vector<Sentence> read_conllu(const std::filesystem::path& path);
std::string serialize_conllu(const std::vector<Sentence>& sentences);
void write_conllu(const std::filesystem::path& path, const std::vector<Sentence>& sentences);

/// Splits UTF-8 text into code point strings. Invalid bytes become
/// single-byte characters.
std::vector<std::string> utf8_chars(std::string_view text);

struct CharStream {
  std::vector<std::string> chars;
  std::vector<CharSpan> spans;
};

/// Joins forms with one ASCII space and records each form's span.
CharStream char_stream_build(const std::vector<std::string>& forms);

/// Canonical single-tag form of a FEATS bundle: pairs sorted by attribute
/// name and re-joined with '|'. "_" stays "_".
std::string morph_bundle_tag(std::string_view feats);

// ---------------------------------------------------------------------------

class Vocabulary {
 public:
  /// Returns the id of `item`, adding it if new. Throws when frozen.
  std::size_t add(const std::string& item);
  std::optional<std::size_t> find(const std::string& item) const;
  const std::string& item(std::size_t id) const { return items_.at(id); }
  const std::vector<std::string>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

 private:
  std::vector<std::string> items_;
  std::unordered_map<std::string, std::size_t> index_;
  bool frozen_ = false;
};

inline constexpr std::size_t kUnknownId = 0;
inline constexpr std::size_t kNoTag = static_cast<std::size_t>(-1);
inline constexpr std::string_view kUnknownWord = "<UNK>";
inline constexpr std::string_view kUnknownChar = "<UNK>";

struct Vocabs {
  Vocabulary words;  // id 0 is the unknown word
  Vocabulary chars;  // id 0 is the unknown character
  Vocabulary tags;   // no unknown entry; unseen tags map to kNoTag

  std::size_t word_id(const std::string& form) const;
  std::size_t char_id(const std::string& ch) const;
  std::size_t tag_id(const std::string& tag) const;
  void freeze();
};

/// Word, character and tag vocabularies over `train`, ids in order of first
/// occurrence. Words seen fewer than `min_count` times map to the unknown id.
Vocabs build_vocabs(const std::vector<Sentence>& train, Task task, std::size_t min_count = 1);

/// Id view of a sentence under fixed vocabularies.
struct EncodedSentence {
  std::vector<std::size_t> word_ids;
  std::vector<std::size_t> char_ids;                // full stream incl. spaces
  std::vector<CharSpan> spans;                      // per token
  std::vector<std::vector<std::size_t>> token_chars;  // per token, no spaces
  std::vector<std::size_t> gold;                    // kNoTag when unseen
  std::size_t size() const { return word_ids.size(); }
};

EncodedSentence encode(const Sentence& sentence, const Vocabs& vocabs, Task task);

// ---------------------------------------------------------------------------

struct PretrainedEmbeddings {
  Tensor matrix;  // [word vocab, dim], never trainable
  std::size_t dim = 0;
  std::size_t covered = 0;  // vocab words (excluding <UNK>) with a vector
  double coverage = 0.0;
};

/// Reads "word v1 ... vd" lines (optional "count dim" header). Rows of vocab
/// words absent from the file are zero. With `lowercase_fallback`, a miss is
/// retried with the ASCII-lowercased form.
PretrainedEmbeddings load_pretrained(const std::filesystem::path& path, const Vocabulary& words,
                                     bool lowercase_fallback = true);
PretrainedEmbeddings parse_pretrained(std::string_view text, const Vocabulary& words,
                                      bool lowercase_fallback = true);
/// All-zero embeddings for runs without a pretrained file.
PretrainedEmbeddings zero_pretrained(const Vocabulary& words, std::size_t dim);

/// Seeded sentence-level split; dev receives ceil(fraction * N) sentences.
/// Both halves keep the corpus order.
std::pair<std::vector<Sentence>, std::vector<Sentence>> dev_split(
    const std::vector<Sentence>& corpus, double fraction, std::uint64_t seed);

std::string read_file(const std::filesystem::path& path);

}  // namespace metatag::data
