#include "metatag/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace metatag::data {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::string join_tokens_line(const Token& token) {
  std::string line;
  for (std::size_t c = 0; c < kConlluColumns; ++c) {
    if (c) line += '\t';
    line += token.columns[c];
  }
  return line;
}

void finish_sentence(Sentence& sentence, std::vector<Sentence>& out) {
  if (sentence.tokens.empty()) {
    sentence = Sentence{};
    return;
  }
  CharStream stream = char_stream_build(sentence.forms());
  sentence.chars = std::move(stream.chars);
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    sentence.tokens[i].span = stream.spans[i];
  }
  out.push_back(std::move(sentence));
  sentence = Sentence{};
}

}  // namespace

Task parse_task(std::string_view name) {
  if (name == "xpos") return Task::kXpos;
  if (name == "feats") return Task::kFeats;
  if (name == "upos") return Task::kUpos;
  throw std::invalid_argument("unknown task '" + std::string(name) +
                              "' (expected xpos, feats or upos)");
}

std::string_view to_string(Task task) {
  switch (task) {
    case Task::kXpos: return "xpos";
    case Task::kFeats: return "feats";
    case Task::kUpos: return "upos";
  }
  return "?";
}

std::size_t task_column(Task task) {
  switch (task) {
    case Task::kXpos: return 4;
    case Task::kFeats: return 5;
    case Task::kUpos: return 3;
  }
  return 4;
}

std::string Token::tag(Task task) const {
  if (task == Task::kFeats) return morph_bundle_tag(feats());
  return columns[task_column(task)];
}

void Token::set_tag(Task task, std::string value) { columns[task_column(task)] = std::move(value); }

std::vector<std::string> Sentence::forms() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.form());
  return out;
}

std::vector<Sentence> parse_conllu(std::string_view text) {
  std::vector<Sentence> sentences;
  Sentence current;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(start, end - start);
    start = end + 1;
    ++line_no;

    if (is_blank(raw)) {
      finish_sentence(current, sentences);
      continue;
    }
    if (raw.front() == '#') {
      current.lines.emplace_back(raw);
      continue;
    }
    const std::string_view line = strip_cr(raw);
    const auto fields = split(line, '\t');
    if (fields.size() != kConlluColumns) {
      throw ParseError("expected 10 tab-separated columns, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const std::string_view id = fields[0];
    current.lines.emplace_back(raw);
    if (id.find('-') != std::string_view::npos || id.find('.') != std::string_view::npos) {
      continue;  // multiword range or empty node
    }
    if (fields[1].empty()) throw ParseError("empty FORM column", line_no);
    Token token;
    for (std::size_t c = 0; c < kConlluColumns; ++c) token.columns[c] = std::string(fields[c]);
    if (raw.size() != line.size()) token.columns[9] += '\r';
    token.line_index = current.lines.size() - 1;
    current.tokens.push_back(std::move(token));
  }
  finish_sentence(current, sentences);
  return sentences;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<Sentence> read_conllu(const std::filesystem::path& path) {
  try {
    return parse_conllu(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string serialize_conllu(const std::vector<Sentence>& sentences) {
  std::string out;
  for (const Sentence& s : sentences) {
    std::vector<const Token*> by_line(s.lines.size(), nullptr);
    for (const Token& t : s.tokens) {
      if (t.line_index < by_line.size()) by_line[t.line_index] = &t;
    }
    for (std::size_t i = 0; i < s.lines.size(); ++i) {
      out += by_line[i] ? join_tokens_line(*by_line[i]) : s.lines[i];
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

void write_conllu(const std::filesystem::path& path, const std::vector<Sentence>& sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << serialize_conllu(sentences);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<std::string> utf8_chars(std::string_view text) {
  std::vector<std::string> chars;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (lead >= 0xF0 && lead < 0xF8) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = lead < 0xF0 ? 3 : 1;
    } else if (lead >= 0xC0) {
      len = 2;
    }
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    chars.emplace_back(text.substr(i, len));
    i += len;
  }
  return chars;
}

CharStream char_stream_build(const std::vector<std::string>& forms) {
  if (forms.empty()) throw std::invalid_argument("char_stream_build: no tokens");
  CharStream stream;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (forms[i].empty()) {
      throw std::invalid_argument("char_stream_build: token " + std::to_string(i) + " is empty");
    }
    if (i) stream.chars.emplace_back(" ");
    const std::size_t first = stream.chars.size();
    for (std::string& ch : utf8_chars(forms[i])) stream.chars.push_back(std::move(ch));
    stream.spans.push_back({first, stream.chars.size() - 1});
  }
  return stream;
}

std::string morph_bundle_tag(std::string_view feats) {
  if (feats == "_") return "_";
  if (feats.empty()) throw ParseError("empty FEATS value");
  struct Pair {
    std::string_view name;
    std::string_view value;
  };
  std::vector<Pair> pairs;
  for (std::string_view part : split(feats, '|')) {
    const std::size_t eq = part.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ParseError("malformed feature '" + std::string(part) + "' in '" + std::string(feats) +
                       "'");
    }
    pairs.push_back({part.substr(0, eq), part.substr(eq + 1)});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return a.name != b.name ? a.name < b.name : a.value < b.value;
  });
  std::string out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i) out += '|';
    out += pairs[i].name;
    out += '=';
    out += pairs[i].value;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::size_t Vocabulary::add(const std::string& item) {
  if (auto it = index_.find(item); it != index_.end()) return it->second;
  if (frozen_) throw std::logic_error("cannot add '" + item + "' to a frozen vocabulary");
  index_.emplace(item, items_.size());
  items_.push_back(item);
  return items_.size() - 1;
}

std::optional<std::size_t> Vocabulary::find(const std::string& item) const {
  if (auto it = index_.find(item); it != index_.end()) return it->second;
  return std::nullopt;
}

std::size_t Vocabs::word_id(const std::string& form) const {
  return words.find(form).value_or(kUnknownId);
}

std::size_t Vocabs::char_id(const std::string& ch) const {
  return chars.find(ch).value_or(kUnknownId);
}

std::size_t Vocabs::tag_id(const std::string& tag) const { return tags.find(tag).value_or(kNoTag); }

void Vocabs::freeze() {
  words.freeze();
  chars.freeze();
  tags.freeze();
}

Vocabs build_vocabs(const std::vector<Sentence>& train, Task task, std::size_t min_count) {
  Vocabs v;
  v.words.add(std::string(kUnknownWord));
  v.chars.add(std::string(kUnknownChar));

  std::unordered_map<std::string, std::size_t> counts;
  std::vector<std::string> order;
  for (const Sentence& s : train) {
    for (const Token& t : s.tokens) {
      if (counts[t.form()]++ == 0) order.push_back(t.form());
      v.tags.add(t.tag(task));
    }
    for (const std::string& ch : s.chars) v.chars.add(ch);
  }
  for (const std::string& w : order) {
    if (counts[w] >= min_count) v.words.add(w);
  }
  v.freeze();
  return v;
}

EncodedSentence encode(const Sentence& sentence, const Vocabs& vocabs, Task task) {
  EncodedSentence e;
  e.char_ids.reserve(sentence.chars.size());
  for (const std::string& ch : sentence.chars) e.char_ids.push_back(vocabs.char_id(ch));
  for (const Token& t : sentence.tokens) {
    e.word_ids.push_back(vocabs.word_id(t.form()));
    e.spans.push_back(t.span);
    e.token_chars.emplace_back(e.char_ids.begin() + static_cast<std::ptrdiff_t>(t.span.first),
                               e.char_ids.begin() + static_cast<std::ptrdiff_t>(t.span.last) + 1);
    const std::string gold = t.tag(task);
    e.gold.push_back(vocabs.tag_id(gold));
  }
  return e;
}

// ---------------------------------------------------------------------------

namespace {

std::string ascii_lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

bool parse_double(std::string_view s, double& out) {
  std::string tmp(s);
  char* end = nullptr;
  out = std::strtod(tmp.c_str(), &end);
  return end == tmp.c_str() + tmp.size() && !tmp.empty();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_count(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

PretrainedEmbeddings parse_pretrained(std::string_view text, const Vocabulary& words,
                                      bool lowercase_fallback) {
  std::unordered_map<std::string, std::vector<double>> vectors;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto fields = split_ws(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2 && is_count(fields[0]) && is_count(fields[1])) {
      dim = std::stoul(std::string(fields[1]));
      continue;
    }
    const std::size_t d = fields.size() - 1;
    if (d == 0) throw ParseError("embedding line has no values", line_no);
    if (dim == 0) dim = d;
    if (d != dim) {
      throw ParseError("inconsistent embedding dimension: expected " + std::to_string(dim) +
                           ", found " + std::to_string(d),
                       line_no);
    }
    std::vector<double> values(d);
    for (std::size_t k = 0; k < d; ++k) {
      if (!parse_double(fields[k + 1], values[k])) {
        throw ParseError("bad number '" + std::string(fields[k + 1]) + "'", line_no);
      }
    }
    vectors.try_emplace(std::string(fields[0]), std::move(values));
  }
  if (dim == 0) throw ParseError("no embedding vectors found");

  PretrainedEmbeddings out;
  out.dim = dim;
  out.matrix = Tensor::zeros({words.size(), dim}, false);
  auto m = out.matrix.mutable_values();
  for (std::size_t id = 1; id < words.size(); ++id) {
    auto it = vectors.find(words.item(id));
    if (it == vectors.end() && lowercase_fallback) it = vectors.find(ascii_lower(words.item(id)));
    if (it == vectors.end()) continue;
    std::copy(it->second.begin(), it->second.end(), m.begin() + id * dim);
    ++out.covered;
  }
  const std::size_t real_words = words.size() > 0 ? words.size() - 1 : 0;
  out.coverage = real_words ? static_cast<double>(out.covered) / real_words : 0.0;
  return out;
}

PretrainedEmbeddings load_pretrained(const std::filesystem::path& path, const Vocabulary& words,
                                     bool lowercase_fallback) {
  try {
    return parse_pretrained(read_file(path), words, lowercase_fallback);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

PretrainedEmbeddings zero_pretrained(const Vocabulary& words, std::size_t dim) {
  PretrainedEmbeddings out;
  out.dim = dim;
  out.matrix = Tensor::zeros({std::max<std::size_t>(words.size(), 1), dim}, false);
  return out;
}

std::pair<std::vector<Sentence>, std::vector<Sentence>> dev_split(
    const std::vector<Sentence>& corpus, double fraction, std::uint64_t seed) {
  if (corpus.size() < 2) throw std::invalid_argument("dev_split: need at least 2 sentences");
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("dev_split: fraction must be in (0, 1)");
  }
  const std::size_t n = corpus.size();
  std::size_t dev_count =
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  dev_count = std::clamp<std::size_t>(dev_count, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  std::vector<bool> in_dev(n, false);
  for (std::size_t i = 0; i < dev_count; ++i) in_dev[order[i]] = true;

  std::pair<std::vector<Sentence>, std::vector<Sentence>> out;
  for (std::size_t i = 0; i < n; ++i) (in_dev[i] ? out.second : out.first).push_back(corpus[i]);
  return out;
}

}  // namespace metatag::data
