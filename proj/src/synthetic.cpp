#include "metatag/synthetic.hpp"

#include <cstdio>
#include <set>
#include <stdexcept>

namespace metatag::synthetic {

Plan parse_plan(std::string_view name) {
  if (name == "neighbor_suffix") return Plan::kNeighborSuffix;
  if (name == "complementary") return Plan::kComplementary;
  throw std::invalid_argument("unknown synthetic plan '" + std::string(name) +
                              "' (expected neighbor_suffix or complementary)");
}

std::string_view to_string(Plan plan) {
  return plan == Plan::kNeighborSuffix ? "neighbor_suffix" : "complementary";
}

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
const char* const kSuffixes[] = {"ar", "en", "ix", "ov", "ul", "ey", "oth", "im"};
constexpr std::size_t kMaxClasses = sizeof kSuffixes / sizeof kSuffixes[0];

std::string stem(Rng& rng) {
  std::string s;
  const std::size_t syllables = 2 + rng.below(2);
  for (std::size_t i = 0; i < syllables; ++i) {
    s += kConsonants[rng.below(kConsonants.size())];
    s += kVowels[rng.below(kVowels.size())];
  }
  return s;
}

std::string class_tag(std::size_t c) { return "C" + std::to_string(c); }

struct Word {
  std::string form;
  std::string tag;
};

void append_sentence(std::string& out, const std::string& id, const std::vector<Word>& words) {
  out += "# sent_id = " + id + "\n";
  for (std::size_t i = 0; i < words.size(); ++i) {
    out += std::to_string(i + 1) + "\t" + words[i].form + "\t_\t" + words[i].tag + "\t" +
           words[i].tag + "\t_\t_\t_\t_\t_\n";
  }
  out += "\n";
}

std::vector<Word> neighbor_sentence(Rng& rng, std::size_t length, std::size_t classes) {
  std::vector<Word> words(length);
  std::size_t previous = 0;
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t c = rng.below(classes);
    words[i].form = stem(rng) + kSuffixes[c];
    words[i].tag = i == 0 ? "BOS" : class_tag(previous);
    previous = c;
  }
  return words;
}

struct Lexicon {
  std::vector<Word> words;
  std::vector<std::size_t> classes;
};

Lexicon irregular_lexicon(Rng& rng, const Options& o) {
  Lexicon lex;
  std::set<std::string> seen;
  while (lex.words.size() < o.irregular_words) {
    const std::size_t c = rng.below(o.classes);
    const std::size_t misleading = (c + 1 + rng.below(o.classes - 1)) % o.classes;
    std::string form = stem(rng) + kSuffixes[misleading];
    if (!seen.insert(form).second) continue;
    lex.words.push_back({form, class_tag(c)});
    lex.classes.push_back(c);
  }
  return lex;
}

std::vector<Word> complementary_sentence(Rng& rng, std::size_t length, const Options& o,
                                         const Lexicon& lex, double irregular_rate) {
  std::vector<Word> words(length);
  for (Word& w : words) {
    if (rng.bernoulli(irregular_rate)) {
      w = lex.words[rng.below(lex.words.size())];
    } else {
      const std::size_t c = rng.below(o.classes);
      w = {stem(rng) + kSuffixes[c], class_tag(c)};
    }
  }
  return words;
}

}  // namespace

Corpus generate(const Options& o) {
  if (o.classes < 2 || o.classes > kMaxClasses) {
    throw std::invalid_argument("classes must be in [2, " + std::to_string(kMaxClasses) + "]");
  }
  if (o.min_length == 0 || o.max_length < o.min_length) {
    throw std::invalid_argument("sentence length range is empty");
  }
  if (o.train_sentences == 0 || o.dev_sentences == 0) {
    throw std::invalid_argument("train and dev sentence counts must be positive");
  }
  Rng rng(o.seed);
  auto length = [&] { return o.min_length + rng.below(o.max_length - o.min_length + 1); };

  std::vector<std::vector<Word>> train;
  std::vector<std::vector<Word>> dev;
  Corpus corpus;
  if (o.plan == Plan::kNeighborSuffix) {
    for (std::size_t s = 0; s < o.train_sentences; ++s) train.push_back(neighbor_sentence(rng, length(), o.classes));
    for (std::size_t s = 0; s < o.dev_sentences; ++s) dev.push_back(neighbor_sentence(rng, length(), o.classes));
  } else {
    if (o.irregular_words == 0) throw std::invalid_argument("complementary plan needs irregular words");
    if (o.pretrained_dim < o.classes) throw std::invalid_argument("pretrained_dim must be >= classes");
    const Lexicon lex = irregular_lexicon(rng, o);
    // Each irregular word is seen in training only about twice.
    for (std::size_t s = 0; s < o.train_sentences; ++s) {
      train.push_back(complementary_sentence(rng, length(), o, lex, 0.0));
    }
    for (std::size_t k = 0; k < 2 * lex.words.size(); ++k) {
      auto& sentence = train[rng.below(train.size())];
      sentence[rng.below(sentence.size())] = lex.words[k % lex.words.size()];
    }
    for (std::size_t s = 0; s < o.dev_sentences; ++s) {
      dev.push_back(complementary_sentence(rng, length(), o, lex, o.irregular_rate));
    }
    corpus.pretrained = std::to_string(lex.words.size()) + " " + std::to_string(o.pretrained_dim) + "\n";
    for (std::size_t w = 0; w < lex.words.size(); ++w) {
      std::string line = lex.words[w].form;
      for (std::size_t d = 0; d < o.pretrained_dim; ++d) {
        const double v = (d == lex.classes[w] ? 1.0 : 0.0) + rng.gaussian(0.0, 0.1);
        char buf[32];
        std::snprintf(buf, sizeof buf, " %.6f", v);
        line += buf;
      }
      corpus.pretrained += line + "\n";
    }
  }

  std::string train_text;
  std::string dev_text;
  for (std::size_t s = 0; s < train.size(); ++s) append_sentence(train_text, "train-" + std::to_string(s + 1), train[s]);
  for (std::size_t s = 0; s < dev.size(); ++s) append_sentence(dev_text, "dev-" + std::to_string(s + 1), dev[s]);
  corpus.train = data::parse_conllu(train_text);
  corpus.dev = data::parse_conllu(dev_text);
  return corpus;
}

}  // namespace metatag::synthetic
