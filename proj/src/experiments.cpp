#include "metatag/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace metatag::experiments {

TrainResult train_on(const TrainConfig& config, const Dataset& dataset,
                     const EpochCallback& on_epoch) {
  config.validate();
  data::Vocabs vocabs = data::build_vocabs(dataset.train, config.task);
  data::PretrainedEmbeddings pretrained =
      dataset.pretrained_text.empty()
          ? data::zero_pretrained(vocabs.words, config.word_embedding_dim)
          : data::parse_pretrained(dataset.pretrained_text, vocabs.words,
                                   config.lowercase_pretrained_fallback);
  if (config.optimization == Optimization::kJoint) {
    return train_joint(config, vocabs, pretrained, dataset.train, dataset.dev, on_epoch);
  }
  return train(config, vocabs, pretrained, dataset.train, dataset.dev, on_epoch);
}

Axis parse_axis(std::string_view name) {
  if (name == "gather") return Axis::kGather;
  if (name == "context") return Axis::kContext;
  if (name == "optimization") return Axis::kOptimization;
  if (name == "components") return Axis::kComponents;
  throw std::invalid_argument("unknown ablation axis '" + std::string(name) +
                              "' (expected gather, context, optimization or components)");
}

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::kGather: return "gather";
    case Axis::kContext: return "context";
    case Axis::kOptimization: return "optimization";
    case Axis::kComponents: return "components";
  }
  return "";
}

std::vector<eval::SeedResult> run_ablation(const TrainConfig& base, Axis axis,
                                           const std::vector<std::uint64_t>& seeds,
                                           const Dataset& dataset) {
  if (seeds.empty()) throw std::invalid_argument("ablation needs at least one seed");
  const std::string task(data::to_string(base.task));
  std::vector<eval::SeedResult> out;
  auto add = [&](const std::string& name, std::uint64_t seed, double accuracy) {
    out.push_back({name, seed, task, accuracy});
  };

  if (axis == Axis::kComponents) {
    for (std::uint64_t seed : seeds) {
      TrainConfig c = base;
      c.seed = seed;
      const TrainResult r = train_on(c, dataset);
      add("char", seed, r.best_char_accuracy);
      add("word", seed, r.best_word_accuracy);
      add("meta", seed, r.best_meta_accuracy);
    }
    return out;
  }

  std::vector<std::pair<std::string, TrainConfig>> variants;
  if (axis == Axis::kGather) {
    for (const GatherStrategy& g : ablation_gather_strategies()) {
      TrainConfig c = base;
      c.gather = g;
      c.char_model = CharModel::kSentence;
      variants.emplace_back(g.to_string(), c);
    }
  } else if (axis == Axis::kContext) {
    for (CharModel m : {CharModel::kSentence, CharModel::kToken}) {
      TrainConfig c = base;
      c.char_model = m;
      variants.emplace_back(to_string(m), c);
    }
  } else {
    for (Optimization m : {Optimization::kSeparate, Optimization::kJoint}) {
      TrainConfig c = base;
      c.optimization = m;
      variants.emplace_back(to_string(m), c);
    }
  }
  for (std::uint64_t seed : seeds) {
    for (auto& [name, config] : variants) {
      config.seed = seed;
      const TrainResult r = train_on(config, dataset);
      add(name, seed, axis == Axis::kGather ? r.best_char_accuracy : r.best_meta_accuracy);
    }
  }
  return out;
}

std::vector<std::size_t> GridRange::values() const {
  if (step == 0) throw std::invalid_argument("grid step must be positive");
  if (first == 0 || last < first) throw std::invalid_argument("grid range is empty");
  std::vector<std::size_t> v;
  for (std::size_t x = first; x <= last; x += step) v.push_back(x);
  return v;
}

std::vector<GridCell> run_grid(const TrainConfig& base, const GridRange& char_range,
                               const GridRange& word_range, const Dataset& dataset) {
  std::vector<GridCell> cells;
  for (std::size_t c : char_range.values()) {
    for (std::size_t w : word_range.values()) {
      GridCell cell{c, w, std::nan(""), {}};
      try {
        TrainConfig config = base;
        config.char_lstm_size = c;
        config.word_lstm_size = w;
        cell.dev_accuracy = train_on(config, dataset).checkpoint.best_dev_score;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::string grid_csv(const std::vector<GridCell>& cells) {
  std::string out = "char_size,word_size,dev_accuracy\n";
  char buf[96];
  for (const GridCell& cell : cells) {
    if (cell.error.empty()) {
      std::snprintf(buf, sizeof buf, "%zu,%zu,%.6f\n", cell.char_size, cell.word_size, cell.dev_accuracy);
    } else {
      std::snprintf(buf, sizeof buf, "%zu,%zu,nan\n", cell.char_size, cell.word_size);
    }
    out += buf;
  }
  return out;
}

}  // namespace metatag::experiments
