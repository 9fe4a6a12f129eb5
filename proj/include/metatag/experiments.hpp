// Training on an in-memory dataset, ablation slices and the size grid.

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "metatag/config.hpp"
#include "metatag/eval.hpp"
#include "metatag/training.hpp"

namespace metatag::experiments {

struct Dataset {
  std::vector<data::Sentence> train;
  std::vector<data::Sentence> dev;
  std::string pretrained_text;  // word2vec text; empty means all-zero vectors
};

/// Builds vocabularies from the training half, aligns the pretrained vectors
/// and trains in the mode named by config.optimization.
TrainResult train_on(const TrainConfig& config, const Dataset& dataset,
                     const EpochCallback& on_epoch = {});

enum class Axis { kGather, kContext, kOptimization, kComponents };
Axis parse_axis(std::string_view name);
std::string_view to_string(Axis axis);

/// Runs every configuration of the axis for each seed. Accuracy reported per
/// axis: gather -> character model, context and optimization -> meta model,
/// components -> one row each for char, word and meta.
std::vector<eval::SeedResult> run_ablation(const TrainConfig& base, Axis axis,
                                           const std::vector<std::uint64_t>& seeds,
                                           const Dataset& dataset);

struct GridCell {
  std::size_t char_size = 0;
  std::size_t word_size = 0;
  double dev_accuracy = 0.0;
  std::string error;  // empty on success
};

struct GridRange {
  std::size_t first = 200;
  std::size_t last = 500;
  std::size_t step = 50;
  std::vector<std::size_t> values() const;
};

/// One training per (char size, word size); a failing cell records its
/// error and the grid continues. Sorted by (char_size, word_size).
std::vector<GridCell> run_grid(const TrainConfig& base, const GridRange& char_range,
                               const GridRange& word_range, const Dataset& dataset);

std::string grid_csv(const std::vector<GridCell>& cells);

}  // namespace metatag::experiments
