// Training configuration and its "section.key = value" text form.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "metatag/data.hpp"
#include "metatag/encoders.hpp"
#include "metatag/nn.hpp"

namespace metatag {

enum class Optimization { kSeparate, kJoint };
Optimization parse_optimization(const std::string& text);
std::string to_string(Optimization mode);

/// Every hyperparameter of the tagger. Defaults are the reference settings;
/// fields without a reference value are marked.
struct TrainConfig {
  // Architecture.
  std::size_t char_layers = 3;
  std::size_t word_layers = 3;
  std::size_t meta_layers = 1;
  std::size_t char_lstm_size = 400;
  std::size_t word_lstm_size = 400;
  std::size_t meta_lstm_size = 400;
  std::size_t char_mlp_size = 400;       // no reference value
  std::size_t word_mlp_size = 400;       // no reference value
  std::size_t meta_mlp_size = 400;       // no reference value
  std::size_t char_embedding_dim = 100;  // no reference value
  std::size_t word_embedding_dim = 100;  // replaced by the pretrained file's dimension
  std::string mlp_activation = "elu";
  GatherStrategy gather = GatherStrategy::all();
  CharModel char_model = CharModel::kSentence;

  // Dropout.
  double dropout_lstm = 0.33;
  double dropout_mlp = 0.33;
  double dropout_word_embeddings = 0.33;
  double dropout_char_embeddings = 0.05;

  // Initialization.
  std::string init_word_embeddings = "zero";
  nn::WeightInit init_char_embeddings = nn::WeightInit::kGaussian;
  nn::WeightInit init_mlp = nn::WeightInit::kGaussian;
  nn::WeightInit init_lstm = nn::WeightInit::kScaledGaussian;        // no reference value
  nn::WeightInit init_classifier = nn::WeightInit::kScaledGaussian;  // no reference value

  // Optimizer (one instance per model, identical settings).
  std::string optimizer = "adam";
  std::string loss = "cross_entropy";
  double learning_rate = 0.002;
  double decay = 0.999994;
  double adam_epsilon = 1e-8;
  double beta1 = 0.9;
  double beta2 = 0.999;

  // Schedule.
  std::size_t max_epochs = 200;
  std::size_t batch_size = 32;
  std::size_t patience = 0;  // 0 = run all epochs
  std::uint64_t seed = 1;
  Optimization optimization = Optimization::kSeparate;
  data::Task task = data::Task::kXpos;
  double dev_fraction = 0.05;
  bool lowercase_pretrained_fallback = true;

  InitSchemes init_schemes() const;
  /// Throws std::invalid_argument on inconsistent values.
  void validate() const;
};

/// Ordered list of every config key.
const std::vector<std::string>& config_keys();

/// Sets `key` from its text form; throws std::invalid_argument on unknown keys
/// or bad values.
void set_config_value(TrainConfig& config, const std::string& key, const std::string& value);
std::string get_config_value(const TrainConfig& config, const std::string& key);

/// One "key = value" line per key, in config_keys() order.
std::string format_config(const TrainConfig& config);

/// Parses "[section]" headers and "key = value" lines into dotted keys.
/// '#' and ';' start comments. Throws data::ParseError with a line number.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Applies every entry of `values` that names a TrainConfig key and returns
/// the ones that do not.
std::map<std::string, std::string> apply_config(TrainConfig& config,
                                                const std::map<std::string, std::string>& values);

}  // namespace metatag
