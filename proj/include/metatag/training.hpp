// Adam with per-step exponential decay, the synchronous three-model schedule,
// the joint-loss ablation schedule, and checkpoints.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "metatag/config.hpp"
#include "metatag/data.hpp"
#include "metatag/model.hpp"

namespace metatag {

struct AdamConfig {
  double learning_rate = 0.002;
  double decay = 0.999994;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamConfig from(const TrainConfig& config);
};

/// Adam over a fixed parameter list. Each step consumes and clears the
/// accumulated gradients; parameters without a gradient count as zero.
class Adam {
 public:
  Adam(std::vector<NamedParam> params, AdamConfig config);

  /// Applies one bias-corrected update at rate lr * decay^steps(). Throws
  /// std::domain_error naming the first parameter with a non-finite gradient;
  /// nothing is updated in that case.
  void step();

  std::size_t steps() const { return steps_; }
  /// Rate used by the next step.
  double effective_rate() const;
  const AdamConfig& config() const { return config_; }
  std::span<const double> first_moment(std::size_t i) const { return m_[i]; }
  std::span<const double> second_moment(std::size_t i) const { return v_[i]; }
  const std::vector<NamedParam>& params() const { return params_; }

 private:
  std::vector<NamedParam> params_;
  AdamConfig config_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t steps_ = 0;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  TrainConfig config;
  data::Vocabs vocabs;
  TaggerModel model;
  double best_dev_score = 0.0;
  std::size_t best_epoch = 0;
};

/// Writes atomically (temporary file, then rename).
void checkpoint_save(const std::filesystem::path& path, Checkpoint& checkpoint);
/// Validates magic, version, checksum and the tensor manifest.
Checkpoint checkpoint_load(const std::filesystem::path& path);
std::string checkpoint_serialize(Checkpoint& checkpoint);
Checkpoint checkpoint_deserialize(const std::string& bytes);

struct DevScores {
  double char_accuracy = 0.0;
  double word_accuracy = 0.0;
  double meta_accuracy = 0.0;
  std::size_t tokens = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double char_loss = 0.0;
  double word_loss = 0.0;
  double meta_loss = 0.0;
  DevScores dev;
};

/// One line per epoch: "epoch=E char_loss=... word_loss=... meta_loss=...
/// dev_char=... dev_word=... dev_meta=...".
std::string format_epoch(const EpochRecord& record);

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochRecord> history;  // entry 0 is the initial model
  // Best dev accuracy of each model part over all epochs.
  double best_char_accuracy = 0.0;
  double best_word_accuracy = 0.0;
  double best_meta_accuracy = 0.0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

class Trainer {
 public:
  /// `pretrained` is aligned with `vocabs.words`; pass data::zero_pretrained
  /// when no file is used. The config's word_embedding_dim is taken from it.
  Trainer(TrainConfig config, data::Vocabs vocabs, data::PretrainedEmbeddings pretrained,
          const std::vector<data::Sentence>& train, const std::vector<data::Sentence>& dev);

  TaggerModel& model() { return model_; }
  const TrainConfig& config() const { return config_; }
  Adam& char_optimizer() { return char_opt_; }
  Adam& word_optimizer() { return word_opt_; }
  Adam& meta_optimizer() { return meta_opt_; }
  Adam& joint_optimizer() { return joint_opt_; }

  /// Character, word, then meta pass over the whole training set, each with
  /// its own loss and optimizer. Returns mean losses per pass.
  EpochRecord train_epoch_synchronous();
  /// One pass minimizing the summed loss with full backpropagation.
  EpochRecord train_epoch_joint();

  DevScores evaluate(const std::vector<data::EncodedSentence>& corpus);
  DevScores evaluate_dev() { return evaluate(dev_); }
  DevScores evaluate_train() { return evaluate(train_); }

  /// Runs up to max_epochs and keeps the parameters with the best meta dev
  /// accuracy (strict improvement replaces).
  TrainResult run(const EpochCallback& on_epoch = {});

 private:
  std::vector<std::size_t> epoch_order();
  double run_pass(const ForwardOptions& options, Var SentenceForward::*loss, Adam& optimizer);

  TrainConfig config_;
  data::Vocabs vocabs_;
  std::vector<data::EncodedSentence> train_;
  std::vector<data::EncodedSentence> dev_;
  Rng init_rng_;
  Rng dropout_rng_;
  Rng shuffle_rng_;
  TaggerModel model_;
  Adam char_opt_;
  Adam word_opt_;
  Adam meta_opt_;
  Adam joint_opt_;
  std::vector<std::size_t> order_;
};

/// Separate-optimization training (config.optimization is forced).
TrainResult train(TrainConfig config, const data::Vocabs& vocabs,
                  const data::PretrainedEmbeddings& pretrained,
                  const std::vector<data::Sentence>& train_corpus,
                  const std::vector<data::Sentence>& dev_corpus,
                  const EpochCallback& on_epoch = {});

/// Joint single-loss training for the optimization ablation.
TrainResult train_joint(TrainConfig config, const data::Vocabs& vocabs,
                        const data::PretrainedEmbeddings& pretrained,
                        const std::vector<data::Sentence>& train_corpus,
                        const std::vector<data::Sentence>& dev_corpus,
                        const EpochCallback& on_epoch = {});

/// Writes meta-model predictions into the task column of every token.
void tag_sentences(Checkpoint& checkpoint, std::vector<data::Sentence>& sentences);

}  // namespace metatag
