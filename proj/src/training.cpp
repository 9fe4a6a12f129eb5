#include "metatag/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace metatag {

AdamConfig AdamConfig::from(const TrainConfig& config) {
  return {config.learning_rate, config.decay, config.beta1, config.beta2, config.adam_epsilon};
}

Adam::Adam(std::vector<NamedParam> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {}

double Adam::effective_rate() const {
  return config_.learning_rate * std::pow(config_.decay, static_cast<double>(steps_));
}

void Adam::step() {
  for (const NamedParam& p : params_) {
    if (!p.tensor->has_grad()) continue;
    for (double g : p.tensor->grad()) {
      if (!std::isfinite(g)) {
        throw std::domain_error("non-finite gradient in parameter '" + p.name + "'");
      }
    }
  }
  if (m_.empty()) {
    for (const NamedParam& p : params_) {
      m_.emplace_back(p.tensor->size(), 0.0);
      v_.emplace_back(p.tensor->size(), 0.0);
    }
  }
  const double rate = effective_rate();
  const double t = static_cast<double>(steps_ + 1);
  const double correct1 = 1.0 - std::pow(config_.beta1, t);
  const double correct2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor& param = *params_[k].tensor;
    auto values = param.mutable_values();
    auto grad = param.grad();
    std::vector<double>& m = m_[k];
    std::vector<double>& v = v_[k];
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = grad.empty() ? 0.0 : grad[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[i] / correct1;
      const double v_hat = v[i] / correct2;
      values[i] -= rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
    param.clear_grad();
  }
  ++steps_;
}

// ---------------------------------------------------------------------------

std::string format_epoch(const EpochRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "epoch=%zu char_loss=%.6f word_loss=%.6f meta_loss=%.6f dev_char=%.6f "
                "dev_word=%.6f dev_meta=%.6f",
                r.epoch, r.char_loss, r.word_loss, r.meta_loss, r.dev.char_accuracy,
                r.dev.word_accuracy, r.dev.meta_accuracy);
  return buf;
}

namespace {

constexpr std::uint64_t kDropoutStream = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kShuffleStream = 0xC2B2AE3D27D4EB4Full;

std::vector<data::EncodedSentence> encode_all(const std::vector<data::Sentence>& corpus,
                                              const data::Vocabs& vocabs, data::Task task) {
  std::vector<data::EncodedSentence> out;
  out.reserve(corpus.size());
  for (const data::Sentence& s : corpus) out.push_back(data::encode(s, vocabs, task));
  return out;
}

TrainConfig with_pretrained_dim(TrainConfig config, const data::PretrainedEmbeddings& pretrained) {
  config.word_embedding_dim = pretrained.dim;
  return config;
}

}  // namespace

Trainer::Trainer(TrainConfig config, data::Vocabs vocabs, data::PretrainedEmbeddings pretrained,
                 const std::vector<data::Sentence>& train, const std::vector<data::Sentence>& dev)
    : config_(with_pretrained_dim(std::move(config), pretrained)),
      vocabs_(std::move(vocabs)),
      train_(encode_all(train, vocabs_, config_.task)),
      dev_(encode_all(dev, vocabs_, config_.task)),
      init_rng_(config_.seed),
      dropout_rng_(config_.seed ^ kDropoutStream),
      shuffle_rng_(config_.seed ^ kShuffleStream),
      model_(TaggerModel::create(config_, vocabs_, std::move(pretrained.matrix), init_rng_)),
      char_opt_(model_.char_parameters(), AdamConfig::from(config_)),
      word_opt_(model_.word_parameters(), AdamConfig::from(config_)),
      meta_opt_(model_.meta_parameters(), AdamConfig::from(config_)),
      joint_opt_(model_.trainable_parameters(), AdamConfig::from(config_)) {
  if (train_.empty()) throw std::invalid_argument("training corpus is empty");
  if (dev_.empty()) throw std::invalid_argument("dev corpus is empty");
  for (const auto& s : train_) {
    if (std::find(s.gold.begin(), s.gold.end(), data::kNoTag) != s.gold.end()) {
      throw std::invalid_argument("training corpus contains a tag outside the tag vocabulary");
    }
  }
  order_.resize(train_.size());
}

std::vector<std::size_t> Trainer::epoch_order() {
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  for (std::size_t i = order_.size(); i-- > 1;) {
    std::swap(order_[i], order_[shuffle_rng_.below(i + 1)]);
  }
  return order_;
}

double Trainer::run_pass(const ForwardOptions& options, Var SentenceForward::*loss,
                         Adam& optimizer) {
  const std::vector<std::size_t> order = order_;
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t start = 0; start < order.size(); start += config_.batch_size) {
    const std::size_t end = std::min(order.size(), start + config_.batch_size);
    const double weight = 1.0 / static_cast<double>(end - start);
    for (std::size_t k = start; k < end; ++k) {
      Graph g;
      SentenceForward f = model_.forward(g, train_[order[k]], options);
      Var l = f.*loss;
      if (!l.valid()) continue;
      total += g.scalar(l);
      ++counted;
      g.backward(g.scale(l, weight));
    }
    optimizer.step();
  }
  return counted ? total / static_cast<double>(counted) : 0.0;
}

EpochRecord Trainer::train_epoch_synchronous() {
  epoch_order();
  EpochRecord record;
  ForwardOptions options;
  options.mode = RunMode{true, &dropout_rng_};

  options.run_char = true;
  options.run_word = false;
  options.run_meta = false;
  record.char_loss = run_pass(options, &SentenceForward::char_loss, char_opt_);

  options.run_char = false;
  options.run_word = true;
  record.word_loss = run_pass(options, &SentenceForward::word_loss, word_opt_);

  options.run_char = true;
  options.run_meta = true;
  options.detach_meta_inputs = true;
  record.meta_loss = run_pass(options, &SentenceForward::meta_loss, meta_opt_);
  return record;
}

EpochRecord Trainer::train_epoch_joint() {
  epoch_order();
  EpochRecord record;
  ForwardOptions options;
  options.detach_meta_inputs = false;
  options.mode = RunMode{true, &dropout_rng_};
  std::size_t counted = 0;
  for (std::size_t start = 0; start < order_.size(); start += config_.batch_size) {
    const std::size_t end = std::min(order_.size(), start + config_.batch_size);
    const double weight = 1.0 / static_cast<double>(end - start);
    for (std::size_t k = start; k < end; ++k) {
      Graph g;
      SentenceForward f = model_.forward(g, train_[order_[k]], options);
      record.char_loss += g.scalar(f.char_loss);
      record.word_loss += g.scalar(f.word_loss);
      record.meta_loss += g.scalar(f.meta_loss);
      ++counted;
      Var total = g.add(g.add(f.char_loss, f.word_loss), f.meta_loss);
      g.backward(g.scale(total, weight));
    }
    joint_opt_.step();
  }
  if (counted) {
    record.char_loss /= static_cast<double>(counted);
    record.word_loss /= static_cast<double>(counted);
    record.meta_loss /= static_cast<double>(counted);
  }
  return record;
}

DevScores Trainer::evaluate(const std::vector<data::EncodedSentence>& corpus) {
  std::size_t tokens = 0;
  std::size_t char_ok = 0;
  std::size_t word_ok = 0;
  std::size_t meta_ok = 0;
  for (const data::EncodedSentence& s : corpus) {
    Graph g;
    SentenceForward f = model_.forward(g, s, ForwardOptions{});
    const auto c = predict(g, f.char_logits);
    const auto w = predict(g, f.word_logits);
    const auto m = predict(g, f.meta_logits);
    for (std::size_t i = 0; i < s.size(); ++i) {
      ++tokens;
      char_ok += c[i] == s.gold[i];
      word_ok += w[i] == s.gold[i];
      meta_ok += m[i] == s.gold[i];
    }
  }
  DevScores scores;
  scores.tokens = tokens;
  if (tokens) {
    const double n = static_cast<double>(tokens);
    scores.char_accuracy = static_cast<double>(char_ok) / n;
    scores.word_accuracy = static_cast<double>(word_ok) / n;
    scores.meta_accuracy = static_cast<double>(meta_ok) / n;
  }
  return scores;
}

TrainResult Trainer::run(const EpochCallback& on_epoch) {
  TrainResult result;
  EpochRecord initial;
  initial.dev = evaluate_dev();
  result.history.push_back(initial);
  if (on_epoch) on_epoch(initial);

  result.checkpoint.config = config_;
  result.checkpoint.vocabs = vocabs_;
  result.checkpoint.model = model_;
  result.checkpoint.best_dev_score = initial.dev.meta_accuracy;
  result.checkpoint.best_epoch = 0;
  result.best_char_accuracy = initial.dev.char_accuracy;
  result.best_word_accuracy = initial.dev.word_accuracy;
  result.best_meta_accuracy = initial.dev.meta_accuracy;

  std::size_t since_improvement = 0;
  for (std::size_t epoch = 1; epoch <= config_.max_epochs; ++epoch) {
    EpochRecord record = config_.optimization == Optimization::kSeparate
                             ? train_epoch_synchronous()
                             : train_epoch_joint();
    record.epoch = epoch;
    try {
      record.dev = evaluate_dev();
    } catch (const std::exception& e) {
      throw std::runtime_error("dev evaluation failed after epoch " + std::to_string(epoch) +
                               ": " + e.what());
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);

    result.best_char_accuracy = std::max(result.best_char_accuracy, record.dev.char_accuracy);
    result.best_word_accuracy = std::max(result.best_word_accuracy, record.dev.word_accuracy);
    result.best_meta_accuracy = std::max(result.best_meta_accuracy, record.dev.meta_accuracy);
    if (record.dev.meta_accuracy > result.checkpoint.best_dev_score) {
      result.checkpoint.model = model_;
      result.checkpoint.best_dev_score = record.dev.meta_accuracy;
      result.checkpoint.best_epoch = epoch;
      since_improvement = 0;
    } else if (config_.patience > 0 && ++since_improvement >= config_.patience) {
      break;
    }
  }
  return result;
}

TrainResult train(TrainConfig config, const data::Vocabs& vocabs,
                  const data::PretrainedEmbeddings& pretrained,
                  const std::vector<data::Sentence>& train_corpus,
                  const std::vector<data::Sentence>& dev_corpus, const EpochCallback& on_epoch) {
  config.optimization = Optimization::kSeparate;
  Trainer trainer(std::move(config), vocabs, pretrained, train_corpus, dev_corpus);
  return trainer.run(on_epoch);
}

TrainResult train_joint(TrainConfig config, const data::Vocabs& vocabs,
                        const data::PretrainedEmbeddings& pretrained,
                        const std::vector<data::Sentence>& train_corpus,
                        const std::vector<data::Sentence>& dev_corpus,
                        const EpochCallback& on_epoch) {
  config.optimization = Optimization::kJoint;
  Trainer trainer(std::move(config), vocabs, pretrained, train_corpus, dev_corpus);
  return trainer.run(on_epoch);
}

void tag_sentences(Checkpoint& checkpoint, std::vector<data::Sentence>& sentences) {
  const data::Task task = checkpoint.config.task;
  for (data::Sentence& s : sentences) {
    if (s.tokens.empty()) continue;
    const data::EncodedSentence encoded = data::encode(s, checkpoint.vocabs, task);
    const std::vector<std::size_t> tags = checkpoint.model.tag(encoded);
    for (std::size_t i = 0; i < tags.size(); ++i) {
      s.tokens[i].set_tag(task, checkpoint.vocabs.tags.item(tags[i]));
    }
  }
}

// ---------------------------------------------------------------------------
// Checkpoint container (little-endian):
//   "METATAG\0" | u32 version | u64 payload size | payload | u64 FNV-1a(payload)
// payload:
//   str config | 3 x (u64 count, str...) vocabs | f64 best score | u64 best epoch |
//   u64 tensor count | per tensor: str name, u64 rank, u64 dims..., f64 values...

namespace {

constexpr char kMagic[8] = {'M', 'E', 'T', 'A', 'T', 'A', 'G', '\0'};

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

class Writer {
 public:
  template <typename T>
  void pod(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void str(std::string_view s) {
    pod<std::uint64_t>(s.size());
    out_.append(s);
  }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}
  template <typename T>
  T pod() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string str() {
    const auto n = pod<std::uint64_t>();
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::uint64_t n) const {
    if (n > bytes_.size() - pos_) throw CheckpointError("corrupt checkpoint: unexpected end of data");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void write_vocab(Writer& w, const data::Vocabulary& v) {
  w.pod<std::uint64_t>(v.size());
  for (const std::string& item : v.items()) w.str(item);
}

data::Vocabulary read_vocab(Reader& r) {
  data::Vocabulary v;
  const auto n = r.pod<std::uint64_t>();
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::string item = r.str();
    if (v.add(item) != i) throw CheckpointError("corrupt checkpoint: duplicate vocabulary entry");
  }
  v.freeze();
  return v;
}

}  // namespace

std::string checkpoint_serialize(Checkpoint& checkpoint) {
  Writer payload;
  payload.str(format_config(checkpoint.config));
  write_vocab(payload, checkpoint.vocabs.words);
  write_vocab(payload, checkpoint.vocabs.chars);
  write_vocab(payload, checkpoint.vocabs.tags);
  payload.pod<double>(checkpoint.best_dev_score);
  payload.pod<std::uint64_t>(checkpoint.best_epoch);
  const std::vector<NamedParam> tensors = checkpoint.model.all_tensors();
  payload.pod<std::uint64_t>(tensors.size());
  for (const NamedParam& p : tensors) {
    payload.str(p.name);
    payload.pod<std::uint64_t>(p.tensor->shape().size());
    for (std::size_t d : p.tensor->shape()) payload.pod<std::uint64_t>(d);
    for (double v : p.tensor->values()) payload.pod<double>(v);
  }

  Writer out;
  out.bytes().append(kMagic, sizeof kMagic);
  out.pod<std::uint32_t>(checkpoint.version);
  out.pod<std::uint64_t>(payload.bytes().size());
  out.bytes() += payload.bytes();
  out.pod<std::uint64_t>(fnv1a(payload.bytes()));
  return std::move(out.bytes());
}

Checkpoint checkpoint_deserialize(const std::string& bytes) {
  if (bytes.size() < sizeof kMagic + 4 + 8 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw CheckpointError("not a metatag checkpoint (bad magic or truncated header)");
  }
  Reader header(std::string_view(bytes).substr(sizeof kMagic));
  const auto version = header.pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("incompatible checkpoint version " + std::to_string(version) +
                          " (this build reads version " + std::to_string(kCheckpointVersion) + ")");
  }
  const auto payload_size = header.pod<std::uint64_t>();
  const std::size_t payload_start = sizeof kMagic + 4 + 8;
  if (bytes.size() < payload_start || bytes.size() - payload_start != payload_size + 8) {
    throw CheckpointError("corrupt checkpoint: size mismatch (truncated file?)");
  }
  const std::string_view payload = std::string_view(bytes).substr(payload_start, payload_size);
  std::uint64_t stored = 0;
  std::memcpy(&stored, bytes.data() + payload_start + payload_size, 8);
  if (stored != fnv1a(payload)) throw CheckpointError("corrupt checkpoint: checksum mismatch");

  Reader r(payload);
  Checkpoint cp;
  cp.version = version;
  try {
    apply_config(cp.config, parse_key_values(r.str()));
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("corrupt checkpoint config: ") + e.what());
  }
  cp.vocabs.words = read_vocab(r);
  cp.vocabs.chars = read_vocab(r);
  cp.vocabs.tags = read_vocab(r);
  cp.best_dev_score = r.pod<double>();
  cp.best_epoch = r.pod<std::uint64_t>();

  Rng rng(0);
  Tensor pretrained = Tensor::zeros({cp.vocabs.words.size(), cp.config.word_embedding_dim});
  cp.model = TaggerModel::create(cp.config, cp.vocabs, std::move(pretrained), rng);
  std::vector<NamedParam> expected = cp.model.all_tensors();
  const auto count = r.pod<std::uint64_t>();
  if (count != expected.size()) {
    throw CheckpointError("checkpoint has " + std::to_string(count) + " tensors, model expects " +
                          std::to_string(expected.size()));
  }
  for (NamedParam& p : expected) {
    const std::string name = r.str();
    if (name != p.name) throw CheckpointError("checkpoint tensor '" + name + "' where '" + p.name + "' expected");
    Shape shape(r.pod<std::uint64_t>());
    for (auto& d : shape) d = r.pod<std::uint64_t>();
    if (shape != p.tensor->shape()) {
      throw CheckpointError("shape mismatch for '" + name + "': file " + shape_to_string(shape) +
                            ", model " + shape_to_string(p.tensor->shape()));
    }
    for (double& v : p.tensor->mutable_values()) v = r.pod<double>();
  }
  if (!r.done()) throw CheckpointError("corrupt checkpoint: trailing data");
  return cp;
}

void checkpoint_save(const std::filesystem::path& path, Checkpoint& checkpoint) {
  const std::string bytes = checkpoint_serialize(checkpoint);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint checkpoint_load(const std::filesystem::path& path) {
  std::string bytes;
  try {
    bytes = data::read_file(path);
  } catch (const std::exception& e) {
    throw CheckpointError(e.what());
  }
  return checkpoint_deserialize(bytes);
}

}  // namespace metatag
