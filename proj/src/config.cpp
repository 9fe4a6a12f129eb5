#include "metatag/config.hpp"

#include <charconv>
#include <functional>
#include <stdexcept>

namespace metatag {

Optimization parse_optimization(const std::string& text) {
  if (text == "separate") return Optimization::kSeparate;
  if (text == "joint") return Optimization::kJoint;
  throw std::invalid_argument("unknown optimization '" + text + "' (expected separate or joint)");
}

std::string to_string(Optimization mode) {
  return mode == Optimization::kSeparate ? "separate" : "joint";
}

InitSchemes TrainConfig::init_schemes() const {
  InitSchemes s;
  s.char_embeddings = init_char_embeddings;
  s.mlp = init_mlp;
  s.lstm = init_lstm;
  s.classifier = init_classifier;
  return s;
}

void TrainConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(char_layers, "model.char_layers");
  positive(word_layers, "model.word_layers");
  positive(meta_layers, "model.meta_layers");
  positive(char_lstm_size, "model.char_lstm_size");
  positive(word_lstm_size, "model.word_lstm_size");
  positive(meta_lstm_size, "model.meta_lstm_size");
  positive(char_mlp_size, "model.char_mlp_size");
  positive(word_mlp_size, "model.word_mlp_size");
  positive(meta_mlp_size, "model.meta_mlp_size");
  positive(char_embedding_dim, "model.char_embedding_dim");
  positive(word_embedding_dim, "model.word_embedding_dim");
  positive(batch_size, "train.batch_size");
  for (double rate : {dropout_lstm, dropout_mlp, dropout_word_embeddings, dropout_char_embeddings}) {
    if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout rates must be in [0, 1)");
  }
  if (mlp_activation != "elu") throw std::invalid_argument("model.mlp_activation: only elu is supported");
  if (init_word_embeddings != "zero") throw std::invalid_argument("init.word_embeddings: only zero is supported");
  if (optimizer != "adam") throw std::invalid_argument("optimizer.name: only adam is supported");
  if (loss != "cross_entropy") throw std::invalid_argument("optimizer.loss: only cross_entropy is supported");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("optimizer.learning_rate must be >= 0");
  if (!(decay > 0.0 && decay <= 1.0)) throw std::invalid_argument("optimizer.decay must be in (0, 1]");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("adam betas must be in [0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw std::invalid_argument("optimizer.epsilon must be positive");
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw std::invalid_argument("train.dev_fraction must be in (0, 1)");
  }
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& key, const std::string& s) {
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw std::invalid_argument(key + ": expected a number, got '" + s + "'");
  }
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& s) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw std::invalid_argument(key + ": expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument(key + ": expected true or false, got '" + s + "'");
}

struct Field {
  std::string key;
  std::function<std::string(const TrainConfig&)> get;
  std::function<void(TrainConfig&, const std::string&)> set;
};

Field size_field(std::string key, std::size_t TrainConfig::*member) {
  return {key, [member](const TrainConfig& c) { return std::to_string(c.*member); },
          [member, key](TrainConfig& c, const std::string& v) {
            c.*member = static_cast<std::size_t>(parse_uint(key, v));
          }};
}

Field double_field(std::string key, double TrainConfig::*member) {
  return {key, [member](const TrainConfig& c) { return format_double(c.*member); },
          [member, key](TrainConfig& c, const std::string& v) { c.*member = parse_double(key, v); }};
}

Field string_field(std::string key, std::string TrainConfig::*member) {
  return {key, [member](const TrainConfig& c) { return c.*member; },
          [member](TrainConfig& c, const std::string& v) { c.*member = v; }};
}

Field init_field(std::string key, nn::WeightInit TrainConfig::*member) {
  return {key, [member](const TrainConfig& c) { return nn::to_string(c.*member); },
          [member](TrainConfig& c, const std::string& v) { c.*member = nn::parse_weight_init(v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> f;
    f.push_back(size_field("model.char_layers", &TrainConfig::char_layers));
    f.push_back(size_field("model.word_layers", &TrainConfig::word_layers));
    f.push_back(size_field("model.meta_layers", &TrainConfig::meta_layers));
    f.push_back(size_field("model.char_lstm_size", &TrainConfig::char_lstm_size));
    f.push_back(size_field("model.word_lstm_size", &TrainConfig::word_lstm_size));
    f.push_back(size_field("model.meta_lstm_size", &TrainConfig::meta_lstm_size));
    f.push_back(size_field("model.char_mlp_size", &TrainConfig::char_mlp_size));
    f.push_back(size_field("model.word_mlp_size", &TrainConfig::word_mlp_size));
    f.push_back(size_field("model.meta_mlp_size", &TrainConfig::meta_mlp_size));
    f.push_back(size_field("model.char_embedding_dim", &TrainConfig::char_embedding_dim));
    f.push_back(size_field("model.word_embedding_dim", &TrainConfig::word_embedding_dim));
    f.push_back(string_field("model.mlp_activation", &TrainConfig::mlp_activation));
    f.push_back({"model.gather", [](const TrainConfig& c) { return c.gather.to_string(); },
                 [](TrainConfig& c, const std::string& v) { c.gather = GatherStrategy::parse(v); }});
    f.push_back({"model.char_model", [](const TrainConfig& c) { return to_string(c.char_model); },
                 [](TrainConfig& c, const std::string& v) { c.char_model = parse_char_model(v); }});
    f.push_back(double_field("dropout.lstm", &TrainConfig::dropout_lstm));
    f.push_back(double_field("dropout.mlp", &TrainConfig::dropout_mlp));
    f.push_back(double_field("dropout.word_embeddings", &TrainConfig::dropout_word_embeddings));
    f.push_back(double_field("dropout.char_embeddings", &TrainConfig::dropout_char_embeddings));
    f.push_back(string_field("init.word_embeddings", &TrainConfig::init_word_embeddings));
    f.push_back(init_field("init.char_embeddings", &TrainConfig::init_char_embeddings));
    f.push_back(init_field("init.mlp", &TrainConfig::init_mlp));
    f.push_back(init_field("init.lstm", &TrainConfig::init_lstm));
    f.push_back(init_field("init.classifier", &TrainConfig::init_classifier));
    f.push_back(string_field("optimizer.name", &TrainConfig::optimizer));
    f.push_back(string_field("optimizer.loss", &TrainConfig::loss));
    f.push_back(double_field("optimizer.learning_rate", &TrainConfig::learning_rate));
    f.push_back(double_field("optimizer.decay", &TrainConfig::decay));
    f.push_back(double_field("optimizer.epsilon", &TrainConfig::adam_epsilon));
    f.push_back(double_field("optimizer.beta1", &TrainConfig::beta1));
    f.push_back(double_field("optimizer.beta2", &TrainConfig::beta2));
    f.push_back(size_field("train.max_epochs", &TrainConfig::max_epochs));
    f.push_back(size_field("train.batch_size", &TrainConfig::batch_size));
    f.push_back(size_field("train.patience", &TrainConfig::patience));
    f.push_back({"train.seed", [](const TrainConfig& c) { return std::to_string(c.seed); },
                 [](TrainConfig& c, const std::string& v) { c.seed = parse_uint("train.seed", v); }});
    f.push_back({"train.optimization",
                 [](const TrainConfig& c) { return to_string(c.optimization); },
                 [](TrainConfig& c, const std::string& v) { c.optimization = parse_optimization(v); }});
    f.push_back({"train.task", [](const TrainConfig& c) { return std::string(data::to_string(c.task)); },
                 [](TrainConfig& c, const std::string& v) { c.task = data::parse_task(v); }});
    f.push_back(double_field("train.dev_fraction", &TrainConfig::dev_fraction));
    f.push_back({"data.lowercase_pretrained_fallback",
                 [](const TrainConfig& c) { return std::string(c.lowercase_pretrained_fallback ? "true" : "false"); },
                 [](TrainConfig& c, const std::string& v) {
                   c.lowercase_pretrained_fallback = parse_bool("data.lowercase_pretrained_fallback", v);
                 }});
    return f;
  }();
  return all;
}

const Field* find_field(const std::string& key) {
  for (const Field& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void set_config_value(TrainConfig& config, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (f == nullptr) throw std::invalid_argument("unknown config key '" + key + "'");
  f->set(config, value);
}

std::string get_config_value(const TrainConfig& config, const std::string& key) {
  const Field* f = find_field(key);
  if (f == nullptr) throw std::invalid_argument("unknown config key '" + key + "'");
  return f->get(config);
}

std::string format_config(const TrainConfig& config) {
  std::string out;
  for (const Field& f : fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::string section;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw data::ParseError("unterminated section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw data::ParseError("expected 'key = value'", line_no);
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw data::ParseError("empty key", line_no);
    if (!section.empty()) key = section + "." + key;
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> apply_config(TrainConfig& config,
                                                const std::map<std::string, std::string>& values) {
  std::map<std::string, std::string> rest;
  for (const auto& [key, value] : values) {
    if (const Field* f = find_field(key)) {
      f->set(config, value);
    } else {
      rest.emplace(key, value);
    }
  }
  return rest;
}

}  // namespace metatag
