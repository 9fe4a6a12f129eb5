#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "metatag/config.hpp"
#include "metatag/data.hpp"
#include "metatag/eval.hpp"
#include "metatag/experiments.hpp"
#include "metatag/synthetic.hpp"
#include "metatag/training.hpp"

namespace metatag::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options shared by every command that trains.
struct TrainOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string task;
  std::string optimization;
  std::optional<std::size_t> max_epochs;
  std::string train_path;
  std::string dev_path;
  std::string pretrained_path;
  bool print_config = false;
};

void add_train_options(CLI::App* cmd, TrainOptions& o) {
  cmd->add_option("--config", o.config_path, "Config file ([section] key = value)");
  cmd->add_option("--set", o.sets, "Override a config key: section.key=value (repeatable)");
  cmd->add_option("--seed", o.seed, "Random seed (default: $METATAG_SEED or 1)");
  cmd->add_option("--task", o.task, "Tag column: xpos, feats or upos");
  cmd->add_option("--optimization", o.optimization, "separate or joint");
  cmd->add_option("--max-epochs", o.max_epochs, "Epoch budget");
  cmd->add_option("--train", o.train_path, "Training CoNLL-U file");
  cmd->add_option("--dev", o.dev_path, "Dev CoNLL-U file (default: split off the training file)");
  cmd->add_option("--pretrained", o.pretrained_path, "Pretrained word vectors (word2vec text)");
  cmd->add_flag("--print-config", o.print_config, "Print the effective config and exit");
}

TrainConfig default_config() {
  TrainConfig config;
  if (const char* env = std::getenv(kSeedEnv); env != nullptr && *env != '\0') {
    try {
      set_config_value(config, "train.seed", env);
    } catch (const std::invalid_argument&) {
      throw UsageError(std::string(kSeedEnv) + " must be a non-negative integer, got '" + env + "'");
    }
  }
  return config;
}

struct Resolved {
  TrainConfig config;
  std::map<std::string, std::string> paths;  // from the [paths] section
};

Resolved resolve(TrainOptions& o) {
  Resolved r{default_config(), {}};
  if (!o.config_path.empty()) {
    auto rest = apply_config(r.config, parse_key_values(data::read_file(o.config_path)));
    for (auto& [key, value] : rest) {
      if (key.rfind("paths.", 0) != 0) throw UsageError("unknown config key '" + key + "' in " + o.config_path);
      r.paths[key.substr(6)] = value;
    }
  }
  for (const std::string& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    set_config_value(r.config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) r.config.seed = *o.seed;
  if (!o.task.empty()) r.config.task = data::parse_task(o.task);
  if (!o.optimization.empty()) r.config.optimization = parse_optimization(o.optimization);
  if (o.max_epochs) r.config.max_epochs = *o.max_epochs;
  r.config.validate();
  auto take = [&](std::string& flag, const char* key) {
    if (flag.empty() && r.paths.count(key)) flag = r.paths[key];
  };
  take(o.train_path, "train");
  take(o.dev_path, "dev");
  take(o.pretrained_path, "pretrained");
  return r;
}

experiments::Dataset load_dataset(const TrainOptions& o, const TrainConfig& config) {
  if (o.train_path.empty()) throw UsageError("--train is required");
  experiments::Dataset d;
  std::vector<data::Sentence> train = data::read_conllu(o.train_path);
  if (o.dev_path.empty()) {
    std::tie(d.train, d.dev) = data::dev_split(train, config.dev_fraction, config.seed);
  } else {
    d.train = std::move(train);
    d.dev = data::read_conllu(o.dev_path);
  }
  if (!o.pretrained_path.empty()) d.pretrained_text = data::read_file(o.pretrained_path);
  return d;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  open_output(path) << text;
}

experiments::GridRange parse_range(const std::string& text) {
  experiments::GridRange r;
  std::vector<std::size_t> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    const std::string piece = text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
    try {
      std::size_t used = 0;
      parts.push_back(std::stoul(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw UsageError("range must be first:last[:step], got '" + text + "'");
    }
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() == 1) parts = {parts[0], parts[0], 1};
  if (parts.size() == 2) parts.push_back(50);
  if (parts.size() != 3) throw UsageError("range must be first:last[:step], got '" + text + "'");
  r.first = parts[0];
  r.last = parts[1];
  r.step = parts[2];
  r.values();
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"metatag: character, word and meta BiLSTM morphosyntactic tagger"};
  app.require_subcommand(0, 1);
  bool print_defaults = false;
  app.add_flag("--print-config", print_defaults, "Print the default config and exit");

  TrainOptions train_opts;
  std::string checkpoint_path;
  std::string log_path;
  CLI::App* train_cmd = app.add_subcommand("train", "Train the three models and keep the best checkpoint");
  add_train_options(train_cmd, train_opts);
  train_cmd->add_option("--checkpoint,-o", checkpoint_path, "Output checkpoint");
  train_cmd->add_option("--log", log_path, "Write the per-epoch log here as well");

  std::string tag_checkpoint;
  std::string tag_input;
  std::string tag_output = "-";
  CLI::App* tag_cmd = app.add_subcommand("tag", "Tag a CoNLL-U file with a trained checkpoint");
  tag_cmd->add_option("--checkpoint,-m", tag_checkpoint, "Checkpoint")->required();
  tag_cmd->add_option("--input,-i", tag_input, "Input CoNLL-U")->required();
  tag_cmd->add_option("--output,-o", tag_output, "Output CoNLL-U ('-' for stdout)");

  std::string gold_path;
  std::string pred_path;
  std::string eval_task = "xpos";
  std::string eval_csv;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score predicted tags against gold");
  eval_cmd->add_option("--gold,-g", gold_path, "Gold CoNLL-U")->required();
  eval_cmd->add_option("--pred,-p", pred_path, "Predicted CoNLL-U")->required();
  eval_cmd->add_option("--task", eval_task, "xpos, feats or upos");
  eval_cmd->add_option("--csv", eval_csv, "CSV report path ('-' for stdout)");

  TrainOptions grid_opts;
  std::string char_range = "200:500:50";
  std::string word_range = "200:500:50";
  std::string grid_csv_path = "-";
  CLI::App* grid_cmd = app.add_subcommand("grid", "Dev accuracy over a grid of char and word LSTM sizes");
  add_train_options(grid_cmd, grid_opts);
  grid_cmd->add_option("--char-range", char_range, "first:last:step");
  grid_cmd->add_option("--word-range", word_range, "first:last:step");
  grid_cmd->add_option("--csv", grid_csv_path, "CSV output ('-' for stdout)");

  TrainOptions ablate_opts;
  std::string axis;
  std::size_t seed_count = 10;
  std::string ablate_csv_path;
  CLI::App* ablate_cmd = app.add_subcommand("ablate", "Run one ablation axis over several seeds");
  add_train_options(ablate_cmd, ablate_opts);
  ablate_cmd->add_option("--axis", axis, "gather, context, optimization or components")->required();
  ablate_cmd->add_option("--seeds", seed_count, "Number of seeds, starting at the configured seed");
  ablate_cmd->add_option("--csv", ablate_csv_path, "Per-seed CSV output");

  std::string plan = "neighbor_suffix";
  std::string synth_dir;
  synthetic::Options synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus (train.conllu, dev.conllu, pretrained.vec)");
  synth_cmd->add_option("--plan", plan, "neighbor_suffix or complementary");
  synth_cmd->add_option("--out-dir", synth_dir, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");
  synth_cmd->add_option("--train-sentences", synth.train_sentences, "Training sentences");
  synth_cmd->add_option("--dev-sentences", synth.dev_sentences, "Dev sentences");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (print_defaults) {
      out << format_config(default_config());
      return kExitOk;
    }
    if (app.get_subcommands().empty()) {
      err << app.help();
      return kExitUsage;
    }

    if (train_cmd->parsed()) {
      Resolved r = resolve(train_opts);
      if (train_opts.print_config) {
        out << format_config(r.config);
        return kExitOk;
      }
      if (checkpoint_path.empty() && r.paths.count("checkpoint")) checkpoint_path = r.paths["checkpoint"];
      if (log_path.empty() && r.paths.count("log")) log_path = r.paths["log"];
      if (checkpoint_path.empty()) throw UsageError("--checkpoint is required");
      const experiments::Dataset dataset = load_dataset(train_opts, r.config);
      std::optional<std::ofstream> log;
      if (!log_path.empty()) log = open_output(log_path);
      TrainResult result = experiments::train_on(r.config, dataset, [&](const EpochRecord& rec) {
        const std::string line = format_epoch(rec) + "\n";
        out << line << std::flush;
        if (log) *log << line << std::flush;
      });
      char buf[96];
      std::snprintf(buf, sizeof buf, "best_epoch=%zu best_dev_meta=%.6f\n", result.checkpoint.best_epoch,
                    result.checkpoint.best_dev_score);
      out << buf;
      if (log) *log << buf;
      checkpoint_save(checkpoint_path, result.checkpoint);
      return kExitOk;
    }

    if (tag_cmd->parsed()) {
      Checkpoint cp = checkpoint_load(tag_checkpoint);
      std::vector<data::Sentence> sentences = data::read_conllu(tag_input);
      tag_sentences(cp, sentences);
      write_text(tag_output, data::serialize_conllu(sentences), out);
      return kExitOk;
    }

    if (eval_cmd->parsed()) {
      const data::Task task = data::parse_task(eval_task);
      const eval::EvalReport report =
          eval::score(data::read_conllu(gold_path), data::read_conllu(pred_path), task);
      out << eval::report_text(report);
      if (!eval_csv.empty()) write_text(eval_csv, eval::report_csv(report), out);
      return kExitOk;
    }

    if (grid_cmd->parsed()) {
      Resolved r = resolve(grid_opts);
      if (grid_opts.print_config) {
        out << format_config(r.config);
        return kExitOk;
      }
      const auto cr = parse_range(char_range);
      const auto wr = parse_range(word_range);
      const experiments::Dataset dataset = load_dataset(grid_opts, r.config);
      const auto cells = experiments::run_grid(r.config, cr, wr, dataset);
      bool any_ok = false;
      for (const auto& cell : cells) {
        if (cell.error.empty()) {
          any_ok = true;
        } else {
          err << "cell " << cell.char_size << "x" << cell.word_size << ": " << cell.error << "\n";
        }
      }
      write_text(grid_csv_path, experiments::grid_csv(cells), out);
      return any_ok ? kExitOk : kExitData;
    }

    if (ablate_cmd->parsed()) {
      Resolved r = resolve(ablate_opts);
      if (ablate_opts.print_config) {
        out << format_config(r.config);
        return kExitOk;
      }
      const experiments::Axis a = experiments::parse_axis(axis);
      if (seed_count == 0) throw UsageError("--seeds must be at least 1");
      std::vector<std::uint64_t> seeds;
      for (std::size_t k = 0; k < seed_count; ++k) seeds.push_back(r.config.seed + k);
      const experiments::Dataset dataset = load_dataset(ablate_opts, r.config);
      const auto results = experiments::run_ablation(r.config, a, seeds, dataset);
      const eval::AblationReport report = eval::ablation_report(results);
      if (a == experiments::Axis::kComponents) {
        out << eval::components_table(report, std::string(data::to_string(r.config.task)));
      } else {
        out << eval::ablation_table(report);
      }
      write_text(ablate_csv_path, eval::ablation_csv(results), out);
      return kExitOk;
    }

    if (synth_cmd->parsed()) {
      synth.plan = synthetic::parse_plan(plan);
      const synthetic::Corpus corpus = synthetic::generate(synth);
      std::filesystem::create_directories(synth_dir);
      const std::filesystem::path dir(synth_dir);
      open_output((dir / "train.conllu").string()) << data::serialize_conllu(corpus.train);
      open_output((dir / "dev.conllu").string()) << data::serialize_conllu(corpus.dev);
      if (!corpus.pretrained.empty()) open_output((dir / "pretrained.vec").string()) << corpus.pretrained;
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace metatag::cli
