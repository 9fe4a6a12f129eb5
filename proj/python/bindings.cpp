#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "metatag/config.hpp"
#include "metatag/eval.hpp"
#include "metatag/experiments.hpp"
#include "metatag/synthetic.hpp"
#include "metatag/training.hpp"

namespace py = pybind11;
using namespace metatag;

namespace {

py::dict epoch_dict(const EpochRecord& r) {
  py::dict d;
  d["epoch"] = r.epoch;
  d["char_loss"] = r.char_loss;
  d["word_loss"] = r.word_loss;
  d["meta_loss"] = r.meta_loss;
  d["dev_char"] = r.dev.char_accuracy;
  d["dev_word"] = r.dev.word_accuracy;
  d["dev_meta"] = r.dev.meta_accuracy;
  return d;
}

TrainConfig make_config(const std::map<std::string, std::string>& overrides) {
  TrainConfig c;
  for (const auto& [key, value] : overrides) set_config_value(c, key, value);
  c.validate();
  return c;
}

py::dict train_files(const std::string& train_path, const std::string& checkpoint, const std::string& dev_path,
               const std::string& pretrained_path, const std::map<std::string, std::string>& overrides) {
  const TrainConfig config = make_config(overrides);
  experiments::Dataset d;
  auto corpus = data::read_conllu(train_path);
  if (dev_path.empty()) {
    std::tie(d.train, d.dev) = data::dev_split(corpus, config.dev_fraction, config.seed);
  } else {
    d.train = std::move(corpus);
    d.dev = data::read_conllu(dev_path);
  }
  if (!pretrained_path.empty()) d.pretrained_text = data::read_file(pretrained_path);
  TrainResult result;
  {
    py::gil_scoped_release release;
    result = experiments::train_on(config, d);
    if (!checkpoint.empty()) checkpoint_save(checkpoint, result.checkpoint);
  }
  py::list history;
  for (const auto& r : result.history) history.append(epoch_dict(r));
  py::dict out;
  out["best_epoch"] = result.checkpoint.best_epoch;
  out["best_dev_meta"] = result.checkpoint.best_dev_score;
  out["best_dev_char"] = result.best_char_accuracy;
  out["best_dev_word"] = result.best_word_accuracy;
  out["history"] = history;
  return out;
}

std::string tag_text(const std::string& checkpoint, const std::string& conllu) {
  Checkpoint cp = checkpoint_load(checkpoint);
  auto sentences = data::parse_conllu(conllu);
  tag_sentences(cp, sentences);
  return data::serialize_conllu(sentences);
}

py::dict evaluate(const std::string& gold, const std::string& pred, const std::string& task) {
  const auto r = eval::score(data::parse_conllu(gold), data::parse_conllu(pred), data::parse_task(task));
  py::dict d;
  d["task"] = std::string(data::to_string(r.task));
  d["total"] = r.total;
  d["correct"] = r.correct;
  d["accuracy"] = r.accuracy;
  return d;
}

py::dict synthesize(const std::string& plan, std::uint64_t seed, std::size_t train_sentences,
                    std::size_t dev_sentences) {
  synthetic::Options o;
  o.plan = synthetic::parse_plan(plan);
  o.seed = seed;
  o.train_sentences = train_sentences;
  o.dev_sentences = dev_sentences;
  const auto c = synthetic::generate(o);
  py::dict d;
  d["train"] = data::serialize_conllu(c.train);
  d["dev"] = data::serialize_conllu(c.dev);
  d["pretrained"] = c.pretrained;
  return d;
}

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = cli::run(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Character, word and meta BiLSTM tagger";

  py::register_exception<data::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<eval::AlignmentError>(m, "AlignmentError", PyExc_ValueError);
  py::register_exception<CheckpointError>(m, "CheckpointError", PyExc_IOError);

  m.def("default_config", [] { return format_config(TrainConfig{}); },
        "Default configuration as 'key = value' lines.");
  m.def("config_keys", &config_keys);
  m.def("train", &train_files, py::arg("train"), py::arg("checkpoint") = "", py::arg("dev") = "",
        py::arg("pretrained") = "", py::arg("overrides") = std::map<std::string, std::string>{},
        "Train on CoNLL-U files; returns the epoch history and best scores.");
  m.def("tag", &tag_text, py::arg("checkpoint"), py::arg("conllu"),
        "Tag CoNLL-U text with a checkpoint; returns CoNLL-U text.");
  m.def("evaluate", &evaluate, py::arg("gold"), py::arg("pred"), py::arg("task") = "xpos",
        "Score predicted CoNLL-U text against gold.");
  m.def("synthesize", &synthesize, py::arg("plan") = "neighbor_suffix", py::arg("seed") = 1,
        py::arg("train_sentences") = 400, py::arg("dev_sentences") = 100);
  m.def("run_cli", &run_cli, py::arg("args"), "Run the command-line tool; returns (exit code, stdout, stderr).");
}
