#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "metatag/data.hpp"

namespace fs = std::filesystem;
using metatag::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data_file(const std::string& name) { return std::string(METATAG_TEST_DATA) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> columns(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string c; std::getline(in, c, '\t');) out.push_back(c);
  return out;
}

const std::vector<std::string> kSmall = {"--set", "model.char_layers=1", "--set", "model.word_layers=1",
                                         "--set", "model.char_lstm_size=8", "--set", "model.word_lstm_size=8",
                                         "--set", "model.meta_lstm_size=8", "--set", "model.char_mlp_size=8",
                                         "--set", "model.word_mlp_size=8", "--set", "model.meta_mlp_size=8",
                                         "--set", "model.char_embedding_dim=4", "--set", "model.word_embedding_dim=4",
                                         "--set", "train.batch_size=8"};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    ::unsetenv("METATAG_SEED");
    dir_ = fs::temp_directory_path() /
           ("metatag_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override {
    ::unsetenv("METATAG_SEED");
    fs::remove_all(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Result train(std::vector<std::string> extra) {
    std::vector<std::string> args{"train"};
    args.insert(args.end(), kSmall.begin(), kSmall.end());
    args.insert(args.end(), extra.begin(), extra.end());
    return call(args);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, PrintConfigMatchesGolden) {
  Result r = call({"--print-config"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, slurp(std::string(METATAG_GOLDEN_DIR) + "/default_config.txt"));
}

TEST_F(Cli, SeedFromEnvironment) {
  ::setenv("METATAG_SEED", "42", 1);
  Result r = call({"--print-config"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("train.seed = 42\n"), std::string::npos);
  Result flag = call({"train", "--seed", "7", "--print-config"});
  EXPECT_NE(flag.out.find("train.seed = 7\n"), std::string::npos);
  ::setenv("METATAG_SEED", "many", 1);
  EXPECT_EQ(call({"--print-config"}).code, 1);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(call({}).code, 1);
  EXPECT_EQ(call({"frobnicate"}).code, 1);
  EXPECT_EQ(call({"--help"}).code, 0);
  EXPECT_EQ(call({"eval", "--gold", data_file("toy.conllu")}).code, 1);
  EXPECT_EQ(call({"train", "--set", "model.char_lstm_size"}).code, 1);
  EXPECT_EQ(call({"train", "--set", "no.key=1", "--print-config"}).code, 1);
  EXPECT_EQ(call({"train", "--task", "lemma", "--print-config"}).code, 1);
  EXPECT_EQ(call({"train", "-o", path("m.bin")}).code, 1);  // no --train
  EXPECT_EQ(call({"eval", "-g", data_file("toy.conllu"), "-p", data_file("toy.conllu"), "--task", "deprel"}).code,
            1);
  EXPECT_EQ(call({"grid", "--char-range", "a:b", "--train", data_file("toy.conllu")}).code, 1);
}

TEST_F(Cli, ConfigPrecedence) {
  std::ofstream(path("c.ini")) << "[model]\nchar_lstm_size = 64\nword_lstm_size = 64\n[train]\nseed = 9\n";
  Result r = call({"train", "--config", path("c.ini"), "--set", "model.word_lstm_size=32", "--seed", "3",
                   "--print-config"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("model.char_lstm_size = 64\n"), std::string::npos);
  EXPECT_NE(r.out.find("model.word_lstm_size = 32\n"), std::string::npos);
  EXPECT_NE(r.out.find("train.seed = 3\n"), std::string::npos);

  std::ofstream(path("bad.ini")) << "[model]\ncolour = blue\n";
  EXPECT_EQ(call({"train", "--config", path("bad.ini"), "--print-config"}).code, 1);
  EXPECT_EQ(call({"train", "--config", path("absent.ini"), "--print-config"}).code, 2);
}

TEST_F(Cli, EvalIdenticalAndCsv) {
  Result r = call({"eval", "-g", data_file("toy.conllu"), "-p", data_file("toy.conllu"), "--csv", path("r.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = lines(slurp(path("r.csv")));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "task,total,correct,accuracy");
  EXPECT_EQ(rows[1].substr(rows[1].rfind(',') + 1), "1.000000");
}

TEST_F(Cli, EvalOneErrorInFour) {
  Result r = call({"eval", "-g", data_file("scorer/pair1_gold.conllu"), "-p", data_file("scorer/pair1_pred.conllu"),
                   "--csv", "-"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("xpos,4,3,0.750000\n"), std::string::npos);
}

TEST_F(Cli, DataErrors) {
  EXPECT_EQ(call({"eval", "-g", path("none.conllu"), "-p", data_file("toy.conllu")}).code, 2);
  EXPECT_EQ(call({"eval", "-g", data_file("toy.conllu"), "-p", data_file("sample.conllu")}).code, 2);
  std::ofstream(path("broken.conllu")) << "1\tonly\tthree\n\n";
  EXPECT_EQ(call({"eval", "-g", path("broken.conllu"), "-p", path("broken.conllu")}).code, 2);
  EXPECT_EQ(call({"tag", "-m", path("none.bin"), "-i", data_file("toy.conllu")}).code, 2);
  EXPECT_EQ(train({"--train", path("none.conllu"), "-o", path("m.bin")}).code, 2);
}

TEST_F(Cli, TrainTagEvalCompose) {
  // Dev = train, so the reported best dev accuracy is the training accuracy
  // of the saved model.
  Result t = train({"--train", data_file("toy.conllu"), "--dev", data_file("toy.conllu"), "--max-epochs", "2",
                    "-o", path("m.bin"), "--log", path("train.log")});
  ASSERT_EQ(t.code, 0) << t.err;
  auto log = lines(slurp(path("train.log")));
  ASSERT_EQ(log.size(), 4u);
  EXPECT_EQ(log[0].rfind("epoch=0 ", 0), 0u);
  EXPECT_EQ(slurp(path("train.log")), t.out);
  const std::string best = log.back().substr(log.back().find("best_dev_meta=") + 14);

  Result tag = call({"tag", "-m", path("m.bin"), "-i", data_file("toy.conllu"), "-o", path("pred.conllu")});
  ASSERT_EQ(tag.code, 0) << tag.err;
  Result ev = call({"eval", "-g", data_file("toy.conllu"), "-p", path("pred.conllu"), "--csv", "-"});
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_NE(ev.out.find("," + best + "\n"), std::string::npos) << ev.out << " vs " << best;
}

TEST_F(Cli, TagPreservesEverythingButTheTaskColumn) {
  ASSERT_EQ(train({"--train", data_file("toy.conllu"), "--max-epochs", "1", "-o", path("m.bin")}).code, 0);
  Result tag = call({"tag", "-m", path("m.bin"), "-i", data_file("sample.conllu")});
  ASSERT_EQ(tag.code, 0) << tag.err;
  const auto in = lines(slurp(data_file("sample.conllu")));
  const auto out = lines(tag.out);
  ASSERT_EQ(in.size(), out.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const auto a = columns(in[i]);
    const auto b = columns(out[i]);
    const bool word_line = a.size() == 10 && a[0].find_first_of("-.") == std::string::npos;
    if (!word_line) {
      EXPECT_EQ(in[i], out[i]);
      continue;
    }
    ASSERT_EQ(b.size(), 10u);
    for (std::size_t c = 0; c < 10; ++c) {
      if (c != 4) EXPECT_EQ(a[c], b[c]) << in[i];
    }
  }
  EXPECT_NO_THROW(metatag::data::parse_conllu(tag.out));
}

TEST_F(Cli, TrainFromConfigPaths) {
  std::ofstream(path("c.ini")) << "[train]\nmax_epochs = 1\n[paths]\ntrain = " << data_file("toy.conllu")
                               << "\ncheckpoint = " << path("m.bin") << "\n";
  Result r = train({"--config", path("c.ini")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("m.bin")));
}

TEST_F(Cli, SynthWritesCorpus) {
  Result r = call({"synth", "--plan", "complementary", "--out-dir", path("syn"), "--train-sentences", "5",
                   "--dev-sentences", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(metatag::data::read_conllu(path("syn/train.conllu")).size(), 5u);
  EXPECT_EQ(metatag::data::read_conllu(path("syn/dev.conllu")).size(), 3u);
  EXPECT_TRUE(fs::exists(path("syn/pretrained.vec")));
  EXPECT_EQ(call({"synth", "--plan", "other", "--out-dir", path("x")}).code, 1);
}
