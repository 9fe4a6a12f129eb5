// Tagging accuracy under gold segmentation, and seed-aggregated ablation tables.

#pragma once

#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <cstdint>
#include <utility>
#include <vector>

#include "metatag/data.hpp"

namespace metatag::eval {

class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalReport {
  data::Task task = data::Task::kXpos;
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  // (gold, predicted) -> count
  std::map<std::pair<std::string, std::string>, std::size_t> confusion;
};

/// Token exact match on the task column; FEATS compared as canonical bundles.
/// With identical tokenization this is also the aligned F1. Throws
/// AlignmentError when sentence or token counts differ.
EvalReport score(const std::vector<data::Sentence>& gold, const std::vector<data::Sentence>& pred,
                 data::Task task);

/// "task,total,correct,accuracy" header plus one row.
std::string report_csv(const EvalReport& report);
std::string report_text(const EvalReport& report);

struct Summary {
  double mean = 0.0;
  double stdev = 0.0;  // sample (n - 1); 0 for a single value
  std::size_t n = 0;
};

Summary summarize(const std::vector<double>& values);

/// Paired t statistic of a - b (compare against a two-tailed t table with
/// n - 1 degrees of freedom). Infinite when every difference is the same
/// nonzero value, 0 when all are zero. Throws on size mismatch or n < 2.
double paired_t(const std::vector<double>& a, const std::vector<double>& b);

struct SeedResult {
  std::string config;
  std::uint64_t seed = 0;
  std::string task;
  double accuracy = 0.0;
};

/// Rows in insertion order of first appearance of each config.
struct AblationReport {
  std::vector<std::string> configs;
  std::map<std::string, Summary> summaries;
  std::vector<SeedResult> results;
};

AblationReport ablation_report(const std::vector<SeedResult>& results);

/// "config,seed,task,accuracy" rows, accuracy in percent.
std::string ablation_csv(const std::vector<SeedResult>& results);

/// One row per config with "mean ±stdev" in percent, plus the paired t
/// statistic against the first config.
std::string ablation_table(const AblationReport& report);

/// Table in the component layout: a single row with one "mean ±stdev"
/// column per config (char, word, meta).
std::string components_table(const AblationReport& report, const std::string& label);

}  // namespace metatag::eval
