#include "metatag/eval.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace metatag::eval {

EvalReport score(const std::vector<data::Sentence>& gold, const std::vector<data::Sentence>& pred,
                 data::Task task) {
  if (gold.size() != pred.size()) {
    throw AlignmentError("sentence count differs: gold " + std::to_string(gold.size()) +
                         ", predicted " + std::to_string(pred.size()));
  }
  EvalReport report;
  report.task = task;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto& g = gold[s].tokens;
    const auto& p = pred[s].tokens;
    if (g.size() != p.size()) {
      throw AlignmentError("sentence " + std::to_string(s + 1) + ": gold has " +
                           std::to_string(g.size()) + " tokens, predicted has " +
                           std::to_string(p.size()) + " (predicted segmentation is not supported)");
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
      std::string gt = g[i].tag(task);
      std::string pt = p[i].tag(task);
      ++report.total;
      report.correct += gt == pt;
      ++report.confusion[{std::move(gt), std::move(pt)}];
    }
  }
  if (report.total) {
    report.accuracy = static_cast<double>(report.correct) / static_cast<double>(report.total);
  }
  return report;
}

std::string report_csv(const EvalReport& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "task,total,correct,accuracy\n%s,%zu,%zu,%.6f\n",
                std::string(data::to_string(r.task)).c_str(), r.total, r.correct, r.accuracy);
  return buf;
}

std::string report_text(const EvalReport& r) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "task: %s\ntokens: %zu\ncorrect: %zu\naccuracy: %.2f%%\n",
                std::string(data::to_string(r.task)).c_str(), r.total, r.correct,
                100.0 * r.accuracy);
  out << buf;
  bool header = false;
  for (const auto& [pair, count] : r.confusion) {
    if (pair.first == pair.second) continue;
    if (!header) {
      out << "errors (gold -> predicted: count):\n";
      header = true;
    }
    out << "  " << pair.first << " -> " << pair.second << ": " << count << "\n";
  }
  return out.str();
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.n = values.size();
  if (s.n == 0) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stdev = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

double paired_t(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t: samples differ in size");
  if (a.size() < 2) throw std::invalid_argument("paired_t: need at least two pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const Summary s = summarize(d);
  if (s.stdev == 0.0) {
    if (s.mean == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), s.mean);
  }
  return s.mean / (s.stdev / std::sqrt(static_cast<double>(s.n)));
}

AblationReport ablation_report(const std::vector<SeedResult>& results) {
  AblationReport report;
  report.results = results;
  std::map<std::string, std::vector<double>> values;
  for (const SeedResult& r : results) {
    auto [it, inserted] = values.try_emplace(r.config);
    if (inserted) report.configs.push_back(r.config);
    it->second.push_back(r.accuracy);
  }
  for (const auto& [config, v] : values) report.summaries[config] = summarize(v);
  return report;
}

std::string ablation_csv(const std::vector<SeedResult>& results) {
  std::string out = "config,seed,task,accuracy\n";
  char buf[64];
  for (const SeedResult& r : results) {
    std::snprintf(buf, sizeof buf, "%.4f", 100.0 * r.accuracy);
    out += r.config + "," + std::to_string(r.seed) + "," + r.task + "," + buf + "\n";
  }
  return out;
}

namespace {

std::string mean_stdev(const Summary& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f ±%.2f", 100.0 * s.mean, 100.0 * s.stdev);
  return buf;
}

std::vector<double> seed_values(const AblationReport& report, const std::string& config,
                                std::vector<std::uint64_t>* seeds) {
  std::vector<double> v;
  for (const SeedResult& r : report.results) {
    if (r.config != config) continue;
    v.push_back(r.accuracy);
    if (seeds) seeds->push_back(r.seed);
  }
  return v;
}

}  // namespace

std::string ablation_table(const AblationReport& report) {
  std::ostringstream out;
  out << "config\tseeds\tmean ±stdev\tpaired t vs " << (report.configs.empty() ? "-" : report.configs[0])
      << "\n";
  std::vector<std::uint64_t> base_seeds;
  const std::vector<double> base =
      report.configs.empty() ? std::vector<double>{} : seed_values(report, report.configs[0], &base_seeds);
  for (const std::string& config : report.configs) {
    const Summary& s = report.summaries.at(config);
    out << config << "\t" << s.n << "\t" << mean_stdev(s) << "\t";
    std::vector<std::uint64_t> seeds;
    const std::vector<double> v = seed_values(report, config, &seeds);
    if (config != report.configs[0] && seeds == base_seeds && v.size() >= 2) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3f", paired_t(v, base));
      out << buf;
    } else {
      out << "-";
    }
    out << "\n";
  }
  return out.str();
}

std::string components_table(const AblationReport& report, const std::string& label) {
  std::ostringstream out;
  out << "\t";
  for (std::size_t i = 0; i < report.configs.size(); ++i) {
    out << report.configs[i] << (i + 1 < report.configs.size() ? "\t" : "\n");
  }
  out << label << "\t";
  for (std::size_t i = 0; i < report.configs.size(); ++i) {
    out << mean_stdev(report.summaries.at(report.configs[i]))
        << (i + 1 < report.configs.size() ? "\t" : "\n");
  }
  return out.str();
}

}  // namespace metatag::eval
