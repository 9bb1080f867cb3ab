#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "posh/common.hpp"
#include "posh/report.hpp"

namespace posh {

void aggregate(EvalReport& report) {
  const std::size_t trials = report.per_trial.size();
  if (trials == 0) throw ArgumentError("aggregate: no trial values");
  double sum = 0;
  for (double v : report.per_trial) sum += v;
  report.mean = sum / static_cast<double>(trials);
  if (trials == 1) {
    report.ci95 = 0;
    return;
  }
  double ss = 0;
  for (double v : report.per_trial) ss += (v - report.mean) * (v - report.mean);
  const double sd = std::sqrt(ss / static_cast<double>(trials - 1));
  report.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(trials));
}

std::string to_table(const EvalReport& report) {
  std::ostringstream out;
  char line[160];
  out << "# method=" << report.method << " dataset=" << report.dataset
      << (report.synthetic ? " (synthetic)" : "") << " D=" << report.D
      << " alpha=" << report.alpha << " metric=" << report.metric << "@" << report.n << '\n';
  out << "trial\tvalue\n";
  for (std::size_t t = 0; t < report.per_trial.size(); ++t) {
    std::snprintf(line, sizeof(line), "%zu\t%.6f\n", t, report.per_trial[t]);
    out << line;
  }
  std::snprintf(line, sizeof(line), "mean\t%.6f\nci95\t%.6f\n", report.mean, report.ci95);
  out << line;
  if (report.skipped_queries > 0) out << "skipped_queries\t" << report.skipped_queries << '\n';
  return out.str();
}

std::string to_json(const EvalReport& report) {
  nlohmann::json j = {
      {"method", report.method},       {"dataset", report.dataset},
      {"D", report.D},                 {"alpha", report.alpha},
      {"metric", report.metric},       {"n", report.n},
      {"per_trial", report.per_trial}, {"mean", report.mean},
      {"ci95", report.ci95},           {"synthetic", report.synthetic},
      {"skipped_queries", report.skipped_queries},
  };
  return j.dump(2);
}

EvalReport report_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  EvalReport r;
  r.method = j.at("method").get<std::string>();
  r.dataset = j.at("dataset").get<std::string>();
  r.D = j.at("D").get<std::size_t>();
  r.alpha = j.at("alpha").get<std::size_t>();
  r.metric = j.at("metric").get<std::string>();
  r.n = j.at("n").get<std::size_t>();
  r.per_trial = j.at("per_trial").get<std::vector<double>>();
  r.mean = j.at("mean").get<double>();
  r.ci95 = j.at("ci95").get<double>();
  r.synthetic = j.value("synthetic", false);
  r.skipped_queries = j.value("skipped_queries", std::size_t{0});
  return r;
}

}  // namespace posh
