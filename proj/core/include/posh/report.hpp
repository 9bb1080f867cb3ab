#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace posh {

/// Aggregated retrieval quality over repeated trials. Values are percentages.
struct EvalReport {
  std::string method;
  std::string dataset;
  std::size_t D = 0;
  std::size_t alpha = 0;
  std::string metric;  // "map" or "precision"
  std::size_t n = 0;
  std::vector<double> per_trial;
  double mean = 0;
  double ci95 = 0;  // 1.96 * sample stddev / sqrt(trials); 0 for one trial
  bool synthetic = false;
  std::size_t skipped_queries = 0;  // summed over trials
};

/// Fills mean and ci95 from per_trial.
void aggregate(EvalReport& report);

/// Header line plus one row per trial and a summary row.
std::string to_table(const EvalReport& report);

std::string to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);

}  // namespace posh
