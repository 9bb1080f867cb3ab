#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "posh/datasets.hpp"
#include "posh/hash_model.hpp"
#include "posh/metrics.hpp"
#include "posh/report.hpp"
#include "posh/trainers.hpp"

namespace posh {

enum class Refinement { kOff, kLinear, kSbiht };

/// Everything needed to rerun one retrieval experiment.
struct ExperimentConfig {
  /// A scheme name, "orthogonal" (random Gaussian W with orthonormal columns,
  /// WTA codes) or "knnh-itq".
  std::string method = "posh";
  std::size_t code_length = 1024;
  std::size_t alpha = 64;
  TrainConfig train;
  double fruitfly_p = 0.2;
  double biohash_lr0 = 0.02;
  std::size_t bosl_rounds = 50;
  std::size_t itq_iterations = 50;
  std::size_t knnh_k = 20;

  Refinement refinement = Refinement::kOff;
  double oversample = 2.0;
  std::size_t sbiht_iterations = 100;
  std::size_t nprobe = 0;  // 0 disables the coarse quantizer

  std::string metric = "map";  // or "precision"
  std::size_t cutoff = 100;
  RelevanceMode relevance = RelevanceMode::kLabel;
  std::size_t relevance_k = 100;  // metric-mode neighbour count
  Distance relevance_distance = Distance::kEuclidean;

  std::size_t trials = 10;
  std::uint64_t seed = 0;
  std::size_t train_size = 5000;
  std::uint64_t split_seed = 0;  // the training sample is shared by all trials
  std::size_t threads = 1;
};

/// Rejects inconsistent settings (alpha > D, refinement on a dense scheme...)
/// with ArgumentError.
void validate(const ExperimentConfig& config);

bool is_sparse_method(const std::string& method);

/// Fits preprocessing on raw training rows and trains the configured method
/// with `seed`. Returns a model that hashes raw vectors.
HashModel train_scheme(const ExperimentConfig& config, const Matrix& train, std::uint64_t seed,
                       const ObjectiveObserver& observer = {});

/// Retrieval run against a fixed target/query pair.
struct ExperimentData {
  Dataset targets;
  Dataset queries;
};

/// Ranked target ids (row positions) for every query, `depth` per query.
std::vector<std::vector<std::uint64_t>> retrieve(const ExperimentConfig& config,
                                                 const HashModel& model,
                                                 const ExperimentData& data,
                                                 const Matrix& train, std::uint64_t seed,
                                                 std::size_t depth);

/// One full train, hash, index, query and score pass.
struct TrialResult {
  double value = 0;
  std::size_t skipped_queries = 0;
};
TrialResult run_trial(const ExperimentConfig& config, const ExperimentData& data,
                      const RelevanceOracle& oracle, std::uint64_t seed);

/// Runs config.trials trials with seeds seed, seed + 1, ... and aggregates.
/// A failing trial aborts with an error naming its seed.
EvalReport run_trials(const ExperimentConfig& config, const ExperimentData& data);

}  // namespace posh
