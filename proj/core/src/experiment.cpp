#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "posh/coarse.hpp"
#include "posh/common.hpp"
#include "posh/decoder.hpp"
#include "posh/experiment.hpp"
#include "posh/parallel.hpp"
#include "posh/sparse_index.hpp"

namespace posh {
namespace {

constexpr std::array<std::string_view, 9> kMethods = {
    "fruitfly", "posh", "spherical", "biohash", "bosl", "lsh", "itq", "orthogonal", "knnh-itq"};

Scheme scheme_of(const std::string& method) {
  if (method == "orthogonal") return Scheme::kPosh;
  if (method == "knnh-itq") return Scheme::kItq;
  return *parse_scheme(method);
}

std::span<const double> row_span(const Matrix& m, std::size_t i) {
  return {m.row(static_cast<Eigen::Index>(i)).data(), static_cast<std::size_t>(m.cols())};
}

std::vector<std::uint64_t> ids_of(const std::vector<Neighbor>& hits) {
  std::vector<std::uint64_t> out(hits.size());
  for (std::size_t i = 0; i < hits.size(); ++i) out[i] = hits[i].id;
  return out;
}

template <typename Error>
[[noreturn]] void rethrow_with_seed(const Error& e, std::uint64_t seed) {
  throw Error("trial with seed " + std::to_string(seed) + " failed: " + e.what());
}

}  // namespace

bool is_sparse_method(const std::string& method) { return is_sparse(scheme_of(method)); }

void validate(const ExperimentConfig& c) {
  if (std::find(kMethods.begin(), kMethods.end(), c.method) == kMethods.end()) {
    throw ArgumentError("unknown method '" + c.method + "'");
  }
  if (c.code_length < 1) throw ArgumentError("D must be at least 1");
  const bool sparse = is_sparse_method(c.method);
  if (sparse && (c.alpha < 1 || c.alpha > c.code_length)) {
    throw ArgumentError("alpha=" + std::to_string(c.alpha) + " must lie in [1, D=" +
                        std::to_string(c.code_length) + "]");
  }
  if (c.refinement != Refinement::kOff && !sparse) {
    throw ArgumentError("refinement needs a sparse method, not " + c.method);
  }
  if (!(c.oversample >= 1.0)) throw ArgumentError("oversample must be >= 1");
  if (c.metric != "map" && c.metric != "precision") {
    throw ArgumentError("metric must be 'map' or 'precision', not '" + c.metric + "'");
  }
  if (c.cutoff < 1) throw ArgumentError("cutoff n must be at least 1");
  if (c.trials < 1) throw ArgumentError("trials must be at least 1");
  if (c.train.mini_batch < 1) throw ArgumentError("mini_batch must be at least 1");
  if (!(c.fruitfly_p > 0.0 && c.fruitfly_p < 1.0)) throw ArgumentError("p must lie in (0, 1)");
  if (!(c.biohash_lr0 > 0.0)) throw ArgumentError("lr0 must be positive");
  if (c.knnh_k < 1) throw ArgumentError("knnh k must be at least 1");
  if (c.relevance == RelevanceMode::kMetric && c.relevance_k < 1) {
    throw ArgumentError("relevance k must be at least 1");
  }
}

HashModel train_scheme(const ExperimentConfig& config, const Matrix& train, std::uint64_t seed,
                       const ObjectiveObserver& observer) {
  validate(config);
  const Scheme scheme = scheme_of(config.method);
  const std::size_t D = config.code_length;
  const std::size_t alpha = config.alpha;
  Preprocessing prep = fit_preprocessing(train, scheme, D, alpha);
  const Matrix z = apply_preprocessing(prep, train);
  const auto d = static_cast<std::size_t>(z.cols());

  TrainConfig tc = config.train;
  tc.seed = seed;
  HashModel model;
  if (config.method == "fruitfly") {
    model = fruitfly_init(d, D, config.fruitfly_p, seed, alpha);
  } else if (config.method == "orthogonal") {
    model = gaussian_orthogonal_init(d, D, seed, alpha);
  } else if (config.method == "posh") {
    model = train_posh(z, D, alpha, tc, observer);
  } else if (config.method == "spherical") {
    model = train_spherical(z, D, tc, observer);
    model.alpha = alpha;
  } else if (config.method == "biohash") {
    model = train_biohash(z, D, BioHashConfig{config.biohash_lr0, config.train.epochs, seed},
                          observer);
    model.alpha = alpha;
  } else if (config.method == "bosl") {
    BoslConfig bc;
    bc.rounds = config.bosl_rounds;
    bc.seed = seed;
    model = train_bosl(z, D, alpha, bc);
  } else if (config.method == "lsh") {
    model = lsh_init(d, D, seed);
  } else if (config.method == "itq") {
    model = train_itq(z, config.itq_iterations, seed, observer);
  } else {
    model = train_itq(knnh_preprocess(z, config.knnh_k, config.threads), config.itq_iterations,
                      seed, observer);
  }
  model.prep = std::move(prep);
  return model;
}

std::vector<std::vector<std::uint64_t>> retrieve(const ExperimentConfig& config,
                                                 const HashModel& model,
                                                 const ExperimentData& data, const Matrix& train,
                                                 std::uint64_t seed, std::size_t depth) {
  const Matrix& targets = data.targets.features;
  const Matrix& queries = data.queries.features;
  const std::size_t nq = data.queries.size();
  const std::size_t threads = config.threads;
  std::vector<std::vector<std::uint64_t>> rankings(nq);

  std::optional<CoarseQuantizer> coarse;
  if (config.nprobe > 0) coarse = coarse_fit(targets, seed);
  const auto candidates = [&](std::size_t q) {
    return coarse_probe(*coarse, row_span(queries, q), config.nprobe);
  };

  if (!is_sparse(model.scheme)) {
    DenseIndex index(static_cast<std::uint32_t>(model.code_length()));
    const std::vector<DenseCode> codes = hash_dense_batch(model, targets, threads);
    for (std::size_t i = 0; i < codes.size(); ++i) index.add(i, codes[i]);
    parallel_for(nq, threads, [&](std::size_t q) {
      const DenseCode code = hash_dense(model, row_span(queries, q));
      rankings[q] = ids_of(coarse ? index.knn_query_among(code, depth, candidates(q))
                                  : index.knn_query(code, depth));
    });
    return rankings;
  }

  SparseIndex index(static_cast<std::uint32_t>(model.code_length()),
                    static_cast<std::uint32_t>(model.alpha));
  const std::vector<SparseCode> codes = hash_sparse_batch(model, targets, threads);
  for (std::size_t i = 0; i < codes.size(); ++i) index.add(i, codes[i]);

  if (config.refinement == Refinement::kOff) {
    parallel_for(nq, threads, [&](std::size_t q) {
      const SparseCode code = hash_sparse(model, row_span(queries, q));
      rankings[q] = ids_of(coarse ? index.knn_query_among(code, depth, candidates(q))
                                  : index.knn_query(code, depth));
    });
    return rankings;
  }

  const LinearDecoder decoder =
      train_decoder(hash_sparse_batch(model, train, threads), apply_preprocessing(model.prep, train));

  if (config.refinement == Refinement::kLinear) {
    parallel_for(nq, threads, [&](std::size_t q) {
      std::vector<std::uint64_t> cands;
      if (coarse) cands = candidates(q);
      const auto refined = refine(index, model, decoder, row_span(queries, q), depth,
                                  config.oversample, coarse ? &cands : nullptr);
      rankings[q].resize(refined.size());
      for (std::size_t i = 0; i < refined.size(); ++i) rankings[q][i] = refined[i].id;
    });
    return rankings;
  }

  // SBIHT: decode every target once, then re-rank Hamming candidates by the
  // distance between the preprocessed query and the decoded target.
  Matrix decoded(static_cast<Eigen::Index>(codes.size()), model.W.cols());
  parallel_for(codes.size(), threads, [&](std::size_t i) {
    decoded.row(static_cast<Eigen::Index>(i)) =
        sbiht_decode(codes[i], model.W, decoder, config.sbiht_iterations).transpose();
  });
  const auto fetch = static_cast<std::size_t>(std::ceil(config.oversample * static_cast<double>(depth)));
  parallel_for(nq, threads, [&](std::size_t q) {
    const SparseCode code = hash_sparse(model, row_span(queries, q));
    const std::vector<Neighbor> hits =
        coarse ? index.knn_query_among(code, fetch, candidates(q)) : index.knn_query(code, fetch);
    const std::vector<double> z = preprocess(model.prep, row_span(queries, q));
    const Eigen::Map<const Eigen::RowVectorXd> zq(z.data(), static_cast<Eigen::Index>(z.size()));
    std::vector<std::pair<double, std::uint64_t>> scored;
    scored.reserve(hits.size());
    for (const Neighbor& h : hits) {
      scored.emplace_back((decoded.row(static_cast<Eigen::Index>(h.id)) - zq).norm(), h.id);
    }
    std::sort(scored.begin(), scored.end());
    if (scored.size() > depth) scored.resize(depth);
    for (const auto& s : scored) rankings[q].push_back(s.second);
  });
  return rankings;
}

TrialResult run_trial(const ExperimentConfig& config, const ExperimentData& data,
                      const RelevanceOracle& oracle, std::uint64_t seed) {
  const std::vector<std::uint64_t> train_ids =
      sample_without_replacement(data.targets.size(), config.train_size, config.split_seed);
  const Matrix train = subset(data.targets, train_ids).features;
  const HashModel model = train_scheme(config, train, seed);
  const auto rankings = retrieve(config, model, data, train, seed, config.cutoff);
  TrialResult result;
  if (config.metric == "map") {
    const MapResult m = map_at_n(rankings, oracle, config.cutoff);
    result.value = m.percent;
    result.skipped_queries = m.skipped;
  } else {
    result.value = precision_at_n(rankings, oracle, config.cutoff);
  }
  return result;
}

EvalReport run_trials(const ExperimentConfig& config, const ExperimentData& data) {
  validate(config);
  if (data.targets.dim() != data.queries.dim()) {
    throw ArgumentError("targets and queries differ in dimension");
  }
  if (config.train_size > data.targets.size()) {
    throw ArgumentError("train_size " + std::to_string(config.train_size) + " exceeds the " +
                        std::to_string(data.targets.size()) + " targets");
  }
  RelevanceOracle oracle;
  if (config.relevance == RelevanceMode::kLabel) {
    if (!data.targets.has_labels() || !data.queries.has_labels()) {
      throw ArgumentError("label relevance needs labelled targets and queries");
    }
    oracle = build_label_oracle(data.targets.labels, data.queries.labels);
  } else {
    oracle = build_metric_oracle(data.targets.features, data.queries.features, config.relevance_k,
                                 config.relevance_distance, config.threads);
  }

  EvalReport report;
  report.method = config.method;
  report.dataset = data.targets.name;
  report.synthetic = data.targets.synthetic;
  report.D = config.code_length;
  report.alpha = is_sparse_method(config.method) ? config.alpha : 0;
  report.metric = config.metric;
  report.n = config.cutoff;
  for (std::size_t t = 0; t < config.trials; ++t) {
    const std::uint64_t seed = config.seed + t;
    try {
      const TrialResult r = run_trial(config, data, oracle, seed);
      report.per_trial.push_back(r.value);
      report.skipped_queries += r.skipped_queries;
    } catch (const ArgumentError& e) {
      rethrow_with_seed(e, seed);
    } catch (const NumericalError& e) {
      rethrow_with_seed(e, seed);
    } catch (const std::exception& e) {
      rethrow_with_seed(std::runtime_error(e.what()), seed);
    }
  }
  aggregate(report);
  return report;
}

}  // namespace posh
