#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "posh/common.hpp"
#include "posh/model_io.hpp"
#include "posh/parallel.hpp"
#include "posh/sparse_index.hpp"

namespace posh::cli {
namespace {

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool wants_config) {
  if (wants_config) {
    cmd->add_option("--config", c.config, "experiment config (JSON)")->required();
    cmd->add_option("--set", c.sets, "override a config key, e.g. --set train.epochs=5");
  }
  cmd->add_option("--seed", c.seed, "base seed");
  cmd->add_option("--threads", c.threads, "worker threads (default from POSH_THREADS)");
}

RunConfig load_run_config(const Common& c) {
  nlohmann::json doc = read_config_file(c.config);
  apply_overrides(doc, c.sets);
  if (c.seed) doc["seed"] = *c.seed;
  if (c.threads) doc["threads"] = *c.threads;
  return parse_config(doc);
}

std::size_t thread_count(const Common& c) {
  return c.threads && *c.threads > 0 ? *c.threads : default_thread_count();
}

std::span<const double> row_span(const Matrix& m, std::size_t i) {
  return {m.row(static_cast<Eigen::Index>(i)).data(), static_cast<std::size_t>(m.cols())};
}

Matrix training_sample(const RunConfig& rc, const ExperimentData& data) {
  if (rc.experiment.train_size > data.targets.size()) {
    throw ConfigError("train.train_size " + std::to_string(rc.experiment.train_size) +
                      " exceeds the " + std::to_string(data.targets.size()) + " targets");
  }
  return subset(data.targets, sample_without_replacement(data.targets.size(),
                                                         rc.experiment.train_size,
                                                         rc.experiment.split_seed))
      .features;
}

int cmd_train(const Common& c, std::ostream& out) {
  if (c.out.empty()) throw ConfigError("train needs --out");
  const RunConfig rc = load_run_config(c);
  const ExperimentData data = load_experiment_data(rc.dataset, rc.experiment.split_seed);
  const Matrix train = training_sample(rc, data);
  out << "epoch\tobjective\n";
  char line[64];
  const HashModel model =
      train_scheme(rc.experiment, train, rc.experiment.seed, [&](std::size_t epoch, double v) {
        std::snprintf(line, sizeof(line), "%zu\t%.10g\n", epoch, v);
        out << line;
      });
  save_model(c.out, model);
  return kExitOk;
}

int cmd_index(const Common& c, const std::string& model_path, const std::string& data_path,
              std::size_t dim, std::ostream& out) {
  if (c.out.empty()) throw ConfigError("index needs --out");
  const HashModel model = load_model(model_path);
  if (!is_sparse(model.scheme)) {
    throw ConfigError("index: model scheme " + std::string(scheme_name(model.scheme)) +
                      " produces dense codes; SPIX1 indexes hold sparse codes");
  }
  const Dataset data = load_any(data_path, dim, "");
  const std::vector<SparseCode> codes = hash_sparse_batch(model, data.features, thread_count(c));
  SparseIndex index(static_cast<std::uint32_t>(model.code_length()),
                    static_cast<std::uint32_t>(model.alpha));
  for (std::size_t i = 0; i < codes.size(); ++i) index.add(i, codes[i]);
  save_index(c.out, index);
  out << "indexed " << index.size() << " vectors into " << c.out << '\n';
  return kExitOk;
}

int cmd_query(const Common& c, const std::string& model_path, const std::string& index_path,
              const std::string& query_path, std::size_t dim, std::size_t k, std::ostream& out) {
  const HashModel model = load_model(model_path);
  const SparseIndex index = load_index(index_path);
  if (index.dim() != model.code_length() || index.alpha() != model.alpha) {
    throw ConfigError("query: index shape does not match the model");
  }
  const Dataset queries = load_any(query_path, dim, "");
  const std::vector<SparseCode> codes = hash_sparse_batch(model, queries.features, thread_count(c));
  const auto results = index.knn_query_batch(codes, k, thread_count(c));

  std::ofstream file;
  if (!c.out.empty()) {
    file.open(c.out, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open " + c.out + " for writing");
  }
  std::ostream& sink = c.out.empty() ? out : file;
  for (std::size_t q = 0; q < results.size(); ++q) {
    sink << q;
    for (const Neighbor& n : results[q]) sink << '\t' << n.id << ':' << n.distance;
    sink << '\n';
  }
  return kExitOk;
}

int cmd_eval(const Common& c, bool json_stdout, std::ostream& out) {
  const RunConfig rc = load_run_config(c);
  const ExperimentData data = load_experiment_data(rc.dataset, rc.experiment.split_seed);
  const EvalReport report = run_trials(rc.experiment, data);
  if (json_stdout) {
    out << to_json(report) << '\n';
  } else {
    out << to_table(report);
  }
  if (!c.out.empty()) {
    std::ofstream file(c.out, std::ios::trunc);
    file << to_json(report) << '\n';
    if (!file) throw std::runtime_error("failed writing " + c.out);
  }
  return kExitOk;
}

int cmd_bench(const Common& c, std::size_t k, std::ostream& out) {
  const RunConfig rc = load_run_config(c);
  const ExperimentData data = load_experiment_data(rc.dataset, rc.experiment.split_seed);
  const Matrix train = training_sample(rc, data);
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const HashModel model = train_scheme(rc.experiment, train, rc.experiment.seed);
  const auto t1 = clock::now();

  const Matrix& targets = data.targets.features;
  const Matrix& queries = data.queries.features;
  std::vector<double> latency_us(data.queries.size());
  clock::time_point t2;
  if (is_sparse(model.scheme)) {
    SparseIndex index(static_cast<std::uint32_t>(model.code_length()),
                      static_cast<std::uint32_t>(model.alpha));
    const auto codes = hash_sparse_batch(model, targets, rc.experiment.threads);
    for (std::size_t i = 0; i < codes.size(); ++i) index.add(i, codes[i]);
    t2 = clock::now();
    for (std::size_t q = 0; q < latency_us.size(); ++q) {
      const auto s = clock::now();
      const auto hits = index.knn_query(hash_sparse(model, row_span(queries, q)), k);
      latency_us[q] = std::chrono::duration<double, std::micro>(clock::now() - s).count();
      if (hits.empty() && index.size() > 0) throw std::runtime_error("bench: empty result");
    }
  } else {
    DenseIndex index(static_cast<std::uint32_t>(model.code_length()));
    const auto codes = hash_dense_batch(model, targets, rc.experiment.threads);
    for (std::size_t i = 0; i < codes.size(); ++i) index.add(i, codes[i]);
    t2 = clock::now();
    for (std::size_t q = 0; q < latency_us.size(); ++q) {
      const auto s = clock::now();
      const auto hits = index.knn_query(hash_dense(model, row_span(queries, q)), k);
      latency_us[q] = std::chrono::duration<double, std::micro>(clock::now() - s).count();
      if (hits.empty() && index.size() > 0) throw std::runtime_error("bench: empty result");
    }
  }
  double total = 0;
  for (double v : latency_us) total += v;
  std::vector<double> sorted = latency_us;
  std::sort(sorted.begin(), sorted.end());
  const auto pct = [&](double p) {
    if (sorted.empty()) return 0.0;
    const auto i = static_cast<std::size_t>(p * static_cast<double>(sorted.size() - 1) + 0.5);
    return sorted[i];
  };
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "method\t%s\ntargets\t%zu\nqueries\t%zu\nk\t%zu\ntrain_s\t%.3f\nindex_s\t%.3f\n"
                "qps\t%.1f\nlatency_mean_us\t%.2f\nlatency_p50_us\t%.2f\nlatency_p90_us\t%.2f\n"
                "latency_p99_us\t%.2f\n",
                rc.experiment.method.c_str(), data.targets.size(), data.queries.size(), k,
                std::chrono::duration<double>(t1 - t0).count(),
                std::chrono::duration<double>(t2 - t1).count(),
                total > 0 ? 1e6 * static_cast<double>(latency_us.size()) / total : 0.0,
                latency_us.empty() ? 0.0 : total / static_cast<double>(latency_us.size()),
                pct(0.5), pct(0.9), pct(0.99));
  out << buf;
  return kExitOk;
}

int cmd_gramcheck(const Common& c, std::size_t D, std::size_t d, double p, std::size_t samples,
                  std::ostream& out) {
  const GramCheck g = gram_check(D, d, p, samples, c.seed.value_or(0));
  char buf[768];
  std::snprintf(buf, sizeof(buf),
                "statistic\tobserved\tse\texpected\tdeviation\n"
                "diag_mean\t%.4f\t%.4f\t%.4f\t%+.2f se\n"
                "offdiag_mean\t%.4f\t%.4f\t%.4f\t%+.2f se\n"
                "diag_var\t%.4f\t-\t%.4f\t%+.2f%%\n"
                "offdiag_var\t%.4f\t-\t%.4f\t%+.2f%%\n"
                "samples\t%zu\n",
                g.diag_mean, g.diag_mean_se, g.expected_diag_mean,
                (g.diag_mean - g.expected_diag_mean) / g.diag_mean_se, g.offdiag_mean,
                g.offdiag_mean_se, g.expected_offdiag_mean,
                (g.offdiag_mean - g.expected_offdiag_mean) / g.offdiag_mean_se, g.diag_var,
                g.expected_diag_var, 100.0 * (g.diag_var / g.expected_diag_var - 1.0),
                g.offdiag_var, g.expected_offdiag_var,
                100.0 * (g.offdiag_var / g.expected_offdiag_var - 1.0), g.samples);
  out << buf;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse and dense binary hashing for nearest-neighbour search", "posh"};
  app.require_subcommand(1);

  Common train_c, index_c, query_c, eval_c, bench_c, gram_c;

  auto* train = app.add_subcommand("train", "train a hash model and write a POSH1 file");
  add_common(train, train_c, true);
  train->add_option("--out", train_c.out, "model file")->required();

  std::string model_path, data_path, index_path, query_path;
  std::size_t dim = 0;
  std::size_t k = 10;
  auto* index = app.add_subcommand("index", "hash a dataset into a SPIX1 index");
  add_common(index, index_c, false);
  index->add_option("--model", model_path)->required();
  index->add_option("--data", data_path, ".fvecs, .csv or raw f32")->required();
  index->add_option("--dim", dim, "row width for raw f32 input");
  index->add_option("--out", index_c.out, "index file")->required();

  auto* query = app.add_subcommand("query", "k nearest indexed codes for every query vector");
  add_common(query, query_c, false);
  query->add_option("--model", model_path)->required();
  query->add_option("--index", index_path)->required();
  query->add_option("--queries", query_path)->required();
  query->add_option("--dim", dim, "row width for raw f32 input");
  query->add_option("--k", k)->check(CLI::PositiveNumber);
  query->add_option("--out", query_c.out, "rankings file (default stdout)");

  bool json_stdout = false;
  auto* eval = app.add_subcommand("eval", "multi-trial retrieval evaluation");
  add_common(eval, eval_c, true);
  eval->add_option("--out", eval_c.out, "JSON report file");
  eval->add_flag("--json", json_stdout, "print the JSON report instead of the table");

  std::size_t bench_k = 100;
  auto* bench = app.add_subcommand("bench", "query throughput and latency");
  add_common(bench, bench_c, true);
  bench->add_option("--k", bench_k)->check(CLI::PositiveNumber);

  std::size_t gram_D = 1024, gram_d = 64, samples = 100;
  double p = 0.2;
  auto* gram = app.add_subcommand("gramcheck", "Gram statistics of random Bernoulli projections");
  add_common(gram, gram_c, false);
  gram->add_option("--D", gram_D)->check(CLI::PositiveNumber);
  gram->add_option("--d", gram_d)->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  gram->add_option("--p", p)->check(CLI::Range(0.0, 1.0));
  gram->add_option("--samples", samples)->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));

  auto* schema = app.add_subcommand("schema", "print the accepted config keys and their types");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(train_c, out);
    if (*index) return cmd_index(index_c, model_path, data_path, dim, out);
    if (*query) return cmd_query(query_c, model_path, index_path, query_path, dim, k, out);
    if (*eval) return cmd_eval(eval_c, json_stdout, out);
    if (*bench) return cmd_bench(bench_c, bench_k, out);
    if (*schema) {
      out << config_schema().dump(2) << '\n';
      return kExitOk;
    }
    if (*gram) return cmd_gramcheck(gram_c, gram_D, gram_d, p, samples, out);
  } catch (const ConfigError& e) {
    err << "posh: config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "posh: invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "posh: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "posh: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace posh::cli
